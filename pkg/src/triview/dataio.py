"""Dataset ingestion and serialization.

A dataset is a JSON descriptor (name, per-mode labels, optional aux metadata,
path to the data file) plus the data itself in one of two layouts:

* long format: delimited text records ``time_label,instance_label,
  variable_label,value``, one cell per record, every cell exactly once;
* dense binary: three little-endian uint64 mode lengths followed by the
  float64 values in row-major ``(t, n, d)`` order.

Both round-trip bit-exactly for finite doubles (text via ``repr``).
"""

from __future__ import annotations

import json
import math
import struct
from datetime import date
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import InputValidationError
from .tensor import MODE_NAMES, Mode, Tensor3

_MAX_MISSING_REPORTED = 10
_BINARY_SUFFIXES = {".bin", ".raw"}


def read_descriptor(path: str | Path) -> dict:
    """Load and validate a dataset descriptor document."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise InputValidationError(f"descriptor not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputValidationError(f"descriptor {path} is not valid JSON: {exc}") from None
    return validate_descriptor(doc, base_dir=path.parent)


def validate_descriptor(doc: dict, base_dir: Path | None = None) -> dict:
    if not isinstance(doc, dict):
        raise InputValidationError("descriptor must be a JSON object")
    for key in ("time_labels", "instance_labels", "variable_labels"):
        labels = doc.get(key)
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise InputValidationError(f"descriptor field {key!r} must be an array of strings")
        if len(labels) < 2:
            raise InputValidationError(f"descriptor field {key!r} needs at least 2 entries")
        if len(set(labels)) != len(labels):
            raise InputValidationError(f"descriptor field {key!r} contains duplicate labels")
    aux = doc.get("aux", {})
    if not isinstance(aux, dict):
        raise InputValidationError("descriptor field 'aux' must be an object")
    for mode_name, entries in aux.items():
        mode = Mode.from_name(mode_name)
        expected = len(doc[f"{MODE_NAMES[mode]}_labels"])
        if not isinstance(entries, list) or len(entries) != expected:
            raise InputValidationError(
                f"aux metadata for {mode_name!r} must be a list of {expected} strings"
            )
        if mode is Mode.TIME:
            for entry in entries:
                try:
                    date.fromisoformat(str(entry)[:10])
                except ValueError:
                    raise InputValidationError(
                        f"time aux entry {entry!r} is not an ISO-8601 date"
                    ) from None
    doc.setdefault("name", "")
    if base_dir is not None:
        doc["_base_dir"] = str(base_dir)
    return doc


def iter_long_records(path: str | Path) -> Iterable[tuple[str, str, str, str]]:
    """Yield (time, instance, variable, value) fields from a delimited file.

    Comma or tab delimited; blank lines and '#' comments are skipped. A
    leading header row matching the canonical column names is tolerated.
    """
    first = True
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split(",")
            if len(fields) != 4:
                raise InputValidationError(
                    f"{path}:{lineno}: expected 4 fields, got {len(fields)}"
                )
            fields = [f.strip() for f in fields]
            if first:
                first = False
                if fields[3].lower() == "value":
                    continue
            yield tuple(fields)  # type: ignore[misc]


def load_tensor(
    descriptor: dict,
    records: Iterable[tuple[str, str, str, str]],
) -> Tensor3:
    """Build a dense tensor from long-format records.

    Every (time, instance, variable) cell must appear exactly once with a
    finite value; duplicates, gaps, unknown labels, and non-finite values are
    all rejected with the offending coordinates named.
    """
    tl = descriptor["time_labels"]
    il = descriptor["instance_labels"]
    vl = descriptor["variable_labels"]
    t_idx = {lab: i for i, lab in enumerate(tl)}
    n_idx = {lab: i for i, lab in enumerate(il)}
    d_idx = {lab: i for i, lab in enumerate(vl)}
    values = np.empty((len(tl), len(il), len(vl)), dtype=np.float64)
    seen = np.zeros(values.shape, dtype=bool)
    for rec in records:
        t_lab, n_lab, v_lab, raw = rec
        try:
            t = t_idx[t_lab]
        except KeyError:
            raise InputValidationError(f"unknown time label {t_lab!r}") from None
        try:
            n = n_idx[n_lab]
        except KeyError:
            raise InputValidationError(f"unknown instance label {n_lab!r}") from None
        try:
            d = d_idx[v_lab]
        except KeyError:
            raise InputValidationError(f"unknown variable label {v_lab!r}") from None
        if seen[t, n, d]:
            raise InputValidationError(
                f"duplicate cell ({t_lab!r}, {n_lab!r}, {v_lab!r})"
            )
        try:
            val = float(raw)
        except ValueError:
            raise InputValidationError(
                f"unparsable value {raw!r} at cell ({t_lab!r}, {n_lab!r}, {v_lab!r})"
            ) from None
        if not math.isfinite(val):
            raise InputValidationError(
                f"non-finite value {raw!r} at cell ({t_lab!r}, {n_lab!r}, {v_lab!r})"
            )
        seen[t, n, d] = True
        values[t, n, d] = val
    if not seen.all():
        missing = np.argwhere(~seen)
        coords = ", ".join(
            f"(t={t}, n={n}, d={d})" for t, n, d in missing[:_MAX_MISSING_REPORTED]
        )
        extra = len(missing) - min(len(missing), _MAX_MISSING_REPORTED)
        suffix = f" and {extra} more" if extra > 0 else ""
        raise InputValidationError(f"missing cells: {coords}{suffix}")
    return Tensor3(
        values=values,
        time_labels=list(tl),
        instance_labels=list(il),
        variable_labels=list(vl),
        aux={k: list(v) for k, v in descriptor.get("aux", {}).items()},
        name=descriptor.get("name", ""),
    )


def load_binary(descriptor: dict, path: str | Path) -> Tensor3:
    """Read the dense binary layout: 3 x uint64-LE lengths, then float64-LE data."""
    raw = Path(path).read_bytes()
    if len(raw) < 24:
        raise InputValidationError(f"binary data file {path} is truncated")
    t_len, n_len, d_len = struct.unpack("<3Q", raw[:24])
    expected_shape = (
        len(descriptor["time_labels"]),
        len(descriptor["instance_labels"]),
        len(descriptor["variable_labels"]),
    )
    if (t_len, n_len, d_len) != expected_shape:
        raise InputValidationError(
            f"binary header declares shape {(t_len, n_len, d_len)}, "
            f"descriptor declares {expected_shape}"
        )
    count = t_len * n_len * d_len
    if len(raw) != 24 + 8 * count:
        raise InputValidationError(
            f"binary data file holds {len(raw) - 24} payload bytes, expected {8 * count}"
        )
    values = np.frombuffer(raw, dtype="<f8", offset=24, count=count).reshape(
        t_len, n_len, d_len
    )
    return Tensor3(
        values=values.copy(),
        time_labels=list(descriptor["time_labels"]),
        instance_labels=list(descriptor["instance_labels"]),
        variable_labels=list(descriptor["variable_labels"]),
        aux={k: list(v) for k, v in descriptor.get("aux", {}).items()},
        name=descriptor.get("name", ""),
    )


def load_dataset(descriptor_path: str | Path) -> Tensor3:
    """Load a dataset given its descriptor; the descriptor's ``data`` field
    names the data file relative to the descriptor's directory."""
    descriptor = read_descriptor(descriptor_path)
    data_ref = descriptor.get("data")
    if not data_ref:
        raise InputValidationError(
            f"descriptor {descriptor_path} has no 'data' field naming the data file"
        )
    data_path = Path(descriptor["_base_dir"]) / data_ref
    if not data_path.exists():
        raise InputValidationError(f"data file not found: {data_path}")
    if data_path.suffix.lower() in _BINARY_SUFFIXES:
        return load_binary(descriptor, data_path)
    return load_tensor(descriptor, iter_long_records(data_path))


def write_long_format(t: Tensor3, path: str | Path) -> None:
    """Write the long-format text layout; ``repr`` keeps doubles exact."""
    with open(path, "w") as fh:
        fh.write("time,instance,variable,value\n")
        for ti, t_lab in enumerate(t.time_labels):
            for ni, n_lab in enumerate(t.instance_labels):
                for di, v_lab in enumerate(t.variable_labels):
                    fh.write(
                        f"{t_lab},{n_lab},{v_lab},{float(t.values[ti, ni, di])!r}\n"
                    )


def write_binary(t: Tensor3, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<3Q", *t.values.shape))
        fh.write(np.ascontiguousarray(t.values, dtype="<f8").tobytes())


def write_descriptor(t: Tensor3, path: str | Path, data_file: str) -> None:
    doc = {
        "name": t.name,
        "data": data_file,
        "time_labels": t.time_labels,
        "instance_labels": t.instance_labels,
        "variable_labels": t.variable_labels,
    }
    if t.aux:
        doc["aux"] = t.aux
    Path(path).write_text(json.dumps(doc, indent=2))


def dataset_summary(t: Tensor3) -> dict:
    """Dataset summary document used by the protocol's load reply."""
    return {
        "name": t.name,
        "shape": list(t.values.shape),
        "time_labels": t.time_labels,
        "instance_labels": t.instance_labels,
        "variable_labels": t.variable_labels,
        "aux": t.aux,
    }


def save_dataset(t: Tensor3, directory: str | Path, binary: bool = False) -> Path:
    """Write descriptor plus data file into ``directory``; returns the
    descriptor path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = t.name or "dataset"
    data_file = f"{stem}.bin" if binary else f"{stem}.csv"
    if binary:
        write_binary(t, directory / data_file)
    else:
        write_long_format(t, directory / data_file)
    descriptor_path = directory / f"{stem}.json"
    write_descriptor(t, descriptor_path, data_file)
    return descriptor_path
