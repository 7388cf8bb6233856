"""Third-order tensor data model: labels, standardization, unfold/fold.

Everything downstream works on a dense (time x instance x variable) array.
Unfolding turns the tensor into a matrix whose rows are the fibers along one
target mode; folding reverses it for a single compressed value per fiber.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InputValidationError

# Relative tolerance below which a slice is treated as constant.  Centering a
# constant float column leaves O(eps) residue, so an exact zero test is wrong.
_CONST_RTOL = 1e-12


class Mode(Enum):
    """One axis of the tensor. The axis position is fixed by value."""

    TIME = 0
    INSTANCE = 1
    VARIABLE = 2

    @property
    def axis(self) -> int:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "Mode":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise InputValidationError(
                f"unknown mode {name!r}; expected one of time, instance, variable"
            ) from None


MODE_NAMES = {Mode.TIME: "time", Mode.INSTANCE: "instance", Mode.VARIABLE: "variable"}


@dataclass(frozen=True)
class Tensor3:
    """Dense labeled third-order tensor, indexed ``values[t, n, d]``.

    Immutable after construction; safe to share across threads.

    Parameters
    ----------
    values : ndarray, shape (T, N, D)
        Finite float64 data, every mode length >= 2.
    time_labels, instance_labels, variable_labels : list of str
        Display labels, one per index of the corresponding mode.
    aux : dict, optional
        Per-mode auxiliary metadata keyed by mode name ("time", "instance",
        "variable"); each entry is a list of strings aligned with the labels
        (ISO-8601 dates for the time mode, free-form tags otherwise).
    name : str
        Dataset name carried into serialized results.
    """

    values: np.ndarray
    time_labels: list[str]
    instance_labels: list[str]
    variable_labels: list[str]
    aux: dict[str, list[str]] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.ndim != 3:
            raise InputValidationError(f"expected a 3-D array, got ndim={values.ndim}")
        if any(s < 2 for s in values.shape):
            raise InputValidationError(
                f"every mode length must be >= 2, got shape {values.shape}"
            )
        for mode, labels in (
            (Mode.TIME, self.time_labels),
            (Mode.INSTANCE, self.instance_labels),
            (Mode.VARIABLE, self.variable_labels),
        ):
            if len(labels) != values.shape[mode.axis]:
                raise InputValidationError(
                    f"{MODE_NAMES[mode]} labels have length {len(labels)}, "
                    f"expected {values.shape[mode.axis]}"
                )
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise InputValidationError(
                f"non-finite value at (t={bad[0]}, n={bad[1]}, d={bad[2]})"
            )
        for key, entries in self.aux.items():
            mode = Mode.from_name(key)
            if len(entries) != values.shape[mode.axis]:
                raise InputValidationError(
                    f"aux metadata for {key!r} has length {len(entries)}, "
                    f"expected {values.shape[mode.axis]}"
                )
        values.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape  # type: ignore[return-value]

    def mode_length(self, mode: Mode) -> int:
        return self.values.shape[mode.axis]

    def labels(self, mode: Mode) -> list[str]:
        return {
            Mode.TIME: self.time_labels,
            Mode.INSTANCE: self.instance_labels,
            Mode.VARIABLE: self.variable_labels,
        }[mode]


@dataclass(frozen=True)
class RowIndexMap:
    """Bijection between unfolded-matrix rows and (outer, inner) index pairs.

    Row ``r`` corresponds to ``(r // inner_length, r % inner_length)`` in the
    ``(outer_mode, inner_mode)`` axes.
    """

    outer_mode: Mode
    inner_mode: Mode
    outer_length: int
    inner_length: int

    def row_to_pair(self, r: int) -> tuple[int, int]:
        if not 0 <= r < self.outer_length * self.inner_length:
            raise InputValidationError(f"row {r} outside [0, {self.n_rows})")
        return divmod(r, self.inner_length)

    def pair_to_row(self, i: int, j: int) -> int:
        return i * self.inner_length + j

    @property
    def n_rows(self) -> int:
        return self.outer_length * self.inner_length


@dataclass(frozen=True)
class UnfoldedMatrix:
    """Mode-unfolding of a tensor: one row per fiber along ``target_mode``."""

    matrix: np.ndarray
    row_index_map: RowIndexMap
    target_mode: Mode


def _non_target_axes(target: Mode) -> tuple[Mode, Mode]:
    """The two non-target modes in (earlier axis, later axis) order."""
    earlier, later = sorted(
        (m for m in Mode if m is not target), key=lambda m: m.axis
    )
    return earlier, later


def unfold(t: Tensor3, target: Mode) -> UnfoldedMatrix:
    """Arrange all fibers along ``target`` as matrix rows.

    Rows enumerate the two non-target modes with the later axis as the outer
    (slow) index and the earlier axis as the inner (fast) index, i.e. the
    classic mode-n matricization order transposed to fibers-as-rows.  For
    target=variable this yields (instance-outer, time-inner) rows of length D.
    """
    inner, outer = _non_target_axes(target)
    mat = t.values.transpose(outer.axis, inner.axis, target.axis).reshape(
        t.mode_length(outer) * t.mode_length(inner), t.mode_length(target)
    )
    rim = RowIndexMap(
        outer_mode=outer,
        inner_mode=inner,
        outer_length=t.mode_length(outer),
        inner_length=t.mode_length(inner),
    )
    return UnfoldedMatrix(matrix=np.ascontiguousarray(mat), row_index_map=rim, target_mode=target)


def fold(v: np.ndarray, row_index_map: RowIndexMap) -> np.ndarray:
    """Reshape a per-fiber vector back to an (outer x inner) matrix.

    Inverse of the unfolding row order: ``M[i, j] = v[r]`` where
    ``row_index_map`` sends row ``r`` to ``(i, j)``.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != row_index_map.n_rows:
        raise InputValidationError(
            f"vector length {v.shape} does not match the {row_index_map.n_rows} "
            "rows of the unfolding"
        )
    return v.reshape(row_index_map.outer_length, row_index_map.inner_length).copy()


def standardize(t: Tensor3, along: Mode) -> Tensor3:
    """Z-score every slice along ``along`` (population sigma).

    Each slice (the full 2-D slab at one index of ``along``) ends up with
    mean 0 and standard deviation 1; constant slices map to all zeros instead
    of erroring so flat sensors do not abort an analysis.
    """
    other_axes = tuple(ax for ax in range(3) if ax != along.axis)
    mean = t.values.mean(axis=other_axes, keepdims=True)
    sigma = t.values.std(axis=other_axes, keepdims=True)
    scale_floor = np.abs(t.values).max(axis=other_axes, keepdims=True) * _CONST_RTOL
    constant = sigma <= scale_floor
    safe_sigma = np.where(constant, 1.0, sigma)
    out = (t.values - mean) / safe_sigma
    out = np.where(constant, 0.0, out)
    return Tensor3(
        values=out,
        time_labels=t.time_labels,
        instance_labels=t.instance_labels,
        variable_labels=t.variable_labels,
        aux=t.aux,
        name=t.name,
    )
