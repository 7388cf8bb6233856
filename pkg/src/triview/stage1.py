"""First reduction step: compress one tensor mode to a single value per fiber.

The compressed mode's fibers become rows of an unfolded matrix; a weight
vector ``w`` (the parametric mapping) projects each fiber to one value, and
folding the projections yields the matrix ``Y`` whose rows are the plot mode
and whose columns are the mode left for the second reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputValidationError, NumericalError
from .tensor import MODE_NAMES, Mode, Tensor3, fold, unfold

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_MAX_ITER = 10_000

PCA1D = "pca"
MEAN = "mean"
STAGE1_METHODS = (PCA1D, MEAN)
# Extension point for further linear compressors (e.g. a supervised one);
# registering a fitter returning (w, quality) is all `compress` needs.
_METHOD_REGISTRY: dict[str, Callable[[np.ndarray], tuple[np.ndarray, float]]] = {}


@dataclass(frozen=True)
class ModeCombo:
    """Ordered choice of (stage-1 mode, stage-2 mode).

    The remaining mode is implied: its indices become the rows of ``Y`` and
    the points of the 2-D embedding.
    """

    first: Mode
    second: Mode

    def __post_init__(self):
        if self.first is self.second:
            raise InputValidationError("combo modes must differ")

    @property
    def point_mode(self) -> Mode:
        (rest,) = [m for m in Mode if m not in (self.first, self.second)]
        return rest

    def key(self) -> str:
        return f"{MODE_NAMES[self.first]}-{MODE_NAMES[self.second]}"

    def to_doc(self) -> dict:
        return {"first": MODE_NAMES[self.first], "second": MODE_NAMES[self.second]}

    @classmethod
    def from_doc(cls, doc: dict) -> "ModeCombo":
        return cls(Mode.from_name(doc["first"]), Mode.from_name(doc["second"]))


def all_combos() -> list[ModeCombo]:
    """All six (first, second) mode pairs."""
    return [
        ModeCombo(a, b) for a in Mode for b in Mode if a is not b
    ]


def combos_for_point_mode(point_mode: Mode) -> list[ModeCombo]:
    """The two combos whose implied plot mode is ``point_mode``.

    Ordered with the later-axis mode compressed first, matching the
    left/right panel convention (instance points: (variable, time) then
    (time, variable)).
    """
    earlier, later = sorted(
        (m for m in Mode if m is not point_mode), key=lambda m: m.axis
    )
    return [ModeCombo(later, earlier), ModeCombo(earlier, later)]


@dataclass(frozen=True)
class CompressedMatrix:
    """Stage-1 output: ``Y``, the mapping ``w`` and a quality score.

    ``Y[i, j]`` is exactly ``w . fiber`` for the fiber at (plot index i,
    second-mode index j); ``quality`` is the explained variance ratio for
    PCA and 1.0 by convention for mean compression.
    """

    Y: np.ndarray
    w: np.ndarray
    quality: float
    compressed_mode: Mode
    method: str
    combo: ModeCombo
    dataset_name: str = ""

    def to_doc(self) -> dict:
        return {
            "dataset": self.dataset_name,
            "combo": self.combo.to_doc(),
            "method": self.method,
            "quality": self.quality,
            "w": self.w.tolist(),
            "shape": list(self.Y.shape),
            "Y": self.Y.reshape(-1).tolist(),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "CompressedMatrix":
        combo = ModeCombo.from_doc(doc["combo"])
        shape = tuple(doc["shape"])
        return cls(
            Y=np.asarray(doc["Y"], dtype=np.float64).reshape(shape),
            w=np.asarray(doc["w"], dtype=np.float64),
            quality=float(doc["quality"]),
            compressed_mode=combo.first,
            method=doc["method"],
            combo=combo,
            dataset_name=doc.get("dataset", ""),
        )


def pca_fit_1d(X: np.ndarray) -> tuple[np.ndarray, float]:
    """Top principal direction of the rows of ``X`` by power iteration.

    Returns the unit weight vector ``w`` and the explained variance ratio
    (top eigenvalue over the covariance trace).  The sign is fixed so the
    largest-magnitude component of ``w`` is positive, which makes the output
    deterministic.

    Raises
    ------
    NumericalError
        If the columns carry no variance ("degenerate input") or the power
        iteration does not converge within the iteration cap.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 1:
        raise InputValidationError(
            f"need a 2-D array with >= 2 rows and >= 1 column, got shape {X.shape}"
        )
    if not np.all(np.isfinite(X)):
        raise InputValidationError("input contains non-finite entries")
    centered = X - X.mean(axis=0)
    n = X.shape[0]
    cov = (centered.T @ centered) / n
    trace = float(np.trace(cov))
    scale = float(np.abs(X).max())
    if trace <= 1e-24 * max(1.0, scale * scale):
        raise NumericalError("degenerate input: zero total variance")
    # Start from the strongest covariance column: cheap, deterministic, and
    # never orthogonal to the dominant eigenspace for PSD matrices.
    start_col = int(np.argmax(np.linalg.norm(cov, axis=0)))
    v = cov[:, start_col] / np.linalg.norm(cov[:, start_col])
    converged = False
    for _ in range(POWER_ITERATION_MAX_ITER):
        v_new = cov @ v
        norm = np.linalg.norm(v_new)
        if norm == 0.0:
            raise NumericalError("degenerate input: zero total variance")
        v_new /= norm
        if np.linalg.norm(v_new - v) <= POWER_ITERATION_TOL:
            v = v_new
            converged = True
            break
        v = v_new
    if not converged:
        raise NumericalError(
            f"power iteration did not converge within {POWER_ITERATION_MAX_ITER} iterations"
        )
    eigenvalue = float(v @ (cov @ v))
    w = apply_sign_convention(v)
    evr = min(max(eigenvalue / trace, 0.0), 1.0)
    return w, evr


def apply_sign_convention(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` if needed so its largest-magnitude component is positive."""
    pivot = int(np.argmax(np.abs(v)))
    if v[pivot] < 0:
        return -v
    return v.copy()


def compress(t: Tensor3, combo: ModeCombo, method: str = PCA1D) -> CompressedMatrix:
    """Compress the tensor along ``combo.first`` into the matrix ``Y``.

    Unfolds along the compressed mode, projects every fiber onto ``w`` (top
    principal direction for PCA, the uniform average for the mean method) and
    folds the projections back so that rows are the plot mode and columns are
    ``combo.second``.
    """
    if method not in STAGE1_METHODS and method not in _METHOD_REGISTRY:
        raise InputValidationError(
            f"unknown stage-1 method {method!r}; available: "
            f"{', '.join((*STAGE1_METHODS, *_METHOD_REGISTRY))}"
        )
    unfolded = unfold(t, combo.first)
    X = unfolded.matrix
    if method == PCA1D:
        w, quality = pca_fit_1d(X)
    elif method == MEAN:
        length = t.mode_length(combo.first)
        w = np.full(length, 1.0 / length)
        quality = 1.0  # no variance-explained notion for a plain average
    else:
        w, quality = _METHOD_REGISTRY[method](X)
    y = X @ w
    folded = fold(y, unfolded.row_index_map)
    if unfolded.row_index_map.outer_mode is combo.point_mode:
        Y = folded
    else:
        Y = np.ascontiguousarray(folded.T)
    return CompressedMatrix(
        Y=Y,
        w=w,
        quality=float(quality),
        compressed_mode=combo.first,
        method=method,
        combo=combo,
        dataset_name=t.name,
    )
