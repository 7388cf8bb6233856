"""Visual-analytics toolkit for third-order tensors (time x instance x
variable): two-step dimensionality reduction, contrastive cluster
explanation, and a session server for interactive frontends.
"""

from triview._layout import BACKEND as layout_backend
from triview.baselines import BaselineReport, compare_baselines, flat_feature_count
from triview.contrast import (
    ClusterSelection,
    FeatureContributions,
    adjust_signs,
    explain_cluster,
    feature_contributions,
    scale_contributions,
)
from triview.dataio import load_dataset, save_dataset
from triview.errors import (
    InputValidationError,
    JobCancelled,
    NumericalError,
    TriviewError,
)
from triview.session import (
    AnalysisResult,
    HistogramSet,
    PipelineConfig,
    Session,
    compute_histograms,
    results_for_point_mode,
    run_pipeline,
)
from triview.stage1 import (
    CompressedMatrix,
    ModeCombo,
    all_combos,
    combos_for_point_mode,
    compress,
    pca_fit_1d,
)
from triview.stage2 import (
    Embedding,
    NeighborParams,
    embed_linear,
    embed_neighbor,
    trustworthiness,
)
from triview.tensor import Mode, Tensor3, fold, standardize, unfold

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "BaselineReport",
    "ClusterSelection",
    "CompressedMatrix",
    "Embedding",
    "FeatureContributions",
    "HistogramSet",
    "InputValidationError",
    "JobCancelled",
    "Mode",
    "ModeCombo",
    "NeighborParams",
    "NumericalError",
    "PipelineConfig",
    "Session",
    "Tensor3",
    "TriviewError",
    "adjust_signs",
    "all_combos",
    "combos_for_point_mode",
    "compare_baselines",
    "compress",
    "compute_histograms",
    "embed_linear",
    "embed_neighbor",
    "explain_cluster",
    "feature_contributions",
    "flat_feature_count",
    "fold",
    "layout_backend",
    "load_dataset",
    "pca_fit_1d",
    "results_for_point_mode",
    "run_pipeline",
    "save_dataset",
    "scale_contributions",
    "standardize",
    "trustworthiness",
    "unfold",
    "__version__",
]
