"""Sliding-window Gaussian kernel density tracking with MISE-optimal weights."""

from swkde.gaussian import GaussianParams, cross_inner, gaussian_product, l2_norm_sq, phi
from swkde.mise import (
    BatchSummary,
    MiseComponents,
    MixtureDensity,
    build_components,
    closed_form_ise,
    exact_mise,
    ib_squared,
    iv,
)
from swkde.weights import (
    ConvergenceError,
    QpReport,
    average_weights,
    current_weights,
    exponential_weights,
    project_to_simplex,
    solve_optimal_weights,
)
from swkde.tracker import Batch, Tracker, TrackerConfig, summarize_batch
from swkde.synthgen import Dataset, GeneratorConfig, generate, load_dataset, save_dataset

__version__ = "0.1.0"

__all__ = [
    "GaussianParams",
    "phi",
    "gaussian_product",
    "cross_inner",
    "l2_norm_sq",
    "BatchSummary",
    "MiseComponents",
    "MixtureDensity",
    "build_components",
    "exact_mise",
    "ib_squared",
    "iv",
    "closed_form_ise",
    "ConvergenceError",
    "QpReport",
    "solve_optimal_weights",
    "project_to_simplex",
    "current_weights",
    "average_weights",
    "exponential_weights",
    "Batch",
    "Tracker",
    "TrackerConfig",
    "summarize_batch",
    "Dataset",
    "GeneratorConfig",
    "generate",
    "save_dataset",
    "load_dataset",
]
