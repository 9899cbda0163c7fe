"""Synthetic data, figure pipelines and result persistence."""

from .builders import HierKnownBuilder, HierUnknownBuilder, SelectionBuilder, StandardBuilder
from .bundle import BundleError, ResultBundle, Table, read_bundle, write_bundle
from .datasets import DatasetRecipe, gen_dataset, true_coefficients
from .figures import FIGURES, figure_config, ratio, reproduce_figure

__all__ = [
    "FIGURES",
    "BundleError",
    "DatasetRecipe",
    "HierKnownBuilder",
    "HierUnknownBuilder",
    "ResultBundle",
    "SelectionBuilder",
    "StandardBuilder",
    "Table",
    "figure_config",
    "gen_dataset",
    "ratio",
    "read_bundle",
    "reproduce_figure",
    "true_coefficients",
    "write_bundle",
]
