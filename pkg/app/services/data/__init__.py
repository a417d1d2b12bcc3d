"""
Ingesta de datos, mediciones de marginales y dataset de escritorio.
"""
from .loader import load_dataset, load_schema, save_schema, write_dataset
from .marginals import (
    conditional_prob,
    conditional_probabilities,
    measure_marginal,
    mutual_information,
    mutual_information_counts,
    sample_categorical,
    smoothed_probabilities,
)

__all__ = [
    "load_dataset",
    "load_schema",
    "save_schema",
    "write_dataset",
    "conditional_prob",
    "conditional_probabilities",
    "measure_marginal",
    "mutual_information",
    "mutual_information_counts",
    "sample_categorical",
    "smoothed_probabilities",
]
