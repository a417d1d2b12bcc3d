"""
Constructores de datasets pequeños para las pruebas.
"""
import numpy as np

from app.models.dataset import Dataset
from app.models.schemas import Schema


def random_dataset(cardinalities, n_rows, seed=0, household_size=None) -> Dataset:
    """Dataset uniforme; con ``household_size`` agrupa filas consecutivas en hogares."""
    schema = Schema.from_cardinalities(list(cardinalities))
    rng = np.random.default_rng(seed)
    values = np.column_stack([rng.integers(0, card, size=n_rows) for card in cardinalities])
    ids = None
    if household_size is not None:
        ids = np.arange(n_rows) // household_size
    return Dataset(schema, values, ids)


def dataset_from_rows(cardinalities, rows, household_size=1) -> Dataset:
    schema = Schema.from_cardinalities(list(cardinalities))
    values = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(cardinalities))
    return Dataset(schema, values, np.arange(len(rows)) // household_size)


def naive_counts(data: Dataset, indices) -> np.ndarray:
    """Conteo fila por fila, sin vectorizar."""
    shape = tuple(data.schema.cardinalities[i] for i in indices)
    counts = np.zeros(shape, dtype=np.float64)
    for row in data.values:
        counts[tuple(int(row[i]) for i in indices)] += 1
    return counts


def all_cells(cardinalities) -> np.ndarray:
    """Todas las combinaciones de valores, en el orden de ``ravel``."""
    return np.indices(tuple(cardinalities)).reshape(len(cardinalities), -1).T


def empirical_joint(data: Dataset) -> np.ndarray:
    """Distribución conjunta completa del dataset, aplanada."""
    shape = tuple(data.schema.cardinalities)
    flat = np.ravel_multi_index(tuple(data.values.T), shape)
    return np.bincount(flat, minlength=int(np.prod(shape))) / data.n_rows
