"""
Mediciones sobre datasets discretos: marginales, condicionales e información mutua.
"""
import math
from typing import Sequence

import numpy as np
from sklearn.metrics import mutual_info_score

from app.core.exceptions import InvalidInputError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.tables import FeatureTuple, MarginalTable

# Tope de celdas para una tabla densa
MAX_DENSE_CELLS = 10_000_000


def measure_marginal(data: Dataset, features: FeatureTuple) -> MarginalTable:
    """
    Contar la distribución conjunta exacta de una tupla de atributos.

    Args:
        data: Dataset no vacío
        features: Tupla válida para el esquema del dataset

    Returns:
        Tabla de conteos enteros cuyo total es la cantidad de filas

    Raises:
        InvalidInputError: Dataset vacío, tupla inválida o dominio demasiado grande
    """
    features.validate(data.schema)
    if data.n_rows == 0:
        raise InvalidInputError("no se puede medir una marginal sobre un dataset vacío")

    shape = features.domain_shape(data.schema)
    n_cells = math.prod(shape)
    if n_cells > MAX_DENSE_CELLS:
        raise InvalidInputError(f"la tupla {features} tiene {n_cells} celdas (máximo {MAX_DENSE_CELLS})")

    columns = data.values[:, list(features.indices)]
    flat = np.ravel_multi_index(tuple(columns.T), shape)
    counts = np.bincount(flat, minlength=n_cells).reshape(shape)
    return MarginalTable(features, counts)


def smoothed_probabilities(table: MarginalTable, smoothing: float) -> np.ndarray:
    """Probabilidades conjuntas con suavizado aditivo por celda (uniforme si todo es 0)."""
    if smoothing < 0:
        raise InvalidInputError("el suavizado debe ser no negativo")
    cells = table.cells + smoothing
    total = float(cells.sum())
    if total <= 0.0:
        return np.full(table.shape, 1.0 / table.cells.size)
    return cells / total


def conditional_probabilities(
    table: MarginalTable,
    child_values: np.ndarray,
    parent_values: np.ndarray,
    smoothing: float = 0.0,
) -> np.ndarray:
    """
    Evaluar P(hijo = v | padres = u) para muchos pares (v, u).

    Con suavizado s: (n(v, u) + s) / (n(u) + s · |hijo|). Un estrato sin masa
    (n(u) = 0 y s = 0) devuelve la uniforme 1/|hijo|.

    Args:
        table: Tabla de conteos en forma condicional (eje 0 = hijo)
        child_values: Valores del hijo, forma (n,)
        parent_values: Valores de los padres, forma (n, cantidad de padres)
        smoothing: Suavizado aditivo s ≥ 0

    Returns:
        Probabilidades, forma (n,)
    """
    if smoothing < 0:
        raise InvalidInputError("el suavizado debe ser no negativo")
    if not table.features.conditional:
        raise InvalidInputError("la tabla no está en forma condicional")

    child_values = np.asarray(child_values, dtype=np.int64)
    parent_values = np.asarray(parent_values, dtype=np.int64).reshape(len(child_values), -1)
    child_cardinality = table.shape[0]
    parent_shape = table.shape[1:]
    if parent_values.shape[1] != len(parent_shape):
        raise InvalidInputError("cantidad de valores de padres incorrecta")
    if np.any(child_values < 0) or np.any(child_values >= child_cardinality):
        raise InvalidInputError("valor del hijo fuera de dominio")
    if parent_shape and (np.any(parent_values < 0) or np.any(parent_values >= np.asarray(parent_shape))):
        raise InvalidInputError("valor de padre fuera de dominio")

    # Matriz (hijo × estratos)
    flat = table.cells.reshape(child_cardinality, -1)
    if parent_shape:
        strata = np.ravel_multi_index(tuple(parent_values.T), parent_shape)
    else:
        strata = np.zeros(len(child_values), dtype=np.int64)
    numerator = flat[child_values, strata] + smoothing
    denominator = flat.sum(axis=0)[strata] + smoothing * child_cardinality
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(denominator > 0.0, numerator / denominator, 1.0 / child_cardinality)


def conditional_prob(
    table: MarginalTable,
    child_value: int,
    parent_values: Sequence[int] = (),
    smoothing: float = 0.0,
) -> float:
    """Evaluar P(hijo = v | padres = u) para un único par."""
    result = conditional_probabilities(
        table,
        np.asarray([child_value]),
        np.asarray([list(parent_values)], dtype=np.int64).reshape(1, -1),
        smoothing,
    )
    return float(result[0])


def mutual_information_counts(table: MarginalTable) -> float:
    """
    Información mutua (nats) entre el hijo y el conjunto de padres de una tabla.

    Los padres se aplanan en una sola variable; sin padres el resultado es 0.
    """
    if len(table.features) < 2:
        return 0.0
    child_cardinality = table.shape[0]
    contingency = np.rint(table.cells).astype(np.int64).reshape(child_cardinality, -1)
    if contingency.sum() == 0:
        return 0.0
    return max(0.0, float(mutual_info_score(None, None, contingency=contingency)))


def mutual_information(data: Dataset, a: int, b: int) -> float:
    """
    Estimar I(A; B) en nats por sustitución (plug-in).

    Args:
        data: Dataset no vacío
        a: Índice del primer atributo
        b: Índice del segundo atributo (distinto de ``a``)

    Returns:
        Información mutua ≥ 0 (recortada en 0 frente a error de redondeo)
    """
    if a == b:
        raise InvalidInputError("la información mutua necesita dos atributos distintos")
    table = measure_marginal(data, FeatureTuple((a, b)))
    return mutual_information_counts(table)


def sample_categorical(probabilities: np.ndarray, rng: RandomSource) -> np.ndarray:
    """
    Muestrear un valor por fila de una matriz de probabilidades (filas × categorías).

    Usa la inversa de la CDF sobre uniformes del flujo dado.
    """
    probabilities = np.asarray(probabilities, dtype=np.float64)
    n_rows, n_categories = probabilities.shape
    cdf = np.cumsum(probabilities, axis=1)
    cdf /= cdf[:, -1:]
    draws = rng.uniform(n_rows)
    values = (draws[:, None] > cdf).sum(axis=1)
    return np.minimum(values, n_categories - 1).astype(np.int64)
