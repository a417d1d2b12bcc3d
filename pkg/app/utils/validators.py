"""
Validadores de datos para el toolkit.
"""
from typing import Sequence

import numpy as np


def validate_normalized(weights: Sequence[float], tolerance: float = 1e-9) -> bool:
    """
    Validar un vector de pesos normalizado.

    Args:
        weights: Pesos no negativos
        tolerance: Tolerancia sobre la suma

    Returns:
        True si los pesos son no negativos y suman 1 dentro de la tolerancia
    """
    array = np.asarray(weights, dtype=float)
    if array.size == 0 or np.any(array < 0.0):
        return False
    return abs(float(array.sum()) - 1.0) <= tolerance


def validate_index_matrix(values: np.ndarray, cardinalities: Sequence[int]) -> bool:
    """
    Validar una matriz de índices de categoría.

    Args:
        values: Matriz (filas × atributos) de enteros
        cardinalities: Cardinalidad de cada atributo

    Returns:
        True si cada índice cae en [0, cardinalidad)
    """
    if values.ndim != 2 or values.shape[1] != len(cardinalities):
        return False
    if values.size == 0:
        return True
    limits = np.asarray(cardinalities, dtype=np.int64)
    return bool(np.all(values >= 0) and np.all(values < limits[None, :]))
