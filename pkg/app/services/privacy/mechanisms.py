"""
Mecanismos de Laplace y exponencial, y reparto del presupuesto por composición secuencial.
"""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import softmax

from app.core.exceptions import PrivacyParameterError
from app.core.randomness import RandomSource
from app.models.schemas import PrivacyBudget
from app.models.tables import MarginalTable

logger = logging.getLogger(__name__)


def laplace_from_uniform(u: Union[float, np.ndarray], scale: float) -> Union[float, np.ndarray]:
    """Inversa de la CDF de Laplace(0, scale) evaluada en u ∈ (0, 1)."""
    centered = np.asarray(u, dtype=np.float64) - 0.5
    draws = -scale * np.sign(centered) * np.log1p(-2.0 * np.abs(centered))
    return float(draws) if draws.ndim == 0 else draws


def laplace_noise(
    scale: float, rng: RandomSource, size: Optional[Union[int, Tuple[int, ...]]] = None
) -> Union[float, np.ndarray]:
    """
    Extraer ruido de Laplace(0, scale) por inversa de la CDF.

    Args:
        scale: Escala b > 0
        rng: Flujo de aleatoriedad
        size: Forma de la salida (None para un escalar)

    Returns:
        Un valor o un arreglo de la forma pedida

    Raises:
        PrivacyParameterError: Si la escala no es positiva
    """
    if not scale > 0:
        raise PrivacyParameterError(f"la escala de Laplace debe ser positiva (llegó {scale})")
    return laplace_from_uniform(rng.uniform(size), scale)


def noisy_marginal(table: MarginalTable, epsilon_part: float, rng: RandomSource) -> MarginalTable:
    """
    Privatizar una tabla de conteos con Laplace(1/ε) por celda.

    La sensibilidad es 1: un registro cambia una sola celda en 1. Los
    negativos se recortan a 0 después del ruido (post-procesamiento).

    Args:
        table: Tabla de conteos crudos
        epsilon_part: ε asignado a esta medición
        rng: Flujo de aleatoriedad

    Returns:
        Tabla ruidosa con celdas no negativas
    """
    if not epsilon_part > 0:
        raise PrivacyParameterError(f"ε de medición debe ser positivo (llegó {epsilon_part})")
    noise = laplace_noise(1.0 / epsilon_part, rng, size=table.shape)
    return MarginalTable(table.features, np.maximum(table.cells + noise, 0.0))


def exponential_mechanism_probabilities(
    scores: Sequence[float], sensitivity: float, epsilon_part: float
) -> np.ndarray:
    """Distribución exacta del mecanismo exponencial: softmax(ε·s / 2Δ)."""
    values = np.asarray(scores, dtype=np.float64)
    if values.size == 0:
        raise PrivacyParameterError("el mecanismo exponencial necesita al menos un candidato")
    if not sensitivity > 0:
        raise PrivacyParameterError(f"la sensibilidad debe ser positiva (llegó {sensitivity})")
    if not epsilon_part > 0:
        raise PrivacyParameterError(f"ε de selección debe ser positivo (llegó {epsilon_part})")
    # softmax desplaza por el máximo
    return softmax(epsilon_part * values / (2.0 * sensitivity))


def exponential_mechanism(
    scores: Sequence[float], sensitivity: float, epsilon_part: float, rng: RandomSource
) -> int:
    """
    Elegir un índice con probabilidad ∝ exp(ε · score / (2 · Δ)).

    Args:
        scores: Puntajes de los candidatos (no vacío)
        sensitivity: Sensibilidad Δ del puntaje
        epsilon_part: ε asignado a esta selección
        rng: Flujo de aleatoriedad

    Returns:
        Índice elegido
    """
    probabilities = exponential_mechanism_probabilities(scores, sensitivity, epsilon_part)
    cdf = np.cumsum(probabilities)
    index = int(np.searchsorted(cdf, rng.uniform() * cdf[-1], side="left"))
    return min(index, len(probabilities) - 1)


def split_budget(budget: PrivacyBudget, n_selection_rounds: int, n_measurements: int) -> Tuple[float, float]:
    """
    Repartir ε entre rondas de selección y mediciones.

    Args:
        budget: Presupuesto total y fracciones
        n_selection_rounds: Cantidad de invocaciones del mecanismo exponencial
        n_measurements: Cantidad de tablas medidas

    Returns:
        (ε por ronda de selección, ε por medición)
    """
    if n_selection_rounds < 1 or n_measurements < 1:
        raise PrivacyParameterError("se necesitan al menos una ronda y una medición")
    per_round = budget.epsilon_total * budget.selection_fraction / n_selection_rounds
    per_measurement = budget.epsilon_total * budget.measurement_fraction / n_measurements
    return per_round, per_measurement
