"""
Métricas de inferencia de pertenencia a nivel de hogar.
"""
import logging
from typing import Mapping, Tuple

import numpy as np
from sklearn.metrics import roc_auc_score

from app.core.exceptions import InvalidInputError
from app.models.schemas import GroundTruth

logger = logging.getLogger(__name__)


def _aligned(predictions: Mapping[int, float], truth: GroundTruth) -> Tuple[np.ndarray, np.ndarray]:
    households = sorted(truth.all_candidate_households)
    missing = [h for h in households if h not in predictions]
    if missing:
        raise InvalidInputError(f"faltan predicciones para {len(missing)} hogares (p. ej. {missing[0]})")
    scores = np.array([float(predictions[h]) for h in households], dtype=np.float64)
    if np.any(~np.isfinite(scores)) or np.any(scores < 0.0) or np.any(scores > 1.0):
        raise InvalidInputError("las probabilidades deben estar en [0, 1]")
    labels = np.array([h in truth.member_households for h in households], dtype=bool)
    return scores, labels


def membership_advantage(predictions: Mapping[int, float], truth: GroundTruth) -> float:
    """
    Ventaja de pertenencia ponderada por confianza.

    Cada hogar pesa 2·|0.5 − p| y se declara miembro si p > 0.5. Las tasas
    tpr y fpr se normalizan por el peso total de cada clase (0 si ese total
    es 0) y MA = (tpr − fpr + 1) / 2.

    Args:
        predictions: Probabilidad por hogar (debe cubrir todos los candidatos)
        truth: Hogares miembro y candidatos

    Returns:
        MA en [0, 1]
    """
    scores, labels = _aligned(predictions, truth)
    weights = 2.0 * np.abs(0.5 - scores)
    called = scores > 0.5

    member_total = weights[labels].sum()
    other_total = weights[~labels].sum()
    tpr = weights[labels & called].sum() / member_total if member_total > 0.0 else 0.0
    fpr = weights[~labels & called].sum() / other_total if other_total > 0.0 else 0.0
    return float((tpr - fpr + 1.0) / 2.0)


def auc(predictions: Mapping[int, float], truth: GroundTruth) -> float:
    """AUC de las probabilidades por hogar frente a la pertenencia (empates cuentan 0.5)."""
    scores, labels = _aligned(predictions, truth)
    if labels.all() or not labels.any():
        raise InvalidInputError("el AUC necesita miembros y no miembros entre los candidatos")
    return float(roc_auc_score(labels, scores))
