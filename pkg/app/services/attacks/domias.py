"""
Ataques DOMIAS adaptados a generadores basados en marginales.

Λ(t) = Σ wᵢ · densidad_sintética_i(t) / densidad_auxiliar_i(t), donde cada
densidad es la marginal (MST) o la condicional (PrivBayes) de un punto focal
evaluada en los valores del candidato.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.special import expit

from app.core.exceptions import InvalidInputError
from app.models.dataset import Dataset, HouseholdIndex
from app.models.schemas import ActivationMode, ActivationParams, AggregationMode, GeneratorKind
from app.models.tables import FeatureTuple
from app.services.data.marginals import conditional_probabilities, measure_marginal, smoothed_probabilities
from app.utils.validators import validate_normalized

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """
    Registros objetivo agrupados por hogar.

    Cada hogar debe tener al menos ``min_household_size`` registros salvo que
    ``relaxed`` esté activo (entonces solo se advierte).
    """

    records: Dataset
    min_household_size: int = 5
    relaxed: bool = False

    def __post_init__(self):
        if not self.records.has_households:
            raise InvalidInputError("los candidatos necesitan identificadores de hogar")
        if self.records.n_rows == 0:
            raise InvalidInputError("el conjunto de candidatos está vacío")
        small = [h for h, size in self.index.sizes().items() if size < self.min_household_size]
        if small:
            message = f"{len(small)} hogares con menos de {self.min_household_size} registros (p. ej. {small[0]})"
            if not self.relaxed:
                raise InvalidInputError(message)
            logger.warning(message)

    @property
    def index(self) -> HouseholdIndex:
        return self.records.household_index()

    @property
    def households(self) -> List[int]:
        return self.index.households()


@dataclass(frozen=True, eq=False)
class AttackResult:
    """Λ y probabilidad por registro (orden de los candidatos) y probabilidad por hogar."""

    lambda_per_record: np.ndarray
    prob_per_record: np.ndarray
    prob_per_household: Dict[int, float]
    household_ids: np.ndarray

    def __post_init__(self):
        if not (len(self.lambda_per_record) == len(self.prob_per_record) == len(self.household_ids)):
            raise InvalidInputError("longitudes inconsistentes en el resultado del ataque")


def _check_inputs(
    synth: Dataset,
    aux: Dataset,
    focal: Sequence[FeatureTuple],
    weights: Sequence[float],
    candidates: CandidateSet,
) -> np.ndarray:
    if synth.schema != aux.schema or candidates.records.schema != aux.schema:
        raise InvalidInputError("los esquemas de sintético, auxiliar y candidatos no coinciden")
    if not focal:
        raise InvalidInputError("la lista de puntos focales está vacía")
    if len(focal) != len(weights):
        raise InvalidInputError("cantidad de pesos distinta a la de puntos focales")
    if not validate_normalized(weights):
        raise InvalidInputError("los pesos deben ser no negativos y sumar 1")
    for features in focal:
        features.validate(aux.schema)
    return np.asarray(weights, dtype=np.float64)


def score_mst(
    synth: Dataset,
    aux: Dataset,
    pairs: Sequence[FeatureTuple],
    weights: Sequence[float],
    candidates: CandidateSet,
    smoothing: float = 0.5,
) -> np.ndarray:
    """
    Puntuar candidatos con las marginales de 2 vías elegidas por MST.

    Args:
        synth: Datos sintéticos publicados
        aux: Datos auxiliares (población)
        pairs: Pares focales
        weights: Pesos normalizados, alineados con ``pairs``
        candidates: Registros objetivo
        smoothing: Suavizado aditivo por celda

    Returns:
        Λ por registro candidato
    """
    w = _check_inputs(synth, aux, pairs, weights, candidates)
    values = candidates.records.values
    lambdas = np.zeros(candidates.records.n_rows, dtype=np.float64)
    for pair, weight in zip(pairs, w):
        cells = tuple(values[:, list(pair.indices)].T)
        p_synth = smoothed_probabilities(measure_marginal(synth, pair), smoothing)[cells]
        aux_probs = smoothed_probabilities(measure_marginal(aux, pair), smoothing)
        p_aux = aux_probs[cells]
        # Con suavizado 0 una celda vacía en aux usa la probabilidad uniforme
        p_aux = np.where(p_aux > 0.0, p_aux, 1.0 / aux_probs.size)
        lambdas += weight * (p_synth / p_aux)
    return lambdas


def score_privbayes(
    synth: Dataset,
    aux: Dataset,
    conditionals: Sequence[FeatureTuple],
    weights: Sequence[float],
    candidates: CandidateSet,
    smoothing: float = 0.5,
) -> np.ndarray:
    """Puntuar candidatos con las condicionales elegidas por PrivBayes."""
    w = _check_inputs(synth, aux, conditionals, weights, candidates)
    values = candidates.records.values
    lambdas = np.zeros(candidates.records.n_rows, dtype=np.float64)
    for conditional, weight in zip(conditionals, w):
        if not conditional.conditional:
            raise InvalidInputError(f"{conditional} no es una tupla condicional")
        child_values = values[:, conditional.child]
        parent_values = values[:, list(conditional.parents)]
        synth_table = measure_marginal(synth, conditional)
        aux_table = measure_marginal(aux, conditional)
        c_synth = conditional_probabilities(synth_table, child_values, parent_values, smoothing)
        c_aux = conditional_probabilities(aux_table, child_values, parent_values, smoothing)
        c_aux = np.where(c_aux > 0.0, c_aux, 1.0 / aux_table.shape[0])
        lambdas += weight * (c_synth / c_aux)
    return lambdas


def baseline_domias(synth: Dataset, aux: Dataset, candidates: CandidateSet, smoothing: float = 0.5) -> np.ndarray:
    """
    DOMIAS genérico: cociente de densidades producto de marginales de 1 vía.

    Se calcula en espacio logarítmico para no perder precisión con muchos atributos.
    """
    if synth.schema != aux.schema or candidates.records.schema != aux.schema:
        raise InvalidInputError("los esquemas de sintético, auxiliar y candidatos no coinciden")
    values = candidates.records.values
    log_ratio = np.zeros(candidates.records.n_rows, dtype=np.float64)
    with np.errstate(divide="ignore"):
        for feature in range(aux.n_features):
            marginal = FeatureTuple.marginal(feature)
            p_synth = smoothed_probabilities(measure_marginal(synth, marginal), smoothing)[values[:, feature]]
            aux_probs = smoothed_probabilities(measure_marginal(aux, marginal), smoothing)
            p_aux = aux_probs[values[:, feature]]
            p_aux = np.where(p_aux > 0.0, p_aux, 1.0 / aux_probs.size)
            log_ratio += np.log(p_synth) - np.log(p_aux)
    return np.exp(log_ratio)


def activate(lambdas: Sequence[float], params: Optional[ActivationParams] = None) -> np.ndarray:
    """
    Convertir Λ en probabilidades de pertenencia.

    sigmoide: P = 1 / (1 + exp(−c (ln Λ − m))), con m opcionalmente igual a un
    cuantil de ln Λ. El cuantil es un estadístico de orden sobre toda la lista
    (Λ = 0 cuenta como −∞), así que con la mediana de una lista impar el
    elemento central da exactamente 0.5.
    raíz: P = min(Λ^(1/c) / 2, 1).
    En ambos modos Λ = 0 da P = 0.

    Raises:
        InvalidInputError: Si algún Λ es negativo o NaN
    """
    params = params or ActivationParams()
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if np.any(np.isnan(lambdas)) or np.any(lambdas < 0.0):
        raise InvalidInputError("Λ debe ser no negativo")

    if params.mode == ActivationMode.ROOT:
        return np.minimum(np.power(lambdas, 1.0 / params.c) / 2.0, 1.0)

    with np.errstate(divide="ignore"):
        log_lambdas = np.log(lambdas)
    center = params.m
    if params.center_quantile is not None and log_lambdas.size:
        center = float(np.quantile(log_lambdas, params.center_quantile, method="inverted_cdf"))
    with np.errstate(invalid="ignore"):
        probabilities = expit(params.c * (log_lambdas - center))
    return np.where(lambdas == 0.0, 0.0, probabilities)


def household_scores(
    probabilities: Sequence[float],
    households: HouseholdIndex,
    aggregation: AggregationMode = AggregationMode.MEAN,
) -> Dict[int, float]:
    """
    Agregar probabilidades por registro a probabilidades por hogar.

    ``mean`` promedia; ``most_confident`` toma la probabilidad más alejada de 0.5.
    """
    probabilities = np.asarray(probabilities, dtype=np.float64)
    scores = {}
    for household in households.households():
        rows = households.groups[household]
        if len(rows) == 0:
            raise InvalidInputError(f"el hogar {household} no tiene registros candidatos")
        values = probabilities[rows]
        if aggregation == AggregationMode.MOST_CONFIDENT:
            scores[household] = float(values[np.argmax(np.abs(values - 0.5))])
        else:
            scores[household] = float(np.mean(values))
    return scores


def run_attack(
    kind: Optional[GeneratorKind],
    synth: Dataset,
    aux: Dataset,
    candidates: CandidateSet,
    focal: Sequence[FeatureTuple] = (),
    weights: Sequence[float] = (),
    smoothing: float = 0.5,
    activation: Optional[ActivationParams] = None,
    aggregation: AggregationMode = AggregationMode.MEAN,
) -> AttackResult:
    """
    Ejecutar la cadena completa: puntuar, activar y agregar por hogar.

    Con ``kind=None`` se usa la línea base de marginales de 1 vía y se ignoran
    los puntos focales.
    """
    if kind is None:
        lambdas = baseline_domias(synth, aux, candidates, smoothing)
    elif kind == GeneratorKind.MST:
        lambdas = score_mst(synth, aux, focal, weights, candidates, smoothing)
    else:
        lambdas = score_privbayes(synth, aux, focal, weights, candidates, smoothing)
    probabilities = activate(lambdas, activation)
    per_household = household_scores(probabilities, candidates.index, aggregation)
    logger.debug(f"Ataque {kind.value if kind else 'baseline'}: {len(per_household)} hogares puntuados")
    return AttackResult(
        lambda_per_record=lambdas,
        prob_per_record=probabilities,
        prob_per_household=per_household,
        household_ids=candidates.records.household_ids,
    )
