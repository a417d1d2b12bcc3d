"""
Sintetizador estilo PrivBayes: red bayesiana ruidosa construida de forma voraz.
"""
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from app.core.exceptions import InvalidInputError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.schemas import GeneratorKind, GeneratorParams, PrivacyBudget, Schema
from app.models.tables import FeatureTuple, MarginalTable
from app.services.data.marginals import measure_marginal, mutual_information_counts, sample_categorical
from app.services.privacy.mechanisms import exponential_mechanism, noisy_marginal, split_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BayesNet:
    """
    Red bayesiana ajustada.

    ``parents`` y ``noisy_conditionals`` se indexan por atributo; los padres de
    cada atributo aparecen antes en ``order``. Cada tabla condicional está
    normalizada por estrato de padres.
    """

    schema: Schema
    order: Tuple[int, ...]
    parents: Tuple[Tuple[int, ...], ...]
    noisy_conditionals: Tuple[MarginalTable, ...]
    k: int
    budget: PrivacyBudget
    selection_log: Tuple[FeatureTuple, ...]

    def __post_init__(self):
        n = self.schema.n_features
        if sorted(self.order) != list(range(n)):
            raise InvalidInputError("el orden debe ser una permutación de los atributos")
        position = {feature: i for i, feature in enumerate(self.order)}
        for feature in range(n):
            parent_set = self.parents[feature]
            if len(parent_set) > self.k:
                raise InvalidInputError(f"el atributo {feature} tiene más de k={self.k} padres")
            if any(position[p] >= position[feature] for p in parent_set):
                raise InvalidInputError(f"los padres de {feature} deben aparecer antes en el orden")
            table = self.noisy_conditionals[feature]
            if table.features != FeatureTuple.conditional_of(feature, parent_set):
                raise InvalidInputError(f"la tabla de {feature} no corresponde a sus padres")
            table.validate(self.schema)
            if not np.allclose(table.cells.sum(axis=0), 1.0, rtol=0.0, atol=1e-9):
                raise InvalidInputError(f"la condicional de {feature} no está normalizada por estrato")

    @property
    def kind(self) -> GeneratorKind:
        return GeneratorKind.PRIVBAYES

    @property
    def epsilon(self) -> float:
        return self.budget.epsilon_total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "schema_hash": self.schema.schema_hash(),
            "budget": self.budget.model_dump(mode="json"),
            "k": self.k,
            "order": list(self.order),
            "parents": [list(parent_set) for parent_set in self.parents],
            "selection_log": [conditional.key() for conditional in self.selection_log],
            "noisy_conditionals": [table.to_dict() for table in self.noisy_conditionals],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], schema: Schema) -> "BayesNet":
        if data.get("schema_hash") != schema.schema_hash():
            raise InvalidInputError("el modelo fue ajustado con otro esquema")
        return cls(
            schema=schema,
            order=tuple(int(i) for i in data["order"]),
            parents=tuple(tuple(int(p) for p in parent_set) for parent_set in data["parents"]),
            noisy_conditionals=tuple(MarginalTable.from_dict(table) for table in data["noisy_conditionals"]),
            k=int(data["k"]),
            budget=PrivacyBudget.model_validate(data["budget"]),
            selection_log=tuple(FeatureTuple.from_key(key) for key in data["selection_log"]),
        )


def choose_k(
    budget: PrivacyBudget,
    schema: Schema,
    train_rows: int,
    params: Optional[GeneratorParams] = None,
) -> int:
    """
    Elegir la cantidad máxima de padres k según ε.

    k es el mayor valor tal que el conteo medio por estrato de padres,
    train_rows / (mayor producto de dominios de k padres), sigue por encima de
    ``k_threshold_factor · |hijo| / ε_medición``; |hijo| es la mayor
    cardinalidad fuera de esos padres. Siempre 1 ≤ k ≤ min(tope, n−1).

    Args:
        budget: Presupuesto de privacidad
        schema: Esquema de los datos
        train_rows: Cantidad de registros de entrenamiento
        params: Tope y constante del umbral

    Returns:
        k, no decreciente en ε
    """
    params = params or GeneratorParams()
    n = schema.n_features
    if n < 2:
        return 1
    _, eps_measure = split_budget(budget, n - 1, n)
    cardinalities = sorted(schema.cardinalities, reverse=True)
    limit = min(params.max_parents, n - 1)

    k = 1
    for candidate in range(1, limit + 1):
        stratum_count = train_rows / math.prod(cardinalities[:candidate])
        threshold = params.k_threshold_factor * cardinalities[candidate] / eps_measure
        if stratum_count < threshold:
            break
        k = candidate
    return k


def _candidate_conditionals(
    placed: List[int], unplaced: List[int], cardinalities: Tuple[int, ...], k: int, max_cells: int
) -> List[Tuple[int, Tuple[int, ...]]]:
    candidates = []
    ordered = sorted(placed)
    for child in unplaced:
        for size in range(0, min(k, len(ordered)) + 1):
            for parent_set in combinations(ordered, size):
                cells = cardinalities[child] * math.prod(cardinalities[p] for p in parent_set)
                if cells <= max_cells:
                    candidates.append((child, parent_set))
    return candidates


def fit_privbayes(
    train: Dataset,
    budget: PrivacyBudget,
    rng: RandomSource,
    params: Optional[GeneratorParams] = None,
) -> BayesNet:
    """
    Ajustar una red PrivBayes con privacidad diferencial.

    La raíz se elige al azar de forma uniforme. En cada posición siguiente el
    mecanismo exponencial elige un par (hijo, padres) entre los hijos sin
    ubicar y los conjuntos de padres ya ubicados (tamaño ≤ k, con tope de
    celdas), puntuados con |train| · I(hijo; padres). Cada condicional elegida
    se mide sobre train, se privatiza y se normaliza por estrato.

    Args:
        train: Datos de entrenamiento (no vacío)
        budget: Presupuesto de privacidad
        rng: Flujo de aleatoriedad
        params: Sensibilidad, tope de padres y de celdas

    Returns:
        Red ajustada
    """
    params = params or GeneratorParams()
    schema = train.schema
    n = schema.n_features
    if train.n_rows == 0:
        raise InvalidInputError("el dataset de entrenamiento está vacío")

    k = choose_k(budget, schema, train.n_rows, params)
    eps_select, eps_measure = split_budget(budget, max(1, n - 1), n)
    cardinalities = schema.cardinalities

    root = int(rng.derive("root").generator.integers(n))
    placed = [root]
    parents: Dict[int, Tuple[int, ...]] = {root: ()}
    selection_log = [FeatureTuple.conditional_of(root, ())]
    scores_cache: Dict[Tuple[int, Tuple[int, ...]], float] = {}

    for step in range(1, n):
        unplaced = [feature for feature in range(n) if feature not in parents]
        candidates = _candidate_conditionals(placed, unplaced, cardinalities, k, params.max_cells)
        scores = []
        for candidate in candidates:
            if candidate not in scores_cache:
                child, parent_set = candidate
                if parent_set:
                    table = measure_marginal(train, FeatureTuple.conditional_of(child, parent_set))
                    scores_cache[candidate] = train.n_rows * mutual_information_counts(table)
                else:
                    scores_cache[candidate] = 0.0
            scores.append(scores_cache[candidate])

        choice = exponential_mechanism(scores, params.mi_sensitivity, eps_select, rng.derive("select", step))
        child, parent_set = candidates[choice]
        placed.append(child)
        parents[child] = parent_set
        selection_log.append(FeatureTuple.conditional_of(child, parent_set))
        logger.debug(f"Paso {step}: {child} | {parent_set} entre {len(candidates)} candidatos")

    conditionals: Dict[int, MarginalTable] = {}
    for conditional in selection_log:
        counts = measure_marginal(train, conditional)
        noisy = noisy_marginal(counts, eps_measure, rng.derive("measure", conditional.key()))
        conditionals[conditional.child] = noisy.normalized_per_stratum()

    logger.debug(f"PrivBayes ajustado (ε={budget.epsilon_total}, k={k}): {[c.key() for c in selection_log]}")
    return BayesNet(
        schema=schema,
        order=tuple(placed),
        parents=tuple(parents[feature] for feature in range(n)),
        noisy_conditionals=tuple(conditionals[feature] for feature in range(n)),
        k=k,
        budget=budget,
        selection_log=tuple(selection_log),
    )


def sample_privbayes(model: BayesNet, n_rows: int, rng: RandomSource) -> Dataset:
    """Muestreo ancestral en el orden de la red (uniforme en estratos vacíos)."""
    if n_rows < 1:
        raise InvalidInputError("n_rows debe ser positivo")
    values = np.zeros((n_rows, model.schema.n_features), dtype=np.int64)
    for feature in model.order:
        table = model.noisy_conditionals[feature]
        parent_set = table.features.parents
        matrix = table.conditional_matrix()
        if parent_set:
            strata = np.ravel_multi_index(tuple(values[:, list(parent_set)].T), table.shape[1:])
        else:
            strata = np.zeros(n_rows, dtype=np.int64)
        values[:, feature] = sample_categorical(matrix[strata], rng.derive("node", feature))
    return Dataset(model.schema, values)


def focal_points_privbayes(model: BayesNet) -> List[FeatureTuple]:
    """Condicionales elegidas en forma canónica (hijo, padres ordenados)."""
    return sorted(model.selection_log, key=FeatureTuple.sort_key)
