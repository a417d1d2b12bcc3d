"""
Sintetizador estilo MST: árbol de expansión máximo ruidoso sobre información mutua.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from app.core.exceptions import InvalidInputError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.schemas import GeneratorKind, GeneratorParams, PrivacyBudget, Schema
from app.models.tables import FeatureTuple, MarginalTable
from app.services.data.marginals import measure_marginal, mutual_information_counts, sample_categorical
from app.services.privacy.mechanisms import exponential_mechanism, noisy_marginal, split_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MstModel:
    """
    Modelo MST ajustado.

    ``edges`` y ``noisy_tables`` están alineados y en el orden de selección
    (``selection_log``); las tablas están normalizadas como probabilidades.
    """

    schema: Schema
    edges: Tuple[FeatureTuple, ...]
    noisy_tables: Tuple[MarginalTable, ...]
    root_table: MarginalTable
    budget: PrivacyBudget
    selection_log: Tuple[FeatureTuple, ...]
    root: int = 0

    def __post_init__(self):
        n = self.schema.n_features
        if len(self.edges) != n - 1 or len(self.noisy_tables) != n - 1:
            raise InvalidInputError(f"un árbol sobre {n} atributos necesita {n - 1} aristas")
        graph = nx.Graph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(edge.indices for edge in self.edges)
        if n > 1 and not nx.is_tree(graph):
            raise InvalidInputError("las aristas no forman un árbol de expansión")
        for edge, table in zip(self.edges, self.noisy_tables):
            if table.features != edge:
                raise InvalidInputError(f"la tabla {table.features} no corresponde a la arista {edge}")
            table.validate(self.schema)
            if abs(table.total - 1.0) > 1e-9:
                raise InvalidInputError(f"la tabla de la arista {edge} no está normalizada")
        if self.root_table.features != FeatureTuple((self.root,)) or abs(self.root_table.total - 1.0) > 1e-9:
            raise InvalidInputError("tabla raíz inválida")

    @property
    def kind(self) -> GeneratorKind:
        return GeneratorKind.MST

    @property
    def epsilon(self) -> float:
        return self.budget.epsilon_total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "schema_hash": self.schema.schema_hash(),
            "budget": self.budget.model_dump(mode="json"),
            "root": self.root,
            "selection_log": [edge.key() for edge in self.selection_log],
            "edges": [edge.key() for edge in self.edges],
            "noisy_tables": [table.to_dict() for table in self.noisy_tables],
            "root_table": self.root_table.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], schema: Schema) -> "MstModel":
        if data.get("schema_hash") != schema.schema_hash():
            raise InvalidInputError("el modelo fue ajustado con otro esquema")
        return cls(
            schema=schema,
            edges=tuple(FeatureTuple.from_key(key) for key in data["edges"]),
            noisy_tables=tuple(MarginalTable.from_dict(table) for table in data["noisy_tables"]),
            root_table=MarginalTable.from_dict(data["root_table"]),
            budget=PrivacyBudget.model_validate(data["budget"]),
            selection_log=tuple(FeatureTuple.from_key(key) for key in data["selection_log"]),
            root=int(data["root"]),
        )


def pairwise_scores(train: Dataset) -> Dict[FeatureTuple, float]:
    """Puntaje de cada par: |train| · I(A; B)."""
    n_rows = train.n_rows
    return {
        FeatureTuple.pair(a, b): n_rows * mutual_information_counts(measure_marginal(train, FeatureTuple((a, b))))
        for a, b in combinations(range(train.n_features), 2)
    }


def fit_mst(
    train: Dataset,
    budget: PrivacyBudget,
    rng: RandomSource,
    params: Optional[GeneratorParams] = None,
) -> MstModel:
    """
    Ajustar un modelo MST con privacidad diferencial.

    Corre n−1 rondas; en cada una los candidatos son los pares que no cierran
    un ciclo y el mecanismo exponencial elige uno según |train|·MI. Cada
    arista elegida se mide sobre train y se privatiza con Laplace, igual que
    la marginal de un atributo de la raíz.

    Args:
        train: Datos de entrenamiento (no vacío, ≥ 2 atributos)
        budget: Presupuesto de privacidad
        rng: Flujo de aleatoriedad
        params: Sensibilidad del puntaje y raíz

    Returns:
        Modelo ajustado
    """
    params = params or GeneratorParams()
    n = train.n_features
    if n < 2:
        raise InvalidInputError("MST necesita al menos 2 atributos")
    if train.n_rows == 0:
        raise InvalidInputError("el dataset de entrenamiento está vacío")
    if params.mst_root >= n:
        raise InvalidInputError(f"raíz {params.mst_root} fuera del esquema")

    eps_select, eps_measure = split_budget(budget, n - 1, n)
    scores = pairwise_scores(train)
    components = UnionFind(range(n))

    selection_log: List[FeatureTuple] = []
    tables: List[MarginalTable] = []
    for round_index in range(n - 1):
        candidates = [pair for pair in scores if components[pair.indices[0]] != components[pair.indices[1]]]
        choice = exponential_mechanism(
            [scores[pair] for pair in candidates],
            params.mi_sensitivity,
            eps_select,
            rng.derive("select", round_index),
        )
        edge = candidates[choice]
        components.union(*edge.indices)
        selection_log.append(edge)
        logger.debug(f"Ronda {round_index}: arista {edge} entre {len(candidates)} candidatos")

        counts = measure_marginal(train, edge)
        tables.append(noisy_marginal(counts, eps_measure, rng.derive("measure", edge.key())).normalized())

    root_counts = measure_marginal(train, FeatureTuple((params.mst_root,)))
    root_table = noisy_marginal(root_counts, eps_measure, rng.derive("measure", "root")).normalized()

    logger.debug(f"MST ajustado (ε={budget.epsilon_total}): {[edge.key() for edge in selection_log]}")
    return MstModel(
        schema=train.schema,
        edges=tuple(selection_log),
        noisy_tables=tuple(tables),
        root_table=root_table,
        budget=budget,
        selection_log=tuple(selection_log),
        root=params.mst_root,
    )


def sample_mst(model: MstModel, n_rows: int, rng: RandomSource) -> Dataset:
    """
    Muestrear registros sintéticos recorriendo el árbol desde la raíz.

    Cada hijo se extrae de la tabla de su arista condicionada al valor ya
    muestreado del extremo padre (uniforme en estratos vacíos).
    """
    if n_rows < 1:
        raise InvalidInputError("n_rows debe ser positivo")
    n = model.schema.n_features
    values = np.zeros((n_rows, n), dtype=np.int64)

    root_probabilities = model.root_table.cells
    values[:, model.root] = sample_categorical(
        np.broadcast_to(root_probabilities, (n_rows, root_probabilities.size)), rng.derive("root")
    )

    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(edge.indices for edge in model.edges)
    table_by_edge = {edge: table for edge, table in zip(model.edges, model.noisy_tables)}

    for parent, child in nx.bfs_edges(graph, model.root):
        table = table_by_edge[FeatureTuple.pair(parent, child)]
        joint = table.cells if table.features.indices[0] == parent else table.cells.T
        strata = joint.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            conditional = np.where(strata > 0.0, joint / strata, 1.0 / joint.shape[1])
        values[:, child] = sample_categorical(conditional[values[:, parent]], rng.derive("edge", parent, child))

    return Dataset(model.schema, values)


def focal_points_mst(model: MstModel) -> List[FeatureTuple]:
    """Aristas elegidas, en forma canónica y orden canónico."""
    return sorted(model.edges, key=FeatureTuple.sort_key)
