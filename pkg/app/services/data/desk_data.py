"""
Dataset demográfico de escritorio con hogares.

Sustituye a los datos de desafío no distribuibles: 15 atributos discretos
(5 ordinales, 10 nominales), hogares de 1 a 10 personas y dependencias
plantadas por una red bayesiana de población fija con forma de árbol.
"""
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.exceptions import InvalidInputError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.schemas import FeatureKind, FeatureSpec, Schema
from app.services.data.marginals import sample_categorical

logger = logging.getLogger(__name__)

# Semilla de la población (las tablas de la red); la semilla de muestreo es aparte
POPULATION_SEED = 20231101
# Concentración de la distribución de fondo de cada fila
BACKGROUND_ALPHA = 2.0

HOUSEHOLD_SIZE_PROBS = np.array([0.28, 0.30, 0.16, 0.12, 0.07, 0.03, 0.02, 0.01, 0.005, 0.005])

_FEATURES: List[Tuple[str, FeatureKind, Tuple[str, ...]]] = [
    ("age_band", FeatureKind.ORDINAL, ("0-17", "18-24", "25-34", "35-44", "45-54", "55-64", "65-74", "75+")),
    ("state", FeatureKind.NOMINAL, tuple(f"S{i:02d}" for i in range(10))),
    ("n_children", FeatureKind.ORDINAL, ("0", "1", "2", "3", "4+")),
    ("marital", FeatureKind.NOMINAL, ("never", "married", "divorced", "widowed", "separated")),
    ("ethnicity", FeatureKind.NOMINAL, ("E1", "E2", "E3", "E4", "E5")),
    ("gender", FeatureKind.NOMINAL, ("F", "M")),
    ("profession", FeatureKind.NOMINAL, tuple(f"P{i}" for i in range(9))),
    ("hours_band", FeatureKind.ORDINAL, ("0", "1-19", "20-34", "35-44", "45+")),
    ("education", FeatureKind.ORDINAL, ("none", "primary", "secondary", "vocational", "bachelor", "graduate")),
    ("income_band", FeatureKind.ORDINAL, tuple(f"I{i}" for i in range(7))),
    ("relationship", FeatureKind.NOMINAL, ("head", "spouse", "child", "parent", "sibling", "other")),
    ("sector", FeatureKind.NOMINAL, ("public", "private", "self", "none")),
    ("citizenship", FeatureKind.NOMINAL, ("born", "naturalized", "foreign")),
    ("language", FeatureKind.NOMINAL, ("L1", "L2", "L3", "L4")),
    ("housing", FeatureKind.NOMINAL, ("owned", "rented", "other")),
]

# La red de población es un árbol con raíz en state: (atributo, padre, intensidad).
# Con intensidades ≤ 0.5 cada par fuera del árbol queda claramente por debajo
# de la arista más débil de su camino.
_HOUSEHOLD_LEVEL: List[Tuple[str, Optional[str], float]] = [
    ("state", None, 0.0),
    ("ethnicity", "state", 0.45),
    ("language", "ethnicity", 0.5),
    ("housing", "state", 0.35),
]

# relationship cuelga de housing y se trata aparte (el primer integrante es el jefe)
RELATIONSHIP_STRENGTH = 0.4

_PERSON_LEVEL: List[Tuple[str, str, float]] = [
    ("age_band", "relationship", 0.45),
    ("gender", "relationship", 0.3),
    ("marital", "age_band", 0.45),
    ("n_children", "marital", 0.35),
    ("education", "age_band", 0.35),
    ("profession", "education", 0.4),
    ("sector", "profession", 0.45),
    ("hours_band", "profession", 0.3),
    ("income_band", "hours_band", 0.35),
    ("citizenship", "ethnicity", 0.4),
]


def desk_schema() -> Schema:
    """Esquema de los 15 atributos del dataset de escritorio."""
    return Schema(
        features=tuple(
            FeatureSpec(name=name, kind=kind, categories=categories)
            for name, kind, categories in _FEATURES
        )
    )


def _planted_table(
    parent_cardinality: int, child_cardinality: int, strength: float, rng: np.random.Generator
) -> np.ndarray:
    """
    Tabla P(hijo | padre) = intensidad · 1[hijo = f(padre)] + (1 − intensidad) · fondo.

    f reparte los valores del padre en bloques consecutivos sobre una
    permutación de los valores del hijo; el fondo es una fila Dirichlet común.
    """
    background = rng.dirichlet(np.full(child_cardinality, BACKGROUND_ALPHA))
    targets = rng.permutation(child_cardinality)[
        np.arange(parent_cardinality) * child_cardinality // parent_cardinality
    ]
    table = np.tile((1.0 - strength) * background, (parent_cardinality, 1))
    table[np.arange(parent_cardinality), targets] += strength
    return table


def _population_tables(schema: Schema) -> Dict[str, np.ndarray]:
    """Tablas condicionales de la población, fijas para todas las semillas de muestreo."""
    rng = np.random.default_rng(POPULATION_SEED)
    cardinalities = dict(zip(schema.names, schema.cardinalities))
    tables = {}
    for name, parent, strength in _HOUSEHOLD_LEVEL + _PERSON_LEVEL:
        parent_cardinality = cardinalities[parent] if parent else 1
        tables[name] = _planted_table(parent_cardinality, cardinalities[name], strength, rng)
    # Sin la categoría head, que solo toma el primer integrante
    tables["relationship"] = _planted_table(
        cardinalities["housing"], cardinalities["relationship"] - 1, RELATIONSHIP_STRENGTH, rng
    )
    return tables


def _draw(table: np.ndarray, parent_column: Optional[np.ndarray], n: int, rng: RandomSource) -> np.ndarray:
    strata = parent_column if parent_column is not None else np.zeros(n, dtype=np.int64)
    return sample_categorical(table[strata], rng)


def generate_desk_dataset(n_records: int = 20_000, seed: int = 0) -> Dataset:
    """
    Generar el dataset de escritorio.

    Args:
        n_records: Cantidad exacta de registros
        seed: Semilla de muestreo (la población es siempre la misma)

    Returns:
        Dataset con household_id (hogares 0..H-1, tamaños 1..10)
    """
    if n_records < 1:
        raise InvalidInputError("n_records debe ser positivo")
    schema = desk_schema()
    tables = _population_tables(schema)
    rng = RandomSource(seed).derive("desk-data")

    # Tamaños de hogar hasta cubrir n_records; el último se recorta
    sizes: List[int] = []
    total = 0
    size_rng = rng.derive("sizes").generator
    while total < n_records:
        size = int(size_rng.choice(len(HOUSEHOLD_SIZE_PROBS), p=HOUSEHOLD_SIZE_PROBS)) + 1
        size = min(size, n_records - total)
        sizes.append(size)
        total += size
    n_households = len(sizes)
    household_ids = np.repeat(np.arange(n_households, dtype=np.int64), sizes)
    position = np.concatenate([np.arange(size) for size in sizes])

    columns: Dict[str, np.ndarray] = {}
    household_columns: Dict[str, np.ndarray] = {}
    for name, parent, _ in _HOUSEHOLD_LEVEL:
        parent_column = household_columns[parent] if parent else None
        household_columns[name] = _draw(tables[name], parent_column, n_households, rng.derive(name))
        columns[name] = household_columns[name][household_ids]

    # El primer integrante es el jefe de hogar
    others = _draw(tables["relationship"], columns["housing"], n_records, rng.derive("relationship"))
    columns["relationship"] = np.where(position == 0, 0, others + 1)

    for name, parent, _ in _PERSON_LEVEL:
        columns[name] = _draw(tables[name], columns[parent], n_records, rng.derive(name))

    values = np.column_stack([columns[name] for name in schema.names])
    logger.info(f"Dataset de escritorio generado: {n_records} registros, {n_households} hogares")
    return Dataset(schema, values, household_ids)
