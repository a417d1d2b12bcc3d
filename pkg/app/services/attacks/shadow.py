"""
Modelado sombra: frecuencia con la que el generador elige cada punto focal.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from app.core.exceptions import EmptyFocalPointsError, InsufficientDataError, InvalidInputError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.schemas import GeneratorKind, ShadowConfig
from app.models.tables import FeatureTuple
from app.services.generators import fit_generator, focal_points
from app.worker.pool import run_parallel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FocalPointWeights:
    """
    Frecuencias de selección (veces elegido / corridas) por tupla canónica.

    Las tuplas ausentes nunca fueron elegidas.
    """

    entries: Dict[FeatureTuple, float]
    runs: int
    generator_kind: GeneratorKind
    epsilon: float
    seed: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.runs < 1:
            raise InvalidInputError("runs debe ser al menos 1")
        for features, frequency in self.entries.items():
            if not 0.0 < frequency <= 1.0:
                raise InvalidInputError(f"frecuencia fuera de (0, 1] para {features}: {frequency}")

    def sorted_entries(self) -> List[Tuple[FeatureTuple, float]]:
        """Por peso descendente y luego por orden canónico de la tupla."""
        return sorted(self.entries.items(), key=lambda item: (-item[1], item[0].sort_key()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "generator_kind": self.generator_kind.value,
            "epsilon": self.epsilon,
            "runs": self.runs,
            "seed": self.seed,
            "entries": {features.key(): frequency for features, frequency in self.entries.items()},
            **({"metadata": self.metadata} if self.metadata else {}),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FocalPointWeights":
        try:
            return cls(
                entries={FeatureTuple.from_key(key): float(value) for key, value in data["entries"].items()},
                runs=int(data["runs"]),
                generator_kind=GeneratorKind(data["generator_kind"]),
                epsilon=float(data["epsilon"]),
                seed=int(data.get("seed", 0)),
                metadata=dict(data.get("metadata", {})),
            )
        except (KeyError, ValueError, TypeError) as e:
            raise InvalidInputError(f"documento de pesos inválido: {e}") from e


def _shadow_run(aux: Dataset, config: ShadowConfig, run: int) -> List[str]:
    base = RandomSource(config.base_seed)
    sample_stream = base.derive("shadow", "sample") if config.fixed_sample else base.derive("shadow", run, "sample")
    rows = sample_stream.generator.choice(aux.n_rows, size=config.train_sample_size, replace=False)
    model = fit_generator(
        config.generator_kind,
        aux.take(np.sort(rows)),
        config.budget,
        base.derive("shadow", run, "fit"),
        config.params,
    )
    # Los datos sintéticos sombra nunca se generan
    return [features.key() for features in focal_points(model)]


def run_shadow(aux: Dataset, config: ShadowConfig, workers: int = 1) -> FocalPointWeights:
    """
    Estimar los pesos de los puntos focales con corridas sombra.

    Cada corrida toma una muestra uniforme sin reemplazo de ``aux`` (o la misma
    muestra en todas si ``fixed_sample``), ajusta el generador configurado y
    anota las tuplas que eligió. Cada corrida usa su propio flujo, por lo que
    el resultado no depende de la cantidad de procesos.

    Args:
        aux: Datos auxiliares del atacante
        config: Generador, presupuesto, corridas y tamaño de muestra
        workers: Procesos para las corridas

    Returns:
        Frecuencias de selección por tupla

    Raises:
        InsufficientDataError: Si la muestra supera el tamaño de ``aux``
    """
    if config.train_sample_size > aux.n_rows:
        raise InsufficientDataError(
            f"la muestra sombra ({config.train_sample_size}) supera los datos auxiliares ({aux.n_rows})"
        )

    selections = run_parallel(
        partial(_shadow_run, aux, config),
        range(config.runs),
        workers,
        description=f"sombra {config.generator_kind.value} ε={config.budget.epsilon_total:g}",
    )
    tally: Counter = Counter()
    for keys in selections:
        tally.update(keys)
    # Conjunto de tuplas más repetido entre corridas
    modal_count = Counter(frozenset(keys) for keys in selections).most_common(1)[0][1]

    entries = {
        FeatureTuple.from_key(key): count / config.runs
        for key, count in sorted(tally.items(), key=lambda item: FeatureTuple.from_key(item[0]).sort_key())
    }
    logger.info(
        f"Modelado sombra {config.generator_kind.value} ε={config.budget.epsilon_total:g}: "
        f"{len(entries)} puntos focales distintos en {config.runs} corridas"
    )
    return FocalPointWeights(
        entries=entries,
        runs=config.runs,
        generator_kind=config.generator_kind,
        epsilon=config.budget.epsilon_total,
        seed=config.base_seed,
        metadata={
            "train_sample_size": config.train_sample_size,
            "fixed_sample": config.fixed_sample,
            "modal_set_frequency": modal_count / config.runs,
        },
    )


def top_focal_points(weights: FocalPointWeights, min_weight: float = 0.0) -> Tuple[List[FeatureTuple], np.ndarray]:
    """
    Filtrar por frecuencia mínima y normalizar los pesos para que sumen 1.

    Raises:
        EmptyFocalPointsError: Si ninguna tupla alcanza ``min_weight``
    """
    if not 0.0 <= min_weight <= 1.0:
        raise InvalidInputError("min_weight debe estar en [0, 1]")
    selected = [(features, w) for features, w in weights.sorted_entries() if w >= min_weight]
    if not selected:
        raise EmptyFocalPointsError(f"ningún punto focal alcanza el peso mínimo {min_weight}")
    raw = np.array([w for _, w in selected], dtype=np.float64)
    return [features for features, _ in selected], raw / raw.sum()


def focal_point_frequency_rows(all_weights: Sequence[FocalPointWeights]) -> List[Dict[str, Any]]:
    """Filas (generador, ε, tupla, frecuencia) para gráficos de barras de frecuencia."""
    rows = []
    for weights in all_weights:
        for features, frequency in weights.sorted_entries():
            rows.append(
                {
                    "generator": weights.generator_kind.value,
                    "epsilon": weights.epsilon,
                    "focal_point": features.key(),
                    "frequency": frequency,
                }
            )
    return rows


def parent_size_frequency_rows(all_weights: Sequence[FocalPointWeights]) -> List[Dict[str, Any]]:
    """
    Cantidad media por corrida de condicionales con 0, 1, 2, … padres.

    Cada corrida elige cada tupla a lo sumo una vez, así que la suma de
    frecuencias de un tamaño es la cantidad media por corrida.
    """
    rows = []
    for weights in all_weights:
        by_size: Dict[int, float] = {}
        for features, frequency in weights.entries.items():
            if not features.conditional:
                continue
            size = len(features.parents)
            by_size[size] = by_size.get(size, 0.0) + frequency
        for size in sorted(by_size):
            rows.append(
                {
                    "generator": weights.generator_kind.value,
                    "epsilon": weights.epsilon,
                    "n_parents": size,
                    "mean_count_per_run": by_size[size],
                }
            )
    return rows


def mean_parent_size(weights: FocalPointWeights) -> float:
    """Tamaño medio del conjunto de padres entre las condicionales elegidas."""
    total = 0.0
    weighted = 0.0
    for features, frequency in weights.entries.items():
        if features.conditional:
            total += frequency
            weighted += frequency * len(features.parents)
    return weighted / total if total > 0.0 else 0.0
