"""
Protocolo de experimentos repetidos: candidatos, miembros, ataque y métricas.
"""
import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from app.core.exceptions import InsufficientDataError, ToolkitError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.schemas import (
    ExperimentConfig,
    GeneratorKind,
    GeneratorParams,
    GroundTruth,
    PrivacyBudget,
    ShadowConfig,
)
from app.services.attacks.domias import CandidateSet, run_attack
from app.services.attacks.shadow import FocalPointWeights, mean_parent_size, run_shadow, top_focal_points
from app.services.evaluation.metrics import auc, membership_advantage
from app.services.generators import fit_generator, sample_generator
from app.utils.helpers import stable_hash, stable_int
from app.worker.pool import run_parallel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrialSplit:
    """Candidatos C, miembros M ⊆ C y D_train = relleno ∪ registros de M."""

    candidates: Dataset
    train: Dataset
    truth: GroundTruth

    def split_hash(self) -> str:
        return stable_hash(
            [
                self.candidates.fingerprint(),
                self.train.fingerprint(),
                sorted(self.truth.member_households),
                sorted(self.truth.all_candidate_households),
            ]
        )


@dataclass(frozen=True)
class TrialResult:
    trial: int
    generator_kind: GeneratorKind
    epsilon: float
    ma: float
    auc: Optional[float]
    split_hash: str
    weights: FocalPointWeights
    baseline_ma: Optional[float] = None
    baseline_auc: Optional[float] = None


@dataclass
class CellResult:
    """Resultados de todas las pruebas para un par (generador, ε)."""

    generator_kind: GeneratorKind
    epsilon: float
    ma: List[float] = field(default_factory=list)
    auc: List[Optional[float]] = field(default_factory=list)
    baseline_ma: List[float] = field(default_factory=list)
    baseline_auc: List[Optional[float]] = field(default_factory=list)
    weights: List[FocalPointWeights] = field(default_factory=list)

    @property
    def mean_ma(self) -> float:
        return float(np.mean(self.ma))

    @property
    def mean_auc(self) -> Optional[float]:
        return _mean_defined(self.auc)

    @property
    def mean_baseline_ma(self) -> Optional[float]:
        return float(np.mean(self.baseline_ma)) if self.baseline_ma else None

    @property
    def mean_baseline_auc(self) -> Optional[float]:
        return _mean_defined(self.baseline_auc)

    def merged_weights(self) -> FocalPointWeights:
        """Frecuencias sombra combinadas de todas las pruebas."""
        total_runs = sum(w.runs for w in self.weights)
        counts: Dict[Any, float] = {}
        for w in self.weights:
            for features, frequency in w.entries.items():
                counts[features] = counts.get(features, 0.0) + frequency * w.runs
        return FocalPointWeights(
            entries={features: count / total_runs for features, count in counts.items()},
            runs=total_runs,
            generator_kind=self.generator_kind,
            epsilon=self.epsilon,
        )


@dataclass
class MAResult:
    """Tabla de MA/AUC por (generador, ε) con los valores de cada prueba."""

    config: ExperimentConfig
    cells: List[CellResult]

    def cell(self, kind: GeneratorKind, epsilon: float) -> CellResult:
        for cell in self.cells:
            if cell.generator_kind == kind and cell.epsilon == epsilon:
                return cell
        raise KeyError((kind, epsilon))

    def ma_rows(self) -> List[Dict[str, Any]]:
        """Filas para la curva MA vs ε."""
        rows = []
        for cell in self.cells:
            rows.append(
                {
                    "generator": cell.generator_kind.value,
                    "epsilon": cell.epsilon,
                    "mean_ma": cell.mean_ma,
                    "mean_auc": cell.mean_auc,
                    "baseline_mean_ma": cell.mean_baseline_ma,
                    "baseline_mean_auc": cell.mean_baseline_auc,
                    "mean_parent_size": (
                        mean_parent_size(cell.merged_weights())
                        if cell.generator_kind == GeneratorKind.PRIVBAYES
                        else None
                    ),
                }
            )
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.model_dump(mode="json"),
            "table": self.ma_rows(),
            "trials": [
                {
                    "generator": cell.generator_kind.value,
                    "epsilon": cell.epsilon,
                    "ma": cell.ma,
                    "auc": cell.auc,
                    "baseline_ma": cell.baseline_ma,
                    "baseline_auc": cell.baseline_auc,
                }
                for cell in self.cells
            ],
        }


def _mean_defined(values: List[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None


def trial_source(config: ExperimentConfig, trial: int) -> RandomSource:
    return RandomSource(config.seed).derive("trial", trial)


def sample_trial_split(aux: Dataset, config: ExperimentConfig, rng: RandomSource) -> TrialSplit:
    """
    Sortear C, el relleno D_C̄ ⊆ aux∖C (por registro) y M ⊆ C.

    Raises:
        InsufficientDataError: Si no hay hogares elegibles o registros de relleno suficientes
        ToolkitError: Si el relleno comparte registros con C
    """
    sizes = aux.household_index().sizes()
    eligible = np.array(sorted(h for h, size in sizes.items() if size >= config.min_household_size), dtype=np.int64)
    if len(eligible) < config.n_candidates:
        raise InsufficientDataError(
            f"solo hay {len(eligible)} hogares con ≥ {config.min_household_size} registros "
            f"(se necesitan {config.n_candidates})"
        )
    candidates = np.sort(rng.derive("candidates").generator.choice(eligible, config.n_candidates, replace=False))
    members = np.sort(rng.derive("members").generator.choice(candidates, config.n_members, replace=False))

    rest = aux.exclude_households(candidates)
    if rest.n_rows < config.train_fill_size:
        raise InsufficientDataError(
            f"aux sin candidatos tiene {rest.n_rows} registros (se necesitan {config.train_fill_size})"
        )
    fill_rows = np.sort(rng.derive("fill").generator.choice(rest.n_rows, config.train_fill_size, replace=False))
    fill = rest.take(fill_rows)
    if np.intersect1d(fill.household_ids, candidates).size:
        raise ToolkitError("el relleno de entrenamiento contiene registros de hogares candidatos")

    train = Dataset.concat([fill, aux.take(aux.household_rows(members))])
    truth = GroundTruth(
        member_households=frozenset(int(h) for h in members),
        all_candidate_households=frozenset(int(h) for h in candidates),
    )
    return TrialSplit(candidates=aux.take(aux.household_rows(candidates)), train=train, truth=truth)


def _safe_auc(predictions: Dict[int, float], truth: GroundTruth) -> Optional[float]:
    if truth.member_households == truth.all_candidate_households:
        return None
    return auc(predictions, truth)


def run_trial(
    aux: Dataset,
    config: ExperimentConfig,
    epsilon: float,
    trial: int,
    kind: Optional[GeneratorKind] = None,
    split: Optional[TrialSplit] = None,
    params: Optional[GeneratorParams] = None,
    shadow_workers: int = 1,
) -> TrialResult:
    """
    Ejecutar una prueba completa para un generador y un ε.

    Ajusta el generador sobre D_train, publica ``synth_rows`` registros, corre
    el modelado sombra sobre aux∖C (o aux completo), puntúa los candidatos y
    evalúa MA y AUC contra M. Misma prueba y semilla dan el mismo resultado.

    Args:
        aux: Datos auxiliares con hogares
        config: Protocolo
        epsilon: Presupuesto de privacidad total
        trial: Número de prueba (define los flujos aleatorios)
        kind: Generador (por defecto el primero de la configuración)
        split: Partición ya sorteada para esta prueba (se reutiliza entre generadores)
        params: Constantes de los generadores
        shadow_workers: Procesos para las corridas sombra

    Returns:
        Resultado de la prueba
    """
    kind = kind or config.generator_kinds[0]
    params = params or GeneratorParams()
    rng = trial_source(config, trial)
    split = split or sample_trial_split(aux, config, rng.derive("split"))
    budget = PrivacyBudget(epsilon_total=epsilon, selection_fraction=config.selection_fraction)

    model = fit_generator(kind, split.train, budget, rng.derive("fit", kind.value, epsilon), params)
    synth = sample_generator(model, config.synth_rows, rng.derive("synth", kind.value, epsilon))

    shadow_aux = aux if config.shadow_on_full_aux else aux.exclude_households(split.truth.all_candidate_households)
    weights = run_shadow(
        shadow_aux,
        ShadowConfig(
            generator_kind=kind,
            budget=budget,
            runs=config.shadow_runs,
            train_sample_size=min(split.train.n_rows, shadow_aux.n_rows),
            base_seed=stable_int(config.seed, "trial", trial, "shadow", kind.value, epsilon),
            fixed_sample=config.fixed_shadow_sample,
            params=params,
        ),
        workers=shadow_workers,
    )
    focal, focal_weights = top_focal_points(weights, config.min_weight)

    candidates = CandidateSet(split.candidates, min_household_size=config.min_household_size)
    attack_args = dict(
        synth=synth,
        aux=aux,
        candidates=candidates,
        smoothing=config.smoothing,
        activation=config.activation,
        aggregation=config.aggregation,
    )
    result = run_attack(kind, focal=focal, weights=focal_weights, **attack_args)
    predictions = result.prob_per_household
    if config.constant_predictions:
        predictions = {household: 0.5 for household in predictions}

    baseline_ma = baseline_auc = None
    if config.include_baseline:
        baseline = run_attack(None, **attack_args).prob_per_household
        baseline_ma = membership_advantage(baseline, split.truth)
        baseline_auc = _safe_auc(baseline, split.truth)

    outcome = TrialResult(
        trial=trial,
        generator_kind=kind,
        epsilon=epsilon,
        ma=membership_advantage(predictions, split.truth),
        auc=_safe_auc(predictions, split.truth),
        split_hash=split.split_hash(),
        weights=weights,
        baseline_ma=baseline_ma,
        baseline_auc=baseline_auc,
    )
    logger.info(f"Prueba {trial} {kind.value} ε={epsilon:g}: MA={outcome.ma:.4f}")
    return outcome


def _run_trial_grid(
    aux: Dataset,
    config: ExperimentConfig,
    params: Optional[GeneratorParams],
    shadow_workers: int,
    trial: int,
) -> List[TrialResult]:
    split = sample_trial_split(aux, config, trial_source(config, trial).derive("split"))
    expected = split.split_hash()
    results = []
    for kind in config.generator_kinds:
        for epsilon in config.epsilons:
            outcome = run_trial(
                aux, config, epsilon, trial, kind=kind, split=split, params=params, shadow_workers=shadow_workers
            )
            if outcome.split_hash != expected:
                raise ToolkitError(f"la prueba {trial} no reutilizó la misma partición")
            results.append(outcome)
    return results


def run_experiment(
    aux: Dataset,
    config: ExperimentConfig,
    params: Optional[GeneratorParams] = None,
    workers: int = 1,
) -> MAResult:
    """
    Repetir las pruebas sobre todos los generadores y ε.

    Cada prueba sortea una sola partición (C, M, D_train) y la reutiliza en
    todos los generadores y ε. Las pruebas son independientes y se pueden
    ejecutar en paralelo sin cambiar el resultado. Si hay menos pruebas que
    procesos, las pruebas corren en serie y los procesos van a las corridas sombra.
    """
    trial_workers = min(workers, config.trials)
    shadow_workers = workers if trial_workers <= 1 else 1
    grids = run_parallel(
        partial(_run_trial_grid, aux, config, params, shadow_workers),
        range(config.trials),
        trial_workers,
        description="pruebas",
    )

    cells: Dict[Tuple[GeneratorKind, float], CellResult] = {
        (kind, epsilon): CellResult(kind, epsilon) for kind in config.generator_kinds for epsilon in config.epsilons
    }
    for grid in grids:
        for outcome in grid:
            cell = cells[(outcome.generator_kind, outcome.epsilon)]
            cell.ma.append(outcome.ma)
            cell.auc.append(outcome.auc)
            cell.weights.append(outcome.weights)
            if outcome.baseline_ma is not None:
                cell.baseline_ma.append(outcome.baseline_ma)
                cell.baseline_auc.append(outcome.baseline_auc)

    result = MAResult(config=config, cells=list(cells.values()))
    for cell in result.cells:
        logger.info(
            f"{cell.generator_kind.value} ε={cell.epsilon:g}: MA media {cell.mean_ma:.4f} ({config.trials} pruebas)"
        )
    return result
