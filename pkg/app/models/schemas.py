"""
Esquemas Pydantic para el toolkit.
"""
import math
from datetime import datetime
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.utils.helpers import stable_hash


class FeatureKind(str, Enum):
    ORDINAL = "ordinal"
    NOMINAL = "nominal"


class GeneratorKind(str, Enum):
    MST = "mst"
    PRIVBAYES = "privbayes"


class ActivationMode(str, Enum):
    SIGMOID = "sigmoid"
    ROOT = "root"


class AggregationMode(str, Enum):
    MEAN = "mean"
    MOST_CONFIDENT = "most_confident"


class FeatureSpec(BaseModel):
    """Esquema para un atributo discreto con sus categorías ordenadas."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    kind: FeatureKind = FeatureKind.NOMINAL
    categories: Tuple[str, ...]

    @field_validator("categories")
    @classmethod
    def _check_categories(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if len(value) < 2:
            raise ValueError("cada atributo necesita al menos 2 categorías")
        if len(set(value)) != len(value):
            raise ValueError("categorías repetidas")
        return value

    @property
    def cardinality(self) -> int:
        return len(self.categories)


class Schema(BaseModel):
    """Esquema tabular: lista ordenada y canónica de atributos."""

    model_config = ConfigDict(frozen=True)

    features: Tuple[FeatureSpec, ...] = Field(..., min_length=1)

    @field_validator("features")
    @classmethod
    def _check_unique_names(cls, value: Tuple[FeatureSpec, ...]) -> Tuple[FeatureSpec, ...]:
        names = [feature.name for feature in value]
        if len(set(names)) != len(names):
            raise ValueError("nombres de atributo repetidos")
        return value

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def names(self) -> List[str]:
        return [feature.name for feature in self.features]

    @property
    def cardinalities(self) -> Tuple[int, ...]:
        return tuple(feature.cardinality for feature in self.features)

    def index_of(self, name: str) -> int:
        for i, feature in enumerate(self.features):
            if feature.name == name:
                return i
        raise KeyError(name)

    def schema_hash(self) -> str:
        return stable_hash(self.model_dump(mode="json"))

    @classmethod
    def from_cardinalities(cls, cardinalities: List[int], prefix: str = "f") -> "Schema":
        """Esquema sintético con categorías ``"0".."k-1"`` (útil en pruebas)."""
        return cls(
            features=tuple(
                FeatureSpec(name=f"{prefix}{i}", categories=tuple(str(v) for v in range(card)))
                for i, card in enumerate(cardinalities)
            )
        )


class PrivacyBudget(BaseModel):
    """Presupuesto ε y su reparto entre selección de estructura y medición."""

    model_config = ConfigDict(frozen=True)

    epsilon_total: float = Field(..., gt=0.0)
    selection_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    measurement_fraction: float = Field(0.5, gt=0.0, lt=1.0)

    @model_validator(mode="before")
    @classmethod
    def _complete_fractions(cls, data: Any) -> Any:
        if isinstance(data, dict) and "measurement_fraction" not in data:
            data = dict(data)
            data["measurement_fraction"] = 1.0 - float(data.get("selection_fraction", 0.5))
        return data

    @model_validator(mode="after")
    def _check_sum(self) -> "PrivacyBudget":
        if abs(self.selection_fraction + self.measurement_fraction - 1.0) > 1e-12:
            raise ValueError("selection_fraction + measurement_fraction debe ser 1")
        if not math.isfinite(self.epsilon_total):
            raise ValueError("epsilon_total debe ser finito")
        return self


class GeneratorParams(BaseModel):
    """Constantes de los generadores (sensibilidad de la puntuación, topes de PrivBayes)."""

    model_config = ConfigDict(frozen=True)

    mi_sensitivity: float = Field(math.log(2.0), gt=0.0)
    mst_root: int = Field(0, ge=0)
    max_parents: int = Field(4, ge=1)
    max_cells: int = Field(10_000, ge=2)
    k_threshold_factor: float = Field(5.0, gt=0.0)


class ShadowConfig(BaseModel):
    """Esquema para una corrida de modelado sombra."""

    model_config = ConfigDict(frozen=True)

    generator_kind: GeneratorKind
    budget: PrivacyBudget
    runs: int = Field(..., ge=1)
    train_sample_size: int = Field(..., ge=1)
    base_seed: int = 0
    fixed_sample: bool = False
    params: GeneratorParams = GeneratorParams()


class ActivationParams(BaseModel):
    """Parámetros de la función de activación Λ → P."""

    model_config = ConfigDict(frozen=True)

    mode: ActivationMode = ActivationMode.SIGMOID
    c: float = Field(1.0, gt=0.0)
    m: float = 0.0
    # Si se define, m pasa a ser ese cuantil de ln Λ (0.5 = mediana)
    center_quantile: Optional[float] = Field(None, ge=0.0, le=1.0)


class GroundTruth(BaseModel):
    """Hogares miembro y hogares candidatos de una prueba."""

    model_config = ConfigDict(frozen=True)

    member_households: FrozenSet[int]
    all_candidate_households: FrozenSet[int]

    @model_validator(mode="after")
    def _check_subset(self) -> "GroundTruth":
        if not self.member_households <= self.all_candidate_households:
            raise ValueError("los miembros deben ser un subconjunto de los candidatos")
        return self


class ExperimentConfig(BaseModel):
    """
    Protocolo de experimentos repetidos.

    Los valores por defecto reproducen el protocolo del desafío: 100 hogares
    candidatos, 50 miembros, hogares de al menos 5 registros, 10.000 registros
    de relleno, 10.000 registros sintéticos y 50 pruebas.
    """

    generator_kinds: List[GeneratorKind] = [GeneratorKind.MST, GeneratorKind.PRIVBAYES]
    epsilons: List[float] = [1.0, 10.0, 100.0, 1000.0]
    trials: int = Field(50, ge=1)
    n_candidates: int = Field(100, ge=2)
    n_members: int = Field(50, ge=1)
    min_household_size: int = Field(5, ge=1)
    train_fill_size: int = Field(10_000, ge=1)
    synth_rows: int = Field(10_000, ge=1)
    shadow_runs: int = Field(50, ge=1)
    seed: int = 0
    selection_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    smoothing: float = Field(0.5, ge=0.0)
    min_weight: float = Field(0.0, ge=0.0, le=1.0)
    activation: ActivationParams = ActivationParams(center_quantile=0.5)
    aggregation: AggregationMode = AggregationMode.MEAN
    include_baseline: bool = True
    constant_predictions: bool = False
    shadow_on_full_aux: bool = False
    fixed_shadow_sample: bool = False
    desk_rows: int = Field(20_000, ge=1)

    @field_validator("epsilons")
    @classmethod
    def _check_epsilons(cls, value: List[float]) -> List[float]:
        if not value or any(not (eps > 0.0) for eps in value):
            raise ValueError("los ε deben ser positivos")
        return value

    @model_validator(mode="after")
    def _check_counts(self) -> "ExperimentConfig":
        if self.n_members > self.n_candidates:
            raise ValueError("n_members no puede superar n_candidates")
        if not self.generator_kinds:
            raise ValueError("se necesita al menos un generador")
        return self


class RunManifest(BaseModel):
    """Manifiesto que reconstruye una invocación de la CLI."""

    manifest_id: str
    command: str
    arguments: Dict[str, Any]
    config_hash: str
    seeds: Dict[str, int]
    inputs: Dict[str, str] = {}
    outputs: Dict[str, str] = {}
    versions: Dict[str, str] = {}
    started_at: datetime
    duration_seconds: float = 0.0
