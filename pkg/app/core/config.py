import json
import math
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.core.exceptions import ConfigurationError, PrivacyParameterError
from app.models.schemas import (
    ActivationParams,
    AggregationMode,
    ExperimentConfig,
    GeneratorParams,
    PrivacyBudget,
)
from app.utils.helpers import stable_hash

# Cargar variables de entorno desde el archivo .env
load_dotenv()


class Settings(BaseSettings):
    """Configuración del entorno de ejecución a partir de variables de entorno."""

    model_config = SettingsConfigDict(
        env_prefix="MIA_", env_file=".env", case_sensitive=False, extra="ignore"
    )

    APP_NAME: str = "marginal-mia"
    APP_VERSION: str = "0.1.0"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = ""

    # Ejecución
    WORKERS: int = Field(1, ge=1)
    OUTPUT_DIR: str = "./runs"
    CONFIG_FILE: str = ""


class PrivacySection(BaseModel):
    selection_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    mi_sensitivity: float = Field(math.log(2.0), gt=0.0)


class MstSection(BaseModel):
    root: int = Field(0, ge=0)


class PrivBayesSection(BaseModel):
    max_parents: int = Field(4, ge=1)
    max_cells: int = Field(10_000, ge=2)
    k_threshold_factor: float = Field(5.0, gt=0.0)


class ShadowSection(BaseModel):
    runs: int = Field(50, ge=1)
    min_weight: float = Field(0.0, ge=0.0, le=1.0)
    fixed_sample: bool = False


class AttackSection(BaseModel):
    smoothing: float = Field(0.5, ge=0.0)
    activation: ActivationParams = ActivationParams()
    aggregation: AggregationMode = AggregationMode.MEAN
    min_household_size: int = Field(5, ge=1)
    relaxed: bool = False


class ToolkitConfig(BaseModel):
    """
    Documento de configuración con una sección por módulo.

    Precedencia: flag de CLI > archivo de configuración > entorno > defecto.
    """

    seed: int = 0
    workers: Optional[int] = Field(None, ge=1)
    privacy: PrivacySection = PrivacySection()
    mst: MstSection = MstSection()
    privbayes: PrivBayesSection = PrivBayesSection()
    shadow: ShadowSection = ShadowSection()
    attack: AttackSection = AttackSection()
    experiment: ExperimentConfig = ExperimentConfig()

    def generator_params(self) -> GeneratorParams:
        """Parámetros compartidos por los dos generadores."""
        return GeneratorParams(
            mi_sensitivity=self.privacy.mi_sensitivity,
            mst_root=self.mst.root,
            max_parents=self.privbayes.max_parents,
            max_cells=self.privbayes.max_cells,
            k_threshold_factor=self.privbayes.k_threshold_factor,
        )

    def budget(self, epsilon: float) -> PrivacyBudget:
        try:
            return PrivacyBudget(
                epsilon_total=epsilon,
                selection_fraction=self.privacy.selection_fraction,
            )
        except ValidationError as e:
            raise PrivacyParameterError(f"Presupuesto inválido para ε={epsilon}: {e}") from e

    def resolved_workers(self) -> int:
        return self.workers if self.workers is not None else settings.WORKERS

    def config_hash(self) -> str:
        return stable_hash(self.model_dump(mode="json"))


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ToolkitConfig:
    """
    Cargar la configuración del toolkit.

    Args:
        path: Documento JSON con secciones por módulo (opcional; por defecto
            ``settings.CONFIG_FILE``)
        overrides: Valores anidados que pisan al documento (flags de CLI)

    Returns:
        Configuración validada

    Raises:
        ConfigurationError: Si el archivo no existe o no valida
    """
    document: Dict[str, Any] = {}
    config_path = path or settings.CONFIG_FILE
    if config_path:
        file_path = Path(config_path)
        if not file_path.exists():
            raise ConfigurationError(f"El archivo de configuración {config_path} no existe")
        try:
            document = json.loads(file_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Configuración inválida en {config_path}: {e}") from e

    if overrides:
        document = _deep_merge(document, overrides)

    try:
        return ToolkitConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigurationError(f"Configuración inválida: {e}") from e


def _deep_merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if value is None:
            continue
        if isinstance(value, dict):
            current = merged.get(key)
            merged[key] = _deep_merge(current if isinstance(current, dict) else {}, value)
        else:
            merged[key] = value
    return merged


# Instancia global de configuración
settings = Settings()
