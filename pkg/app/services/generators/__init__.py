"""
Generadores de datos sintéticos con privacidad diferencial basados en marginales.
"""
from typing import Any, Dict, List, Optional, Union

from app.core.exceptions import InvalidInputError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.schemas import GeneratorKind, GeneratorParams, PrivacyBudget, Schema
from app.models.tables import FeatureTuple

from .mst import MstModel, fit_mst, focal_points_mst, sample_mst
from .privbayes import BayesNet, choose_k, fit_privbayes, focal_points_privbayes, sample_privbayes

GeneratorModel = Union[MstModel, BayesNet]


def fit_generator(
    kind: GeneratorKind,
    train: Dataset,
    budget: PrivacyBudget,
    rng: RandomSource,
    params: Optional[GeneratorParams] = None,
) -> GeneratorModel:
    """Ajustar el generador indicado por ``kind``."""
    if kind == GeneratorKind.MST:
        return fit_mst(train, budget, rng, params)
    if kind == GeneratorKind.PRIVBAYES:
        return fit_privbayes(train, budget, rng, params)
    raise InvalidInputError(f"generador desconocido: {kind}")


def sample_generator(model: GeneratorModel, n_rows: int, rng: RandomSource) -> Dataset:
    if isinstance(model, MstModel):
        return sample_mst(model, n_rows, rng)
    return sample_privbayes(model, n_rows, rng)


def focal_points(model: GeneratorModel) -> List[FeatureTuple]:
    """Tuplas que el modelo midió sobre sus datos de entrenamiento."""
    if isinstance(model, MstModel):
        return focal_points_mst(model)
    return focal_points_privbayes(model)


def model_from_dict(data: Dict[str, Any], schema: Schema) -> GeneratorModel:
    kind = data.get("kind")
    if kind == GeneratorKind.MST.value:
        return MstModel.from_dict(data, schema)
    if kind == GeneratorKind.PRIVBAYES.value:
        return BayesNet.from_dict(data, schema)
    raise InvalidInputError(f"documento de modelo con tipo desconocido: {kind!r}")


__all__ = [
    "BayesNet",
    "GeneratorModel",
    "MstModel",
    "choose_k",
    "fit_generator",
    "fit_mst",
    "fit_privbayes",
    "focal_points",
    "focal_points_mst",
    "focal_points_privbayes",
    "model_from_dict",
    "sample_generator",
    "sample_mst",
    "sample_privbayes",
]
