"""
Datasets tabulares discretos e índice de hogares.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from app.core.exceptions import DatasetError
from app.models.schemas import Schema
from app.utils.helpers import hash_array
from app.utils.validators import validate_index_matrix


@dataclass(frozen=True, eq=False)
class HouseholdIndex:
    """Mapa hogar → posiciones de fila (cada fila en exactamente un hogar)."""

    groups: Dict[int, np.ndarray]

    @classmethod
    def from_ids(cls, household_ids: np.ndarray) -> "HouseholdIndex":
        ids = np.asarray(household_ids, dtype=np.int64)
        order = np.argsort(ids, kind="stable")
        unique, starts = np.unique(ids[order], return_index=True)
        bounds = list(starts[1:]) + [len(ids)]
        groups = {
            int(household): order[start:end]
            for household, start, end in zip(unique, starts, bounds)
        }
        return cls(groups=groups)

    def households(self) -> List[int]:
        return sorted(self.groups)

    def sizes(self) -> Dict[int, int]:
        return {household: len(rows) for household, rows in self.groups.items()}

    def __len__(self) -> int:
        return len(self.groups)


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Registros discretos bajo un esquema.

    ``values`` es una matriz (filas × atributos) de índices 0-based;
    ``household_ids`` es opcional pero, si existe, cubre todas las filas.
    Los arreglos se congelan (no escribibles) al construir.
    """

    schema: Schema
    values: np.ndarray
    household_ids: Optional[np.ndarray] = None
    _fingerprint: Optional[str] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        if values.ndim == 1 and values.size == 0:
            values = values.reshape(0, self.schema.n_features)
        if values.ndim != 2 or values.shape[1] != self.schema.n_features:
            raise DatasetError(
                f"se esperaban {self.schema.n_features} columnas, llegaron "
                f"{values.shape[1] if values.ndim == 2 else values.ndim}"
            )
        if not validate_index_matrix(values, self.schema.cardinalities):
            row, column = _first_out_of_range(values, self.schema.cardinalities)
            raise DatasetError(
                "índice de categoría fuera de rango", row=row, column=self.schema.names[column]
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        if self.household_ids is not None:
            ids = np.asarray(self.household_ids, dtype=np.int64).copy()
            if ids.shape != (values.shape[0],):
                raise DatasetError("household_id debe existir para cada fila")
            if ids.size and ids.min() < 0:
                raise DatasetError("household_id debe ser no negativo", row=int(np.argmin(ids)))
            ids.setflags(write=False)
            object.__setattr__(self, "household_ids", ids)

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_features(self) -> int:
        return self.schema.n_features

    @property
    def has_households(self) -> bool:
        return self.household_ids is not None

    def __len__(self) -> int:
        return self.n_rows

    def column(self, index: int) -> np.ndarray:
        return self.values[:, index]

    def take(self, rows: Iterable[int]) -> "Dataset":
        """Subconjunto de filas en el orden dado."""
        positions = np.asarray(list(rows) if not isinstance(rows, np.ndarray) else rows, dtype=np.int64)
        ids = None if self.household_ids is None else self.household_ids[positions]
        return Dataset(self.schema, self.values[positions], ids)

    def household_index(self) -> HouseholdIndex:
        if self.household_ids is None:
            raise DatasetError("el dataset no tiene household_id")
        return HouseholdIndex.from_ids(self.household_ids)

    def household_rows(self, households: Iterable[int]) -> np.ndarray:
        """Posiciones de las filas que pertenecen a los hogares dados (orden de archivo)."""
        if self.household_ids is None:
            raise DatasetError("el dataset no tiene household_id")
        wanted = np.fromiter((int(h) for h in households), dtype=np.int64)
        return np.flatnonzero(np.isin(self.household_ids, wanted))

    def exclude_households(self, households: Iterable[int]) -> "Dataset":
        """Copia sin los registros de los hogares dados."""
        if self.household_ids is None:
            raise DatasetError("el dataset no tiene household_id")
        wanted = np.fromiter((int(h) for h in households), dtype=np.int64)
        return self.take(np.flatnonzero(~np.isin(self.household_ids, wanted)))

    @classmethod
    def concat(cls, parts: List["Dataset"]) -> "Dataset":
        if not parts:
            raise DatasetError("no hay datasets para concatenar")
        schema = parts[0].schema
        if any(part.schema != schema for part in parts):
            raise DatasetError("los esquemas no coinciden")
        values = np.concatenate([part.values for part in parts], axis=0)
        ids = None
        if all(part.household_ids is not None for part in parts):
            ids = np.concatenate([part.household_ids for part in parts])
        return cls(schema, values, ids)

    def fingerprint(self) -> str:
        """Hash del contenido (valores y hogares), para verificar reutilización."""
        if self._fingerprint is None:
            parts = hash_array(self.values)
            if self.household_ids is not None:
                parts += hash_array(self.household_ids)
            object.__setattr__(self, "_fingerprint", parts)
        return self._fingerprint

    def to_frame(self, labels: bool = True) -> pd.DataFrame:
        """DataFrame con etiquetas de categoría (o índices) y household_id si existe."""
        data = {}
        for i, feature in enumerate(self.schema.features):
            column = self.values[:, i]
            data[feature.name] = np.asarray(feature.categories, dtype=object)[column] if labels else column
        frame = pd.DataFrame(data, columns=self.schema.names)
        if self.household_ids is not None:
            frame.insert(0, "household_id", self.household_ids)
        return frame


def _first_out_of_range(values: np.ndarray, cardinalities) -> tuple:
    limits = np.asarray(cardinalities, dtype=np.int64)
    bad = (values < 0) | (values >= limits[None, :])
    row, column = np.argwhere(bad)[0]
    return int(row), int(column)
