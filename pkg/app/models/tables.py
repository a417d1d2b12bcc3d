"""
Tuplas de atributos y tablas marginales/condicionales densas.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from app.core.exceptions import InvalidInputError
from app.models.schemas import Schema


@dataclass(frozen=True)
class FeatureTuple:
    """
    Tupla de índices de atributo.

    En forma marginal es una lista ordenada de índices distintos. En forma
    condicional el primer índice es el hijo y el resto los padres, siempre
    ordenados: ``(hijo, *sorted(padres))``.
    """

    indices: Tuple[int, ...]
    conditional: bool = False

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if not indices:
            raise InvalidInputError("una tupla de atributos necesita al menos un índice")
        if len(set(indices)) != len(indices):
            raise InvalidInputError(f"índices repetidos en la tupla {indices}")
        if min(indices) < 0:
            raise InvalidInputError(f"índice negativo en la tupla {indices}")
        if self.conditional:
            indices = (indices[0],) + tuple(sorted(indices[1:]))
        object.__setattr__(self, "indices", indices)

    @classmethod
    def marginal(cls, *indices: int) -> "FeatureTuple":
        return cls(tuple(indices))

    @classmethod
    def pair(cls, a: int, b: int) -> "FeatureTuple":
        """Par en forma canónica (menor, mayor)."""
        return cls((min(a, b), max(a, b)))

    @classmethod
    def conditional_of(cls, child: int, parents: Iterable[int] = ()) -> "FeatureTuple":
        return cls((child, *parents), conditional=True)

    @property
    def child(self) -> int:
        if not self.conditional:
            raise InvalidInputError("la tupla no está en forma condicional")
        return self.indices[0]

    @property
    def parents(self) -> Tuple[int, ...]:
        if not self.conditional:
            raise InvalidInputError("la tupla no está en forma condicional")
        return self.indices[1:]

    def __len__(self) -> int:
        return len(self.indices)

    def validate(self, schema: Schema) -> None:
        if max(self.indices) >= schema.n_features:
            raise InvalidInputError(
                f"la tupla {self.indices} excede los {schema.n_features} atributos del esquema"
            )

    def domain_shape(self, schema: Schema) -> Tuple[int, ...]:
        cardinalities = schema.cardinalities
        return tuple(cardinalities[i] for i in self.indices)

    def key(self) -> str:
        """Clave canónica: ``"a,b"`` o ``"hijo|p1,p2"``."""
        if self.conditional:
            return f"{self.indices[0]}|" + ",".join(str(i) for i in self.indices[1:])
        return ",".join(str(i) for i in self.indices)

    @classmethod
    def from_key(cls, key: str) -> "FeatureTuple":
        try:
            if "|" in key:
                child, parents = key.split("|", 1)
                parent_indices = [int(p) for p in parents.split(",") if p != ""]
                return cls.conditional_of(int(child), parent_indices)
            return cls(tuple(int(i) for i in key.split(",")))
        except ValueError as e:
            raise InvalidInputError(f"clave de tupla inválida: {key!r}") from e

    def sort_key(self) -> Tuple[int, ...]:
        return self.indices

    def __str__(self) -> str:
        return self.key()


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """
    Tabla densa sobre el producto cartesiano de los dominios de una tupla.

    Los ejes siguen el orden de ``features.indices``; en forma condicional el
    eje 0 es el hijo.
    """

    features: FeatureTuple
    cells: np.ndarray

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.float64)
        if cells.ndim != len(self.features):
            raise InvalidInputError(
                f"la tabla tiene {cells.ndim} ejes pero la tupla {self.features} tiene {len(self.features)}"
            )
        if np.any(cells < 0) or not np.all(np.isfinite(cells)):
            raise InvalidInputError("las celdas deben ser finitas y no negativas")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def total(self) -> float:
        return float(self.cells.sum())

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.cells.shape)

    def validate(self, schema: Schema) -> None:
        self.features.validate(schema)
        if self.shape != self.features.domain_shape(schema):
            raise InvalidInputError(
                f"la forma {self.shape} no coincide con el dominio {self.features.domain_shape(schema)}"
            )

    def normalized(self) -> "MarginalTable":
        """Probabilidades conjuntas; una tabla vacía pasa a ser uniforme."""
        total = self.total
        if total <= 0.0:
            return MarginalTable(self.features, np.full(self.shape, 1.0 / self.cells.size))
        return MarginalTable(self.features, self.cells / total)

    def normalized_per_stratum(self) -> "MarginalTable":
        """Condicional P(hijo | padres); los estratos vacíos pasan a ser uniformes."""
        strata = self.cells.sum(axis=0, keepdims=True)
        child_cardinality = self.shape[0]
        with np.errstate(invalid="ignore", divide="ignore"):
            probabilities = np.where(strata > 0.0, self.cells / strata, 1.0 / child_cardinality)
        return MarginalTable(self.features, probabilities)

    def conditional_matrix(self) -> np.ndarray:
        """Matriz (estratos de padres × valores del hijo) de la tabla por estrato."""
        normalized = self.normalized_per_stratum().cells
        child_cardinality = self.shape[0]
        return np.moveaxis(normalized, 0, -1).reshape(-1, child_cardinality)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "features": self.features.key(),
            "shape": list(self.shape),
            "cells": [float(value) for value in self.cells.ravel()],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MarginalTable":
        features = FeatureTuple.from_key(data["features"])
        cells = np.asarray(data["cells"], dtype=np.float64).reshape(tuple(data["shape"]))
        return cls(features, cells)
