"""
Lectura y escritura de datasets CSV y documentos de esquema.
"""
import json
import logging
import re
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from app.core.exceptions import ConfigurationError, DatasetError
from app.models.dataset import Dataset
from app.models.schemas import Schema
from app.utils.formatters import format_json

logger = logging.getLogger(__name__)

HOUSEHOLD_COLUMN = "household_id"


def load_schema(path: str) -> Schema:
    """
    Cargar un esquema desde un documento JSON.

    Args:
        path: Ruta al documento ``{"features": [{"name", "kind", "categories"}]}``

    Returns:
        Esquema validado

    Raises:
        ConfigurationError: Si el archivo no existe o no es un esquema válido
    """
    schema_path = Path(path)
    if not schema_path.exists():
        raise ConfigurationError(f"El archivo de esquema {path} no existe")
    try:
        return Schema.model_validate(json.loads(schema_path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ConfigurationError(f"Esquema inválido en {path}: {e}") from e


def save_schema(schema: Schema, path: str) -> None:
    """Guardar un esquema como documento JSON."""
    Path(path).write_text(format_json(schema.model_dump(mode="json")), encoding="utf-8")


def load_dataset(path: str, schema: Schema, household_column: Optional[str] = HOUSEHOLD_COLUMN) -> Dataset:
    """
    Cargar un dataset CSV bajo un esquema.

    Cada celda puede ser una etiqueta de categoría o un índice entero; las
    etiquetas se resuelven primero, en el orden declarado por el esquema.

    Args:
        path: Ruta al CSV con cabecera
        schema: Esquema que fija columnas y categorías
        household_column: Columna opcional de hogares (None para ignorarla)

    Returns:
        Dataset con las filas en el orden del archivo

    Raises:
        DatasetError: Columna faltante o desconocida, fila irregular,
            etiqueta desconocida o índice fuera de rango (con fila y columna)
    """
    csv_path = Path(path)
    if not csv_path.exists():
        raise DatasetError(f"El archivo {path} no existe")

    try:
        frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False, na_filter=False)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        # La línea 1 es la cabecera
        row = int(match.group(1)) - 2 if match else None
        raise DatasetError("fila irregular: cantidad de campos distinta a la cabecera", row=row) from e
    except pd.errors.EmptyDataError as e:
        raise DatasetError(f"El archivo {path} está vacío") from e

    columns = list(frame.columns)
    for name in schema.names:
        if name not in columns:
            raise DatasetError("columna faltante", column=name)
    has_households = household_column is not None and household_column in columns
    allowed = set(schema.names) | ({household_column} if has_households else set())
    for name in columns:
        if name not in allowed:
            raise DatasetError("columna desconocida para el esquema", column=name)

    values = np.empty((len(frame), schema.n_features), dtype=np.int64)
    for i, feature in enumerate(schema.features):
        values[:, i] = _encode_column(frame[feature.name], feature.categories, feature.name)

    household_ids = None
    if has_households:
        household_ids = _parse_household_column(frame[household_column], household_column)

    dataset = Dataset(schema, values, household_ids)
    logger.info(f"Dataset cargado: {path} ({dataset.n_rows} filas, {dataset.n_features} atributos)")
    return dataset


def write_dataset(dataset: Dataset, path: str, labels: bool = True) -> None:
    """Escribir un dataset como CSV (etiquetas por defecto, sin índice)."""
    dataset.to_frame(labels=labels).to_csv(path, index=False, lineterminator="\n")


def _encode_column(column: pd.Series, categories, name: str) -> np.ndarray:
    lookup = {label: index for index, label in enumerate(categories)}
    encoded = np.empty(len(column), dtype=np.int64)
    for row, raw in enumerate(column.to_numpy()):
        # Las filas cortas llegan como NaN
        cell = raw.strip() if isinstance(raw, str) else ""
        if cell == "":
            raise DatasetError("fila irregular o celda vacía", row=row, column=name)
        if cell in lookup:
            encoded[row] = lookup[cell]
            continue
        try:
            index = int(cell)
        except ValueError:
            raise DatasetError(f"categoría desconocida {cell!r}", row=row, column=name) from None
        if not 0 <= index < len(categories):
            raise DatasetError(f"índice de categoría {index} fuera de rango", row=row, column=name)
        encoded[row] = index
    return encoded


def _parse_household_column(column: pd.Series, name: str) -> np.ndarray:
    ids = np.empty(len(column), dtype=np.int64)
    for row, raw in enumerate(column.to_numpy()):
        try:
            ids[row] = int(raw.strip())
        except (ValueError, AttributeError):
            raise DatasetError(f"household_id no entero {raw!r}", row=row, column=name) from None
        if ids[row] < 0:
            raise DatasetError("household_id negativo", row=row, column=name)
    return ids
