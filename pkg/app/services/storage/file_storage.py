"""
Servicio para almacenamiento local de artefactos de ejecución.
"""
import json
import logging
import platform
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, FrozenSet, Optional, Union

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import DatasetError, InvalidInputError
from app.models.schemas import RunManifest, Schema
from app.services.attacks.shadow import FocalPointWeights
from app.services.generators import GeneratorModel, model_from_dict
from app.utils.formatters import format_json
from app.utils.helpers import stable_hash

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
SIDECAR_SUFFIX = ".meta.json"


class ArtifactStore:
    """
    Servicio para escribir los artefactos de una ejecución en un directorio.

    Los artefactos se acumulan en memoria y se escriben juntos en ``commit``,
    de modo que una validación fallida no deja salidas parciales.
    """

    def __init__(self, base_path: Optional[str] = None):
        self.base_path = Path(base_path or settings.OUTPUT_DIR)
        self._pending: Dict[str, Union[Dict[str, Any], pd.DataFrame]] = {}

    def add_json(self, filename: str, document: Dict[str, Any]) -> None:
        self._pending[filename] = document

    def add_frame(self, filename: str, frame: pd.DataFrame) -> None:
        self._pending[filename] = frame

    @property
    def pending(self) -> Dict[str, str]:
        """Rutas de los artefactos pendientes, incluidas las fichas de cada CSV."""
        names = list(self._pending)
        frames = [name for name, artifact in self._pending.items() if isinstance(artifact, pd.DataFrame)]
        names += [name + SIDECAR_SUFFIX for name in frames]
        return {name: str(self.base_path / name) for name in sorted(names)}

    def commit(self, manifest: RunManifest) -> Path:
        """
        Escribir todos los artefactos y el manifiesto.

        Los documentos JSON reciben el ``manifest_id`` del manifiesto; cada CSV
        lo lleva en una ficha ``<archivo>.meta.json`` junto a sus columnas y filas.

        Args:
            manifest: Manifiesto de la invocación

        Returns:
            Ruta del manifiesto escrito
        """
        try:
            self.base_path.mkdir(parents=True, exist_ok=True)
            for filename, artifact in sorted(self._pending.items(), key=lambda item: item[0]):
                file_path = self.base_path / filename
                if isinstance(artifact, pd.DataFrame):
                    artifact.to_csv(file_path, index=False, lineterminator="\n")
                    sidecar = {
                        "artifact": filename,
                        "columns": [str(column) for column in artifact.columns],
                        "rows": len(artifact),
                        "manifest_id": manifest.manifest_id,
                    }
                    sidecar_path = self.base_path / (filename + SIDECAR_SUFFIX)
                    sidecar_path.write_text(format_json(sidecar), encoding="utf-8")
                else:
                    document = {**artifact, "manifest_id": manifest.manifest_id}
                    file_path.write_text(format_json(document), encoding="utf-8")
                logger.info(f"Artefacto guardado: {file_path}")

            manifest_path = self.base_path / MANIFEST_FILENAME
            manifest_path.write_text(format_json(manifest.model_dump(mode="json")), encoding="utf-8")
            self._pending.clear()
            return manifest_path
        except OSError as e:
            logger.error(f"Error guardando artefactos en {self.base_path}: {e}")
            raise


def build_manifest(
    command: str,
    arguments: Dict[str, Any],
    config_hash: str,
    seeds: Dict[str, int],
    inputs: Dict[str, str],
    outputs: Dict[str, str],
    started_at: datetime,
) -> RunManifest:
    """
    Construir el manifiesto de una invocación.

    ``manifest_id`` depende solo del comando, los argumentos y la configuración,
    así que se repite entre ejecuciones idénticas.
    """
    return RunManifest(
        manifest_id=stable_hash({"command": command, "arguments": arguments, "config_hash": config_hash}),
        command=command,
        arguments=arguments,
        config_hash=config_hash,
        seeds=seeds,
        inputs=inputs,
        outputs=outputs,
        versions={
            "python": platform.python_version(),
            "numpy": np.__version__,
            "pandas": pd.__version__,
            settings.APP_NAME: settings.APP_VERSION,
        },
        started_at=started_at,
        duration_seconds=(datetime.now() - started_at).total_seconds(),
    )


def _read_json(path: str) -> Dict[str, Any]:
    file_path = Path(path)
    if not file_path.exists():
        raise InvalidInputError(f"El archivo {path} no existe")
    try:
        return json.loads(file_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"JSON inválido en {path}: {e}") from e


def load_model(path: str, schema: Schema) -> GeneratorModel:
    """Cargar un modelo ajustado (MST o PrivBayes) para el esquema dado."""
    return model_from_dict(_read_json(path), schema)


def load_weights(path: str) -> FocalPointWeights:
    return FocalPointWeights.from_dict(_read_json(path))


def load_predictions(path: str) -> Dict[int, float]:
    """Cargar un CSV ``household_id,probability``."""
    if not Path(path).exists():
        raise DatasetError(f"El archivo {path} no existe")
    frame = pd.read_csv(path)
    for column in ("household_id", "probability"):
        if column not in frame.columns:
            raise DatasetError("columna faltante", column=column)
    if frame["household_id"].duplicated().any():
        raise DatasetError("household_id repetido en las predicciones", column="household_id")
    return {int(h): float(p) for h, p in zip(frame["household_id"], frame["probability"])}


def load_members(path: str) -> FrozenSet[int]:
    """Cargar la lista de hogares miembro (CSV con columna ``household_id``)."""
    if not Path(path).exists():
        raise DatasetError(f"El archivo {path} no existe")
    frame = pd.read_csv(path)
    if "household_id" not in frame.columns:
        raise DatasetError("columna faltante", column="household_id")
    return frozenset(int(h) for h in frame["household_id"])
