"""
Utilidades compartidas por los comandos de la CLI.
"""
import argparse
import logging
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, Optional

from app.core.config import ToolkitConfig, load_config
from app.core.exceptions import ConfigurationError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.schemas import GeneratorKind, Schema
from app.services.data.loader import load_dataset, load_schema
from app.services.storage.file_storage import ArtifactStore, build_manifest

logger = logging.getLogger(__name__)


class ToolkitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser que reporta errores de uso como errores de configuración."""

    def error(self, message: str):
        raise ConfigurationError(f"{self.prog}: {message}")


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags presentes en todos los subcomandos (por defecto None para no pisar el archivo)."""
    parser.add_argument("--config", help="Documento JSON de configuración")
    parser.add_argument("--seed", type=int, help="Semilla única de la que derivan todos los flujos")
    parser.add_argument("--workers", type=int, help="Procesos (por defecto MIA_WORKERS)")
    parser.add_argument("--out", help="Directorio de salida (por defecto MIA_OUTPUT_DIR)")
    parser.add_argument("--log-level", help="Nivel de logging (DEBUG, INFO, ...)")


def generator_kind(value: str) -> GeneratorKind:
    try:
        return GeneratorKind(value.lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"generador desconocido: {value}") from None


@dataclass
class CommandContext:
    """Configuración resuelta y almacén de artefactos de una invocación."""

    command: str
    arguments: Dict[str, Any]
    config: ToolkitConfig
    store: ArtifactStore
    started_at: datetime

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def workers(self) -> int:
        return self.config.resolved_workers()

    def source(self, *labels: Any) -> RandomSource:
        """Flujo con nombre derivado de la semilla única."""
        return RandomSource(self.seed).derive(self.command, *labels)

    def commit(self, inputs: Dict[str, Optional[str]]) -> None:
        outputs = self.store.pending
        manifest = build_manifest(
            command=self.command,
            arguments=self.arguments,
            config_hash=self.config.config_hash(),
            seeds={"seed": self.seed},
            inputs={name: path for name, path in inputs.items() if path},
            outputs=outputs,
            started_at=self.started_at,
        )
        path = self.store.commit(manifest)
        logger.info(f"Manifiesto {manifest.manifest_id} escrito en {path}")


def build_context(args: argparse.Namespace, overrides: Optional[Dict[str, Any]] = None) -> CommandContext:
    """Resolver la configuración con precedencia flag > archivo > entorno > defecto."""
    merged = {"seed": args.seed, "workers": args.workers, **(overrides or {})}
    config = load_config(args.config, merged)
    arguments = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("handler", "log_level", "workers", "out") and value is not None
    }
    return CommandContext(
        command=args.command,
        arguments=_jsonable(arguments),
        config=config,
        store=ArtifactStore(args.out),
        started_at=datetime.now(),
    )


def load_inputs(schema_path: str, *data_paths: str) -> tuple:
    """Cargar el esquema y luego cada dataset bajo ese esquema."""
    schema: Schema = load_schema(schema_path)
    datasets = tuple(load_dataset(path, schema) for path in data_paths)
    return (schema, *datasets)


def require_households(data: Dataset, name: str) -> None:
    if not data.has_households:
        raise ConfigurationError(f"el dataset {name} necesita la columna household_id")


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, GeneratorKind):
        return value.value
    return value
