"""
Punto de entrada de la línea de comandos.
"""
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.cli.commands import COMMANDS
from app.cli.common import ToolkitArgumentParser
from app.core.config import settings
from app.core.exceptions import ToolkitError
from app.core.logging import setup_logging

logger = logging.getLogger(__name__)


def build_parser() -> ToolkitArgumentParser:
    parser = ToolkitArgumentParser(
        prog=settings.APP_NAME,
        description="Ataques de inferencia de pertenencia contra generadores sintéticos basados en marginales",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ToolkitArgumentParser)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Ejecutar un subcomando.

    Returns:
        0 si tuvo éxito, 1 ante una validación fallida, 2 ante un error de ejecución
    """
    args = None
    try:
        args = build_parser().parse_args(argv)
        setup_logging(args.log_level)
        return args.handler(args)
    except ToolkitError as e:
        if args is None:
            setup_logging()
        logger.error(f"❌ {e}")
        return e.exit_code
    except ValidationError as e:
        # Parámetros que solo valida el modelo pydantic
        if args is None:
            setup_logging()
        logger.error(f"❌ Parámetros inválidos: {e}")
        return 1
    except OSError as e:
        logger.error(f"❌ Error de E/S: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
