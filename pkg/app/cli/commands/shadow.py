"""
Comando ``shadow``: estimar pesos de puntos focales con modelado sombra.
"""
import argparse
import logging

import pandas as pd
from pydantic import ValidationError

from app.cli.common import add_common_arguments, build_context, generator_kind, load_inputs
from app.core.exceptions import ConfigurationError
from app.models.schemas import ShadowConfig
from app.services.attacks.shadow import focal_point_frequency_rows, parent_size_frequency_rows, run_shadow
from app.utils.helpers import stable_int

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("shadow", help="Corridas sombra sobre datos auxiliares")
    add_common_arguments(parser)
    parser.add_argument("--aux", required=True, help="CSV de datos auxiliares")
    parser.add_argument("--schema", required=True, help="Documento de esquema")
    parser.add_argument("--gen", type=generator_kind, required=True, help="mst o privbayes")
    parser.add_argument("--eps", type=float, required=True, help="Presupuesto ε total")
    parser.add_argument("--runs", type=int, help="Corridas sombra")
    parser.add_argument("--sample-size", type=int, help="Registros por corrida (por defecto la mitad de aux)")
    parser.add_argument("--fixed-sample", action="store_const", const=True, help="Misma muestra en todas las corridas")
    parser.add_argument("--plot-data", action="store_true", help="Escribir CSV de frecuencias")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    context = build_context(args, {"shadow": {"runs": args.runs, "fixed_sample": args.fixed_sample}})
    _, aux = load_inputs(args.schema, args.aux)
    try:
        config = ShadowConfig(
            generator_kind=args.gen,
            budget=context.config.budget(args.eps),
            runs=context.config.shadow.runs,
            train_sample_size=args.sample_size if args.sample_size is not None else max(1, aux.n_rows // 2),
            base_seed=stable_int(context.seed, "shadow"),
            fixed_sample=context.config.shadow.fixed_sample,
            params=context.config.generator_params(),
        )
    except ValidationError as e:
        raise ConfigurationError(f"Parámetros de sombra inválidos: {e}") from e
    weights = run_shadow(aux, config, workers=context.workers)

    context.store.add_json("weights.json", weights.to_dict())
    if args.plot_data:
        context.store.add_frame("focal_points.csv", pd.DataFrame(focal_point_frequency_rows([weights])))
        parent_rows = parent_size_frequency_rows([weights])
        if parent_rows:
            context.store.add_frame("parent_sizes.csv", pd.DataFrame(parent_rows))
    context.commit({"aux": args.aux, "schema": args.schema, "config": args.config})
    return 0
