"""
Comando ``experiment``: protocolo completo de pruebas repetidas.
"""
import argparse
import logging

import pandas as pd

from app.cli.common import add_common_arguments, build_context, generator_kind, load_inputs, require_households
from app.core.exceptions import ConfigurationError
from app.services.attacks.shadow import focal_point_frequency_rows, parent_size_frequency_rows
from app.services.data.desk_data import generate_desk_dataset
from app.services.evaluation.experiment import run_experiment
from app.utils.formatters import format_table

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("experiment", help="Experimento repetido sobre generadores y ε")
    add_common_arguments(parser)
    parser.add_argument("--aux", help="CSV de datos auxiliares (por defecto el dataset de escritorio)")
    parser.add_argument("--schema", help="Documento de esquema (obligatorio con --aux)")
    parser.add_argument("--gen", type=generator_kind, nargs="+", help="Generadores a evaluar")
    parser.add_argument("--eps", type=float, nargs="+", help="Valores de ε")
    parser.add_argument("--trials", type=int, help="Pruebas por (generador, ε)")
    parser.add_argument("--shadow-runs", type=int, help="Corridas sombra por prueba")
    parser.add_argument("--n-candidates", type=int, help="Hogares candidatos")
    parser.add_argument("--n-members", type=int, help="Hogares miembro")
    parser.add_argument("--train-fill-size", type=int, help="Registros de relleno del entrenamiento")
    parser.add_argument("--synth-rows", type=int, help="Registros sintéticos publicados")
    parser.add_argument("--desk-rows", type=int, help="Registros del dataset de escritorio")
    parser.add_argument(
        "--constant-predictions", action="store_const", const=True, help="Predecir 0.5 en todos los hogares"
    )
    parser.add_argument("--no-baseline", action="store_const", const=True, help="Omitir la línea base")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    context = build_context(
        args,
        {
            "experiment": {
                "generator_kinds": [kind.value for kind in args.gen] if args.gen else None,
                "epsilons": args.eps,
                "trials": args.trials,
                "shadow_runs": args.shadow_runs,
                "n_candidates": args.n_candidates,
                "n_members": args.n_members,
                "train_fill_size": args.train_fill_size,
                "synth_rows": args.synth_rows,
                "desk_rows": args.desk_rows,
                "constant_predictions": args.constant_predictions,
                "include_baseline": False if args.no_baseline else None,
            }
        },
    )
    config = context.config.experiment.model_copy(update={"seed": context.seed})
    if args.aux:
        if not args.schema:
            raise ConfigurationError("--aux necesita --schema")
        _, aux = load_inputs(args.schema, args.aux)
        require_households(aux, args.aux)
    else:
        aux = generate_desk_dataset(config.desk_rows, seed=config.seed)

    result = run_experiment(aux, config, params=context.config.generator_params(), workers=context.workers)
    rows = result.ma_rows()
    print(format_table(rows, ["generator", "epsilon", "mean_ma", "mean_auc", "baseline_mean_ma"]))

    merged = [cell.merged_weights() for cell in result.cells]
    context.store.add_json("report.json", result.to_dict())
    context.store.add_frame("ma_vs_epsilon.csv", pd.DataFrame(rows))
    context.store.add_frame("focal_points.csv", pd.DataFrame(focal_point_frequency_rows(merged)))
    parent_rows = parent_size_frequency_rows(merged)
    if parent_rows:
        context.store.add_frame("parent_sizes.csv", pd.DataFrame(parent_rows))
    context.commit({"aux": args.aux, "schema": args.schema, "config": args.config})
    return 0
