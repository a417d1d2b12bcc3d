"""
Comando ``synth``: ajustar un generador y publicar datos sintéticos.
"""
import argparse
import logging

from app.cli.common import add_common_arguments, build_context, generator_kind, load_inputs
from app.services.generators import fit_generator, sample_generator

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("synth", help="Ajustar MST/PrivBayes y muestrear registros sintéticos")
    add_common_arguments(parser)
    parser.add_argument("--data", required=True, help="CSV de entrenamiento")
    parser.add_argument("--schema", required=True, help="Documento de esquema")
    parser.add_argument("--gen", type=generator_kind, required=True, help="mst o privbayes")
    parser.add_argument("--eps", type=float, required=True, help="Presupuesto ε total")
    parser.add_argument("--rows", type=int, help="Registros sintéticos (por defecto, los de entrenamiento)")
    parser.add_argument("--indices", action="store_true", help="Escribir índices en lugar de etiquetas")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    context = build_context(args)
    _, train = load_inputs(args.schema, args.data)
    budget = context.config.budget(args.eps)
    n_rows = args.rows if args.rows is not None else train.n_rows

    model = fit_generator(args.gen, train, budget, context.source("fit"), context.config.generator_params())
    synth = sample_generator(model, n_rows, context.source("sample"))
    logger.info(f"{args.gen.value} ε={args.eps:g}: {synth.n_rows} registros sintéticos")

    context.store.add_json("model.json", model.to_dict())
    context.store.add_frame("synthetic.csv", synth.to_frame(labels=not args.indices))
    context.commit({"data": args.data, "schema": args.schema, "config": args.config})
    return 0
