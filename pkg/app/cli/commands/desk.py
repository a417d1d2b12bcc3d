"""
Comando ``gen-desk-data``: generar el dataset de escritorio y su esquema.
"""
import argparse

from app.cli.common import add_common_arguments, build_context
from app.services.data.desk_data import desk_schema, generate_desk_dataset


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen-desk-data", help="Generar el dataset sintético de escritorio")
    add_common_arguments(parser)
    parser.add_argument("--rows", type=int, help="Registros (por defecto experiment.desk_rows)")
    parser.add_argument("--indices", action="store_true", help="Escribir índices en lugar de etiquetas")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    context = build_context(args, {"experiment": {"desk_rows": args.rows}})
    data = generate_desk_dataset(context.config.experiment.desk_rows, seed=context.seed)

    context.store.add_frame("desk.csv", data.to_frame(labels=not args.indices))
    context.store.add_json("schema.json", desk_schema().model_dump(mode="json"))
    context.commit({"config": args.config})
    return 0
