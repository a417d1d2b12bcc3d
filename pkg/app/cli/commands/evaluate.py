"""
Comando ``eval``: MA y AUC de un archivo de predicciones.
"""
import argparse
import logging

from app.cli.common import add_common_arguments, build_context
from app.models.schemas import GroundTruth
from app.services.evaluation.metrics import auc, membership_advantage
from app.services.storage.file_storage import load_members, load_predictions
from app.utils.formatters import format_table

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="Evaluar predicciones por hogar contra los miembros reales")
    add_common_arguments(parser)
    parser.add_argument("--predictions", required=True, help="CSV household_id,probability")
    parser.add_argument("--truth", required=True, help="CSV con los household_id miembros")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    context = build_context(args)
    predictions = load_predictions(args.predictions)
    members = load_members(args.truth)
    # Los candidatos son los hogares con predicción
    candidates = frozenset(predictions)
    truth = GroundTruth(member_households=members & candidates, all_candidate_households=candidates)
    if members - truth.member_households:
        logger.warning(f"{len(members - truth.member_households)} miembros sin predicción se ignoran")

    scores = {
        "households": len(predictions),
        "members": len(truth.member_households),
        "ma": membership_advantage(predictions, truth),
        "auc": auc(predictions, truth),
    }
    print(format_table([scores], ["households", "members", "ma", "auc"]))

    context.store.add_json("evaluation.json", scores)
    context.commit({"predictions": args.predictions, "truth": args.truth, "config": args.config})
    return 0
