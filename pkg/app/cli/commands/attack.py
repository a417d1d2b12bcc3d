"""
Comando ``attack``: puntuar hogares candidatos contra datos sintéticos publicados.
"""
import argparse
import logging

import pandas as pd

from app.cli.common import add_common_arguments, build_context, generator_kind, load_inputs, require_households
from app.core.exceptions import ConfigurationError
from app.models.schemas import ActivationMode, AggregationMode
from app.services.attacks.domias import CandidateSet, run_attack
from app.services.attacks.shadow import top_focal_points
from app.services.storage.file_storage import load_weights

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("attack", help="Ataque DOMIAS adaptado sobre hogares candidatos")
    add_common_arguments(parser)
    parser.add_argument("--synth", required=True, help="CSV sintético publicado")
    parser.add_argument("--aux", required=True, help="CSV de datos auxiliares")
    parser.add_argument("--candidates", required=True, help="CSV de candidatos con household_id")
    parser.add_argument("--schema", required=True, help="Documento de esquema")
    parser.add_argument("--weights", help="Pesos del modelado sombra")
    parser.add_argument("--gen", type=generator_kind, help="Generador atacado (por defecto el de los pesos)")
    parser.add_argument("--baseline", action="store_true", help="Usar el DOMIAS de marginales de 1 vía")
    parser.add_argument("--min-weight", type=float, help="Frecuencia mínima de un punto focal")
    parser.add_argument("--smoothing", type=float, help="Suavizado aditivo por celda")
    parser.add_argument("--activation", choices=[m.value for m in ActivationMode], help="sigmoid o root")
    parser.add_argument("--c", type=float, help="Confianza de la activación")
    parser.add_argument("--m", type=float, help="Centro de la sigmoide")
    parser.add_argument("--center-quantile", type=float, help="Centrar la sigmoide en este cuantil de ln Λ")
    parser.add_argument("--aggregation", choices=[m.value for m in AggregationMode], help="mean o most_confident")
    parser.add_argument("--min-household-size", type=int, help="Registros mínimos por hogar candidato")
    parser.add_argument("--relaxed", action="store_const", const=True, help="Solo advertir hogares pequeños")
    parser.add_argument("--dump-lambdas", action="store_true", help="Escribir Λ y P por registro")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    context = build_context(
        args,
        {
            "shadow": {"min_weight": args.min_weight},
            "attack": {
                "smoothing": args.smoothing,
                "aggregation": args.aggregation,
                "min_household_size": args.min_household_size,
                "relaxed": args.relaxed,
                "activation": {
                    "mode": args.activation,
                    "c": args.c,
                    "m": args.m,
                    "center_quantile": args.center_quantile,
                },
            },
        },
    )
    attack_config = context.config.attack
    if args.weights is None and not args.baseline:
        raise ConfigurationError("se necesita --weights (o --baseline)")

    _, synth, aux, records = load_inputs(args.schema, args.synth, args.aux, args.candidates)
    require_households(records, args.candidates)
    candidates = CandidateSet(
        records, min_household_size=attack_config.min_household_size, relaxed=attack_config.relaxed
    )

    kind = None
    focal, weights = [], []
    if not args.baseline:
        shadow_weights = load_weights(args.weights)
        kind = args.gen or shadow_weights.generator_kind
        if kind != shadow_weights.generator_kind:
            raise ConfigurationError(
                f"los pesos son de {shadow_weights.generator_kind.value}, no de {kind.value}"
            )
        focal, weights = top_focal_points(shadow_weights, context.config.shadow.min_weight)

    result = run_attack(
        kind,
        synth,
        aux,
        candidates,
        focal=focal,
        weights=weights,
        smoothing=attack_config.smoothing,
        activation=attack_config.activation,
        aggregation=attack_config.aggregation,
    )
    households = sorted(result.prob_per_household)
    context.store.add_frame(
        "predictions.csv",
        pd.DataFrame(
            {"household_id": households, "probability": [result.prob_per_household[h] for h in households]}
        ),
    )
    if args.dump_lambdas:
        context.store.add_frame(
            "lambdas.csv",
            pd.DataFrame(
                {
                    "household_id": result.household_ids,
                    "lambda": result.lambda_per_record,
                    "probability": result.prob_per_record,
                }
            ),
        )
    logger.info(f"Ataque {kind.value if kind else 'baseline'}: {len(households)} hogares")
    context.commit(
        {
            "synth": args.synth,
            "aux": args.aux,
            "candidates": args.candidates,
            "schema": args.schema,
            "weights": args.weights,
            "config": args.config,
        }
    )
    return 0
