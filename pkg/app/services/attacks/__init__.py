"""
Modelado sombra y ataques de inferencia de pertenencia.
"""
from .domias import (
    AttackResult,
    CandidateSet,
    activate,
    baseline_domias,
    household_scores,
    run_attack,
    score_mst,
    score_privbayes,
)
from .shadow import (
    FocalPointWeights,
    focal_point_frequency_rows,
    mean_parent_size,
    parent_size_frequency_rows,
    run_shadow,
    top_focal_points,
)

__all__ = [
    "AttackResult",
    "CandidateSet",
    "FocalPointWeights",
    "activate",
    "baseline_domias",
    "focal_point_frequency_rows",
    "household_scores",
    "mean_parent_size",
    "parent_size_frequency_rows",
    "run_attack",
    "run_shadow",
    "score_mst",
    "score_privbayes",
    "top_focal_points",
]
