"""
Métricas y protocolo experimental.
"""
from .experiment import (
    CellResult,
    MAResult,
    TrialResult,
    TrialSplit,
    run_experiment,
    run_trial,
    sample_trial_split,
)
from .metrics import auc, membership_advantage

__all__ = [
    "CellResult",
    "MAResult",
    "TrialResult",
    "TrialSplit",
    "auc",
    "membership_advantage",
    "run_experiment",
    "run_trial",
    "sample_trial_split",
]
