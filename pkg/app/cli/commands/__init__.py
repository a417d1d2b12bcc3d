"""
Subcomandos de la CLI, uno por etapa del pipeline.
"""

from . import attack, desk, evaluate, experiment, shadow, synth

COMMANDS = [synth, shadow, attack, evaluate, experiment, desk]

__all__ = ["COMMANDS"]
