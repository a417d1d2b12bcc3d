"""
Módulo de workers para tareas independientes en paralelo.
"""

from .pool import run_parallel

__all__ = ["run_parallel"]
