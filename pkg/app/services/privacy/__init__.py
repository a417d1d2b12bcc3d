"""
Primitivas de privacidad diferencial (ε puro).
"""
from .mechanisms import (
    exponential_mechanism,
    exponential_mechanism_probabilities,
    laplace_from_uniform,
    laplace_noise,
    noisy_marginal,
    split_budget,
)

__all__ = [
    "exponential_mechanism",
    "exponential_mechanism_probabilities",
    "laplace_from_uniform",
    "laplace_noise",
    "noisy_marginal",
    "split_budget",
]
