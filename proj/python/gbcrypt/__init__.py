"""Group-based key exchange, conjugacy attacks and benchmarks."""

from ._gbcrypt import (
    attack,
    bench,
    conjugate,
    equal,
    exchange,
    expected_time,
    fit_polynomial,
    free_reduce,
    genericity_estimate,
    monte_carlo_check,
    multi_round_success,
    normal_form,
    word_length,
)

__all__ = [
    "attack",
    "bench",
    "conjugate",
    "equal",
    "exchange",
    "expected_time",
    "fit_polynomial",
    "free_reduce",
    "genericity_estimate",
    "monte_carlo_check",
    "multi_round_success",
    "normal_form",
    "word_length",
]
