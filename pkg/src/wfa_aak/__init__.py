"""Optimal spectral-norm reduction of one-letter weighted automata."""

from .config import DEFAULT, Tolerances
from .errors import *  # noqa: F401,F403
from .wfa import (
    Gramians,
    SvaWfa,
    Wfa,
    difference,
    direct_sum,
    equivalent,
    evaluate,
    example1,
    gramians,
    load_wfa,
    minimize,
    save_wfa,
    series,
    to_sva,
    zero_wfa,
)

__version__ = "0.1.0"
