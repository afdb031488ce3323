"""Exact tools for valued constraint languages: brute-force VCSP solving,
polymorphisms and weighted polymorphisms, cores, algebraic transforms and
complexity classification."""

__version__ = "0.1.0"

from .config import DEFAULT_BUDGET, Budget
from .errors import BudgetExceeded, InputError, VCSPError
from .language import CostFunction, Language, load_language, make_language
from .operations import Operation
from .rationals import INF
from .vcsp import Instance, cost, express, load_instance, solve

__all__ = [
    "DEFAULT_BUDGET",
    "Budget",
    "BudgetExceeded",
    "CostFunction",
    "INF",
    "InputError",
    "Instance",
    "Language",
    "Operation",
    "VCSPError",
    "cost",
    "express",
    "load_instance",
    "load_language",
    "make_language",
    "solve",
]
