"""A stateless LCF-style HOL kernel with definition-carrying constants."""

from .core_types import Failure
from .state import SymbolTable
from .syntax import parse_term, parse_type, print_term, print_thm, print_type

__all__ = [
    "Failure",
    "SymbolTable",
    "parse_term",
    "parse_type",
    "print_term",
    "print_thm",
    "print_type",
]
