"""MLS: a small R-flavored expression language.

Lazy promise-based evaluation over environments with copy-on-modify
value semantics, informal (class-vector) and formal (multiple-dispatch)
functional OOP, environment-backed reference classes, and a static
analyzer that certifies or refutes the functional validity of user
functions.
"""

from .interpreter import Interpreter
from .reader import parse_one, parse_program
from .syntax import deparse
from .values import MlsError

__version__ = "0.1.0"

__all__ = [
    "Interpreter",
    "MlsError",
    "deparse",
    "parse_one",
    "parse_program",
    "__version__",
]
