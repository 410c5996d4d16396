"""McEliece instances as Ising problems: generation, mapping, solvers and statistics."""

from ._core import *  # noqa: F401,F403
from ._core import UsageError, IoError, SolverFailure, InternalError  # noqa: F401

__version__ = "0.1.0"
