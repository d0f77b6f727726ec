"""Stable rational contractive solutions of the Leech equation ``G X = K``."""
from .errors import (LeechError, NoStabilizingSolution, NotSolvable,
                     SemidefiniteUnsupported)
from .realization import (LeechData, Realization, ctrl_gramian, evaluate, hinf_norm_grid,
                          minimality_report, obs_gramian, stein)
from .solver import Branch, LeechSolution, SolveOptions, solve
from .spectral import SymbolR, build_symbol, factor_symbol, outer_factor, riccati_stabilizing

__all__ = [
    "Branch", "LeechData", "LeechError", "LeechSolution", "NoStabilizingSolution",
    "NotSolvable", "Realization", "SemidefiniteUnsupported", "SolveOptions", "SymbolR",
    "build_symbol", "ctrl_gramian", "evaluate", "factor_symbol", "hinf_norm_grid",
    "minimality_report", "obs_gramian", "outer_factor", "riccati_stabilizing", "solve", "stein",
]
