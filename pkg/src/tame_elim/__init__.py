"""Definable types over the rationals with infinitesimals, computed exactly."""
from .cells import EMPTY, cell_decompose, definable_choice, dim, fiber_dim_partition, mu_function
from .cutdef import CutSpec, cut_definable, is_cut, verify_cut
from .engine import define_type, oracle_define_type, verify_equivalence
from .formula import Formula, LinTerm, evaluate, nnf, substitute
from .ordkit import DefLinOrder, check_linear_order, quotient_reduce, reduce_chain
from .qe import decide, equivalent, fm_qe, qe, simplify
from .star import eval_star, mu_star, standard_points_1d, standard_trace
from .starnum import EPS, OMEGA, StarNum, std
from .syntax import parse, to_sexp

__version__ = "0.1.0"

__all__ = [
    "EMPTY", "cell_decompose", "definable_choice", "dim", "fiber_dim_partition", "mu_function",
    "CutSpec", "cut_definable", "is_cut", "verify_cut",
    "define_type", "oracle_define_type", "verify_equivalence",
    "Formula", "LinTerm", "evaluate", "nnf", "substitute",
    "DefLinOrder", "check_linear_order", "quotient_reduce", "reduce_chain",
    "decide", "equivalent", "fm_qe", "qe", "simplify",
    "eval_star", "mu_star", "standard_points_1d", "standard_trace",
    "EPS", "OMEGA", "StarNum", "std", "parse", "to_sexp",
]
