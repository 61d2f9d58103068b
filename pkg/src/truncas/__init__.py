"""Exact truncated power series toolkit.

Precision-tracked series arithmetic over Q and F_p, Hensel codes for
algebraic series, truncated solving of linear systems under nesting
constraints, Groebner elimination for ideals and modules, and morphism
kernel analysis, with a deterministic problem-file CLI on top.
"""

from .errors import TruncasError
from .fields import QQ, PrimeField
from .groebner import (
    PolyIdeal,
    buchberger,
    eliminate_ideal,
    truncated_completion_elimination,
)
from .hensel import HenselCode, implicit_solve, lift, validate
from .modules import (
    PolyModule,
    chevalley_beta,
    module_intersect_zero_block,
    nagata_idealize,
    syzygies,
)
from .morphisms import (
    AlgebraMorphism,
    check_strong_injectivity,
    kernel_exact,
    preimage,
    truncated_completion_kernel,
)
from .nested import (
    NestedLinearSystem,
    NestedProfile,
    SolutionSet,
    approximate,
    homogenize,
    implicit_linear,
    recover_from_homogeneous,
    solve_nested,
    weierstrass_divide,
)
from .series import Polynomial, Ring, TruncatedSeries, substitute

__all__ = [
    "TruncasError",
    "QQ",
    "PrimeField",
    "PolyIdeal",
    "buchberger",
    "eliminate_ideal",
    "truncated_completion_elimination",
    "HenselCode",
    "implicit_solve",
    "lift",
    "validate",
    "PolyModule",
    "chevalley_beta",
    "module_intersect_zero_block",
    "nagata_idealize",
    "syzygies",
    "AlgebraMorphism",
    "check_strong_injectivity",
    "kernel_exact",
    "preimage",
    "truncated_completion_kernel",
    "NestedLinearSystem",
    "NestedProfile",
    "SolutionSet",
    "approximate",
    "homogenize",
    "implicit_linear",
    "recover_from_homogeneous",
    "solve_nested",
    "weierstrass_divide",
    "Polynomial",
    "Ring",
    "TruncatedSeries",
    "substitute",
]
