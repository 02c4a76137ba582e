"""Coupling problems for entire functions on a finite spectrum, with string and peakon applications."""
from .algebra import EXACT, FLOAT, ComplexPoint, Poly, isolate_real_roots, polys_interlace, precision, real_roots
from .ch_app import (
    CHSpectralData,
    Multipeakon,
    ch_eta,
    ch_forward,
    ch_reconstruct_u,
    ch_reconstruct_u_alt,
    ch_sample_field,
)
from .coupling import (
    INF,
    CouplingData,
    NoSolution,
    SolutionPair,
    SolverTrace,
    VerificationReport,
    VerifyOptions,
    build_W,
    is_admissible,
    reduce,
    solve,
    solve_general,
    solve_strict,
    solve_truncated,
    verify,
)
from .errors import *  # noqa: F401,F403
from .herglotz import ContinuedFraction, HerglotzRational, cf_expand, cf_reconstruct
from .string_app import (
    DiscreteString,
    StringSpectralData,
    string_eta,
    string_moment,
    string_recover,
    string_spectrum,
    string_wronskian,
)

__version__ = "0.1.0"
