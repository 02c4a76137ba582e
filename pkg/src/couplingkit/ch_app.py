"""Camassa-Holm multipeakons through coupling problems.

A multipeakon ``u(x) = sum p_i exp(-|x - q_i|)`` has ``omega = u - u_xx =
2 sum p_i delta_{q_i}``.  The spectral problem ``-f'' + f/4 = z*omega*f``
has solutions ``A exp(x/2) + B exp(-x/2)`` between the peakons, and the
derivative jumps by ``-2 z p_i f(q_i)`` across each one.  The spectrum
and the couplings ``c_lambda`` evolve trivially in time, and ``u(x, t)``
is read off the solution of the coupling problem with data
``eta(lambda) = c_lambda * exp(t/(2 lambda) - x)``.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import gmpy2
import numpy as np
from gmpy2 import mpfr, mpq

from .algebra import FLOAT, Poly, isolate_real_roots, poly_eval, precision, refine_root
from .coupling import CouplingData, SolutionPair, solve
from .errors import CouplingError, DegenerateSpectrum

_MPFR = type(mpfr(0))


def _to_mpfr(v):
    if isinstance(v, str):
        v = mpq(v) if "/" in v else mpfr(v)
    return mpfr(v)


@dataclass(frozen=True)
class Multipeakon:
    q: tuple
    p: tuple

    def __post_init__(self):
        if len(self.q) != len(self.p):
            raise ValueError("q and p differ in length")
        if any(a >= b for a, b in zip(self.q, self.q[1:])):
            raise ValueError("peakon locations must be strictly increasing")
        if any(w <= 0 for w in self.p):
            raise ValueError("peakon weights must be positive")

    def __len__(self):
        return len(self.q)

    def u(self, x):
        """The profile ``sum p_i exp(-|x - q_i|)``."""
        x = mpfr(x)
        return sum((mpfr(p) * gmpy2.exp(-abs(x - mpfr(q))) for q, p in zip(self.q, self.p)), mpfr(0))


@dataclass(frozen=True)
class CHSpectralData:
    eigenvalues: tuple
    couplings0: tuple
    wronskian: Poly
    prec_bits: int = 256


def _jump(A: Poly, B: Poly, q, p, sign: int) -> tuple[Poly, Poly]:
    # f' changes by -sign * 2 z p f(q) while f stays continuous
    eh = gmpy2.exp(q / 2)
    f = A * eh + B / eh
    kick = Poly.z(FLOAT) * f * (2 * p * sign)
    return A - kick / eh, B + kick * eh


def transfer_minus(mp: Multipeakon, x=None) -> tuple[Poly, Poly]:
    """``(A, B)`` of ``phi_minus`` right of every peakon left of ``x`` (all if ``x`` is None)."""
    A, B = Poly.one(FLOAT), Poly.zero(FLOAT)
    for q, p in zip(mp.q, mp.p):
        q = _to_mpfr(q)
        if x is not None and q >= x:
            break
        A, B = _jump(A, B, q, _to_mpfr(p), 1)
    return A, B


def transfer_plus(mp: Multipeakon, x=None) -> tuple[Poly, Poly]:
    """``(A, B)`` of ``phi_plus`` left of every peakon right of ``x``."""
    A, B = Poly.zero(FLOAT), Poly.one(FLOAT)
    for q, p in zip(reversed(mp.q), reversed(mp.p)):
        q = _to_mpfr(q)
        if x is not None and q < x:
            break
        A, B = _jump(A, B, q, _to_mpfr(p), -1)
    return A, B


def ch_forward(mp: Multipeakon, prec: int = 256) -> CHSpectralData:
    """Eigenvalues, initial couplings and Wronskian of a multipeakon.

    Right of all peakons ``phi_plus = exp(-x/2)``, so the Wronskian is the
    ``exp(x/2)`` coefficient of ``phi_minus`` there and at an eigenvalue the
    ``exp(-x/2)`` coefficient is ``c_lambda``.
    """
    with precision(prec):
        W, C = transfer_minus(mp)
        if len(mp) == 0:
            return CHSpectralData((), (), W, prec)
        # isolate on the exact lift of the float coefficients
        lifted = W.to_exact()
        iso = isolate_real_roots(lifted, 1)
        if iso.count != W.degree or any(iv.multiplicity != 1 for iv in iso):
            raise DegenerateSpectrum(f"{iso.count} distinct real roots for degree {W.degree}")
        eig = []
        for iv in iso:
            scale = max(abs(iv.lo), abs(iv.hi))
            eig.append(mpfr(refine_root(lifted, iv, scale * mpq(1, 2 ** (prec + 16))).mid))
        gap = min((abs(b - a) / max(abs(a), abs(b)) for a, b in zip(eig, eig[1:])), default=mpfr(1))
        if gap < mpfr(2) ** (-(prec // 2)):
            raise DegenerateSpectrum(f"eigenvalues coincide to relative gap {gap}")
        if any(v == 0 for v in eig):
            raise DegenerateSpectrum("zero eigenvalue")
        cs = tuple(poly_eval(C, lam) for lam in eig)
        # one source of truth for sum 1/lambda; the Wronskian slope must agree
        trace = sum(1 / lam for lam in eig)
        if abs(trace + W.coeff(1)) > mpfr(2) ** (-(prec // 2)) * max(mpfr(1), abs(trace)):
            raise DegenerateSpectrum("eigenvalues do not reproduce W'(0)")
        return CHSpectralData(tuple(eig), cs, W, prec)


def ch_eta(d: CHSpectralData, x, t) -> CouplingData:
    with precision(d.prec_bits):
        x, t = _to_mpfr(x), _to_mpfr(t)
        eta = tuple(c * gmpy2.exp(t / (2 * lam) - x) for lam, c in zip(d.eigenvalues, d.couplings0))
        return CouplingData(d.eigenvalues, eta, FLOAT)


def ch_solution(d: CHSpectralData, x, t) -> SolutionPair:
    with precision(d.prec_bits):
        return solve(ch_eta(d, x, t))


def ch_reconstruct_u(d: CHSpectralData, x, t):
    """``u = (Phi_-'(0) + Phi_+'(0))/2 + sum(1/lambda)/2``."""
    with precision(d.prec_bits):
        pair = ch_solution(d, x, t)
        half_trace = sum((1 / lam for lam in d.eigenvalues), mpfr(0)) / 2
        return (pair.phi_minus.coeff(1) + pair.phi_plus.coeff(1)) / 2 + half_trace


def ch_reconstruct_u_alt(d: CHSpectralData, x, t):
    """``u`` as a quarter of the second z-derivative of ``z Phi_- Phi_+ / W`` at zero."""
    with precision(d.prec_bits):
        pair = ch_solution(d, x, t)
        num = pair.phi_minus * pair.phi_plus
        W = d.wronskian
        # 1/W = 1 - w1 z + ..., only the linear term reaches z^2 after the factor z
        inv1 = -W.coeff(1) / W.coeff(0)
        c2 = (num.coeff(1) + num.coeff(0) * inv1) / W.coeff(0)
        return 2 * c2 / 4


def _cell(args):
    d, x, t = args
    try:
        return float(ch_reconstruct_u(d, x, t)), None
    except CouplingError as exc:
        return float("nan"), f"{type(exc).__name__}: {exc}"


def ch_sample_field(
    d: CHSpectralData, x_grid: Sequence, t_grid: Sequence, workers: int = 1
) -> tuple[np.ndarray, dict]:
    """``u`` on the ``(t, x)`` grid, row-major over ``t``.

    Failed cells hold NaN and their messages are returned keyed by
    ``(row, col)``.
    """
    cells = [(d, x, t) for t in t_grid for x in x_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, cells, chunksize=16))
    else:
        results = [_cell(c) for c in cells]
    nx = len(x_grid)
    out = np.array([v for v, _ in results], dtype=float).reshape(len(t_grid), nx)
    errors = {divmod(k, nx): msg for k, (_, msg) in enumerate(results) if msg is not None}
    return out, errors
