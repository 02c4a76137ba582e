"""Discrete vibrating strings ``-f'' = z * omega * f`` on (0, 1).

``omega`` is a finite sum of point masses.  Between masses solutions are
affine in ``x``; crossing a mass ``m`` at ``x_i`` the derivative jumps by
``-z * m * f(x_i)``.  The forward map produces the Dirichlet spectrum and
the norming constants; the inverse map recovers the masses from the
piecewise linear function

    M(x) = int_0^x int_0^s r domega(r) ds = -x * phi_minus'(0),

where ``(phi_minus, phi_plus)`` solves a coupling problem built from the
spectral data at ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import gmpy2
from gmpy2 import mpfr, mpq

from .algebra import EXACT, FLOAT, Poly, isolate_real_roots, poly_eval, precision, refine_root, to_scalar
from .coupling import CouplingData, SolutionPair, lambda_w_prime, solve
from .errors import BudgetExhausted, KinkCountMismatch, OutOfInterval


@dataclass(frozen=True)
class DiscreteString:
    positions: tuple
    masses: tuple

    def __post_init__(self):
        xs = tuple(to_scalar(x) if not isinstance(x, type(mpfr(0))) else x for x in self.positions)
        ms = tuple(to_scalar(m) if not isinstance(m, type(mpfr(0))) else m for m in self.masses)
        if len(xs) != len(ms):
            raise ValueError("positions and masses differ in length")
        if any(not (0 < x < 1) for x in xs):
            raise ValueError("positions must lie in (0, 1)")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("positions must be strictly increasing")
        if any(m <= 0 for m in ms):
            raise ValueError("masses must be positive")
        object.__setattr__(self, "positions", xs)
        object.__setattr__(self, "masses", ms)

    def __len__(self):
        return len(self.positions)


@dataclass(frozen=True)
class StringSpectralData:
    eigenvalues: tuple
    norming: tuple  # gamma_lambda^2
    wronskian: Poly
    prec_bits: int = 256

    @property
    def kind(self) -> str:
        return FLOAT if any(isinstance(v, type(mpfr(0))) for v in self.eigenvalues) else EXACT


def phi_at(s: DiscreteString, x, kind: str = EXACT) -> tuple[Poly, Poly]:
    """Value and left derivative of the solution with ``phi ~ x`` at 0, as polynomials in z."""
    x = to_scalar(x, kind)
    z = Poly.z(kind)
    f, df = Poly.zero(kind), Poly.one(kind)
    pos = to_scalar(0, kind)
    for xi, mi in zip(s.positions, s.masses):
        if xi >= x:
            break
        f = f + df * (to_scalar(xi, kind) - pos)
        df = df - z * f * to_scalar(mi, kind)
        pos = to_scalar(xi, kind)
    f = f + df * (x - pos)
    return f, df


def psi_at(s: DiscreteString, x, kind: str = EXACT) -> tuple[Poly, Poly]:
    """Value and left derivative of the solution with ``psi ~ 1 - x`` at 1."""
    x = to_scalar(x, kind)
    z = Poly.z(kind)
    f, df = Poly.zero(kind), Poly.const(-1, kind)
    pos = to_scalar(1, kind)
    for xi, mi in zip(reversed(s.positions), reversed(s.masses)):
        if xi < x:
            break
        f = f - df * (pos - to_scalar(xi, kind))
        df = df + z * f * to_scalar(mi, kind)
        pos = to_scalar(xi, kind)
    f = f - df * (pos - x)
    return f, df


def string_wronskian(s: DiscreteString) -> tuple[Poly, Callable, Callable]:
    """Exact Wronskian ``psi*phi' - psi'*phi`` plus the two transfer evaluators."""
    x = mpq(1, 2) if not s.positions else s.positions[0] / 2
    f, df = phi_at(s, x)
    g, dg = psi_at(s, x)
    W = g * df - dg * f
    return W, (lambda x, kind=EXACT: phi_at(s, x, kind)), (lambda x, kind=EXACT: psi_at(s, x, kind))


def _slopes(s: DiscreteString, lam) -> list:
    """Piecewise-constant derivative of phi(lam, .) on each gap between masses."""
    f, df = lam * 0, lam * 0 + 1
    pos = 0
    out = [df]
    for xi, mi in zip(s.positions, s.masses):
        f = f + df * (xi - pos)
        df = df - lam * mi * f
        pos = xi
        out.append(df)
    return out


def norming_constant(s: DiscreteString, lam):
    """``int_0^1 phi'(lam, x)^2 dx`` as a finite sum over the gaps."""
    edges = (0,) + tuple(s.positions) + (1,)
    return sum(
        (edges[k + 1] - edges[k]) * sl * sl for k, sl in enumerate(_slopes(s, lam))
    )


def _as_rational_root(p: Poly, iv) -> object | None:
    # any candidate is confirmed by exact evaluation, so the guess may be crude
    scale = max(abs(iv.lo), abs(iv.hi), mpq(1))
    iv = refine_root(p, iv, scale * mpq(1, 2**96))
    guess = Fraction(int(iv.mid.numerator), int(iv.mid.denominator)).limit_denominator(10**12)
    q = mpq(guess.numerator, guess.denominator)
    if iv.lo <= q <= iv.hi and poly_eval(p, q) == 0:
        return q
    return None


def string_spectrum(s: DiscreteString, prec: int = 256) -> StringSpectralData:
    """Eigenvalues and norming constants; exact when every eigenvalue is rational."""
    W, _, _ = string_wronskian(s)
    iso = isolate_real_roots(W, 1)
    exact = [_as_rational_root(W, iv) for iv in iso]
    if all(v is not None for v in exact):
        return StringSpectralData(tuple(exact), tuple(norming_constant(s, lam) for lam in exact), W, prec)
    with precision(prec):
        eig = []
        for iv in iso:
            scale = max(abs(iv.lo), abs(iv.hi))
            fine = refine_root(W, iv, scale * mpq(1, 2 ** (prec + 16)))
            eig.append(mpfr(fine.mid))
        xs_f = DiscreteString(tuple(mpfr(x) for x in s.positions), tuple(mpfr(m) for m in s.masses))
        gam = tuple(norming_constant(xs_f, lam) for lam in eig)
    return StringSpectralData(tuple(eig), gam, W, prec)


def string_eta(x, d: StringSpectralData) -> CouplingData:
    """Coupling constants ``-gamma^2/(lam W'(lam)) * (1-x)/x`` on the eigenvalues."""
    kind = d.kind
    with precision(d.prec_bits):
        x = to_scalar(x, kind)
        if not (0 < x < 1):
            raise OutOfInterval(f"x = {x} is not in (0, 1)")
        ratio = (1 - x) / x
        eta = tuple(
            -g / lambda_w_prime(d.eigenvalues, lam) * ratio
            for lam, g in zip(d.eigenvalues, d.norming)
        )
        return CouplingData(d.eigenvalues, eta, kind)


def string_solution(x, d: StringSpectralData) -> SolutionPair:
    with precision(d.prec_bits):
        return solve(string_eta(x, d))


def string_moment(x, d: StringSpectralData):
    """``M(x) = -x * phi_minus'(0)`` from the coupling problem at ``x``."""
    with precision(d.prec_bits):
        x = to_scalar(x, d.kind)
        sol = solve(string_eta(x, d))
        return -x * sol.phi_minus.coeff(1)


def direct_moment(s: DiscreteString, x):
    """The double integral of ``r domega(r)``, straight from the masses."""
    out = 0
    for xi, mi in zip(s.positions, s.masses):
        if xi < x:
            out = out + mi * xi * (x - xi)
    return out


def normalized_pair(s: DiscreteString, x, kind: str = EXACT) -> SolutionPair:
    """``(phi(., x)/x, psi(., x)/(1-x))`` from the transfer matrices."""
    x = to_scalar(x, kind)
    f, _ = phi_at(s, x, kind)
    g, _ = psi_at(s, x, kind)
    return SolutionPair(f / x, g / (1 - x))


@dataclass
class _Probe:
    x: object
    value: object
    slope: object


def string_recover(
    d: StringSpectralData,
    kink_tol: float = 1e-12,
    grid_budget: int = 400,
    grid_size: int | None = None,
) -> DiscreteString:
    """Recover positions and masses from the spectral data.

    ``M`` is convex and piecewise linear with a kink of height ``x_i * m_i``
    at every mass.  Each probe evaluates ``M`` at two nearby points to get a
    value and a local slope.  Between neighbouring probes with different
    slopes the two tangent lines meet at a candidate kink; convexity means
    the candidate is certified as the only kink when ``M`` agrees with both
    lines there.  Otherwise the bracket is bisected.
    """
    n = len(d.eigenvalues)
    if n == 0:
        return DiscreteString((), ())
    calls = [0]
    with precision(d.prec_bits):
        eps = mpfr(2) ** (-(d.prec_bits // 2))
        kink_tol = mpfr(kink_tol)

        def M(x):
            calls[0] += 1
            if calls[0] > grid_budget:
                raise BudgetExhausted(f"more than {grid_budget} coupling problems solved")
            return string_moment(x, _as_float(d))

        def probe(x, h):
            v0 = M(x)
            v1 = M(x + h)
            return _Probe(x, v0, (v1 - v0) / h)

        G = grid_size or max(4 * n, 12)
        theta = (gmpy2.sqrt(mpfr(5)) - 1) / 2
        spacing = mpfr(1) / G
        h = spacing * mpfr(2) ** -24
        xs = [(k + theta) / G for k in range(G)]
        xs.append(1 - spacing * mpfr(2) ** -20)
        probes = [_Probe(mpfr(0), mpfr(0), mpfr(0))] + [probe(x, h) for x in xs]

        def agrees(a, b, scale):
            return abs(a - b) <= eps * max(mpfr(1), abs(scale))

        kinks = []  # (position, slope jump)

        def search(left: _Probe, right: _Probe):
            if agrees(left.slope, right.slope, right.slope):
                return
            # tangent lines from both ends meet at the candidate
            xc = (right.value - left.value + left.slope * left.x - right.slope * right.x) / (left.slope - right.slope)
            yc = left.value + left.slope * (xc - left.x)
            if left.x < xc < right.x and agrees(M(xc), yc, yc):
                kinks.append((xc, right.slope - left.slope))
                return
            if right.x - left.x < kink_tol:
                raise KinkCountMismatch(f"unresolved kinks in [{left.x}, {right.x}]")
            mid = (left.x + right.x) / 2
            hm = min(h, (right.x - left.x) * mpfr(2) ** -24)
            pm = probe(mid, hm)
            search(left, pm)
            search(pm, right)

        for a, b in zip(probes, probes[1:]):
            search(a, b)
        if len(kinks) != n:
            raise KinkCountMismatch(f"found {len(kinks)} kinks for {n} eigenvalues")
        kinks.sort(key=lambda t: t[0])
        positions = tuple(x for x, _ in kinks)
        masses = tuple(j / x for x, j in kinks)
        return DiscreteString(positions, masses)


def _as_float(d: StringSpectralData) -> StringSpectralData:
    if d.kind == FLOAT:
        return d
    return StringSpectralData(
        tuple(mpfr(v) for v in d.eigenvalues), tuple(mpfr(v) for v in d.norming), d.wronskian, d.prec_bits
    )
