"""Rational Herglotz-Nevanlinna functions with a pole at zero.

A :class:`HerglotzRational` stores

    m(z) = alpha + beta*z - c0/z + sum_j w_j / (lambda_j - z)

with ``beta >= 0``, ``c0 > 0`` and positive weights.  :func:`cf_expand`
turns such an ``m`` into the coefficient triples ``(l_n, omega_n, upsilon_n)``
of the continued fraction

    m(z) = omega_N + upsilon_N z + 1/(-l_N z + 1/( ... + 1/(omega_1 + upsilon_1 z + 1/(-l_1 z))))

and :func:`cf_reconstruct` runs the three-term recursion that rebuilds
``p_N / q_N`` from the triples.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpfr

from .algebra import EXACT, FLOAT, ComplexPoint, Poly, scalar_kind, to_scalar
from .errors import NotHerglotz, PoleHit, ZeroRemainderUnexpected


@dataclass(frozen=True)
class HerglotzRational:
    alpha: object
    beta: object
    c0: object
    poles: tuple = ()
    kind: str = EXACT

    def __post_init__(self):
        kind = self.kind
        conv = lambda x: to_scalar(x, kind)  # noqa: E731
        poles = tuple(sorted(((conv(lam), conv(w)) for lam, w in self.poles), key=lambda t: t[0]))
        object.__setattr__(self, "alpha", conv(self.alpha))
        object.__setattr__(self, "beta", conv(self.beta))
        object.__setattr__(self, "c0", conv(self.c0))
        object.__setattr__(self, "poles", poles)
        if self.beta < 0:
            raise NotHerglotz("beta must be non-negative")
        if self.c0 <= 0:
            raise NotHerglotz("the -c0/z term needs c0 > 0")
        lams = [lam for lam, _ in poles]
        if any(lam == 0 for lam in lams):
            raise NotHerglotz("nonzero poles only; the pole at zero is carried by c0")
        if len(set(lams)) != len(lams):
            raise NotHerglotz("poles must be distinct")
        if any(w <= 0 for _, w in poles):
            raise NotHerglotz("pole weights must be positive (omit zero weights)")

    @property
    def pole_count(self) -> int:
        """Number of poles including the one at zero."""
        return len(self.poles) + 1

    def rational_form(self) -> tuple[Poly, Poly]:
        """Cleared form ``(P, Q)`` with ``Q = z * prod (lambda_j - z)``."""
        kind = self.kind
        lin = [Poly([lam, -1], kind) for lam, _ in self.poles]
        prod_all = Poly.one(kind)
        for f in lin:
            prod_all = prod_all * f
        z = Poly.z(kind)
        Q = z * prod_all
        P = Poly([self.alpha, self.beta], kind) * Q - prod_all * self.c0
        for j, (_, w) in enumerate(self.poles):
            others = Poly.one(kind)
            for i, f in enumerate(lin):
                if i != j:
                    others = others * f
            P = P + z * others * w
        return P, Q


def hn_eval(m: HerglotzRational, z):
    """Evaluate the partial-fraction sum at a real scalar or :class:`ComplexPoint`."""
    if isinstance(z, complex):
        z = ComplexPoint.of(z)
    if z == 0 or any(z == lam for lam, _ in m.poles):
        raise PoleHit(f"{z} is a pole")
    val = m.alpha + m.beta * z - m.c0 / z
    for lam, w in m.poles:
        val = val + w / (lam - z)
    return val


@dataclass(frozen=True)
class ContinuedFraction:
    """Triples ``(l, omega, upsilon)`` with index 0 the innermost level."""

    triples: tuple = ()
    residual: object = field(default=None, compare=False)

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    @property
    def l(self) -> list:
        return [t[0] for t in self.triples]

    @property
    def omega(self) -> list:
        return [t[1] for t in self.triples]

    @property
    def upsilon(self) -> list:
        return [t[2] for t in self.triples]

    def check(self) -> None:
        for n, (l, _, u) in enumerate(self.triples, start=1):
            if l <= 0:
                raise NotHerglotz(f"l_{n} = {l} is not positive")
            if u < 0:
                raise NotHerglotz(f"upsilon_{n} = {u} is negative")


def cf_recursion(cf: ContinuedFraction, kind: str | None = None) -> tuple[list[Poly], list[Poly]]:
    """All prefixes ``p_0..p_N`` and ``q_0..q_N`` of the three-term recursion."""
    if kind is None:
        kind = FLOAT if any(scalar_kind(x) == FLOAT for t in cf.triples for x in t) else EXACT
    z = Poly.z(kind)
    p = [Poly.one(kind)]
    q = [Poly.zero(kind)]
    for l, om, up in cf.triples:
        qn = q[-1] - z * p[-1] * l
        pn = p[-1] + Poly([om, up], kind) * qn
        q.append(qn)
        p.append(pn)
    return p, q


def cf_reconstruct(cf: ContinuedFraction, kind: str | None = None) -> tuple[Poly, Poly]:
    p, q = cf_recursion(cf, kind)
    return p[-1], q[-1]


def _float_tolerances():
    # context precision drives both the trimming threshold and breakdown checks
    eps = mpfr(2) ** (-mpfr(mpfr(1).precision))
    return eps ** mpfr(0.75), eps ** mpfr(0.5)


def cf_expand(m: HerglotzRational | tuple, residual_tol=1e-9) -> ContinuedFraction:
    """Continued-fraction triples of ``m``, emitted innermost first.

    ``m`` may also be a cleared pair ``(P, Q)``.  Each round peels the
    polynomial part ``omega + upsilon*z`` of ``P/Q``, inverts the rest, peels
    the slope ``l*z`` and inverts again; the round that meets a function
    with a single pole (necessarily at zero) closes the expansion.
    """
    P0, Q0 = m.rational_form() if isinstance(m, HerglotzRational) else m
    kind = FLOAT if FLOAT in (P0.kind, Q0.kind) else EXACT
    npoles = Q0.degree
    trim_tol, neg_tol = _float_tolerances() if kind == FLOAT else (0, 0)

    def tidy(p: Poly) -> Poly:
        return p.trim(trim_tol) if kind == FLOAT else p

    P, Q = P0, Q0
    out = []
    for _ in range(2 * npoles + 2):
        if Q.degree < 1 or (Q.coeff(0) != 0 and kind == EXACT):
            raise NotHerglotz("current function has no pole at zero")
        affine, R = divmod(P, Q)
        R = tidy(R)
        if affine.degree > 1:
            raise NotHerglotz("polynomial part has degree above one")
        omega, upsilon = affine.coeff(0), affine.coeff(1)
        if upsilon < -neg_tol * max(abs(omega), 1):
            raise NotHerglotz(f"negative slope {upsilon} in polynomial part")
        if R.is_zero():
            raise ZeroRemainderUnexpected("no pole left after removing the polynomial part")
        if Q.degree == 1:
            if R.degree != 0:
                raise NotHerglotz("single-pole remainder is not a constant")
            l = -Q.lead / R.coeff(0)
            if l <= 0:
                raise NotHerglotz(f"pole at zero has the wrong sign (l = {l})")
            out.append((l, omega, upsilon))
            break
        b, R2 = divmod(-Q, R)
        R2 = tidy(R2)
        if b.degree != 1:
            raise NotHerglotz("inverted remainder is not asymptotically linear")
        l, c = b.coeff(1), b.coeff(0)
        if l <= 0:
            raise NotHerglotz(f"non-positive slope l = {l}")
        out.append((l, omega, upsilon))
        P, Q = -R, tidy(R * c + R2)
        if kind == FLOAT and Q.degree >= 0:
            # the new denominator vanishes at zero in exact arithmetic
            Q = Poly((0,) + Q.coeffs[1:], FLOAT)
    else:
        raise NotHerglotz("iteration cap reached without a terminating expansion")
    cf = ContinuedFraction(tuple(reversed(out)))

    p, q = cf_reconstruct(cf, kind)
    lhs, rhs = P0 * q, Q0 * p
    if kind == EXACT:
        if lhs != rhs:
            raise NotHerglotz("reconstruction does not reproduce the input")
        return cf
    diff = (lhs - rhs).max_abs()
    scale = max(lhs.max_abs(), rhs.max_abs())
    res = diff / scale if scale else diff
    if res > residual_tol:
        raise NotHerglotz(f"float expansion broke down (relative residual {res})")
    return ContinuedFraction(cf.triples, residual=res)
