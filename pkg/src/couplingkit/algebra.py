"""Dense univariate polynomials over exact rationals or binary floats.

Scalars come from gmpy2: ``mpq`` for the exact kind and ``mpfr`` for the
float kind.  Float precision is whatever the active gmpy2 context says; use
:func:`precision` to set it for a block of code.

Root isolation (Sturm sequences plus bisection) is only offered for the
exact kind.  Float polynomials can be lifted to exact ones with
:meth:`Poly.to_exact`, since every ``mpfr`` is a dyadic rational.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import FloatKindUnsupported, UnsortedInput

EXACT = "exact"
FLOAT = "float"

_MPFR = type(mpfr(0))
_MPQ = type(mpq(0))


def precision(bits: int):
    """Context manager running float-kind arithmetic at ``bits`` of precision."""
    return gmpy2.context(gmpy2.get_context(), precision=int(bits))


def scalar_kind(x) -> str:
    if isinstance(x, (_MPFR, float)):
        return FLOAT
    return EXACT


def to_scalar(x, kind: str = EXACT):
    """Convert ``x`` (int, str, Fraction, float, mpq, mpfr) to the given kind."""
    if kind == EXACT:
        if isinstance(x, str):
            return mpq(x.strip())
        if isinstance(x, Fraction):
            return mpq(x.numerator, x.denominator)
        return mpq(x)
    if kind == FLOAT:
        if isinstance(x, str) and "/" in x:
            return mpfr(mpq(x.strip()))
        if isinstance(x, Fraction):
            return mpfr(mpq(x.numerator, x.denominator))
        return mpfr(x)
    raise ValueError(f"unknown scalar kind {kind!r}")


def scalar_to_str(x) -> str:
    """Canonical string: ``"-2/9"`` or ``"3"`` for rationals, decimal digits for floats."""
    if isinstance(x, _MPFR):
        return str(x)
    return str(mpq(x))


@dataclass(frozen=True)
class ComplexPoint:
    """A complex number with exact or float real and imaginary parts."""

    re: object
    im: object

    @classmethod
    def of(cls, z, kind: str | None = None) -> "ComplexPoint":
        if isinstance(z, ComplexPoint):
            return z
        if isinstance(z, complex):
            k = kind or FLOAT
            return cls(to_scalar(z.real, k), to_scalar(z.imag, k))
        if hasattr(z, "real") and hasattr(z, "imag") and type(z).__name__ == "mpc":
            return cls(z.real, z.imag)
        k = kind or scalar_kind(z)
        return cls(to_scalar(z, k), to_scalar(0, k))

    def __add__(self, other):
        if isinstance(other, ComplexPoint):
            return ComplexPoint(self.re + other.re, self.im + other.im)
        return ComplexPoint(self.re + other, self.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoint(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ComplexPoint):
            return ComplexPoint(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return ComplexPoint(self.re * other, self.im * other)

    __rmul__ = __mul__

    def conj(self) -> "ComplexPoint":
        return ComplexPoint(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return gmpy2.sqrt(mpfr(self.abs2()))

    def __truediv__(self, other):
        if isinstance(other, ComplexPoint):
            d = other.abs2()
            n = self * other.conj()
            return ComplexPoint(n.re / d, n.im / d)
        return ComplexPoint(self.re / other, self.im / other)

    def __rtruediv__(self, other):
        return ComplexPoint.of(other, scalar_kind(self.re)) / self

    def __eq__(self, other):
        if not isinstance(other, ComplexPoint):
            other = ComplexPoint.of(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))


class Poly:
    """Immutable dense polynomial, coefficients in ascending degree.

    The zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs", "kind")

    def __init__(self, coeffs: Iterable = (), kind: str | None = None):
        cs = list(coeffs)
        if kind is None:
            kind = FLOAT if any(scalar_kind(c) == FLOAT for c in cs) else EXACT
        cs = [to_scalar(c, kind) for c in cs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # construction helpers
    @classmethod
    def const(cls, c, kind: str | None = None) -> "Poly":
        return cls([c], kind)

    @classmethod
    def one(cls, kind: str = EXACT) -> "Poly":
        return cls([1], kind)

    @classmethod
    def zero(cls, kind: str = EXACT) -> "Poly":
        return cls([], kind)

    @classmethod
    def z(cls, kind: str = EXACT) -> "Poly":
        return cls([0, 1], kind)

    @classmethod
    def from_roots_normalized(cls, roots: Iterable, kind: str | None = None) -> "Poly":
        """prod (1 - z/r) over ``roots``; the constant term is 1."""
        roots = list(roots)
        if kind is None:
            kind = FLOAT if any(scalar_kind(r) == FLOAT for r in roots) else EXACT
        out = cls.one(kind)
        for r in roots:
            r = to_scalar(r, kind)
            out = out * cls([1, -1 / r], kind)
        return out

    # basic queries
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else to_scalar(0, self.kind)

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return to_scalar(0, self.kind)

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"Poly([{', '.join(scalar_to_str(c) for c in self.coeffs)}], {self.kind!r})"

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(other, FLOAT if self.kind == FLOAT else None)

    def _join_kind(self, other: "Poly") -> str:
        return FLOAT if FLOAT in (self.kind, other.kind) else EXACT

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out, self._join_kind(other))

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.kind)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            kind = FLOAT if FLOAT in (self.kind, scalar_kind(other)) else EXACT
            return Poly([c * other for c in self.coeffs], kind)
        if not self.coeffs or not other.coeffs:
            return Poly.zero(self._join_kind(other))
        a, b = self.coeffs, other.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Poly(out, self._join_kind(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Poly):
            q, r = divmod(self, scalar)
            if not r.is_zero():
                raise ArithmeticError("polynomial division leaves a remainder")
            return q
        return Poly([c / scalar for c in self.coeffs], self.kind)

    def __pow__(self, n: int):
        out = Poly.one(self.kind)
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        kind = self._join_kind(other)
        rem = [to_scalar(c, kind) for c in self.coeffs]
        d = other.degree
        lead = other.lead
        if len(rem) - 1 < d:
            return Poly.zero(kind), Poly(rem, kind)
        quot = [to_scalar(0, kind)] * (len(rem) - d)
        for k in range(len(rem) - 1 - d, -1, -1):
            c = rem[k + d] / lead
            quot[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs[:-1]):
                    rem[k + j] = rem[k + j] - c * b
            # the leading term cancels by construction; drop it rather than
            # trusting a float subtraction to produce an exact zero
            rem[k + d] = to_scalar(0, kind)
        return Poly(quot, kind), Poly(rem[:d], kind)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, z):
        return poly_eval(self, z)

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.kind)

    def shift_down(self) -> "Poly":
        """Divide by ``z``, discarding the constant term."""
        return Poly(self.coeffs[1:], self.kind)

    def monic(self) -> "Poly":
        return self / self.lead if self.coeffs else self

    def trim(self, rel_tol) -> "Poly":
        """Drop leading coefficients below ``rel_tol`` times the largest one."""
        if not self.coeffs:
            return self
        scale = max(abs(c) for c in self.coeffs)
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= rel_tol * scale:
            cs.pop()
        return Poly(cs, self.kind)

    def to_float(self) -> "Poly":
        return Poly([mpfr(c) for c in self.coeffs], FLOAT)

    def to_exact(self) -> "Poly":
        """Exact lift: every binary float is a rational number."""
        return Poly([mpq(c) for c in self.coeffs], EXACT)

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=to_scalar(0, self.kind))

    def to_strings(self) -> list[str]:
        return [scalar_to_str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str], kind: str = EXACT) -> "Poly":
        return cls([to_scalar(s, kind) for s in items], kind)


def poly_eval(p: Poly, z):
    """Horner evaluation; ``z`` may be a real scalar, ``complex`` or :class:`ComplexPoint`."""
    if isinstance(z, complex) or type(z).__name__ == "mpc":
        z = ComplexPoint.of(z)
    if isinstance(z, ComplexPoint):
        acc = ComplexPoint.of(to_scalar(0, p.kind), p.kind)
        for c in reversed(p.coeffs):
            acc = acc * z + c
        return acc
    if isinstance(z, (int, Fraction, str)):
        z = to_scalar(z, EXACT)
    elif isinstance(z, float):
        z = mpfr(z)
    acc = to_scalar(0, FLOAT if FLOAT in (p.kind, scalar_kind(z)) else EXACT)
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def poly_derivative(p: Poly) -> Poly:
    return p.derivative()


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the rationals (exact kind only)."""
    if FLOAT in (a.kind, b.kind):
        raise FloatKindUnsupported("gcd needs exact polynomials")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def squarefree_decomposition(p: Poly) -> list[Poly]:
    """Yun's algorithm: ``[f1, f2, ...]`` with p = c * f1 * f2**2 * ..., each fk squarefree."""
    if p.kind != EXACT:
        raise FloatKindUnsupported("square-free decomposition needs exact polynomials")
    if p.degree <= 0:
        return []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    out = []
    while b.degree > 0:
        a = poly_gcd(b, d)
        out.append(a)
        b = b // a
        c = d // a
        d = c - b.derivative()
    # the loop appends one extra trailing constant factor in some cases
    while out and out[-1].degree == 0:
        out.pop()
    return out


def primitive_part(p: Poly) -> Poly:
    """Positive multiple of an exact polynomial with coprime integer coefficients."""
    if p.is_zero():
        return p
    den = 1
    for c in p.coeffs:
        den = gmpy2.lcm(den, mpq(c).denominator)
    ints = [mpq(c).numerator * (den // mpq(c).denominator) for c in p.coeffs]
    g = 0
    for c in ints:
        g = gmpy2.gcd(g, c)
    return Poly([mpq(c // g) for c in ints], EXACT)


def sturm_sequence(p: Poly) -> list[Poly]:
    """Sturm chain of ``p``.

    Every member is rescaled to its primitive part; positive factors leave
    the sign pattern, hence the root counts, unchanged and keep the
    coefficients from blowing up.
    """
    seq = [primitive_part(p), primitive_part(p.derivative())]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(primitive_part(-r))
    return [s for s in seq if not s.is_zero()]


def _int_coeffs(p: Poly) -> tuple:
    return tuple(mpq(c).numerator for c in primitive_part(p).coeffs)


def _sign_at(ints: tuple, x) -> int:
    """Sign of an integer polynomial at a rational, via homogeneous Horner."""
    x = mpq(x)
    a, b = x.numerator, x.denominator
    acc = gmpy2.mpz(0)
    bp = gmpy2.mpz(1)
    for c in reversed(ints):
        acc = acc * a + c * bp
        bp *= b
    # acc equals p(x) * b**deg up to a positive factor
    return (acc > 0) - (acc < 0)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations(signs: Iterable[int]) -> int:
    prev = 0
    count = 0
    for s in signs:
        if s == 0:
            continue
        if prev and s != prev:
            count += 1
        prev = s
    return count


def sign_variations(seq: Sequence[Poly], x) -> int:
    return _variations(_sign(poly_eval(s, x)) for s in seq)


def _int_variations(seq: Sequence[tuple], x) -> int:
    return _variations(_sign_at(s, x) for s in seq)


def sign_variations_at_infinity(seq: Sequence[Poly], positive: bool) -> int:
    signs = []
    for s in seq:
        sg = _sign(s.lead)
        if not positive and s.degree % 2 == 1:
            sg = -sg
        signs.append(sg)
    return _variations(signs)


def cauchy_bound(p: Poly):
    """Every root r satisfies |r| < bound."""
    lead = abs(p.lead)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=mpq(0))


@dataclass(frozen=True)
class RootInterval:
    """Closed rational interval holding exactly one distinct real root.

    ``lo == hi`` means the root is known exactly.  Otherwise the root lies in
    the open interval and neither endpoint is a root, so neighbouring
    intervals may share an endpoint.
    """

    lo: object
    hi: object
    multiplicity: int = 1

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class RealRoots:
    intervals: tuple
    count: int  # real roots counted with multiplicity

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __getitem__(self, i):
        return self.intervals[i]


def _split_point(f: tuple, a, b):
    for num, den in ((1, 2), (3, 7), (4, 7), (2, 5), (3, 5), (1, 3), (2, 3)):
        m = a + (b - a) * mpq(num, den)
        if _sign_at(f, m) != 0:
            return m
    # only reached when f has a root at all seven candidates
    k = 11
    while True:
        m = a + (b - a) * mpq(5, k)
        if _sign_at(f, m) != 0:
            return m
        k += 1


def _isolate_squarefree(f: Poly, prec) -> list[tuple]:
    # split points are never roots, so every emitted interval holds its root
    # strictly inside
    seq = [_int_coeffs(s) for s in sturm_sequence(f)]
    fi = seq[0]
    bound = cauchy_bound(f)
    a, b = -bound, bound
    found = []
    stack = [(a, b, _int_variations(seq, a), _int_variations(seq, b))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1 and b - a <= prec:
            found.append((a, b))
            continue
        m = _split_point(fi, a, b)
        vm = _int_variations(seq, m)
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))
    found.sort(key=lambda iv: iv[0])
    return found


def isolate_real_roots(p: Poly, prec) -> RealRoots:
    """Isolate the distinct real roots of an exact polynomial.

    Returns disjoint intervals of width at most ``prec``, sorted, each with
    the multiplicity of its root.
    """
    if p.kind != EXACT:
        raise FloatKindUnsupported("root isolation needs an exact polynomial; lift with to_exact()")
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    prec = mpq(prec)
    if prec <= 0:
        raise ValueError("prec must be positive")
    if p.degree == 0:
        return RealRoots((), 0)
    factors = squarefree_decomposition(p)
    sqf = Poly.one()
    for f in factors:
        sqf = sqf * f
    out = []
    for lo, hi in _isolate_squarefree(sqf, prec):
        mult = 1
        for k, f in enumerate(factors, start=1):
            fi = _int_coeffs(f)
            if f.degree > 0 and _sign_at(fi, lo) * _sign_at(fi, hi) < 0:
                mult = k
                break
        out.append(RootInterval(lo, hi, mult))
    return RealRoots(tuple(out), sum(iv.multiplicity for iv in out))


def refine_root(p: Poly, iv: RootInterval, width) -> RootInterval:
    """Bisect an isolating interval of a simple root of ``p`` down to ``width``."""
    lo, hi = iv.lo, iv.hi
    if lo == hi:
        return iv
    pi = _int_coeffs(p)
    slo = _sign_at(pi, lo)
    if slo == 0 or _sign_at(pi, hi) == slo:
        # p has an even-multiplicity root here; refine its square-free part
        pi = _int_coeffs(p // poly_gcd(p, p.derivative()))
        slo = _sign_at(pi, lo)
    while hi - lo > width:
        m = (lo + hi) / 2
        sm = _sign_at(pi, m)
        if sm == 0:
            return RootInterval(m, m, iv.multiplicity)
        if sm == slo:
            lo = m
        else:
            hi = m
    return RootInterval(lo, hi, iv.multiplicity)


def real_roots(p: Poly, rel_width=mpq(1, 2**64)) -> list:
    """Distinct real roots of an exact polynomial as rationals (interval midpoints)."""
    iso = isolate_real_roots(p, 1)
    out = []
    for iv in iso:
        scale = max(abs(iv.lo), abs(iv.hi), mpq(1))
        out.append(refine_root(p, iv, rel_width * scale).mid)
    return out


def check_interlacing(roots_a: Sequence, roots_b: Sequence) -> bool:
    """Whether two strictly sorted root lists interlace once common values are removed."""
    for seq in (roots_a, roots_b):
        if any(not (x < y) for x, y in zip(seq, seq[1:])):
            raise UnsortedInput("root sequences must be strictly increasing")
    common = set(roots_a) & set(roots_b)
    tagged = [(x, 0) for x in roots_a if x not in common]
    tagged += [(x, 1) for x in roots_b if x not in common]
    tagged.sort(key=lambda t: t[0])
    return all(s != t for (_, s), (_, t) in zip(tagged, tagged[1:]))


def polys_interlace(num: Poly, den: Poly) -> bool:
    """Interlacing of the real zeros of two exact polynomials after cancelling their gcd.

    Requires both reduced polynomials to be real-rooted with simple roots.
    Isolating intervals are refined until the two root sets are separated,
    so the ordering is certified without any rounding.
    """
    g = poly_gcd(num, den)
    a, b = num // g, den // g
    ivs = []
    for tag, p in ((0, a), (1, b)):
        if p.degree <= 0:
            continue
        iso = isolate_real_roots(p, 1)
        if iso.count != p.degree or any(iv.multiplicity != 1 for iv in iso):
            return False
        ivs.extend((tag, p, iv) for iv in iso)
    while True:
        ivs.sort(key=lambda t: t[2].lo)
        clash = [
            i for i in range(len(ivs) - 1)
            if ivs[i][0] != ivs[i + 1][0] and ivs[i][2].hi >= ivs[i + 1][2].lo
        ]
        if not clash:
            break
        for i in set(clash) | {i + 1 for i in clash}:
            tag, p, iv = ivs[i]
            ivs[i] = (tag, p, refine_root(p, iv, iv.width / 4))
    tags = [t for t, _, _ in ivs]
    return all(s != t for s, t in zip(tags, tags[1:]))
