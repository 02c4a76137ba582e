"""The coupling problem on a finite spectrum.

Given nonzero reals ``sigma`` and coupling constants ``eta`` (finite values or
:data:`INF`), find polynomials ``phi_minus``, ``phi_plus`` with

* ``phi_minus(lam) == eta(lam) * phi_plus(lam)`` on ``sigma``
  (``phi_plus(lam) == 0`` where ``eta`` is infinite),
* ``z * phi_minus * phi_plus / W`` a Herglotz-Nevanlinna function, where
  ``W(z) = prod (1 - z/lam)``,
* ``phi_minus(0) == phi_plus(0) == 1``.

:func:`solve_strict` handles finite nonzero data through a continued
fraction of an auxiliary Herglotz function; :func:`solve` first factors out
the zero and infinite entries (:func:`reduce`).  :func:`verify` checks a
candidate pair against all three conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpfr, mpq

from .algebra import (
    EXACT,
    FLOAT,
    ComplexPoint,
    Poly,
    isolate_real_roots,
    poly_eval,
    poly_gcd,
    polys_interlace,
    real_roots,
    scalar_kind,
    to_scalar,
)
from .errors import (
    BudgetExhausted,
    HasZeroOrInfiniteEta,
    InternalConsistency,
    NotAdmissible,
)
from .herglotz import ContinuedFraction, HerglotzRational, cf_expand, cf_recursion


class _Infinity:
    """The point at infinity of the extended real line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


@dataclass(frozen=True)
class CouplingData:
    """Spectrum ``sigma`` (sorted, nonzero, distinct) with positional ``eta``."""

    sigma: tuple
    eta: tuple
    kind: str = ""

    def __post_init__(self):
        if len(self.sigma) != len(self.eta):
            raise ValueError("sigma and eta must have the same length")
        kind = self.kind
        if not kind:
            vals = list(self.sigma) + [e for e in self.eta if not is_inf(e)]
            kind = FLOAT if any(scalar_kind(v) == FLOAT for v in vals) else EXACT
        pairs = []
        for lam, e in zip(self.sigma, self.eta):
            lam = to_scalar(lam, kind)
            if lam == 0:
                raise ValueError("sigma must not contain zero")
            pairs.append((lam, e if is_inf(e) else to_scalar(e, kind)))
        pairs.sort(key=lambda t: t[0])
        lams = [lam for lam, _ in pairs]
        if any(a == b for a, b in zip(lams, lams[1:])):
            raise ValueError("sigma must not contain duplicates")
        object.__setattr__(self, "sigma", tuple(lams))
        object.__setattr__(self, "eta", tuple(e for _, e in pairs))
        object.__setattr__(self, "kind", kind)

    @classmethod
    def from_pairs(cls, pairs: Iterable, kind: str = "") -> "CouplingData":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), kind)

    def __len__(self):
        return len(self.sigma)

    def items(self):
        return zip(self.sigma, self.eta)

    def eta_at(self, lam):
        return self.eta[self.sigma.index(lam)]


@dataclass
class SolverTrace:
    cf: ContinuedFraction | None = None
    n0: int | None = None
    delta: object = None
    reduction: tuple = ((), ())  # (sigma_minus, sigma_plus)
    residuals: dict = field(default_factory=dict)
    p: list = field(default_factory=list, repr=False)
    q: list = field(default_factory=list, repr=False)
    r: list = field(default_factory=list, repr=False)
    s: list = field(default_factory=list, repr=False)


@dataclass
class SolutionPair:
    phi_minus: Poly
    phi_plus: Poly
    trace: SolverTrace | None = None

    def __iter__(self):
        return iter((self.phi_minus, self.phi_plus))

    def same_as(self, other: "SolutionPair") -> bool:
        return self.phi_minus == other.phi_minus and self.phi_plus == other.phi_plus


@dataclass(frozen=True)
class NoSolution:
    """Outcome of :func:`solve_general` when the data admit no solution."""

    rho: tuple
    failing: tuple  # points of rho where phi_plus of the zeroed problem does not vanish
    values: tuple = ()


def build_W(sigma: Sequence, kind: str | None = None) -> Poly:
    return Poly.from_roots_normalized(sigma, kind or (FLOAT if any(scalar_kind(s) == FLOAT for s in sigma) else EXACT))


def lambda_w_prime(sigma: Sequence, lam):
    """``lam * W'(lam)`` for ``lam`` in ``sigma``, from the product form."""
    out = to_scalar(-1, scalar_kind(lam))
    for kappa in sigma:
        if kappa != lam:
            out = out * (1 - lam / kappa)
    return out


def admissibility_ratios(data: CouplingData) -> list:
    """``eta(lam) / (lam W'(lam))`` per point, ``None`` where eta is infinite."""
    return [
        None if is_inf(e) else e / lambda_w_prime(data.sigma, lam)
        for lam, e in data.items()
    ]


def is_admissible(data: CouplingData) -> bool:
    return all(r is None or r <= 0 for r in admissibility_ratios(data))


def _float_tol():
    eps = mpfr(2) ** (-mpfr(mpfr(1).precision))
    return gmpy2.sqrt(eps)


def _close(a, b, tol, scale=1) -> bool:
    if tol == 0:
        return a == b
    return abs(a - b) <= tol * max(abs(scale), abs(a), abs(b), 1)


def _poly_close(a: Poly, b: Poly, tol) -> bool:
    if tol == 0:
        return a == b
    d = (a - b).max_abs()
    return d <= tol * max(a.max_abs(), b.max_abs(), 1)


def step1_function(data: CouplingData) -> HerglotzRational:
    """The auxiliary function ``-1/(2z) - 1/2 sum eta/(lam W'(lam)) / (lam - z)``."""
    poles = []
    for lam, e in data.items():
        w = -e / (2 * lambda_w_prime(data.sigma, lam))
        poles.append((lam, w))
    return HerglotzRational(0, 0, mpq(1, 2), tuple(poles), kind=data.kind)


def _pick_pivot(ls: Sequence) -> tuple[int, object]:
    total = 0
    for n, l in enumerate(ls, start=1):
        prev = total
        total = total + l
        if prev <= 1 < total:
            return n, total - 1
    raise InternalConsistency(f"slopes sum to {total}, expected 2")


def solve_strict(data: CouplingData) -> SolutionPair:
    """Solve for finite, nonzero, admissible ``eta``."""
    if not is_admissible(data):
        raise NotAdmissible("coupling constants are not admissible")
    if any(is_inf(e) or e == 0 for e in data.eta):
        raise HasZeroOrInfiniteEta("zero or infinite coupling constants; use solve()")
    kind = data.kind
    tol = _float_tol() if kind == FLOAT else 0
    trace = SolverTrace()

    m = step1_function(data)
    cf = cf_expand(m)
    trace.cf = cf
    N = len(cf)
    p, q = cf_recursion(cf, kind)
    W = build_W(data.sigma, kind)
    z = Poly.z(kind)

    two_zw = z * W * 2
    if not _poly_close(-q[N], two_zw, tol):
        raise InternalConsistency("-q_N differs from 2 z W")
    for lam, e in data.items():
        if not _close(poly_eval(p[N], lam), -e, tol):
            raise InternalConsistency(f"p_N({lam}) differs from -eta")

    r = [None] * (N + 1)
    s = [None] * (N + 1)
    r[N] = Poly.const(-1, kind)
    s[N] = Poly.zero(kind)
    for n in range(N - 1, -1, -1):
        l, om, up = cf.triples[n]
        r[n] = r[n + 1] - Poly([om, up], kind) * s[n + 1]
        s[n] = s[n + 1] + z * r[n] * l

    n0, delta = _pick_pivot(cf.l)
    trace.n0, trace.delta = n0, delta
    trace.p, trace.q, trace.r, trace.s = p, q, r, s

    minus_z_phim = q[n0] + z * p[n0 - 1] * delta
    minus_z_phip = s[n0] + z * r[n0 - 1] * delta
    for name, poly in (("phi_minus", minus_z_phim), ("phi_plus", minus_z_phip)):
        c0 = poly.coeff(0)
        if not _close(c0, 0, tol, poly.max_abs()):
            raise InternalConsistency(f"{name}: assembled polynomial is not divisible by z")
    phim = -minus_z_phim.shift_down()
    phip = -minus_z_phip.shift_down()

    if kind == FLOAT:
        trace.residuals = {
            "sum_l": abs(sum(cf.l) - 2),
            "q_N": (q[N] + two_zw).max_abs() / max(two_zw.max_abs(), 1),
            "cf": cf.residual,
            "normalization": max(abs(phim.coeff(0) - 1), abs(phip.coeff(0) - 1)),
        }
    return SolutionPair(phim, phip, trace)


def reduce(data: CouplingData) -> tuple[CouplingData, Poly, Poly]:
    """Strip zero and infinite coupling constants.

    Returns the reduced data on the remaining points together with
    ``prod (1 - z/kappa)`` over the zero points (``factor_minus``) and over the
    infinite points (``factor_plus``).
    """
    kind = data.kind
    sig_minus = [lam for lam, e in data.items() if not is_inf(e) and e == 0]
    sig_plus = [lam for lam, e in data.items() if is_inf(e)]
    kept = []
    for lam, e in data.items():
        if is_inf(e) or e == 0:
            continue
        for kappa in sig_minus:
            e = e / (1 - lam / kappa)
        for kappa in sig_plus:
            e = e * (1 - lam / kappa)
        kept.append((lam, e))
    reduced = CouplingData.from_pairs(kept, kind)
    return reduced, Poly.from_roots_normalized(sig_minus, kind), Poly.from_roots_normalized(sig_plus, kind)


def solve(data: CouplingData) -> SolutionPair:
    """The unique solution for admissible data."""
    if not is_admissible(data):
        raise NotAdmissible("coupling constants are not admissible")
    reduced, fm, fp = reduce(data)
    sol = solve_strict(reduced)
    trace = sol.trace
    trace.reduction = (
        tuple(lam for lam, e in data.items() if not is_inf(e) and e == 0),
        tuple(lam for lam, e in data.items() if is_inf(e)),
    )
    return SolutionPair(sol.phi_minus * fm, sol.phi_plus * fp, trace)


def solve_general(data: CouplingData):
    """Solve without assuming admissibility; returns :class:`NoSolution` when unsolvable.

    Points where the admissibility inequality fails strictly are given the
    coupling constant zero; the original problem is solvable exactly when
    ``phi_plus`` of that modified problem vanishes at all of them.
    """
    ratios = admissibility_ratios(data)
    rho = tuple(lam for lam, r in zip(data.sigma, ratios) if r is not None and r > 0)
    if not rho:
        return solve(data)
    zeroed = CouplingData(
        data.sigma,
        tuple(to_scalar(0, data.kind) if lam in rho else e for lam, e in data.items()),
        data.kind,
    )
    sol = solve(zeroed)
    tol = _float_tol() if data.kind == FLOAT else 0
    bad, vals = [], []
    for lam in rho:
        v = poly_eval(sol.phi_plus, lam)
        if not _close(v, 0, tol, _bound_at(data.sigma, lam)):
            bad.append(lam)
            vals.append(v)
    if bad:
        return NoSolution(rho, tuple(bad), tuple(vals))
    return sol


# ---------------------------------------------------------------- verification

@dataclass
class VerifyOptions:
    sample_count: int = 64
    tol: float = 1e-12  # relative, float kind only
    bound_tol: float = 1e-20


@dataclass
class VerificationReport:
    checks: dict  # C, G, N, bound, residue_signs -> bool
    subchecks: dict  # parts of G -> bool
    failures: dict  # check name -> list of detail dicts

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def sample_points(n: int, radius) -> list:
    """``n`` rational points of the upper half-disk of the given radius (Halton sequence)."""
    from scipy.stats import qmc

    gen = qmc.Halton(d=2, scramble=False)
    radius = mpq(radius)
    pts = []
    while len(pts) < n:
        for u, v in gen.random(2 * n):
            if v <= 0:
                continue
            re = radius * (2 * mpq(u) - 1)
            im = radius * mpq(v)
            if re * re + im * im <= radius * radius:
                pts.append(ComplexPoint(re, im))
                if len(pts) == n:
                    break
    return pts


def _bound_at(sigma, z) -> object:
    az = abs(z) if isinstance(z, ComplexPoint) else abs(mpfr(z))
    out = mpfr(1)
    for lam in sigma:
        out = out * (1 + az / abs(mpfr(lam)))
    return out


def _approx_interlace(a: list, b: list, tol) -> bool:
    a, b = sorted(a), sorted(b)
    for x in list(b):
        for y in a:
            if abs(x - y) <= tol * max(1, abs(x)):
                a.remove(y)
                b.remove(x)
                break
    for seq in (a, b):
        if any(abs(y - x) <= tol * max(1, abs(x)) for x, y in zip(seq, seq[1:])):
            return False
    tagged = sorted([(x, 0) for x in a] + [(x, 1) for x in b], key=lambda t: t[0])
    return all(s != t for (_, s), (_, t) in zip(tagged, tagged[1:]))


def _real_rooted(p: Poly) -> bool:
    if p.is_zero():
        return False
    if p.degree <= 0:
        return True
    iso = isolate_real_roots(p.to_exact() if p.kind == FLOAT else p, 1)
    return iso.count == p.degree


def verify(data: CouplingData, pair: SolutionPair, opts: VerifyOptions | None = None) -> VerificationReport:
    """Check a candidate pair against the coupling, positivity and normalization conditions."""
    opts = opts or VerifyOptions()
    phim, phip = pair.phi_minus, pair.phi_plus
    kind = FLOAT if FLOAT in (data.kind, phim.kind, phip.kind) else EXACT
    tol = mpfr(opts.tol) if kind == FLOAT else 0
    sigma = data.sigma
    W = build_W(sigma, kind)
    z = Poly.z(kind)
    failures: dict = {}

    def fail(name, **info):
        failures.setdefault(name, []).append({k: str(v) for k, v in info.items()})

    # (C)
    for lam, e in data.items():
        vm, vp = poly_eval(phim, lam), poly_eval(phip, lam)
        scale = _bound_at(sigma, lam)
        if is_inf(e):
            if not _close(vp, 0, tol, scale):
                fail("C", lam=lam, phi_minus=vm, eta=e, phi_plus=vp)
        elif not _close(vm, e * vp, tol, scale * max(1, abs(e))):
            fail("C", lam=lam, phi_minus=vm, eta=e, phi_plus=vp, eta_phi_plus=e * vp)

    # (N)
    for name, p in (("phi_minus", phim), ("phi_plus", phip)):
        if not _close(poly_eval(p, to_scalar(0, kind)), 1, tol):
            fail("N", function=name, value=poly_eval(p, to_scalar(0, kind)))

    # (G), structural part
    sub = {}
    num = z * phim * phip
    rooted = True
    for name, p in (("phi_minus", phim), ("phi_plus", phip)):
        if not _real_rooted(p):
            rooted = False
            fail("G", part="real_roots", function=name)
    sub["real_roots"] = rooted

    residues_ok = True
    for lam in sigma:
        w1 = lambda_w_prime(sigma, lam) / lam  # W'(lam)
        res = lam * poly_eval(phim, lam) * poly_eval(phip, lam) / w1
        scale = abs(lam / w1) * _bound_at(sigma, lam) ** 2
        if res > tol * scale:
            residues_ok = False
            fail("G", part="residues", lam=lam, residue=res)
    sub["residues"] = residues_ok

    if kind == EXACT and not num.is_zero():
        g = poly_gcd(num, W)
        quot, _ = divmod(num // g, W // g)
    else:
        quot, _ = divmod(num, W)
    affine_ok = quot.degree <= 1 and quot.coeff(1) >= -tol * max(1, abs(quot.coeff(0)))
    if not affine_ok:
        fail("G", part="polynomial_part", quotient=quot)
    sub["polynomial_part"] = affine_ok

    if num.is_zero():
        inter = False
    elif kind == EXACT:
        inter = polys_interlace(num, W)
    elif rooted:
        roots_num = [mpq(0)]
        for p in (phim, phip):
            if p.degree > 0:
                roots_num += real_roots(p.to_exact())
        inter = _approx_interlace([mpfr(x) for x in roots_num], [mpfr(x) for x in sigma], mpfr(opts.tol) ** 0.5)
    else:
        inter = False
    if not inter:
        fail("G", part="interlacing")
    sub["interlacing"] = inter

    # (G) sampled, and the growth bound at the same points
    radius = 2 * max((abs(mpq(lam)) for lam in sigma), default=mpq(1))
    pts = sample_points(opts.sample_count, radius)
    samples_ok = True
    bound_ok = True
    with gmpy2.context(gmpy2.get_context(), precision=max(128, gmpy2.get_context().precision)):
        for zp in pts:
            zk = zp if kind == EXACT else ComplexPoint(mpfr(zp.re), mpfr(zp.im))
            nv = poly_eval(num, zk)
            wv = poly_eval(W, zk)
            im_part = (nv * wv.conj()).im  # same sign as Im(num / W)
            if kind == EXACT:
                if im_part < 0:
                    samples_ok = False
                    fail("G", part="samples", z=complex(zp), im=im_part)
            else:
                f = nv / wv
                if f.im < -tol * max(1, abs(f)):
                    samples_ok = False
                    fail("G", part="samples", z=complex(zp), im=f.im)
            b = _bound_at(sigma, zp)
            for name, p in (("phi_minus", phim), ("phi_plus", phip)):
                v = abs(poly_eval(p, ComplexPoint(mpfr(zp.re), mpfr(zp.im))))
                if v > b * (1 + mpfr(opts.bound_tol) + (tol if kind == FLOAT else 0)):
                    bound_ok = False
                    fail("bound", z=complex(zp), function=name, value=v, bound=b)
    sub["samples"] = samples_ok

    # residue sign consequence at finite eta
    for lam, e in data.items():
        if is_inf(e):
            continue
        val = e * poly_eval(phip, lam) ** 2 / lambda_w_prime(sigma, lam)
        scale = max(1, abs(e)) * _bound_at(sigma, lam) ** 2
        if val > tol * scale:
            fail("residue_signs", lam=lam, value=val)

    checks = {
        "C": "C" not in failures,
        "G": all(sub.values()),
        "N": "N" not in failures,
        "bound": bound_ok,
        "residue_signs": "residue_signs" not in failures,
    }
    return VerificationReport(checks, sub, failures)


# ---------------------------------------------------------------- truncation

def disk_grid(radius=1, n: int = 32) -> list:
    """``n`` equally spaced points on the circle of the given radius.

    By the maximum principle the largest difference of two polynomials on
    the closed disk is attained on its boundary.
    """
    r = mpfr(radius)
    out = []
    for j in range(n):
        t = 2 * gmpy2.const_pi() * j / n
        out.append(ComplexPoint(r * gmpy2.cos(t), r * gmpy2.sin(t)))
    return out


def grid_distance(a: SolutionPair, b: SolutionPair, grid: Sequence) -> object:
    best = mpfr(0)
    for zp in grid:
        for pa, pb in ((a.phi_minus, b.phi_minus), (a.phi_plus, b.phi_plus)):
            d = abs(poly_eval(pa - pb, zp))
            if d > best:
                best = d
    return best


@dataclass
class TruncationResult:
    pair: SolutionPair
    discrepancy: object  # last grid discrepancy, None after a single step
    history: list  # discrepancies between successive truncations
    radii: list  # truncation radius of every solved step
    converged: bool
    exhausted: bool  # the last step used all of the supplied data


def solve_truncated(
    full: Sequence,
    radius_schedule: Sequence | None = None,
    tol=1e-8,
    budget: int = 64,
    grid_radius=1,
    grid_points: int = 32,
) -> TruncationResult:
    """Solve ``sigma ∩ [-k, k]`` for growing ``k`` until the solutions settle.

    ``full`` holds ``(lam, eta)`` pairs.  The run stops once the largest
    change of either function on a ``grid_points`` circle of radius
    ``grid_radius`` drops below ``tol``; locally uniform convergence comes
    with no rate, so this stopping rule is a heuristic.
    """
    full = sorted(full, key=lambda t: abs(mpfr(t[0])))
    if radius_schedule is None:
        radius_schedule = sorted({abs(mpq(lam)) if scalar_kind(lam) == EXACT else abs(lam) for lam, _ in full})
    grid = disk_grid(grid_radius, grid_points)
    infinite_tol = isinstance(tol, float) and math.isinf(tol)

    history, radii = [], []
    prev = None
    prev_count = -1
    steps = 0
    for R in radius_schedule:
        part = [(lam, e) for lam, e in full if abs(lam) <= R]
        if len(part) == prev_count:
            continue
        if steps >= budget:
            raise BudgetExhausted(f"no convergence within {budget} truncations (last discrepancy {history[-1] if history else None})")
        prev_count = len(part)
        data = CouplingData.from_pairs(part)
        pair = solve(data)
        steps += 1
        radii.append(R)
        exhausted = len(part) == len(full)
        if prev is None:
            if infinite_tol or exhausted:
                return TruncationResult(pair, None, history, radii, True, exhausted)
            prev = pair
            continue
        d = grid_distance(pair, prev, grid)
        history.append(d)
        prev = pair
        if d < tol or exhausted:
            return TruncationResult(pair, d, history, radii, d < tol, exhausted)
    if prev is None:
        return TruncationResult(SolutionPair(Poly.one(), Poly.one()), None, history, radii, True, True)
    raise BudgetExhausted(f"radius schedule ended before convergence (last discrepancy {history[-1] if history else None})")


def stability_distances(limit: CouplingData, sequence: Sequence, radius=1, grid_points: int = 32) -> list:
    """Grid distance from ``solve(limit)`` to the solution for each data set in ``sequence``."""
    grid = disk_grid(radius, grid_points)
    target = solve(limit)
    return [grid_distance(solve(d), target, grid) for d in sequence]
