"""Reproducible instance generators used by the tests, the CLI and the demos."""
from __future__ import annotations

import random

from gmpy2 import mpq

from .ch_app import Multipeakon
from .coupling import INF, CouplingData, lambda_w_prime
from .string_app import DiscreteString


def _rational(rng: random.Random, lo: int = 1, hi: int = 20, den: int = 8):
    return mpq(rng.randint(lo, hi * den), rng.randint(1, den))


def random_admissible(rng: random.Random, n: int, degenerate: bool = False) -> CouplingData:
    """Admissible exact data with ``n`` points of alternating sign, sorted by modulus.

    With ``degenerate`` some entries become zero or infinite.
    """
    mags: set = set()
    while len(mags) < n:
        mags.add(_rational(rng))
    sign = rng.choice((1, -1))
    sigma = []
    for k, m in enumerate(sorted(mags)):
        sigma.append(m * sign * (-1) ** k)
    eta = []
    for lam in sigma:
        roll = rng.random() if degenerate else 1.0
        if roll < 0.15:
            eta.append(mpq(0))
        elif roll < 0.3:
            eta.append(INF)
        else:
            s = 1 if lambda_w_prime(sigma, lam) < 0 else -1
            eta.append(s * _rational(rng, 1, 5, 6))
    return CouplingData(tuple(sigma), tuple(eta))


def geometric_instance(n: int = 12) -> list:
    """``(2^j, (-1)^(j+1))`` for ``j = 1..n``; admissible at every truncation."""
    return [(mpq(2) ** j, mpq((-1) ** (j + 1))) for j in range(1, n + 1)]


def random_string(rng: random.Random, n: int) -> DiscreteString:
    """Positions on a 1/40 lattice, masses in [1/4, 4] on a 1/8 lattice."""
    cells = sorted(rng.sample(range(1, 40), n))
    return DiscreteString(
        tuple(mpq(c, 40) for c in cells),
        tuple(mpq(rng.randint(2, 32), 8) for _ in range(n)),
    )


def random_multipeakon(rng: random.Random, n: int) -> Multipeakon:
    q = sorted(rng.sample(range(-40, 41), n))
    return Multipeakon(tuple(mpq(v, 10) for v in q), tuple(mpq(rng.randint(2, 20), 10) for _ in range(n)))


def stability_schedule(seed: int, size: int = 5, steps: int = 12) -> tuple[CouplingData, list]:
    """Admissible limit data plus perturbations ``eta_k = eta * (1 + e_j 2^-k)``.

    The factors stay positive, so every ``eta_k`` is admissible, and the
    perturbation shrinks geometrically in ``k``.
    """
    rng = random.Random(seed)
    data = random_admissible(rng, size)
    offsets = [mpq(rng.randint(-4, 4), 8) for _ in range(size)]
    seq = []
    for k in range(1, steps + 1):
        eta = tuple(e * (1 + o / mpq(2) ** k) for e, o in zip(data.eta, offsets))
        seq.append(CouplingData(data.sigma, eta))
    return data, seq
