import random

import pytest
from gmpy2 import mpfr, mpq

from couplingkit.algebra import Poly, precision
from couplingkit.coupling import disk_grid, grid_distance, is_admissible
from couplingkit.errors import BudgetExhausted, OutOfInterval
from couplingkit.instances import random_string
from couplingkit.string_app import (
    DiscreteString,
    direct_moment,
    normalized_pair,
    string_eta,
    string_moment,
    string_recover,
    string_solution,
    string_spectrum,
    string_wronskian,
)

TWO = DiscreteString((mpq(1, 3), mpq(2, 3)), (mpq(1), mpq(1)))
ONE = DiscreteString((mpq(1, 2),), (mpq(1),))


def test_wronskian_examples():
    W, phi, psi = string_wronskian(TWO)
    assert W == Poly([1, mpq(-4, 9), mpq(1, 27)])
    m, x1 = mpq(3), mpq(1, 5)
    W1, _, _ = string_wronskian(DiscreteString((x1,), (m,)))
    assert W1 == Poly([1, -m * x1 * (1 - x1)])
    for x in (mpq(1, 7), mpq(1, 2), mpq(9, 10)):
        assert phi(x)[0].coeff(0) == x and psi(x)[0].coeff(0) == 1 - x


def test_wronskian_independent_of_x():
    W, phi, psi = string_wronskian(TWO)
    for x in (mpq(1, 10), mpq(1, 2), mpq(3, 4)):
        f, df = phi(x)
        g, dg = psi(x)
        assert g * df - dg * f == W


def test_spectrum_examples():
    d = string_spectrum(TWO)
    assert d.eigenvalues == (3, 9) and d.norming == (mpq(2, 3), 2)
    d = string_spectrum(ONE)
    assert d.eigenvalues == (4,) and d.norming == (1,)


def test_spectrum_scaling():
    s = DiscreteString((mpq(1, 5), mpq(1, 2), mpq(4, 5)), (mpq(2), mpq(1, 2), mpq(1)))
    c = 3
    a = string_spectrum(s)
    b = string_spectrum(DiscreteString(s.positions, tuple(c * m for m in s.masses)))
    with precision(256):
        for x, y in zip(a.eigenvalues, b.eigenvalues):
            assert abs(x / c - y) < mpfr(10) ** -60


def test_eta_examples():
    d = string_spectrum(TWO)
    assert string_eta(mpq(1, 2), d).eta == (1, -1)
    assert string_eta(mpq(1, 2), string_spectrum(ONE)).eta == (1,)
    with pytest.raises(OutOfInterval):
        string_eta(mpq(1), d)


def test_moment_examples():
    d = string_spectrum(TWO)
    assert string_moment(mpq(1, 2), d) == mpq(1, 18) == direct_moment(TWO, mpq(1, 2))
    assert string_moment(mpq(1, 4), d) == 0
    x = mpq(1, 3) + mpq(1, 1000)
    assert string_moment(x, d) == (x - mpq(1, 3)) * 1 * mpq(1, 3)


def test_forward_consistency_exact():
    d = string_spectrum(TWO)
    for x in (mpq(1, 5), mpq(1, 2), mpq(5, 6)):
        sol = string_solution(x, d)
        ref = normalized_pair(TWO, x)
        assert sol.phi_minus == ref.phi_minus and sol.phi_plus == ref.phi_plus


def test_forward_consistency_float_and_moment_shape():
    rng = random.Random(8)
    s = random_string(rng, 4)
    d = string_spectrum(s)
    grid = disk_grid(1)
    prev = mpfr(0)
    with precision(256):
        for k in range(1, 20):
            x = mpq(k, 20) + mpq(1, 97)
            assert is_admissible(string_eta(x, d))
            sol = string_solution(x, d)
            assert grid_distance(sol, normalized_pair(s, x), grid) < 1e-40
            m = string_moment(x, d)
            assert abs(m - mpfr(direct_moment(s, x))) < 1e-40
            assert m >= prev - 1e-40
            prev = m


def test_recover_examples():
    for s in (TWO, ONE, DiscreteString((mpq(1, 5), mpq(1, 2), mpq(4, 5)), (mpq(2), mpq(1, 2), mpq(1)))):
        r = string_recover(string_spectrum(s))
        assert len(r) == len(s)
        for a, b in zip(r.positions + r.masses, s.positions + s.masses):
            assert abs(a - mpfr(b)) < 1e-6 * abs(mpfr(b))


def test_recover_budget():
    with pytest.raises(BudgetExhausted):
        string_recover(string_spectrum(TWO), grid_budget=5)


def test_invalid_string():
    with pytest.raises(ValueError):
        DiscreteString((mpq(1, 2), mpq(1, 3)), (1, 1))
    with pytest.raises(ValueError):
        DiscreteString((mpq(1, 2),), (0,))
    with pytest.raises(ValueError):
        DiscreteString((mpq(1),), (1,))
