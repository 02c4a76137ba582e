import random

import pytest
from gmpy2 import mpfr, mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from couplingkit.algebra import (
    EXACT,
    FLOAT,
    ComplexPoint,
    Poly,
    check_interlacing,
    isolate_real_roots,
    poly_derivative,
    poly_eval,
    poly_gcd,
    polys_interlace,
    precision,
    real_roots,
    refine_root,
    scalar_to_str,
    sturm_sequence,
    sign_variations_at_infinity,
)
from couplingkit.errors import FloatKindUnsupported, UnsortedInput

W2 = Poly([1, mpq(-4, 9), mpq(1, 27)])

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12).map(lambda f: mpq(f.numerator, f.denominator))


def test_eval_examples():
    assert poly_eval(Poly([1, -1]), mpq(1)) == 0
    assert poly_eval(W2, mpq(3)) == 0
    assert poly_eval(Poly.one(), ComplexPoint(mpq(0), mpq(1))) == ComplexPoint(mpq(1), mpq(0))


def test_derivative_examples():
    assert poly_derivative(Poly([1, -1])) == Poly.const(-1)
    d = poly_derivative(W2)
    assert d == Poly([mpq(-4, 9), mpq(2, 27)])
    assert d(mpq(3)) == mpq(-2, 9)
    assert poly_derivative(Poly.one()).is_zero()


def test_zero_polynomial_is_empty():
    z = Poly([0, 0, 0])
    assert z.is_zero() and z.coeffs == () and z.degree == -1
    assert Poly([1, 2, 0]).degree == 1


def test_exact_rationals_lowest_terms():
    p = Poly([mpq(2, 4), mpq(-6, 3)])
    assert p.to_strings() == ["1/2", "-2"]
    assert scalar_to_str(mpq(-2, 9)) == "-2/9"


def test_divmod_and_gcd():
    a = Poly.from_roots_normalized([mpq(1), mpq(2), mpq(5)])
    b = Poly.from_roots_normalized([mpq(2), mpq(7)])
    q, r = divmod(a * b + Poly([1, 1]), b)
    assert q * b + r == a * b + Poly([1, 1]) and r.degree < b.degree
    g = poly_gcd(a, b)
    assert g == Poly([-2, 1])


def test_isolate_two_mass_wronskian():
    iso = isolate_real_roots(W2, mpq(1, 100))
    assert iso.count == 2
    assert [iv.contains(mpq(r)) for iv, r in zip(iso, (3, 9))] == [True, True]
    assert all(iv.width <= mpq(1, 100) for iv in iso)


def test_isolate_simple_and_double():
    iso = isolate_real_roots(Poly([1, -1]), 1)
    assert len(iso) == 1 and iso[0].contains(mpq(1))
    iso = isolate_real_roots(Poly([1, -1]) ** 2, 1)
    assert len(iso) == 1 and iso[0].multiplicity == 2 and iso[0].contains(mpq(1))


def test_isolate_refuses_floats():
    with pytest.raises(FloatKindUnsupported):
        isolate_real_roots(Poly([mpfr(1), mpfr(-1)], FLOAT), 1)


def test_refine_root_width():
    iv = isolate_real_roots(Poly([-2, 0, 1]), 1)[1]
    fine = refine_root(Poly([-2, 0, 1]), iv, mpq(1, 2**60))
    assert fine.width <= mpq(1, 2**60)
    assert fine.lo ** 2 < 2 < fine.hi ** 2


def test_interlacing_examples():
    assert check_interlacing([0, 9], [3])
    assert not check_interlacing([1, 2], [3, 4])
    assert check_interlacing([1], [])
    with pytest.raises(UnsortedInput):
        check_interlacing([2, 1], [])


def test_polys_interlace_cancels_common_root():
    num = Poly.z() * Poly([1, mpq(-1, 9)]) ** 2
    assert polys_interlace(num, W2)


def test_complex_point_arithmetic():
    a = ComplexPoint(mpq(1), mpq(2))
    b = ComplexPoint(mpq(3), mpq(-1))
    assert a * b == ComplexPoint(mpq(5), mpq(5))
    assert (a / b) * b == a
    assert complex(a.conj()) == complex(1, -2)


@settings(max_examples=60, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=5), st.lists(rationals, min_size=1, max_size=5), rationals, rationals)
def test_eval_is_multiplicative(a, b, re, im):
    p, q = Poly(a), Poly(b)
    z = ComplexPoint(re, im)
    assert poly_eval(p * q, z) == poly_eval(p, z) * poly_eval(q, z)


@settings(max_examples=40, deadline=None)
@given(st.sets(rationals.filter(lambda x: x != 0), min_size=1, max_size=7))
def test_isolation_recovers_linear_factors(roots):
    p = Poly.from_roots_normalized(sorted(roots))
    iso = isolate_real_roots(p, mpq(1, 1000))
    assert iso.count == p.degree == len(roots)
    for iv, r in zip(iso, sorted(roots)):
        assert iv.contains(r) and iv.width <= mpq(1, 1000)
    # Sturm count over the whole line equals the degree
    seq = sturm_sequence(p)
    assert sign_variations_at_infinity(seq, False) - sign_variations_at_infinity(seq, True) == len(roots)


def test_real_roots_midpoints_close():
    rng = random.Random(3)
    roots = sorted({mpq(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(6)} - {0})
    got = real_roots(Poly.from_roots_normalized(roots))
    assert all(abs(g - r) < mpq(1, 2**50) for g, r in zip(got, roots))


def test_float_kind_precision_context():
    with precision(200):
        p = Poly([mpfr(1), mpfr(1) / 3], FLOAT)
        assert p.coeff(1).precision == 200
    assert p.kind == FLOAT and Poly([1]).kind == EXACT
