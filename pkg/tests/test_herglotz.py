import random

import pytest
from gmpy2 import mpfr, mpq

from couplingkit.algebra import ComplexPoint, Poly, poly_eval, precision
from couplingkit.errors import NotHerglotz, PoleHit
from couplingkit.herglotz import (
    ContinuedFraction,
    HerglotzRational,
    cf_expand,
    cf_reconstruct,
    cf_recursion,
    hn_eval,
)

I = ComplexPoint(mpq(0), mpq(1))
STEP1 = HerglotzRational(0, 0, mpq(1, 2), [(1, 1)])


def random_hn(rng: random.Random, n: int) -> HerglotzRational:
    lams: set = set()
    while len(lams) < n:
        v = mpq(rng.randint(-60, 60), rng.randint(1, 7))
        if v:
            lams.add(v)
    return HerglotzRational(
        mpq(rng.randint(-9, 9), rng.randint(1, 5)),
        mpq(rng.randint(0, 4), rng.randint(1, 3)),
        mpq(rng.randint(1, 9), rng.randint(1, 4)),
        [(lam, mpq(rng.randint(1, 9), rng.randint(1, 5))) for lam in lams],
    )


def test_hn_eval_examples():
    assert hn_eval(HerglotzRational(0, 0, mpq(1, 2)), I) == ComplexPoint(mpq(0), mpq(1, 2))
    assert hn_eval(STEP1, mpq(2)) == mpq(-5, 4)
    assert hn_eval(STEP1, I).im > 0


def test_hn_eval_pole():
    with pytest.raises(PoleHit):
        hn_eval(STEP1, mpq(1))
    with pytest.raises(PoleHit):
        hn_eval(STEP1, mpq(0))


def test_invariants_rejected():
    with pytest.raises(NotHerglotz):
        HerglotzRational(0, -1, 1)
    with pytest.raises(NotHerglotz):
        HerglotzRational(0, 0, 0)
    with pytest.raises(NotHerglotz):
        HerglotzRational(0, 0, 1, [(2, 0)])
    with pytest.raises(NotHerglotz):
        HerglotzRational(0, 0, 1, [(2, 1), (2, 3)])


def test_expand_base_cases():
    assert cf_expand(HerglotzRational(0, 0, mpq(1, 2))).triples == ((2, 0, 0),)
    assert cf_expand(HerglotzRational(1, 1, 1)).triples == ((1, 1, 1),)


def test_expand_step1_example():
    cf = cf_expand(STEP1)
    assert cf.l == [mpq(4, 3), mpq(2, 3)]
    assert cf.omega == [mpq(9, 4), 0]
    assert cf.upsilon == [0, 0]


def test_reconstruct_examples():
    p, q = cf_reconstruct(ContinuedFraction(((mpq(2), mpq(0), mpq(0)),)))
    assert p == Poly.one() and q == Poly([0, -2])
    p, q = cf_reconstruct(ContinuedFraction(((mpq(4, 3), mpq(9, 4), mpq(0)), (mpq(2, 3), mpq(0), mpq(0)))))
    assert q == Poly([0, -2, 2])
    assert p(mpq(1)) == -2
    p, q = cf_reconstruct(ContinuedFraction(()))
    assert p == Poly.one() and q.is_zero()


def test_non_herglotz_input_detected():
    # -1/(2z) - 1/(1 - z): negative weight smuggled in through the cleared form
    P = Poly([mpq(-1, 2), mpq(-1, 2)])
    Q = Poly([0, 1, -1])
    with pytest.raises(NotHerglotz):
        cf_expand((P, Q))


def test_round_trip_random():
    rng = random.Random(11)
    for _ in range(60):
        m = random_hn(rng, rng.randint(0, 8))
        cf = cf_expand(m)
        cf.check()
        assert len(cf) == m.pole_count
        p, q = cf_reconstruct(cf)
        P, Q = m.rational_form()
        assert P * q == Q * p
        ps, qs = cf_recursion(cf)
        assert all(pn.coeff(0) == 1 and qn.coeff(0) == 0 for pn, qn in zip(ps, qs))


def test_prefix_positivity_sampled():
    rng = random.Random(5)
    m = random_hn(rng, 6)
    ps, qs = cf_recursion(cf_expand(m))
    for n in range(1, len(ps)):
        for _ in range(20):
            z = ComplexPoint(mpq(rng.randint(-40, 40), 3), mpq(rng.randint(1, 40), 3))
            val = poly_eval(ps[n], z) / poly_eval(qs[n], z)
            assert val.im >= 0


def test_float_expansion_residual():
    rng = random.Random(2)
    m = random_hn(rng, 6)
    with precision(256):
        P, Q = m.rational_form()
        cf = cf_expand((P.to_float(), Q.to_float()))
        assert cf.residual is not None and cf.residual < 1e-60
        exact = cf_expand(m)
        for a, b in zip(cf.triples, exact.triples):
            for x, y in zip(a, b):
                assert abs(x - mpfr(y)) <= mpfr(10) ** -50 * max(1, abs(mpfr(y)))
    assert cf.triples[0][0].precision == 256 and exact.triples[0][0].denominator > 0
