import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirapprox.bohr import (
    LiftedPolynomial,
    MultiIndex,
    PolydiscPlan,
    PrimeTable,
    bohr_gap_report,
    evaluate_lifted,
    factorize_to_multiindex,
    lift,
    polydisc_sup_estimate,
    unlift,
)
from dirapprox.errors import (
    InvalidInputError,
    NeedsLargerTableError,
    OutOfRangeError,
    ResourceLimitError,
)
from dirapprox.series import DirichletPolynomial, evaluate


def poly(*coeffs):
    return DirichletPolynomial(np.array(coeffs, dtype=complex))


# --- prime table / factorization -------------------------------------------


def test_prime_table_contents():
    t = PrimeTable.up_to(20)
    assert t.primes == (2, 3, 5, 7, 11, 13, 17, 19)
    assert PrimeTable.up_to(1).primes == ()


def test_factorize_basics():
    t = PrimeTable.up_to(20)
    assert factorize_to_multiindex(1, t).exponents == ()
    assert factorize_to_multiindex(12, t).exponents == (2, 1)
    assert factorize_to_multiindex(6, t).exponents == (1, 1)


def test_factorize_reconstructs_n():
    t = PrimeTable.up_to(200)
    for n in range(1, 200):
        assert factorize_to_multiindex(n, t).prime_power(t) == n


def test_factorize_needs_larger_table():
    t = PrimeTable.up_to(20)
    with pytest.raises(NeedsLargerTableError):
        factorize_to_multiindex(23, t)
    with pytest.raises(NeedsLargerTableError):
        factorize_to_multiindex(2 * 23, t)


def test_multiindex_trims_and_validates():
    assert MultiIndex((1, 0, 0)).exponents == (1,)
    with pytest.raises(InvalidInputError):
        MultiIndex((-1,))


# --- lift / unlift -----------------------------------------------------------


def test_lift_constant():
    q = lift(poly(3 - 1j))
    assert q.terms == {MultiIndex(()): 3 - 1j}
    assert q.variable_count == 0


def test_lift_all_ones_degree_six():
    q = lift(DirichletPolynomial(np.ones(6, dtype=complex)))
    want = {
        MultiIndex(()): 1,
        MultiIndex((1,)): 1,
        MultiIndex((0, 1)): 1,
        MultiIndex((2,)): 1,
        MultiIndex((0, 0, 1)): 1,
        MultiIndex((1, 1)): 1,
    }
    assert q.terms == want
    assert q.variable_count == 3


def test_unlift_basics():
    assert unlift(LiftedPolynomial({MultiIndex(()): 2j}, 0)) == poly(2j)
    q = LiftedPolynomial({MultiIndex((1, 1)): 5}, 2)
    assert unlift(q) == poly(0, 0, 0, 0, 0, 5)


def test_unlift_overflow_guard():
    q = LiftedPolynomial({MultiIndex((64,)): 1}, 1)  # 2^64
    with pytest.raises(OutOfRangeError):
        unlift(q)


def test_round_trip_hundred_random():
    rng = np.random.default_rng(1234)
    for _ in range(100):
        n = int(rng.integers(1, 51))
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c[rng.random(n) < 0.3] = 0  # keep sparse cases in the mix
        p = DirichletPolynomial(c)
        assert unlift(lift(p)) == p


def test_lift_unlift_identity_on_lifted_side():
    rng = np.random.default_rng(99)
    for _ in range(30):
        n = int(rng.integers(1, 40))
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        q = lift(DirichletPolynomial(c))
        assert lift(unlift(q)) == q


def test_multiplicativity_of_lift():
    rng = np.random.default_rng(7)
    for _ in range(20):
        na, nb = int(rng.integers(1, 12)), int(rng.integers(1, 12))
        pa = DirichletPolynomial(rng.standard_normal(na) + 1j * rng.standard_normal(na))
        pb = DirichletPolynomial(rng.standard_normal(nb) + 1j * rng.standard_normal(nb))
        lhs = lift(pa * pb)
        rhs = lift(pa) * lift(pb)
        assert set(lhs.terms) == set(rhs.terms)
        for k in lhs.terms:
            assert lhs.terms[k] == pytest.approx(rhs.terms[k], abs=1e-12)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_lift_preserves_values_under_prime_substitution(seed):
    # substituting z_j = p_j^{-s} into the lifted polynomial recovers P(s)
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 30))
    p = DirichletPolynomial(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    q = lift(p)
    s = complex(rng.uniform(-1, 2), rng.uniform(-5, 5))
    t = PrimeTable.up_to(max(n, 2))
    z = [complex(pp) ** (-s) for pp in t.primes[: q.variable_count]]
    lhs, rhs = evaluate_lifted(q, z), evaluate(p, s)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


# --- polydisc sup ------------------------------------------------------------


def test_polydisc_sup_constant():
    assert polydisc_sup_estimate(lift(poly(2 - 2j))) == pytest.approx(abs(2 - 2j))


def test_polydisc_sup_one_plus_z1():
    v = polydisc_sup_estimate(lift(poly(1, 1)))
    assert 2 - 1e-3 < v <= 2 + 1e-9


def test_polydisc_sup_matches_dense_grid_for_small_k():
    rng = np.random.default_rng(5)
    for _ in range(5):
        n = int(rng.integers(2, 8))  # k <= 3 for n <= 7
        p = DirichletPolynomial(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        q = lift(p)
        fast = polydisc_sup_estimate(q, PolydiscPlan(angles=32, max_refinements=1))
        dense = polydisc_sup_estimate(q, PolydiscPlan(angles=256, max_refinements=0))
        assert abs(fast - dense) <= 0.01 * max(fast, dense)


def test_polydisc_variable_cap():
    p = DirichletPolynomial(np.ones(23, dtype=complex))  # nine primes <= 23
    with pytest.raises(ResourceLimitError):
        polydisc_sup_estimate(lift(p))
    # raising the cap makes the same call legal
    v = polydisc_sup_estimate(lift(p), PolydiscPlan(max_vars=9, mc_samples=2000, polish_starts=2))
    assert v > 0


def test_norm_identity_small_cases():
    rng = np.random.default_rng(2)
    for _ in range(4):
        n = int(rng.integers(1, 7))
        p = DirichletPolynomial(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        rep = bohr_gap_report(p)
        assert rep.relative_gap <= rep.tolerance
