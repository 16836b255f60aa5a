import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from monadws.chern import (
    MonadSignature,
    cohomology_invariants,
    delta_min_over_family,
    discriminant,
    dry_check,
    dry_threshold,
    exterior_power_invariants,
    family_delta,
    floystad_min_b,
    kernel_invariants,
    normalization_twist,
    s20_members,
    slope,
    symmetric_power_invariants,
)
from monadws.hypersurface import HypersurfaceSpec


def chern_of_monad(a, b, c):
    """Independent route through the total Chern class.

    [E] = b[O] - a[O(-1)] - c[O(1)], so c(E) = (1-h)^(-a) (1+h)^(-c).
    """
    ca = [1, a, a * (a + 1) // 2]
    cc = [1, -c, c * (c + 1) // 2]
    return b - a - c, ca[1] + cc[1], ca[2] + ca[1] * cc[1] + cc[2]


def test_cohomology_invariants_examples():
    inv = cohomology_invariants(MonadSignature(1, 4, 1))
    assert (inv.rank, inv.c1, inv.c2, inv.delta) == (2, 0, 1, 1)
    inv = cohomology_invariants(MonadSignature(0, 5, 0))
    assert (inv.rank, inv.c1, inv.c2, inv.delta) == (5, 0, 0, 0)
    inv = cohomology_invariants(MonadSignature(2, 8, 2))
    assert (inv.rank, inv.c1, inv.c2) == (4, 0, 2)
    assert inv.delta == discriminant(4, 0, 2) == 1


def test_kernel_invariants_examples():
    inv = kernel_invariants(MonadSignature(1, 4, 1))
    assert (inv.rank, inv.c1, inv.c2, inv.delta) == (3, -1, 1, Fraction(4, 9))
    inv = kernel_invariants(MonadSignature(0, 4, 0))
    assert (inv.rank, inv.c1, inv.c2, inv.delta) == (4, 0, 0, 0)
    assert kernel_invariants(MonadSignature.instanton(3)).delta == Fraction(24, 25)


def test_invariants_reject_nonpositive_rank():
    with pytest.raises(ValueError):
        cohomology_invariants(MonadSignature(1, 2, 1))
    with pytest.raises(ValueError):
        kernel_invariants(MonadSignature(0, 3, 3))
    with pytest.raises(ValueError):
        MonadSignature(-1, 3, 0)


def test_chern_classes_match_total_chern_class():
    for a, c in itertools.product(range(11), repeat=2):
        for b in range(a + c + 1, a + c + 21):
            r, c1, c2 = chern_of_monad(a, b, c)
            inv = cohomology_invariants(MonadSignature(a, b, c))
            assert (inv.rank, inv.c1, inv.c2) == (r, c1, c2)
            assert inv.delta == discriminant(r, c1, c2)
            kin = kernel_invariants(MonadSignature(a, b, c))
            # [K] = b[O] - c[O(1)]
            assert (kin.rank, kin.c1, kin.c2) == (b - c, -c, Fraction(c * (c + 1), 2))
            assert kin.delta == discriminant(kin.rank, kin.c1, kin.c2)


@given(st.integers(0, 30), st.integers(0, 30), st.integers(1, 40))
def test_delta_symmetric_in_a_and_c(a, c, extra):
    b = a + c + extra
    assert cohomology_invariants(MonadSignature(a, b, c)).delta == cohomology_invariants(MonadSignature(c, b, a)).delta


@pytest.mark.parametrize("d,bundle,delta,threshold", [
    (6, "E", Fraction(1), Fraction(4, 3)),
    (4, "K", Fraction(4, 9), Fraction(1, 2)),
    (5, "K", Fraction(4, 9), Fraction(5, 6)),
])
def test_dry_counterexamples(d, bundle, delta, threshold):
    sig = MonadSignature(1, 4, 1)
    inv = cohomology_invariants(sig) if bundle == "E" else kernel_invariants(sig)
    v = dry_check(inv, HypersurfaceSpec(d=d))
    assert (v.delta, v.threshold, v.verdict) == (delta, threshold, "violated")
    assert v.margin == delta - threshold


def test_dry_holds_case_and_n_guard():
    inv = cohomology_invariants(MonadSignature(1, 4, 1))
    assert dry_check(inv, HypersurfaceSpec(d=1)).verdict == "holds"  # threshold 1/2 on P^3
    with pytest.raises(ValueError):
        dry_check(inv, HypersurfaceSpec(d=4, n=5))


def test_family_always_violated_for_large_degree():
    for d in range(7, 31):
        assert dry_threshold(d) >= 2
        for c in range(1, 31):
            inv = kernel_invariants(MonadSignature.instanton(c))
            assert inv.delta == family_delta(c) < 2
            assert dry_check(inv, HypersurfaceSpec(d=d)).verdict == "violated"


def test_slope_and_normalization():
    s = slope(3, -1, HypersurfaceSpec(d=5))
    assert s.degree == Fraction(-5, 3) and s.h_units == Fraction(-1, 3)
    assert normalization_twist(2, 0) == 0
    assert normalization_twist(3, -1) == 0
    assert normalization_twist(3, 1) == -1
    with pytest.raises(ValueError):
        normalization_twist(0, 1)


@given(st.integers(1, 50), st.integers(-500, 500))
def test_normalization_twist_unique(r, c1):
    k = normalization_twist(r, c1)
    ok = [j for j in (k - 1, k, k + 1) if -r + 1 <= c1 + r * j <= 0]
    assert ok == [k]


@pytest.mark.parametrize("c", range(1, 12))
def test_normalization_of_exterior_powers_of_dual_kernel(c):
    for t in range(0, c - 1):
        r, c1 = exterior_power_invariants(c + 2, c, 3 + t)
        assert Fraction(c1, r) == Fraction((3 + t) * c, c + 2)
        assert Fraction(c1, r) - t - 1 == Fraction(2 * (c - t - 1), c + 2) > 0
        assert normalization_twist(r, c1) <= -t - 2


def _split_powers(degrees, q, sym):
    combos = itertools.combinations_with_replacement if sym else itertools.combinations
    parts = [sum(s) for s in combos(degrees, q)]
    return len(parts), sum(parts)


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=6), st.integers(0, 5))
def test_power_invariants_match_split_bundles(degrees, q):
    r, c1 = len(degrees), sum(degrees)
    assert exterior_power_invariants(r, c1, q) == (_split_powers(degrees, q, False) if q <= r else (0, 0))
    assert symmetric_power_invariants(r, c1, q) == _split_powers(degrees, q, True)


def test_floystad_readings():
    assert floystad_min_b(1, 1, 4) == 4
    assert floystad_min_b(1, 1, 4, "as-stated") == 5
    for c in range(1, 11):
        assert floystad_min_b(c, c, 4) == 2 * c + 2
    assert floystad_min_b(1, 1, 5) == 6 and floystad_min_b(1, 1, 5, "as-stated") == 5
    with pytest.raises(ValueError):
        floystad_min_b(1, 1, 3)
    with pytest.raises(ValueError):
        floystad_min_b(1, 1, 4, "other")


def test_s20_members():
    assert [m.value for m in s20_members(1, 3)] == [1, 2, 3]
    assert [m.value for m in s20_members(5, 2)] == [5, 10]
    assert [m.value for m in s20_members(4, 1)] == [4]
    assert s20_members(4, 2)[1].signature.as_tuple() == (2, 6, 2)
    with pytest.raises(ValueError):
        s20_members(4, 0)


def test_delta_min():
    assert delta_min_over_family(1) == (1, Fraction(4, 9))
    assert delta_min_over_family(2) == (1, Fraction(4, 9))
    assert family_delta(2) == Fraction(3, 4)
    assert delta_min_over_family(50) == (1, Fraction(4, 9))
