import random

import pytest
import sympy
from oracles import X, to_sympy

from monadws.exact import MultiPoly, fermat, poly_det
from monadws.hypersurface import HypersurfaceSpec
from monadws.monad import (
    _apply_change,
    banded_blocks,
    build_instanton_monad,
    check_complex,
    check_ranks,
    convention_change,
    eq8_monad,
    extreme_minors,
    phi_matrix,
    random_point_on,
)

x = [MultiPoly.var(i) for i in range(5)]
s1, s2, s3, s4 = x[1:]
Z = MultiPoly()


def sympy_product_mod_f(m):
    beta = sympy.Matrix([[to_sympy(e) for e in row] for row in m.beta])
    alpha = sympy.Matrix([[to_sympy(e) for e in row] for row in m.alpha])
    f = to_sympy(m.spec.f)
    return [[sympy.reduced(sympy.expand(e), [f], *X, order="grlex")[1] for e in row] for row in (beta * alpha).tolist()]


def test_banded_template_c2():
    blk = banded_blocks(2, (s1, s2, s3, s4))
    assert blk.B1 == ((s1, s2, Z), (Z, s1, s2))
    assert blk.B2 == ((s3, s4, Z), (Z, s3, s4))
    assert blk.A1 == ((s2, Z), (s1, s2), (Z, s1))
    assert blk.A2 == ((s4, Z), (s3, s4), (Z, s3))


def test_shapes():
    m = build_instanton_monad(3, HypersurfaceSpec.fermat(4))
    assert m.signature.as_tuple() == (3, 8, 3)
    assert len(m.beta) == 3 and len(m.beta[0]) == 8
    assert len(m.alpha) == 8 and len(m.alpha[0]) == 3


@pytest.mark.parametrize("d", [4, 5, 6])
@pytest.mark.parametrize("c", [1, 2, 3, 5])
def test_complex_matches_sympy(c, d):
    m = build_instanton_monad(c, HypersurfaceSpec.fermat(d))
    assert all(e == 0 for row in sympy_product_mod_f(m) for e in row)
    cert = check_complex(m)
    assert cert.ok and cert.unreduced_zero
    assert cert.phi_identity["B1A2_equals_B2A1"] and cert.phi_identity["equals_phi_matrix"]


def test_phi_matrix_entries():
    phi = phi_matrix(3, (s1, s2, s3, s4))
    assert phi[0][0] == phi[1][1] == s1 * s4 + s2 * s3
    assert phi[1][0] == s1 * s3 and phi[0][1] == s2 * s4
    assert phi[2][0] == Z and phi[0][2] == Z


def test_eq8_monad_and_convention_change():
    spec = HypersurfaceSpec.fermat(5)
    m = eq8_monad(spec)
    assert m.beta == ((-s2, s1, -s4, s3),)
    assert check_complex(m).ok and check_ranks(m).ok
    ch = convention_change(spec)
    assert _apply_change(build_instanton_monad(1, spec), ch) == (m.alpha, m.beta)
    assert sorted(ch.section_perm) == [0, 1, 2, 3]
    assert sorted(i for i, _ in ch.middle) == [0, 1, 2, 3]


def test_perturbed_monad_reports_falsifying_entry():
    m = build_instanton_monad(2, HypersurfaceSpec.fermat(4))
    bad = m.with_entry("beta", 0, 0, s2)  # s1 -> s2
    cert = check_complex(bad)
    assert not cert.ok
    f = cert.falsifying
    assert (f["row"], f["col"]) == (0, 0)
    assert f["value"] == str(-(s1 * s4) + s2 * s4)  # (s2 - s1) s4 survives
    oracle = sympy_product_mod_f(bad)
    assert oracle[0][0] != 0 and oracle[1][1] == 0


@pytest.mark.parametrize("d", [4, 5, 6])
def test_structural_rank_certificate(d):
    for c in range(1, 11):
        cert = check_ranks(build_instanton_monad(c, HypersurfaceSpec.fermat(d)))
        assert cert.ok and cert.certifying
        assert [mi["power_of"] for mi in cert.minors] == ["x1", "x2", "x3", "x4", "x1", "x2", "x3", "x4"]
        assert cert.locus["point"] == ["1", "0", "0", "0", "0"] and cert.locus["f_value"] == "1"


def test_extreme_minors_are_powers():
    blk = banded_blocks(4, (s1, s2, s3, s4))
    dets = [poly_det(sub) for _, _, sub in extreme_minors(blk)]
    assert dets[0] == s1**4 and dets[1] == s2**4 and dets[2] == s3**4 and dets[3] == s4**4


def test_degenerate_sections_fail_with_witness():
    spec = HypersurfaceSpec(d=4, f=fermat(4), sections=(s1, s1, s3, s4))
    cert = check_ranks(build_instanton_monad(2, spec))
    assert not cert.ok
    assert "meets X" in cert.failure
    assert cert.locus["locus"] == "linear subspace of dimension 1"


def test_residual_point_on_x_fails():
    # f vanishes at [1:0:0:0:0], so the residual point lies on X
    f = x[0] ** 3 * x[1] + x[1] ** 4 + x[2] ** 4 + x[3] ** 4 + x[4] ** 4
    cert = check_ranks(build_instanton_monad(1, HypersurfaceSpec(d=4, f=f, sections=(s1, s2, s3, s4))))
    assert not cert.ok and cert.locus["f_value"] == "0"


def test_probabilistic_mode():
    cert = check_ranks(build_instanton_monad(2, HypersurfaceSpec.fermat(4)), "probabilistic")
    assert not cert.ok and not cert.certifying and cert.failure.startswith("unavailable")
    f = x[0] ** 4 + x[1] ** 4 + x[2] ** 4 + x[3] ** 4 + x[4] * x[0] ** 3  # linear in x4
    spec = HypersurfaceSpec(d=4, f=f, sections=(s1, s2, s3, s4))
    cert = check_ranks(build_instanton_monad(2, spec), "probabilistic", n_points=10, seed=3)
    assert cert.ok and not cert.certifying and cert.points_checked == 10
    pt = random_point_on(f, random.Random(1))
    assert f.evaluate(pt) == 0


def test_unknown_strategy():
    with pytest.raises(ValueError):
        check_ranks(build_instanton_monad(1, HypersurfaceSpec.fermat(4)), "magic")


def test_non_linear_entry_rejected():
    m = build_instanton_monad(1, HypersurfaceSpec.fermat(4))
    with pytest.raises(ValueError):
        m.with_entry("alpha", 0, 0, s1 * s1)
