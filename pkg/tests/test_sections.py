import itertools

import pytest
import sympy
from oracles import X, to_sympy

from monadws import sections
from monadws.chern import MonadSignature
from monadws.exact import MultiPoly, fermat
from monadws.hypersurface import HypersurfaceSpec, h0_line
from monadws.monad import LinearMonad, build_instanton_monad
from monadws.sections import (
    h0_cohomology,
    h0_dual_kernel,
    h0_kernel,
    multiplication_map,
    stability_E,
)


def sympy_h0_kernel(m, t):
    """dim ker(H^0(O(t))^b -> H^0(O(t+1))^c), built with sympy reduction and rank."""
    f = to_sympy(m.spec.f)
    lt = sympy.Poly(f, *X).monoms(order="grlex")[0]

    def reduced_monomials(k):
        if k < 0:
            return []
        ms = [e for e in itertools.product(range(k + 1), repeat=5) if sum(e) == k]
        return [e for e in ms if not all(a >= b for a, b in zip(e, lt))]

    src, tgt = reduced_monomials(t), reduced_monomials(t + 1)
    index = {e: i for i, e in enumerate(tgt)}
    b, c = len(m.beta[0]), len(m.beta)
    cols = []
    for j in range(b):
        for e in src:
            mono = sympy.prod([X[i] ** e[i] for i in range(5)])
            col = [0] * (c * len(tgt))
            for i in range(c):
                r = sympy.reduced(sympy.expand(to_sympy(m.beta[i][j]) * mono), [f], *X, order="grlex")[1]
                for mon, cf in sympy.Poly(r, *X).terms():
                    if cf:
                        col[i * len(tgt) + index[mon]] = cf
            cols.append(col)
    if not cols:
        return 0
    return len(cols) - sympy.Matrix(cols).rank()


@pytest.mark.parametrize("d", [4, 5, 6])
def test_kernel_examples(d):
    m = build_instanton_monad(1, HypersurfaceSpec.fermat(d))
    assert [h0_kernel(m, t).dimension for t in (-1, 0, 1)] == [0, 0, 6]
    assert [h0_cohomology(m, t).dimension for t in (-1, 0, 1)] == [0, 0, 5]


@pytest.mark.parametrize("c,t,d", [(1, 0, 4), (1, 1, 3), (1, 1, 5), (1, 2, 4), (2, 1, 4), (2, 0, 5)])
def test_kernel_matches_sympy(c, t, d):
    m = build_instanton_monad(c, HypersurfaceSpec.fermat(d))
    assert h0_kernel(m, t).dimension == sympy_h0_kernel(m, t)


def test_kernel_audit():
    m = build_instanton_monad(2, HypersurfaceSpec.fermat(4))
    audit = h0_kernel(m, 1).audit
    assert audit["euler_consistent"] and audit["pieces_match_oracle"]
    assert audit["domain_dim"] == 6 * h0_line(4, 1) and audit["codomain_dim"] == 2 * h0_line(4, 2)


def test_dense_and_sparse_paths_agree(monkeypatch):
    m = build_instanton_monad(2, HypersurfaceSpec.fermat(5))
    dense = [h0_kernel(m, t).dimension for t in range(0, 3)]
    monkeypatch.setattr(sections, "DENSE_CELL_LIMIT", 0)
    assert [h0_kernel(m, t).dimension for t in range(0, 3)] == dense


def test_kernel_basis_vectors_lie_in_kernel():
    m = build_instanton_monad(1, HypersurfaceSpec.fermat(5))
    space = h0_kernel(m, 1, basis=True)
    assert len(space.basis) == space.dimension == 6
    mat = multiplication_map(m.beta, 1, m.spec.f).matrix.to_dense()
    for v in space.basis:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in mat.entries)


def test_cohomology_basis_is_a_complement():
    m = build_instanton_monad(1, HypersurfaceSpec.fermat(5))
    space = h0_cohomology(m, 1, basis=True)
    assert len(space.basis) == space.dimension == 5
    img = multiplication_map(m.alpha, 0, m.spec.f).matrix.to_dense()
    image_cols = [list(col) for col in zip(*img.entries)]
    stacked = sympy.Matrix(image_cols + space.basis)
    assert stacked.rank() == len(image_cols) + len(space.basis)


@pytest.mark.parametrize("d", [4, 5, 6])
def test_cohomology_negative_twist_vanishes(d):
    for c in (1, 2, 3):
        m = build_instanton_monad(c, HypersurfaceSpec.fermat(d))
        assert h0_cohomology(m, -1).dimension == 0


def test_dual_kernel_examples():
    spec = HypersurfaceSpec.fermat(5)
    m1 = build_instanton_monad(1, spec)
    assert h0_dual_kernel(m1, -1).dimension == 0
    assert h0_dual_kernel(m1, 0).dimension == 4
    m2 = build_instanton_monad(2, spec)
    assert h0_dual_kernel(m2, 1).dimension == 6 * 5 - 2 * 1 == 28


@pytest.mark.parametrize("d", [2, 4, 5])
def test_dual_kernel_formula_matches_explicit(d):
    for c in (1, 2, 3):
        m = build_instanton_monad(c, HypersurfaceSpec.fermat(d))
        for t in range(-1, 3):
            assert h0_dual_kernel(m, t).dimension == h0_dual_kernel(m, t, method="explicit").dimension


def test_dual_kernel_bad_method():
    with pytest.raises(ValueError):
        h0_dual_kernel(build_instanton_monad(1, HypersurfaceSpec.fermat(4)), 0, method="guess")


@pytest.mark.parametrize("d", [4, 5, 6])
def test_stability_of_e(d):
    for c in range(1, 5):
        v = stability_E(build_instanton_monad(c, HypersurfaceSpec.fermat(d)))
        assert v.stable and v.h0_E == 0 and v.normalization_twist == 0
        assert v.to_dict()["certificate"]["h0_E_norm"] == 0


def test_stability_requires_instanton_shape():
    x = [MultiPoly.var(i) for i in range(5)]
    m = LinearMonad(MonadSignature(0, 2, 1), ((), ()), ((x[1], x[2]),), HypersurfaceSpec.fermat(4))
    with pytest.raises(ValueError):
        stability_E(m)


def test_degenerate_monad_verdict_is_consistent():
    x = [MultiPoly.var(i) for i in range(5)]
    spec = HypersurfaceSpec(d=4, f=fermat(4), sections=(x[1], x[1], x[3], x[4]))
    v = stability_E(build_instanton_monad(1, spec))
    assert v.stable == (v.h0_E == 0)
    if not v.stable:
        assert v.section is not None
