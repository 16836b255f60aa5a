"""Linear monads O(-1)^c -> O^{2+2c} -> O(1)^c built from banded blocks.

The blocks B1, B2 are c x (c+1) and A1, A2 are (c+1) x c:

    B1[i][i] = s1, B1[i][i+1] = s2        A1[j][j] = s2, A1[j+1][j] = s1
    B2[i][i] = s3, B2[i][i+1] = s4        A2[j][j] = s4, A2[j+1][j] = s3

with beta = [B1 | B2] and alpha = [A2 ; -A1], so beta.alpha = B1 A2 - B2 A1,
and both products equal the tridiagonal matrix with s1 s3 below the
diagonal, s1 s4 + s2 s3 on it and s2 s4 above it.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .chern import MonadSignature
from .exact import ExactMatrix, MultiPoly, poly_det, poly_normal_form, rank
from .hypersurface import HypersurfaceSpec, residual_locus

PolyMatrix = tuple[tuple[MultiPoly, ...], ...]

ZERO = MultiPoly()


def _freeze(rows) -> PolyMatrix:
    return tuple(tuple(r) for r in rows)


def matmul(A: Sequence[Sequence[MultiPoly]], B: Sequence[Sequence[MultiPoly]]) -> PolyMatrix:
    if A and len(A[0]) != len(B):
        raise ValueError("shape mismatch")
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        out_row = []
        for j in range(cols):
            acc = MultiPoly()
            for k, a in enumerate(row):
                if a and B[k][j]:
                    acc = acc + a * B[k][j]
            out_row.append(acc)
        out.append(out_row)
    return _freeze(out)


def scale(A: Sequence[Sequence[MultiPoly]], s) -> PolyMatrix:
    return _freeze([[x * s for x in row] for row in A])


@dataclass(frozen=True)
class BandedBlocks:
    B1: PolyMatrix
    B2: PolyMatrix
    A1: PolyMatrix
    A2: PolyMatrix

    @property
    def c(self) -> int:
        return len(self.B1)


def _upper_band(c: int, diag: MultiPoly, sup: MultiPoly) -> PolyMatrix:
    rows = [[ZERO] * (c + 1) for _ in range(c)]
    for i in range(c):
        rows[i][i] = diag
        rows[i][i + 1] = sup
    return _freeze(rows)


def _lower_band(c: int, diag: MultiPoly, sub: MultiPoly) -> PolyMatrix:
    rows = [[ZERO] * c for _ in range(c + 1)]
    for j in range(c):
        rows[j][j] = diag
        rows[j + 1][j] = sub
    return _freeze(rows)


def banded_blocks(c: int, sections: Sequence[MultiPoly]) -> BandedBlocks:
    if c < 1:
        raise ValueError("c must be at least 1")
    s1, s2, s3, s4 = sections
    return BandedBlocks(
        B1=_upper_band(c, s1, s2),
        B2=_upper_band(c, s3, s4),
        A1=_lower_band(c, s2, s1),
        A2=_lower_band(c, s4, s3),
    )


def phi_matrix(c: int, sections: Sequence[MultiPoly]) -> PolyMatrix:
    """Tridiagonal c x c matrix with bands (phi0, phi1, phi2)."""
    s1, s2, s3, s4 = sections
    phi0, phi1, phi2 = s1 * s3, s1 * s4 + s2 * s3, s2 * s4
    rows = [[ZERO] * c for _ in range(c)]
    for i in range(c):
        rows[i][i] = phi1
        if i > 0:
            rows[i][i - 1] = phi0
        if i + 1 < c:
            rows[i][i + 1] = phi2
    return _freeze(rows)


@dataclass(frozen=True)
class LinearMonad:
    signature: MonadSignature
    alpha: PolyMatrix  # b x a
    beta: PolyMatrix  # c x b
    spec: HypersurfaceSpec
    convention: str = "sec4"

    def __post_init__(self):
        a, b, c = self.signature.as_tuple()
        if len(self.alpha) != b or any(len(r) != a for r in self.alpha):
            raise ValueError("alpha must be b x a")
        if len(self.beta) != c or any(len(r) != b for r in self.beta):
            raise ValueError("beta must be c x b")
        for entry in itertools.chain.from_iterable(self.alpha + self.beta):
            if entry.degree not in (1, None):
                raise ValueError(f"monad entry {entry} is not linear")

    def blocks(self) -> BandedBlocks | None:
        """Split beta/alpha into the four blocks when the shape allows it."""
        a, b, c = self.signature.as_tuple()
        if not (a == c and b == 2 * c + 2):
            return None
        B1 = _freeze(row[: c + 1] for row in self.beta)
        B2 = _freeze(row[c + 1 :] for row in self.beta)
        A2 = _freeze(self.alpha[: c + 1])
        A1 = scale(self.alpha[c + 1 :], -1)
        return BandedBlocks(B1, B2, A1, A2)

    def with_entry(self, which: str, i: int, j: int, value: MultiPoly) -> LinearMonad:
        """Copy with one matrix entry replaced (used for negative controls)."""
        mat = [list(r) for r in getattr(self, which)]
        mat[i][j] = value
        kw = {"alpha": self.alpha, "beta": self.beta, which: _freeze(mat)}
        return LinearMonad(self.signature, kw["alpha"], kw["beta"], self.spec, self.convention)


def build_instanton_monad(c: int, spec: HypersurfaceSpec) -> LinearMonad:
    """The (c, 2+2c, c) monad with beta = [B1 | B2], alpha = [A2 ; -A1]."""
    spec.require_symbolic()
    blk = banded_blocks(c, spec.sections)
    beta = tuple(r1 + r2 for r1, r2 in zip(blk.B1, blk.B2))
    alpha = blk.A2 + scale(blk.A1, -1)
    return LinearMonad(MonadSignature.instanton(c), alpha, beta, spec, "sec4")


def eq8_monad(spec: HypersurfaceSpec) -> LinearMonad:
    """The c = 1 monad with alpha = (s1, s2, s3, s4)^T, beta = (-s2, s1, -s4, s3)."""
    spec.require_symbolic()
    s1, s2, s3, s4 = spec.sections
    alpha = ((s1,), (s2,), (s3,), (s4,))
    beta = ((-s2, s1, -s4, s3),)
    return LinearMonad(MonadSignature.instanton(1), alpha, beta, spec, "eq8")


@dataclass(frozen=True)
class ConventionChange:
    """Data relating the two c = 1 conventions.

    Relabel sections by ``section_perm`` (new s_i is old s_{perm[i]}), then
    change basis of O^4 by the signed permutation ``middle`` (new coordinate
    i is ``middle[i][1]`` times old coordinate ``middle[i][0]``), and scale the
    outer terms by ``alpha_sign`` / ``beta_sign``.
    """

    section_perm: tuple[int, ...]
    middle: tuple[tuple[int, int], ...]
    alpha_sign: int
    beta_sign: int

    def to_dict(self) -> dict:
        return {
            "section_permutation": list(self.section_perm),
            "middle_signed_permutation": [list(x) for x in self.middle],
            "alpha_sign": self.alpha_sign,
            "beta_sign": self.beta_sign,
        }


def _apply_change(m: LinearMonad, ch: ConventionChange) -> tuple[PolyMatrix, PolyMatrix]:
    secs = m.spec.sections
    relabel = {secs[i]: secs[ch.section_perm[i]] for i in range(4)}
    relabel.update({-secs[i]: -secs[ch.section_perm[i]] for i in range(4)})
    alpha = [[relabel.get(x, x) for x in row] for row in m.alpha]
    beta = [[relabel.get(x, x) for x in row] for row in m.beta]
    # new alpha = g alpha, new beta = beta g^{-1} with g a signed permutation
    new_alpha = [[alpha[src][0] * (sgn * ch.alpha_sign)] for src, sgn in ch.middle]
    new_beta = [[ZERO] * 4]
    for new_i, (src, sgn) in enumerate(ch.middle):
        new_beta[0][new_i] = beta[0][src] * (sgn * ch.beta_sign)
    return _freeze(new_alpha), _freeze(new_beta)


def convention_change(spec: HypersurfaceSpec) -> ConventionChange:
    """Search for a relabelling plus signed change of basis taking the c = 1
    block monad to the explicit (alpha, beta) = ((s1..s4)^T, (-s2, s1, -s4, s3))."""
    src = build_instanton_monad(1, spec)
    target = eq8_monad(spec)
    options = [(src_i, sgn) for src_i in range(4) for sgn in (1, -1)]
    for perm in itertools.permutations(range(4)):
        for sa, sb in itertools.product((1, -1), repeat=2):
            # alpha pins down the middle change of basis; beta is then checked
            probe = ConventionChange(perm, tuple((i, 1) for i in range(4)), sa, sb)
            relabelled, _ = _apply_change(src, probe)
            middle = []
            for i in range(4):
                hit = [(s, g) for s, g in options if relabelled[s][0] * g == target.alpha[i][0]]
                if len(hit) != 1:
                    break
                middle.append(hit[0])
            else:
                ch = ConventionChange(perm, tuple(middle), sa, sb)
                if _apply_change(src, ch) == (target.alpha, target.beta):
                    return ch
    raise LookupError("no signed change of basis relates the two conventions")


# --- certificates -------------------------------------------------------------


@dataclass
class ComplexCertificate:
    ok: bool
    product: list[list[str]]
    phi_identity: dict | None = None
    falsifying: dict | None = None
    unreduced_zero: bool = False

    def to_dict(self) -> dict:
        return {
            "check": "complex",
            "ok": self.ok,
            "beta_alpha_mod_f": self.product,
            "zero_before_reduction": self.unreduced_zero,
            "phi_identity": self.phi_identity,
            "falsifying_entry": self.falsifying,
        }


def _str_matrix(M: PolyMatrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in M]


def check_complex(m: LinearMonad) -> ComplexCertificate:
    """Verify beta.alpha = 0 modulo f, entry by entry."""
    f = m.spec.f
    prod = matmul(m.beta, m.alpha)
    reduced = _freeze([[poly_normal_form(x, f) for x in row] for row in prod])
    falsifying = None
    for i, row in enumerate(reduced):
        for j, x in enumerate(row):
            if x and falsifying is None:
                falsifying = {"row": i, "col": j, "value": str(x)}
    phi_info = None
    blk = m.blocks()
    if blk is not None and m.convention == "sec4":
        left, right = matmul(blk.B1, blk.A2), matmul(blk.B2, blk.A1)
        phi = phi_matrix(m.signature.c, m.spec.sections)
        phi_info = {
            "B1A2_equals_B2A1": left == right,
            "equals_phi_matrix": left == phi,
            "phi0": str(m.spec.sections[0] * m.spec.sections[2]),
            "phi1": str(m.spec.sections[0] * m.spec.sections[3] + m.spec.sections[1] * m.spec.sections[2]),
            "phi2": str(m.spec.sections[1] * m.spec.sections[3]),
            "phi_matrix": _str_matrix(phi),
        }
    unreduced = all(not x for row in prod for x in row)
    return ComplexCertificate(falsifying is None, _str_matrix(reduced), phi_info, falsifying, unreduced)


@dataclass
class RankCertificate:
    ok: bool
    strategy: str
    certifying: bool
    minors: list[dict] = field(default_factory=list)
    locus: dict | None = None
    failure: str | None = None
    points_checked: int = 0

    def to_dict(self) -> dict:
        return {
            "check": "ranks",
            "ok": self.ok,
            "strategy": self.strategy,
            "certifying": self.certifying,
            "minors": self.minors,
            "residual_locus": self.locus,
            "failure": self.failure,
            "points_checked": self.points_checked,
        }


def _drop_col(M: PolyMatrix, j: int) -> PolyMatrix:
    return _freeze([row[:j] + row[j + 1 :] for row in M])


def _drop_row(M: PolyMatrix, i: int) -> PolyMatrix:
    return M[:i] + M[i + 1 :]


def _pure_power_base(det: MultiPoly, candidates, c: int) -> MultiPoly | None:
    for cand in candidates:
        if cand and cand**c == det:
            return cand
    return None


def extreme_minors(blk: BandedBlocks) -> list[tuple[str, str, PolyMatrix]]:
    """The eight c x c minors used by the structural certificate."""
    c = blk.c
    return [
        ("beta", "B1 drop last column", _drop_col(blk.B1, c)),
        ("beta", "B1 drop first column", _drop_col(blk.B1, 0)),
        ("beta", "B2 drop last column", _drop_col(blk.B2, c)),
        ("beta", "B2 drop first column", _drop_col(blk.B2, 0)),
        ("alpha", "A1 drop first row", _drop_row(blk.A1, 0)),
        ("alpha", "A1 drop last row", _drop_row(blk.A1, c)),
        ("alpha", "A2 drop first row", _drop_row(blk.A2, 0)),
        ("alpha", "A2 drop last row", _drop_row(blk.A2, c)),
    ]


def _structural(m: LinearMonad) -> RankCertificate:
    blk = m.blocks()
    if blk is None:
        return RankCertificate(False, "structural", True, failure="monad is not of shape (c, 2+2c, c)")
    c = blk.c
    minors = []
    bases: dict[str, list[MultiPoly]] = {"alpha": [], "beta": []}
    for which, label, sub in extreme_minors(blk):
        det = poly_det(sub)
        entries = sorted({x for row in sub for x in row if x}, key=str)
        base = _pure_power_base(det, entries + [-x for x in entries], c)
        minors.append({"map": which, "minor": label, "det": str(det), "power_of": str(base) if base else None})
        if base is None:
            return RankCertificate(
                False, "structural", True, minors,
                failure=f"{label}: determinant {det} is not a {c}-th power of a linear form",
            )
        bases[which].append(base)
    for which in ("beta", "alpha"):
        locus = residual_locus(bases[which], m.spec.f)
        if locus.meets_x:
            return RankCertificate(
                False, "structural", True, minors, locus.witness(),
                failure=f"common zero locus of the {which} minors meets X",
            )
    locus = residual_locus(bases["beta"], m.spec.f)
    return RankCertificate(True, "structural", True, minors, locus.witness())


def linear_solve_variable(f: MultiPoly) -> int | None:
    """Index i such that f = x_i g + h with g, h free of x_i, if any."""
    for i in range(5):
        exps = [e[i] for e, _ in f.items()]
        if max(exps) == 1:
            return i
    return None


def random_point_on(f: MultiPoly, rng: random.Random, bound: int = 50) -> tuple[Fraction, ...] | None:
    i = linear_solve_variable(f)
    if i is None:
        return None
    while True:
        pt = [Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(5)]
        pt[i] = Fraction(0)
        g = MultiPoly({tuple(k - (j == i) for j, k in enumerate(e)): cf for e, cf in f.items() if e[i] == 1})
        h = MultiPoly({e: cf for e, cf in f.items() if e[i] == 0})
        gv = g.evaluate(pt)
        if gv:
            pt[i] = -h.evaluate(pt) / gv
            return tuple(pt)


def evaluate_matrix(M: PolyMatrix, point) -> ExactMatrix:
    cols = len(M[0]) if M else 0
    return ExactMatrix([[x.evaluate(point) for x in row] for row in M], cols)


def _probabilistic(m: LinearMonad, n_points: int, seed: int) -> RankCertificate:
    f = m.spec.f
    if linear_solve_variable(f) is None:
        return RankCertificate(
            False, "probabilistic", False,
            failure="unavailable: equation is not linear in any variable, no exact points can be sampled",
        )
    rng = random.Random(seed)
    a, _, c = m.signature.as_tuple()
    for k in range(n_points):
        pt = random_point_on(f, rng)
        rb = rank(evaluate_matrix(m.beta, pt))
        ra = rank(evaluate_matrix(m.alpha, pt))
        if rb != c or ra != a:
            return RankCertificate(
                False, "probabilistic", False, locus={"point": [str(x) for x in pt], "rank_beta": rb, "rank_alpha": ra},
                failure="rank drop found", points_checked=k + 1,
            )
    return RankCertificate(True, "probabilistic", False, failure=None, points_checked=n_points)


def check_ranks(m: LinearMonad, strategy: str = "structural", n_points: int = 50, seed: int = 0) -> RankCertificate:
    """Maximal rank of alpha and beta at every point of X.

    ``structural`` is a proof for block-shaped monads: every c x c minor
    vanishing forces the minors listed by :func:`extreme_minors` to vanish,
    which are c-th powers of linear forms whose common zeros must miss X.
    ``probabilistic`` only samples exact points and never certifies.
    """
    if strategy == "structural":
        return _structural(m)
    if strategy == "probabilistic":
        return _probabilistic(m, n_points, seed)
    raise ValueError(f"unknown strategy {strategy!r}")
