"""The hypersurface X of degree d in P^n.

Tangent Chern classes, the integral cohomology ring of a 3-fold
hypersurface in P^4, and closed forms for h^p(O_X(k)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .exact import ExactMatrix, MultiPoly, fermat, nullspace, rank


def _binom4(m: int) -> int:
    # C(m, 4) with C(m, 4) = 0 for m < 4
    return comb(m, 4) if m >= 4 else 0


def _chi_p4(m: int) -> Fraction:
    return Fraction((m + 1) * (m + 2) * (m + 3) * (m + 4), 24)


@dataclass(frozen=True)
class ResidualLocus:
    """Common zero locus in P^4 of a set of linear forms, intersected with X."""

    dimension: int  # projective dimension of the linear locus, -1 if empty
    spanning_points: tuple[tuple[Fraction, ...], ...]
    meets_x: bool
    f_value: Fraction | None = None  # f at the point, when the locus is a point

    def witness(self) -> dict:
        pts = [[str(x) for x in p] for p in self.spanning_points]
        if self.dimension == 0:
            return {"locus": "point", "point": pts[0], "f_value": str(self.f_value)}
        return {
            "locus": f"linear subspace of dimension {self.dimension}",
            "spanned_by": pts,
            "reason": "every positive-dimensional linear subspace of P^4 meets a hypersurface",
        }


def residual_locus(forms, f: MultiPoly) -> ResidualLocus:
    """Decide whether the common zeros of the linear ``forms`` meet {f = 0}."""
    rows = [[form.coefficient(tuple(int(i == j) for j in range(5))) for i in range(5)] for form in forms]
    if any(form.degree not in (1, None) for form in forms):
        raise ValueError("forms must be linear")
    if not rows:
        raise ValueError("need at least one linear form")
    kernel = nullspace(ExactMatrix(rows, 5))
    if not kernel:
        return ResidualLocus(-1, (), False)
    dim = len(kernel) - 1
    pts = tuple(tuple(v) for v in kernel)
    if dim == 0:
        value = f.evaluate(pts[0])
        return ResidualLocus(0, pts, value == 0, value)
    return ResidualLocus(dim, pts, True)


@dataclass(frozen=True)
class HypersurfaceSpec:
    """A degree-``d`` hypersurface in P^n with four chosen linear sections.

    ``f`` and ``sections`` are only used for symbolic work on 3-folds
    (n = 4).  Construction validates homogeneity and degrees; independence
    of the sections and emptiness of their common zero locus on X are
    reported by :meth:`residual` so degenerate inputs can be examined.
    """

    d: int
    n: int = 4
    f: MultiPoly | None = None
    sections: tuple[MultiPoly, ...] = ()
    equation_source: str = field(default="fermat", compare=False)

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("ambient dimension must be at least 4")
        if self.d < 1:
            raise ValueError("degree must be at least 1")
        if self.f is not None:
            if self.n != 4:
                raise ValueError("symbolic data is only supported for n = 4")
            if self.f.degree != self.d:
                raise ValueError(f"equation has degree {self.f.degree}, expected {self.d}")
        if self.sections:
            if len(self.sections) != 4:
                raise ValueError("exactly four sections are required")
            if any(s.degree != 1 for s in self.sections):
                raise ValueError("sections must be nonzero linear forms")
        object.__setattr__(self, "sections", tuple(self.sections))

    @classmethod
    def fermat(cls, d: int) -> HypersurfaceSpec:
        """Fermat hypersurface with coordinate sections x1, x2, x3, x4."""
        return cls(d=d, n=4, f=fermat(d), sections=tuple(MultiPoly.var(i) for i in range(1, 5)))

    @property
    def is_fermat(self) -> bool:
        return self.f == fermat(self.d)

    @property
    def canonical_twist(self) -> int:
        """The k with omega_X = O_X(k)."""
        return self.d - self.n - 1

    def require_symbolic(self) -> None:
        if self.f is None or len(self.sections) != 4:
            raise ValueError("hypersurface has no equation/sections for symbolic work")

    def sections_independent(self) -> bool:
        self.require_symbolic()
        rows = [[s.coefficient(tuple(int(i == j) for j in range(5))) for i in range(5)] for s in self.sections]
        return rank(ExactMatrix(rows, 5)) == 4

    def residual(self) -> ResidualLocus:
        self.require_symbolic()
        return residual_locus(self.sections, self.f)


@dataclass(frozen=True)
class CanonicalData:
    twist: int

    @property
    def kind(self) -> str:
        if self.twist < 0:
            return "Fano"
        if self.twist == 0:
            return "trivial canonical"
        return "general type"


def canonical_data(spec: HypersurfaceSpec) -> CanonicalData:
    return CanonicalData(spec.canonical_twist)


# --- line bundle cohomology ---------------------------------------------------


def _require_threefold(spec: HypersurfaceSpec) -> None:
    if spec.n != 4:
        raise ValueError("line bundle cohomology is implemented for n = 4 only")


def h0_line(d: int, k: int) -> int:
    """h^0(O_X(k)) for a degree-d hypersurface in P^4."""
    return _binom4(k + 4) - _binom4(k - d + 4)


def line_cohomology(spec: HypersurfaceSpec, p: int, k: int) -> int:
    """h^p(O_X(k)) on a 3-fold hypersurface."""
    _require_threefold(spec)
    if p == 0:
        return h0_line(spec.d, k)
    if p in (1, 2):
        return 0
    if p == 3:
        return h0_line(spec.d, spec.d - 5 - k)
    raise ValueError(f"cohomological degree {p} outside [0, 3]")


def euler_char(spec: HypersurfaceSpec, k: int) -> int:
    """chi(O_X(k)) = chi(O_P4(k)) - chi(O_P4(k - d)) as polynomials in k."""
    _require_threefold(spec)
    chi = _chi_p4(k) - _chi_p4(k - spec.d)
    assert chi.denominator == 1
    return int(chi)


# --- tangent bundle and the cohomology ring ----------------------------------


def tangent_c1_coefficient(n: int, d: int) -> int:
    return n + 1 - d


def tangent_c2_coefficient(n: int, d: int) -> int:
    """Coefficient of H^2 in c2(TX) for X of degree d in P^n."""
    return d * d - (n + 1) * d + n * (n + 1) // 2


_DEG = (0, 1, 2, 3)  # degree in H of the basis 1, H, L, T


@dataclass(frozen=True)
class CohomClass:
    """Element r0 + r1 H + r2 L + r3 T of Z[H,L,T]/(L^2, T^2, H^2 - dL, HL - T)."""

    coeffs: tuple[Fraction, Fraction, Fraction, Fraction]
    d: int

    def __post_init__(self):
        c = tuple(Fraction(x) for x in self.coeffs)
        if len(c) != 4:
            raise ValueError("need four coefficients (1, H, L, T)")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, i: int, d: int, coeff=1) -> CohomClass:
        c = [0, 0, 0, 0]
        c[i] = coeff
        return cls(tuple(c), d)

    @classmethod
    def one(cls, d: int) -> CohomClass:
        return cls.basis(0, d)

    @classmethod
    def H(cls, d: int) -> CohomClass:
        return cls.basis(1, d)

    @classmethod
    def L(cls, d: int) -> CohomClass:
        return cls.basis(2, d)

    @classmethod
    def T(cls, d: int) -> CohomClass:
        return cls.basis(3, d)

    def _check(self, other: CohomClass) -> None:
        if self.d != other.d:
            raise ValueError(f"ring mismatch: d={self.d} vs d={other.d}")

    def __add__(self, other: CohomClass) -> CohomClass:
        self._check(other)
        return CohomClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.d)

    def __sub__(self, other: CohomClass) -> CohomClass:
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CohomClass(tuple(a * other for a in self.coeffs), self.d)
        if not isinstance(other, CohomClass):
            return NotImplemented
        return ring_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CohomClass:
        out = CohomClass.one(self.d)
        for _ in range(k):
            out = ring_mul(out, self)
        return out

    def __str__(self) -> str:
        names = ("", "H", "L", "T")
        parts = [f"{c}{'*' + n if n else ''}" if n else str(c) for c, n in zip(self.coeffs, names) if c]
        return " + ".join(parts) or "0"


def _basis_product(i: int, j: int, d: int) -> tuple[int, int] | None:
    if _DEG[i] + _DEG[j] > 3:
        return None
    if i == 0:
        return j, 1
    if j == 0:
        return i, 1
    if i == j == 1:
        return 2, d  # H^2 = dL
    return 3, 1  # HL = LH = T


def ring_mul(x: CohomClass, y: CohomClass) -> CohomClass:
    x._check(y)
    out = [Fraction(0)] * 4
    for i, a in enumerate(x.coeffs):
        if not a:
            continue
        for j, b in enumerate(y.coeffs):
            if not b:
                continue
            prod = _basis_product(i, j, x.d)
            if prod is not None:
                k, m = prod
                out[k] += a * b * m
    return CohomClass(tuple(out), x.d)


def integrate(x: CohomClass) -> Fraction:
    """Degree of the top-dimensional part (the T coefficient)."""
    return x.coeffs[3]


def tangent_c1(spec: HypersurfaceSpec) -> CohomClass:
    _require_threefold(spec)
    return CohomClass.H(spec.d) * tangent_c1_coefficient(spec.n, spec.d)


def tangent_c2(spec: HypersurfaceSpec) -> CohomClass:
    """c2(TX) as an element of the cohomology ring (coefficient times H^2 = dL)."""
    _require_threefold(spec)
    H = CohomClass.H(spec.d)
    return (H * H) * tangent_c2_coefficient(spec.n, spec.d)
