"""Numeric Chern class bookkeeping for linear monads.

All quantities are exact: ranks and c1 are integers (multiples of H),
c2 and the discriminant are rationals (multiples of H^2 and H^3).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple

from .hypersurface import HypersurfaceSpec, tangent_c2_coefficient


@dataclass(frozen=True)
class MonadSignature:
    """Exponents (a, b, c) of O(-1)^a -> O^b -> O(1)^c."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a < 0 or self.c < 0 or self.b < 1:
            raise ValueError(f"invalid monad signature {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @classmethod
    def instanton(cls, c: int) -> MonadSignature:
        return cls(c, 2 + 2 * c, c)

    @property
    def is_instanton(self) -> bool:
        return self.a == self.c and self.b == 2 + 2 * self.c


@dataclass(frozen=True)
class BundleInvariants:
    rank: int
    c1: int
    c2: Fraction
    delta: Fraction


def discriminant(r: int, c1: int, c2) -> Fraction:
    """(2 r c2 - (r - 1) c1^2) / r^2."""
    if r < 1:
        raise ValueError("rank must be positive")
    return Fraction(2 * r * Fraction(c2) - (r - 1) * c1 * c1, r * r)


def cohomology_invariants(sig: MonadSignature) -> BundleInvariants:
    a, b, c = sig.as_tuple()
    if b <= a + c:
        raise ValueError(f"cohomology of {sig.as_tuple()} has non-positive rank")
    r = b - a - c
    c2 = Fraction(a * a - 2 * a * c + c * c + a + c, 2)
    delta = Fraction(b * (a + c) - 4 * a * c, r * r)
    return BundleInvariants(r, a - c, c2, delta)


def kernel_invariants(sig: MonadSignature) -> BundleInvariants:
    b, c = sig.b, sig.c
    if b <= c:
        raise ValueError(f"kernel of {sig.as_tuple()} has non-positive rank")
    r = b - c
    return BundleInvariants(r, -c, Fraction(c * c + c, 2), Fraction(b * c, r * r))


def dry_threshold(d: int, n: int = 4) -> Fraction:
    """(1/12) c2(TX) as a coefficient of H^3 (after dividing out H^3)."""
    return Fraction(tangent_c2_coefficient(n, d), 12)


@dataclass(frozen=True)
class DryVerdict:
    delta: Fraction
    threshold: Fraction

    @property
    def margin(self) -> Fraction:
        return self.delta - self.threshold

    @property
    def verdict(self) -> str:
        return "violated" if self.margin < 0 else "holds"


def dry_check(inv: BundleInvariants, spec: HypersurfaceSpec) -> DryVerdict:
    """Compare the discriminant with (1/12) c2(TX), both as coefficients of H^3."""
    if spec.n != 4:
        raise ValueError("the strong Bogomolov check is implemented for n = 4")
    return DryVerdict(inv.delta, dry_threshold(spec.d, spec.n))


class Slope(NamedTuple):
    degree: Fraction  # c1 . H^{n-1} / r, integrated (H^n = d on X)
    h_units: Fraction  # c1 / r


def slope(r: int, c1: int, spec: HypersurfaceSpec) -> Slope:
    if r < 1:
        raise ValueError("rank must be positive")
    return Slope(Fraction(c1 * spec.d, r), Fraction(c1, r))


def normalization_twist(r: int, c1: int) -> int:
    """The unique k with -r + 1 <= c1 + r k <= 0."""
    if r < 1:
        raise ValueError("rank must be positive")
    return (-c1) // r


def exterior_power_invariants(r: int, c1: int, q: int) -> tuple[int, int]:
    """(rank, c1) of the q-th exterior power of a rank-r bundle with first Chern class c1."""
    if q < 0:
        raise ValueError("q must be non-negative")
    if q > r:
        return 0, 0
    if q == 0:
        return 1, 0
    return comb(r, q), comb(r - 1, q - 1) * c1


def symmetric_power_invariants(r: int, c1: int, q: int) -> tuple[int, int]:
    if q == 0:
        return 1, 0
    if r == 0:
        return 0, 0
    return comb(r + q - 1, q), comb(r + q - 1, r) * c1


def floystad_min_b(a: int, c: int, n: int, reading: str = "dim-X") -> int:
    """Smallest b admitting a linear monad O(-1)^a -> O^b -> O(1)^c.

    ``reading="as-stated"`` applies the parity rule to the ambient dimension
    n; ``reading="dim-X"`` applies it to the hypersurface dimension n - 1.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    if reading == "as-stated":
        m = n
        return a + c + m - 2 if m % 2 else a + c + m - 1
    if reading == "dim-X":
        m = n - 1
        return a + c + m - 1 if m % 2 else a + c + m
    raise ValueError(f"unknown reading {reading!r}")


class S20Member(NamedTuple):
    value: int
    signature: MonadSignature


def s20_members(d: int, c_max: int) -> list[S20Member]:
    """Values c*d of c2 realized by stable rank-2 bundles with c1 = 0, c <= c_max."""
    if d < 1 or c_max < 1:
        raise ValueError("d and c_max must be positive")
    return [S20Member(c * d, MonadSignature.instanton(c)) for c in range(1, c_max + 1)]


def family_delta(c: int) -> Fraction:
    """Discriminant (2+2c)c/(2+c)^2 of the kernel of the (c, 2+2c, c) monad."""
    return Fraction((2 + 2 * c) * c, (2 + c) ** 2)


def delta_min_over_family(c_max: int) -> tuple[int, Fraction]:
    if c_max < 1:
        raise ValueError("c_max must be positive")
    # min over (delta, c) breaks ties toward the smallest c
    delta, c = min((family_delta(c), c) for c in range(1, c_max + 1))
    return c, delta
