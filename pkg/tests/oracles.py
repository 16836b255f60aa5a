"""Independent oracles for tests: sympy conversions and brute-force counts."""
import itertools
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from monadws.exact import MultiPoly

X = sympy.symbols("x0:5")


def to_sympy(p: MultiPoly):
    return sum((sympy.Rational(c.numerator, c.denominator) * sympy.prod([X[i] ** e[i] for i in range(5)])
                for e, c in p.items()), sympy.Integer(0))


def from_sympy(expr) -> MultiPoly:
    poly = sympy.Poly(sympy.expand(expr), *X)
    return MultiPoly({m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms() if c != 0}) if not poly.is_zero else MultiPoly()


def brute_h0(d: int, k: int) -> int:
    """Monomials of degree k with x0-exponent below d: a basis of S/(f)_k for f monic in x0^d."""
    if k < 0:
        return 0
    return sum(1 for e in itertools.product(range(k + 1), repeat=4) if sum(e) <= k and k - sum(e) < d)


def sympy_rank(rows) -> int:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows]).rank()


def exponent(k: int):
    # a composition of k into five parts
    return st.lists(st.integers(0, k), min_size=4, max_size=4).map(
        lambda cuts: tuple(b - a for a, b in zip([0] + sorted(cuts), sorted(cuts) + [k]))
    )


def homogeneous(k: int, max_terms: int = 4):
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(exponent(k), coeff, max_size=max_terms).map(MultiPoly)


def nonzero_homogeneous(k: int, max_terms: int = 4):
    return homogeneous(k, max_terms).filter(lambda p: not p.is_zero())


def rational_matrix(max_rows: int = 5, max_cols: int = 5):
    entry = st.fractions(min_value=-3, max_value=3, max_denominator=3)
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )
