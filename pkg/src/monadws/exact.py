"""Exact arithmetic layer.

Sparse homogeneous polynomials in five variables x0..x4 with rational
coefficients, division by a single homogeneous relation, graded pieces of
the quotient ring S/(f), and exact rank computations over the rationals.

Rationals are :class:`fractions.Fraction` throughout; no floats appear
anywhere in this package.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

Rational = Fraction
NVARS = 5

Exponent = tuple[int, ...]


def _as_exponent(e: Iterable[int]) -> Exponent:
    e = tuple(int(x) for x in e)
    if len(e) != NVARS or any(x < 0 for x in e):
        raise ValueError(f"bad exponent vector {e!r}")
    return e


def divides(a: Exponent, b: Exponent) -> bool:
    """True if the monomial ``a`` divides the monomial ``b``."""
    return all(x <= y for x, y in zip(a, b))


class MultiPoly:
    """Homogeneous polynomial in x0..x4 stored as ``{exponent: coefficient}``.

    Zero coefficients are never stored and all stored exponents have the
    same total degree.  The zero polynomial has an empty term map and
    ``degree is None``.
    """

    __slots__ = ("_terms", "degree", "_hash")

    def __init__(self, terms: Mapping[Iterable[int], object] | None = None):
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[_as_exponent(e)] = c
        degrees = {sum(e) for e in clean}
        if len(degrees) > 1:
            raise ValueError(f"non-homogeneous polynomial (degrees {sorted(degrees)})")
        self._terms = clean
        self.degree = degrees.pop() if degrees else None
        self._hash = None

    # constructors

    @classmethod
    def var(cls, i: int) -> MultiPoly:
        e = [0] * NVARS
        e[i] = 1
        return cls({tuple(e): 1})

    @classmethod
    def const(cls, c) -> MultiPoly:
        return cls({(0,) * NVARS: c})

    @classmethod
    def monomial(cls, e: Iterable[int], c=1) -> MultiPoly:
        return cls({tuple(e): c})

    @classmethod
    def zero(cls) -> MultiPoly:
        return cls()

    # access

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        """Leading (exponent, coefficient) in graded lex order, x0 > ... > x4."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        # homogeneous, so graded lex reduces to lex on the exponent tuple
        e = max(self._terms)
        return e, self._terms[e]

    def coefficient(self, e: Iterable[int]) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        pt = [Fraction(v) for v in point]
        for e, c in self._terms.items():
            term = c
            for v, k in zip(pt, e):
                if k:
                    term *= v**k
            total += term
        return total

    # arithmetic

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other) if other else MultiPoly()
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> MultiPoly:
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other) if other else MultiPoly()
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            mono = "*".join(
                f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def fermat(d: int) -> MultiPoly:
    """x0^d + x1^d + x2^d + x3^d + x4^d."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return MultiPoly({tuple(d if j == i else 0 for j in range(NVARS)): 1 for i in range(NVARS)})


# --- polynomial text format -------------------------------------------------


def parse_poly(text: str) -> MultiPoly:
    """Parse ``<coeff p/q> e0 e1 e2 e3 e4`` lines; ``#`` comments are ignored."""
    terms: dict[Exponent, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != NVARS + 1:
            raise ValueError(f"line {lineno}: expected 6 fields, got {len(fields)}")
        try:
            coeff = Fraction(fields[0])
            e = _as_exponent(int(x) for x in fields[1:])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        terms[e] = terms.get(e, 0) + coeff
    return MultiPoly(terms)


def format_poly(p: MultiPoly) -> str:
    lines = []
    for e in sorted(p.terms, reverse=True):
        c = p.coefficient(e)
        lines.append(f"{c.numerator}/{c.denominator} " + " ".join(map(str, e)))
    return "\n".join(lines) + ("\n" if lines else "")


# --- quotient ring S/(f) ----------------------------------------------------


def poly_normal_form(p: MultiPoly, f: MultiPoly) -> MultiPoly:
    """Remainder of ``p`` on division by the single relation ``f``.

    No monomial of the result is divisible by the leading monomial of ``f``
    and the result agrees with ``p`` modulo ``(f)``.
    """
    if f.is_zero() or f.degree < 1:
        raise ValueError("relation must be a nonzero form of degree >= 1")
    lt, lc = f.leading_term()
    f_terms = list(f.items())
    rem = p.terms
    while True:
        divisible = [e for e in rem if divides(lt, e)]
        if not divisible:
            break
        e = max(divisible)
        q = rem[e] / lc
        shift = tuple(a - b for a, b in zip(e, lt))
        for fe, fc in f_terms:
            m = tuple(a + b for a, b in zip(fe, shift))
            v = rem.get(m, 0) - q * fc
            if v:
                rem[m] = v
            else:
                rem.pop(m, None)
    return MultiPoly(rem)


def monomials(k: int) -> list[Exponent]:
    """All degree-``k`` exponent vectors in five variables, grlex descending."""
    if k < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(NVARS), k):
        e = [0] * NVARS
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


@dataclass(frozen=True)
class GradedBasis:
    """Monomial basis of the degree-k piece of S/(f)."""

    degree: int
    monomials: tuple[Exponent, ...]
    leading: Exponent
    index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {m: i for i, m in enumerate(self.monomials)})

    def __len__(self) -> int:
        return len(self.monomials)

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def coordinates(self, p: MultiPoly) -> list[Fraction]:
        """Coordinates of a reduced degree-k polynomial in this basis."""
        vec = [Fraction(0)] * len(self.monomials)
        for e, c in p.items():
            try:
                vec[self.index[e]] = c
            except KeyError:
                raise ValueError(f"monomial {e} is not in the degree-{self.degree} basis") from None
        return vec


def graded_basis(k: int, f: MultiPoly) -> GradedBasis:
    lt, _ = f.leading_term()
    mons = tuple(m for m in monomials(k) if not divides(lt, m))
    return GradedBasis(k, mons, lt)


# --- exact matrices ---------------------------------------------------------


class ExactMatrix:
    """Dense matrix of rationals."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        self.entries = tuple(tuple(Fraction(x) for x in row) for row in entries)
        self.rows = len(self.entries)
        if cols is None:
            cols = len(self.entries[0]) if self.entries else 0
        self.cols = cols
        if any(len(r) != cols for r in self.entries):
            raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> ExactMatrix:
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    def transpose(self) -> ExactMatrix:
        return ExactMatrix([list(col) for col in zip(*self.entries)] if self.rows else [], self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols})"


def _integer_row(row: Iterable[Fraction]) -> list[int]:
    row = list(row)
    den = reduce(lcm, (x.denominator for x in row), 1)
    return [int(x * den) for x in row]


def _bareiss_rank(rows: list[list[int]], ncols: int) -> int:
    m = [r for r in rows if any(r)]
    nrows = len(m)
    rank, prev = 0, 1
    for col in range(ncols):
        if rank == nrows:
            break
        piv = next((i for i in range(rank, nrows) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        p = pr[col]
        for i in range(rank + 1, nrows):
            ri = m[i]
            a = ri[col]
            for j in range(col + 1, ncols):
                q, r = divmod(ri[j] * p - a * pr[j], prev)
                if r:
                    raise ArithmeticError("inexact Bareiss division")
                ri[j] = q
            ri[col] = 0
        prev = p
        rank += 1
    return rank


def _sparse_rank(rows: Iterable[dict[int, int]]) -> int:
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = {j: v for j, v in row.items() if v}
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                g = reduce(gcd, row.values())
                pivots[lead] = {j: v // g for j, v in row.items()}
                break
            a, p = row[lead], prow[lead]
            new = {j: v * p for j, v in row.items()}
            for j, v in prow.items():
                w = new.get(j, 0) - a * v
                if w:
                    new[j] = w
                else:
                    new.pop(j, None)
            if new:
                g = reduce(gcd, new.values())
                if g > 1:
                    new = {j: v // g for j, v in new.items()}
            row = new
    return len(pivots)


def rank(M: ExactMatrix, method: str = "bareiss") -> int:
    """Exact rank over Q.

    ``method="bareiss"`` runs fraction-free elimination on the dense matrix;
    ``method="sparse"`` eliminates row by row on dictionaries, which is much
    faster on the multiplication matrices built in :mod:`monadws.sections`.
    """
    if M.rows == 0 or M.cols == 0:
        return 0
    rows = [_integer_row(r) for r in M.entries]
    if method == "bareiss":
        return _bareiss_rank(rows, M.cols)
    if method == "sparse":
        return _sparse_rank({j: v for j, v in enumerate(r) if v} for r in rows)
    raise ValueError(f"unknown rank method {method!r}")


def kernel_dim(M: ExactMatrix, method: str = "bareiss") -> int:
    return M.cols - rank(M, method)


def nullspace(M: ExactMatrix) -> list[list[Fraction]]:
    """Basis of the right kernel, from the reduced row echelon form."""
    m = [list(r) for r in M.entries]
    pivot_cols = []
    r = 0
    for col in range(M.cols):
        piv = next((i for i in range(r, M.rows) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(M.rows):
            if i != r and m[i][col]:
                a = m[i][col]
                m[i] = [x - a * y for x, y in zip(m[i], m[r])]
        pivot_cols.append(col)
        r += 1
    free = [j for j in range(M.cols) if j not in set(pivot_cols)]
    basis = []
    for fj in free:
        v = [Fraction(0)] * M.cols
        v[fj] = Fraction(1)
        for i, pc in enumerate(pivot_cols):
            v[pc] = -m[i][fj]
        basis.append(v)
    return basis


class SparseRows:
    """Row-dictionary matrix used when assembling large multiplication maps."""

    def __init__(self, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self.data: list[dict[int, Fraction]] = [dict() for _ in range(rows)]

    def add(self, i: int, j: int, v) -> None:
        if not v:
            return
        row = self.data[i]
        w = row.get(j, 0) + v
        if w:
            row[j] = w
        else:
            row.pop(j, None)

    def to_dense(self) -> ExactMatrix:
        return ExactMatrix(
            [[row.get(j, 0) for j in range(self.cols)] for row in self.data], self.cols
        )

    def rank(self) -> int:
        if not self.rows or not self.cols:
            return 0
        out = []
        for row in self.data:
            den = reduce(lcm, (v.denominator for v in row.values()), 1)
            out.append({j: int(v * den) for j, v in row.items()})
        return _sparse_rank(out)


# --- polynomial determinants -------------------------------------------------


def poly_det(matrix: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant of a square matrix of polynomials.

    Laplace expansion along rows, memoised on the set of remaining columns,
    so banded or triangular inputs stay cheap up to n of a dozen or so.
    """
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("matrix is not square")
    if n == 0:
        return MultiPoly.const(1)
    memo: dict[tuple[int, ...], MultiPoly] = {}

    def minor(row: int, cols: tuple[int, ...]) -> MultiPoly:
        if row == n:
            return MultiPoly.const(1)
        hit = memo.get(cols)
        if hit is not None:
            return hit
        total = MultiPoly()
        for pos, j in enumerate(cols):
            entry = matrix[row][j]
            if entry.is_zero():
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1 :])
            if sub.is_zero():
                continue
            term = entry * sub
            total = total + (term if pos % 2 == 0 else -term)
        memo[cols] = total
        return total

    return minor(0, tuple(range(n)))
