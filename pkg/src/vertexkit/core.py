"""Exact rational scalars, vectors and matrices.

Everything downstream (step-size matrices, polynomial invariants, proof
multipliers) is rational, so all construction and verification arithmetic
here is exact: theorem checks become equality tests.  Floating point is
confined to the iteration runtime in :mod:`vertexkit.algorithms`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

try:
    from gmpy2 import mpq as _ratio
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as _ratio

# Canonical rational scalar: always lowest terms, positive denominator.
Rational = _ratio
RationalLike = Union[int, str, Rational]

ZERO = _ratio(0)
ONE = _ratio(1)

_DEFAULT_MAX_N = 256


class SizeCapError(ValueError):
    """Exact-arithmetic object exceeds the configured size cap."""


class SingularMatrixError(ValueError):
    """Elimination found no nonzero pivot."""


def max_exact_n() -> int:
    """Size cap for exact-mode objects, from VERTEXKIT_MAX_N (default 256)."""
    raw = os.environ.get("VERTEXKIT_MAX_N", "")
    return int(raw) if raw else _DEFAULT_MAX_N


def rat(value: RationalLike = 0, den: int | None = None) -> Rational:
    """Coerce to an exact rational; ``rat("2/3")``, ``rat(2, 3)`` and
    ``rat(5)`` all work."""
    if den is not None:
        return _ratio(value, den)
    if isinstance(value, str):
        return _ratio(value)
    return _ratio(value)


def rat_str(q: Rational) -> str:
    """Canonical wire form: ``"p/q"``, or ``"p"`` when the denominator is 1."""
    return str(q)


def binomial(n: int, k: int) -> Rational:
    """Exact binomial coefficient; 0 when k < 0 or k > n."""
    if n < 0:
        raise ValueError(f"binomial needs n >= 0, got {n}")
    if k < 0 or k > n:
        return ZERO
    return _ratio(math.comb(n, k))


@dataclass(frozen=True)
class RVector:
    """Fixed-length vector of exact rationals."""

    entries: tuple[Rational, ...]

    @classmethod
    def of(cls, items: Iterable[RationalLike]) -> "RVector":
        return cls(tuple(rat(x) for x in items))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Rational:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __add__(self, other: "RVector") -> "RVector":
        return RVector(tuple(a + b for a, b in zip(self.entries, other.entries, strict=True)))

    def __sub__(self, other: "RVector") -> "RVector":
        return RVector(tuple(a - b for a, b in zip(self.entries, other.entries, strict=True)))

    def __neg__(self) -> "RVector":
        return RVector(tuple(-a for a in self.entries))

    def scale(self, c: RationalLike) -> "RVector":
        c = rat(c)
        return RVector(tuple(c * a for a in self.entries))

    def dot(self, other: "RVector") -> Rational:
        return sum((a * b for a, b in zip(self.entries, other.entries, strict=True)), ZERO)


@dataclass(frozen=True)
class RMatrix:
    """Dense rectangular matrix of exact rationals; equality is entrywise."""

    rows: tuple[tuple[Rational, ...], ...]

    def __post_init__(self):
        if self.rows:
            width = len(self.rows[0])
            if any(len(r) != width for r in self.rows):
                raise ValueError("ragged rows in RMatrix")

    @classmethod
    def of(cls, rows: Iterable[Iterable[RationalLike]]) -> "RMatrix":
        return cls(tuple(tuple(rat(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "RMatrix":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RMatrix":
        return cls(tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def entry(self, i: int, j: int) -> Rational:
        return self.rows[i][j]

    def row(self, i: int) -> RVector:
        return RVector(self.rows[i])

    def col(self, j: int) -> RVector:
        return RVector(tuple(r[j] for r in self.rows))

    def transpose(self) -> "RMatrix":
        return RMatrix(tuple(zip(*self.rows))) if self.rows else self

    def __add__(self, other: "RMatrix") -> "RMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return RMatrix(tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)))

    def __sub__(self, other: "RMatrix") -> "RMatrix":
        return self + other.scale(-1)

    def __neg__(self) -> "RMatrix":
        return self.scale(-1)

    def scale(self, c: RationalLike) -> "RMatrix":
        c = rat(c)
        return RMatrix(tuple(tuple(c * a for a in row) for row in self.rows))

    def matmul(self, other: "RMatrix") -> "RMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.transpose().rows
        return RMatrix(
            tuple(
                tuple(sum((a * b for a, b in zip(row, col)), ZERO) for col in cols)
                for row in self.rows
            )
        )

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        return self.matmul(other)

    def matvec(self, v: RVector | Sequence[RationalLike]) -> RVector:
        vv = v if isinstance(v, RVector) else RVector.of(v)
        if self.ncols != len(vv):
            raise ValueError(f"cannot apply {self.shape} to length-{len(vv)} vector")
        return RVector(tuple(sum((a * b for a, b in zip(row, vv.entries)), ZERO) for row in self.rows))

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.rows for a in row)


def solve_linear(a: RMatrix, b: RVector | Sequence[RationalLike]) -> RVector:
    """Exact solve of A x = b by Gaussian elimination.

    Pivoting takes the first nonzero entry in column order; over exact
    rationals no magnitude pivoting is needed and this keeps the
    elimination deterministic.
    """
    bb = b if isinstance(b, RVector) else RVector.of(b)
    n = a.nrows
    if a.ncols != n:
        raise ValueError(f"solve_linear needs a square matrix, got {a.shape}")
    if len(bb) != n:
        raise ValueError(f"dimension mismatch: {a.shape} vs length-{len(bb)} rhs")
    m = [list(row) + [bb[i]] for i, row in enumerate(a.rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"no nonzero pivot in column {col}")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f == 0:
                continue
            for c in range(col, n + 1):
                m[r][c] -= f * m[col][c]
    x = [ZERO] * n
    for r in range(n - 1, -1, -1):
        s = m[r][n] - sum((m[r][c] * x[c] for c in range(r + 1, n)), ZERO)
        x[r] = s / m[r][r]
    return RVector(tuple(x))


def invert(a: RMatrix) -> RMatrix:
    """Exact inverse by Gauss-Jordan elimination; A @ invert(A) == I."""
    n = a.nrows
    if a.ncols != n:
        raise ValueError(f"invert needs a square matrix, got {a.shape}")
    m = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a.rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"no nonzero pivot in column {col}")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r == col or m[r][col] == 0:
                continue
            f = m[r][col]
            m[r] = [v - f * p for v, p in zip(m[r], m[col])]
    return RMatrix(tuple(tuple(row[n:]) for row in m))


def pascal_S(r: int) -> RMatrix:
    """r x r signed Pascal matrix with (a,b) entry (-1)^(a+b) C(a+b-1, a-1).

    Unimodular (det = 1); its leading principal minors are all 1 and its
    inverse carries plain binomial rows/columns, which the pattern solver
    in :mod:`vertexkit.vertex` leans on.
    """
    if r < 1:
        raise ValueError(f"pascal_S needs r >= 1, got {r}")
    sign = lambda a, b: ONE if (a + b) % 2 == 0 else -ONE
    return RMatrix(
        tuple(
            tuple(sign(a, b) * binomial(a + b - 1, a - 1) for b in range(1, r + 1))
            for a in range(1, r + 1)
        )
    )


def pascal_R(r: int) -> RMatrix:
    """(r+1) x r factor with (a,b) entry (-1)^(b-1) C(b, a-1).

    transpose(R) @ R has (i,j) entry (-1)^(i+j) C(i+j, i), the symmetric
    positive definite Pascal form.
    """
    if r < 1:
        raise ValueError(f"pascal_R needs r >= 1, got {r}")
    sign = lambda b: ONE if (b - 1) % 2 == 0 else -ONE
    return RMatrix(
        tuple(
            tuple(sign(b) * binomial(b, a - 1) for b in range(1, r + 1))
            for a in range(1, r + 2)
        )
    )
