"""Polynomial invariants and proof certificates of step-size matrices.

An (N-1)x(N-1) lower-triangular step matrix H drives the fixed-point
iteration y_{k+1} = y_k - sum_j h_{k+1,j+1} (y_j - T y_j).  Its Q-values
are sums of ordered-index products of entries; the invariance equalities
pin the optimal family and the certificate multipliers lambda*_{k,j}
(all >= 0 exactly when H is optimal) are the proof of the 4/N^2 rate.
Everything here is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import (
    ONE,
    ZERO,
    RMatrix,
    Rational,
    RationalLike,
    RVector,
    SizeCapError,
    binomial,
    max_exact_n,
    rat,
    rat_str,
)


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class HMatrix:
    """Lower-triangular step matrix; row k holds h_{k,1..k}, 1-indexed.

    N = 1 is the empty 0x0 matrix [ ].
    """

    rows: tuple[tuple[Rational, ...], ...]

    def __post_init__(self):
        for k, row in enumerate(self.rows, start=1):
            if len(row) != k:
                raise ValueError(f"row {k} must have {k} entries, got {len(row)}")
        if self.n > max_exact_n():
            raise SizeCapError(
                f"N={self.n} exceeds exact-size cap {max_exact_n()} (set VERTEXKIT_MAX_N to raise)"
            )

    @classmethod
    def of(cls, rows: Iterable[Iterable[RationalLike]]) -> "HMatrix":
        return cls(tuple(tuple(rat(x) for x in row) for row in rows))

    @classmethod
    def empty(cls) -> "HMatrix":
        return cls(())

    @property
    def size(self) -> int:
        """Matrix dimension N-1."""
        return len(self.rows)

    @property
    def n(self) -> int:
        """Horizon N (node count of the arc diagram)."""
        return len(self.rows) + 1

    def entry(self, k: int, j: int) -> Rational:
        """h_{k,j} for 1 <= j <= k <= N-1; zero above the diagonal."""
        if not (1 <= k <= self.size and 1 <= j <= self.size):
            raise IndexError(f"({k},{j}) out of range for size {self.size}")
        return self.rows[k - 1][j - 1] if j <= k else ZERO

    def column_sum(self, j: int, upto: int | None = None) -> Rational:
        """sum_{l=j}^{upto} h_{l,j}; upto defaults to N-1."""
        hi = self.size if upto is None else upto
        return sum((self.rows[l - 1][j - 1] for l in range(j, hi + 1)), ZERO)

    def scale(self, c: RationalLike) -> "HMatrix":
        c = rat(c)
        return HMatrix(tuple(tuple(c * v for v in row) for row in self.rows))

    def add(self, other: "HMatrix") -> "HMatrix":
        if self.size != other.size:
            raise DimensionMismatchError(f"size {self.size} vs {other.size}")
        return HMatrix(
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows))
        )

    def with_entry(self, k: int, j: int, value: RationalLike) -> "HMatrix":
        rows = [list(r) for r in self.rows]
        rows[k - 1][j - 1] = rat(value)
        return HMatrix(tuple(tuple(r) for r in rows))

    def to_json(self) -> dict:
        return {"n": self.n, "rows": [[rat_str(v) for v in row] for row in self.rows]}

    @classmethod
    def from_json(cls, data: Mapping) -> "HMatrix":
        h = cls.of(data["rows"])
        if h.n != data["n"]:
            raise ValueError(f"JSON says n={data['n']} but rows give n={h.n}")
        return h


@dataclass(frozen=True)
class QProfile:
    """Q(m,j) for 1 <= m <= N-1, 1 <= j <= N-m; zero by convention beyond."""

    n: int
    values: tuple[tuple[Rational, ...], ...]  # values[m-1][j-1]

    def q(self, m: int, j: int) -> Rational:
        if m < 1 or j < 1:
            raise IndexError(f"Q indices start at 1, got ({m},{j})")
        if m + j > self.n:
            return ZERO
        return self.values[m - 1][j - 1]

    def column(self, j: int) -> tuple[Rational, ...]:
        """(Q(1,j), ..., Q(N-j,j))."""
        return tuple(self.values[m - 1][j - 1] for m in range(1, self.n - j + 1))


@dataclass(frozen=True)
class CertificateSet:
    """Proof multipliers lambda*_{k,j} for 1 <= j < k <= N, nonzeros only.

    ``certified`` records whether H satisfied invariance when these values
    were produced; without it they are formal values, not a proof.
    """

    n: int
    entries: tuple[tuple[int, int, Rational], ...]
    certified: bool = True
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: (e[0], e[1]))))
        object.__setattr__(self, "_index", {(k, j): v for k, j, v in self.entries})

    def value(self, k: int, j: int) -> Rational:
        if not (1 <= j < k <= self.n):
            raise IndexError(f"need 1 <= j < k <= {self.n}, got ({k},{j})")
        return self._index.get((k, j), ZERO)

    def nonzeros(self) -> tuple[tuple[int, int, Rational], ...]:
        return self.entries

    def total(self) -> Rational:
        return sum((v for _, _, v in self.entries), ZERO)

    def all_nonnegative(self) -> bool:
        return all(v >= 0 for _, _, v in self.entries)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [{"k": k, "j": j, "value": rat_str(v)} for k, j, v in self.entries],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CertificateSet":
        return cls(
            n=data["n"],
            entries=tuple((e["k"], e["j"], rat(e["value"])) for e in data["entries"]),
            certified=data.get("certified", True),
        )


@dataclass(frozen=True)
class LambdaMatrix:
    """Symmetric N x N matrix -E_NN - L(G): off-diagonals are lambda*,
    diagonals chosen so the row sums give -e_N."""

    n: int
    matrix: RMatrix

    def off_diagonal(self, k: int, j: int) -> Rational:
        if k == j:
            raise IndexError("off_diagonal needs k != j")
        return self.matrix.entry(k - 1, j - 1)


@dataclass(frozen=True)
class ProofWitness:
    """Free inputs of the proof template: a base point and N slope vectors.

    The iterate and resolvent sequences are reproduced from (y0, g, H)
    inside :func:`verify_proof_identity`.
    """

    y0: RVector
    g: tuple[RVector, ...]

    def dimension(self) -> int:
        dims = {len(self.y0), *(len(v) for v in self.g)}
        if len(dims) != 1:
            raise DimensionMismatchError(f"inconsistent witness dimensions {sorted(dims)}")
        return dims.pop()


def q_functions(h: HMatrix) -> QProfile:
    """All Q(m,j) of H via the partial-column-sum recurrence.

    Q(1,j) is the column sum; Q(m+1,j) = sum_{k>j} Q(m,k) * (partial sum of
    column j up to row k-1).  O(N^3) scalar operations; the exponential
    ordered-product definition is kept as a test oracle only.
    """
    n = h.n
    if n == 1:
        return QProfile(1, ())
    # part[j][k] = sum_{l=j}^{k} h_{l,j} for k = j..N-1 (zero below k < j).
    part: dict[int, dict[int, Rational]] = {}
    for j in range(1, n):
        acc = ZERO
        sums: dict[int, Rational] = {}
        for l in range(j, n):
            acc = acc + h.entry(l, j)
            sums[l] = acc
        part[j] = sums
    values: list[tuple[Rational, ...]] = [tuple(part[j][n - 1] for j in range(1, n))]
    for m in range(2, n):
        prev = values[-1]  # Q(m-1, .)
        cur = []
        for j in range(1, n - m + 1):
            s = ZERO
            for k in range(j + 1, n - m + 2):  # Q(m-1,k) vanishes past N-m+1
                qmk = prev[k - 1]
                if qmk != 0:
                    s += qmk * part[j][k - 1]
            cur.append(s)
        values.append(tuple(cur))
    return QProfile(n, tuple(values))


def _invariant_profile(q: QProfile) -> bool:
    n = q.n
    for k in range(1, n):
        total = sum((q.q(k, j) for j in range(1, n - k + 1)), ZERO)
        if total * n != binomial(n, k + 1):
            return False
    return True


def check_invariance(h: HMatrix) -> bool:
    """True iff sum_j Q(k,j) = C(N,k+1)/N exactly for every k."""
    return _invariant_profile(q_functions(h))


def _signed_comb_rows(n: int) -> list[list[int]]:
    """rows[m][l] = (-1)^(l+m-1) C(l+m, m) for l = 0..n, built
    incrementally so no large binomial is computed twice."""
    rows = []
    for m in range(n):
        row = [0] * (n + 1)
        row[0] = 1 if m % 2 else -1
        c = 1
        for l in range(1, n + 1):
            c = c * (l + m) // l
            row[l] = -c if (l + m) % 2 == 0 else c
        rows.append(row)
    return rows


def certificates(h: HMatrix) -> CertificateSet:
    """H-certificates lambda*_{k,j} from the truncated alternating sums.

    The double sum for k < N is reassociated through a per-column
    transform a[j][m] = sum_l (-1)^(l+m-1) C(l+m,m) Q(l,j), so the whole
    table costs O(N^3) exact operations.  Values are produced even when H
    violates invariance, flagged uncertified.
    """
    n = h.n
    q = q_functions(h)
    cols = [()] + [q.column(j) for j in range(1, n)]
    combs = _signed_comb_rows(n)
    trans: list[list[Rational]] = [[]]
    for j in range(1, n):
        col = cols[j]
        width = n - j
        row = []
        for m in range(0, width):
            crow = combs[m]
            s = ZERO
            for l in range(1, width + 1):
                ql = col[l - 1]
                if ql != 0:
                    s += ql * crow[l]
            row.append(s)
        trans.append(row)
    entries: list[tuple[int, int, Rational]] = []
    for j in range(1, n):
        a = trans[j]
        lam_nj = n * a[0]
        if lam_nj != 0:
            entries.append((n, j, lam_nj))
        for k in range(j + 1, n):
            colk = cols[k]
            s = ZERO
            for m in range(1, n - k + 1):
                qm = colk[m - 1]
                if qm != 0:
                    s += a[m] * qm
            lam = n * s
            if lam != 0:
                entries.append((k, j, lam))
    return CertificateSet(n=n, entries=tuple(entries), certified=_invariant_profile(q))


def is_optimal(h: HMatrix) -> bool:
    """True iff H satisfies invariance and every certificate is >= 0."""
    if h.n == 1:
        return True
    cs = certificates(h)
    return cs.certified and cs.all_nonnegative()


def lambda_matrix(h: HMatrix, cs: CertificateSet | None = None) -> LambdaMatrix:
    """Negative certificate-graph Laplacian with 1 subtracted at (N,N)."""
    n = h.n
    if cs is None:
        cs = certificates(h)
        if not cs.certified:
            raise ValueError("lambda_matrix requires H-invariance")
    rows = [[ZERO] * n for _ in range(n)]
    for k, j, v in cs.nonzeros():
        rows[k - 1][j - 1] = v
        rows[j - 1][k - 1] = v
    for i in range(n):
        diag = -sum((rows[i][c] for c in range(n) if c != i), ZERO)
        if i == n - 1:
            diag -= 1
        rows[i][i] = diag
    return LambdaMatrix(n, RMatrix(tuple(tuple(r) for r in rows)))


def witness_sequences(h: HMatrix, w: ProofWitness) -> tuple[list[RVector], list[RVector]]:
    """Reproduce (y_0..y_{N-1}, x_1..x_N) from the witness, exactly."""
    n = h.n
    if len(w.g) != n:
        raise DimensionMismatchError(f"witness needs {n} slope vectors, got {len(w.g)}")
    w.dimension()
    ys = [w.y0]
    for k in range(0, n - 1):
        step = ys[k]
        for j in range(1, k + 2):
            c = 2 * h.entry(k + 1, j)
            if c != 0:
                step = step - w.g[j - 1].scale(c)
        ys.append(step)
    xs = [ys[j - 1] - w.g[j - 1] for j in range(1, n + 1)]
    return ys, xs


def verify_proof_identity(
    h: HMatrix, w: ProofWitness, cs: CertificateSet | None = None
) -> Rational:
    """Exact value of the proof identity; zero whenever H is certified.

    N<g_N,g_N> + <g_N, x_N - y_0> + sum_{k>j} lambda*_{k,j} <x_k - x_j, g_k - g_j>.
    Pass ``cs`` explicitly to evaluate against foreign multipliers.
    """
    n = h.n
    if cs is None:
        cs = certificates(h)
    ys, xs = witness_sequences(h, w)
    g_n = w.g[n - 1]
    total = rat(n) * g_n.dot(g_n) + g_n.dot(xs[n - 1] - w.y0)
    for k, j, lam in cs.nonzeros():
        total += lam * (xs[k - 1] - xs[j - 1]).dot(w.g[k - 1] - w.g[j - 1])
    return total


def _ones_lower(n: int) -> RMatrix:
    return RMatrix(tuple(tuple(ONE if j <= i else ZERO for j in range(n)) for i in range(n)))


def _shifted_embedding(h: HMatrix) -> RMatrix:
    """N x N matrix with row i+1 carrying row i of H and a zero diagonal."""
    n = h.n
    rows = [[ZERO] * n for _ in range(n)]
    for k in range(1, n):
        for j in range(1, k + 1):
            rows[k][j - 1] = h.entry(k, j)
    return RMatrix(tuple(tuple(r) for r in rows))


def verify_matrix_identity(h: HMatrix, lam: LambdaMatrix) -> bool:
    """Check N E_NN + L + L J H~ + (L J H~)^T == 0 exactly."""
    n = h.n
    if lam.n != n:
        raise DimensionMismatchError(f"Lambda has n={lam.n}, H has n={n}")
    big_j = _ones_lower(n)
    h_tilde = _shifted_embedding(h)
    ljh = lam.matrix @ big_j @ h_tilde
    acc = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc[i][j] = lam.matrix.entry(i, j) + ljh.entry(i, j) + ljh.entry(j, i)
    acc[n - 1][n - 1] += n
    return all(v == 0 for row in acc for v in row)


def rho(h: HMatrix) -> Rational:
    """Sum of all H-certificates: the sensitivity to nonexpansiveness
    violations (smaller is more robust; minimum N-1 over the optimal set)."""
    cs = certificates(h)
    if not cs.certified:
        raise ValueError("rho is defined through the proof template; H must satisfy invariance")
    return cs.total()
