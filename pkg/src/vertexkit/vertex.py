"""Construction of the unique optimal vertex algorithm for a sparsity pattern.

Two halves: the backward pattern solve that turns an arc diagram into the
Q-profile it forces (direction vectors v_j plus anti-diagonal scales q_j),
and the column-by-column recovery loop that turns a Q-profile back into
the step matrix H.  The inverse map reads the diagram off a vertex's
certificate support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import ONE, ZERO, Rational, binomial, rat
from .diagrams import ArcDiagram, validate
from .qcert import CertificateSet, HMatrix, QProfile, certificates, q_functions


class PatternSolveError(RuntimeError):
    """Internal failure of the pattern solve; never fires for valid patterns."""


class ZeroAntiDiagonalError(ValueError):
    pass


class NotAVertexError(ValueError):
    pass


@dataclass(frozen=True)
class PatternSolveState:
    """Positivity ledger of a pattern solve: normalized null directions v_j
    (last entry 1, all entries positive) and anti-diagonal scales q_j > 0."""

    n: int
    v: tuple[tuple[Rational, ...], ...]  # v[j-1], length N-j
    q: tuple[Rational, ...]  # q[j-1] = Q(N-j, j)

    def profile(self) -> QProfile:
        values = []
        for m in range(1, self.n):
            values.append(
                tuple(self.q[j - 1] * self.v[j - 1][m - 1] for j in range(1, self.n - m + 1))
            )
        return QProfile(self.n, tuple(values))


def pattern_solve(d: ArcDiagram) -> PatternSolveState:
    """Backward solve of the zero-certificate system for the pattern k(j).

    Runs the block recursion on M_j = (L_j S_{N-j})^(-1): each level refines
    M by a rank-one update built from one row of W^T W (W = R M), instead of
    re-inverting the lower-triangular system at every level.  All M entries
    stay positive, which is what forces the v_j and q_j positivity below.
    """
    if not validate(d):
        raise ValueError(f"invalid arc diagram: parent={d.parent}")
    n = d.n
    if n == 1:
        return PatternSolveState(1, (), ())
    vs: dict[int, tuple[Rational, ...]] = {n - 1: (ONE,)}
    if n == 2:
        return PatternSolveState(2, (vs[1],), (rat(1, 2),))

    # Level N-2 seeds: M = S_2^(-1), W = R_2 M.
    m_mat: list[list[Rational]] = [[rat(3), ONE], [rat(2), ONE]]
    w_mat: list[list[Rational]] = [[ONE, ZERO], [-ONE, -ONE], [rat(-2), -ONE]]

    def extract_v(level: int) -> tuple[Rational, ...]:
        a = n - d.k(level) + 1  # 1-based column of M_level
        col = [row[a - 1] for row in m_mat]
        if col[-1] <= 0:
            raise PatternSolveError(f"nonpositive normalizer at level {level}")
        v = tuple(x / col[-1] for x in col)
        if any(x <= 0 for x in v):
            raise PatternSolveError(f"nonpositive direction entry at level {level}")
        return v

    vs[n - 2] = extract_v(n - 2)
    for i in range(n - 3, -1, -1):
        size = n - i - 1  # dimension of M_{i+1}
        a = n - d.k(i + 1) + 1
        norm = m_mat[size - 1][a - 1]  # (m~_{i+1})_a, positive
        if norm <= 0:
            raise PatternSolveError(f"nonpositive pivot at level {i}")
        # m_i = (1/norm) * (column a of W)^T W
        col_a = [w_mat[r][a - 1] for r in range(size + 1)]
        m_i = [
            sum((col_a[r] * w_mat[r][c] for r in range(size + 1)), ZERO) / norm
            for c in range(size)
        ]
        if any(x <= 0 for x in m_i):
            raise PatternSolveError(f"nonpositive multiplier row at level {i}")
        # M_i = [[M + w_i m_i^T, w_i], [m_i^T, 1]]
        w_i = [binomial(n - i - 1, t) for t in range(size)]
        for r in range(size):
            row = m_mat[r]
            wr = w_i[r]
            m_mat[r] = [row[c] + wr * m_i[c] for c in range(size)] + [wr]
        m_mat.append(list(m_i) + [ONE])
        # W_i = [[W + s e_last m_i^T, s e_last], [s m_i^T, s]], s = (-1)^(N-i+1)
        s = ONE if (n - i + 1) % 2 == 0 else -ONE
        for r in range(size + 1):
            if r == size:
                w_mat[r] = [w_mat[r][c] + s * m_i[c] for c in range(size)] + [s]
            else:
                w_mat[r] = w_mat[r] + [ZERO]
        w_mat.append([s * x for x in m_i] + [s])
        if i >= 1:
            vs[i] = extract_v(i)

    # q-row: [1, q_{N-1}, ..., q_1] = (1/N) * (last row of M_0).
    tail = m_mat[n - 1]
    if tail[0] != n:
        raise PatternSolveError("pattern solve lost the binomial normalization")
    qs = tuple(tail[n - j] / n for j in range(1, n))  # q[j-1]
    if any(x <= 0 for x in qs):
        raise PatternSolveError("nonpositive anti-diagonal scale")
    return PatternSolveState(n, tuple(vs[j] for j in range(1, n)), qs)


def q_from_pattern(d: ArcDiagram) -> QProfile:
    """The unique Q-profile whose reconstructed H satisfies invariance and
    the certificate sparsity of d."""
    return pattern_solve(d).profile()


def recover_column(qfn: Callable[[int, int], Rational], n: int, k: int) -> list[Rational]:
    """Column k of the H recovered from Q-values: [h_{k,k}, ..., h_{N-1,k}].

    ``qfn(m, j)`` must supply exact Q-values for j >= k; the anti-diagonal
    values it returns must be nonzero.  This single loop is reused verbatim
    by the matrix gluing, which only ever rebuilds one bridging column.
    """
    if k == n - 1:
        return [qfn(1, k)]
    col = [qfn(n - k, k) / qfn(n - k - 1, k + 1)]
    prefix = [col[0]]  # prefix[t] = sum_{m=k}^{k+t} h_{m,k}
    for i in range(k + 1, n - 1):
        inner = ZERO
        for l in range(k + 1, i + 1):
            q_il = qfn(n - i - 1, l)
            if q_il != 0:
                inner += prefix[l - 1 - k] * q_il
        h_ik = (qfn(n - i, k) - inner) / qfn(n - i - 1, i + 1) - prefix[-1]
        col.append(h_ik)
        prefix.append(prefix[-1] + h_ik)
    col.append(qfn(1, k) - prefix[-1])
    return col


def h_from_q(q: QProfile) -> HMatrix:
    """The unique lower-triangular H with q_functions(H) = q."""
    n = q.n
    if n == 1:
        return HMatrix.empty()
    for j in range(1, n):
        if q.q(n - j, j) == 0:
            raise ZeroAntiDiagonalError(f"Q({n - j},{j}) = 0; H is not recoverable")
    cols = {k: recover_column(q.q, n, k) for k in range(1, n)}
    rows = tuple(tuple(cols[j][i - j] for j in range(1, i + 1)) for i in range(1, n))
    return HMatrix(rows)


def vertex_from_diagram(d: ArcDiagram) -> HMatrix:
    """Construct the optimal vertex algorithm of an arc diagram.

    The optimality and support claims are re-verified on every call (exact
    arithmetic makes this cheap); a failure is an internal bug, not a user
    error.
    """
    h = h_from_q(q_from_pattern(d))
    cs = certificates(h)
    if not cs.certified:
        raise PatternSolveError("constructed vertex violates invariance")
    support = {(k, j): v for k, j, v in cs.nonzeros()}
    expected = {(d.k(j), j) for j in range(1, d.n)}
    if set(support) != expected or any(v <= 0 for v in support.values()):
        raise PatternSolveError("constructed vertex does not match the requested pattern")
    return h


def diagram_from_vertex(h: HMatrix) -> ArcDiagram:
    """Read the arc diagram (with weights) off a vertex's certificates."""
    n = h.n
    cs = certificates(h)
    if not cs.certified:
        raise NotAVertexError("H violates invariance")
    if not cs.all_nonnegative():
        raise NotAVertexError("H has a negative certificate; not optimal")
    parent = []
    weights = []
    for j in range(1, n):
        positives = [(k, v) for k, jj, v in cs.nonzeros() if jj == j and v > 0]
        if len(positives) != 1:
            raise NotAVertexError(
                f"column {j} has {len(positives)} positive certificates; need exactly 1"
            )
        parent.append(positives[0][0])
        weights.append(positives[0][1])
    return ArcDiagram(n, tuple(parent), tuple(weights))
