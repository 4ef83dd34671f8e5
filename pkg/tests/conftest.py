"""Shared oracles and factories.

The oracles here are deliberately independent of the library's own
computation paths: Q by direct enumeration of ordered index products, the
determinant by fresh fraction-free elimination, and the certificate
matrix by solving the matrix-identity linear system from scratch.
"""

import random

import pytest

from vertexkit.core import ONE, ZERO, RMatrix, rat
from vertexkit.diagrams import ArcDiagram
from vertexkit.qcert import HMatrix, LambdaMatrix


def brute_force_q(h: HMatrix, m: int, j: int):
    """Q(m,j) straight from the definition: sum over all chains
    j = j(1) <= i(1) < j(2) <= i(2) < ... < j(m) <= i(m) <= N-1 of the
    products h_{i(r),j(r)}.  Exponential; fine for N <= 7."""
    n = h.n
    total = rat(0)

    def walk(r: int, j_cur: int, prod):
        nonlocal total
        for i_cur in range(j_cur, n):
            p = prod * h.entry(i_cur, j_cur)
            if p == 0:
                continue
            if r == m:
                total += p
            else:
                for j_next in range(i_cur + 1, n - (m - r) + 1):
                    walk(r + 1, j_next, p)

    if m + j <= n:
        walk(1, j, rat(1))
    return total


def exact_det(a: RMatrix):
    """Determinant by a fresh elimination (independent of core.invert)."""
    n = a.nrows
    m = [list(row) for row in a.rows]
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f != 0:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def rref_solve(rows, rhs, unknowns: int):
    """Solve a consistent (possibly overdetermined) exact linear system;
    returns the unique solution or raises if rank-deficient/inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(unknowns):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * p for v, p in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if len(pivots) != unknowns:
        raise ValueError("system is rank-deficient")
    for i in range(r, len(aug)):
        if aug[i][unknowns] != 0:
            raise ValueError("system is inconsistent")
    sol = [ZERO] * unknowns
    for row_idx, c in enumerate(pivots):
        sol[c] = aug[row_idx][unknowns]
    return sol


def lambda_matrix_from_identity(h: HMatrix) -> LambdaMatrix:
    """Independent certificate route: solve the symmetric linear system

        N E_NN + L + L J H~ + (L J H~)^T = 0,   L @ 1 = -e_N

    for L directly, without ever forming the alternating Q-sums."""
    n = h.n
    # unknowns: L[i][j] for i <= j (0-based), count n(n+1)/2
    idx = {}
    for i in range(n):
        for j in range(i, n):
            idx[(i, j)] = len(idx)
    unknowns = len(idx)

    def lam_coeff(i, j):
        return idx[(i, j)] if i <= j else idx[(j, i)]

    big_j = [[ONE if j <= i else ZERO for j in range(n)] for i in range(n)]
    h_tilde = [[ZERO] * n for _ in range(n)]
    for k in range(1, n):
        for j in range(1, k + 1):
            h_tilde[k][j - 1] = h.entry(k, j)
    jh = [
        [sum((big_j[i][t] * h_tilde[t][j] for t in range(n)), ZERO) for j in range(n)]
        for i in range(n)
    ]
    rows, rhs = [], []
    # identity entries (a, b), a <= b:  L_ab + (L J H~)_ab + (L J H~)_ba + N [a=b=N-1] = 0
    for a in range(n):
        for b in range(a, n):
            coeffs = [ZERO] * unknowns
            coeffs[lam_coeff(a, b)] += ONE
            for t in range(n):
                if jh[t][b] != 0:
                    coeffs[lam_coeff(a, t)] += jh[t][b]
                if jh[t][a] != 0:
                    coeffs[lam_coeff(b, t)] += jh[t][a]
            rows.append(coeffs)
            rhs.append(rat(-n) if a == b == n - 1 else ZERO)
    # row sums: sum_j L_aj = -[a = N-1]
    for a in range(n):
        coeffs = [ZERO] * unknowns
        for j in range(n):
            coeffs[lam_coeff(a, j)] += ONE
        rows.append(coeffs)
        rhs.append(-ONE if a == n - 1 else ZERO)
    sol = rref_solve(rows, rhs, unknowns)
    mat = [[ZERO] * n for _ in range(n)]
    for (i, j), t in idx.items():
        mat[i][j] = sol[t]
        mat[j][i] = sol[t]
    return LambdaMatrix(n, RMatrix(tuple(tuple(r) for r in mat)))


def random_pattern(n: int, rng: random.Random) -> ArcDiagram:
    return ArcDiagram.of(tuple(rng.randint(j + 1, n) for j in range(1, n)))


def random_lower_triangular(n: int, rng: random.Random) -> HMatrix:
    """Random H with nonzero diagonal (so the Q correspondence applies)."""
    rows = []
    for k in range(1, n):
        row = [rat(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(k - 1)]
        diag = rat(0)
        while diag == 0:
            diag = rat(rng.randint(-4, 4), rng.randint(1, 4))
        rows.append(row + [diag])
    return HMatrix.of(rows)


@pytest.fixture
def rng():
    return random.Random(20260810)
