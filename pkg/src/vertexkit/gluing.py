"""Composition of optimal algorithms: matrix and certificate gluing.

Gluing H1 (on N' nodes) with H2 (on N-N' nodes) produces an optimal H on
N nodes whose first N'-1 steps are H1's, with one bridging row/column in
between; the combined proof is the two proofs rescaled plus a single
bridging multiplier N'/(N-N').
"""

from __future__ import annotations

from .core import ZERO, binomial, rat
from .diagrams import is_noncrossing
from .qcert import CertificateSet, HMatrix, certificates, is_optimal, q_functions
from .vertex import NotAVertexError, diagram_from_vertex, recover_column


class NotOptimalError(ValueError):
    pass


class HorizonMismatchError(ValueError):
    pass


def glue_h(h1: HMatrix, h2: HMatrix, check: bool = True) -> HMatrix:
    """Block-glue two optimal step matrices.

    Row N' is the rescaled column-sum row of H1 with diagonal N'(N-N')/N;
    column N' below the diagonal is rebuilt by the single-column recovery
    loop against the bridging Q-targets N'(N-N'+1)/(N(k+1)) C(N-N'-1,k-1).
    ``check=False`` skips the optimality precondition for callers that fold
    inputs already known optimal (the RDO builder).
    """
    if check and not (is_optimal(h1) and is_optimal(h2)):
        raise NotOptimalError("glue_h needs optimal inputs")
    np_, n = h1.n, h1.n + h2.n
    q2 = q_functions(h2)

    def qfn(m: int, j: int):
        if j == np_:
            return rat(np_ * (n - np_ + 1), n * (m + 1)) * binomial(n - np_ - 1, m - 1)
        return q2.q(m, j - np_)

    bridge_col = recover_column(qfn, n, np_)
    rows = [list(r) for r in h1.rows]
    scale = rat(-(n - np_), n)
    rows.append([scale * h1.column_sum(j) for j in range(1, np_)] + [bridge_col[0]])
    for i in range(np_ + 1, n):
        rows.append([ZERO] * (np_ - 1) + [bridge_col[i - np_]] + list(h2.rows[i - np_ - 1]))
    return HMatrix(tuple(tuple(r) for r in rows))


def glue_lambda(l1: CertificateSet, l2: CertificateSet, np: int, n: int) -> CertificateSet:
    """Certificate-level gluing: left block scaled by N'/N, right block
    (shifted by N') scaled by N/(N-N'), bridging value N'/(N-N')."""
    if l1.n != np:
        raise HorizonMismatchError(f"left certificates have horizon {l1.n}, expected {np}")
    if l2.n != n - np:
        raise HorizonMismatchError(f"right certificates have horizon {l2.n}, expected {n - np}")
    left = rat(np, n)
    right = rat(n, n - np)
    entries = [(k, j, left * v) for k, j, v in l1.nonzeros()]
    entries += [(k + np, j + np, right * v) for k, j, v in l2.nonzeros()]
    entries.append((n, np, rat(np, n - np)))
    return CertificateSet(n=n, entries=tuple(entries), certified=l1.certified and l2.certified)


def verify_gluing_theorem(h1: HMatrix, h2: HMatrix) -> bool:
    """Exact check that certificates(glue_h) equals the glued certificates
    and that the glued matrix is optimal."""
    glued = glue_h(h1, h2)
    direct = certificates(glued)
    composed = glue_lambda(certificates(h1), certificates(h2), h1.n, glued.n)
    return (
        direct.nonzeros() == composed.nonzeros()
        and direct.certified
        and direct.all_nonnegative()
    )


def is_basic(h: HMatrix) -> bool:
    """True iff H is an optimal vertex whose arc diagram is non-crossing,
    i.e. H decomposes recursively into empty blocks."""
    if h.n == 1:
        return True
    try:
        d = diagram_from_vertex(h)
    except NotAVertexError:
        return False
    return is_noncrossing(d)
