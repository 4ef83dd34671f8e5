"""The anti-diagonal transpose and its effect on proofs.

The transpose itself is index bookkeeping; the substance is how the
certificates move: through the inverse of the certificate-graph matrix
(Delta Lambda^(-1) Delta), through arc-weight reciprocals under the
min-descendant index map for non-crossing vertices, and through recursive
split/swap/glue at the diagram level.  All three routes agree exactly on
basic vertices, and the first one exposes a negative multiplier whenever
the diagram crosses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ONE, ZERO, RMatrix, Rational, invert, rat
from .diagrams import (
    ArcDiagram,
    CrossingDiagramError,
    decomposition_index,
    descendants,
    glue_diagrams,
    is_noncrossing,
    split_diagram,
    validate,
)
from .gluing import NotOptimalError
from .qcert import CertificateSet, HMatrix, LambdaMatrix, certificates, is_optimal, lambda_matrix
from .vertex import diagram_from_vertex


@dataclass(frozen=True)
class DualReport:
    """Everything the dual of one H-matrix yields in a single pass."""

    dual_h: HMatrix
    dual_optimal: bool
    dual_lambda: LambdaMatrix
    route_agreement: bool


def anti_transpose(h: HMatrix) -> HMatrix:
    """Reflect H along its anti-diagonal: entry (k,j) becomes h_{N-j,N-k}."""
    n = h.n
    rows = tuple(
        tuple(h.entry(n - j, n - k) for j in range(1, k + 1)) for k in range(1, n)
    )
    return HMatrix(rows)


def delta_matrix(n: int) -> RMatrix:
    """Discrete-derivative-with-reversal stencil: (i,j) is 1 at j = N+1-i,
    -1 at j = N-i, 0 elsewhere.  Symmetric, and Delta @ 1 = e_N."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rows = []
    for i in range(1, n + 1):
        row = [ZERO] * n
        row[n - i] = ONE
        if n - i - 1 >= 0:
            row[n - i - 1] = -ONE
        rows.append(tuple(row))
    return RMatrix(tuple(rows))


def dual_lambda_via_inverse(h: HMatrix) -> LambdaMatrix:
    """Delta @ Lambda(H)^(-1) @ Delta, exactly.

    Returned for any optimal H even when the dual is suboptimal: the
    negative off-diagonals are the diagnostic, not an error condition.
    """
    if not is_optimal(h):
        raise NotOptimalError("dual_lambda_via_inverse needs an optimal H")
    n = h.n
    lam = lambda_matrix(h)
    delta = delta_matrix(n)
    return LambdaMatrix(n, delta @ invert(lam.matrix) @ delta)


def dual_certificates_vertex(h: HMatrix) -> CertificateSet | None:
    """Dual certificates of a vertex by the reciprocal arc-weight formula,
    or None when the arc diagram crosses (then the dual is suboptimal)."""
    d = diagram_from_vertex(h)
    if not is_noncrossing(d):
        return None
    n = d.n
    cache = descendants(d)
    entries = []
    for i in range(2, n + 1):
        v = i - 1
        j = cache.l(v)
        entries.append((n - j + 1, n - i + 1, 1 / d.weight(v)))
    return CertificateSet(n=n, entries=tuple(entries), certified=True)


def dualize_basic_diagram(d: ArcDiagram, family_shortcut: bool = False) -> ArcDiagram:
    """Recursive dualization: split at the decomposition index, dualize the
    two parts, glue them back in reversed order.  The singleton is the only
    base case; ``family_shortcut`` additionally short-circuits the two
    chain families (validated against the canonical path in tests)."""
    if not is_noncrossing(d):
        raise CrossingDiagramError("only non-crossing diagrams have optimal duals")
    if d.n == 1:
        return d.unweighted()
    if family_shortcut:
        if all(d.k(j) == j + 1 for j in range(1, d.n)):
            return ArcDiagram(d.n, (d.n,) * (d.n - 1))
        if all(d.k(j) == d.n for j in range(1, d.n)):
            return ArcDiagram(d.n, tuple(range(2, d.n + 1)))
    np = decomposition_index(d)
    left, right = split_diagram(d, np)
    return glue_diagrams(
        dualize_basic_diagram(right, family_shortcut),
        dualize_basic_diagram(left, family_shortcut),
    )


def is_self_dual(d: ArcDiagram) -> bool:
    """True iff N is even, d splits at N/2, and the right half is the dual
    of the left half."""
    if not validate(d):
        raise ValueError(f"invalid arc diagram: parent={d.parent}")
    if d.n % 2 != 0:
        return False
    if decomposition_index(d) != d.n // 2:
        return False
    left, right = split_diagram(d, d.n // 2)
    if not is_noncrossing(left):
        return False
    return right.unweighted() == dualize_basic_diagram(left)


def nu_combinatorial(h: HMatrix) -> RMatrix:
    """Entries of Lambda(H)^(-1) for a vertex, straight from the diagram:
    nu_{i,j} = -1 - sum over shared path nodes v of 1/weight(v)."""
    d = diagram_from_vertex(h)
    n = d.n
    cache = descendants(d)
    paths = [set(cache.path(j)) for j in range(1, n + 1)]
    inv_w = {v: 1 / d.weight(v) for v in range(1, n)}
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            shared = paths[i - 1] & paths[j - 1]
            row.append(-ONE - sum((inv_w[v] for v in shared if v != n), ZERO))
        rows.append(tuple(row))
    return RMatrix(tuple(rows))


def dual_report(h: HMatrix) -> DualReport:
    """Dualize H and cross-check every certificate route that applies."""
    dual_h = anti_transpose(h)
    dual_lam = dual_lambda_via_inverse(h)
    dual_opt = is_optimal(dual_h)
    agreement = True
    if dual_opt:
        direct = certificates(dual_h)
        n = h.n
        for k in range(1, n + 1):
            for j in range(1, k):
                if direct.value(k, j) != dual_lam.off_diagonal(k, j):
                    agreement = False
        try:
            d = diagram_from_vertex(h)
        except Exception:
            d = None
        if d is not None and is_noncrossing(d):
            combinatorial = dual_certificates_vertex(h)
            if combinatorial is not None and combinatorial.nonzeros() != direct.nonzeros():
                agreement = False
            if diagram_from_vertex(dual_h).unweighted() != dualize_basic_diagram(d):
                agreement = False
    return DualReport(dual_h, dual_opt, dual_lam, agreement)
