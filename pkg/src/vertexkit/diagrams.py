"""Arc diagrams: the combinatorial identity of a vertex algorithm.

A diagram on nodes {1..N} stores one arc (k(j), j) per node j < N with
j < k(j) <= N; the support graph is automatically a tree.  Non-crossing
diagrams are exactly the recursively decomposable ("basic") ones and
their leftmost-to-N arc chain C(1) lists the iterates with optimal
guarantees.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .core import Rational

DEFAULT_ENUMERATION_CAP = 9


class CrossingDiagramError(ValueError):
    pass


class NotDecomposableError(ValueError):
    pass


class EnumerationCapError(ValueError):
    pass


@dataclass(frozen=True)
class ArcDiagram:
    """Parent map j -> k(j) on nodes {1..N}; arc weights are optional."""

    n: int
    parent: tuple[int, ...]
    weights: tuple[Rational, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one node, got n={self.n}")
        if len(self.parent) != self.n - 1:
            raise ValueError(f"parent map needs {self.n - 1} entries, got {len(self.parent)}")
        if self.weights is not None and len(self.weights) != self.n - 1:
            raise ValueError("weights must align with the parent map")

    @classmethod
    def of(cls, parent, weights=None) -> "ArcDiagram":
        parent = tuple(int(k) for k in parent)
        return cls(len(parent) + 1, parent, None if weights is None else tuple(weights))

    def k(self, j: int) -> int:
        if not (1 <= j <= self.n - 1):
            raise IndexError(f"arc start must be in 1..{self.n - 1}, got {j}")
        return self.parent[j - 1]

    def weight(self, j: int) -> Rational:
        if self.weights is None:
            raise ValueError("diagram carries no weights")
        return self.weights[j - 1]

    def unweighted(self) -> "ArcDiagram":
        return ArcDiagram(self.n, self.parent)

    def to_json(self) -> dict:
        return {"n": self.n, "parent": list(self.parent)}

    @classmethod
    def from_json(cls, data: Mapping) -> "ArcDiagram":
        d = cls(int(data["n"]), tuple(int(k) for k in data["parent"]))
        if not validate(d):
            raise ValueError(f"invalid parent map {d.parent}")
        return d


@dataclass(frozen=True)
class PathCache:
    """Per-node increasing paths C(j), minima l(v) and descendant sets I(v).

    For non-crossing diagrams I(v) is the interval {l(v), ..., v}.
    """

    n: int
    paths: tuple[tuple[int, ...], ...]  # paths[j-1] = C(j), ending at N
    ell: tuple[int, ...]  # ell[v-1] = l(v) = min descendant
    intervals: tuple[frozenset, ...]  # intervals[v-1] = I(v)

    def path(self, j: int) -> tuple[int, ...]:
        return self.paths[j - 1]

    def l(self, v: int) -> int:
        return self.ell[v - 1]

    def interval(self, v: int) -> frozenset:
        return self.intervals[v - 1]


def validate(d: ArcDiagram) -> bool:
    """True iff every arc goes strictly rightward: j < k(j) <= N."""
    return all(j < d.parent[j - 1] <= d.n for j in range(1, d.n))


def _require_valid(d: ArcDiagram) -> None:
    if not validate(d):
        raise ValueError(f"invalid arc diagram: parent={d.parent}")


def increasing_path(d: ArcDiagram, j: int) -> tuple[int, ...]:
    """C(j) = (j, k(j), k(k(j)), ..., N); C(N) = (N,)."""
    _require_valid(d)
    if not (1 <= j <= d.n):
        raise IndexError(f"node must be in 1..{d.n}, got {j}")
    path = [j]
    while path[-1] != d.n:
        path.append(d.k(path[-1]))
    return tuple(path)


def is_noncrossing(d: ArcDiagram) -> bool:
    """True iff no pair j1 < j2 < k(j1) < k(j2) exists."""
    _require_valid(d)
    for j1 in range(1, d.n):
        k1 = d.k(j1)
        for j2 in range(j1 + 1, k1):
            if k1 < d.k(j2):
                return False
    return True


def decomposition_index(d: ArcDiagram) -> int | None:
    """The unique N' with k(N') = N and k(j) <= N' for all j < N', or None.

    Only the leftmost node joined directly to N can qualify, so the check
    is against that single candidate.
    """
    _require_valid(d)
    if d.n == 1:
        return None
    cand = min(j for j in range(1, d.n) if d.k(j) == d.n)
    if all(d.k(j) <= cand for j in range(1, cand)):
        return cand
    return None


def glue_diagrams(d1: ArcDiagram, d2: ArcDiagram) -> ArcDiagram:
    """Place d2 to the right of d1 (relabeled by +N1) and bridge the
    rightmost nodes with the arc (N, N1)."""
    _require_valid(d1)
    _require_valid(d2)
    n1, n = d1.n, d1.n + d2.n
    parent = list(d1.parent) + [n] + [k + n1 for k in d2.parent]
    return ArcDiagram(n, tuple(parent))


def split_diagram(d: ArcDiagram, np: int) -> tuple[ArcDiagram, ArcDiagram]:
    """Remove the bridging arc (N, N') and return the two components,
    the right one relabeled to 1..N-N'.  Inverse of :func:`glue_diagrams`."""
    _require_valid(d)
    if decomposition_index(d) != np:
        raise NotDecomposableError(f"diagram is not decomposable at {np}")
    left = ArcDiagram(np, d.parent[: np - 1])
    right = ArcDiagram(d.n - np, tuple(k - np for k in d.parent[np:]))
    return left, right


def descendants(d: ArcDiagram) -> PathCache:
    """Paths C(j), minima l(v) and descendant sets I(v) for all nodes.

    l(v) = min{j : v in C(j)} over all nodes j, while I(v) collects only
    j <= N-1; on non-crossing diagrams I(v) is the interval {l(v)..v}.
    """
    _require_valid(d)
    paths = tuple(increasing_path(d, j) for j in range(1, d.n + 1))
    members: list[set] = [set() for _ in range(d.n)]
    for j in range(1, d.n + 1):
        for v in paths[j - 1]:
            members[v - 1].add(j)
    ell = tuple(min(m) for m in members)
    intervals = tuple(frozenset(m - {d.n}) for m in members)
    return PathCache(d.n, paths, ell, intervals)


def enumerate_diagrams(
    n: int, basic_only: bool = False, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[ArcDiagram]:
    """Stream all (n-1)! parent maps, or only the C_{n-1} non-crossing ones."""
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds enumeration cap {cap}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    for parent in itertools.product(*(range(j + 1, n + 1) for j in range(1, n))):
        d = ArcDiagram(n, parent)
        if basic_only and not is_noncrossing(d):
            continue
        yield d


def guaranteed_indices(d: ArcDiagram) -> tuple[int, ...]:
    """Nodes j along C(1); iterate y_{j-1} carries the 4/j^2 rate bound.

    Defined for basic diagrams: the guarantee chain is read off the
    overarching arcs, which crossing diagrams do not provide.
    """
    if not is_noncrossing(d):
        raise CrossingDiagramError("guarantee path is defined for non-crossing diagrams")
    return increasing_path(d, 1)


def ascii_art(d: ArcDiagram) -> str:
    """Nodes as labels on a base line, arcs as nested bracket rows above.

    Shorter arcs sit lower; an arc shares a row only with arcs whose node
    spans are strictly disjoint from its own.
    """
    _require_valid(d)
    labels = [str(v) for v in range(1, d.n + 1)]
    starts = []
    pos = 0
    for lab in labels:
        starts.append(pos + len(lab) // 2)
        pos += len(lab) + 1
    width = max(pos - 1, 1)
    arcs = sorted(((j, d.k(j)) for j in range(1, d.n)), key=lambda a: (a[1] - a[0], a[0]))
    levels: list[list[tuple[int, int]]] = []
    placed: dict[tuple[int, int], int] = {}
    for a, b in arcs:
        lvl = 0
        while lvl < len(levels) and any(max(a, a2) <= min(b, b2) for a2, b2 in levels[lvl]):
            lvl += 1
        if lvl == len(levels):
            levels.append([])
        levels[lvl].append((a, b))
        placed[(a, b)] = lvl
    height = len(levels)
    grid = [[" "] * width for _ in range(height)]
    for (a, b), lvl in placed.items():
        row = height - 1 - lvl
        ca, cb = starts[a - 1], starts[b - 1]
        grid[row][ca] = "("
        grid[row][cb] = ")"
        for c in range(ca + 1, cb):
            if grid[row][c] == " ":
                grid[row][c] = "-"
    lines = ["".join(r).rstrip() for r in grid]
    lines.append(" ".join(labels))
    return "\n".join(lines)
