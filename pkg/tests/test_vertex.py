import pytest

from conftest import random_lower_triangular, random_pattern
from vertexkit.core import ONE, RMatrix, RVector, binomial, pascal_S, rat, solve_linear
from vertexkit.algorithms import dual_ohm_hmatrix, ohm_hmatrix
from vertexkit.diagrams import ArcDiagram, enumerate_diagrams
from vertexkit.qcert import HMatrix, QProfile, certificates, check_invariance, q_functions
from vertexkit.vertex import (
    NotAVertexError,
    ZeroAntiDiagonalError,
    diagram_from_vertex,
    h_from_q,
    pattern_solve,
    q_from_pattern,
    vertex_from_diagram,
)

OHM5_MATRIX = HMatrix.of(
    [["1/2"], ["-1/6", "2/3"], ["-1/12", "-1/6", "3/4"], ["-1/20", "-1/10", "-3/20", "4/5"]]
)
DUAL_OHM5_MATRIX = HMatrix.of(
    [["4/5"], ["-3/20", "3/4"], ["-1/10", "-1/6", "2/3"], ["-1/20", "-1/12", "-1/6", "1/2"]]
)
RDO2_5_MATRIX = HMatrix.of(
    [["2/3"], ["-1/6", "1/2"], ["-1/5", "-1/5", "6/5"], ["0", "0", "-3/10", "1/2"]]
)
GLUED_10_MATRIX = HMatrix.of(
    [
        ["2/3"],
        ["-1/6", "1/2"],
        ["-1/5", "-1/5", "6/5"],
        ["0", "0", "-3/10", "1/2"],
        ["-3/20", "-3/20", "-9/20", "-1/4", "5/2"],
        ["0", "0", "0", "0", "-1/4", "1/2"],
        ["0", "0", "0", "0", "-1/4", "-1/6", "2/3"],
        ["0", "0", "0", "0", "-1/4", "-1/12", "-1/6", "3/4"],
        ["0", "0", "0", "0", "-1/4", "-1/20", "-1/10", "-3/20", "4/5"],
    ]
)


def _direct_pattern_solve(d: ArcDiagram):
    """Independent route: build each L_j literally and solve
    (L_j S_{N-j}) u_j = e_{N-k(j)+1}, then read the q-row off L_0."""
    n = d.n
    vs = {n - 1: (ONE,)}
    for j in range(n - 2, 0, -1):
        r = n - j
        rows = [[rat(0)] * r for _ in range(r)]
        rows[0][0] = ONE
        for i in range(2, r + 1):  # row i carries v_{n-i+1} after one zero
            v = vs[n - i + 1]
            for t, val in enumerate(v):
                rows[i - 1][1 + t] = val
        ls = RMatrix(tuple(tuple(row) for row in rows)) @ pascal_S(r)
        e = [rat(0)] * r
        e[n - d.k(j)] = ONE
        u = solve_linear(ls, RVector.of(e))
        vs[j] = tuple(x / u[r - 1] for x in u.entries)
    rows = [[rat(0)] * n for _ in range(n)]
    rows[0][0] = ONE
    for i in range(2, n + 1):
        for t, val in enumerate(vs[n - i + 1]):
            rows[i - 1][1 + t] = val
    l0 = RMatrix(tuple(tuple(row) for row in rows))
    target = RVector.of([binomial(n, k) / n for k in range(1, n + 1)])
    qrow = solve_linear(l0.transpose(), target)  # row vector system q L0 = target
    qs = tuple(qrow[n - j] for j in range(1, n))
    return vs, qs


@pytest.mark.parametrize(
    "parent,expected",
    [((2, 3, 4, 5), OHM5_MATRIX), ((5, 5, 5, 5), DUAL_OHM5_MATRIX), ((3, 3, 5, 5), RDO2_5_MATRIX)],
)
def test_reference_matrices(parent, expected):
    assert vertex_from_diagram(ArcDiagram.of(parent)) == expected


def test_q_from_pattern_matches_known_profiles():
    assert q_from_pattern(ArcDiagram.of((2, 3, 4, 5))).values == q_functions(OHM5_MATRIX).values
    assert q_from_pattern(ArcDiagram.of((5, 5, 5, 5))).values == q_functions(DUAL_OHM5_MATRIX).values


def test_q_from_pattern_n2():
    q = q_from_pattern(ArcDiagram.of((2,)))
    assert q.q(1, 1) == rat(1, 2)


def test_pattern_solve_matches_direct_route(rng):
    for n in range(3, 8):
        for _ in range(4):
            d = random_pattern(n, rng)
            state = pattern_solve(d)
            vs, qs = _direct_pattern_solve(d)
            for j in range(1, n):
                assert state.v[j - 1] == vs[j], (d.parent, j)
            assert state.q == qs, d.parent


def test_pattern_solve_positivity(rng):
    for n in range(2, 8):
        for _ in range(5):
            state = pattern_solve(random_pattern(n, rng))
            for v in state.v:
                assert v[-1] == 1
                assert all(x > 0 for x in v)
            assert all(x > 0 for x in state.q)


def test_h_from_q_roundtrip(rng):
    for _ in range(50):
        n = rng.randint(2, 7)
        h = random_lower_triangular(n, rng)
        assert h_from_q(q_functions(h)) == h


def test_h_from_q_zero_antidiagonal():
    q = QProfile(3, ((rat(1), rat(0)), (rat(1),)))
    with pytest.raises(ZeroAntiDiagonalError):
        h_from_q(q)


def test_empty_and_smallest():
    assert vertex_from_diagram(ArcDiagram(1, ())) == HMatrix.empty()
    assert vertex_from_diagram(ArcDiagram.of((2,))) == HMatrix.of([["1/2"]])


def test_glued_ten_node_matrix_via_pattern():
    glued = ArcDiagram.of((3, 3, 5, 5, 10, 7, 8, 9, 10))
    assert vertex_from_diagram(glued) == GLUED_10_MATRIX


def test_constructed_vertices_pass_invariance(rng):
    for n in range(2, 7):
        d = random_pattern(n, rng)
        assert check_invariance(vertex_from_diagram(d))


def test_diagram_from_vertex_reference():
    assert diagram_from_vertex(OHM5_MATRIX).parent == (2, 3, 4, 5)
    assert diagram_from_vertex(RDO2_5_MATRIX).parent == (3, 3, 5, 5)


def test_diagram_from_vertex_weights_match_certificates():
    d = diagram_from_vertex(DUAL_OHM5_MATRIX)
    cs = certificates(DUAL_OHM5_MATRIX)
    for j in range(1, 5):
        assert d.weight(j) == cs.value(d.k(j), j)


def test_entrywise_midpoint_is_not_a_vertex():
    # averaging the step matrices breaks the polynomial equality constraints
    # (the invariants are not linear in H), so the diagram map must refuse
    h = ohm_hmatrix(3).scale(rat(1, 2)).add(dual_ohm_hmatrix(3).scale(rat(1, 2)))
    assert not check_invariance(h)
    with pytest.raises(NotAVertexError):
        diagram_from_vertex(h)


def test_dense_certificate_optimum_is_not_a_vertex():
    # interior point of the N=3 solution curve h11 h22 = 1/3,
    # h11 + h21 + h22 = 1: optimal, with two active multipliers in column 1
    t = rat(7, 12)
    h = HMatrix.of([[t], [1 - t - 1 / (3 * t), 1 / (3 * t)]])
    cs = certificates(h)
    assert cs.certified and cs.all_nonnegative()
    assert sum(1 for k, j, v in cs.nonzeros() if j == 1 and v > 0) == 2
    with pytest.raises(NotAVertexError):
        diagram_from_vertex(h)


def test_diagram_vertex_bijection():
    for n in range(1, 8):
        for d in enumerate_diagrams(n):
            h = vertex_from_diagram(d)
            back = diagram_from_vertex(h) if n > 1 else ArcDiagram(1, ())
            assert back.unweighted() == d.unweighted()


def test_pattern_fidelity_exact_zeros(rng):
    for _ in range(5):
        d = random_pattern(6, rng)
        cs = certificates(vertex_from_diagram(d))
        support = {(k, j) for k, j, v in cs.nonzeros()}
        assert support == {(d.k(j), j) for j in range(1, 6)}
