import math

import pytest

from conftest import random_lower_triangular
from vertexkit.core import RMatrix, invert, rat
from vertexkit.algorithms import dual_ohm_hmatrix, fsdm_hmatrix, ohm_hmatrix
from vertexkit.diagrams import ArcDiagram, CrossingDiagramError, enumerate_diagrams, is_noncrossing
from vertexkit.duality import (
    anti_transpose,
    delta_matrix,
    dual_certificates_vertex,
    dual_lambda_via_inverse,
    dual_report,
    dualize_basic_diagram,
    is_self_dual,
    nu_combinatorial,
)
from vertexkit.qcert import HMatrix, certificates, check_invariance, lambda_matrix
from vertexkit.vertex import diagram_from_vertex, vertex_from_diagram

BASIC10_IN = ArcDiagram.of((2, 3, 4, 10, 7, 7, 10, 9, 10))
BASIC10_OUT = ArcDiagram.of((3, 3, 6, 5, 6, 10, 10, 10, 10))


def test_anti_transpose_chains():
    assert anti_transpose(ohm_hmatrix(4)) == dual_ohm_hmatrix(4)
    assert anti_transpose(dual_ohm_hmatrix(4)) == ohm_hmatrix(4)
    assert anti_transpose(HMatrix.of([["1/2"]])) == HMatrix.of([["1/2"]])
    assert anti_transpose(HMatrix.empty()) == HMatrix.empty()


def test_anti_transpose_involution(rng):
    for _ in range(10):
        h = random_lower_triangular(rng.randint(2, 8), rng)
        assert anti_transpose(anti_transpose(h)) == h


def test_anti_transpose_preserves_invariance(rng):
    for n in range(2, 7):
        d = ArcDiagram.of(tuple(rng.randint(j + 1, n) for j in range(1, n)))
        h = vertex_from_diagram(d)
        assert check_invariance(anti_transpose(h))


def test_delta_matrix():
    assert delta_matrix(2) == RMatrix.of([[-1, 1], [1, 0]])
    for n in range(1, 13):
        delta = delta_matrix(n)
        assert delta == delta.transpose()
        ones = [rat(1)] * n
        e_n = [rat(0)] * (n - 1) + [rat(1)]
        assert list(delta.matvec(ones).entries) == e_n


def test_delta_is_inverse_of_jt():
    for n in range(1, 9):
        big_j = RMatrix.of([[1 if j <= i else 0 for j in range(n)] for i in range(n)])
        t_rev = RMatrix.of([[1 if j == n - 1 - i else 0 for j in range(n)] for i in range(n)])
        assert delta_matrix(n) @ big_j @ t_rev == RMatrix.identity(n)


def test_dual_lambda_self_dual_base():
    h = HMatrix.of([["1/2"]])
    lam = lambda_matrix(h)
    assert dual_lambda_via_inverse(h).matrix == lam.matrix


def test_dual_lambda_crossing_has_negative_entry():
    h = vertex_from_diagram(ArcDiagram.of((3, 4, 4)))
    lam = dual_lambda_via_inverse(h)
    assert any(lam.off_diagonal(k, j) < 0 for k in range(2, 5) for j in range(1, k))


def test_dual_lambda_cross_route():
    lam = dual_lambda_via_inverse(ohm_hmatrix(4))
    direct = certificates(dual_ohm_hmatrix(4))
    for k in range(2, 6):
        for j in range(1, k):
            assert lam.off_diagonal(k, j) == direct.value(k, j)


def test_dual_certificates_vertex():
    # anchor chain: reciprocals of j(j+1)/N under the index map land on row N
    got = dual_certificates_vertex(ohm_hmatrix(4))
    direct = certificates(dual_ohm_hmatrix(4))
    assert got.nonzeros() == direct.nonzeros()
    for v in range(1, 5):
        assert got.value(5, 5 - v) == rat(5, v * (v + 1))
    assert dual_certificates_vertex(vertex_from_diagram(ArcDiagram.of((3, 4, 4)))) is None
    assert dual_certificates_vertex(HMatrix.of([["1/2"]])).nonzeros() == ((2, 1, rat(1)),)


def test_dualize_chains():
    ohm_d = ArcDiagram.of((2, 3, 4, 5))
    dual_d = ArcDiagram.of((5, 5, 5, 5))
    assert dualize_basic_diagram(ohm_d) == dual_d
    assert dualize_basic_diagram(dual_d) == ohm_d
    assert dualize_basic_diagram(ArcDiagram(1, ())) == ArcDiagram(1, ())


def test_dualize_ten_node_example():
    assert dualize_basic_diagram(BASIC10_IN) == BASIC10_OUT
    assert dualize_basic_diagram(BASIC10_OUT) == BASIC10_IN
    assert dualize_basic_diagram(BASIC10_IN, family_shortcut=True) == BASIC10_OUT


def test_dualize_rejects_crossing():
    with pytest.raises(CrossingDiagramError):
        dualize_basic_diagram(ArcDiagram.of((3, 4, 4)))


def test_dualize_involution_and_shortcut_agree():
    for n in range(1, 10):
        for d in enumerate_diagrams(n, basic_only=True):
            dual = dualize_basic_diagram(d)
            assert is_noncrossing(dual)
            assert dualize_basic_diagram(dual) == d.unweighted()
            assert dualize_basic_diagram(d, family_shortcut=True) == dual


def test_self_dual():
    fsdm16 = ArcDiagram.of(tuple(j + (j & -j) for j in range(1, 16)))
    assert is_self_dual(fsdm16)
    assert not is_self_dual(ArcDiagram.of((2, 3, 4, 5)))  # odd N
    count6 = sum(1 for d in enumerate_diagrams(6) if is_self_dual(d))
    assert count6 == 2  # C_2


def test_self_dual_counts():
    for n in range(2, 9):
        count = sum(1 for d in enumerate_diagrams(n) if is_self_dual(d))
        expected = math.comb(n - 2, n // 2 - 1) // (n // 2) if n % 2 == 0 else 0
        assert count == expected, n


def test_dual_counting():
    from vertexkit.qcert import is_optimal

    for n in range(2, 7):
        good = sum(1 for d in enumerate_diagrams(n) if is_optimal(anti_transpose(vertex_from_diagram(d))))
        assert good == math.comb(2 * n - 2, n - 1) // n, n


def test_nu_combinatorial():
    h = HMatrix.of([["1/2"]])
    assert nu_combinatorial(h) == RMatrix.of([[-2, -1], [-1, -1]])
    for d in enumerate_diagrams(5):
        hh = vertex_from_diagram(d)
        nu = nu_combinatorial(hh)
        assert nu == invert(lambda_matrix(hh).matrix), d.parent
        assert all(nu.entry(4, i) == -1 and nu.entry(i, 4) == -1 for i in range(5))


def test_route_agreement_full():
    for n in range(2, 8):
        for d in enumerate_diagrams(n):
            h = vertex_from_diagram(d)
            rep = dual_report(h)
            assert rep.dual_h == anti_transpose(h)
            if is_noncrossing(d):
                assert rep.dual_optimal and rep.route_agreement, d.parent
                assert diagram_from_vertex(rep.dual_h).unweighted() == dualize_basic_diagram(d)
            else:
                assert not rep.dual_optimal, d.parent
                lam = rep.dual_lambda
                assert any(
                    lam.off_diagonal(k, j) < 0 for k in range(2, n + 1) for j in range(1, k)
                ), d.parent


def test_fsdm_diagram_self_dual_all_scales():
    for p in range(1, 5):
        d = diagram_from_vertex(fsdm_hmatrix(p))
        assert is_self_dual(d.unweighted())
        assert anti_transpose(fsdm_hmatrix(p)) == fsdm_hmatrix(p)
