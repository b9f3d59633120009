import itertools
import json
import random

import pytest
from reference_data import ALEXANDER, TREFOIL_GRID5, TREFOIL_PD, UNKNOT_GRID3

from arcforge import laurent
from arcforge.diagram import DTCode, PlanarDiagram, grid_to_diagram, mirror, realize_dt
from arcforge.errors import TooLarge
from arcforge.grid import GridDiagram, enumerate_grids, random_grid
from arcforge.invariant import (
    alexander_grid,
    alexander_pd,
    jones,
    kauffman_bracket,
    same_knot_evidence,
    winding_matrix,
)
from arcforge.laurent import ONE, LaurentPoly

FIGURE8_GRID6 = ((1, 3), (2, 4), (3, 6), (1, 5), (4, 6), (2, 5))


def poly(coeffs):
    return LaurentPoly.from_coeffs(coeffs)


def seifert_alexander(v):
    t = LaurentPoly.monomial(1)
    n = len(v)
    m = [[LaurentPoly.const(v[i][j]) - t * v[j][i] for j in range(n)] for i in range(n)]
    return laurent.det(m).normalized()


def brute_bracket(d: PlanarDiagram) -> LaurentPoly:
    """Plain sum over all 2^c smoothings, normalized so the unknot gives 1."""
    loop = LaurentPoly({2: -1, -2: -1})
    total = laurent.ZERO
    for state in itertools.product((0, 1), repeat=d.crossing_count):
        parent = list(range(d.edge_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (a, b, c, e), s in zip(d.pd, state):
            pairs = ((a, b), (c, e)) if s == 0 else ((a, e), (b, c))
            for u, w in pairs:
                parent[find(u)] = find(w)
        loops = len({find(x) for x in range(d.edge_count)})
        a_count = state.count(0)
        term = LaurentPoly.monomial(a_count - (len(state) - a_count)) * loop ** (loops - 1)
        total = total + term
    return total


def test_seifert_oracles():
    tre = realize_dt(DTCode("3_1", (4, 6, 2)))
    assert alexander_pd(tre) == seifert_alexander([[-1, 1], [0, -1]]) == poly([1, -1, 1])
    fig8 = realize_dt(DTCode("4_1", (4, 6, 8, 2)))
    assert alexander_pd(fig8) == seifert_alexander([[1, -1], [0, -1]]) == poly([1, -3, 1])


def test_alexander_fixture_values(diagrams):
    for name, d in diagrams.items():
        assert alexander_pd(d) == poly(ALEXANDER[name])


def test_alexander_of_trivial_diagram():
    assert alexander_pd(PlanarDiagram(())) == ONE
    assert alexander_grid(GridDiagram.unknot_sentinel()) == ONE
    assert alexander_grid(GridDiagram(UNKNOT_GRID3)) == ONE


def test_alexander_grid_trefoil():
    assert alexander_grid(GridDiagram(TREFOIL_GRID5)) == poly([1, -1, 1])


def test_winding_matrix_of_trefoil():
    w = winding_matrix(GridDiagram(TREFOIL_GRID5))
    assert len(w) == 5 and all(len(r) == 5 for r in w)
    # cells left of every vertical in the bottom row are outside the curve
    assert w[0][0] == 0 or abs(w[0][0]) <= 2


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_grid_and_pd_alexander_agree_exhaustively(n):
    for g in enumerate_grids(n):
        assert alexander_grid(g) == alexander_pd(grid_to_diagram(g))


def test_grid_and_pd_alexander_agree_on_random_grids():
    rng = random.Random(2024)
    for _ in range(60):
        g = random_grid(rng.randint(6, 9), rng)
        a = alexander_grid(g)
        assert a == alexander_pd(grid_to_diagram(g))
        assert abs(a.eval_int(1)) == 1


def test_bracket_matches_state_sum(diagrams):
    for name, d in diagrams.items():
        if d.crossing_count <= 13:
            assert kauffman_bracket(d) == brute_bracket(d), name


def test_bracket_matches_state_sum_on_grid_diagrams():
    rng = random.Random(99)
    checked = 0
    while checked < 25:
        d = grid_to_diagram(random_grid(rng.randint(4, 7), rng))
        if d.is_trivial() or d.crossing_count > 11:
            continue
        assert kauffman_bracket(d) == brute_bracket(d)
        checked += 1


def test_jones_values():
    tre = PlanarDiagram.from_pd_text(TREFOIL_PD)
    j = jones(tre)
    assert len(j.terms) == 3
    assert jones(mirror(tre)) == j.invert_variable()
    kink = grid_to_diagram(GridDiagram(UNKNOT_GRID3))
    assert jones(kink) == ONE
    assert kauffman_bracket(PlanarDiagram(())) == ONE


def test_jones_8_19(diagrams):
    j = jones(diagrams["8_19"])
    assert j in (LaurentPoly({3: 1, 5: 1, 8: -1}), LaurentPoly({-3: 1, -5: 1, -8: -1}))


def test_bracket_too_large():
    n = 25
    entries = tuple(list(range(n + 1, 2 * n + 1, 2)) + list(range(2, n, 2)))
    d = realize_dt(DTCode("T2_25", entries))
    assert d.crossing_count == 25
    with pytest.raises(TooLarge):
        kauffman_bracket(d)


def test_evidence_pass_and_fail():
    # the 5-grid is the mirror of the hand-built trefoil
    tre = mirror(PlanarDiagram.from_pd_text(TREFOIL_PD))
    ok = same_knot_evidence(tre, GridDiagram(TREFOIL_GRID5), "3_1")
    assert ok.passed
    assert {c.invariant for c in ok.checks} == {"alexander", "jones"}
    bad = same_knot_evidence(tre, GridDiagram(FIGURE8_GRID6), "3_1")
    assert not bad.passed
    assert not bad.checks[0].passed
    lines = [json.loads(x) for x in bad.to_jsonl().splitlines()]
    assert set(lines[0]) == {"name", "invariant", "lhs", "rhs", "pass"}
    assert "FAIL" in bad.summary()


def test_evidence_detects_mirror():
    tre = PlanarDiagram.from_pd_text(TREFOIL_PD)
    rep = same_knot_evidence(tre, GridDiagram(TREFOIL_GRID5))
    assert rep.checks[0].passed  # Alexander cannot see chirality
    assert not rep.passed  # Jones can
