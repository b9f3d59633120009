import random
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from reference_data import (
    GRID13_DESTAB,
    GRID13_FINAL,
    GRID13_FINAL_TEXT,
    GRID15_13N3003,
    SPOKES_13N3003,
    UNKNOT_GRID3,
)

from arcforge.errors import InvalidGrid, InvalidSpokes, NotDestabilizable
from arcforge.grid import (
    BOTTOM_TO_TOP,
    LEFT_TO_RIGHT,
    RIGHT_TO_LEFT,
    SIDES,
    TOP_TO_BOTTOM,
    GridDiagram,
    Site,
    destabilizable,
    destabilize,
    enumerate_grids,
    from_spokes,
    from_text,
    move_edge,
    normalize,
    random_grid,
    render,
    to_text,
    to_xo,
    traverse,
)
from arcforge.invariant import alexander_grid

grid_sizes = st.integers(2, 9)


@st.composite
def grids(draw):
    n = draw(grid_sizes)
    return random_grid(n, draw(st.randoms(use_true_random=False)))


# -- validity -----------------------------------------------------------------


@pytest.mark.parametrize(
    "cols",
    [
        ((1, 2), (1, 2), (1, 2)),  # level multiplicity
        ((1, 2), (1, 2), (3, 4), (3, 4)),  # two components
        ((2, 1), (1, 2)),
        ((1, 3), (1, 2)),
    ],
)
def test_invalid_grids(cols):
    with pytest.raises(InvalidGrid):
        GridDiagram(cols)


def test_grid_counts_by_size():
    # n! (n-1)! / 2 knot grids of size n
    assert [sum(1 for _ in enumerate_grids(n)) for n in range(2, 6)] == [1, 6, 72, 1440]


def test_traverse_alternates_and_closes():
    g = GridDiagram(GRID13_FINAL)
    segs = traverse(g)
    assert len(segs) == 26
    assert all(a.vertical != b.vertical for a, b in zip(segs, segs[1:]))
    assert segs[0].start == segs[-1].pos


@given(grids())
def test_random_grids_are_valid(g):
    levels = sorted(v for c in g.cols for v in c)
    assert levels == sorted(list(range(1, g.n + 1)) * 2) or g.is_sentinel()


# -- spokes -------------------------------------------------------------------


def test_from_spokes_13n3003():
    g = from_spokes(SPOKES_13N3003)
    assert g.n == 15 and g.cols == GRID15_13N3003


def test_from_spokes_small():
    assert from_spokes([(1, 2), (1, 3), (2, 3)]).cols == UNKNOT_GRID3
    assert from_spokes([(2, 1), (3, 1), (3, 2)]).cols == UNKNOT_GRID3
    with pytest.raises(InvalidSpokes):
        from_spokes([(1, 2), (1, 2), (1, 2)])


# -- destabilization ----------------------------------------------------------


def test_destabilizable_15_grid():
    g = GridDiagram(GRID15_13N3003)
    cols = [g.cols[s.index] for s in destabilizable(g) if s.axis == "col"]
    assert (11, 12) in cols and (8, 9) in cols


def test_destabilize_to_13_grid():
    g = GridDiagram(GRID15_13N3003)
    g = destabilize(g, g.cols.index((11, 12)))
    g = destabilize(g, g.cols.index((8, 9)))
    # merge arithmetic: (11,12) goes, levels above 11 drop by one; then (8,9) goes
    assert g.cols == GRID13_DESTAB


def test_destabilize_hand_vector():
    g = GridDiagram(((1, 3), (2, 4), (1, 2), (3, 4)))
    assert destabilize(g, 2).cols == ((1, 2), (1, 3), (2, 3))


def test_destabilize_small_and_errors():
    g = GridDiagram(UNKNOT_GRID3)
    assert Site("col", 0) in destabilizable(g)
    two = destabilize(g, 0)
    assert two.cols == ((1, 2), (1, 2))
    assert destabilize(two, 0).is_sentinel()
    with pytest.raises(NotDestabilizable):
        destabilize(g, 1)
    assert destabilizable(GridDiagram.unknot_sentinel()) == []


def test_grid_without_sites():
    g = GridDiagram(((1, 3), (2, 5), (1, 4), (3, 5), (2, 4)))
    assert destabilizable(g) == []


@settings(max_examples=150, deadline=None)
@given(grids())
def test_destabilization_preserves_alexander(g):
    before = alexander_grid(g)
    for site in destabilizable(g):
        h = destabilize(g, site)
        assert h.n == g.n - 1 or h.is_sentinel()
        assert alexander_grid(h) == before


def test_row_destabilization():
    g = GridDiagram(((1, 3), (2, 4), (1, 2), (3, 4)))
    rows = [s for s in destabilizable(g) if s.axis == "row"]
    assert rows
    for s in rows:
        assert alexander_grid(destabilize(g, s)) == alexander_grid(g)


# -- edge moves ---------------------------------------------------------------


def test_edge_moves_reproduce_final_grid():
    g = GridDiagram(GRID13_DESTAB)
    for _ in range(6):
        g = move_edge(g, BOTTOM_TO_TOP)
    for _ in range(5):
        g = move_edge(g, LEFT_TO_RIGHT)
    assert g.cols == GRID13_FINAL


def test_single_move_by_hand():
    g = GridDiagram(GRID13_DESTAB)
    # bottom level 1 becomes the top level n, the rest drop by one
    assert move_edge(g, BOTTOM_TO_TOP).cols[0] == (1, 10)
    assert move_edge(g, LEFT_TO_RIGHT).cols[-1] == GRID13_DESTAB[0]


@given(grids())
def test_moves_are_cyclic_and_invertible(g):
    for side in SIDES:
        h = g
        for _ in range(g.n):
            h = move_edge(h, side)
        assert h == g
    assert move_edge(move_edge(g, BOTTOM_TO_TOP), TOP_TO_BOTTOM) == g
    assert move_edge(move_edge(g, LEFT_TO_RIGHT), RIGHT_TO_LEFT) == g


def test_unknown_side():
    with pytest.raises(ValueError):
        move_edge(GridDiagram(GRID13_FINAL), "sideways")


@settings(max_examples=60, deadline=None)
@given(grids())
def test_moves_preserve_alexander(g):
    a = alexander_grid(g)
    for side in SIDES:
        assert alexander_grid(move_edge(g, side)) == a


# -- normalization ------------------------------------------------------------


def test_normalize_relates_edge_moved_grids():
    assert normalize(GridDiagram(GRID13_DESTAB)) == normalize(GridDiagram(GRID13_FINAL))


def test_normalize_unknot_3_grid():
    g = GridDiagram(UNKNOT_GRID3)
    candidates = []
    for r in range(3):
        h = g
        for _ in range(r):
            h = move_edge(h, BOTTOM_TO_TOP)
        for _ in range(3):
            candidates.append(h.cols)
            h = move_edge(h, LEFT_TO_RIGHT)
    assert normalize(g).cols == min(candidates)


@given(grids())
def test_normalize_idempotent(g):
    assert normalize(normalize(g)) == normalize(g)


# -- text formats -------------------------------------------------------------


def test_intervals_text():
    assert render(GridDiagram(GRID13_FINAL), "intervals") == GRID13_FINAL_TEXT


def test_grid_file_round_trip():
    g = GridDiagram(GRID13_FINAL)
    text = to_text(g)
    assert text.startswith("grid 13\n5 13\n1 12\n") and text.endswith("7 9\n")
    assert from_text(text) == g
    with pytest.raises(InvalidGrid):
        from_text("grid 3\n1 2\n")
    with pytest.raises(InvalidGrid):
        from_text("1 2\n")


def test_ascii_rendering():
    two = render(GridDiagram(((1, 2), (1, 2))), "ascii")
    assert two.splitlines() == ["+-+", "+-+"]
    art = render(GridDiagram(((2, 5), (1, 3), (2, 4), (3, 5), (1, 4))), "ascii")
    # top level first; horizontals are broken where a vertical passes over
    assert art == "+-----+\n|   +-|-+\n| +-|-+ |\n+-|-+   |\n  +-----+\n"


def test_svg_is_well_formed():
    svg = render(GridDiagram(GRID13_FINAL), "svg")
    root = ET.fromstring(svg)
    lines = [el for el in root.iter() if el.tag.endswith("line")]
    assert len(lines) == 26
    # verticals come last
    assert all(el.get("x1") == el.get("x2") for el in lines[13:])


def test_unknown_render_format():
    with pytest.raises(ValueError):
        render(GridDiagram(GRID13_FINAL), "png")


def test_xo_export():
    xs, os_ = to_xo(GridDiagram(GRID13_FINAL))
    assert sorted(xs) == sorted(os_) == list(range(1, 14))
    assert all(x != o for x, o in zip(xs, os_))


def test_random_grid_is_seeded():
    assert random_grid(8, random.Random(1)) == random_grid(8, random.Random(1))
