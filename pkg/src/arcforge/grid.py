"""Grid diagrams stored as column intervals.

Column ``i`` (0-based, drawn on the line ``x = i + 1``) is the vertical
segment between levels ``lo < hi``; the horizontal segment at a level joins
the two columns ending there.  Vertical segments pass over horizontal ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence
from xml.sax.saxutils import escape

from .errors import InvalidGrid, InvalidSpokes, NotDestabilizable

BOTTOM_TO_TOP = "bottom->top"
TOP_TO_BOTTOM = "top->bottom"
LEFT_TO_RIGHT = "left->right"
RIGHT_TO_LEFT = "right->left"
SIDES = (BOTTOM_TO_TOP, TOP_TO_BOTTOM, LEFT_TO_RIGHT, RIGHT_TO_LEFT)


class Segment(NamedTuple):
    vertical: bool
    pos: int  # column x (1-based) for verticals, level for horizontals
    start: int
    end: int


class Site(NamedTuple):
    """A destabilization site: ``("col", i)`` for column i or ``("row", j)`` for level j+1."""

    axis: str
    index: int


def _check(cols: Sequence[tuple[int, int]]) -> str | None:
    n = len(cols)
    if n == 1 and tuple(cols[0]) == (1, 1):
        return None
    if n < 2:
        return f"grid of size {n} is not a knot"
    counts = [0] * (n + 1)
    for lo, hi in cols:
        if not (1 <= lo < hi <= n):
            return f"interval ({lo},{hi}) must satisfy 1 <= lo < hi <= {n}"
        counts[lo] += 1
        counts[hi] += 1
    bad = [lv for lv in range(1, n + 1) if counts[lv] != 2]
    if bad:
        return f"levels {bad} do not occur exactly twice"
    if len(_walk(cols)) != 2 * n:
        return "curve has more than one component"
    return None


def _walk(cols: Sequence[tuple[int, int]]) -> list[Segment]:
    """Oriented traversal starting up column 0; stops when the curve closes."""
    n = len(cols)
    ends: dict[int, list[int]] = {}
    for i, (lo, hi) in enumerate(cols):
        ends.setdefault(lo, []).append(i)
        ends.setdefault(hi, []).append(i)
    segs = []
    col, level = 0, cols[0][0]
    for _ in range(n):
        lo, hi = cols[col]
        nxt = hi if level == lo else lo
        segs.append(Segment(True, col + 1, level, nxt))
        a, b = ends[nxt]
        other = b if a == col else a
        segs.append(Segment(False, nxt, col + 1, other + 1))
        col, level = other, nxt
        if col == 0:
            break
    return segs


@dataclass(frozen=True)
class GridDiagram:
    cols: tuple[tuple[int, int], ...]

    def __post_init__(self):
        cols = tuple((int(a), int(b)) for a, b in self.cols)
        object.__setattr__(self, "cols", cols)
        err = _check(cols)
        if err:
            raise InvalidGrid(err)

    @classmethod
    def unknot_sentinel(cls) -> "GridDiagram":
        return cls(((1, 1),))

    @property
    def n(self) -> int:
        return len(self.cols)

    def is_sentinel(self) -> bool:
        return self.n == 1

    def rows(self) -> list[tuple[int, int]]:
        """``rows()[j]`` = (left column, right column) of the horizontal segment at level j+1."""
        ends: dict[int, list[int]] = {}
        for i, (lo, hi) in enumerate(self.cols):
            ends.setdefault(lo, []).append(i)
            ends.setdefault(hi, []).append(i)
        return [tuple(sorted(ends[lv])) for lv in range(1, self.n + 1)]

    def intervals(self) -> str:
        return f"{self.n}: " + "".join(f"({lo},{hi})" for lo, hi in self.cols)

    def __str__(self):
        return self.intervals()


def traverse(g: GridDiagram) -> list[Segment]:
    if g.is_sentinel():
        return []
    return _walk(g.cols)


def from_spokes(spokes: Iterable[Sequence[int]]) -> GridDiagram:
    """Draw spoke intervals as columns x = 1, 2, ... in the given order."""
    cols = []
    for s in spokes:
        a, b = s
        cols.append((min(a, b), max(a, b)) if a != b else (a, b))
    err = _check(cols)
    if err or len(cols) == 1:
        raise InvalidSpokes(err or "a single spoke is not a wheel")
    return GridDiagram(tuple(cols))


def random_grid(n: int, rng) -> GridDiagram:
    """Uniformly random knot grid of size n (``rng`` is a ``random.Random``)."""
    if n < 2:
        return GridDiagram.unknot_sentinel()
    # column i runs from level xs[i] to level xs[nxt[i]]; nxt is one n-cycle
    order = list(range(n))
    rng.shuffle(order)
    nxt = [0] * n
    for a, b in zip(order, order[1:] + order[:1]):
        nxt[a] = b
    xs = list(range(1, n + 1))
    rng.shuffle(xs)
    return GridDiagram(tuple(tuple(sorted((xs[i], xs[nxt[i]]))) for i in range(n)))


def enumerate_grids(n: int) -> Iterator[GridDiagram]:
    """Every knot grid of size n (n >= 2), in lexicographic column order."""
    counts = [0] * (n + 1)
    cols: list[tuple[int, int]] = []

    def rec(i: int):
        if i == n:
            if len(_walk(cols)) == 2 * n:
                yield GridDiagram(tuple(cols))
            return
        for lo in range(1, n + 1):
            if counts[lo] == 2:
                continue
            for hi in range(lo + 1, n + 1):
                if counts[hi] == 2:
                    continue
                counts[lo] += 1
                counts[hi] += 1
                cols.append((lo, hi))
                yield from rec(i + 1)
                cols.pop()
                counts[lo] -= 1
                counts[hi] -= 1

    if n >= 2:
        yield from rec(0)


# ---------------------------------------------------------------------------
# Moves


def destabilizable(g: GridDiagram) -> list[Site]:
    if g.is_sentinel():
        return []
    sites = [Site("col", i) for i, (lo, hi) in enumerate(g.cols) if hi == lo + 1]
    sites += [Site("row", j) for j, (a, b) in enumerate(g.rows()) if b == a + 1]
    return sites


def _drop_level(v: int, level: int) -> int:
    return v - 1 if v > level else v


def destabilize(g: GridDiagram, which: Site | int) -> GridDiagram:
    """Remove a column spanning adjacent levels (or a row joining adjacent columns).

    A plain integer means a column index.  The two merged levels (columns)
    become one and everything above (right of) them is renumbered down by one.
    """
    site = which if isinstance(which, Site) else Site("col", int(which))
    if site not in destabilizable(g):
        raise NotDestabilizable(f"{site} is not a destabilization site of {g}")
    if g.n <= 2:
        return GridDiagram.unknot_sentinel()
    if site.axis == "col":
        lo, _ = g.cols[site.index]
        rest = g.cols[: site.index] + g.cols[site.index + 1 :]
        return GridDiagram(
            tuple((_drop_level(a, lo), _drop_level(b, lo)) for a, b in rest)
        )
    level = site.index + 1
    left, right = g.rows()[site.index]
    (p,) = [v for v in g.cols[left] if v != level]
    (q,) = [v for v in g.cols[right] if v != level]
    merged = (min(p, q), max(p, q))
    cols = list(g.cols[:left]) + [merged] + list(g.cols[right + 1 :])
    return GridDiagram(
        tuple((_drop_level(a, level), _drop_level(b, level)) for a, b in cols)
    )


def _shift_levels(cols, k: int, n: int):
    # level L -> L - k (cyclically within 1..n)
    out = []
    for a, b in cols:
        a2, b2 = (a - 1 - k) % n + 1, (b - 1 - k) % n + 1
        out.append((min(a2, b2), max(a2, b2)))
    return tuple(out)


def move_edge(g: GridDiagram, side: str) -> GridDiagram:
    """Cyclically move the outermost row or column to the opposite side."""
    if g.n <= 2:
        return g
    if side == BOTTOM_TO_TOP:
        return GridDiagram(_shift_levels(g.cols, 1, g.n))
    if side == TOP_TO_BOTTOM:
        return GridDiagram(_shift_levels(g.cols, -1, g.n))
    if side == LEFT_TO_RIGHT:
        return GridDiagram(g.cols[1:] + g.cols[:1])
    if side == RIGHT_TO_LEFT:
        return GridDiagram(g.cols[-1:] + g.cols[:-1])
    raise ValueError(f"unknown side {side!r}; expected one of {SIDES}")


def torus_shifts(g: GridDiagram) -> Iterator[tuple[tuple[int, int], ...]]:
    """Column sequences of all n*n combinations of row and column rotations."""
    for r in range(g.n):
        shifted = _shift_levels(g.cols, r, g.n)
        for c in range(g.n):
            yield shifted[c:] + shifted[:c]


def normalize(g: GridDiagram) -> GridDiagram:
    """Lexicographically smallest column sequence over all row and column rotations."""
    if g.n <= 2:
        return g
    return GridDiagram(min(torus_shifts(g)))


# ---------------------------------------------------------------------------
# Serialization and drawing


def to_text(g: GridDiagram) -> str:
    return f"grid {g.n}\n" + "".join(f"{lo} {hi}\n" for lo, hi in g.cols)


def from_text(text: str) -> GridDiagram:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("grid "):
        raise InvalidGrid("missing 'grid <n>' header")
    n = int(lines[0].split()[1])
    cols = tuple(tuple(int(v) for v in ln.split()) for ln in lines[1:])
    if len(cols) != n:
        raise InvalidGrid(f"header says {n} columns, found {len(cols)}")
    return GridDiagram(cols)


def to_xo(g: GridDiagram) -> tuple[list[int], list[int]]:
    """X and O levels per column for the traversal orientation (verticals run X to O)."""
    xs = [0] * g.n
    os_ = [0] * g.n
    for s in traverse(g):
        if s.vertical:
            xs[s.pos - 1] = s.start
            os_[s.pos - 1] = s.end
    return xs, os_


def render(g: GridDiagram, fmt: str = "intervals") -> str:
    if fmt == "intervals":
        return g.intervals()
    if fmt == "ascii":
        return _ascii(g)
    if fmt == "svg":
        return _svg(g)
    raise ValueError(f"unknown format {fmt!r}")


def _ascii(g: GridDiagram) -> str:
    # one text line per level, top level first; column i at character 2*i
    if g.is_sentinel():
        return "o"
    rows = g.rows()
    width = 2 * g.n - 1
    lines = []
    for level in range(g.n, 0, -1):
        buf = [" "] * width
        a, b = rows[level - 1]
        for x in range(2 * a, 2 * b + 1):
            buf[x] = "-"
        for i, (lo, hi) in enumerate(g.cols):
            if level in (lo, hi):
                buf[2 * i] = "+"
            elif lo < level < hi:
                buf[2 * i] = "|"
        lines.append("".join(buf).rstrip())
    return "\n".join(lines) + "\n"


def _svg(g: GridDiagram, unit: int = 20, title: str | None = None) -> str:
    n = g.n
    size = unit * (n + 1)

    def y(level):
        return size - unit * level

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">'
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append('<g stroke="black" stroke-width="2" stroke-linecap="square">')
    if not g.is_sentinel():
        for level, (a, b) in enumerate(g.rows(), 1):
            out.append(
                f'<line x1="{unit * (a + 1)}" y1="{y(level)}" x2="{unit * (b + 1)}" y2="{y(level)}"/>'
            )
        # verticals last: they pass over the horizontals
        for i, (lo, hi) in enumerate(g.cols):
            x = unit * (i + 1)
            out.append(f'<line x1="{x}" y1="{y(lo)}" x2="{x}" y2="{y(hi)}"/>')
    out.append("</g></svg>")
    return "\n".join(out) + "\n"
