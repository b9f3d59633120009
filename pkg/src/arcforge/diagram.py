"""Planar knot diagrams.

A diagram is stored as a PD code: one 4-tuple of edge labels per crossing,
listed counter-clockwise starting from the incoming under-strand.  Edge labels
run ``0 .. 2c-1`` along the knot, so edge ``k`` is followed by edge ``k+1``
(mod ``2c``).  Slots 0 and 2 carry the under-strand, slots 1 and 3 the
over-strand.  Passage ``p`` is the passage through a crossing that is left by
edge ``p``.

DT convention: walk the knot labelling passages ``1..2c``.  The entry for odd
label ``2i-1`` is the even label met at the same crossing, made negative when
the even-labelled passage goes over.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

from .errors import (
    CompositeDiagramError,
    FormatError,
    LinkNotSupported,
    NugatoryCrossingError,
    RealizationError,
)


# ---------------------------------------------------------------------------
# DT codes


def dt_key(entries: tuple[int, ...]):
    return tuple((abs(e), e < 0) for e in entries)


@dataclass(frozen=True)
class DTCode:
    name: str
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        c = len(self.entries)
        if c < 3:
            raise FormatError(f"{self.name}: DT code needs at least 3 entries, got {c}")
        if any(e % 2 for e in self.entries):
            raise FormatError(f"{self.name}: DT entries must be even")
        if sorted(abs(e) for e in self.entries) != list(range(2, 2 * c + 1, 2)):
            raise FormatError(
                f"{self.name}: absolute values must be exactly 2,4,...,{2 * c}"
            )

    @property
    def crossing_count(self) -> int:
        return len(self.entries)

    def __str__(self):
        return f"{self.name} " + " ".join(str(e) for e in self.entries)


_COMMENT = re.compile(r"#.*$")


def parse_dt_line(line: str, lineno: int = 0) -> DTCode | None:
    """Parse ``<name> <e1> ... <ec>``; returns None for blank/comment lines."""
    body = _COMMENT.sub("", line).strip()
    if not body:
        return None
    fields = body.split()
    if len(fields) < 2:
        raise FormatError(f"line {lineno}: expected a name followed by DT entries")
    name, raw = fields[0], fields[1:]
    if any(tok == "|" for tok in raw):
        raise LinkNotSupported(f"line {lineno}: multi-component codes are not supported")
    try:
        entries = tuple(int(tok) for tok in raw)
    except ValueError:
        raise FormatError(f"line {lineno}: non-integer DT entry in {raw!r}") from None
    return DTCode(name, entries)


def read_dt_file(path) -> Iterator[tuple[int, DTCode | FormatError]]:
    """Yield ``(lineno, code_or_error)`` for each non-blank line of a DT file."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            try:
                code = parse_dt_line(line, lineno)
            except FormatError as err:
                yield lineno, err
                continue
            if code is not None:
                yield lineno, code


# ---------------------------------------------------------------------------
# Planar diagrams


class HalfEdge(NamedTuple):
    crossing: int
    slot: int


@dataclass(frozen=True)
class PlanarDiagram:
    pd: tuple[tuple[int, int, int, int], ...] = ()

    def __post_init__(self):
        pd = tuple(tuple(int(v) for v in x) for x in self.pd)
        object.__setattr__(self, "pd", pd)
        n = 2 * len(pd)
        seen: dict[int, int] = {}
        for x in pd:
            if len(x) != 4:
                raise FormatError("every crossing needs exactly 4 slots")
            for v in x:
                seen[v] = seen.get(v, 0) + 1
        if set(seen) != set(range(n)) or any(k != 2 for k in seen.values()):
            raise FormatError("edge labels must be 0..2c-1, each used exactly twice")
        for x in pd:
            if x[2] != (x[0] + 1) % n:
                raise FormatError(f"under-strand labels {x[0]}->{x[2]} are not consecutive")
            if n > 2 and (x[1] - x[3]) % n not in (1, n - 1):
                raise FormatError(f"over-strand labels {x[1]},{x[3]} are not consecutive")

    # -- basic structure ---------------------------------------------------

    @property
    def crossing_count(self) -> int:
        return len(self.pd)

    @property
    def edge_count(self) -> int:
        return 2 * len(self.pd)

    def is_trivial(self) -> bool:
        return not self.pd

    @cached_property
    def over_in_slot(self) -> tuple[int, ...]:
        """Slot (1 or 3) where the over-strand enters each crossing."""
        n = self.edge_count
        out = []
        for a, b, c, d in self.pd:
            if n == 2:
                out.append(1 if b == c else 3)
            elif b == (d + 1) % n:
                out.append(3)
            else:
                out.append(1)
        return tuple(out)

    @cached_property
    def signs(self) -> tuple[int, ...]:
        return tuple(1 if s == 3 else -1 for s in self.over_in_slot)

    def writhe(self) -> int:
        return sum(self.signs)

    def is_in_slot(self, x: int, slot: int) -> bool:
        return slot == 0 or slot == self.over_in_slot[x]

    @cached_property
    def edge_ends(self) -> tuple[tuple[HalfEdge, HalfEdge], ...]:
        """``edge_ends[k] = (tail, head)``: the half-edges where edge k leaves and arrives."""
        tails: dict[int, HalfEdge] = {}
        heads: dict[int, HalfEdge] = {}
        for x, labels in enumerate(self.pd):
            for s, k in enumerate(labels):
                (heads if self.is_in_slot(x, s) else tails)[k] = HalfEdge(x, s)
        return tuple((tails[k], heads[k]) for k in range(self.edge_count))

    def other_end(self, h: HalfEdge) -> HalfEdge:
        k = self.pd[h.crossing][h.slot]
        tail, head = self.edge_ends[k]
        return head if h == tail else tail

    def edge_at(self, h: HalfEdge) -> int:
        return self.pd[h.crossing][h.slot]

    def edge_crossings(self, k: int) -> tuple[int, int]:
        tail, head = self.edge_ends[k]
        return tail.crossing, head.crossing

    @staticmethod
    def is_over_slot(slot: int) -> bool:
        return slot % 2 == 1

    def passage_crossing(self, p: int) -> int:
        """Crossing of passage p (the passage left along edge p)."""
        return self.edge_ends[p][0].crossing

    def passage_is_over(self, p: int) -> bool:
        return self.is_over_slot(self.edge_ends[p][0].slot)

    def crossing_passages(self, x: int) -> tuple[int, int]:
        """(under passage, over passage) at crossing x."""
        a, b, c, d = self.pd[x]
        over_out = d if self.over_in_slot[x] == 1 else b
        return c, over_out

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """For each crossing, the list of (edge, neighbour crossing) incidences."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.pd]
        for k, (tail, head) in enumerate(self.edge_ends):
            adj[tail.crossing].append((k, head.crossing))
            if head.crossing != tail.crossing:
                adj[head.crossing].append((k, tail.crossing))
        return adj

    # -- text I/O -----------------------------------------------------------

    def to_pd_text(self) -> str:
        """One ``X(a,b,c,d)`` per line with 1-based labels."""
        return "\n".join("X({},{},{},{})".format(*(v + 1 for v in x)) for x in self.pd)

    @classmethod
    def from_pd_text(cls, text: str) -> "PlanarDiagram":
        crossings = []
        for m in re.finditer(r"X\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)", text):
            crossings.append(tuple(int(v) - 1 for v in m.groups()))
        stripped = re.sub(r"X\([^)]*\)|#.*|\s|,|\[|\]", "", text)
        if stripped:
            raise FormatError(f"unrecognised PD text near {stripped[:20]!r}")
        return cls(tuple(crossings))

    @classmethod
    def from_pd(cls, crossings: Iterable[Iterable[int]], base: int = 0) -> "PlanarDiagram":
        return cls(tuple(tuple(v - base for v in x) for x in crossings))


TRIVIAL = PlanarDiagram(())


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    """Swap over and under at every crossing."""
    out = []
    for x, (a, b, c, dd) in enumerate(d.pd):
        if d.over_in_slot[x] == 3:
            out.append((dd, a, b, c))
        else:
            out.append((b, c, dd, a))
    return PlanarDiagram(tuple(out))


# ---------------------------------------------------------------------------
# Faces


def _face_cycles(d: PlanarDiagram) -> list[list[HalfEdge]]:
    """Orbits of ``h -> rotate(other_end(h))``; each orbit lists the darts leaving a face."""
    seen = set()
    faces = []
    for x in range(d.crossing_count):
        for s in range(4):
            start = HalfEdge(x, s)
            if start in seen:
                continue
            cyc = []
            h = start
            while h not in seen:
                seen.add(h)
                cyc.append(h)
                o = d.other_end(h)
                h = HalfEdge(o.crossing, (o.slot + 1) % 4)
            faces.append(cyc)
    return faces


@dataclass(frozen=True)
class Region:
    """A face; ``boundary`` lists ``(edge, +1/-1)`` with +1 when walked along the knot's orientation."""

    boundary: tuple[tuple[int, int], ...]

    @property
    def edges(self) -> frozenset[int]:
        return frozenset(k for k, _ in self.boundary)


def regions(d: PlanarDiagram) -> list[Region]:
    out = []
    for cyc in _face_cycles(d):
        bd = []
        for h in cyc:
            k = d.edge_at(h)
            bd.append((k, 1 if d.edge_ends[k][0] == h else -1))
        out.append(Region(tuple(bd)))
    return out


def corner_faces(d: PlanarDiagram) -> dict[HalfEdge, int]:
    """Map the corner from slot s to slot s+1 at crossing x (keyed by ``HalfEdge(x, s)``) to a face index."""
    owner = {}
    for i, cyc in enumerate(_face_cycles(d)):
        for h in cyc:
            owner[HalfEdge(h.crossing, (h.slot - 1) % 4)] = i
    return owner


def is_planar(d: PlanarDiagram) -> bool:
    return d.is_trivial() or len(_face_cycles(d)) == d.crossing_count + 2


def edge_regions(d: PlanarDiagram) -> list[tuple[int, int]]:
    """For each edge the indices (into ``regions(d)``) of the two faces it bounds."""
    sides: list[list[int]] = [[] for _ in range(d.edge_count)]
    for i, cyc in enumerate(_face_cycles(d)):
        for h in cyc:
            sides[d.edge_at(h)].append(i)
    return [tuple(s) for s in sides]


# ---------------------------------------------------------------------------
# Alternation


def nonalternating_edges(d: PlanarDiagram) -> list[int]:
    """Edges whose two end passages are both over or both under."""
    out = []
    for k, (tail, head) in enumerate(d.edge_ends):
        if d.is_over_slot(tail.slot) == d.is_over_slot(head.slot):
            out.append(k)
    return out


def is_alternating(d: PlanarDiagram) -> bool:
    return not nonalternating_edges(d)


# ---------------------------------------------------------------------------
# Primeness


def _connected(vertices: set[int], edges: list[tuple[int, int]]) -> bool:
    if not vertices:
        return True
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for u, v in edges:
        if u in adj and v in adj:
            adj[u].append(v)
            adj[v].append(u)
    start = next(iter(vertices))
    stack, seen = [start], {start}
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


def nugatory_crossings(d: PlanarDiagram) -> list[int]:
    """Crossings that are cut vertices of the underlying 4-valent graph (kinks included)."""
    edges = [d.edge_crossings(k) for k in range(d.edge_count)]
    out = []
    for x in range(d.crossing_count):
        if any(u == v == x for u, v in edges):
            out.append(x)
            continue
        rest = set(range(d.crossing_count)) - {x}
        if not _connected(rest, [(u, v) for u, v in edges if x not in (u, v)]):
            out.append(x)
    return out


def composite_cut(d: PlanarDiagram) -> tuple[int, int] | None:
    """A pair of edges whose removal splits the crossings into two non-empty parts."""
    edges = [d.edge_crossings(k) for k in range(d.edge_count)]
    verts = set(range(d.crossing_count))
    for i, j in itertools.combinations(range(len(edges)), 2):
        rest = [e for k, e in enumerate(edges) if k not in (i, j)]
        if not _connected(verts, rest):
            return i, j
    return None


def check_prime(d: PlanarDiagram) -> None:
    nug = nugatory_crossings(d)
    if nug:
        raise NugatoryCrossingError(f"nugatory crossings at {nug}")
    cut = composite_cut(d)
    if cut is not None:
        raise CompositeDiagramError(f"edges {cut} split the diagram into a connected sum")


# ---------------------------------------------------------------------------
# DT realization and canonical codes


def _gauss_from_dt(code: DTCode) -> tuple[list[int], list[bool]]:
    """Per passage (0-based): crossing index and whether the passage goes over."""
    c = code.crossing_count
    crossing_of = [0] * (2 * c)
    over = [False] * (2 * c)
    for i, e in enumerate(code.entries):
        odd, even = 2 * i, abs(e) - 1
        crossing_of[odd] = crossing_of[even] = i
        even_over = e < 0
        over[even] = even_over
        over[odd] = not even_over
    return crossing_of, over


def _pd_from_gauss(crossing_of, over, signs) -> tuple[tuple[int, int, int, int], ...]:
    n = len(crossing_of)
    c = n // 2
    under_p = [0] * c
    over_p = [0] * c
    for p in range(n):
        if over[p]:
            over_p[crossing_of[p]] = p
        else:
            under_p[crossing_of[p]] = p
    pd = []
    for x in range(c):
        pu, po = under_p[x], over_p[x]
        if signs[x] > 0:
            pd.append(((pu - 1) % n, po, pu, (po - 1) % n))
        else:
            pd.append(((pu - 1) % n, (po - 1) % n, pu, po))
    return tuple(pd)


def _count_faces(pd, n: int) -> int:
    # dart 4x+s; partner via label lookup
    where: list[list[int]] = [[] for _ in range(n)]
    for x, labels in enumerate(pd):
        for s, k in enumerate(labels):
            where[k].append(4 * x + s)
    partner = [0] * (4 * len(pd))
    for a, b in where:
        partner[a] = b
        partner[b] = a
    seen = bytearray(4 * len(pd))
    faces = 0
    for start in range(4 * len(pd)):
        if seen[start]:
            continue
        faces += 1
        h = start
        while not seen[h]:
            seen[h] = 1
            o = partner[h]
            h = (o & ~3) | ((o + 1) & 3)
    return faces


def realize_dt(code: DTCode) -> PlanarDiagram:
    """Planar diagram with the given DT code.

    Each crossing has two possible local orientations once the Gauss word and
    over/under data are fixed; we search them (with the first crossing pinned,
    which only fixes the reflection) for the first assignment whose rotation
    system has ``c + 2`` faces.
    """
    crossing_of, over = _gauss_from_dt(code)
    n = len(crossing_of)
    c = n // 2
    for p in range(n):
        q = next(q for q in range(n) if q != p and crossing_of[q] == crossing_of[p])
        if (p - q) % 2 == 0:
            raise RealizationError(f"{code.name}: passages {p + 1},{q + 1} have equal parity")
    for bits in range(1 << (c - 1)):
        signs = [1] + [(-1 if (bits >> i) & 1 else 1) for i in range(c - 1)]
        pd = _pd_from_gauss(crossing_of, over, signs)
        if _count_faces(pd, n) == c + 2:
            return PlanarDiagram(pd)
    raise RealizationError(f"{code.name}: no planar embedding exists")


def _dt_entries(d: PlanarDiagram, start: int, forward: bool) -> tuple[int, ...]:
    n = d.edge_count
    label = {}
    for i in range(n):
        p = (start + i) % n if forward else (start - i) % n
        label[p] = i + 1
    entries = [0] * (n // 2)
    for x in range(d.crossing_count):
        pu, po = d.crossing_passages(x)
        lu, lo = label[pu], label[po]
        if lu % 2 == lo % 2:
            raise FormatError("crossing passages with equal parity; diagram is not planar")
        odd, even = (lu, lo) if lu % 2 else (lo, lu)
        even_over = even == lo
        entries[(odd - 1) // 2] = -even if even_over else even
    return tuple(entries)


def dt_candidates(d: PlanarDiagram) -> Iterator[tuple[int, ...]]:
    for start in range(d.edge_count):
        for forward in (True, False):
            yield _dt_entries(d, start, forward)


def canonicalize_dt(code: DTCode) -> DTCode:
    return dt_of(realize_dt(code), code.name)


def dt_of(d: PlanarDiagram, name: str = "") -> DTCode:
    """Canonical DT code: the smallest over every start passage and direction.

    Entries compare by absolute value first, positive before negative.
    """
    if d.is_trivial():
        raise FormatError("the trivial diagram has no DT code")
    best = min(dt_candidates(d), key=dt_key)
    return DTCode(name, best)


# ---------------------------------------------------------------------------
# Grid diagrams -> planar diagrams


def grid_to_diagram(g) -> PlanarDiagram:
    """Planar diagram of a grid, verticals over horizontals.

    Returns :data:`TRIVIAL` when the grid has no crossings.
    """
    from .grid import traverse

    segs = traverse(g)
    verts = [s for s in segs if s.vertical]
    hors = [s for s in segs if not s.vertical]
    crossing_id: dict[tuple[int, int], int] = {}
    for v in verts:
        lo, hi = sorted((v.start, v.end))
        for h in hors:
            a, b = sorted((h.start, h.end))
            if lo < h.pos < hi and a < v.pos < b:
                crossing_id[(v.pos, h.pos)] = len(crossing_id)
    if not crossing_id:
        return TRIVIAL
    passages = []  # (crossing, is_vertical, positive_direction)
    for s in segs:
        step = 1 if s.end > s.start else -1
        hits = []
        if s.vertical:
            for (x, y), cid in crossing_id.items():
                if x == s.pos and min(s.start, s.end) < y < max(s.start, s.end):
                    hits.append((y, cid))
        else:
            for (x, y), cid in crossing_id.items():
                if y == s.pos and min(s.start, s.end) < x < max(s.start, s.end):
                    hits.append((x, cid))
        hits.sort(reverse=step < 0)
        passages.extend((cid, s.vertical, step > 0) for _, cid in hits)
    n = len(passages)
    under: dict[int, tuple[int, bool]] = {}
    over: dict[int, tuple[int, bool]] = {}
    for p, (cid, vertical, positive) in enumerate(passages):
        (over if vertical else under)[cid] = (p, positive)
    pd = []
    for cid in range(len(crossing_id)):
        pu, east = under[cid]
        po, north = over[cid]
        o_in, o_out = (po - 1) % n, po
        if east:
            south_end, north_end = (o_in, o_out) if north else (o_out, o_in)
            pd.append(((pu - 1) % n, south_end, pu, north_end))
        else:
            north_end, south_end = (o_out, o_in) if north else (o_in, o_out)
            pd.append(((pu - 1) % n, north_end, pu, south_end))
    return PlanarDiagram(tuple(pd))
