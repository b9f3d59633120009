"""From an ordered filtered spanning tree to the spokes of a wheel diagram.

The knot meets a small neighbourhood of the tree (a disk) in c+1 strings,
each kept at one constant depth.  The c+1 knot edges outside the tree become
arcs outside the disk joining boundary points.  The arc that continues the
last tree edge is cut in two and its cut point is sent to an extreme level,
giving c+2 arcs.  Shrinking the disk to a point turns each arc into a spoke
labelled by the levels of its two ends.  Each spoke sits at one end of its
arc; which end is decided innermost arcs first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .diagram import HalfEdge, PlanarDiagram
from .errors import DepthConflict, PlacementConflict, StringLoop
from .spantree import OrderedTree

# Orientation conventions, fixed so that the grid is the input knot and not its mirror.
READ_CLOCKWISE = True


@dataclass(frozen=True)
class KnotString:
    """A maximal piece of the knot inside the disk, oriented along the knot."""

    passages: tuple[tuple[int, int], ...]  # (crossing, strand parity); parity 1 = over
    start: HalfEdge  # boundary half-edge where the knot enters the disk
    end: HalfEdge  # boundary half-edge where it leaves

    @property
    def crossings(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.passages)


@dataclass(frozen=True)
class StringSet:
    diagram: PlanarDiagram
    strings: tuple[KnotString, ...]
    owner: dict = field(compare=False, hash=False)  # (crossing, parity) -> string index

    def __len__(self) -> int:
        return len(self.strings)

    def at(self, h: HalfEdge) -> int:
        """Index of the string that ends at boundary half-edge ``h``."""
        return self.owner[(h.crossing, h.slot % 2)]


@dataclass(frozen=True)
class DepthMap:
    """``depth[i]`` of string i, normalized to 1..c+1; smaller is nearer the viewer."""

    depth: tuple[int, ...]


@dataclass(frozen=True)
class OutsideArc:
    edge: int
    ends: tuple[int, int]  # boundary positions; -1 marks the cut point of the broken arc
    levels: tuple[int, int]
    half: int = 0  # 1 or 2 for the halves of the broken arc

    @property
    def interval(self) -> tuple[int, int]:
        return min(self.levels), max(self.levels)


@dataclass(frozen=True)
class SpokeSequence:
    spokes: tuple[tuple[int, int], ...]
    edges: tuple[int, ...]  # diagram edge carried by each spoke
    halves: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.spokes)

    def dump(self) -> str:
        return "".join(f"{a},{b}\n" for a, b in self.spokes)


# ---------------------------------------------------------------------------
# Strings and depths


def strings_of(d: PlanarDiagram, t: OrderedTree) -> StringSet:
    in_tree = set(t.edges)
    touched = set(t.touched) if t.touched else set()
    seen: set[tuple[int, int]] = set()
    strings = []
    for x in sorted(touched):
        for parity in (0, 1):
            in_slot = 0 if parity == 0 else d.over_in_slot[x]
            h = HalfEdge(x, in_slot)
            if d.edge_at(h) in in_tree:
                continue
            start = h
            passages = []
            while True:
                if (h.crossing, h.slot % 2) in seen or h.crossing in {p for p, _ in passages}:
                    raise StringLoop(f"a string passes crossing {h.crossing} twice")
                passages.append((h.crossing, h.slot % 2))
                out = HalfEdge(h.crossing, (h.slot + 2) % 4)
                if d.edge_at(out) not in in_tree:
                    break
                h = d.other_end(out)
            seen.update(passages)
            strings.append(KnotString(tuple(passages), start, out))
    if len(seen) != 2 * len(touched):
        raise StringLoop("tree edges close up along the knot")
    owner = {p: i for i, s in enumerate(strings) for p in s.passages}
    return StringSet(d, tuple(strings), owner)


def assign_depths(s: StringSet, t: OrderedTree) -> DepthMap:
    """Greedy extreme-depth assignment in tree order, then renormalized to 1..len(s)."""
    d = s.diagram
    depth: dict[int, int] = {}
    lo = hi = 0

    def place(sid: int, over: bool):
        nonlocal lo, hi
        if not depth:
            val = 0
        elif over:
            val = lo - 1
        else:
            val = hi + 1
        depth[sid] = val
        lo, hi = min(lo, val), max(hi, val)

    for i, x in enumerate(t.touched):
        if i == 0:
            slot = _slot_of(d, t.edges[0], x)
        else:
            slot = t.dst_slots[i - 1]
        along = s.owner[(x, slot % 2)]
        trans = s.owner[(x, 1 - slot % 2)]
        if along not in depth:
            place(along, slot % 2 == 1)
        if trans not in depth:
            place(trans, slot % 2 == 0)
        over_sid, under_sid = (along, trans) if slot % 2 == 1 else (trans, along)
        if depth[over_sid] >= depth[under_sid]:
            raise DepthConflict(f"strings at crossing {x} violate the over/under order")
    missing = set(range(len(s))) - set(depth)
    if missing:
        raise DepthConflict(f"strings {sorted(missing)} were never reached")
    # every crossing, not only creation crossings
    for x in range(d.crossing_count):
        if (x, 1) in s.owner and depth[s.owner[(x, 1)]] >= depth[s.owner[(x, 0)]]:
            raise DepthConflict(f"strings at crossing {x} violate the over/under order")
    ranks = {v: r for r, v in enumerate(sorted(depth.values()), 1)}
    if len(ranks) != len(depth):
        raise DepthConflict("two strings share a depth")
    return DepthMap(tuple(ranks[depth[i]] for i in range(len(s))))


def _slot_of(d: PlanarDiagram, k: int, x: int) -> int:
    tail, head = d.edge_ends[k]
    return tail.slot if tail.crossing == x else head.slot


# ---------------------------------------------------------------------------
# Outside arcs


def boundary_order(d: PlanarDiagram, t: OrderedTree) -> list[HalfEdge]:
    """Non-tree half-edges in counter-clockwise order around the tree's neighbourhood."""
    in_tree = set(t.edges)
    out = []
    h = HalfEdge(t.touched[0], 0)
    for _ in range(4 * d.crossing_count):
        if d.edge_at(h) in in_tree:
            o = d.other_end(h)
            h = HalfEdge(o.crossing, (o.slot + 1) % 4)
        else:
            out.append(h)
            h = HalfEdge(h.crossing, (h.slot + 1) % 4)
    return out


def break_last_arc(
    s: StringSet, dm: DepthMap, t: OrderedTree, top: bool = True
) -> tuple[list[OutsideArc], int]:
    """Outside arcs with end levels; the arc continuing the last tree edge is cut in two.

    Returns the c+2 arcs and the level of the cut point (the top or bottom level).
    """
    d = s.diagram
    order = boundary_order(d, t)
    pos = {h: i for i, h in enumerate(order)}
    n = len(s) + 1
    shift = 0 if top else 1
    cut_level = n if top else 1
    broken = t.last_extension(d)
    arcs = []
    for k, (tail, head) in enumerate(d.edge_ends):
        if tail not in pos:
            continue
        a, b = pos[tail], pos[head]
        la, lb = dm.depth[s.at(tail)] + shift, dm.depth[s.at(head)] + shift
        if k == broken:
            arcs.append(OutsideArc(k, (a, -1), (la, cut_level), 1))
            arcs.append(OutsideArc(k, (b, -1), (lb, cut_level), 2))
        else:
            arcs.append(OutsideArc(k, (a, b), (la, lb)))
    return arcs, cut_level


def _span(arc: OutsideArc) -> tuple[int, int]:
    a, b = arc.ends
    if b < 0:
        return a, a
    return min(a, b), max(a, b)


def place_spokes(arcs: Sequence[OutsideArc]) -> SpokeSequence:
    """Choose an end of every arc for its spoke and read the spokes around the disk.

    An arc (i, j) encloses the boundary positions strictly between i and j.  An
    end of an enclosing arc is blocked when its level lies strictly inside the
    interval of some enclosed arc; the spoke goes to the blocked end.
    """
    for arc in arcs:
        lo, hi = arc.interval
        if lo == hi:
            raise PlacementConflict(f"arc on edge {arc.edge} has equal end levels")
    spans = [_span(a) for a in arcs]
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            (a, b), (p, q) = spans[i], spans[j]
            if a < p < b < q or p < a < q < b:
                raise PlacementConflict("outside arcs cross; the rotation system is not planar")
    chosen: list[int] = [0] * len(arcs)
    for idx, arc in enumerate(arcs):
        if arc.half:
            chosen[idx] = arc.ends[0]
            continue
        i, j = spans[idx]
        inner = [arcs[m].interval for m in range(len(arcs)) if i < spans[m][0] and spans[m][1] < j]

        def blocked(level: int) -> bool:
            return any(lo < level < hi for lo, hi in inner)

        ba, bb = blocked(arc.levels[0]), blocked(arc.levels[1])
        if ba and bb:
            raise PlacementConflict(f"both ends of the arc on edge {arc.edge} are enclosed")
        chosen[idx] = arc.ends[1] if bb else arc.ends[0]
    order = sorted(range(len(arcs)), key=lambda m: chosen[m], reverse=READ_CLOCKWISE)
    # start right after the first half of the broken arc
    first_half = next((m for m in order if arcs[m].half == 1), None)
    if first_half is not None:
        k = order.index(first_half) + 1
        order = order[k:] + order[:k]
    return SpokeSequence(
        tuple(arcs[m].interval for m in order),
        tuple(arcs[m].edge for m in order),
        tuple(arcs[m].half for m in order),
    )


def build_wheel(d: PlanarDiagram, t: OrderedTree) -> SpokeSequence:
    """strings -> depths -> cut arc -> spokes, trying the cut at the top level first."""
    s = strings_of(d, t)
    dm = assign_depths(s, t)
    err: PlacementConflict | None = None
    for top in (True, False):
        arcs, _ = break_last_arc(s, dm, t, top)
        try:
            return place_spokes(arcs)
        except PlacementConflict as exc:
            err = exc
    assert err is not None
    raise err
