"""Backtracking search for ordered filtered spanning trees.

A tree is grown one edge at a time from a root crossing.  Each new edge joins
a touched crossing to an untouched one and must obey two rules:

* Rule 1: the untouched crossings still induce a connected subgraph.
* Rule 2 (every step but the last): the knot edge that continues the new
  edge straight through the new crossing leads to an untouched crossing.

While the tree grows every string (maximal piece of the knot inside the
tree's neighbourhood) gets a depth: the string through the first edge has
depth 0 and each crossing that joins the tree starts a transversal string one
level above the current minimum (when it passes over) or below the current
maximum (when it passes under).  Pairing targets are non-alternating edges
whose two end strings must end up at adjacent depths, which is what makes the
corresponding spoke removable by a destabilization.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterator, NamedTuple, Sequence

from .diagram import HalfEdge, PlanarDiagram, edge_regions, nonalternating_edges
from .errors import NoTargets, SearchBudgetExceeded, SearchExhausted

DEFAULT_BUDGET = 10**7
HEURISTICS = ("lex", "first-fail")


class Extension(NamedTuple):
    """Adding ``edge`` from touched crossing ``src`` to the new crossing ``dst``."""

    edge: int
    src: HalfEdge
    dst: HalfEdge


@dataclass(frozen=True)
class OrderedTree:
    edges: tuple[int, ...] = ()
    touched: tuple[int, ...] = ()
    # slot of each tree edge at the crossing it attaches, in tree order
    dst_slots: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def root(self) -> int:
        return self.touched[0]

    def extend(self, ext: Extension) -> "OrderedTree":
        touched = self.touched or (ext.src.crossing,)
        return OrderedTree(
            self.edges + (ext.edge,), touched + (ext.dst.crossing,), self.dst_slots + (ext.dst.slot,)
        )

    def extension_edge(self, d: PlanarDiagram, i: int = -1) -> int:
        """Knot edge continuing tree edge ``i`` straight through the crossing it attached."""
        x = self.touched[i if i < 0 else i + 1]
        return d.pd[x][(self.dst_slots[i] + 2) % 4]

    def last_extension(self, d: PlanarDiagram) -> int:
        return self.extension_edge(d, -1)


@dataclass(frozen=True)
class PairingTarget:
    edges: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("pairing target edges must be distinct")


class _State:
    """Mutable search state with undo; confined to one search."""

    def __init__(self, d: PlanarDiagram, targets: Sequence[int] = ()):
        self.d = d
        self.c = d.crossing_count
        self.adj = d.adjacency()
        self.touched: list[int] = []
        self.is_touched = [False] * self.c
        self.edges: list[int] = []
        self.in_tree = [False] * d.edge_count
        self.dst_slots: list[int] = []
        # (crossing, strand parity) -> string id; parity 1 is the over strand
        self.owner: dict[tuple[int, int], int] = {}
        self.depth: list[int] = []
        self.lo = self.hi = 0
        self.targets = tuple(targets)
        self.target_set = set(targets)
        self.undo: list[tuple] = []

    # -- growth -------------------------------------------------------------

    def _touch(self, x: int) -> None:
        self.touched.append(x)
        self.is_touched[x] = True

    def _new_string(self, x: int, parity: int) -> None:
        if not self.depth:
            dep = 0
        elif parity == 1:
            dep = self.lo - 1
        else:
            dep = self.hi + 1
        self.owner[(x, parity)] = len(self.depth)
        self.depth.append(dep)
        self.lo = min(self.lo, dep)
        self.hi = max(self.hi, dep)

    def apply(self, ext: Extension) -> None:
        self.undo.append((self.lo, self.hi, len(self.depth)))
        src, dst = ext.src, ext.dst
        first = not self.touched
        if first:
            self._touch(src.crossing)
            self._new_string(src.crossing, src.slot % 2)
        self._touch(dst.crossing)
        self.edges.append(ext.edge)
        self.in_tree[ext.edge] = True
        self.dst_slots.append(dst.slot)
        self.owner[(dst.crossing, dst.slot % 2)] = self.owner[(src.crossing, src.slot % 2)]
        if first:
            self._new_string(src.crossing, 1 - src.slot % 2)
        self._new_string(dst.crossing, 1 - dst.slot % 2)

    def revert(self) -> None:
        lo, hi, nstrings = self.undo.pop()
        edge = self.edges.pop()
        self.in_tree[edge] = False
        self.dst_slots.pop()
        first = not self.edges
        for x in ([self.touched.pop()] + ([self.touched.pop()] if first else [])):
            self.is_touched[x] = False
            self.owner.pop((x, 0), None)
            self.owner.pop((x, 1), None)
        del self.depth[nstrings:]
        self.lo, self.hi = lo, hi

    def tree(self) -> OrderedTree:
        return OrderedTree(tuple(self.edges), tuple(self.touched), tuple(self.dst_slots))

    # -- rules --------------------------------------------------------------

    def _untouched_connected(self, extra: int) -> bool:
        rest = [x for x in range(self.c) if not self.is_touched[x] and x != extra]
        if len(rest) <= 1:
            return True
        seen = {rest[0]}
        stack = [rest[0]]
        while stack:
            x = stack.pop()
            for _, y in self.adj[x]:
                if y not in seen and not self.is_touched[y] and y != extra:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(rest)

    def _rule2_ok(self, ext: Extension, src_touched: bool) -> bool:
        if len(self.edges) == self.c - 2:
            return True
        far = self.d.other_end(HalfEdge(ext.dst.crossing, (ext.dst.slot + 2) % 4)).crossing
        if far == ext.dst.crossing or far == ext.src.crossing:
            return False
        return not (src_touched and self.is_touched[far])

    def extensions(self) -> list[Extension]:
        d = self.d
        out = []
        if not self.touched:
            for k, (tail, head) in enumerate(d.edge_ends):
                if tail.crossing == head.crossing or k in self.target_set:
                    continue
                for src, dst in ((tail, head), (head, tail)):
                    ext = Extension(k, src, dst)
                    if not self._rule2_ok(ext, False):
                        continue
                    if self._first_connected(src.crossing, dst.crossing):
                        out.append(ext)
            return out
        for k, (tail, head) in enumerate(d.edge_ends):
            if self.in_tree[k] or k in self.target_set:
                continue
            if self.is_touched[tail.crossing] == self.is_touched[head.crossing]:
                continue
            src, dst = (tail, head) if self.is_touched[tail.crossing] else (head, tail)
            ext = Extension(k, src, dst)
            if self._rule2_ok(ext, True) and self._untouched_connected(dst.crossing):
                out.append(ext)
        return out

    def _first_connected(self, a: int, b: int) -> bool:
        self.is_touched[a] = True
        try:
            return self._untouched_connected(b)
        finally:
            self.is_touched[a] = False

    # -- pairing targets ----------------------------------------------------

    def end_depth(self, h: HalfEdge) -> int | None:
        sid = self.owner.get((h.crossing, h.slot % 2))
        return None if sid is None else self.depth[sid]

    def targets_ok(self) -> bool:
        for k in self.targets:
            tail, head = self.d.edge_ends[k]
            a, b = self.end_depth(tail), self.end_depth(head)
            if a is not None and b is not None and abs(a - b) != 1:
                return False
        return True

    def complete_ok(self) -> bool:
        if not self.targets:
            return True
        last_ext = self.tree().last_extension(self.d)
        return last_ext not in self.target_set


def _replay(d: PlanarDiagram, partial: OrderedTree, targets: Sequence[int] = ()) -> _State:
    st = _State(d, targets)
    for i, k in enumerate(partial.edges):
        tail, head = d.edge_ends[k]
        dst_x = partial.touched[i + 1]
        if i == 0:
            src_x = partial.touched[0]
        else:
            src_x = tail.crossing if dst_x == head.crossing else head.crossing
        src, dst = (tail, head) if src_x == tail.crossing and dst_x == head.crossing else (head, tail)
        if src.crossing != src_x or dst.crossing != dst_x:
            raise ValueError(f"tree edge {k} does not join crossings {src_x} and {dst_x}")
        st.apply(Extension(k, src, dst))
    return st


def candidate_edges(d: PlanarDiagram, partial: OrderedTree | None = None) -> list[Extension]:
    """Legal next steps for a partial tree (for an empty tree: every legal first edge and root)."""
    return _replay(d, partial or OrderedTree()).extensions()


def verify(d: PlanarDiagram, tree: OrderedTree) -> list[str]:
    """Problems with ``tree`` as a filtered spanning tree of ``d``; empty when valid."""
    problems = []
    c = d.crossing_count
    if len(tree.edges) != c - 1:
        problems.append(f"tree has {len(tree.edges)} edges, expected {c - 1}")
    if sorted(tree.touched) != list(range(c)):
        problems.append("tree does not touch every crossing exactly once")
    if problems:
        return problems
    st = _State(d)
    for i, k in enumerate(tree.edges):
        legal = {(e.edge, e.src.crossing, e.dst.crossing): e for e in st.extensions()}
        dst = tree.touched[i + 1]
        src = tree.touched[0] if i == 0 else next(
            (x for x in d.edge_crossings(k) if x != dst), None
        )
        ext = legal.get((k, src, dst))
        if ext is None:
            problems.append(f"step {i + 1}: edge {k} is not a legal extension")
            return problems
        st.apply(ext)
    return problems


# ---------------------------------------------------------------------------
# Search


def iter_trees(
    d: PlanarDiagram,
    targets: PairingTarget | Sequence[int] | None = None,
    budget: int = DEFAULT_BUDGET,
    heuristic: str = "lex",
) -> Iterator[OrderedTree]:
    """Yield every filtered spanning tree meeting the targets, in search order.

    Raises SearchBudgetExceeded once more than ``budget`` extensions have been tried.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    tgt = tuple(targets.edges if isinstance(targets, PairingTarget) else targets or ())
    st = _State(d, tgt)
    need = d.crossing_count - 1
    nodes = 0

    def ordered(exts: list[Extension]) -> list[Extension]:
        if heuristic == "lex" or len(exts) < 2:
            return exts
        scored = []
        for e in exts:
            st.apply(e)
            scored.append(len(st.extensions()) if len(st.edges) < need else 0)
            st.revert()
        return [e for _, _, e in sorted(zip(scored, range(len(exts)), exts))]

    def dfs() -> Iterator[OrderedTree]:
        nonlocal nodes
        if len(st.edges) == need:
            if st.complete_ok():
                yield st.tree()
            return
        for ext in ordered(st.extensions()):
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(f"search budget of {budget} nodes exhausted")
            st.apply(ext)
            if st.targets_ok():
                yield from dfs()
            st.revert()

    yield from dfs()


def search_tree(
    d: PlanarDiagram,
    targets: PairingTarget | Sequence[int] | None = None,
    budget: int = DEFAULT_BUDGET,
    heuristic: str = "lex",
    accept: Callable[[OrderedTree], bool] | None = None,
) -> OrderedTree:
    """First tree in search order that meets the targets and passes ``accept``."""
    for tree in iter_trees(d, targets, budget, heuristic):
        if accept is None or accept(tree):
            return tree
    raise SearchExhausted("no filtered spanning tree satisfies the constraints")


def target_pairs(d: PlanarDiagram, all_pairs: bool = False) -> list[PairingTarget]:
    """Candidate pairs of non-alternating edges.

    By default only pairs whose edges share no region are returned, unless
    there are none.  With ``all_pairs`` the pairs sharing one region follow.
    Pairs whose edges bound exactly the same two regions are never used.
    """
    na = nonalternating_edges(d)
    regs = edge_regions(d)
    disjoint, touching = [], []
    for e, f in combinations(na, 2):
        re_, rf = set(regs[e]), set(regs[f])
        if re_ == rf:
            continue
        (disjoint if not re_ & rf else touching).append(PairingTarget((e, f)))
    if all_pairs or not disjoint:
        return disjoint + touching
    return disjoint


def select_targets(d: PlanarDiagram) -> PairingTarget:
    pairs = target_pairs(d)
    if not pairs:
        raise NoTargets("fewer than two usable non-alternating edges")
    return pairs[0]
