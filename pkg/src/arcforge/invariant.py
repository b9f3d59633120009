"""Knot invariants used to check that each pipeline stage keeps the knot type."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from . import laurent
from .diagram import PlanarDiagram, grid_to_diagram
from .errors import TooLarge
from .grid import GridDiagram, torus_shifts, traverse
from .laurent import ONE, LaurentPoly

MAX_BRACKET_CROSSINGS = 20

_T = LaurentPoly.monomial(1)
_ONE_MINUS_T = ONE - _T


def alexander_pd(d: PlanarDiagram) -> LaurentPoly:
    """Alexander polynomial from the Fox-calculus matrix of the Wirtinger relations."""
    c = d.crossing_count
    if c <= 1:
        return ONE
    arc_of = [0] * d.edge_count
    count = 0
    for k in range(d.edge_count):
        if not d.passage_is_over(k):
            count += 1
        arc_of[k] = (count - 1) % c
    rows = []
    for x, (a, b, cc, dd) in enumerate(d.pd):
        row = [laurent.ZERO] * c
        o, i, j = arc_of[b], arc_of[a], arc_of[cc]
        if d.signs[x] > 0:
            row[o] = row[o] + _ONE_MINUS_T
            row[i] = row[i] + _T
            row[j] = row[j] - ONE
        else:
            row[o] = row[o] - _ONE_MINUS_T
            row[i] = row[i] + ONE
            row[j] = row[j] - _T
        rows.append(row)
    minor = [r[:-1] for r in rows[:-1]]
    return laurent.det(minor).normalized()


def winding_matrix(g: GridDiagram) -> list[list[int]]:
    """Winding number of the oriented grid curve around each point (i + 1/2, j + 1/2)."""
    n = g.n
    verts = [s for s in traverse(g) if s.vertical]
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        px = i + 0.5
        for j in range(n):
            py = j + 0.5
            total = 0
            for s in verts:
                if s.pos > px and min(s.start, s.end) < py < max(s.start, s.end):
                    total += 1 if s.end > s.start else -1
            w[i][j] = total
    return w


def alexander_grid(g: GridDiagram) -> LaurentPoly:
    """Alexander polynomial from det(t^winding) = +-t^k (1-t)^(n-1) Delta(t)."""
    if g.n <= 2:
        return ONE
    w = winding_matrix(g)
    m = [[LaurentPoly.monomial(v) for v in row] for row in w]
    value = laurent.det(m)
    return value.divexact(_ONE_MINUS_T ** (g.n - 1)).normalized()


# ---------------------------------------------------------------------------
# Kauffman bracket and Jones polynomial (variable A for the bracket)

_LOOP = LaurentPoly({2: -1, -2: -1})


def _crossing_order(d: PlanarDiagram) -> list[int]:
    # greedy: keep the set of half-processed edges small
    c = d.crossing_count
    done = [False] * c
    open_labels: set[int] = set()
    order = []
    for _ in range(c):
        best, best_score = -1, -1
        for x in range(c):
            if done[x]:
                continue
            score = sum(1 for v in d.pd[x] if v in open_labels)
            if score > best_score:
                best, best_score = x, score
        done[best] = True
        order.append(best)
        for v in d.pd[best]:
            open_labels ^= {v}
    return order


def kauffman_bracket(d: PlanarDiagram) -> LaurentPoly:
    """Normalized Kauffman bracket <D> in A, with <unknot> = 1.

    Sums the state model crossing by crossing; partial states that leave the
    same pairing of dangling edges are merged, which gives the same total as
    the plain 2^c enumeration.
    """
    c = d.crossing_count
    if c > MAX_BRACKET_CROSSINGS:
        raise TooLarge(f"{c} crossings exceeds the bracket limit of {MAX_BRACKET_CROSSINGS}")
    if c == 0:
        return ONE
    seen_count: dict[int, int] = {}
    states: dict[tuple, dict[tuple[int, int], int]] = {(): {(0, 0): 1}}
    loop_powers = [ONE]
    for x in _crossing_order(d):
        a, b, cc, dd = d.pd[x]
        degree_before = dict(seen_count)
        for v in (a, b, cc, dd):
            seen_count[v] = seen_count.get(v, 0) + 1
        new_states: dict[tuple, dict[tuple[int, int], int]] = {}
        for key, poly in states.items():
            for pairs, aexp in (((a, b), (cc, dd)), 1), (((a, dd), (b, cc)), -1):
                match = dict(key)
                loops = 0
                deg = dict(degree_before)
                for u, v in pairs:
                    loops += _join(match, deg, u, v)
                nkey = tuple(sorted(match.items()))
                target = new_states.setdefault(nkey, {})
                for (e, l), coef in poly.items():
                    slot = (e + aexp, l + loops)
                    target[slot] = target.get(slot, 0) + coef
        states = {k: _collapse(v) for k, v in new_states.items()}
    (final,) = states.values()
    total = laurent.ZERO
    for (e, loops), coef in final.items():
        while len(loop_powers) <= loops:
            loop_powers.append(loop_powers[-1] * _LOOP)
        total = total + LaurentPoly.monomial(e, coef) * loop_powers[loops]
    return total.divexact(_LOOP)


def _join(match: dict[int, int], deg: dict[int, int], u: int, v: int) -> int:
    """Add a smoothing arc between edge ends u and v; return 1 if it closes a loop."""
    du, dv = deg.get(u, 0), deg.get(v, 0)
    if u == v:
        deg[u] = du + 2
        return 1
    deg[u] = du + 1
    deg[v] = dv + 1
    if du == 0 and dv == 0:
        match[u] = v
        match[v] = u
        return 0
    if du == 1 and dv == 0:
        p = match.pop(u)
        match[p] = v
        match[v] = p
        return 0
    if du == 0 and dv == 1:
        q = match.pop(v)
        match[q] = u
        match[u] = q
        return 0
    if match[u] == v:
        del match[u]
        del match[v]
        return 1
    p, q = match.pop(u), match.pop(v)
    match[p] = q
    match[q] = p
    return 0


def _collapse(poly: dict[tuple[int, int], int]) -> dict[tuple[int, int], int]:
    return {k: v for k, v in poly.items() if v}


def jones(d: PlanarDiagram) -> LaurentPoly:
    """Jones polynomial in t, from <D> with A = t^(-1/4) and the writhe correction."""
    bracket = kauffman_bracket(d)
    w = d.writhe()
    f = bracket * LaurentPoly.monomial(-3 * w, -1 if w % 2 else 1)
    out = {}
    for e, coef in f.terms.items():
        if e % 4:
            raise ArithmeticError("bracket exponent not divisible by 4; input is not a knot")
        out[-e // 4] = coef
    return LaurentPoly(out)


# ---------------------------------------------------------------------------
# Evidence reports


@dataclass
class Check:
    name: str
    invariant: str
    lhs: str
    rhs: str
    passed: bool


@dataclass
class EvidenceReport:
    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(
                {"name": c.name, "invariant": c.invariant, "lhs": c.lhs, "rhs": c.rhs, "pass": c.passed}
            )
            + "\n"
            for c in self.checks
        )

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "checks": [asdict(c) for c in self.checks]}

    def summary(self) -> str:
        parts = [f"{c.invariant}={'PASS' if c.passed else 'FAIL'}" for c in self.checks]
        return f"{'PASS' if self.passed else 'FAIL'} ({', '.join(parts)})"


def min_crossing_diagram(g: GridDiagram) -> PlanarDiagram:
    """Diagram of the row/column rotation of ``g`` with the fewest crossings."""
    if g.n <= 2:
        return grid_to_diagram(g)
    return min(
        (grid_to_diagram(GridDiagram(cols)) for cols in torus_shifts(g)),
        key=lambda d: d.crossing_count,
    )


def same_knot_evidence(a: PlanarDiagram, b: GridDiagram, name: str = "") -> EvidenceReport:
    """Compare invariants of a diagram and a grid.

    Alexander is always compared (up to units).  The Jones polynomial is
    compared exactly when both sides have at most 20 crossings, so a mirror
    image is reported as a failure.  The grid side uses the row and column
    rotation of ``b`` with the fewest crossings.
    """
    report = EvidenceReport(name)
    alex_a = alexander_pd(a)
    alex_b = alexander_grid(b)
    report.checks.append(
        Check(name, "alexander", alex_a.format(), alex_b.format(), alex_a.equal_up_to_units(alex_b))
    )
    db = min_crossing_diagram(b)
    if a.crossing_count <= MAX_BRACKET_CROSSINGS and db.crossing_count <= MAX_BRACKET_CROSSINGS:
        ja, jb = jones(a), jones(db)
        report.checks.append(Check(name, "jones", ja.format(), jb.format(), ja == jb))
    return report
