"""End-to-end runs: DT code -> tree -> wheel -> grid -> destabilized, normalized grid."""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, Sequence

from .diagram import (
    DTCode,
    PlanarDiagram,
    check_prime,
    dt_key,
    dt_of,
    grid_to_diagram,
    nonalternating_edges,
    read_dt_file,
    realize_dt,
)
from .errors import ArcforgeError, SearchError, SearchExhausted, WheelError
from .grid import GridDiagram, Site, destabilize, normalize, render, to_text, torus_shifts
from .invariant import Check, EvidenceReport, alexander_grid, alexander_pd, same_knot_evidence
from .spantree import DEFAULT_BUDGET, HEURISTICS, OrderedTree, search_tree, target_pairs
from .wheel import SpokeSequence, build_wheel

log = logging.getLogger(__name__)

FORMATS = ("ascii", "svg", "intervals")

# Prime knots by crossing number -> {arc index: count}, up to 13 crossings.
ARC_INDEX_COUNTS: dict[int, dict[int, int]] = {
    3: {5: 1},
    4: {6: 1},
    5: {7: 2},
    6: {8: 3},
    7: {9: 7},
    8: {7: 1, 8: 2, 10: 18},
    9: {8: 2, 9: 6, 11: 41},
    10: {8: 1, 9: 9, 10: 32, 12: 123},
    11: {9: 4, 10: 46, 11: 135, 13: 367},
    12: {9: 2, 10: 48, 11: 211, 12: 627, 14: 1288},
    13: {10: 49, 11: 399, 12: 1412, 13: 3250, 15: 4878},
}


@dataclass(frozen=True)
class RunConfig:
    input: Path | None = None
    out: Path | None = None
    formats: tuple[str, ...] = ("svg",)
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    verify: bool = False
    fallback: bool = True
    all_target_pairs: bool = False
    heuristic: str = "lex"
    write_spokes: bool = False

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ValueError(f"unknown formats {sorted(bad)}; choose from {FORMATS}")
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown tree heuristic {self.heuristic!r}")


@dataclass
class GridResult:
    name: str
    code: DTCode
    crossings: int
    alternating: bool
    grid: GridDiagram
    destabilizations_applied: int
    targets: tuple[int, ...]
    tree: OrderedTree
    spokes: SpokeSequence
    wheel_grid: GridDiagram
    verification: EvidenceReport | None = None

    @property
    def alpha_upper(self) -> int:
        return self.grid.n

    @property
    def fallback(self) -> bool:
        return not self.alternating and self.destabilizations_applied < 2

    def to_record(self) -> dict:
        rec = {
            "name": self.name,
            "dt": list(self.code.entries),
            "crossings": self.crossings,
            "alternating": self.alternating,
            "grid_size": self.alpha_upper,
            "destabilizations": self.destabilizations_applied,
            "fallback": self.fallback,
            "targets": list(self.targets),
            "tree": list(self.tree.edges),
            "grid": self.grid.intervals(),
        }
        if self.verification is not None:
            rec["verification"] = "PASS" if self.verification.passed else "FAIL"
            rec["checks"] = [
                {"invariant": c.invariant, "lhs": c.lhs, "rhs": c.rhs, "pass": c.passed}
                for c in self.verification.checks
            ]
        return rec


# ---------------------------------------------------------------------------
# One knot


def _attempts(d: PlanarDiagram, cfg: RunConfig) -> list[tuple[int, ...]]:
    na = nonalternating_edges(d)
    if not na:
        return [()]
    out = [p.edges for p in target_pairs(d, all_pairs=cfg.all_target_pairs)]
    if cfg.fallback or not out:
        out += [(e,) for e in na] + [()]
    return out


def _find_wheel(d: PlanarDiagram, cfg: RunConfig):
    wheels: dict[tuple[int, ...], SpokeSequence] = {}

    def accept(tree: OrderedTree) -> bool:
        try:
            wheels[tree.edges] = build_wheel(d, tree)
        except WheelError:
            return False
        return True

    last: SearchError | None = None
    for targets in _attempts(d, cfg):
        try:
            tree = search_tree(d, targets, cfg.budget, cfg.heuristic, accept)
        except SearchError as err:
            log.debug("targets %s: %s", targets, err)
            last = err
            continue
        return targets, tree, wheels[tree.edges]
    raise last or SearchExhausted("no tree found")


def _removable_columns(spokes: SpokeSequence, targets: Sequence[int]) -> list[int]:
    cols = []
    for i, ((lo, hi), k, half) in enumerate(zip(spokes.spokes, spokes.edges, spokes.halves)):
        if k in targets and not half and hi == lo + 1:
            cols.append(i)
    return cols


def run_one(code: DTCode, cfg: RunConfig | None = None) -> GridResult:
    try:
        d = realize_dt(code)
    except ArcforgeError as err:
        err.knot = code.name
        raise
    return run_diagram(d, code.name, cfg, code)


def run_diagram(
    d: PlanarDiagram, name: str = "", cfg: RunConfig | None = None, code: DTCode | None = None
) -> GridResult:
    cfg = cfg or RunConfig()
    try:
        check_prime(d)
        targets, tree, spokes = _find_wheel(d, cfg)
        wheel_grid = GridDiagram(spokes.spokes)
        g = wheel_grid
        cols = _removable_columns(spokes, targets)
        if len(cols) != len(targets):
            raise WheelError(f"target spokes {targets} are not all removable")
        for i in sorted(cols, reverse=True):
            g = destabilize(g, Site("col", i))
        g = normalize(g)
        report = verify_stages(d, wheel_grid, g, name) if cfg.verify else None
        return GridResult(
            name,
            code or dt_of(d, name),
            d.crossing_count,
            not nonalternating_edges(d),
            g,
            len(cols),
            tuple(targets),
            tree,
            spokes,
            wheel_grid,
            report,
        )
    except ArcforgeError as err:
        err.knot = name
        raise


def verify_stages(d: PlanarDiagram, wheel_grid: GridDiagram, final: GridDiagram, name: str = "") -> EvidenceReport:
    """Alexander of the wheel grid, plus Alexander and Jones of the final grid."""
    report = EvidenceReport(name)
    alex = alexander_pd(d)
    alex_w = alexander_grid(wheel_grid)
    report.checks.append(
        Check(name, f"alexander[{wheel_grid.n}-grid]", alex.format(), alex_w.format(), alex == alex_w)
    )
    report.checks.extend(same_knot_evidence(d, final, name).checks)
    return report


def dt_from_grid(g: GridDiagram, name: str = "") -> DTCode:
    """DT code of the grid's diagram with the fewest crossings over all edge-move shifts."""
    best = None
    for cols in torus_shifts(g):
        d = grid_to_diagram(GridDiagram(cols))
        if d.is_trivial():
            continue
        code = dt_of(d, name)
        key = (len(code.entries), dt_key(code.entries))
        if best is None or key < best[0]:
            best = (key, code)
    if best is None:
        raise ValueError("grid has no crossings in any position")
    return best[1]


# ---------------------------------------------------------------------------
# Batches


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.+-]", "_", name) or "knot"


def _work(item):
    lineno, code, cfg = item
    if isinstance(code, Exception):
        return {"name": None, "line": lineno, "error": type(code).__name__, "message": str(code)}, None
    try:
        res = run_one(code, cfg)
    except ArcforgeError as err:
        return {"name": code.name, "line": lineno, "error": type(err).__name__, "message": str(err)}, None
    rec = {"line": lineno, **res.to_record()}
    files = {"grid": to_text(res.grid)}
    if "svg" in cfg.formats:
        files["svg"] = render(res.grid, "svg")
    if "ascii" in cfg.formats:
        files["txt"] = render(res.grid, "ascii")
    if "intervals" in cfg.formats:
        files["intervals"] = res.grid.intervals() + "\n"
    if cfg.write_spokes:
        files["spokes"] = res.spokes.dump()
    return rec, files


@dataclass
class BatchSummary:
    total: int = 0
    succeeded: int = 0
    failed: int = 0
    verify_failed: int = 0
    fallbacks: int = 0
    sizes: Counter = field(default_factory=Counter)

    def text(self) -> str:
        lines = [
            f"knots: {self.total}  ok: {self.succeeded}  failed: {self.failed}  "
            f"verification failures: {self.verify_failed}  fallbacks: {self.fallbacks}"
        ]
        for (c, n), k in sorted(self.sizes.items()):
            lines.append(f"  crossings {c} -> grid size {n}: {k}")
        return "\n".join(lines) + "\n"

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.verify_failed == 0


def run_batch(cfg: RunConfig) -> tuple[list[dict], BatchSummary]:
    """Process every knot of ``cfg.input``; writes grid files and catalog.jsonl under ``cfg.out``."""
    if cfg.input is None or cfg.out is None:
        raise ValueError("run_batch needs input and out paths")
    items = [(lineno, code, cfg) for lineno, code in read_dt_file(cfg.input)]
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.jobs > 1 and len(items) > 1:
        with Pool(cfg.jobs) as pool:
            results = pool.map(_work, items, chunksize=1)
    else:
        results = [_work(it) for it in items]
    catalog = []
    summary = BatchSummary()
    used: set[str] = set()
    for rec, files in results:
        summary.total += 1
        catalog.append(rec)
        if files is None:
            summary.failed += 1
            continue
        summary.succeeded += 1
        if rec.get("verification") == "FAIL":
            summary.verify_failed += 1
        if rec["fallback"]:
            summary.fallbacks += 1
        summary.sizes[(rec["crossings"], rec["grid_size"])] += 1
        stem = _safe_name(rec["name"])
        if stem in used:
            stem = f"{stem}_L{rec['line']}"
        used.add(stem)
        rec["file"] = f"{stem}.grid"
        for ext, text in files.items():
            (out / f"{stem}.{ext}").write_text(text, encoding="utf-8", newline="\n")
    with open(out / "catalog.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for rec in catalog:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return catalog, summary


def read_catalog(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def census_report(catalog: Iterable[dict]) -> str:
    """Histogram of (crossings, grid size) next to the reference table of arc indices."""
    hist: Counter = Counter()
    flagged: Counter = Counter()
    for rec in catalog:
        if "error" in rec:
            continue
        key = (rec["crossings"], rec["grid_size"])
        hist[key] += 1
        if rec.get("fallback"):
            flagged[key] += 1
    lines = ["crossings  grid_size  count  reference"]
    for (c, n), k in sorted(hist.items()):
        ref = ARC_INDEX_COUNTS.get(c, {}).get(n)
        note = f"{ref}" if ref is not None else "-"
        if flagged[(c, n)]:
            note += f"  fallback: {flagged[(c, n)]}"
        lines.append(f"{c:>9}  {n:>9}  {k:>5}  {note}")
    if hist:
        lines.append("")
        lines.append("reference (prime knots, crossings: arc index=count):")
        for c in sorted({c for c, _ in hist}):
            if c in ARC_INDEX_COUNTS:
                cells = " ".join(f"{a}={m}" for a, m in sorted(ARC_INDEX_COUNTS[c].items()))
                lines.append(f"  {c}: {cells}  total={sum(ARC_INDEX_COUNTS[c].values())}")
        lines.append("grid sizes are upper bounds; they match the reference only for a complete input table")
    return "\n".join(lines) + "\n"
