import json

import pytest
from reference_data import ALTERNATING, GRID13_FINAL, fixture_path

from arcforge import cli
from arcforge.diagram import DTCode, realize_dt
from arcforge.errors import NotPrimeError, RealizationError
from arcforge.grid import GridDiagram, from_text, normalize
from arcforge.invariant import alexander_grid, alexander_pd
from arcforge.pipeline import (
    RunConfig,
    census_report,
    dt_from_grid,
    read_catalog,
    run_batch,
    run_one,
)


@pytest.fixture(scope="module")
def batch(tmp_path_factory):
    out = tmp_path_factory.mktemp("batch")
    cfg = RunConfig(input=fixture_path(), out=out, formats=("svg", "ascii", "intervals"), verify=True)
    catalog, summary = run_batch(cfg)
    return out, catalog, summary


def test_trefoil():
    res = run_one(DTCode("3_1", (4, 6, 2)), RunConfig(verify=True))
    assert res.grid.n == 5
    assert res.destabilizations_applied == 0
    assert res.alternating and not res.fallback
    assert res.verification.passed
    assert res.grid == normalize(res.grid)


def test_13n3003_from_its_grid():
    code = dt_from_grid(GridDiagram(GRID13_FINAL), "13n3003")
    assert code.crossing_count == 13
    res = run_one(code, RunConfig(verify=True))
    assert res.grid.n == 13
    assert res.destabilizations_applied == 2
    assert res.wheel_grid.n == 15
    assert res.verification.passed
    names = [c.invariant for c in res.verification.checks]
    assert "alexander[15-grid]" in names
    assert alexander_grid(res.grid) == alexander_grid(GridDiagram(GRID13_FINAL))


def test_non_realizable():
    with pytest.raises(RealizationError) as info:
        run_one(DTCode("bad", (4, 6, 8, 10, 2)))
    assert info.value.knot == "bad"


def test_non_prime_rejected():
    # granny knot: two trefoils
    with pytest.raises(NotPrimeError):
        run_one(DTCode("3_1#3_1", (4, 6, 2, 10, 12, 8)))


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(jobs=0)
    with pytest.raises(ValueError):
        RunConfig(formats=("png",))
    with pytest.raises(ValueError):
        RunConfig(heuristic="random")


def test_batch_sizes(batch, codes):
    out, catalog, summary = batch
    assert summary.ok and summary.total == 6 and summary.fallbacks == 0
    for rec in catalog:
        c = rec["crossings"]
        expected = c + 2 if rec["name"] in ALTERNATING else c
        assert rec["grid_size"] == expected, rec["name"]
        assert rec["verification"] == "PASS"
        g = from_text((out / rec["file"]).read_text())
        assert g.intervals() == rec["grid"]
        d = realize_dt(codes[rec["name"]])
        assert alexander_grid(g) == alexander_pd(d)
    assert len(list(out.glob("*.grid"))) == 6
    assert len(list(out.glob("*.svg"))) == 6
    assert len(list(out.glob("*.txt"))) == 6


def test_catalog_roundtrip(batch):
    out, catalog, _ = batch
    assert read_catalog(out / "catalog.jsonl") == catalog


def test_jobs_give_identical_catalogs(tmp_path, batch):
    out, _, _ = batch
    cfg = RunConfig(input=fixture_path(), out=tmp_path, formats=("svg", "ascii", "intervals"), verify=True, jobs=2)
    run_batch(cfg)
    assert (tmp_path / "catalog.jsonl").read_bytes() == (out / "catalog.jsonl").read_bytes()
    for f in out.glob("*.grid"):
        assert (tmp_path / f.name).read_bytes() == f.read_bytes()


def test_empty_input(tmp_path):
    src = tmp_path / "empty.dt"
    src.write_text("# nothing here\n\n")
    catalog, summary = run_batch(RunConfig(input=src, out=tmp_path / "out"))
    assert catalog == [] and summary.ok
    assert (tmp_path / "out" / "catalog.jsonl").read_text() == ""
    assert cli.main(["run", "--in", str(src), "--out", str(tmp_path / "out2")]) == 0


def test_malformed_line(tmp_path, capsys):
    src = tmp_path / "mixed.dt"
    lines = [ln for ln in fixture_path().read_text().splitlines() if "13n3003" not in ln]
    lines.insert(3, "junk 4 6 x")
    src.write_text("\n".join(lines) + "\n")
    catalog, summary = run_batch(RunConfig(input=src, out=tmp_path / "out", formats=()))
    assert summary.total == 6 and summary.succeeded == 5 and summary.failed == 1
    (bad,) = [r for r in catalog if "error" in r]
    assert bad["error"] == "FormatError" and bad["line"] == 4
    assert cli.main(["run", "--in", str(src), "--out", str(tmp_path / "cli")]) == 1
    assert "line 4" in capsys.readouterr().err


def test_duplicate_names(tmp_path):
    src = tmp_path / "dup.dt"
    src.write_text("k 4 6 2\nk 4 6 8 2\n")
    catalog, _ = run_batch(RunConfig(input=src, out=tmp_path / "out", formats=()))
    assert [r["file"] for r in catalog] == ["k.grid", "k_L2.grid"]


def test_spokes_dump(tmp_path):
    src = tmp_path / "one.dt"
    src.write_text("3_1 4 6 2\n")
    run_batch(RunConfig(input=src, out=tmp_path, formats=(), write_spokes=True))
    lines = (tmp_path / "3_1.spokes").read_text().splitlines()
    assert len(lines) == 5
    assert all(len(ln.split(",")) == 2 for ln in lines)


def test_census(batch):
    out, catalog, _ = batch
    text = census_report(catalog)
    rows = text.splitlines()
    assert rows[0].split() == ["crossings", "grid_size", "count", "reference"]
    assert any(r.split()[:3] == ["8", "8", "3"] for r in rows)
    assert any(r.split()[:3] == ["13", "13", "1"] for r in rows)
    assert census_report([]) == "crossings  grid_size  count  reference\n"


def test_census_flags_fallbacks():
    recs = [{"crossings": 8, "grid_size": 9, "fallback": True}, {"name": "x", "error": "E"}]
    assert "fallback: 1" in census_report(recs)


def test_cli_census(batch, capsys):
    out, catalog, _ = batch
    assert cli.main(["census", "--catalog", str(out / "catalog.jsonl")]) == 0
    assert capsys.readouterr().out == census_report(catalog)


def test_cli_fatal(tmp_path, capsys):
    assert cli.main(["run", "--in", str(tmp_path / "missing.dt"), "--out", str(tmp_path)]) == 2
    assert "arcforge:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(["run", "--in", "x", "--out", "y", "--format", "png"])


def test_cli_run(tmp_path, capsys):
    src = tmp_path / "k.dt"
    src.write_text("4_1 4 6 8 2\n")
    assert cli.main(["run", "--in", str(src), "--out", str(tmp_path), "--verify", "--format", "ascii"]) == 0
    assert "ok: 1" in capsys.readouterr().out
    rec = json.loads((tmp_path / "catalog.jsonl").read_text())
    assert rec["grid_size"] == 6 and rec["verification"] == "PASS"
    assert (tmp_path / "4_1.txt").exists() and not (tmp_path / "4_1.svg").exists()
