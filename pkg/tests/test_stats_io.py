"""Tests for catalog persistence, histograms, SVG emission, pipeline, CLI."""

import json
import pathlib

import numpy as np
import pytest

from eta_atlas.cli import main as cli_main
from eta_atlas.errors import CatalogError
from eta_atlas.pipeline import PipelineConfig, run_pipeline, verify_catalog
from eta_atlas.stats_io import (
    SCHEMA_VERSION,
    Catalog,
    HistogramSpec,
    make_density2d,
    make_histogram,
    quantiles,
    read_catalog,
    svg_density2d,
    svg_histogram,
    write_catalog,
    zero_records_to_csv,
)
from eta_atlas.zeta_zeros import TypeClass, ZeroKind, ZeroRecord


def sample_records():
    return [
        ZeroRecord(location=0.5 + 14.134725141734693j,
                   kind=ZeroKind.CRITICAL, index=1, refine_residual=1e-13),
        ZeroRecord(location=2.4631618694543213 + 23.298320492762858j,
                   kind=ZeroKind.DERIV1, index=1, refine_residual=2e-14,
                   type_class=TypeClass.T2,
                   paired_crossings=(14.134725141734693, 21.022039638771555),
                   spira_partner=3.1 + 23.5j, on_z_curve=False),
    ]


def make_catalog():
    return Catalog(mode="zeta", window={"t0": 10.0, "t1": 30.0},
                   parameters={"bernoulli_order": 30},
                   records=sample_records(), report={"status": "pass"})


def test_catalog_round_trip(tmp_path):
    cat = make_catalog()
    path = tmp_path / "cat.json"
    write_catalog(path, cat)
    back = read_catalog(path)
    assert back.mode == cat.mode
    assert back.window == cat.window
    assert len(back.records) == 2
    for a, b in zip(cat.sorted_records(), back.records):
        assert a.location == b.location
        assert a.kind == b.kind
        assert a.type_class == b.type_class
        assert a.paired_crossings == b.paired_crossings
        assert a.spira_partner == b.spira_partner


def test_catalog_write_is_deterministic(tmp_path):
    cat = make_catalog()
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_catalog(p1, cat)
    write_catalog(p2, cat)
    assert p1.read_bytes() == p2.read_bytes()


def test_empty_catalog_round_trip(tmp_path):
    cat = Catalog(mode="zeta", window={"t0": 1.0, "t1": 2.0}, parameters={})
    path = tmp_path / "empty.json"
    write_catalog(path, cat)
    assert read_catalog(path).records == []


def test_version_mismatch(tmp_path):
    path = tmp_path / "v.json"
    payload = {"schema_version": SCHEMA_VERSION + 1, "mode": "zeta",
               "window": {}, "parameters": {}, "records": []}
    path.write_text(json.dumps(payload))
    with pytest.raises(CatalogError, match="version"):
        read_catalog(path)


def test_corrupted_row_names_index(tmp_path):
    cat = make_catalog()
    path = tmp_path / "bad.json"
    write_catalog(path, cat)
    payload = json.loads(path.read_text())
    del payload["records"][1]["location"]
    path.write_text(json.dumps(payload))
    with pytest.raises(CatalogError, match="row 1"):
        read_catalog(path)


def test_csv_schema():
    text = zero_records_to_csv(sample_records())
    lines = text.strip().split("\n")
    assert lines[0].startswith("index,kind,beta,gamma")
    assert len(lines) == 3
    assert "deriv1" in lines[2]


def test_quantiles_are_type7():
    vals = np.array([1.0, 2.0, 3.0, 4.0])
    assert quantiles(vals) == [1.75, 2.5, 3.25]


def test_histogram_counts_conserved():
    rng = np.random.default_rng(0)
    vals = rng.uniform(-1.0, 7.0, 500)  # some out of range on both sides
    hist = make_histogram(vals, HistogramSpec("x", 0.1, 0.0, 6.0))
    assert int(hist.counts["all"].sum()) == 500
    assert len(hist.edges) == 61


def test_histogram_per_type_and_log():
    groups = {"0": np.array([0.1, 0.2]), "1": np.array([1.0]),
              "2": np.array([2.0, 2.5, 3.0])}
    spec = HistogramSpec("x", 0.5, 0.0, 4.0, per_type=True, log_scale=True)
    hist = make_histogram(groups, spec)
    assert sum(int(c.sum()) for c in hist.counts.values()) == 6
    svg = svg_histogram(hist, "demo")
    assert svg.startswith("<svg") and "</svg>" in svg
    csv = hist.to_csv()
    assert csv.splitlines()[0] == "label,bin_lo,bin_hi,count"


def test_histogram_validation():
    with pytest.raises(CatalogError):
        make_histogram(np.array([]), HistogramSpec("x", 0.1, 0.0, 1.0))
    with pytest.raises(CatalogError):
        HistogramSpec("x", 0.3, 0.0, 1.0).edges()  # bins do not fit range


def test_density2d_and_svg():
    pts = [0.5 + 0.5j, -0.5 - 0.5j, 1.2 + 0.1j, 0.5 + 0.5j]
    grid, edges = make_density2d(pts, -2.0, 2.0, 8)
    assert int(grid.sum()) == 4
    svg = svg_density2d(grid, edges)
    assert "circle" in svg


def test_zeta_pipeline_small_window(tmp_path):
    config = PipelineConfig(mode="zeta", out_dir=str(tmp_path / "z"),
                            t0=10.0, t1=60.0)
    result = run_pipeline(config)
    assert result.status == 0
    report = result.report
    assert report["identities"]["equals_n_critical"]
    assert report["identities"]["counts_sum_equals_n_deriv1"]
    files = {pathlib.Path(a).name for a in result.artifacts}
    assert {"report.json", "catalog.json", "catalog.csv"} <= files
    cat = read_catalog(tmp_path / "z" / "catalog.json")
    audit = verify_catalog(cat)
    assert audit["ok"]


def test_zeta_pipeline_rerun_byte_identical(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        run_pipeline(PipelineConfig(mode="zeta", out_dir=str(out),
                                    t0=10.0, t1=40.0))
    for p1 in sorted(out1.iterdir()):
        assert p1.read_bytes() == (out2 / p1.name).read_bytes()


def test_rmt_pipeline_and_thread_determinism(tmp_path):
    out1 = tmp_path / "seq"
    out2 = tmp_path / "par"
    r1 = run_pipeline(PipelineConfig(mode="rmt", out_dir=str(out1),
                                     n=8, count=14, seed=3, threads=1))
    r2 = run_pipeline(PipelineConfig(mode="rmt", out_dir=str(out2),
                                     n=8, count=14, seed=3, threads=2))
    assert r1.status == 0 and r2.status == 0
    for p1 in sorted(out1.iterdir()):
        assert p1.read_bytes() == (out2 / p1.name).read_bytes()
    cat = read_catalog(out1 / "catalog.json")
    assert verify_catalog(cat)["ok"]


def test_cli_round_trip(tmp_path):
    out = tmp_path / "cli"
    status = cli_main(["rmt", "--n", "8", "--count", "6", "--seed", "2",
                       "--out", str(out)])
    assert status == 0
    status = cli_main(["verify", str(out / "catalog.json")])
    assert status == 0
    status = cli_main(["plot", str(out / "catalog.json"),
                       "--out", str(out)])
    assert status == 0
    assert (out / "scaled_mod_hist.svg").exists()


def test_cli_config_file_overrides_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("count=4\nseed=9\n")
    out = tmp_path / "cfg_out"
    status = cli_main(["rmt", "--n", "8", "--count", "99", "--seed", "1",
                       "--out", str(out), "--config", str(cfg)])
    assert status == 0
    report = json.loads((out / "report.json").read_text())
    assert report["count"] == 4
    assert report["seed"] == 9


def test_cli_bad_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus=1\n")
    with pytest.raises(SystemExit):
        cli_main(["rmt", "--n", "8", "--count", "2", "--out",
                  str(tmp_path / "x"), "--config", str(cfg)])
