"""Command-line interface.

Subcommands: zeta, rmt, analyze, plot, verify.  A key=value config file
(--config) overrides flags; ETA_ATLAS_THREADS sets the default worker
count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import pathlib
import sys
from typing import Optional

import numpy as np

from .analysis import (
    Identity,
    Type2Triple,
    curvature_at_zero,
    rescaled_coords,
    rho2_displacement,
    sum_identity_residual,
    theta_limit,
)
from .level_curves import spira_map
from .pipeline import PipelineConfig, run_pipeline, verify_catalog
from .stats_io import (
    HistogramSpec,
    make_density2d,
    make_histogram,
    read_catalog,
    svg_density2d,
    svg_histogram,
)
from .zeta_zeros import TypeClass, ZeroKind

_CONFIG_KEYS = {
    "mode": str, "out_dir": str, "t0": float, "t1": float, "n": int,
    "count": int, "seed": int, "threads": int, "plot_contours": bool,
    "write_samples": bool,
}


def _apply_config_file(path: str, values: dict) -> dict:
    for line_no, raw in enumerate(pathlib.Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{line_no}: expected key=value")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise SystemExit(f"{path}:{line_no}: unknown key {key!r}")
        typ = _CONFIG_KEYS[key]
        if typ is bool:
            values[key] = val.strip().lower() in ("1", "true", "yes")
        else:
            values[key] = typ(val.strip())
    return values


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ETA_ATLAS_THREADS", "1")))
    except ValueError:
        return 1


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--config", default=None,
                   help="key=value file overriding flags")


def _cmd_zeta(args: argparse.Namespace) -> int:
    values = {"mode": "zeta", "out_dir": args.out, "t0": args.t0,
              "t1": args.t1, "threads": args.threads,
              "plot_contours": args.plot_contours}
    if args.config:
        values = _apply_config_file(args.config, values)
    result = run_pipeline(PipelineConfig(**values))
    print(json.dumps(result.report.get("identities", result.report),
                     sort_keys=True))
    return result.status


def _cmd_rmt(args: argparse.Namespace) -> int:
    values = {"mode": "rmt", "out_dir": args.out, "n": args.n,
              "count": args.count, "seed": args.seed,
              "threads": args.threads, "write_samples": args.write_samples}
    if args.config:
        values = _apply_config_file(args.config, values)
    result = run_pipeline(PipelineConfig(**values))
    print(json.dumps({k: result.report[k] for k in
                      ("type_fractions", "scaled_quartiles", "status")},
                     sort_keys=True))
    return result.status


def _cmd_analyze(args: argparse.Namespace) -> int:
    catalog = read_catalog(args.catalog)
    if catalog.mode != "zeta":
        print("analyze applies to zeta catalogs", file=sys.stderr)
        return 2
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    deriv = [r for r in catalog.records if r.kind is ZeroKind.DERIV1
             and r.type_class is not None]
    t0, t1 = catalog.window["t0"], catalog.window["t1"]
    mid = 0.5 * (t0 + t1)
    anchors = sorted(deriv, key=lambda r: abs(r.gamma - mid))[:args.anchors]
    theta_resid = []
    curvatures = []
    for r in anchors:
        theta, lim = theta_limit(r)
        theta_resid.append(abs(math.remainder(lim - theta - math.pi,
                                              2 * math.pi)))
        curvatures.append(curvature_at_zero(r))
    halfwidth = min(args.halfwidth, 0.45 * (t1 - t0))
    residuals = []
    displacements = []
    if halfwidth >= 50.0:
        for r in anchors[:args.identity_anchors]:
            spira_map(r)
            rep = sum_identity_residual(Identity.FUND, r, deriv, halfwidth)
            residuals.append(rep.residual)
            displacements.append(rho2_displacement(r))
    triples = [Type2Triple.from_record(r) for r in deriv
               if r.type_class is TypeClass.T2 and r.paired_crossings]
    rescaled = [rescaled_coords(t) for t in triples]
    report = {
        "catalog": str(args.catalog),
        "anchors": len(anchors),
        "theta_residual_max": max(theta_resid) if theta_resid else None,
        "curvature_abs_median": (float(np.median(np.abs(curvatures)))
                                 if curvatures else None),
        "fund_residual_max": max(residuals) if residuals else None,
        "n_type2_triples": len(triples),
    }
    (out / "analysis_report.json").write_text(
        json.dumps(report, sort_keys=True, indent=1))
    if rescaled:
        lines = ["x,y,delta,x_prediction"]
        lines += [f"{x!r},{y!r},{d!r},{p!r}" for x, y, d, p in rescaled]
        (out / "type2_rescaled.csv").write_text("\n".join(lines) + "\n")
    if displacements:
        grid, edges = make_density2d(displacements, -3.0, 3.0, 40)
        (out / "displacement_density.svg").write_text(
            svg_density2d(grid, edges, title="scaled rho'' displacement"))
    print(json.dumps(report, sort_keys=True))
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    catalog = read_catalog(args.catalog)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    made = []
    if catalog.mode == "zeta":
        scaled = {"0": [], "1": [], "2": []}
        for r in catalog.records:
            if r.kind is ZeroKind.DERIV1 and r.type_class is not None:
                scaled[str(int(r.type_class))].append(
                    (r.beta - 0.5) * math.log(r.gamma))
        hist = make_histogram({k: np.array(v) for k, v in scaled.items()},
                              HistogramSpec("scaled_beta", 0.1, 0.0, 6.0,
                                            per_type=True,
                                            log_scale=args.log_scale))
        (out / "scaled_beta_hist.svg").write_text(
            svg_histogram(hist, "(beta'-1/2) log gamma' by type"))
        made.append("scaled_beta_hist.svg")
    else:
        n = catalog.window["n"]
        dists = {"0": [], "1": [], "2": []}
        for row in catalog.records:
            for t, scl in zip(row["types"], row["scaled"]):
                dists[str(t)].append(scl)
        hist = make_histogram({k: np.array(v) for k, v in dists.items()},
                              HistogramSpec("scaled_mod", 0.1, 0.0, 6.0,
                                            per_type=True,
                                            log_scale=args.log_scale))
        (out / "scaled_mod_hist.svg").write_text(
            svg_histogram(hist, f"n (1 - |mu'|) by type, n={n}"))
        made.append("scaled_mod_hist.svg")
    print(json.dumps({"artifacts": made}, sort_keys=True))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    catalog = read_catalog(args.catalog)
    audit = verify_catalog(catalog)
    print(json.dumps(audit, sort_keys=True))
    return 0 if audit.get("ok") else 1


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="eta-atlas",
        description="Level curves of the completed zeta-derivative function: "
                    "zero classification and the unitary-matrix analog.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeta", help="catalog and classify a height window")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--plot-contours", action="store_true")
    _add_common(p)
    p.set_defaults(fn=_cmd_zeta)

    p = sub.add_parser("rmt", help="classify a CUE ensemble")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--no-samples", dest="write_samples", action="store_false")
    _add_common(p)
    p.set_defaults(fn=_cmd_rmt)

    p = sub.add_parser("analyze", help="curvature/identity extras for a catalog")
    p.add_argument("catalog")
    p.add_argument("--anchors", type=int, default=20)
    p.add_argument("--identity-anchors", type=int, default=5)
    p.add_argument("--halfwidth", type=float, default=60.0)
    _add_common(p)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("plot", help="histogram SVGs from a catalog")
    p.add_argument("catalog")
    p.add_argument("--log-scale", action="store_true")
    _add_common(p)
    p.set_defaults(fn=_cmd_plot)

    p = sub.add_parser("verify", help="re-audit a persisted catalog")
    p.add_argument("catalog")
    _add_common(p)
    p.set_defaults(fn=_cmd_verify)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
