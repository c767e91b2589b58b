#!/usr/bin/env python3
"""Render the level-curve chart for Re eta = 0 on a low window.

Reproduces the classic picture: green/purple rays leaving every zeta'
zero, crossing the critical line exactly at zeta zeros.  Writes
out/figures/contours.svg (and the window report next to it).

Run from the repository root:  python3 scripts/plot_level_curves.py
"""

from eta_atlas.pipeline import PipelineConfig, run_pipeline


def main() -> None:
    config = PipelineConfig(mode="zeta", out_dir="out/figures",
                            t0=10.0, t1=240.0, plot_contours=True)
    result = run_pipeline(config)
    print("status:", result.status)
    for artifact in result.artifacts:
        print(" ", artifact)


if __name__ == "__main__":
    main()
