"""Catalog persistence, histograms/quantiles, and dependency-free SVG.

Everything written here is byte-deterministic for a fixed input: floats are
serialized with Python's shortest round-trip repr, JSON keys are sorted, and
no timestamps or environment facts enter the artifacts.
"""

from __future__ import annotations

import json
import math
import pathlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import CatalogError
from .zeta_zeros import TypeClass, ZeroKind, ZeroRecord

__all__ = [
    "SCHEMA_VERSION",
    "Catalog",
    "write_catalog",
    "read_catalog",
    "HistogramSpec",
    "Histogram",
    "make_histogram",
    "make_density2d",
    "svg_histogram",
    "svg_density2d",
    "svg_traces",
    "zero_records_to_csv",
    "quantiles",
]

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# catalog round trip
# ---------------------------------------------------------------------------

def _cpx(z: complex) -> list[float]:
    return [z.real, z.imag]


def _record_to_obj(r: ZeroRecord) -> dict:
    return {
        "location": _cpx(r.location),
        "kind": r.kind.value,
        "index": r.index,
        "refine_residual": r.refine_residual,
        "type_class": None if r.type_class is None else int(r.type_class),
        "paired_crossings": (None if r.paired_crossings is None
                             else list(r.paired_crossings)),
        "spira_partner": (None if r.spira_partner is None
                          else _cpx(r.spira_partner)),
        "on_z_curve": r.on_z_curve,
    }


def _record_from_obj(obj: dict) -> ZeroRecord:
    return ZeroRecord(
        location=complex(*obj["location"]),
        kind=ZeroKind(obj["kind"]),
        index=obj["index"],
        refine_residual=obj["refine_residual"],
        type_class=(None if obj["type_class"] is None
                    else TypeClass(obj["type_class"])),
        paired_crossings=(None if obj["paired_crossings"] is None
                          else tuple(obj["paired_crossings"])),
        spira_partner=(None if obj["spira_partner"] is None
                       else complex(*obj["spira_partner"])),
        on_z_curve=obj["on_z_curve"],
    )


@dataclass
class Catalog:
    """Persisted, sorted zero collection with provenance metadata."""

    mode: str                      # "zeta" or "rmt"
    window: dict
    parameters: dict
    records: list = field(default_factory=list)
    report: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def sorted_records(self) -> list:
        if self.mode == "zeta":
            return sorted(self.records, key=lambda r: (r.gamma, r.beta))
        return self.records


def write_catalog(path: Union[str, pathlib.Path], catalog: Catalog) -> None:
    if catalog.mode == "zeta":
        rows = [_record_to_obj(r) for r in catalog.sorted_records()]
    else:
        rows = catalog.records
    payload = {
        "schema_version": catalog.schema_version,
        "mode": catalog.mode,
        "window": catalog.window,
        "parameters": catalog.parameters,
        "report": catalog.report,
        "records": rows,
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    pathlib.Path(path).write_text(text)


def read_catalog(path: Union[str, pathlib.Path]) -> Catalog:
    try:
        payload = json.loads(pathlib.Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CatalogError(f"unparseable catalog {path}: {exc}") from exc
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise CatalogError(
            f"catalog schema version {version} != supported {SCHEMA_VERSION}")
    records: list = []
    if payload["mode"] == "zeta":
        for i, obj in enumerate(payload["records"]):
            try:
                records.append(_record_from_obj(obj))
            except (KeyError, TypeError, ValueError) as exc:
                raise CatalogError(f"corrupted record at row {i}: {exc}") from exc
    else:
        records = payload["records"]
    return Catalog(mode=payload["mode"], window=payload["window"],
                   parameters=payload["parameters"], records=records,
                   report=payload.get("report", {}),
                   schema_version=version)


def zero_records_to_csv(records: Sequence[ZeroRecord]) -> str:
    """Fixed-schema CSV for zero records (schema v1)."""
    lines = ["index,kind,beta,gamma,refine_residual,type_class,"
             "gamma_minus,gamma_plus,spira_re,spira_im,on_z_curve"]
    for r in records:
        pc = r.paired_crossings or ("", "")
        sp = r.spira_partner
        lines.append(",".join([
            repr(r.index), r.kind.value, repr(r.beta), repr(r.gamma),
            repr(r.refine_residual),
            "" if r.type_class is None else str(int(r.type_class)),
            "" if pc[0] == "" else repr(pc[0]),
            "" if pc[1] == "" else repr(pc[1]),
            "" if sp is None else repr(sp.real),
            "" if sp is None else repr(sp.imag),
            "" if r.on_z_curve is None else str(int(bool(r.on_z_curve))),
        ]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# histograms
# ---------------------------------------------------------------------------

def quantiles(values: np.ndarray,
              qs: Sequence[float] = (0.25, 0.5, 0.75)) -> list[float]:
    """Linear-interpolation (type 7) quantiles, the single rule used
    everywhere."""
    return [float(v) for v in np.quantile(np.asarray(values, float), qs)]


@dataclass(frozen=True)
class HistogramSpec:
    variable: str
    bin_width: float
    lo: float
    hi: float
    per_type: bool = False
    log_scale: bool = False

    def edges(self) -> np.ndarray:
        n = int(round((self.hi - self.lo) / self.bin_width))
        if n < 1 or abs(self.lo + n * self.bin_width - self.hi) > 1e-9:
            raise CatalogError("bins must cover the range exactly")
        return self.lo + self.bin_width * np.arange(n + 1)


@dataclass
class Histogram:
    spec: HistogramSpec
    edges: np.ndarray
    counts: dict[str, np.ndarray]
    quartiles: dict[str, list[float]]
    sizes: dict[str, int]

    def to_csv(self) -> str:
        lines = ["label,bin_lo,bin_hi,count"]
        for label in sorted(self.counts):
            cs = self.counts[label]
            for i, c in enumerate(cs):
                lines.append(",".join([
                    label, repr(float(self.edges[i])),
                    repr(float(self.edges[i + 1])), str(int(c))]))
        return "\n".join(lines) + "\n"


def make_histogram(values: Union[np.ndarray, Mapping[str, np.ndarray]],
                   spec: HistogramSpec) -> Histogram:
    """Binned counts and quartiles; out-of-range values land in the end
    bins so totals always conserve the sample size."""
    if isinstance(values, Mapping):
        if not spec.per_type:
            raise CatalogError("mapping input needs a per-type spec")
        groups = {str(k): np.asarray(v, float) for k, v in values.items()}
    else:
        groups = {"all": np.asarray(values, float)}
    if all(len(v) == 0 for v in groups.values()):
        raise CatalogError("empty input")
    edges = spec.edges()
    counts = {}
    quarts = {}
    sizes = {}
    for label, vals in groups.items():
        if len(vals) == 0:
            counts[label] = np.zeros(len(edges) - 1, dtype=int)
            quarts[label] = []
            sizes[label] = 0
            continue
        clipped = np.clip(vals, edges[0], np.nextafter(edges[-1], -np.inf))
        c, _ = np.histogram(clipped, bins=edges)
        if int(c.sum()) != len(vals):
            raise CatalogError("histogram lost samples")
        counts[label] = c
        quarts[label] = quantiles(vals)
        sizes[label] = len(vals)
    return Histogram(spec=spec, edges=edges, counts=counts,
                     quartiles=quarts, sizes=sizes)


def make_density2d(points: Sequence[complex], lo: float, hi: float,
                   bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Square 2-D density grid over [lo, hi]^2 (for displacement clouds)."""
    pts = np.asarray(points, complex)
    if len(pts) == 0:
        raise CatalogError("empty input")
    edges = np.linspace(lo, hi, bins + 1)
    grid, _, _ = np.histogram2d(
        np.clip(pts.real, lo, np.nextafter(hi, -np.inf)),
        np.clip(pts.imag, lo, np.nextafter(hi, -np.inf)),
        bins=(edges, edges))
    return grid.astype(int), edges


# ---------------------------------------------------------------------------
# dependency-free SVG
# ---------------------------------------------------------------------------

_TYPE_COLORS = {"0": "#c8a24b", "1": "#5b8dd9", "2": "#b05fa3",
                "all": "#444444", "T0": "#c8a24b", "T1": "#5b8dd9",
                "T2": "#b05fa3"}

_SVG_W, _SVG_H, _MARGIN = 640, 360, 42.0


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def svg_histogram(hist: Histogram, title: str = "") -> str:
    edges = hist.edges
    labels = sorted(hist.counts)
    max_count = max(1, max(int(c.max()) for c in hist.counts.values()))
    if hist.spec.log_scale:
        def yval(c):
            return math.log10(c + 1.0) / math.log10(max_count + 1.0)
    else:
        def yval(c):
            return c / max_count
    inner_w = _SVG_W - 2 * _MARGIN
    inner_h = _SVG_H - 2 * _MARGIN
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
             f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
             f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>']
    if title:
        parts.append(f'<text x="{_SVG_W / 2:.1f}" y="20" font-size="14" '
                     f'text-anchor="middle">{title}</text>')
    span = edges[-1] - edges[0]
    for label in labels:
        color = _TYPE_COLORS.get(label, "#777777")
        cs = hist.counts[label]
        path = []
        for i, c in enumerate(cs):
            x0 = _MARGIN + inner_w * (edges[i] - edges[0]) / span
            x1 = _MARGIN + inner_w * (edges[i + 1] - edges[0]) / span
            y = _MARGIN + inner_h * (1.0 - yval(int(c)))
            if not path:
                path.append(f"M {_fmt(x0)} {_fmt(_MARGIN + inner_h)}")
            path.append(f"L {_fmt(x0)} {_fmt(y)} L {_fmt(x1)} {_fmt(y)}")
        path.append(f"L {_fmt(_MARGIN + inner_w)} {_fmt(_MARGIN + inner_h)}")
        parts.append(f'<path d="{" ".join(path)}" fill="none" '
                     f'stroke="{color}" stroke-width="1.4"/>')
    parts.append(f'<line x1="{_MARGIN}" y1="{_MARGIN + inner_h}" '
                 f'x2="{_MARGIN + inner_w}" y2="{_MARGIN + inner_h}" '
                 f'stroke="black"/>')
    parts.append(f'<text x="{_MARGIN}" y="{_SVG_H - 8}" font-size="11">'
                 f'{_fmt(edges[0])}</text>')
    parts.append(f'<text x="{_MARGIN + inner_w - 20}" y="{_SVG_H - 8}" '
                 f'font-size="11">{_fmt(edges[-1])}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_density2d(grid: np.ndarray, edges: np.ndarray,
                  unit_circle: bool = True, title: str = "") -> str:
    """Density plot with the reference unit circle overlaid in white."""
    n = grid.shape[0]
    size = 420
    cell = (size - 2 * _MARGIN) / n
    vmax = max(1, int(grid.max()))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    if title:
        parts.append(f'<text x="{size / 2:.1f}" y="16" font-size="13" '
                     f'text-anchor="middle">{title}</text>')
    for i in range(n):
        for j in range(n):
            c = int(grid[i, j])
            if c == 0:
                continue
            frac = c / vmax
            # blue (few) -> red (many), linear scale
            r = int(60 + 195 * frac)
            b = int(220 - 190 * frac)
            x = _MARGIN + i * cell
            y = size - _MARGIN - (j + 1) * cell
            parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" '
                         f'width="{_fmt(cell + 0.2)}" height="{_fmt(cell + 0.2)}" '
                         f'fill="rgb({r},80,{b})"/>')
    lo, hi = float(edges[0]), float(edges[-1])
    span = hi - lo
    if unit_circle and lo < -1.0 < 1.0 < hi:
        cx = _MARGIN + (0.0 - lo) / span * (size - 2 * _MARGIN)
        cy = size - _MARGIN - (0.0 - lo) / span * (size - 2 * _MARGIN)
        rad = (size - 2 * _MARGIN) / span
        parts.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(rad)}" '
                     f'fill="none" stroke="white" stroke-width="1.6"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_traces(traces: Iterable, box, title: str = "") -> str:
    """Figure-style level-curve chart: green/purple polylines in a box."""
    w, h = 560, 820
    inner_w = w - 2 * _MARGIN
    inner_h = h - 2 * _MARGIN
    sw = box.sigma_max - box.sigma_min
    th = box.t_max - box.t_min

    def xy(s: complex) -> tuple[float, float]:
        return (_MARGIN + (s.real - box.sigma_min) / sw * inner_w,
                h - _MARGIN - (s.imag - box.t_min) / th * inner_h)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" '
             f'height="{h}" viewBox="0 0 {w} {h}">',
             f'<rect width="{w}" height="{h}" fill="white"/>']
    if title:
        parts.append(f'<text x="{w / 2:.1f}" y="20" font-size="13" '
                     f'text-anchor="middle">{title}</text>')
    # critical line
    x_line = xy(complex(0.5, box.t_min))[0]
    parts.append(f'<line x1="{_fmt(x_line)}" y1="{_MARGIN}" '
                 f'x2="{_fmt(x_line)}" y2="{h - _MARGIN}" '
                 f'stroke="#bbbbbb" stroke-dasharray="4 3"/>')
    for tr in traces:
        color = "#2e8b57" if tr.color == 1 else "#7b2d8b"
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}"
                       for x, y in (xy(p) for p in tr.points))
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{color}" stroke-width="1.0"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
