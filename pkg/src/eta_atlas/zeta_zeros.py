"""Zero catalogs: critical-line zeros of zeta, box zeros of zeta'/zeta'',
and the real negative zeros of zeta'.

The critical-line finder scans the real-valued signal

    u(t) = Re( exp(i Im log h(1/2+it)) * zeta'(1/2+it) ),

which is a positive multiple of Re eta(1/2+it) and therefore vanishes
exactly at the zeta zeros for t > 7.  Completeness is audited with the
unwrapped argument of eta along the line: each zero consumes exactly pi of
argument, so the endpoint arguments pin the count as an integer.

Box finders count zeros with the argument principle (adaptive phase walk of
zeta^(k) around the rectangle, capped at pi/2 per step), subdivide until
each box holds one zero, and polish with Newton using the next higher
derivative.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.optimize import brentq

from .errors import (
    AccuracyError,
    BracketError,
    CountMismatchError,
    EdgeProximityError,
    MultipleZeroError,
)
from .special_functions import (
    HEIGHT_CAP,
    EvalParams,
    digamma,
    h_log,
    zeta_pack,
)

__all__ = [
    "ZeroKind",
    "TypeClass",
    "ZeroRecord",
    "SearchBox",
    "WindowCensus",
    "critical_line_signal",
    "find_critical_zeros",
    "find_derivative_zeros",
    "real_negative_zeros",
    "window_census",
    "count_zeros_in_box",
]

TWO_PI = 2.0 * math.pi


class ZeroKind(enum.Enum):
    CRITICAL = "critical"
    DERIV1 = "deriv1"
    DERIV2 = "deriv2"
    REAL_AXIS = "real_axis"


class TypeClass(enum.IntEnum):
    """Number of level-curve rays from a zeta' zero that cross the boundary."""

    T0 = 0
    T1 = 1
    T2 = 2


@dataclass
class ZeroRecord:
    location: complex
    kind: ZeroKind
    index: int
    refine_residual: float
    type_class: Optional[TypeClass] = None
    paired_crossings: Optional[tuple[float, float]] = None
    spira_partner: Optional[complex] = None
    on_z_curve: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.kind is ZeroKind.CRITICAL and abs(self.location.real - 0.5) >= 1e-12:
            raise ValueError("critical zeros live on the half line")
        if self.refine_residual >= 1e-9:
            raise ValueError(f"unrefined zero (residual {self.refine_residual:g})")

    @property
    def gamma(self) -> float:
        return self.location.imag

    @property
    def beta(self) -> float:
        return self.location.real


@dataclass(frozen=True)
class SearchBox:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self) -> None:
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise ValueError("empty search box")

    @property
    def perimeter(self) -> float:
        return 2.0 * ((self.sigma_max - self.sigma_min)
                      + (self.t_max - self.t_min))

    def contains(self, s: complex, slack: float = 0.0) -> bool:
        return (self.sigma_min - slack <= s.real <= self.sigma_max + slack
                and self.t_min - slack <= s.imag <= self.t_max + slack)

    def corners(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.sigma_min, self.t_min),
                complex(self.sigma_max, self.t_min),
                complex(self.sigma_max, self.t_max),
                complex(self.sigma_min, self.t_max))


# ---------------------------------------------------------------------------
# critical line
# ---------------------------------------------------------------------------

def _line_params(t: float, params: Optional[EvalParams]) -> EvalParams:
    if params is not None:
        return params
    return EvalParams.for_height(t, derivative_order_max=1)


def _line_state(t: float, params: Optional[EvalParams]) -> tuple[float, float]:
    """(signal u, arg eta mod 2pi) at 1/2 + it."""
    s = complex(0.5, t)
    zp = zeta_pack(s, _line_params(t, params))
    phi = h_log(s).imag
    z1 = zp.values[1]
    u = (cmath.exp(1j * phi) * z1).real
    a = math.remainder(phi + cmath.phase(z1), TWO_PI)
    return u, a


def critical_line_signal(t: float, params: Optional[EvalParams] = None) -> float:
    """Real signal proportional to Re eta(1/2 + it); vanishes at zeta zeros."""
    return _line_state(t, params)[0]


def _wrap(da: float) -> float:
    return math.remainder(da, TWO_PI)


def find_critical_zeros(t0: float, t1: float,
                        params: Optional[EvalParams] = None,
                        base_step: float = 0.05,
                        _attempt: int = 0) -> list[ZeroRecord]:
    """All zeta zeros 1/2 + i gamma with gamma in (t0, t1), ordered.

    The count is verified against the total argument change of eta along the
    segment (each zero consumes exactly pi); on mismatch the scan is retried
    at half the step, and a CountMismatchError is raised after three retries.
    """
    if not (7.0 < t0 < t1 <= HEIGHT_CAP):
        raise AccuracyError("need 7 < t0 < t1 <= height cap")

    nodes: list[tuple[float, float, float]] = []  # (t, u, unwrapped arg)

    u0, a0 = _line_state(t0, params)
    nodes.append((t0, u0, a0))

    def extend(t_hi: float, depth: int = 0) -> None:
        t_lo, u_lo, a_lo = nodes[-1]
        u_hi, a_hi_mod = _line_state(t_hi, params)
        da = _wrap(a_hi_mod - nodes[-1][2])
        if abs(da) > math.pi / 2.0 and (t_hi - t_lo) > 1e-6 and depth < 40:
            mid = 0.5 * (t_lo + t_hi)
            extend(mid, depth + 1)
            extend(t_hi, depth + 1)
            return
        nodes.append((t_hi, u_hi, nodes[-1][2] + da))

    n_steps = max(1, math.ceil((t1 - t0) / base_step))
    for i in range(1, n_steps + 1):
        extend(t0 + (t1 - t0) * i / n_steps)

    def signal(t: float) -> float:
        return critical_line_signal(t, params)

    roots: list[tuple[float, float]] = []
    for (ta, ua, _), (tb, ub, _) in zip(nodes, nodes[1:]):
        if ua == 0.0:
            ta += 1e-12
            ua = signal(ta)
        if ua * ub < 0.0:
            g = brentq(signal, ta, tb, xtol=1e-13, rtol=8.9e-16)
            roots.append((g, abs(signal(g))))

    # argument audit: number of odd multiples of pi/2 crossed
    a_start, a_end = nodes[0][2], nodes[-1][2]
    n_arg = (math.floor((a_start - math.pi / 2.0) / math.pi)
             - math.floor((a_end - math.pi / 2.0) / math.pi))
    if n_arg != len(roots):
        if _attempt < 3:
            return find_critical_zeros(t0, t1, params=params,
                                       base_step=base_step / 2.0,
                                       _attempt=_attempt + 1)
        raise CountMismatchError(
            f"argument change predicts {n_arg} zeros in ({t0:g},{t1:g}), "
            f"sign scan found {len(roots)}")

    return [ZeroRecord(location=complex(0.5, g), kind=ZeroKind.CRITICAL,
                       index=i + 1, refine_residual=res)
            for i, (g, res) in enumerate(roots)]


# ---------------------------------------------------------------------------
# argument-principle box counts and subdivision
# ---------------------------------------------------------------------------

def _edge_arg_change(fv: Callable[[complex], tuple[complex, float]],
                     s_a: complex, s_b: complex,
                     v_a: complex, l_a: float, v_b: complex, l_b: float,
                     depth: int = 0) -> float:
    """Continuous arg change of f along the segment.

    Refines while the wrapped step exceeds pi/2 *or* the segment is long
    enough relative to |f'/f| at its endpoints that a full hidden turn
    (true change near 2 pi wrapping below the cap) cannot be excluded: a
    zero at distance d forces |f'/f| ~ 1/d at samples ~d away, so the
    length * logderiv bound shrinks the step until the true change per
    accepted step is provably small.
    """
    if v_a == 0 or v_b == 0:
        raise EdgeProximityError(f"zero on contour at {s_a} - {s_b}")
    da = cmath.phase(v_b / v_a)
    seg = abs(s_b - s_a)
    if abs(da) <= math.pi / 2.0 and seg * max(l_a, l_b) <= 1.0:
        return da
    if depth >= 48:
        raise EdgeProximityError(
            f"phase step cap unattainable near {0.5 * (s_a + s_b)}")
    mid = 0.5 * (s_a + s_b)
    v_m, l_m = fv(mid)
    return (_edge_arg_change(fv, s_a, mid, v_a, l_a, v_m, l_m, depth + 1)
            + _edge_arg_change(fv, mid, s_b, v_m, l_m, v_b, l_b, depth + 1))


def _walk_edge(fv: Callable[[complex], tuple[complex, float]],
               s_a: complex, s_b: complex, coarse: float = 0.5) -> float:
    total = 0.0
    length = abs(s_b - s_a)
    n = max(2, math.ceil(length / coarse))
    prev_s = s_a
    prev_v, prev_l = fv(s_a)
    for i in range(1, n + 1):
        cur_s = s_a + (s_b - s_a) * (i / n)
        cur_v, cur_l = fv(cur_s)
        total += _edge_arg_change(fv, prev_s, cur_s, prev_v, prev_l,
                                  cur_v, cur_l)
        prev_s, prev_v, prev_l = cur_s, cur_v, cur_l
    return total


def _count_zeros_fv(fv: Callable[[complex], tuple[complex, float]],
                    box: SearchBox) -> int:
    c = box.corners()
    total = 0.0
    for a, b in zip(c, c[1:] + c[:1]):
        total += _walk_edge(fv, a, b)
    winding = total / TWO_PI
    count = round(winding)
    if abs(winding - count) > 0.01:
        raise EdgeProximityError(
            f"non-integer winding {winding:.6f} around {box}")
    return count


def count_zeros_in_box(f: Callable[[complex], complex], box: SearchBox,
                       f_logderiv: Optional[Callable[[complex], float]] = None
                       ) -> int:
    """Winding number of f around the box boundary (= zero count inside).

    `f_logderiv`, returning |f'/f|, arms the anti-aliasing refinement that
    keeps a fast 2 pi swing from hiding inside one step; all in-package
    callers supply it.
    """
    if f_logderiv is None:
        def fv(s: complex) -> tuple[complex, float]:
            return f(s), 0.0
    else:
        def fv(s: complex) -> tuple[complex, float]:
            return f(s), f_logderiv(s)
    return _count_zeros_fv(fv, box)


_SPLIT_FRACTIONS = (0.5, 0.53, 0.47, 0.56, 0.44)


def _newton_polish(s0: complex, order: int, params_of: Callable[[float], EvalParams],
                   max_iter: int = 60) -> Optional[tuple[complex, float]]:
    s = s0
    for _ in range(max_iter):
        zp = zeta_pack(s, params_of(s.imag))
        fv = zp.values[order]
        dv = zp.values[order + 1]
        step = fv / dv
        s = s - step
        if abs(step) < 1e-13 * max(1.0, abs(s)):
            zp = zeta_pack(s, params_of(s.imag))
            return s, abs(zp.values[order])
    return None


def find_derivative_zeros(box: SearchBox, order: int = 1,
                          params: Optional[EvalParams] = None) -> list[ZeroRecord]:
    """Complete list of zeros of zeta^(order) inside the box.

    Recursive rectangle subdivision on argument-principle counts, Newton
    refinement, and an exact top-level count audit.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if box.t_min <= 6.0 and order == 1:
        raise AccuracyError("zeta' searches require t_min > 6")
    if abs(box.t_max) > HEIGHT_CAP:
        raise AccuracyError("box exceeds height cap")

    def params_of(t: float) -> EvalParams:
        if params is not None:
            return params
        return EvalParams.for_height(t, derivative_order_max=order + 1)

    def fv(s: complex) -> tuple[complex, float]:
        zp = zeta_pack(s, params_of(s.imag))
        v = zp.values[order]
        return v, abs(zp.values[order + 1] / v) if v != 0 else math.inf

    kind = ZeroKind.DERIV1 if order == 1 else ZeroKind.DERIV2
    found: list[tuple[complex, float]] = []

    def count_with_perturbation(b: SearchBox) -> tuple[SearchBox, int]:
        last: Exception | None = None
        for eps in (0.0, 1e-4, 3e-4, 1e-3):
            bb = SearchBox(b.sigma_min - eps, b.sigma_max + eps,
                           b.t_min - eps * 0.7, b.t_max + eps * 0.7)
            try:
                return bb, _count_zeros_fv(fv, bb)
            except EdgeProximityError as exc:
                last = exc
        raise last  # type: ignore[misc]

    def subdivide(b: SearchBox, n_inside: int, depth: int = 0) -> None:
        if n_inside == 0:
            return
        diag = math.hypot(b.sigma_max - b.sigma_min, b.t_max - b.t_min)
        if n_inside >= 2 and diag < 1e-6:
            raise MultipleZeroError(
                f"subdivision stalled with count {n_inside} at {b}")
        if n_inside == 1:
            center = complex(0.5 * (b.sigma_min + b.sigma_max),
                             0.5 * (b.t_min + b.t_max))
            polished = _newton_polish(center, order, params_of)
            if polished is not None:
                s_star, resid = polished
                if b.contains(s_star, slack=1e-9) and resid < 1e-10:
                    found.append((s_star, resid))
                    return
            # Newton wandered; shrink the box and try again
            if diag < 1e-8:
                raise MultipleZeroError(f"refinement failed in {b}")
        tall = (b.t_max - b.t_min) >= (b.sigma_max - b.sigma_min)
        for frac in _SPLIT_FRACTIONS:
            if tall:
                cut = b.t_min + frac * (b.t_max - b.t_min)
                lo = SearchBox(b.sigma_min, b.sigma_max, b.t_min, cut)
                hi = SearchBox(b.sigma_min, b.sigma_max, cut, b.t_max)
            else:
                cut = b.sigma_min + frac * (b.sigma_max - b.sigma_min)
                lo = SearchBox(b.sigma_min, cut, b.t_min, b.t_max)
                hi = SearchBox(cut, b.sigma_max, b.t_min, b.t_max)
            try:
                n_lo = _count_zeros_fv(fv, lo)
                n_hi = _count_zeros_fv(fv, hi)
            except EdgeProximityError:
                continue
            if n_lo + n_hi != n_inside:
                continue  # a zero sits on the cut; move it
            subdivide(lo, n_lo, depth + 1)
            subdivide(hi, n_hi, depth + 1)
            return
        raise EdgeProximityError(f"could not split {b} cleanly")

    top_box, n_total = count_with_perturbation(box)
    subdivide(top_box, n_total)
    if len(found) != n_total:
        raise CountMismatchError(
            f"contour count {n_total} != {len(found)} refined zeros")
    found.sort(key=lambda pair: (pair[0].imag, pair[0].real))
    return [ZeroRecord(location=s, kind=kind, index=i + 1, refine_residual=r)
            for i, (s, r) in enumerate(found)]


# ---------------------------------------------------------------------------
# real negative zeros of zeta'
# ---------------------------------------------------------------------------

def _real_zero_equation(a: float) -> float:
    """Vanishes exactly at the real zeros -a of zeta' (reflected form).

    zeta'(-a) = 0  <=>  (chi'/chi)(-a) = (zeta'/zeta)(1+a), and
    (chi'/chi)(-a) = log(2 pi) - (pi/2) cot(pi a / 2) - psi(1 + a).
    """
    w = 1.0 + a
    p = EvalParams(euler_maclaurin_terms=24, derivative_order_max=1)
    zp = zeta_pack(complex(w), p)
    half = math.pi * a / 2.0
    cot = math.cos(half) / math.sin(half)
    lhs = math.log(2 * math.pi) - (math.pi / 2.0) * cot - digamma(w).real
    return lhs - (zp.values[1] / zp.values[0]).real


def real_negative_zeros(n_max: int) -> list[float]:
    """a_n with -a_n the unique real zero of zeta' in (-2n-2, -2n), n=1..n_max."""
    if n_max < 1:
        raise ValueError("n_max >= 1")
    out: list[float] = []
    for n in range(1, n_max + 1):
        lo, hi = 2.0 * n, 2.0 * n + 2.0
        bracket = None
        for eps in (1e-6, 1e-4, 1e-2, 0.1):
            va = _real_zero_equation(lo + eps)
            vb = _real_zero_equation(hi - eps)
            if va < 0.0 < vb:
                bracket = (lo + eps, hi - eps)
                break
        if bracket is None:
            raise BracketError(
                f"no sign change for the real zero in (-{hi:g}, -{lo:g})")
        a = brentq(_real_zero_equation, *bracket, xtol=1e-12, rtol=8.9e-16)
        if abs(_real_zero_equation(a)) > 1e-10:
            raise BracketError(f"poorly converged real zero a_{n}")
        out.append(a)
    return out


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowCensus:
    t0: float
    t1: float
    n_critical: int
    n_deriv1: int
    main_term_critical: float
    main_term_deriv1: float


def _main_term(t: float, denom: float) -> float:
    if t <= 0:
        return 0.0
    return (t / TWO_PI) * math.log(t / denom) - t / TWO_PI


def window_census(t0: float, t1: float,
                  box_sigma_max: float = 6.0,
                  params: Optional[EvalParams] = None) -> WindowCensus:
    """Exact window counts for zeta and zeta' zeros plus main-term predictions.

    zeta' zeros are searched in sigma in (1/2, box_sigma_max); the Dirichlet
    first term dominates for sigma >= 6 (the n >= 3 tail of zeta' is below
    0.19 of the n = 2 term there), so no zeros live to the right of the box.
    """
    if not (7.0 < t0 < t1):
        raise AccuracyError("need 7 < t0 < t1")
    crit = find_critical_zeros(t0, t1, params=params)
    deriv = find_derivative_zeros(
        SearchBox(0.5, box_sigma_max, t0, t1), order=1, params=params)
    return WindowCensus(
        t0=t0, t1=t1,
        n_critical=len(crit),
        n_deriv1=len(deriv),
        main_term_critical=_main_term(t1, TWO_PI) - _main_term(t0, TWO_PI),
        main_term_deriv1=_main_term(t1, 2.0 * TWO_PI) - _main_term(t0, 2.0 * TWO_PI),
    )
