"""Level-curve continuation and zero classification.

The tracer follows implicit curves Re f = 0 for an analytic field f using
only scale-free local data: the argument A = arg f (the curve is A = +-pi/2
mod 2pi), the logarithmic derivative L1 = f'/f, and optionally
L2 = (f'/f)'.  In this representation

    unit gradient of Re f :  exp(-iA) conj(L1) / |L1|
    corrector step        :  -cos(A)/|L1| along the gradient
    curvature (kappa)     :  |L1| * Re( exp(-iA) (L2 + L1^2) / L1^2 )

so the astronomically small modulus of eta at large heights never appears.
Predictor steps rotate the gradient a quarter turn and adapt inversely to
curvature; traces terminate on boundary crossing, domain exit, pole
capture, arrival at another zero of the field, arc-length cap, or a
singular point of the curve (f' = 0 on the curve, which would violate the
no-branching hypothesis and is surfaced, never guessed through).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from scipy.optimize import brentq

from .errors import (
    BijectivityError,
    CatalogError,
    SeedPointError,
    TheoremViolationError,
    UnresolvedTraceError,
)
from .special_functions import (
    EvalParams,
    eta_local,
    g_local,
    h_log,
    zeta_pack,
)
from .zeta_zeros import (
    SearchBox,
    TypeClass,
    ZeroKind,
    ZeroRecord,
)

__all__ = [
    "FieldLocal",
    "EtaField",
    "SpiraField",
    "GField",
    "LogTestField",
    "TermKind",
    "Termination",
    "ContourTrace",
    "TracePolicy",
    "StripDomain",
    "DiskDomain",
    "trace_curve",
    "trace_level_curve",
    "TypeClassification",
    "classify_zero",
    "classify_window",
    "WindowClassification",
    "spira_map",
    "z_curve_trace",
    "z_curve_seeds",
]

TWO_PI = 2.0 * math.pi


class FieldLocal(NamedTuple):
    arg: float
    logderiv: complex
    logderiv_prime: Optional[complex]


# ---------------------------------------------------------------------------
# fields on the zeta side
# ---------------------------------------------------------------------------

class EtaField:
    """f = eta = h zeta'; zeros of f are the complex zeros of zeta'."""

    name = "re_eta"

    def __init__(self, params: Optional[EvalParams] = None):
        self.params = params

    def local(self, s: complex) -> FieldLocal:
        loc = eta_local(s, self.params, need_curvature=True)
        return FieldLocal(loc.arg, loc.logderiv, loc.logderiv_prime)

    def zero_exit_direction(self, s0: complex, color_sign: int) -> complex:
        # near a simple zero, f ~ f'(s0) (s - s0); the Im f > 0 ray leaves
        # along exp(i(pi/2 - arg f')), the Im f < 0 ray opposite
        zp = zeta_pack(s0, self.params)
        theta = h_log(s0).imag + cmath.phase(zp.values[2])
        return cmath.exp(1j * (color_sign * math.pi / 2.0 - theta))

    def refine_zero(self, s0: complex) -> tuple[complex, float]:
        s = s0
        for _ in range(40):
            zp = zeta_pack(s, self.params)
            step = zp.values[1] / zp.values[2]
            s = s - step
            if abs(step) < 1e-13:
                break
        resid = abs(zeta_pack(s, self.params).values[1])
        return s, resid


class SpiraField:
    """f = -i zeta''/zeta'; Re f = 0 is the curve Im(zeta''/zeta') = 0.

    Zeros of f are zeros of zeta''; poles are zeros of zeta'.
    """

    name = "im_zpp_over_zp"

    def __init__(self, params: Optional[EvalParams] = None):
        self.params = params

    def local(self, s: complex) -> FieldLocal:
        zp = zeta_pack(s, self.params)
        ratio = zp.values[2] / zp.values[1]
        a = math.remainder(cmath.phase(ratio) - math.pi / 2.0, TWO_PI)
        l1 = zp.values[3] / zp.values[2] - ratio
        return FieldLocal(a, l1, None)

    def refine_zero(self, s0: complex) -> tuple[complex, float]:
        s = s0
        for _ in range(40):
            zp = zeta_pack(s, self.params)
            step = zp.values[2] / zp.values[3]
            s = s - step
            if abs(step) < 1e-13:
                break
        resid = abs(zeta_pack(s, self.params).values[2])
        return s, resid


class GField:
    """f = -i G with G = -2^s/log 2 * zeta'; Re f = 0 is Im G = 0.

    Zeros of f are the zeros of zeta'.
    """

    name = "im_G"

    def __init__(self, params: Optional[EvalParams] = None):
        self.params = params

    def local(self, s: complex) -> FieldLocal:
        loc = g_local(s, self.params, need_curvature=True)
        a = math.remainder(loc.arg - math.pi / 2.0, TWO_PI)
        return FieldLocal(a, loc.logderiv, loc.logderiv_prime)

    def refine_zero(self, s0: complex) -> tuple[complex, float]:
        s = s0
        for _ in range(40):
            zp = zeta_pack(s, self.params)
            step = zp.values[1] / zp.values[2]
            s = s - step
            if abs(step) < 1e-13:
                break
        resid = abs(zeta_pack(s, self.params).values[1])
        return s, resid


class LogTestField:
    """f = log z; Re f = 0 is the unit circle (tracer self-test)."""

    name = "re_log"

    def local(self, s: complex) -> FieldLocal:
        w = cmath.log(s)
        l1 = 1.0 / (s * w)
        l2 = -(1.0 / (s * s * w)) * (1.0 + 1.0 / w)
        return FieldLocal(cmath.phase(w), l1, l2)

    def zero_exit_direction(self, s0: complex, color_sign: int) -> complex:
        # log z ~ (z - 1) near z = 1
        return cmath.exp(1j * (color_sign * math.pi / 2.0))

    def refine_zero(self, s0: complex) -> tuple[complex, float]:
        return 1.0 + 0.0j, 0.0


# ---------------------------------------------------------------------------
# trace bookkeeping
# ---------------------------------------------------------------------------

class TermKind(enum.Enum):
    CROSSED_CRITICAL_LINE = "crossed_critical_line"
    CROSSED_UNIT_CIRCLE = "crossed_unit_circle"
    LEFT_DOMAIN = "left_domain"
    REACHED_POLE_REGION = "reached_pole_region"
    REACHED_FIELD_ZERO = "reached_field_zero"
    ARC_CAP_EXCEEDED = "arc_cap_exceeded"
    HIT_SINGULAR_POINT = "hit_singular_point"


@dataclass(frozen=True)
class Termination:
    kind: TermKind
    where: complex
    ordinate: Optional[float] = None  # crossing ordinate gamma or angle theta
    side: Optional[str] = None
    zero: Optional[complex] = None


@dataclass
class ContourTrace:
    points: list[complex]
    termination: Termination
    color: Optional[int] = None  # +1 green (Im f > 0), -1 purple
    origin: Optional[complex] = None
    phase_log: float = 0.0
    arc_length: float = 0.0
    cut_flips: int = 0
    # closest distance-to-zero estimate seen mid-trace (1/|f'/f|); a small
    # value flags a pass near another zero of the field
    near_approach: float = math.inf

    @property
    def crossed(self) -> bool:
        return self.termination.kind in (TermKind.CROSSED_CRITICAL_LINE,
                                         TermKind.CROSSED_UNIT_CIRCLE)


@dataclass(frozen=True)
class TracePolicy:
    h_min: float = 1e-4
    h_max: float = 0.2
    h_first: float = 1e-3
    turn_target: float = 0.3
    corrector_tol: float = 1e-9
    singular_tol: float = 1e-6
    zero_trigger_dist: float = 0.02
    max_corrector_iters: int = 8


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StripDomain:
    """Vertical-strip geometry with an optional crossing line at sigma = 1/2."""

    box: SearchBox
    crossing_sigma: Optional[float] = 0.5
    pole: complex = 1.0 + 0.0j
    pole_radius: float = 0.1

    def arc_cap(self) -> float:
        return 10.0 * self.box.perimeter

    def event(self, f, s_prev: complex, s_new: complex,
              policy: Optional["TracePolicy"] = None) -> Optional[Termination]:
        if abs(s_new - self.pole) < self.pole_radius:
            return Termination(TermKind.REACHED_POLE_REGION, s_new)
        if (self.crossing_sigma is not None
                and s_new.real <= self.crossing_sigma < s_prev.real):
            t_star = _refine_line_crossing(f, self.crossing_sigma, s_prev,
                                           s_new, policy)
            return Termination(TermKind.CROSSED_CRITICAL_LINE,
                               complex(self.crossing_sigma, t_star),
                               ordinate=t_star)
        b = self.box
        if not b.contains(s_new):
            side = ("left" if s_new.real < b.sigma_min else
                    "right" if s_new.real > b.sigma_max else
                    "bottom" if s_new.imag < b.t_min else "top")
            return Termination(TermKind.LEFT_DOMAIN, s_new, side=side)
        return None


@dataclass(frozen=True)
class DiskDomain:
    """Unit-disk geometry: crossing at |z| = 1, pole capture at the origin."""

    pole_radius: float = 0.05
    arc_cap_length: float = 40.0

    def arc_cap(self) -> float:
        return self.arc_cap_length

    def event(self, f, s_prev: complex, s_new: complex,
              policy: Optional["TracePolicy"] = None) -> Optional[Termination]:
        if abs(s_new) < self.pole_radius:
            return Termination(TermKind.REACHED_POLE_REGION, s_new)
        if abs(s_new) >= 1.0 > abs(s_prev):
            theta = _refine_circle_crossing(f, s_prev, s_new, policy)
            return Termination(TermKind.CROSSED_UNIT_CIRCLE,
                               cmath.exp(1j * theta), ordinate=theta)
        return None


def _cos_signal(f, s: complex) -> float:
    return math.cos(f.local(s).arg)


def _shrink_chord(f, a: complex, b: complex, beyond, policy,
                  target: float) -> tuple[complex, complex]:
    """Bisect the on-curve chord a (inside) -> b (beyond the boundary) by
    correcting midpoints back onto the curve, until |b - a| <= target.

    A tight chord pins the crossing ordinate well enough that the 1-D root
    bracket cannot swallow a neighboring boundary zero (close pairs of
    zeros are exactly where a wide bracket misassigns crossings).
    """
    pol = policy or TracePolicy()
    while abs(b - a) > target:
        cand = _correct(f, 0.5 * (a + b), pol, max_shift=0.7 * abs(b - a))
        if cand is None:
            break
        s_m, _ = cand
        if beyond(s_m):
            b = s_m
        else:
            a = s_m
    return a, b


def _refine_line_crossing(f, sigma: float, s_prev: complex, s_new: complex,
                          policy=None) -> float:
    s_prev, s_new = _shrink_chord(
        f, s_prev, s_new, lambda s: s.real <= sigma, policy, target=1e-3)
    frac = (s_prev.real - sigma) / (s_prev.real - s_new.real)
    t0 = s_prev.imag + frac * (s_new.imag - s_prev.imag)
    delta = max(3.0 * abs(s_new - s_prev), 1e-5)

    def g(t: float) -> float:
        return _cos_signal(f, complex(sigma, t))

    for _ in range(12):
        a, b = t0 - delta, t0 + delta
        if g(a) * g(b) < 0.0:
            return brentq(g, a, b, xtol=1e-12, rtol=8.9e-16)
        delta *= 2.0
    raise UnresolvedTraceError(f"could not bracket line crossing near t={t0:g}")


def _refine_circle_crossing(f, s_prev: complex, s_new: complex,
                            policy=None) -> float:
    s_prev, s_new = _shrink_chord(
        f, s_prev, s_new, lambda z: abs(z) >= 1.0, policy, target=1e-4)
    seg = s_new - s_prev

    def radial(tau: float) -> float:
        return abs(s_prev + tau * seg) - 1.0

    ra, rb = radial(0.0), radial(1.0)
    if ra == 0.0:
        theta0 = cmath.phase(s_prev)
    elif rb == 0.0:
        theta0 = cmath.phase(s_new)
    else:
        tau_star = brentq(radial, 0.0, 1.0, xtol=1e-14)
        theta0 = cmath.phase(s_prev + tau_star * seg)
    signal = getattr(f, "boundary_signal", None)
    if signal is None:
        def signal(th: float) -> float:
            return _cos_signal(f, cmath.exp(1j * th))
    delta = max(3.0 * abs(seg), 1e-7)
    for _ in range(16):
        a, b = theta0 - delta, theta0 + delta
        if signal(a) * signal(b) < 0.0:
            return brentq(signal, a, b, xtol=3e-15, rtol=8.9e-16) % TWO_PI
        delta *= 2.0
    raise UnresolvedTraceError(
        f"could not bracket circle crossing near theta={theta0:g}")


# ---------------------------------------------------------------------------
# the tracer
# ---------------------------------------------------------------------------

def ray_crossings(a: complex, b: complex, cut_angle: float) -> int:
    """1 if the short segment a -> b crosses the ray arg z = cut_angle."""
    pa = (cmath.phase(a) - cut_angle) % TWO_PI
    pb = (cmath.phase(b) - cut_angle) % TWO_PI
    return 1 if abs(pb - pa) > math.pi else 0


def _unit_gradient(loc: FieldLocal) -> complex:
    g = cmath.exp(-1j * loc.arg) * loc.logderiv.conjugate()
    return g / abs(g)


def _curvature(loc: FieldLocal) -> Optional[float]:
    if loc.logderiv_prime is None:
        return None
    l1 = loc.logderiv
    val = cmath.exp(-1j * loc.arg) * (loc.logderiv_prime + l1 * l1) / (l1 * l1)
    return abs(loc.logderiv) * val.real


def _curvature_bound(loc: FieldLocal) -> Optional[float]:
    """|L2 + L1^2| / |L1| >= |kappa|; unlike the signed curvature it cannot
    cancel to zero near a singular point of the curve, so steps shrink in
    congested regions where nearly parallel strands invite branch jumps."""
    if loc.logderiv_prime is None:
        return None
    l1 = loc.logderiv
    return abs(loc.logderiv_prime + l1 * l1) / abs(l1)


def _correct(f, s: complex, policy: TracePolicy,
             max_shift: float) -> Optional[tuple[complex, FieldLocal]]:
    shift = 0.0
    loc = f.local(s)
    for _ in range(policy.max_corrector_iters):
        c = math.cos(loc.arg)
        if abs(c) < policy.corrector_tol:
            return s, loc
        # Newton along the unit gradient exp(-iA) conj(L1)/|L1|
        l1c = loc.logderiv.conjugate()
        step = (-c / abs(l1c) ** 2) * cmath.exp(-1j * loc.arg) * l1c
        shift += abs(step)
        if shift > max_shift:
            return None
        s = s + step
        loc = f.local(s)
    c = math.cos(loc.arg)
    if abs(c) < policy.corrector_tol:
        return s, loc
    return None


def trace_curve(f, start: complex, direction: complex, domain,
                policy: TracePolicy = TracePolicy(),
                color: Optional[int] = None,
                cut_crossings: Optional[Callable[[complex, complex], int]] = None,
                start_is_zero: bool = True) -> ContourTrace:
    """Follow the level curve Re f = 0 from `start` along `direction`.

    `start` may be an exact zero of f (the usual case; the field is
    undefined there and the first on-curve point is a small step away), or
    an ordinary on-curve point.  `cut_crossings`, when given, counts signed
    crossings of a branch-cut ray per accepted step so odd-dimension disk
    fields can keep color bookkeeping continuous.
    """
    direction = direction / abs(direction)
    points = [start]
    arc = 0.0
    phase_log = 0.0
    flips = 0
    cap = domain.arc_cap()

    h0 = policy.h_first
    first = None
    while first is None and h0 >= 1e-7:
        first = _correct(f, start + h0 * direction, policy, max_shift=0.6 * h0)
        if first is None:
            h0 *= 0.5
    if first is None:
        raise UnresolvedTraceError(f"no on-curve point found leaving {start}")
    s, loc = first
    points.append(s)
    arc += abs(s - start)
    prev_arg = loc.arg
    d_prev = direction

    h = h0

    def color_sign(a: float) -> int:
        return 1 if math.sin(a) > 0 else -1

    if color is not None:
        eff = color_sign(loc.arg) * (1 if flips % 2 == 0 else -1)
        if eff != color:
            raise UnresolvedTraceError(
                f"trace left {start} with the wrong color")
    sign_prev = color_sign(loc.arg) * (1 if flips % 2 == 0 else -1)

    near_min = math.inf

    while True:
        # termination checks at the accepted point
        if abs(loc.logderiv) < policy.singular_tol:
            return ContourTrace(points, Termination(
                TermKind.HIT_SINGULAR_POINT, s), color, start, phase_log, arc,
                flips, near_min)
        dist_est = 1.0 / abs(loc.logderiv)
        leaving_start = abs(s - start) < 4.0 * policy.zero_trigger_dist
        if not leaving_start:
            near_min = min(near_min, dist_est)
        if dist_est < policy.zero_trigger_dist and not leaving_start:
            z_est = s - 1.0 / loc.logderiv
            if abs(z_est - start) > 8.0 * policy.zero_trigger_dist:
                z_ref, resid = f.refine_zero(z_est)
                # a true approach has L1 ~ 1/(s - z0): the pole estimate and
                # the refined zero must agree, else we are merely passing a
                # different strand contaminated by a nearby singular point
                consistent = (resid < 1e-8
                              and abs(z_ref - z_est) < 0.35 * dist_est
                              and abs(z_ref - s) < 2.5 * dist_est)
                if consistent:
                    points.append(z_ref)
                    return ContourTrace(points, Termination(
                        TermKind.REACHED_FIELD_ZERO, z_ref, zero=z_ref),
                        color, start, phase_log, arc + abs(z_ref - s), flips,
                        near_min)
        if arc > cap:
            return ContourTrace(points, Termination(
                TermKind.ARC_CAP_EXCEEDED, s), color, start, phase_log, arc,
                flips, near_min)

        # tangent, oriented by continuity
        tau = 1j * _unit_gradient(loc)
        if (tau / d_prev).real < 0.0:
            tau = -tau

        kappa = _curvature(loc)
        if kappa is not None:
            h_goal = policy.turn_target / max(abs(kappa), 1e-12)
            # the modulus bound cannot cancel near singular points of the
            # curve; capping h by it prevents jumps between close strands
            h_goal = min(h_goal, 0.5 / max(_curvature_bound(loc), 1e-12))
            h = min(max(min(h_goal, 2.0 * h), policy.h_min), policy.h_max)
        if abs(s) < 1.0 and isinstance(domain, DiskDomain):
            h = min(h, max(0.4 * abs(s), policy.h_min))
        # universal proximity cap: 1/|L1| is the distance scale to the
        # nearest zero/pole of the field, where strands of the level set
        # crowd together; stepping a fixed fraction of it both prevents
        # strand jumps and brakes into terminations smoothly
        if not leaving_start:
            h = min(h, max(0.4 * dist_est, policy.h_min))

        accepted = None
        while accepted is None:
            cand = _correct(f, s + h * tau, policy, max_shift=0.6 * h)
            if cand is not None:
                s_new, loc_new = cand
                tau_new = 1j * _unit_gradient(loc_new)
                if (tau_new / tau).real < 0.0:
                    tau_new = -tau_new
                turn = abs(cmath.phase(tau_new / tau))
                if turn <= 4.0 * policy.turn_target and abs(s_new - s) > 0.1 * h:
                    accepted = (s_new, loc_new, tau_new, turn)
            if accepted is None:
                if h <= policy.h_min:
                    raise UnresolvedTraceError(
                        f"corrector stalled near {s} (field {f.name})")
                h = max(policy.h_min, 0.35 * h)
        s_new, loc_new, tau_new, turn = accepted
        if kappa is None:
            h = min(max(h * min(2.0, policy.turn_target / max(turn, 1e-9)),
                        policy.h_min), policy.h_max)

        if cut_crossings is not None:
            flips += cut_crossings(s, s_new)

        ev = domain.event(f, s, s_new, policy)
        if ev is not None:
            final = ev.where
            points.append(final)
            return ContourTrace(points, ev, color, start, phase_log,
                                arc + abs(final - s), flips, near_min)

        # the sign of Im f is constant along an arc between zeros of f, so a
        # flip means the step passed through a zero: refine and terminate
        # (a closed loop re-entering its own start zero terminates there)
        sign_new = color_sign(loc_new.arg) * (1 if flips % 2 == 0 else -1)
        if sign_new != sign_prev:
            z_ref, resid = f.refine_zero(0.5 * (s + s_new))
            near = max(2.0 * abs(s_new - s), 8.0 * policy.zero_trigger_dist)
            if resid < 1e-8 and abs(z_ref - 0.5 * (s + s_new)) <= near:
                points.append(z_ref)
                return ContourTrace(points, Termination(
                    TermKind.REACHED_FIELD_ZERO, z_ref, zero=z_ref),
                    color, start, phase_log, arc + abs(z_ref - s), flips,
                    near_min)
            raise UnresolvedTraceError(
                f"sign of Im f flipped with no zero of the field between "
                f"{s} and {s_new} (field {f.name})")

        points.append(s_new)
        arc += abs(s_new - s)
        phase_log += math.remainder(loc_new.arg - prev_arg, TWO_PI)
        prev_arg = loc_new.arg
        s, loc, d_prev = s_new, loc_new, tau_new
        sign_prev = sign_new


_FIELDS = {"re_eta": EtaField, "im_zpp_over_zp": SpiraField, "im_G": GField}


def trace_level_curve(start: complex, tangent_sign: int, field: str,
                      domain: SearchBox,
                      params: Optional[EvalParams] = None,
                      policy: TracePolicy = TracePolicy()) -> ContourTrace:
    """Spec-level entry point: trace one ray of a named zeta-side field."""
    if field not in _FIELDS:
        raise ValueError(f"unknown field {field!r}")
    fobj = _FIELDS[field](params)
    dom = StripDomain(box=domain,
                      crossing_sigma=0.5 if field != "im_zpp_over_zp" else None)
    if field == "re_eta":
        direction = fobj.zero_exit_direction(start, tangent_sign)
        return trace_curve(fobj, start, direction, dom, policy,
                           color=tangent_sign)
    if field == "im_zpp_over_zp":
        # the curve exits the pole at a zeta' zero horizontally; sign picks side
        return trace_curve(fobj, start, complex(float(tangent_sign), 0.0),
                           dom, policy)
    # im_G: start on-curve, trace toward decreasing sigma for sign -1
    loc = fobj.local(start)
    tau = 1j * _unit_gradient(loc)
    if math.copysign(1.0, tau.real) != math.copysign(1.0, float(tangent_sign)):
        tau = -tau
    return trace_curve(fobj, start, tau, dom, policy, start_is_zero=False)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeClassification:
    zero_index: int
    location: complex
    type_class: TypeClass
    crossings: tuple[float, ...]


def _match_ordinate(gamma: float, catalog_gammas: list[float],
                    tol: float = 1e-6) -> int:
    """Index of the catalog zero at ordinate gamma, within tol (hard error)."""
    import bisect

    i = bisect.bisect_left(catalog_gammas, gamma)
    best, best_d = None, math.inf
    for j in (i - 1, i, i + 1):
        if 0 <= j < len(catalog_gammas):
            d = abs(catalog_gammas[j] - gamma)
            if d < best_d:
                best, best_d = j, d
    if best is None or best_d > tol:
        raise BijectivityError(
            f"crossing at t={gamma!r} matches no catalog zero (nearest "
            f"{best_d:g} away)")
    return best


def classify_zero(rho: ZeroRecord, critical_gammas: list[float],
                  t_margin: float = 12.0,
                  params: Optional[EvalParams] = None,
                  policy: TracePolicy = TracePolicy(),
                  max_widenings: int = 2) -> tuple[TypeClassification,
                                                   list[ContourTrace]]:
    """Type of a zeta' zero: how many of its two eta rays cross the line.

    Retraces with a widened height margin when a ray leaves through a
    horizontal edge left of sigma = 4 (where a return across the line could
    not be excluded) or overruns the arc cap; raises UnresolvedTraceError if
    widening does not settle it.
    """
    if rho.kind is not ZeroKind.DERIV1:
        raise ValueError("classification applies to zeta' zeros")
    f = EtaField(params)
    margin = t_margin
    for _ in range(max_widenings + 1):
        box = SearchBox(-8.0, 12.0, rho.gamma - margin, rho.gamma + margin)
        dom = StripDomain(box=box)
        traces = []
        suspicious = False
        for sign in (1, -1):
            direction = f.zero_exit_direction(rho.location, sign)
            tr = trace_curve(f, rho.location, direction, dom, policy,
                             color=sign)
            traces.append(tr)
            k = tr.termination.kind
            if k is TermKind.ARC_CAP_EXCEEDED:
                suspicious = True
            if (k is TermKind.LEFT_DOMAIN
                    and tr.termination.side in ("top", "bottom")
                    and tr.termination.where.real < 4.0):
                suspicious = True
        if not suspicious:
            break
        margin *= 1.8
    else:
        pass
    kinds = [tr.termination.kind for tr in traces]
    if any(k is TermKind.HIT_SINGULAR_POINT for k in kinds):
        raise UnresolvedTraceError(
            f"singular point on a level curve of rho'={rho.location}")
    if suspicious:
        raise UnresolvedTraceError(
            f"classification of rho'={rho.location} unresolved after widening")
    crossings = sorted(tr.termination.ordinate for tr in traces if tr.crossed)
    for g in crossings:
        _match_ordinate(g, critical_gammas)
    cls = TypeClassification(rho.index, rho.location,
                             TypeClass(len(crossings)), tuple(crossings))
    rho.type_class = cls.type_class
    if cls.type_class is TypeClass.T2:
        # the pair usually straddles gamma' but provably need not at low
        # heights (the first rho' pairs with gamma_1, gamma_2, both below it)
        rho.paired_crossings = (crossings[0], crossings[1])
    return cls, traces


# ---------------------------------------------------------------------------
# window classification
# ---------------------------------------------------------------------------

@dataclass
class WindowClassification:
    t0: float
    t1: float
    critical: list[ZeroRecord]
    deriv1: list[ZeroRecord]          # gamma' in (t0, t1), classified
    deriv1_margin: list[ZeroRecord]   # classified neighbors outside the window
    classifications: dict[int, TypeClassification]
    n_critical: int
    counts: dict[TypeClass, int]
    n1_crossings: int                 # type-1 crossings inside the window
    n2_pairs: int                     # type-2 pairs with both crossings inside
    straddlers: list[tuple[complex, float]]
    unresolved: list[complex]

    @property
    def identity_lhs(self) -> int:
        return self.n1_crossings + 2 * self.n2_pairs + len(self.straddlers)

    @property
    def type_fractions(self) -> dict[TypeClass, float]:
        total = max(1, len(self.deriv1))
        return {t: self.counts[t] / total for t in TypeClass}


def classify_window(t0: float, t1: float,
                    critical: list[ZeroRecord],
                    deriv1_widened: list[ZeroRecord],
                    params: Optional[EvalParams] = None,
                    policy: TracePolicy = TracePolicy(),
                    strict: bool = True) -> WindowClassification:
    """Classify every zeta' zero of a widened window and audit the identities.

    `critical` must cover the widened window plus trace margins; every
    critical zero with ordinate in (t0, t1) must be reached by exactly one
    trace (bijectivity).  Type counts are over gamma' in (t0, t1); the pair
    count uses pairs with both crossings inside, with boundary straddlers
    listed separately so the counting identity is integer-exact.
    """
    gammas = [z.gamma for z in critical]
    if any(b.gamma < a.gamma for a, b in zip(critical, critical[1:])):
        raise CatalogError("critical catalog must be sorted")

    hits: dict[int, list[complex]] = {}
    classifications: dict[int, TypeClassification] = {}
    unresolved: list[complex] = []
    inside: list[ZeroRecord] = []
    margin: list[ZeroRecord] = []

    for rho in deriv1_widened:
        in_window = t0 < rho.gamma <= t1
        (inside if in_window else margin).append(rho)
        try:
            cls, _ = classify_zero(rho, gammas, params=params, policy=policy)
        except UnresolvedTraceError:
            if strict:
                raise
            unresolved.append(rho.location)
            continue
        classifications[rho.index] = cls
        for g in cls.crossings:
            hits.setdefault(_match_ordinate(g, gammas), []).append(rho.location)

    # bijectivity over the core window
    in_core = [i for i, z in enumerate(critical) if t0 < z.gamma <= t1]
    missed = [critical[i].gamma for i in in_core if i not in hits]
    doubled = [critical[i].gamma for i in in_core if len(hits.get(i, [])) > 1]
    if missed or doubled:
        raise BijectivityError(
            f"critical zeros missed {missed[:5]} / doubly hit {doubled[:5]} "
            f"in ({t0:g},{t1:g})")

    counts = {t: 0 for t in TypeClass}
    n1_cross = 0
    n2_pairs = 0
    straddlers: list[tuple[complex, float]] = []
    for rho in inside:
        cls = classifications.get(rho.index)
        if cls is None:
            continue
        counts[cls.type_class] += 1
    for rho in inside + margin:
        cls = classifications.get(rho.index)
        if cls is None:
            continue
        ins = [g for g in cls.crossings if t0 < g <= t1]
        if cls.type_class is TypeClass.T1 and len(ins) == 1:
            n1_cross += 1
        elif cls.type_class is TypeClass.T2:
            if len(ins) == 2:
                n2_pairs += 1
            elif len(ins) == 1:
                straddlers.append((rho.location, ins[0]))

    wc = WindowClassification(
        t0=t0, t1=t1, critical=critical, deriv1=inside, deriv1_margin=margin,
        classifications=classifications, n_critical=len(in_core),
        counts=counts, n1_crossings=n1_cross, n2_pairs=n2_pairs,
        straddlers=straddlers, unresolved=unresolved)
    if wc.identity_lhs != wc.n_critical:
        raise TheoremViolationError(
            f"N1 + 2 N2 + straddlers = {wc.identity_lhs} != "
            f"{wc.n_critical} critical zeros in ({t0:g},{t1:g})")
    return wc


# ---------------------------------------------------------------------------
# Spira bijection
# ---------------------------------------------------------------------------

def spira_map(rho: ZeroRecord, params: Optional[EvalParams] = None,
              policy: Optional[TracePolicy] = None,
              t_margin: float = 8.0) -> tuple[complex, ContourTrace]:
    """Follow Im(zeta''/zeta') = 0 from the pole at rho' (exiting right)
    to the associated zero rho'' of zeta''."""
    if rho.kind is not ZeroKind.DERIV1 or rho.beta <= 0.5:
        raise ValueError("spira_map needs a zeta' zero right of the line")
    if policy is None:
        # the curve is short and has no second-derivative data; step by turns
        policy = TracePolicy(h_max=0.1, zero_trigger_dist=0.01)
    f = SpiraField(params)
    box = SearchBox(0.5, 12.0, rho.gamma - t_margin, rho.gamma + t_margin)
    dom = StripDomain(box=box, crossing_sigma=None)
    tr = trace_curve(f, rho.location, 1.0 + 0.0j, dom, policy)
    k = tr.termination.kind
    if k is TermKind.LEFT_DOMAIN and tr.termination.side == "left":
        raise TheoremViolationError(
            f"Im(zeta''/zeta') curve from {rho.location} left the half plane")
    if k is not TermKind.REACHED_FIELD_ZERO:
        raise UnresolvedTraceError(
            f"spira trace from {rho.location} ended {k.value}")
    rho2 = tr.termination.zero
    resid = abs(zeta_pack(rho2, params).values[2])
    if resid > 1e-8:
        raise UnresolvedTraceError(
            f"spira terminal point is not a zeta'' zero (|zeta''|={resid:g})")
    rho.spira_partner = rho2
    return rho2, tr


# ---------------------------------------------------------------------------
# Z-curves
# ---------------------------------------------------------------------------

Z_SPACING = math.pi / math.log(1.5)


def z_curve_seeds(t0: float, t1: float, sigma: float = 10.0) -> list[tuple[int, complex]]:
    """Seeds (n odd, sigma + i n pi/log(3/2)) with ordinate inside (t0, t1)."""
    out = []
    n = 1
    while n * Z_SPACING <= t1:
        if n % 2 == 1 and n * Z_SPACING > t0:
            out.append((n, complex(sigma, n * Z_SPACING)))
        n += 1
    return out


def z_curve_trace(n_odd: int, window: SearchBox,
                  seed_sigma: float = 10.0,
                  params: Optional[EvalParams] = None,
                  policy: Optional[TracePolicy] = None) -> tuple[Optional[complex], ContourTrace]:
    """Trace Im G = 0 leftward from the odd-n seed; returns the zeta' zero
    the curve terminates at (None if it leaves the band first)."""
    if n_odd % 2 != 1:
        raise ValueError("Z-curves exist for odd n only")
    if policy is None:
        policy = TracePolicy(h_max=0.2, zero_trigger_dist=0.02)
    t_seed = n_odd * Z_SPACING
    seed = complex(seed_sigma, t_seed)
    f = GField(params)
    loc = f.local(seed)
    if abs(math.cos(loc.arg)) > 0.05:
        raise SeedPointError(
            f"Im G is not small at the n={n_odd} seed; first-term dominance "
            f"does not hold")
    box = SearchBox(window.sigma_min, seed_sigma + 2.0,
                    t_seed - 1.5 * Z_SPACING, t_seed + 1.5 * Z_SPACING)
    dom = StripDomain(box=box, crossing_sigma=None)
    corrected = _correct(f, seed, TracePolicy(), max_shift=0.5)
    if corrected is None:
        raise SeedPointError(f"could not land on Im G = 0 near {seed}")
    s_on, loc_on = corrected
    tau = 1j * _unit_gradient(loc_on)
    if tau.real > 0:
        tau = -tau
    tr = trace_curve(f, s_on, tau, dom, policy, start_is_zero=False)
    if tr.termination.kind is TermKind.REACHED_FIELD_ZERO:
        return tr.termination.zero, tr
    return None, tr
