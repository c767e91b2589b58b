"""Curvature, chord, and angle estimates for level curves; Marden-type sum
identities with a density tail model; F-integrals; rescaled coordinates.

The truncated lambda'-sums over zeta' zeros are completed by a tail model
that integrates the zero-counting density log(u / 4 pi) / 2 pi at the mean
abscissa 1/2 + log log u / log u (both halves of the plane); reports carry
the window half-width and tail estimate so the truncation is auditable.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from scipy.integrate import quad

from .errors import CatalogError, ExtrapolationError, GeometryError, PoleError
from .special_functions import (
    EvalParams,
    F_crit,
    eta_local,
    h_log,
    h_log_deriv,
    zeta_pack,
)
from .zeta_zeros import TypeClass, ZeroKind, ZeroRecord

__all__ = [
    "curvature_field",
    "curvature_at_zero",
    "polyline_curvature",
    "chord_length",
    "theta_limit",
    "Identity",
    "IdentityResidualReport",
    "sum_identity_residual",
    "integral_F_gap",
    "Type2Triple",
    "rescaled_coords",
    "rho2_displacement",
    "subconjecture_sum",
]

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# curvature and chords
# ---------------------------------------------------------------------------

def curvature_field(f_val: complex, f_prime: complex, f_second: complex) -> float:
    """Signed curvature of the level curve Re f = 0 at a point on it:
    kappa = |f'| Re(f''/f'^2)."""
    if f_prime == 0:
        raise PoleError("curvature undefined where f' vanishes")
    del f_val  # the formula needs only the derivatives
    return abs(f_prime) * (f_second / (f_prime * f_prime)).real


def curvature_at_zero(rho: ZeroRecord,
                      params: Optional[EvalParams] = None) -> float:
    """Curvature of Re eta = 0 at a zeta' zero:
    kappa = Re( exp(-i theta) (2 h'/h + zeta'''/zeta'') ),
    theta = arg(h zeta'') there.  Scale-free in h."""
    zp = zeta_pack(rho.location, params)
    if zp.values[2] == 0:
        raise PoleError("second derivative vanishes at rho'")
    theta = h_log(rho.location).imag + cmath.phase(zp.values[2])
    inner = 2.0 * h_log_deriv(rho.location) + zp.values[3] / zp.values[2]
    return (cmath.exp(-1j * theta) * inner).real


def polyline_curvature(p0: complex, p1: complex, p2: complex) -> float:
    """Unsigned curvature of the circle through three nearby points."""
    a, b, c = abs(p1 - p0), abs(p2 - p1), abs(p2 - p0)
    area2 = abs(((p1 - p0).conjugate() * (p2 - p0)).imag)
    if a * b * c == 0:
        raise GeometryError("degenerate triple")
    return 2.0 * area2 / (a * b * c)


def chord_length(beta_prime: float, kappa: float) -> tuple[float, float]:
    """Chord the osculating circle at rho' cuts from the critical line,
    and its simple upper bound 2^{3/2} sqrt((beta'-1/2)/|kappa|)."""
    if beta_prime < 0.5:
        raise GeometryError("rho' must lie right of the critical line")
    x = beta_prime - 0.5
    radicand = x * (2.0 / abs(kappa) + 0.5 - beta_prime)
    if radicand < 0.0:
        raise GeometryError(
            "osculating circle does not reach the critical line")
    bound = 2.0 ** 1.5 * math.sqrt(x / abs(kappa))
    return 2.0 * math.sqrt(radicand), bound


# ---------------------------------------------------------------------------
# the angle theta and its one-sided limit
# ---------------------------------------------------------------------------

def theta_limit(rho: ZeroRecord, params: Optional[EvalParams] = None,
                h: float = 1e-3) -> tuple[float, float]:
    """theta = arg(h zeta''(rho')) and the limit of arg eta(sigma + i gamma')
    as sigma -> beta' from the left (Richardson on four abscissae).

    The limit should equal theta + pi (mod 2 pi).
    """
    zp = zeta_pack(rho.location, params)
    theta = math.remainder(
        h_log(rho.location).imag + cmath.phase(zp.values[2]), TWO_PI)
    xs = [4.0 * h, 3.0 * h, 2.0 * h, h]
    args = []
    for x in xs:
        a = eta_local(complex(rho.beta - x, rho.gamma), params,
                      need_curvature=False).arg
        if args:
            a = args[-1] + math.remainder(a - args[-1], TWO_PI)
        args.append(a)
    target = theta + math.pi
    resid = [abs(math.remainder(a - target, TWO_PI)) for a in args]
    if not all(r2 <= r1 + 1e-12 for r1, r2 in zip(resid, resid[1:])):
        raise ExtrapolationError(
            f"one-sided arg limit at rho'={rho.location} is not settling")
    # Neville extrapolation to x = 0
    ys = list(args)
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            ys[i] = ((xs[i + level] * ys[i] - xs[i] * ys[i + 1])
                     / (xs[i + level] - xs[i]))
    return math.remainder(theta, TWO_PI), math.remainder(ys[0], TWO_PI)


# ---------------------------------------------------------------------------
# lambda'-sums with tail model
# ---------------------------------------------------------------------------

class Identity(enum.Enum):
    FUND = "fund"
    FAN_GE_F = "fan_ge_F"
    PROP13 = "prop13"


@dataclass(frozen=True)
class IdentityResidualReport:
    identity: Identity
    lhs: float
    rhs: float
    residual: float
    window_halfwidth: float
    tail_estimate: float


def _mean_abscissa(u: float) -> float:
    # observed average real part of zeta' zeros near height u
    lu = math.log(max(u, 20.0))
    return 0.5 + math.log(lu) / lu


def _density(u: float) -> float:
    return math.log(max(u, 20.0) / (4.0 * math.pi)) / TWO_PI


def _tail_sum(anchor: complex, t_center: float, halfwidth: float) -> float:
    """Model for sum of Re(1/(anchor - lambda')) over zeros outside the
    window |Im lambda' - t_center| <= halfwidth (both half planes)."""

    def kernel(u: float) -> float:
        lam = complex(_mean_abscissa(abs(u)), u)
        return (1.0 / (anchor - lam)).real * _density(abs(u))

    lo, hi = t_center - halfwidth, t_center + halfwidth
    total = 0.0
    total += quad(kernel, hi, math.inf, limit=200)[0]
    total += quad(kernel, 10.0, lo, limit=200)[0]
    # conjugate zeros (and nothing below |t| ~ 10: the first zero is at 23.3)
    total += quad(kernel, -math.inf, -10.0, limit=200)[0]
    return total


def _window_lambdas(catalog: Sequence[ZeroRecord], t_center: float,
                    halfwidth: float) -> list[complex]:
    lam = [z.location for z in catalog
           if abs(z.gamma - t_center) <= halfwidth and z.kind is ZeroKind.DERIV1]
    lo, hi = t_center - halfwidth, t_center + halfwidth
    if not any(z.gamma <= lo + 2.0 for z in catalog) and lo > 25.0:
        raise CatalogError("catalog does not cover the lower window edge")
    if not any(z.gamma >= hi - 2.0 for z in catalog):
        raise CatalogError("catalog does not cover the upper window edge")
    return lam


def sum_identity_residual(which: Union[Identity, str],
                          anchor: Union[ZeroRecord, float],
                          catalog: Sequence[ZeroRecord],
                          halfwidth: float = 200.0,
                          params: Optional[EvalParams] = None) -> IdentityResidualReport:
    """Residual of one of the displayed sum identities, with the truncated
    lambda'-sum completed by the density tail model.

    fund      needs a zeta' zero with its Spira partner resolved
    fan_ge_F  anchor is an ordinate t (the identity for F(t))
    prop13    needs a zeta' zero (uses zeta'''/zeta'' there)
    """
    which = Identity(which)
    if halfwidth < 50.0:
        raise CatalogError("halfwidth >= 50 required by the tail model")

    if which is Identity.FUND:
        assert isinstance(anchor, ZeroRecord)
        if anchor.spira_partner is None:
            raise CatalogError("fund identity needs the Spira partner")
        rho2 = anchor.spira_partner
        lams = _window_lambdas(catalog, rho2.imag, halfwidth)
        main = sum((1.0 / (rho2 - lam)).real for lam in lams
                   if abs(lam - anchor.location) > 1e-9)
        own = (1.0 / (rho2 - anchor.location)).real
        tail = _tail_sum(rho2, rho2.imag, halfwidth)
        lhs = own + main + tail
        rhs = math.log(rho2.imag / math.pi) / 2.0
    elif which is Identity.FAN_GE_F:
        t = float(anchor if not isinstance(anchor, ZeroRecord)
                  else anchor.gamma)
        s = complex(0.5, t)
        lams = _window_lambdas(catalog, t, halfwidth)
        main = -sum((1.0 / (s - lam)).real for lam in lams)
        tail = -_tail_sum(s, t, halfwidth)
        lhs = F_crit(t, params)
        rhs = main + tail + math.log(2.0) / 2.0
    else:
        assert isinstance(anchor, ZeroRecord)
        zp = zeta_pack(anchor.location, params)
        lhs = (2.0 * h_log_deriv(anchor.location)
               + zp.values[3] / zp.values[2]).real
        s = complex(0.5, anchor.gamma)
        lams = _window_lambdas(catalog, anchor.gamma, halfwidth)
        main = -2.0 * sum((1.0 / (lam - s)).real for lam in lams
                          if abs(lam - anchor.location) > 1e-9)
        tail = -2.0 * _tail_sum_reflected(s, anchor.gamma, halfwidth)
        rhs = -math.log(2.0) + main + tail
    return IdentityResidualReport(
        identity=which, lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
        window_halfwidth=halfwidth,
        tail_estimate=tail)


def _tail_sum_reflected(s: complex, t_center: float, halfwidth: float) -> float:
    """Tail of sum Re(1/(lambda' - s)) (note the reversed difference)."""

    def kernel(u: float) -> float:
        lam = complex(_mean_abscissa(abs(u)), u)
        return (1.0 / (lam - s)).real * _density(abs(u))

    lo, hi = t_center - halfwidth, t_center + halfwidth
    total = quad(kernel, hi, math.inf, limit=200)[0]
    total += quad(kernel, 10.0, lo, limit=200)[0]
    total += quad(kernel, -math.inf, -10.0, limit=200)[0]
    return total


# ---------------------------------------------------------------------------
# F integrals over zero gaps
# ---------------------------------------------------------------------------

def _adaptive_simpson(fn, a: float, b: float, tol: float) -> float:
    fa, fm, fb = fn(a), fn(0.5 * (a + b)), fn(b)

    def rec(x0, x2, f0, f1, f2, whole, depth):
        x1 = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + x1), 0.5 * (x1 + x2)
        flm, frm = fn(lm), fn(rm)
        left = (x1 - x0) / 6.0 * (f0 + 4.0 * flm + f1)
        right = (x2 - x1) / 6.0 * (f1 + 4.0 * frm + f2)
        if depth <= 0:
            raise ExtrapolationError("quadrature failed to converge")
        if abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (rec(x0, x1, f0, flm, f1, left, depth - 1)
                + rec(x1, x2, f1, frm, f2, right, depth - 1))

    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return rec(a, b, fa, fm, fb, whole, 36)


def integral_F_gap(critical: Sequence[ZeroRecord], n: int,
                   params: Optional[EvalParams] = None,
                   tol: float = 1e-8) -> float:
    """Integral of F over the gap (gamma_n, gamma_{n+1}); equals pi exactly.

    `n` is 1-based within the catalog ordering.
    """
    if not 1 <= n <= len(critical) - 1:
        raise CatalogError("gap index out of range")
    ga, gb = critical[n - 1].gamma, critical[n].gamma
    return _adaptive_simpson(lambda t: F_crit(t, params), ga, gb, tol)


# ---------------------------------------------------------------------------
# rescaled type-2 coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Type2Triple:
    """A type-2 zero with its crossing pair, in raw and rescaled coordinates."""

    gamma_minus: float
    gamma_plus: float
    rho_prime: complex
    t0: float
    delta_raw: float   # gamma+ - gamma-
    y_raw: float       # gamma' - t0
    lam: float         # log(t0 / 2 pi)
    x: float           # (beta' - 1/2) lam
    y: float           # y_raw * lam
    delta: float       # delta_raw * lam / 2 pi

    @classmethod
    def from_record(cls, rho: ZeroRecord) -> "Type2Triple":
        if rho.type_class is not TypeClass.T2 or rho.paired_crossings is None:
            raise CatalogError("triple needs a classified type-2 zero")
        gm, gp = rho.paired_crossings
        t0 = 0.5 * (gm + gp)
        lam = math.log(t0 / TWO_PI)
        return cls(gamma_minus=gm, gamma_plus=gp, rho_prime=rho.location,
                   t0=t0, delta_raw=gp - gm, y_raw=rho.gamma - t0, lam=lam,
                   x=(rho.beta - 0.5) * lam, y=(rho.gamma - t0) * lam,
                   delta=(gp - gm) * lam / TWO_PI)


def rescaled_coords(triple: Type2Triple) -> tuple[float, float, float, float]:
    """(x, y, delta) plus the small-delta series prediction of x.

    The prediction neglects the sum over zeros other than the pair, so it is
    a leading-order statement only.
    """
    x_pred = (math.pi ** 2 / 4.0) * (1.0 - math.log(math.pi) / triple.lam) \
        * triple.delta ** 2
    return triple.x, triple.y, triple.delta, x_pred


def rho2_displacement(rho: ZeroRecord,
                      rho_second: Optional[complex] = None) -> complex:
    """w = log(gamma') * (rho'' - rho' - 1/log(gamma')); |w| ~ 1 when the
    partner sits on the heuristic circle."""
    p = rho_second if rho_second is not None else rho.spira_partner
    if p is None:
        raise CatalogError("displacement needs the Spira partner")
    lg = math.log(rho.gamma)
    return lg * (p - rho.location - 1.0 / lg)


def subconjecture_sum(rho: ZeroRecord, catalog: Sequence[ZeroRecord],
                      halfwidth: float = 200.0) -> tuple[float, float]:
    """Diagnostic sum of Re(1/(lambda' - (1/2 + i gamma'))) over lambda' != rho'
    (window + tail) and its ratio to log gamma'.  Every term is nonnegative
    because all lambda' lie right of the line."""
    if halfwidth < 50.0:
        raise CatalogError("halfwidth >= 50 required by the tail model")
    s = complex(0.5, rho.gamma)
    lams = _window_lambdas(catalog, rho.gamma, halfwidth)
    terms = [(1.0 / (lam - s)).real for lam in lams
             if abs(lam - rho.location) > 1e-9]
    if terms and min(terms) < 0.0:
        raise CatalogError("a lambda' left of the critical line slipped in")
    total = sum(terms) + _tail_sum_reflected(s, rho.gamma, halfwidth)
    return total, total / math.log(rho.gamma)
