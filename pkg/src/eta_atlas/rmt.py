"""Unit-disk analog: characteristic polynomials of Haar-random unitaries.

For an n x n unitary A with characteristic polynomial p_A(z) = det(A - zI),
the completed derivative function is

    eta_A(z) = z h_A(z) p_A'(z),    h_A(z) = (-z)^(-n/2) det(A)^(-1/2),

whose level curves Re eta_A = 0 classify the zeros of p_A' by how many of
the two rays leaving each zero cross the unit circle (the circle plays the
role the critical line plays for zeta).  The counting identities

    N2 - N0' = 1,   N1 + 2 N0' = n - 2,   N1 + 2 N2 = n,   N0'+N1+N2 = n-1

are exact for every sample and are asserted, not merely measured.

Sampling is reproducible: one counter-based generator (numpy Philox keyed by
the ensemble seed) advanced to a fixed offset per sample index, so ensembles
are identical across platforms and process layouts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import TheoremViolationError, UnresolvedTraceError
from .level_curves import (
    DiskDomain,
    FieldLocal,
    TermKind,
    TracePolicy,
    ray_crossings,
    trace_curve,
)
from .zeta_zeros import TypeClass

__all__ = [
    "UnitarySample",
    "RMTClassification",
    "SectorCheck",
    "BatchStats",
    "sample_cue",
    "sample_from_matrix",
    "eta_A",
    "z_lambda_prime",
    "F_theta",
    "classify_sample",
    "sector_check",
    "batch_stats",
    "faddeev_leverrier",
]

TWO_PI = 2.0 * math.pi
_SAMPLE_STRIDE = 1 << 22  # Philox counter blocks reserved per sample index
_DRAW_STRIDE = 1 << 18    # blocks per redraw attempt within a sample slot


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def faddeev_leverrier(a: np.ndarray) -> np.ndarray:
    """Coefficients of det(zI - A), monic, descending powers."""
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = a.copy()
    eye = np.eye(n)
    for k in range(1, n + 1):
        coeffs[k] = -np.trace(m) / k
        if k < n:
            m = a @ (m + coeffs[k] * eye)
    return coeffs


def _aberth(coeffs: np.ndarray, init: np.ndarray,
            tol: float = 1e-12, max_iter: int = 200) -> Optional[np.ndarray]:
    """Simultaneous root iteration for a monic polynomial (descending
    coefficients); returns None if it fails to converge."""
    z = init.astype(complex).copy()
    dcoeffs = coeffs[:-1] * np.arange(len(coeffs) - 1, 0, -1)
    for _ in range(max_iter):
        p = np.polyval(coeffs, z)
        dp = np.polyval(dcoeffs, z)
        with np.errstate(all="ignore"):
            w = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            ssum = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - w * ssum
            corr = w / denom
            # transient blow-ups: fall back to the plain Newton step
            bad = ~np.isfinite(corr) | (np.abs(denom) < 1e-12)
            corr = np.where(bad, w, corr)
        if not np.all(np.isfinite(corr)):
            return None
        z = z - corr
        if np.max(np.abs(corr)) < tol:
            return z
    return None


@dataclass
class UnitarySample:
    n: int
    det_phase: complex
    eigenangles: np.ndarray          # sorted, in [0, 2 pi)
    char_coeffs: np.ndarray          # det(zI - A), monic descending
    deriv_roots: np.ndarray          # zeros of p_A'
    seed: int
    index: int = 0
    resample_attempts: int = 0
    cut_angle: float = 0.0           # branch-cut ray for odd n (largest gap)

    # derivative coefficient ladders as plain lists (fast scalar Horner)
    b1: list = field(default_factory=list, repr=False)
    b2: list = field(default_factory=list, repr=False)
    b3: list = field(default_factory=list, repr=False)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.eigenangles)

    def gaps(self) -> np.ndarray:
        """Consecutive eigenangle gaps (cyclic, sum 2 pi)."""
        th = self.eigenangles
        return np.diff(np.concatenate([th, [th[0] + TWO_PI]]))


def _poly_derivative(coeffs: np.ndarray) -> np.ndarray:
    return coeffs[:-1] * np.arange(len(coeffs) - 1, 0, -1)


def _finish_sample(a: np.ndarray, rng: np.random.Generator, seed: int,
                   index: int, attempt: int) -> Optional[UnitarySample]:
    n = a.shape[0]
    coeffs = faddeev_leverrier(a)
    jitter = rng.uniform(-0.03, 0.03, n)
    init = 0.995 * np.exp(1j * (TWO_PI * (np.arange(n) + 0.27) / n + jitter))
    mu = _aberth(coeffs, init)
    if mu is None:
        return None
    if np.max(np.abs(np.abs(mu) - 1.0)) > 1e-8:
        raise TheoremViolationError(
            "eigenvalue off the unit circle by more than 1e-8: "
            "numerical breakdown, not randomness")
    angles = np.sort(np.angle(mu) % TWO_PI)
    gaps = np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))
    if np.min(gaps) < 1e-8:
        return None  # near-degenerate pair: resample per the model's setup
    d1 = _poly_derivative(coeffs)
    jitter2 = rng.uniform(-0.03, 0.03, n - 1)
    initd = 0.9 * np.exp(1j * (TWO_PI * (np.arange(n - 1) + 0.61) / (n - 1)
                               + jitter2))
    mup = _aberth(d1 / d1[0], initd)
    if mup is None:
        return None
    if np.max(np.abs(mup)) > 1.0 + 1e-10:
        raise TheoremViolationError(
            "derivative root outside the closed unit disk "
            "(Gauss-Lucas violated numerically)")
    det_phase = (-1.0) ** n * coeffs[n]
    prod = complex(np.prod(np.exp(1j * angles)))
    if abs(prod - det_phase) > 1e-9:
        raise TheoremViolationError("eigenvalue product drifted from det(A)")
    k_max = int(np.argmax(gaps))
    cut = (angles[k_max] + 0.5 * gaps[k_max]) % TWO_PI
    d2 = _poly_derivative(d1)
    d3 = _poly_derivative(d2)
    return UnitarySample(
        n=n, det_phase=det_phase, eigenangles=angles, char_coeffs=coeffs,
        deriv_roots=np.sort_complex(mup), seed=seed, index=index,
        resample_attempts=attempt, cut_angle=cut,
        b1=list(d1), b2=list(d2), b3=list(d3))


def sample_cue(n: int, seed: int, index: int = 0,
               redraw: int = 0) -> UnitarySample:
    """Haar-distributed unitary sample, deterministic in (n, seed, index).

    Complex Ginibre -> QR with R-diagonal phase normalization; characteristic
    polynomial by Faddeev-LeVerrier; all roots by simultaneous (Aberth)
    iteration.  Root-solver hiccups and near-degenerate spectra trigger a
    deterministic redraw at a reserved counter offset; `redraw` selects a
    reserved block of offsets so callers can also replace a sample.
    """
    if n <= 2:
        raise ValueError("need n > 2")
    for attempt in range(4):
        bitgen = np.random.Philox(key=seed)
        bitgen.advance(index * _SAMPLE_STRIDE
                       + (redraw * 4 + attempt) * _DRAW_STRIDE)
        rng = np.random.Generator(bitgen)
        z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        q, r = np.linalg.qr(z / math.sqrt(2.0))
        d = np.diagonal(r)
        q = q * (d / np.abs(d))
        sample = _finish_sample(q, rng, seed, index, redraw * 4 + attempt)
        if sample is not None:
            return sample
    raise UnresolvedTraceError(
        f"root finding failed for four redraws at (n={n}, seed={seed}, "
        f"index={index})")


def sample_from_matrix(a: np.ndarray, seed: int = -1) -> UnitarySample:
    """Build a sample from an explicit unitary matrix (test entry point)."""
    n = a.shape[0]
    if n <= 2:
        raise ValueError("need n > 2")
    rng = np.random.Generator(np.random.Philox(key=0))
    sample = _finish_sample(a, rng, seed, 0, 0)
    if sample is None:
        raise UnresolvedTraceError("root finding failed for supplied matrix")
    return sample


# ---------------------------------------------------------------------------
# eta_A and the disk field
# ---------------------------------------------------------------------------

def _horner(coeffs: list, z: complex) -> complex:
    acc = 0.0 + 0.0j
    for c in coeffs:
        acc = acc * z + c
    return acc


def _arg_minus_z(sample: UnitarySample, z: complex) -> float:
    """arg(-z) in the window [cut - pi, cut + pi) placing the branch cut of
    (-z)^(-n/2) along the ray arg z = cut_angle."""
    lo = sample.cut_angle - math.pi
    return lo + (cmath.phase(-z) - lo) % TWO_PI


def _det_half_arg(sample: UnitarySample) -> float:
    return 0.5 * cmath.phase(sample.det_phase)


def eta_A(z: complex, sample: UnitarySample) -> complex:
    """eta_A(z) = z h_A(z) p_A'(z) on the fixed branch (cut along the
    largest-gap ray for odd n; no cut at all for even n)."""
    if z == 0:
        raise ZeroDivisionError("eta_A has a pole/branch point at 0")
    n = sample.n
    pprime = (-1.0) ** n * _horner(sample.b1, z)
    log_mod = -0.5 * n * math.log(abs(z))
    phase = -0.5 * n * _arg_minus_z(sample, z) - _det_half_arg(sample)
    return z * math.exp(log_mod) * cmath.exp(1j * phase) * pprime


def z_lambda_prime(z: complex, sample: UnitarySample) -> complex:
    """z Lambda_A'(z) with Lambda_A = h_A p_A; purely imaginary on |z| = 1."""
    n = sample.n
    p = (-1.0) ** n * _horner(list(sample.char_coeffs), z)
    pprime = (-1.0) ** n * _horner(sample.b1, z)
    log_mod = -0.5 * n * math.log(abs(z))
    phase = -0.5 * n * _arg_minus_z(sample, z) - _det_half_arg(sample)
    h = math.exp(log_mod) * cmath.exp(1j * phase)
    return h * (-0.5 * n * p + z * pprime)


def F_theta(theta: float, sample: UnitarySample) -> float:
    """F(theta) = d/dtheta arg eta_A(e^{i theta}) via the closed-form sum
    1 - n/2 + sum_j Re 1/(1 - e^{-i theta} mu'_j); equals n/2 at eigenangles
    and is bounded below by 1/2."""
    w = cmath.exp(-1j * theta)
    terms = 1.0 / (1.0 - w * sample.deriv_roots)
    if not np.all(np.isfinite(terms)):
        raise ZeroDivisionError("F evaluated at a zero of p_A'")
    return 1.0 - sample.n / 2.0 + float(np.sum(terms.real))


class DiskField:
    """Trace field f = eta_A inside the unit disk."""

    name = "re_eta_A"

    def __init__(self, sample: UnitarySample):
        self.sample = sample
        self._coeffs = tuple(complex(c) for c in sample.char_coeffs)
        self._half_n_minus_1 = 1.0 - sample.n / 2.0
        self._det_half = _det_half_arg(sample)
        self._pi_n = math.pi * (sample.n % 2)
        self._cut_lo = sample.cut_angle - math.pi
        self._half_n = 0.5 * sample.n

    def local(self, z: complex) -> FieldLocal:
        # fused Horner: s1 = B'(z), s2 = B''(z)/2, s3 = B'''(z)/6
        s0 = s1 = s2 = s3 = 0.0 + 0.0j
        for c in self._coeffs:
            s3 = s3 * z + s2
            s2 = s2 * z + s1
            s1 = s1 * z + s0
            s0 = s0 * z + c
        u = self._cut_lo + (cmath.phase(-z) - self._cut_lo) % TWO_PI
        a = (cmath.phase(z) - self._half_n * u - self._det_half
             + cmath.phase(s1) + self._pi_n)
        r21 = 2.0 * s2 / s1
        c0 = self._half_n_minus_1 / z
        l1 = c0 + r21
        l2 = -c0 / z + 6.0 * s3 / s1 - r21 * r21
        return FieldLocal(a, l1, l2)

    def zero_exit_direction(self, z0: complex, color_sign: int) -> complex:
        s = self.sample
        theta = (cmath.phase(z0) - 0.5 * s.n * _arg_minus_z(s, z0)
                 - self._det_half + cmath.phase(_horner(s.b2, z0))
                 + self._pi_n)
        return cmath.exp(1j * (color_sign * math.pi / 2.0 - theta))

    def refine_zero(self, z0: complex) -> tuple[complex, float]:
        s = self.sample
        b1 = _horner(s.b1, z0)
        b2 = _horner(s.b2, z0)
        step = b1 / b2
        if abs(step) > 0.05:
            # nowhere near a root; cheap reject for arrival probing
            return z0 - step, abs(step)
        z = z0 - step
        for _ in range(30):
            b1 = _horner(s.b1, z)
            b2 = _horner(s.b2, z)
            step = b1 / b2
            z = z - step
            if abs(step) < 1e-14:
                break
        resid = abs(_horner(s.b1, z) / _horner(s.b2, z))
        return z, resid

    def cut_crossings(self, a: complex, b: complex) -> int:
        if self.sample.n % 2 == 0:
            return 0
        return ray_crossings(a, b, self.sample.cut_angle)

    def boundary_signal(self, theta: float) -> float:
        """Cut-free real signal on |z| = 1 vanishing exactly at eigenangles:
        a continuous-phase representative of Lambda_A(e^{i theta})."""
        s = self.sample
        p = _horner(list(s.char_coeffs), cmath.exp(1j * theta))
        w = cmath.exp(-0.5j * (s.n * (theta + math.pi)
                               + cmath.phase(s.det_phase)))
        return ((-1.0) ** s.n * w * p).real


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass
class RMTClassification:
    n: int
    types: list[TypeClass]                    # per derivative root
    n0: int
    n1: int
    n2: int
    pairs: list[tuple[int, float, float]]     # (root index, theta-, theta+)
    crossing_eigen_indices: dict[int, int]    # eigenangle index -> root index

    @property
    def counts(self) -> dict[TypeClass, int]:
        return {TypeClass.T0: self.n0, TypeClass.T1: self.n1,
                TypeClass.T2: self.n2}


def _match_eigenangle(theta: float, angles: np.ndarray,
                      tol: float = 1e-6) -> int:
    d = np.abs(np.remainder(angles - theta + math.pi, TWO_PI) - math.pi)
    j = int(np.argmin(d))
    if d[j] > tol:
        raise TheoremViolationError(
            f"circle crossing at theta={theta:.9f} matches no eigenangle "
            f"(nearest {d[j]:.2e} away)")
    return j


def _disk_policy(n: int) -> TracePolicy:
    return TracePolicy(h_max=0.2, zero_trigger_dist=min(0.01, 0.2 / n))


def classify_sample(sample: UnitarySample,
                    policy: Optional[TracePolicy] = None,
                    _retry: bool = True) -> RMTClassification:
    """Classify every zero of p_A' by tracing its two Re eta_A = 0 rays.

    The exact counting identities and circle-crossing bijectivity are
    asserted for every sample.  If the default step policy trips an audit
    (rare congested geometry), the whole sample is retraced once with a
    five-fold finer policy before the failure is treated as real.
    """
    f = DiskField(sample)
    dom = DiskDomain()
    pol = policy or _disk_policy(sample.n)
    if _retry:
        try:
            return classify_sample(sample, pol, _retry=False)
        except (TheoremViolationError, UnresolvedTraceError):
            fine = TracePolicy(
                h_min=min(pol.h_min, 2e-5), h_max=pol.h_max / 5.0,
                h_first=pol.h_first / 5.0, turn_target=pol.turn_target / 2.0,
                corrector_tol=pol.corrector_tol,
                zero_trigger_dist=pol.zero_trigger_dist / 2.0)
            return classify_sample(sample, fine, _retry=False)
    pol = policy or _disk_policy(sample.n)
    types: list[TypeClass] = []
    pairs: list[tuple[int, float, float]] = []
    hit_by: dict[int, int] = {}
    for j, mu_p in enumerate(sample.deriv_roots):
        crossings: list[float] = []
        for sign in (1, -1):
            direction = f.zero_exit_direction(mu_p, sign)
            tr = trace_curve(f, complex(mu_p), direction, dom, pol,
                             color=sign, cut_crossings=f.cut_crossings)
            k = tr.termination.kind
            if k is TermKind.CROSSED_UNIT_CIRCLE:
                crossings.append(tr.termination.ordinate)
            elif k in (TermKind.ARC_CAP_EXCEEDED, TermKind.HIT_SINGULAR_POINT):
                raise UnresolvedTraceError(
                    f"trace from root {j} ended {k.value}")
        types.append(TypeClass(len(crossings)))
        for th in crossings:
            e = _match_eigenangle(th, sample.eigenangles)
            if e in hit_by:
                raise TheoremViolationError(
                    f"eigenangle {e} hit by roots {hit_by[e]} and {j}")
            hit_by[e] = j
        if len(crossings) == 2:
            a, b = crossings
            if (b - a) % TWO_PI > math.pi:
                a, b = b, a
            pairs.append((j, a, b))
    n0 = sum(1 for t in types if t is TypeClass.T0)
    n1 = sum(1 for t in types if t is TypeClass.T1)
    n2 = sum(1 for t in types if t is TypeClass.T2)
    n = sample.n
    if len(hit_by) != n:
        raise TheoremViolationError(
            f"{n - len(hit_by)} eigenangles not reached by any trace")
    if n2 - n0 != 1 or n1 + 2 * n0 != n - 2 or n1 + 2 * n2 != n \
            or n0 + n1 + n2 != n - 1:
        raise TheoremViolationError(
            f"counting identities failed: n0={n0} n1={n1} n2={n2} for n={n}")
    return RMTClassification(n=n, types=types, n0=n0, n1=n1, n2=n2,
                             pairs=pairs, crossing_eigen_indices=hit_by)


# ---------------------------------------------------------------------------
# sector theorem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectorCheck:
    theta_minus: float
    theta_plus: float
    gap: float
    satisfied: bool
    witness: Optional[complex]


def sector_check(sample: UnitarySample) -> list[SectorCheck]:
    """For every consecutive eigenangle gap below 2 pi/(1 + 6n), assert some
    derivative root lies in the sector {1 - |z| < 2 gap, angle inside}."""
    n = sample.n
    threshold = TWO_PI / (1.0 + 6.0 * n)
    out: list[SectorCheck] = []
    angles = sample.eigenangles
    roots = sample.deriv_roots
    for k in range(n):
        a = angles[k]
        b = angles[(k + 1) % n] + (TWO_PI if k == n - 1 else 0.0)
        gap = b - a
        if gap >= threshold:
            continue
        witness = None
        for mu_p in roots:
            if 1.0 - abs(mu_p) < 2.0 * gap:
                rel = (cmath.phase(mu_p) - a) % TWO_PI
                if rel <= gap:
                    witness = complex(mu_p)
                    break
        ok = witness is not None
        out.append(SectorCheck(a, b % TWO_PI, gap, ok, witness))
        if not ok:
            raise TheoremViolationError(
                f"small-gap sector ({a:.6f},{b:.6f}) holds no derivative "
                f"root; this contradicts a proved statement")
    return out


# ---------------------------------------------------------------------------
# ensemble statistics
# ---------------------------------------------------------------------------

@dataclass
class BatchStats:
    n: int
    count: int
    seed: int
    type_counts: dict[TypeClass, int]
    scaled_dist: dict[TypeClass, np.ndarray]   # n (1 - |mu'|) per type
    pair_gaps: np.ndarray                      # n (theta+ - theta-) / 2 pi
    resamples: int
    unresolved: int

    @property
    def type_fractions(self) -> dict[TypeClass, float]:
        total = sum(self.type_counts.values())
        return {t: c / total for t, c in self.type_counts.items()}

    def quartiles(self, t: TypeClass) -> tuple[float, float, float]:
        q = np.quantile(self.scaled_dist[t], [0.25, 0.5, 0.75])
        return float(q[0]), float(q[1]), float(q[2])


def batch_stats(n: int, count: int, seed: int,
                run_sector_checks: bool = True) -> BatchStats:
    """Classify `count` samples and aggregate the appendix statistics."""
    if count < 1:
        raise ValueError("count >= 1")
    dists: dict[TypeClass, list[float]] = {t: [] for t in TypeClass}
    tc = {t: 0 for t in TypeClass}
    gaps: list[float] = []
    resamples = 0
    unresolved = 0
    for idx in range(count):
        cls = None
        for redraw in range(3):
            sample = sample_cue(n, seed, idx, redraw=redraw)
            resamples += sample.resample_attempts
            try:
                cls = classify_sample(sample)
                break
            except UnresolvedTraceError:
                unresolved += 1
        if cls is None:
            raise UnresolvedTraceError(
                f"classification failed for three redraws at index {idx}")
        if run_sector_checks:
            sector_check(sample)
        for t, mu_p in zip(cls.types, sample.deriv_roots):
            tc[t] += 1
            dists[t].append(n * (1.0 - abs(mu_p)))
        for _, a, b in cls.pairs:
            gaps.append(n * ((b - a) % TWO_PI) / TWO_PI)
    return BatchStats(
        n=n, count=count, seed=seed, type_counts=tc,
        scaled_dist={t: np.array(v) for t, v in dists.items()},
        pair_gaps=np.array(gaps), resamples=resamples, unresolved=unresolved)
