"""Scalar special functions, adaptive quadrature and skew-normal entropies.

Everything here works in nats. Integrands handed to :func:`integrate_1d` must
accept and return numpy arrays (they are evaluated 30 nodes at a time).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import NonConvergence

SQRT2 = math.sqrt(2.0)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
HALF_LOG_2PIE = 0.5 * math.log(2.0 * math.pi * math.e)
_EPS = np.finfo(float).eps

# 15-point Kronrod extension of the 7-point Gauss-Legendre rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
# full symmetric node set on [-1, 1] and the matching weight vectors
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[9, 11, 13]] = _WG[2::-1]
_GW[7] = _WG[3]


@dataclass(frozen=True)
class SkewNormalParams:
    """Location ``mu``, scale ``sigma`` and shape ``alpha`` of SN(mu, sigma, alpha)."""

    mu: float = 0.0
    sigma: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_subdivisions: int = 4000
    # infinite limits are truncated at center +/- tail_halfwidth * scale
    tail_halfwidth: float = 12.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.tail_halfwidth < 8:
            raise ValueError("tail_halfwidth must be >= 8")


DEFAULT_QUAD = QuadratureConfig()


def normal_pdf(z):
    return np.exp(-0.5 * np.square(z)) / math.sqrt(2.0 * math.pi)


def normal_cdf(z):
    """Standard normal distribution function, computed through erfc.

    ``erfc`` keeps full relative precision in the lower tail, so
    ``normal_cdf(-40)`` is a tiny positive number rather than a rounding
    artifact. Accepts scalars or arrays.
    """
    out = 0.5 * special.erfc(-np.asarray(z, dtype=float) / SQRT2)
    return float(out) if np.ndim(out) == 0 else out


def normal_cdf_diff(a, b):
    """Phi(b) - Phi(a) without cancellation when both arguments sit in the upper tail."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    upper = a > 0
    # for a > 0 use the mirrored form Phi(-a) - Phi(-b)
    hi = np.where(upper, -a, b)
    lo = np.where(upper, -b, a)
    out = 0.5 * (special.erfc(-hi / SQRT2) - special.erfc(-lo / SQRT2))
    return float(out) if np.ndim(out) == 0 else out


def skew_normal_pdf(p: SkewNormalParams, w):
    z = (np.asarray(w, dtype=float) - p.mu) / p.sigma
    out = 2.0 / p.sigma * normal_pdf(z) * normal_cdf(p.alpha * z)
    return float(out) if np.ndim(out) == 0 else out


def skew_normal_logpdf(p: SkewNormalParams, w):
    z = (np.asarray(w, dtype=float) - p.mu) / p.sigma
    out = (math.log(2.0 / p.sigma) - LOG_SQRT_2PI - 0.5 * z * z
           + special.log_ndtr(p.alpha * z))
    return float(out) if np.ndim(out) == 0 else out


def xlogx(f):
    """f ln f with the continuity convention; values below 1e-300 count as 0."""
    f = np.asarray(f, dtype=float)
    safe = np.where(f < 1e-300, 1.0, f)
    return np.where(f < 1e-300, 0.0, safe * np.log(safe))


def _gk15(f, a, b):
    """Kronrod estimate, |Kronrod - Gauss| and integral of |f| on each [a_i, b_i]."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise NonConvergence("integrand returned a non-finite value",
                             interval=[float(a.min()), float(b.max())])
    kron = half * (y @ _KW)
    gauss = half * (y @ _GW)
    resabs = np.abs(half) * (np.abs(y) @ _KW)
    return kron, np.abs(kron - gauss), resabs


def integrate_1d(f, a: float, b: float, cfg: QuadratureConfig = DEFAULT_QUAD,
                 *, center: float = 0.0, scale: float = 1.0,
                 points: Sequence[float] = ()) -> float:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of a vectorized ``f``.

    The interval with the largest error estimate is bisected until the summed
    estimate drops below ``max(abs_tol, rel_tol * |I|)``. Infinite endpoints are
    replaced by ``center -/+ tail_halfwidth * scale``. Interior ``points`` (kinks,
    narrow features) seed the initial partition. Intervals whose error is
    already at the rounding floor are not split further.

    Raises NonConvergence when ``max_subdivisions`` bisections do not suffice.
    """
    span = cfg.tail_halfwidth * scale
    a = center - span if a == -math.inf else float(a)
    b = center + span if b == math.inf else float(b)
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    edges = np.array(sorted({a, b, *(p for p in points if a < p < b)}))
    k, e, r = _gk15(f, edges[:-1], edges[1:])
    # heap of (-err, a, b, integral, resabs); ties resolved by position -> deterministic
    heap = [(-e[i], edges[i], edges[i + 1], k[i], r[i]) for i in range(len(k))]
    heapq.heapify(heap)
    total, err_total = math.fsum(k), math.fsum(e)
    splits = 0
    while True:
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err_total <= tol:
            break
        neg_err, lo, hi, val, resabs = heap[0]
        if -neg_err <= 50 * _EPS * resabs or hi - lo <= 1e-14 * max(1.0, abs(lo)):
            # worst interval is roundoff-limited: nothing left to gain
            if err_total <= tol + sum(50 * _EPS * item[4] for item in heap):
                break
            raise NonConvergence("roundoff prevents reaching the requested tolerance",
                                 error_estimate=float(err_total), tolerance=tol)
        if splits >= cfg.max_subdivisions:
            raise NonConvergence("maximum number of subdivisions reached",
                                 error_estimate=float(err_total), tolerance=tol,
                                 max_subdivisions=cfg.max_subdivisions)
        heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        kk, ee, rr = _gk15(f, np.array([lo, mid]), np.array([mid, hi]))
        for i, (x0, x1) in enumerate(((lo, mid), (mid, hi))):
            heapq.heappush(heap, (-ee[i], x0, x1, kk[i], rr[i]))
        total += kk[0] + kk[1] - val
        err_total += ee[0] + ee[1] + neg_err
        splits += 1
        if splits % 64 == 0:
            # refresh running sums to keep drift out of the stopping test
            total = math.fsum(item[3] for item in heap)
            err_total = math.fsum(-item[0] for item in heap)
    total = math.fsum(item[3] for item in heap)
    return sign * total


def normal_entropy(sigma: float = 1.0) -> float:
    return HALF_LOG_2PIE + math.log(sigma)


def skew_normal_entropy(p: SkewNormalParams, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Differential entropy -int f ln f of SN(mu, sigma, alpha) by direct quadrature."""

    def integrand(w):
        logf = skew_normal_logpdf(p, w)
        f = np.exp(logf)
        return np.where(f < 1e-300, 0.0, -f * logf)

    pts = [p.mu + p.sigma * t for t in _shape_points(p.alpha)]
    return integrate_1d(integrand, -math.inf, math.inf, cfg, center=p.mu, scale=p.sigma,
                        points=pts)


def _shape_points(alpha: float) -> list[float]:
    """Standardized breakpoints resolving the Phi(alpha z) transition of width 1/|alpha|."""
    pts = [0.0]
    if alpha != 0:
        w = 1.0 / abs(alpha)
        for c in (0.5, 2.0, 8.0):
            if c * w < 8.0:
                pts += [-c * w, c * w]
    return sorted(pts)


def _gap_integrand(alpha: float):
    def integrand(z):
        t = alpha * z / SQRT2
        e = special.erf(t)
        c = special.erfc(t)
        plus = (1.0 + e) * np.log1p(e)
        safe_c = np.where(c < 1e-300, 1.0, c)
        small_e = np.minimum(e, 0.5)
        minus = np.where(e < 0.5, c * np.log1p(-small_e), safe_c * np.log(safe_c))
        minus = np.where(c < 1e-300, 0.0, minus)
        return normal_pdf(z) * (plus + minus)
    return integrand


def skew_normal_entropy_gap(alpha: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """h(N(0, s^2)) - h(SN(0, s, alpha)), which does not depend on s.

    Same integral as the f ln f entropy, regrouped so the Gaussian part cancels
    analytically: int_0^inf phi(z) [(1+e) ln(1+e) + (1-e) ln(1-e)] dz with
    e = erf(alpha z / sqrt 2). The integrand is O(alpha^2), so tiny gaps keep
    full relative precision.
    """
    alpha = abs(float(alpha))
    if alpha == 0.0:
        return 0.0
    pts = [t for t in _shape_points(alpha) if t > 0]
    return integrate_1d(_gap_integrand(alpha), 0.0, math.inf, cfg, points=pts)


def gaussian_product_halfline(v, kprime: float, lo, hi):
    """int_lo^hi phi(z) phi(v + kprime z) dz in closed form (vectorized over v, lo, hi)."""
    v = np.asarray(v, dtype=float)
    s = math.sqrt(1.0 + kprime * kprime)
    shift = kprime * v / s
    a = s * np.asarray(lo, dtype=float) + shift
    b = s * np.asarray(hi, dtype=float) + shift
    out = normal_pdf(v / s) / s * normal_cdf_diff(a, b)
    out = np.where(np.asarray(hi) > np.asarray(lo), out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def sample_skew_normal(p: SkewNormalParams, n: int, rng: np.random.Generator) -> np.ndarray:
    delta = p.alpha / math.sqrt(1.0 + p.alpha * p.alpha)
    u0 = np.abs(rng.standard_normal(n))
    u1 = rng.standard_normal(n)
    return p.mu + p.sigma * (delta * u0 + math.sqrt(1.0 - delta * delta) * u1)


def monte_carlo_entropy(p: SkewNormalParams, n: int, seed: int,
                        chunk: int = 1_000_000) -> tuple[float, float]:
    """Monte Carlo estimate of -E[ln f(W)] and its standard error."""
    if n < 10_000:
        raise ValueError("monte_carlo_entropy needs n >= 1e4 samples")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        vals = -skew_normal_logpdf(p, sample_skew_normal(p, m, rng))
        total += math.fsum(vals)
        total_sq += math.fsum(vals * vals)
        done += m
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return mean, math.sqrt(var / n)
