"""Analytic oracle for the Gaussian half-plane benchmark.

X and Y are independent standard normals and the class is C_k = 1[X + kY >= 0].
The four candidate features are X, W = X - k'Y, an independent fair bit Z and
Xdisc = 1[X >= 0]. Class-conditional laws of X and W are skew-normal, so every
quantity reduces to closed forms or one-dimensional integrals.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .bayes_risk import mbr2
from .errors import InvalidConfig, Unsupported
from .numerics import (DEFAULT_QUAD, HALF_LOG_2PIE, LOG_SQRT_2PI, QuadratureConfig,
                       gaussian_product_halfline, integrate_1d, normal_cdf, normal_pdf,
                       skew_normal_entropy_gap)
from .selection import (MethodKind, MethodSpec, PairTerms,
                        combine_terms)

LN2 = math.log(2.0)
XFIRST_SLACK = 1e-6


class Feature(str, enum.Enum):
    X = "X"
    XMINUS = "X-k'Y"
    Z = "Z"
    XDISC = "Xdisc"


# declared order, used for tie-breaking
FEATURES = (Feature.X, Feature.XMINUS, Feature.Z, Feature.XDISC)
CLASS = "C"


def parse_feature(label) -> Feature:
    if isinstance(label, Feature):
        return label
    aliases = {"x": Feature.X, "x-k'y": Feature.XMINUS, "xminuskprimey": Feature.XMINUS,
               "w": Feature.XMINUS, "z": Feature.Z, "xdisc": Feature.XDISC}
    try:
        return aliases[str(label).lower()]
    except KeyError:
        raise InvalidConfig(f"unknown setting feature {label!r}") from None


def k_for_kprime(kprime: float, slack: float = XFIRST_SLACK) -> float:
    """Largest-ish k that still ranks X first: tan((pi - arctan k' - slack) / 2)."""
    if not kprime > 0:
        raise InvalidConfig(f"kprime must be positive, got {kprime}")
    return math.tan((math.pi - math.atan(kprime) - slack) / 2.0)


@dataclass(frozen=True)
class SettingParams:
    k: float
    kprime: float
    quad: QuadratureConfig = DEFAULT_QUAD

    def __post_init__(self):
        if not (self.k > 0 and self.kprime > 0):
            raise InvalidConfig("k and kprime must be positive", k=self.k, kprime=self.kprime)
        if not (math.isfinite(self.k) and math.isfinite(self.kprime)):
            raise InvalidConfig("k and kprime must be finite", k=self.k, kprime=self.kprime)

    @classmethod
    def from_kprime(cls, kprime: float, quad: QuadratureConfig = DEFAULT_QUAD) -> "SettingParams":
        return cls(k_for_kprime(kprime), kprime, quad)

    @property
    def sigma_w(self) -> float:
        return math.sqrt(1.0 + self.kprime ** 2)

    @property
    def alpha_x(self) -> float:
        """Shape of X | C=1; X | C=0 has the opposite sign."""
        return 1.0 / self.k

    @property
    def alpha_w(self) -> float:
        """Shape of W | C=1; W | C=0 has the opposite sign."""
        k, kp = self.k, self.kprime
        return (1.0 - k * kp) / (k + kp)


def binary_entropy(p: float) -> float:
    return -sum(q * math.log(q) for q in (p, 1.0 - p) if q > 0)


def _halfline_entropy(weight: float, lo, hi, kprime: float, v_lo: float, v_hi: float,
                      cfg: QuadratureConfig) -> float:
    """-int g ln(g / weight) dv over [v_lo, v_hi], g(v) = int_lo(v)^hi(v) phi(z) phi(v + k'z) dz."""

    def integrand(v):
        g = gaussian_product_halfline(v, kprime, lo(v), hi(v))
        safe = np.where(g < 1e-300, 1.0, g)
        return np.where(g < 1e-300, 0.0, -g * np.log(safe / weight))

    # the Xdisc cut -v/k' sweeps through the bulk of z on a v-scale of k'
    pts = [sgn * c * kprime for c in (0.25, 1.0, 4.0) for sgn in (-1.0, 1.0)]
    return integrate_1d(integrand, v_lo, v_hi, cfg, points=pts)


def h_xky_given_xdisc_class(params: SettingParams) -> float:
    """h(X - k'Y | Xdisc, C_k) as six one-dimensional integrals.

    With z = Y and v = W, X = v + k'z. Xdisc = 1 iff z >= -v/k' and C = 1 iff
    z >= -v/(k + k'). Each (Xdisc, C) cell restricts z to a half-line or an
    interval whose ends depend on the sign of v; the z-integral is closed form.
    """
    k, kp, cfg = params.k, params.kprime, params.quad
    span = cfg.tail_halfwidth * params.sigma_w
    a = math.atan(k)
    p_same = (math.pi - a) / (2.0 * math.pi)   # P(Xdisc=1, C=1) = P(Xdisc=0, C=0)
    p_cross = a / (2.0 * math.pi)             # P(Xdisc=0, C=1) = P(Xdisc=1, C=0)
    inf = math.inf
    cut_d = lambda v: -v / kp          # Xdisc switches here
    cut_c = lambda v: -v / (k + kp)    # class switches here
    const = lambda c: (lambda v: np.full(np.shape(v), c))
    pieces = [
        # (weight, lower z, upper z, v range)
        (p_same, cut_d, const(inf), (-span, 0.0)),    # Xdisc=1, C=1, v < 0
        (p_same, cut_c, const(inf), (0.0, span)),     # Xdisc=1, C=1, v >= 0
        (p_same, const(-inf), cut_c, (-span, 0.0)),   # Xdisc=0, C=0, v < 0
        (p_same, const(-inf), cut_d, (0.0, span)),    # Xdisc=0, C=0, v >= 0
        (p_cross, cut_c, cut_d, (-span, 0.0)),        # Xdisc=0, C=1, only v < 0
        (p_cross, cut_d, cut_c, (0.0, span)),         # Xdisc=1, C=0, only v > 0
    ]
    return math.fsum(_halfline_entropy(w, lo, hi, kp, v0, v1, cfg)
                     for w, lo, hi, (v0, v1) in pieces)


def h_pair_given_class_terms(params: SettingParams) -> tuple[float, float]:
    """(h(X, W | C=0), h(X, W | C=1)) by outer quadrature over w.

    Given W = w, X is normal with mean w/(1+k'^2) and variance k'^2/(1+k'^2);
    the class region is x >= k w / (k + k') for C = 1. The inner x-integral of
    f ln f is then a truncated-normal moment.
    """
    k, kp, cfg = params.k, params.kprime, params.quad
    sw = params.sigma_w
    s = kp / sw
    log_s = math.log(s)

    def parts(v, upper: bool):
        m = v / (1.0 + kp * kp)
        t0 = (k * v / (k + kp) - m) / s
        logfw = -0.5 * (v / sw) ** 2 - math.log(sw) - LOG_SQRT_2PI
        fw = np.exp(logfw)
        # ln of the conditional joint density is ln(2 f_W / s) - ln(2 pi)/2 - t^2/2
        base = LN2 + logfw - log_s - LOG_SQRT_2PI
        if upper:
            mass = normal_cdf(-t0)
            second = t0 * normal_pdf(t0) + mass
        else:
            mass = normal_cdf(t0)
            second = mass - t0 * normal_pdf(t0)
        return -2.0 * fw * (base * mass - 0.5 * second)

    span = cfg.tail_halfwidth * sw
    h0 = integrate_1d(lambda v: parts(v, False), -span, span, cfg)
    h1 = integrate_1d(lambda v: parts(v, True), -span, span, cfg)
    return h0, h1


def h_pair_given_class(params: SettingParams) -> float:
    h0, h1 = h_pair_given_class_terms(params)
    return 0.5 * (h0 + h1)


def h_pair_given_class_closed(params: SettingParams) -> float:
    return 1.0 + math.log(math.pi) + math.log(params.kprime)


class SettingQuantities:
    """Lazily evaluated MI and entropy values for one parameter pair."""

    def __init__(self, params: SettingParams):
        self.params = params

    @cached_property
    def arctan_ratio(self) -> float:
        return math.atan(self.params.k) / math.pi

    @cached_property
    def mi_c_x(self) -> float:
        return skew_normal_entropy_gap(self.params.alpha_x, self.params.quad)

    @cached_property
    def mi_c_w(self) -> float:
        return skew_normal_entropy_gap(self.params.alpha_w, self.params.quad)

    @cached_property
    def mi_c_xdisc(self) -> float:
        p = self.arctan_ratio
        return 2.0 * LN2 + p * math.log(p / 2.0) + (1.0 - p) * math.log(0.5 - p / 2.0)

    @cached_property
    def mi_x_w(self) -> float:
        return 0.5 * math.log1p(1.0 / self.params.kprime ** 2)

    @cached_property
    def mi_w_xdisc(self) -> float:
        # rotation: (W, Xdisc) relates like (X, C_k) with k replaced by k'
        return skew_normal_entropy_gap(1.0 / self.params.kprime, self.params.quad)

    @cached_property
    def h_x(self) -> float:
        return HALF_LOG_2PIE

    @cached_property
    def h_w(self) -> float:
        return HALF_LOG_2PIE + math.log(self.params.sigma_w)

    @cached_property
    def h_x_given_c(self) -> float:
        return self.h_x - self.mi_c_x

    @cached_property
    def h_w_given_c(self) -> float:
        return self.h_w - self.mi_c_w

    @cached_property
    def h_w_given_xdisc_c(self) -> float:
        return h_xky_given_xdisc_class(self.params)

    @cached_property
    def cmi_x_w(self) -> float:
        return self.h_x_given_c + self.h_w_given_c - h_pair_given_class_closed(self.params)

    @cached_property
    def cmi_x_xdisc(self) -> float:
        return binary_entropy(self.arctan_ratio)

    @cached_property
    def cmi_w_xdisc(self) -> float:
        return self.h_w_given_c - self.h_w_given_xdisc_c


@lru_cache(maxsize=512)
def quantities(params: SettingParams) -> SettingQuantities:
    return SettingQuantities(params)


def entropy_of(item, params: SettingParams) -> float:
    """Entropy of a feature or of the class marker "C" (nats, differential for X and W)."""
    if item == CLASS:
        return LN2
    f = parse_feature(item)
    q = quantities(params)
    if f is Feature.X:
        return q.h_x
    if f is Feature.XMINUS:
        return q.h_w
    return LN2


def mi_class(feature, params: SettingParams) -> float:
    f = parse_feature(feature)
    q = quantities(params)
    return {Feature.X: lambda: q.mi_c_x, Feature.XMINUS: lambda: q.mi_c_w,
            Feature.Z: lambda: 0.0, Feature.XDISC: lambda: q.mi_c_xdisc}[f]()


def _pair(a, b) -> frozenset:
    fa, fb = parse_feature(a), parse_feature(b)
    if fa is fb:
        raise InvalidConfig("pair quantities need two different features", feature=fa.value)
    return frozenset((fa, fb))


def mi_pair(a, b, params: SettingParams) -> float:
    pair = _pair(a, b)
    if Feature.Z in pair:
        return 0.0
    q = quantities(params)
    if pair == {Feature.X, Feature.XMINUS}:
        return q.mi_x_w
    if pair == {Feature.X, Feature.XDISC}:
        return LN2
    return q.mi_w_xdisc


def cmi_pair_given_class(a, b, params: SettingParams) -> float:
    pair = _pair(a, b)
    if Feature.Z in pair:
        return 0.0
    q = quantities(params)
    if pair == {Feature.X, Feature.XMINUS}:
        return q.cmi_x_w
    if pair == {Feature.X, Feature.XDISC}:
        return q.cmi_x_xdisc
    return q.cmi_w_xdisc


def h_class_given(features: Sequence, params: SettingParams) -> float:
    """H(C_k | S) for the subsets reachable once X is selected (plus singletons)."""
    fs = {parse_feature(f) for f in features}
    fs.discard(Feature.Z)  # independent of everything else
    if Feature.X in fs:
        fs.discard(Feature.XDISC)  # a function of X
    if {Feature.X, Feature.XMINUS} <= fs:
        return 0.0
    if not fs:
        return LN2
    if len(fs) == 1:
        return LN2 - mi_class(next(iter(fs)), params)
    raise Unsupported("H(C | S) is only available for S containing X or a single feature",
                      features=sorted(f.value for f in fs))


def objective(method: MethodSpec, selected: Sequence, candidate, params: SettingParams) -> float:
    cand = parse_feature(candidate)
    sel = [parse_feature(s) for s in selected]
    if cand in sel:
        raise InvalidConfig(f"{cand.value} is already selected")
    if method.kind is MethodKind.TARGET_OF:
        return LN2 - h_class_given(sel + [cand], params)
    if method.kind is MethodKind.TARGET_OF_PRIME:
        return h_class_given(sel, params) - h_class_given(sel + [cand], params)
    terms = [PairTerms(mi_pair(cand, s, params), cmi_pair_given_class(cand, s, params),
                       mi_class(s, params)) for s in sel]
    return combine_terms(method, mi_class(cand, params), terms)


def step_objectives(method: MethodSpec, step: int, params: SettingParams) -> dict[Feature, float]:
    """Objective of every remaining candidate at step 2 (S = {X}) or 3 (S = {X, W})."""
    if step == 2:
        sel = [Feature.X]
    elif step == 3:
        sel = [Feature.X, Feature.XMINUS]
    else:
        raise InvalidConfig("step must be 2 or 3", step=step)
    return {f: objective(method, sel, f, params) for f in FEATURES if f not in sel}


@dataclass(frozen=True)
class OrderStep:
    chosen: Feature
    ties: tuple[Feature, ...]
    values: dict[Feature, float]


@dataclass(frozen=True)
class Ordering:
    method: MethodSpec
    params: SettingParams
    steps: tuple[OrderStep, ...]

    @property
    def features(self) -> tuple[Feature, ...]:
        return tuple(s.chosen for s in self.steps)

    @property
    def mbr2(self) -> float:
        return mbr2(self.features[:2], self.params.k)

    def label(self) -> str:
        """Ordering as text; a tie set is written once, joined with '/'."""
        out, skip = [], set()
        for step in self.steps:
            if step.chosen in skip:
                continue
            out.append("/".join(t.value for t in step.ties))
            skip.update(step.ties)
        return ", ".join(out)


def order_features(method: MethodSpec, params: SettingParams,
                   tie_tolerance: float = 1e-9) -> Ordering:
    selected: list[Feature] = []
    steps = []
    for _ in FEATURES:
        pool = [f for f in FEATURES if f not in selected]
        values = {f: objective(method, selected, f, params) for f in pool}
        best = max(values.values())
        ties = tuple(f for f in pool if values[f] >= best - tie_tolerance)
        steps.append(OrderStep(ties[0], ties, values))
        selected.append(ties[0])
    if steps[0].chosen is not Feature.X:
        raise Unsupported("parameters do not rank X first", k=params.k, kprime=params.kprime)
    return Ordering(method, params, tuple(steps))


REGION_ORDERINGS = {
    (Feature.X, Feature.Z, Feature.XDISC, Feature.XMINUS): "a",
    (Feature.X, Feature.Z, Feature.XMINUS, Feature.XDISC): "b",
}


def region_of(features: Sequence[Feature]) -> str:
    features = tuple(features)
    if features in REGION_ORDERINGS:
        return REGION_ORDERINGS[features]
    if features[:2] == (Feature.X, Feature.XMINUS):
        return "c"
    return "other"


@dataclass(frozen=True)
class ScanPoint:
    kprime: float
    k: float
    ordering: tuple[Feature, ...]
    ties: tuple[tuple[Feature, ...], ...]
    step2: dict[Feature, float]
    mbr2: float
    region: str


@dataclass(frozen=True)
class Boundary:
    kprime: float
    left: tuple[Feature, ...]
    right: tuple[Feature, ...]


@dataclass
class ScanResult:
    method: MethodSpec
    grid: list[float]
    points: list[ScanPoint] = field(default_factory=list)
    boundaries: list[Boundary] = field(default_factory=list)


def _ordering_at(method: MethodSpec, kprime: float, quad: QuadratureConfig) -> tuple[Feature, ...]:
    return order_features(method, SettingParams.from_kprime(kprime, quad)).features


def scan_point(method: MethodSpec, kprime: float, quad: QuadratureConfig = DEFAULT_QUAD) -> ScanPoint:
    params = SettingParams.from_kprime(kprime, quad)
    order = order_features(method, params)
    return ScanPoint(kprime, params.k, order.features, tuple(s.ties for s in order.steps),
                     dict(order.steps[1].values), order.mbr2, region_of(order.features))


def _scan_task(args):
    return scan_point(*args)


def kprime_grid(start: float = 0.01, end: float = 3.0, step: float = 0.01) -> list[float]:
    if not (start > 0 and step > 0 and end >= start):
        raise InvalidConfig("grid needs 0 < start <= end and step > 0",
                            start=start, end=end, step=step)
    n = int(math.floor((end - start) / step + 1e-9))
    # round away binary noise so grid values print as typed
    return [round(start + i * step, 12) for i in range(n + 1)]


def scan_kprime(method: MethodSpec, grid_start: float = 0.01, grid_step: float = 0.01,
                grid_end: float = 3.0, quad: QuadratureConfig = DEFAULT_QUAD,
                refine_tol: float = 1e-4, workers: int = 1) -> ScanResult:
    """Orderings over a k' grid, with ordering changes located by bisection."""
    grid = kprime_grid(grid_start, grid_end, grid_step)
    tasks = [(method, kp, quad) for kp in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_scan_task, tasks))
    else:
        points = [_scan_task(t) for t in tasks]
    result = ScanResult(method, grid, points)
    for left, right in zip(points, points[1:]):
        if left.ordering == right.ordering:
            continue
        lo, hi = left.kprime, right.kprime
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            if _ordering_at(method, mid, quad) == left.ordering:
                lo = mid
            else:
                hi = mid
        result.boundaries.append(Boundary(0.5 * (lo + hi), left.ordering, right.ordering))
    return result
