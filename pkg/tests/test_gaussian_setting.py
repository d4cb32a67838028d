import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import ndtr

from mifwd.errors import InvalidConfig, Unsupported
from mifwd.gaussian_setting import (FEATURES, SettingParams, binary_entropy,
                                    cmi_pair_given_class, entropy_of, h_class_given,
                                    h_pair_given_class, h_pair_given_class_closed,
                                    h_pair_given_class_terms, h_xky_given_xdisc_class,
                                    k_for_kprime, kprime_grid, mi_class, mi_pair, objective,
                                    order_features, quantities, region_of, scan_kprime,
                                    step_objectives)
from mifwd.selection import MethodKind, MethodSpec

X, W, Z, XD = FEATURES
LN2 = math.log(2)
BENCH = SettingParams(199.985, 0.01)


def phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def spec(kind):
    return MethodSpec(MethodKind(kind))


# -- parameters ----------------------------------------------------------------------

def test_k_for_kprime():
    assert math.isclose(k_for_kprime(0.01), 199.985, abs_tol=5e-4)
    assert math.isclose(k_for_kprime(1.0), 2.414211, abs_tol=2e-6)
    assert math.isclose(k_for_kprime(1e9), 1.0, abs_tol=1e-5)
    with pytest.raises(InvalidConfig):
        k_for_kprime(0.0)


def test_params_validation():
    with pytest.raises(InvalidConfig):
        SettingParams(-1.0, 0.5)
    with pytest.raises(InvalidConfig):
        SettingParams(1.0, math.inf)


def test_kprime_grid():
    g = kprime_grid(0.01, 3.0, 0.01)
    assert len(g) == 300 and g[0] == 0.01 and g[-1] == 3.0 and g[56] == 0.57
    with pytest.raises(InvalidConfig):
        kprime_grid(0.0, 1.0, 0.1)


# -- entropies and MI values ------------------------------------------------------------

def test_entropies():
    p = SettingParams(2.0, 1.0)
    assert math.isclose(entropy_of("C", p), 0.693147, abs_tol=1e-6)
    assert math.isclose(entropy_of(X, p), 1.418939, abs_tol=1e-6)
    assert math.isclose(entropy_of(W, p), 0.5 * math.log(4 * math.pi * math.e), abs_tol=1e-15)
    assert math.isclose(entropy_of(W, p), 1.765512, abs_tol=1e-6)
    assert entropy_of(Z, p) == entropy_of(XD, p) == LN2


def test_table8_values():
    vals = {f: mi_class(f, BENCH) for f in FEATURES}
    assert vals[Z] == 0.0
    assert vals[X] < 1e-3
    assert vals[X] > vals[W] > vals[XD] > vals[Z]
    # gap between the two leaders is a few 1e-9, well above quadrature error
    assert vals[X] - vals[W] > 2e-9


def _mc_mi_class(feature, k, kprime, n=400_000, seed=0):
    """Monte Carlo of E[ln P(C | F) / P(C)], using the exact posterior of C given F."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    y = rng.standard_normal(n)
    c = (x + k * y) >= 0
    if feature is X:
        post1 = ndtr(x / k)
    else:
        w = x - kprime * y
        s2 = 1 + kprime ** 2
        m, s = w / s2, kprime / math.sqrt(s2)
        post1 = ndtr((m - k * w / (k + kprime)) / s)
    post = np.where(c, post1, 1 - post1)
    vals = np.log(2 * post)
    return vals.mean(), vals.std() / math.sqrt(n)


@pytest.mark.parametrize("feature, k, kprime", [(X, 1.0, 0.5), (X, 0.2, 0.5),
                                                (W, 1.0, 0.5), (W, 3.0, 2.0)])
def test_mi_class_monte_carlo(feature, k, kprime):
    est, se = _mc_mi_class(feature, k, kprime)
    assert abs(mi_class(feature, SettingParams(k, kprime)) - est) <= 4 * se


def test_mi_class_x_increases_as_k_shrinks():
    ks = [100, 10, 3, 1, 0.3, 0.1, 0.01]
    vals = [mi_class(X, SettingParams(k, 1.0)) for k in ks]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < LN2


def test_mi_class_xdisc_closed_form_vs_sum():
    p = SettingParams(3.0, 1.0)
    a = math.atan(p.k) / math.pi
    # joint of (Xdisc, C): P(1,1) = P(0,0) = (1 - a)/2, off-diagonal a/2
    cells = [(1 - a) / 2, (1 - a) / 2, a / 2, a / 2]
    direct = sum(q * math.log(q / 0.25) for q in cells)
    assert math.isclose(mi_class(XD, p), direct, abs_tol=1e-15)


def test_xdisc_never_beats_x():
    for k in np.geomspace(0.01, 1000, 25):
        p = SettingParams(float(k), 1.0)
        assert mi_class(XD, p) <= mi_class(X, p)


def test_table9_values():
    assert math.isclose(mi_pair(X, W, BENCH), 4.605, abs_tol=1e-3)
    assert math.isclose(mi_pair(X, XD, BENCH), 0.693, abs_tol=1e-3)
    assert math.isclose(mi_pair(W, XD, BENCH), 0.686, abs_tol=1e-3)
    assert mi_pair(Z, X, BENCH) == mi_pair(W, Z, BENCH) == 0.0
    with pytest.raises(InvalidConfig):
        mi_pair(X, X, BENCH)


@pytest.mark.parametrize("kprime", [0.01, 0.3, 1.0, 4.0])
def test_rotation_identity_against_posterior_route(kprime):
    # MI(W, Xdisc) = ln 2 - E_W[H_b(P(X >= 0 | W))], with X | W normal
    s2 = 1 + kprime ** 2
    sd = kprime / math.sqrt(s2)

    def f(w):
        fw = phi(w / math.sqrt(s2)) / math.sqrt(s2)
        return fw * binary_entropy(float(ndtr((w / s2) / sd)))

    # the integrand is even; split the half line where the posterior changes
    cuts = [0.0, *[c * kprime for c in (0.5, 2, 8, 32)], 12 * math.sqrt(s2)]
    half = sum(integrate.quad(f, a, b, limit=200, epsabs=1e-15, epsrel=1e-13)[0]
               for a, b in zip(cuts, cuts[1:]))
    ref = LN2 - 2 * half
    p = SettingParams(k_for_kprime(kprime), kprime)
    assert abs(mi_pair(W, XD, p) - ref) <= 1e-9
    assert abs(mi_pair(W, XD, p) - mi_class(X, SettingParams(kprime, 1.0))) <= 1e-12


def test_table10_values():
    assert math.isclose(cmi_pair_given_class(X, W, BENCH), 5.298, abs_tol=1e-3)
    assert math.isclose(cmi_pair_given_class(X, XD, BENCH), 0.693, abs_tol=1e-3)
    assert math.isclose(cmi_pair_given_class(W, XD, BENCH), 0.689, abs_tol=1e-3)
    assert cmi_pair_given_class(Z, XD, BENCH) == 0.0


def test_tmi_negative_at_small_kprime():
    assert mi_pair(W, X, BENCH) - cmi_pair_given_class(W, X, BENCH) < 0


# -- the two-dimensional entropies ---------------------------------------------------------

def _nested_h_w_given_xdisc_class(k, kp):
    """Brute-force oracle: cell densities from indicator-weighted quadrature over y."""
    total = 0.0
    a = math.atan(k)
    weights = {(1, 1): (math.pi - a) / (2 * math.pi), (0, 0): (math.pi - a) / (2 * math.pi),
               (0, 1): a / (2 * math.pi), (1, 0): a / (2 * math.pi)}
    for (u, j), pw in weights.items():
        def density(w):
            cuts = sorted({-w / kp, -w / (k + kp)})
            pieces = [-14.0, *[c for c in cuts if -14 < c < 14], 14.0]
            out = 0.0
            for lo, hi in zip(pieces, pieces[1:]):
                mid = 0.5 * (lo + hi)
                x = w + kp * mid
                if (x >= 0) == bool(u) and (x + k * mid >= 0) == bool(j):
                    out += integrate.quad(lambda y: phi(w + kp * y) * phi(y), lo, hi,
                                          epsabs=1e-15, epsrel=1e-12)[0]
            return out

        def integrand(w):
            g = density(w)
            return 0.0 if g < 1e-300 else -g * math.log(g / pw)

        span = 12 * math.sqrt(1 + kp * kp)
        total += integrate.quad(integrand, -span, 0, limit=200, epsabs=1e-11)[0]
        total += integrate.quad(integrand, 0, span, limit=200, epsabs=1e-11)[0]
    return total


@pytest.mark.parametrize("kprime", [0.5, 1.0, 2.0])
def test_giant_entropy_vs_nested_quadrature(kprime):
    p = SettingParams(k_for_kprime(kprime), kprime)
    ref = _nested_h_w_given_xdisc_class(p.k, kprime)
    assert abs(h_xky_given_xdisc_class(p) - ref) <= 1e-7


def test_giant_entropy_bounded_by_class_only_entropy():
    for kp in (0.01, 0.2, 1.0, 3.0):
        for k in (0.5, 2.0, 50.0):
            p = SettingParams(k, kp)
            assert h_xky_given_xdisc_class(p) <= quantities(p).h_w_given_c + 1e-12


@pytest.mark.parametrize("kprime", [0.01, 0.5, 1.0, 2.0])
def test_pair_entropy_closed_form(kprime):
    p = SettingParams.from_kprime(kprime)
    assert abs(h_pair_given_class(p) - h_pair_given_class_closed(p)) <= 1e-6
    h0, h1 = h_pair_given_class_terms(p)
    assert abs(h0 - h1) <= 1e-9  # the two classes mirror each other


def test_pair_entropy_vs_dblquad():
    k, kp = 2.0, 1.0
    p = SettingParams(k, kp)

    # joint density of (X, W) given C=1 is 2 phi(x) phi((x - w)/k') / k' on x >= k w/(k+k')
    def f(x, w):
        d = 2 * phi(x) * phi((x - w) / kp) / kp
        return -d * math.log(d) if d > 1e-300 else 0.0

    ref = integrate.dblquad(f, -12, 12, lambda w: k * w / (k + kp), lambda w: 12,
                            epsabs=1e-10, epsrel=1e-10)[0]
    assert abs(h_pair_given_class_terms(p)[1] - ref) <= 1e-7


# -- objectives and orderings --------------------------------------------------------------

def test_step_objectives_reference_values():
    assert math.isclose(step_objectives(spec("maxMIFS"), 2, BENCH)[W], -4.605, abs_tol=1e-3)
    assert math.isclose(step_objectives(spec("CIFE"), 3, BENCH)[XD], 0.003, abs_tol=1e-3)
    assert math.isclose(step_objectives(spec("JMI"), 3, BENCH)[XD], 0.0015, abs_tol=1e-3)
    with pytest.raises(InvalidConfig):
        step_objectives(spec("JMI"), 4, BENCH)


def test_maxmifs_step2_identity():
    vals = step_objectives(spec("maxMIFS"), 2, BENCH)
    assert vals[W] == mi_class(W, BENCH) - mi_pair(W, X, BENCH)


def test_step3_target_prime_zeros():
    vals = step_objectives(spec("TargetOFPrime"), 3, BENCH)
    assert abs(vals[XD]) <= 1e-6 and abs(vals[Z]) <= 1e-6
    # the same zero, assembled from the pairwise quantities
    assert abs(mi_class(XD, BENCH) - mi_pair(XD, X, BENCH)
               + cmi_pair_given_class(XD, X, BENCH)) <= 1e-12


def test_h_class_given_rules():
    assert h_class_given([X, W, Z], BENCH) == 0.0
    assert h_class_given([], BENCH) == LN2
    assert h_class_given([X, XD], BENCH) == LN2 - mi_class(X, BENCH)
    with pytest.raises(Unsupported):
        h_class_given([W, XD], BENCH)
    with pytest.raises(InvalidConfig):
        objective(spec("MIM"), [X], X, BENCH)


TABLE7 = {
    "MIM": (X, W, XD, Z), "MIFS": (X, Z, XD, W), "mRMR": (X, Z, XD, W),
    "maxMIFS": (X, Z, XD, W), "CIFE": (X, W, XD, Z), "JMI": (X, W, XD, Z),
    "CMIM": (X, W, Z, XD), "JMIM": (X, W, XD, Z),
}


@pytest.mark.parametrize("kind", list(TABLE7))
def test_table7_orderings(kind):
    order = order_features(spec(kind), BENCH)
    assert order.features == TABLE7[kind]
    want_mbr = 0.498 if order.features[1] is Z else 0.0
    assert math.isclose(order.mbr2, want_mbr, abs_tol=1e-3)
    ties = [s.ties for s in order.steps]
    if kind == "CMIM":
        assert ties[2] == (Z, XD)
        assert order.label() == "X, X-k'Y, Z/Xdisc"
    else:
        assert all(len(t) == 1 for t in ties)


def test_x_first_on_grid():
    for kp in kprime_grid(0.01, 3.0, 0.07):
        p = SettingParams.from_kprime(kp)
        assert mi_class(X, p) > mi_class(W, p)
        assert mi_class(X, p) > mi_class(XD, p)


def test_ordering_rejects_params_without_x_first():
    # W beats X once (1 - k k')^2 > 1 + k'^2
    assert mi_class(W, SettingParams(2.0, 3.0)) > mi_class(X, SettingParams(2.0, 3.0))
    with pytest.raises(Unsupported):
        order_features(spec("MIM"), SettingParams(2.0, 3.0))


# -- scans ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["MIFS", "mRMR", "maxMIFS"])
def test_scan_boundaries(kind):
    res = scan_kprime(spec(kind))
    b = [x.kprime for x in res.boundaries]
    assert b == sorted(b) and len(b) == 2
    assert abs(b[1] - 2.115) <= 0.01
    assert min(abs(b[0] - 0.565), abs(b[0] - 0.575)) <= 0.01
    regions = [pt.region for pt in res.points]
    assert regions[0] == "a" and regions[-1] == "c"
    # orderings are constant between consecutive boundaries
    for pt in res.points:
        side = sum(pt.kprime > x for x in b)
        assert pt.region == "abc"[side]


def test_scan_lower_boundary_ownership():
    low = {k: scan_kprime(spec(k)).boundaries[0].kprime for k in ("MIFS", "mRMR", "maxMIFS")}
    assert abs(low["MIFS"] - low["maxMIFS"]) < 1e-4
    assert low["mRMR"] < low["MIFS"]


def test_scan_mbr2():
    res = scan_kprime(spec("maxMIFS"), 0.5, 0.5, 3.0)
    by_kp = {pt.kprime: pt for pt in res.points}
    assert math.isclose(by_kp[1.0].mbr2, (math.pi - math.pi / 4 - 1e-6) / (2 * math.pi),
                        abs_tol=1e-12)
    assert math.isclose(by_kp[1.0].mbr2, 0.375, abs_tol=1e-6)
    assert by_kp[3.0].mbr2 == 0.0


def test_scan_parallel_matches_serial():
    a = scan_kprime(spec("mRMR"), 0.5, 0.05, 0.7)
    b = scan_kprime(spec("mRMR"), 0.5, 0.05, 0.7, workers=2)
    assert a.points == b.points
    assert a.boundaries == b.boundaries


def test_region_labels():
    assert region_of((X, Z, XD, W)) == "a"
    assert region_of((X, Z, W, XD)) == "b"
    assert region_of((X, W, Z, XD)) == "c"
    assert region_of((X, XD, Z, W)) == "other"
