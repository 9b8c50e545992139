"""Critical-coupling and persistence tests."""

import math

import numpy as np
import pytest

from netsync.dynamics import (
    CLASSIC,
    LorenzParams,
    identity_coupling,
    lorenz_field,
    zero_field,
)
from netsync.errors import (
    DisconnectedError,
    InvalidParamsError,
    SubcriticalAlphaError,
)
from netsync.graphs import RegularKind, build_regular, graph_from_edges
from netsync.netsim import NetworkSystem, Perturbation
from netsync.stability import (
    alpha_c_general,
    alpha_c_two_dd,
    alpha_c_two_minors,
    alpha_c_two_sym,
    contraction_rate_estimate,
    coppel_margin,
    integral_perturbation_margin,
    p2_root_closed_form,
    persistence_bound,
    sym_part_certificate,
)

K2 = build_regular(RegularKind.COMPLETE, 2)

PLUS_MINUS_SHAPE = np.array([[1.0, 0.0, -1.0], [0.0, -1.0, 0.0], [-1.0, 0.0, 1.0]])
ROW_COLUMN_SHAPE = np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])


def test_alpha_c_general_two_vertices():
    report = alpha_c_general(K2, CLASSIC, identity_coupling(3))
    assert report.lambda2 == pytest.approx(2.0, abs=1e-9)
    assert report.mu1 == 1.0
    assert abs(report.alpha_critical - 29.11) <= 0.01
    assert report.eta(report.alpha_critical) == pytest.approx(0.0, abs=1e-9)
    assert report.eta(30.0) == pytest.approx(2.0 * 30.0 - report.beta)


def test_alpha_c_general_larger_graphs():
    k10 = alpha_c_general(build_regular(RegularKind.COMPLETE, 10), CLASSIC,
                          identity_coupling(3))
    assert abs(k10.alpha_critical - 5.822) <= 1e-2
    ring4 = alpha_c_general(build_regular(RegularKind.RING, 4), CLASSIC,
                            identity_coupling(3))
    assert abs(ring4.alpha_critical - 29.11) <= 0.01


def test_alpha_c_general_requires_connected():
    with pytest.raises(DisconnectedError):
        alpha_c_general(graph_from_edges(4, [(0, 1), (2, 3)]), CLASSIC,
                        identity_coupling(3))


def test_alpha_c_antitone_in_lambda2():
    h = identity_coupling(3)
    for n in (3, 5, 8):
        complete = alpha_c_general(build_regular(RegularKind.COMPLETE, n), CLASSIC, h)
        ring = alpha_c_general(build_regular(RegularKind.RING, n), CLASSIC, h)
        assert complete.alpha_critical <= ring.alpha_critical


def test_alpha_c_two_dd():
    assert abs(alpha_c_two_dd(CLASSIC) - 29.11) <= 0.01
    assert alpha_c_two_dd(LorenzParams(sigma=30.0, r=1.0, b=2.0)) == 30.0


def test_sym_certificate_above_and_below_threshold():
    assert sym_part_certificate(CLASSIC, 14.0, grid=51)
    assert not sym_part_certificate(CLASSIC, 5.0, grid=51)


def test_alpha_c_two_sym_matches_negative_definiteness_threshold():
    # The eigenvalue certificate and the minors certificate characterize
    # the same property, so the bisection lands at the minors threshold.
    value = alpha_c_two_sym(CLASSIC)
    minors = alpha_c_two_minors(CLASSIC)
    assert minors.alpha_c <= value <= minors.alpha_c + 0.011
    with pytest.raises(InvalidParamsError):
        alpha_c_two_sym(CLASSIC, grid=10)


def test_alpha_c_two_minors_roots():
    report = alpha_c_two_minors(CLASSIC)
    assert abs(report.p2_root - 6.5972) <= 1e-3
    assert abs(report.p3_root - 7.5546) <= 1e-2
    assert report.alpha_c == report.p3_root
    # vacuous first minor, then increasing roots
    assert -CLASSIC.sigma / 2.0 < 0.0 < report.p2_root < report.p3_root
    assert p2_root_closed_form(CLASSIC) == report.p2_root


def test_criterion_ordering():
    sym_value = alpha_c_two_sym(CLASSIC)
    minors = alpha_c_two_minors(CLASSIC)
    dd = alpha_c_two_dd(CLASSIC)
    assert minors.alpha_c <= sym_value + 0.011 <= dd


def test_persistence_bound_constant_shape():
    report = alpha_c_general(K2, CLASSIC, identity_coupling(3))
    for xi, expect in ((0.11, True), (0.2, False)):
        pert = Perturbation(0, 1, xi * PLUS_MINUS_SHAPE)
        out = persistence_bound(report, 30.0, K2, [pert])
        assert out.l_inf_norm == 2.0
        assert out.measured_perturbation == pytest.approx(2.0 * xi)
        assert out.bound == pytest.approx((30.0 - report.alpha_critical) / 4.0)
        assert out.persistent is expect
    # the reference bound for this shape: |xi| < eta/8 ~ 0.11125
    xi_limit = (30.0 - report.alpha_critical) / 8.0
    assert abs(xi_limit - 0.11125) <= 2e-4


def test_persistence_bound_general_eta_scales_by_lambda2_mu1():
    report = alpha_c_general(K2, CLASSIC, identity_coupling(3))
    pert = Perturbation(0, 1, 0.05 * PLUS_MINUS_SHAPE)
    per_mode = persistence_bound(report, 30.0, K2, [pert])
    general = persistence_bound(report, 30.0, K2, [pert], per_mode=False)
    assert general.eta == pytest.approx(per_mode.eta * report.lambda2 * report.mu1)
    assert general.bound == pytest.approx(per_mode.bound * 2.0)


def test_persistence_bound_cosine_shape():
    report = alpha_c_general(K2, CLASSIC, identity_coupling(3))
    pert = Perturbation(0, 1, 0.05 * ROW_COLUMN_SHAPE, omega=4.1888)
    out = persistence_bound(report, 30.0, K2, [pert])
    assert out.measured_perturbation == pytest.approx(0.15)
    xi_limit = out.bound / 3.0
    assert abs(xi_limit - 7.42e-2) <= 1e-4


def test_persistence_bound_trivial_and_subcritical():
    report = alpha_c_general(K2, CLASSIC, identity_coupling(3))
    out = persistence_bound(report, 30.0, K2, [])
    assert out.persistent and out.measured_perturbation == 0.0
    with pytest.raises(SubcriticalAlphaError):
        persistence_bound(report, 1.0, K2, [])


def test_persistence_bound_monotone_in_alpha():
    report = alpha_c_general(K2, CLASSIC, identity_coupling(3))
    bounds = [persistence_bound(report, a, K2, []).bound for a in (29.5, 30.0, 31.0, 35.0)]
    assert all(b2 > b1 for b1, b2 in zip(bounds, bounds[1:]))


def test_coppel_margin():
    assert coppel_margin(1.0, 1.0, 0.3) == pytest.approx(0.7)
    assert coppel_margin(1.0, 1.0, 1.0) == 0.0
    assert coppel_margin(0.89, 1.0, 0.2225) == pytest.approx(0.6675)
    with pytest.raises(InvalidParamsError):
        coppel_margin(-1.0, 1.0, 0.1)


def test_integral_perturbation_margin():
    assert integral_perturbation_margin(-1.0, 1.0, 1.0, 1e-12, 1.0) == pytest.approx(-1.0)
    value = integral_perturbation_margin(-1.0, 1.0, 1.0, 0.1, 1.0)
    assert value == pytest.approx(-1.0 + 0.3 + math.log(1.1))
    # faster oscillation shrinks the integral bound delta ~ 1/omega,
    # driving the margin back to the unperturbed rate
    deltas = [3.0 * 0.05 / omega for omega in (10.0, 100.0, 1000.0)]
    margins = [integral_perturbation_margin(-1.0, 1.0, 1.0, d, 1.0) for d in deltas]
    assert margins[0] > margins[1] > margins[2]
    assert abs(margins[2] - (-1.0)) < 1e-3
    with pytest.raises(InvalidParamsError):
        integral_perturbation_margin(0.5, 1.0, 1.0, 0.1, 1.0)


def test_contraction_rate_linear_case():
    sys_ = NetworkSystem(graph=K2, field=zero_field(3), h=identity_coupling(3), alpha=1.0)
    slope = contraction_rate_estimate(sys_, [0.0, 0.0, 0.0], 5.0, 1e-3)
    assert abs(slope - (-2.0)) <= 0.01


def test_contraction_rate_supercritical_lorenz():
    sys_ = NetworkSystem(graph=K2, field=lorenz_field(), h=identity_coupling(3), alpha=30.0)
    slope = contraction_rate_estimate(sys_, [-7.0, 10.0, 5.0], 20.0, 1e-3)
    assert slope < 0.0


def test_contraction_rate_uncoupled_lorenz_expands():
    sys_ = NetworkSystem(graph=K2, field=lorenz_field(), h=identity_coupling(3), alpha=0.0)
    slope = contraction_rate_estimate(sys_, [-7.0, 10.0, 5.0], 20.0, 1e-3)
    # chaotic stretching: reported, not asserted beyond being finite
    assert np.isfinite(slope)
    assert slope > -1.0


def test_reports_serialize_flat():
    report = alpha_c_general(K2, CLASSIC, identity_coupling(3))
    d = report.to_json_dict()
    assert set(d) == {"beta", "lambda2", "mu1", "alpha_c"}
    pr = persistence_bound(report, 30.0, K2, [])
    pd = pr.to_json_dict()
    assert set(pd) == {"eta", "laplacian_inf_norm", "bound", "measured", "persistent"}
