import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslkit import channels
from qslkit.channels import ChannelConfig
from qslkit.errors import DegenerateDenominator, MixedFactorSingular
from qslkit.hermitian import bures_fidelity, norms, overlap, purity
from qslkit.quadrature import adaptive_simpson
from qslkit.speedlimit import QslRequest, kappa_tau_sweep, qsl, qsl_bures, qsl_curve, qsl_relative_purity, superfidelity_deficit, trajectory
from qslkit.states import bell_state, bloch_state, chi_state, maximally_mixed
from qslkit.validation import random_case

OUN = ChannelConfig.oun(1.0, 0.1)
RTN = ChannelConfig.rtn(1.0, 0.6)
NMAD = ChannelConfig.nmad(1.0, 0.1)


def _bures_oracle(rho0, cfg, tau, norm="op"):
    """Bound assembled by hand from scipy-free pieces: arccos of root fidelity over averaged speed."""
    rhot = channels.evolve_many(rho0, cfg, [tau])[0]
    angle = math.acos(min(1.0, math.sqrt(bures_fidelity(rho0, rhot))))
    num = math.sin(angle) ** 2

    def speed(ts):
        rs = channels.evolve_many(rho0, cfg, ts)
        return np.asarray(getattr(norms(channels.generator_many(rs, cfg, ts)), norm))

    return num / (adaptive_simpson(speed, 0.0, tau, tol=1e-12) / tau)


def test_request_validation_and_aliases():
    assert QslRequest(method="relative-purity").method == "rp"
    assert QslRequest(method="Bures", norm="TR").norm == "tr"
    for bad in (dict(norm="max"), dict(tau=0.0), dict(grid_points=4), dict(fidelity="x"), dict(method="mt")):
        with pytest.raises(ValueError):
            QslRequest(**bad)


def test_pure_qubit_bures_matches_oracle():
    rho0 = bloch_state((1, 0, 0))
    for cfg in (OUN, RTN, NMAD):
        got = qsl(rho0, cfg, QslRequest(method="bures", norm="op", tau=1.3, fidelity="bures")).tau_qsl
        assert got == pytest.approx(_bures_oracle(rho0, cfg, 1.3), rel=1e-8)


def test_superfidelity_deficit_matches_direct_form(rng):
    from qslkit.validation import random_density

    a, b = random_density(rng, 4), random_density(rng, 4)
    direct = 1.0 - (overlap(a, b) + math.sqrt((1 - purity(a)) * (1 - purity(b))))
    assert superfidelity_deficit(a, b) == pytest.approx(direct, abs=1e-14)


def test_pure_dephasing_qubit_saturates():
    r = qsl(bloch_state((1, 0, 0)), OUN, QslRequest(method="bures", tau=2.0))
    assert r.tau_qsl == pytest.approx(2.0, rel=1e-9)


def test_relative_purity_form_for_pure_dephasing_qubit():
    # pure |+>: relative purity (1 + p)/2, speed |p'| / sqrt 2, tau_QSL = 4 theta^2 / (pi^2 <speed>)
    tau = 1.5
    r = qsl(bloch_state((1, 0, 0)), RTN, QslRequest(method="rp", tau=tau))
    p = channels.decoherence_function(RTN, tau)
    avg = adaptive_simpson(lambda t: np.abs(channels.decoherence_derivative(RTN, t)) / math.sqrt(2), 0, tau, tol=1e-13) / tau
    theta = math.acos((1 + p) / 2)
    assert r.angle == pytest.approx(theta, rel=1e-10)
    assert r.tau_qsl == pytest.approx(4 * theta**2 / (math.pi**2 * avg), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bound_never_exceeds_driving_time(seed):
    rho, cfg, tau = random_case(np.random.default_rng(seed))
    for norm in ("op", "hs", "tr"):
        r = qsl(rho, cfg, QslRequest(method="bures", norm=norm, tau=tau))
        assert 0.0 <= r.tau_qsl <= tau * (1 + 1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_norm_hierarchy(seed):
    rho, cfg, tau = random_case(np.random.default_rng(seed))
    op, hs, tr = (qsl(rho, cfg, QslRequest(norm=n, tau=tau)).tau_qsl for n in ("op", "hs", "tr"))
    assert op >= hs * (1 - 1e-12) and hs >= tr * (1 - 1e-12)


def test_curve_matches_pointwise_calls():
    rho0 = bell_state("psi+")
    taus = [0.3, 1.0, 2.2]
    req = QslRequest(method="rp")
    curve = [r.tau_qsl for r in qsl_curve(rho0, NMAD, req, taus)]
    single = [qsl(rho0, NMAD, QslRequest(method="rp", tau=t)).tau_qsl for t in taus]
    assert np.allclose(curve, single, rtol=1e-9)


def test_kappa_tau_sweep_equals_rescaled_channel():
    rho0 = chi_state(1, 0.5)
    req = QslRequest(method="bures", tau=1.0)
    xs = [0.5, 2.0, 4.0]
    pts = kappa_tau_sweep(rho0, RTN, req, xs)
    for x, pt in zip(xs, pts):
        direct = qsl(rho0, RTN.scaled(x / req.tau), req).tau_qsl
        assert pt.tau_qsl == pytest.approx(direct, rel=1e-8)


def test_trajectory_reports_final_measures():
    pts = trajectory(bloch_state((0.6, 0, 0.8)), OUN, QslRequest(), [0.5, 1.0])
    assert [p.t for p in pts] == [0.5, 1.0]
    assert all(p.m_cl == pytest.approx(1 - 0.8**2) for p in pts)


def test_stationary_state_gives_zero():
    r = qsl(maximally_mixed(2), OUN, QslRequest())
    assert r.tau_qsl == 0.0 and "stationary" in r.flags


def test_mixed_factor_breaks_down_when_state_purifies():
    with pytest.raises(MixedFactorSingular):
        qsl(chi_state(1, 0.5), NMAD, QslRequest(tau=9.0))
    r = qsl(chi_state(1, 0.5), NMAD, QslRequest(tau=9.0, use_mixed_factor=False))
    assert r.tau_qsl > 0


def test_method_specific_wrappers():
    rho0 = bloch_state((1, 0, 0))
    assert qsl_bures(rho0, OUN, QslRequest()).tau_qsl > 0
    with pytest.raises(ValueError):
        qsl_relative_purity(rho0, OUN, QslRequest(method="bures"))


def test_curve_rejects_bad_times():
    with pytest.raises(ValueError):
        qsl_curve(bloch_state((1, 0, 0)), OUN, QslRequest(), [0.0, 1.0])
