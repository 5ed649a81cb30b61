import math

import numpy as np
import pytest
from conftest import random_complex, random_density

from collisim.collision import SEQUENTIAL, SIMULTANEOUS, CollisionSchedule
from collisim.hamiltonians import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    AncillaSpec,
    IsingChain,
    TLS,
    build,
)
from collisim.lindblad import (
    NumericalValidationError,
    dissipator,
    dissipator_superoperator,
    integrate,
    ising_jump_operators,
    ising_jump_terms,
    ising_rhs,
    jump_terms_rhs,
    match_ancillae_to_transitions,
    tls_jump_terms,
    tls_rhs,
    windowed_linear_rate,
)
from collisim.states import fidelity, thermal_state, trace_distance

H_TLS = build(TLS(h_s=1.0))
BATH_MK = 10.0
EXCITED = np.diag([1.0, 0.0]).astype(complex)
GROUND = np.diag([0.0, 1.0]).astype(complex)


def tls_schedule(count=10, g=1e-3, tau=200.0, h_b=1.0):
    anc = AncillaSpec(h_b=h_b, temperature_mk=BATH_MK, g=g, target_site=0)
    return CollisionSchedule(tau_p=tau, tau_c=tau, count=count, mode=SEQUENTIAL, ancillae=(anc,))


ISING_SPEC = IsingChain(h=(0.5, 0.5), J=(1.0,))


def ising_schedule(count=5, mode=SIMULTANEOUS, g=1e-3, tau=400.0):
    ancs = tuple(
        AncillaSpec(h_b=hb, temperature_mk=BATH_MK, g=g, target_site=site)
        for site, hb in ((0, 1.5), (0, 0.5), (1, 1.5), (1, 0.5))
    )
    return CollisionSchedule(tau_p=tau, tau_c=tau, count=count, mode=mode, ancillae=ancs)


def test_dissipator_decay_of_excited_state():
    np.testing.assert_allclose(dissipator(EXCITED, SIGMA_MINUS), GROUND - EXCITED, atol=1e-15)


def test_dissipator_dark_state():
    np.testing.assert_allclose(dissipator(GROUND, SIGMA_MINUS), np.zeros((2, 2)), atol=1e-15)


def test_dissipator_traceless_and_hermiticity_preserving(rng):
    for _ in range(5):
        rho = random_density(rng, 4)
        o = random_complex(rng, (4, 4))
        d = dissipator(rho, o)
        assert abs(np.trace(d)) < 1e-12
        np.testing.assert_allclose(d, d.conj().T, atol=1e-12)


def test_dissipator_superoperator_matches(rng):
    o = random_complex(rng, (3, 3))
    s = dissipator_superoperator(o)
    rho = random_density(rng, 3)
    np.testing.assert_allclose((s @ rho.reshape(-1)).reshape(3, 3), dissipator(rho, o), atol=1e-12)


def test_tls_rhs_thermal_fixed_point():
    schedule = tls_schedule()
    rho = thermal_state(H_TLS, BATH_MK)
    t = 150.0  # inside the first window
    rhs = tls_rhs(rho, t, schedule, h_s=1.0)
    anc = schedule.ancillae[0]
    max_rate = 2.0 * anc.g**2 * t
    assert np.linalg.norm(rhs) <= 1e-12 * max_rate


def test_tls_rhs_zero_between_collisions():
    schedule = tls_schedule(tau=400.0)
    sched_gap = CollisionSchedule(
        tau_p=400.0,
        tau_c=200.0,
        count=schedule.count,
        mode=SEQUENTIAL,
        ancillae=schedule.ancillae,
    )
    rho = np.diag([0.3, 0.7]).astype(complex)
    assert np.linalg.norm(tls_rhs(rho, 300.0, sched_gap, 1.0)) == 0.0


def test_tls_rhs_maximally_mixed_rate_equation():
    # two-level rate equation with the engine's 2 Re Gamma convention:
    # d rho_ee/dt = 2 g^2 t' (rho_ee_anc * rho_gg - rho_gg_anc * rho_ee)
    #             = g^2 t' (rho_ee_anc - rho_gg_anc) at rho = 1/2
    schedule = tls_schedule()
    anc = schedule.ancillae[0]
    t = 120.0
    rho = np.eye(2, dtype=complex) / 2.0
    rhs = tls_rhs(rho, t, schedule, 1.0)
    expected = anc.g**2 * t * (anc.rho_ee - anc.rho_gg)
    assert rhs[0, 0].real == pytest.approx(expected, rel=1e-12)
    assert rhs[1, 1].real == pytest.approx(-expected, rel=1e-12)


def test_ising_rhs_thermal_fixed_point():
    schedule = ising_schedule()
    rho = thermal_state(build(ISING_SPEC), BATH_MK)
    t = 200.0
    rhs = ising_rhs(rho, t, schedule, ISING_SPEC)
    max_rate = max(2.0 * a.g**2 * t for a in schedule.ancillae)
    assert np.linalg.norm(rhs) <= 1e-12 * max_rate


def test_ising_rhs_outside_windows_is_zero(rng):
    schedule = ising_schedule(count=2)
    rho = random_density(rng, 4)
    t_after = 2 * 400.0 + 5.0
    assert np.linalg.norm(ising_rhs(rho, t_after, schedule, ISING_SPEC)) == 0.0


def test_ising_rhs_inactive_sector_is_stationary(rng):
    # only the up-neighbour ancilla of site 0 collides: the down-neighbour
    # sector populations (basis states ud, dd) cannot move
    anc = AncillaSpec(h_b=1.5, temperature_mk=BATH_MK, g=1e-3, target_site=0)
    schedule = CollisionSchedule(
        tau_p=400.0, tau_c=400.0, count=3, mode=SEQUENTIAL, ancillae=(anc,)
    )
    rho = random_density(rng, 4)
    rhs = ising_rhs(rho, 100.0, schedule, ISING_SPEC)
    assert rhs[1, 1].real == pytest.approx(0.0, abs=1e-18)  # |ud>
    assert rhs[3, 3].real == pytest.approx(0.0, abs=1e-18)  # |dd>
    assert abs(rhs[0, 0].real) > 0  # |uu> participates


def test_unmatched_ancilla_is_configuration_error():
    bad = AncillaSpec(h_b=0.9, temperature_mk=BATH_MK, g=1e-3, target_site=0)
    schedule = CollisionSchedule(
        tau_p=400.0, tau_c=400.0, count=1, mode=SEQUENTIAL, ancillae=(bad,)
    )
    with pytest.raises(ValueError, match="matches no"):
        match_ancillae_to_transitions(ISING_SPEC, schedule)


def test_ising_jump_operators_count_and_form():
    ops = ising_jump_operators(ISING_SPEC)
    assert len(ops) == 4  # 2 sites x 2 neighbour configurations
    site, conf, omega, op = ops[0]
    assert op.shape == (4, 4)
    assert np.count_nonzero(op) == 1


def test_windowed_linear_rate_shape():
    schedule = tls_schedule(count=3, tau=200.0)
    rate = windowed_linear_rate(schedule, "rho_gg", lambda a: True)
    anc = schedule.ancillae[0]
    coeff = 2.0 * anc.g**2 * anc.rho_gg
    assert rate(-1.0) == 0.0
    assert rate(0.0) == 0.0
    assert rate(150.0) == pytest.approx(coeff * 150.0)
    assert rate(250.0) == pytest.approx(coeff * 50.0)  # second window, local time 50
    assert rate(3 * 200.0) == 0.0  # past the last window


def test_integrate_zero_rhs_constant(rng):
    rho = random_density(rng, 2)
    traj = integrate(
        lambda t, r: np.zeros_like(r),
        rho,
        t_end=400.0,
        dt=2.0,
        windows=[(0.0, 200.0), (200.0, 400.0)],
        target=rho,
    )
    np.testing.assert_allclose(traj.fidelity, 1.0, atol=1e-12)
    assert len(traj) == 3


def test_integrate_tls_decay_reaches_target():
    # resonant thermalization from the excited state: monotone fidelity rise
    schedule = tls_schedule(count=80)
    target = thermal_state(H_TLS, BATH_MK)
    rhs = jump_terms_rhs(tls_jump_terms(schedule, 1.0))
    windows = [(s, e) for s, e, _ in schedule.windows()]
    traj = integrate(rhs, EXCITED, windows[-1][1], dt=1.0, windows=windows, target=target)
    assert traj.fidelity[-1] >= 0.99
    assert np.all(np.diff(traj.fidelity) >= -1e-6)
    assert np.abs(traj.trace - 1.0).max() <= 1e-10


def test_integrate_step_halving_fourth_order():
    schedule = tls_schedule(count=1)
    rhs = jump_terms_rhs(tls_jump_terms(schedule, 1.0))
    kwargs = dict(windows=[(0.0, 200.0)], target=None, keep_states=True)
    coarse = integrate(rhs, EXCITED, 200.0, dt=2.0, **kwargs)
    fine = integrate(rhs, EXCITED, 200.0, dt=1.0, **kwargs)
    assert trace_distance(coarse.states[-1], fine.states[-1]) <= 1e-8


def test_integrate_rejects_coarse_dt():
    schedule = tls_schedule(count=1)
    rhs = jump_terms_rhs(tls_jump_terms(schedule, 1.0))
    with pytest.raises(ValueError, match="too coarse"):
        integrate(rhs, EXCITED, 200.0, dt=10.0, windows=[(0.0, 200.0)])


def test_integrate_long_run_detailed_balance():
    # long-time populations match the Gibbs ratio to 1e-3
    schedule = tls_schedule(count=300)
    target = thermal_state(H_TLS, BATH_MK)
    rhs = jump_terms_rhs(tls_jump_terms(schedule, 1.0))
    windows = [(s, e) for s, e, _ in schedule.windows()]
    traj = integrate(rhs, EXCITED, windows[-1][1], dt=2.0, windows=windows, target=target)
    np.testing.assert_allclose(traj.populations[-1], np.diag(target).real, atol=1e-3)
    anc = tls_schedule().ancillae[0]
    ratio = traj.populations[-1][1] / traj.populations[-1][0]
    assert ratio == pytest.approx(anc.rho_gg / anc.rho_ee, rel=1e-3)


def test_integrate_trace_drift_aborts():
    def leaky(t, rho):
        return -0.01 * rho  # uniformly shrinks the trace

    with pytest.raises(NumericalValidationError, match="trace"):
        integrate(leaky, EXCITED, 200.0, dt=1.0, windows=[(0.0, 200.0)])


def test_detuned_tls_rhs_uses_sinc_rate():
    # a detuned ancilla contributes the oscillatory rate, not the linear one
    delta = 0.05
    schedule = tls_schedule(h_b=1.0 + delta / 2.0)
    anc = schedule.ancillae[0]
    t = 97.0
    rho = np.eye(2, dtype=complex) / 2.0
    rhs = tls_rhs(rho, t, schedule, 1.0)
    # emission rate: 2 g^2 [rho_gg sin(-delta t)/-delta + rho_ee sin((2+2hb)t)/(2+2hb)]
    a_plus = 2.0 + 2.0 * anc.h_b
    rate_down = 2.0 * anc.g**2 * (
        anc.rho_gg * math.sin(delta * t) / delta + anc.rho_ee * math.sin(a_plus * t) / a_plus
    )
    a_plus_up = -2.0 + 2.0 * anc.h_b
    rate_up = 2.0 * anc.g**2 * (
        anc.rho_ee * math.sin(a_plus_up * t) / a_plus_up
        + anc.rho_gg * math.sin((-2.0 - 2.0 * anc.h_b) * t) / (-2.0 - 2.0 * anc.h_b)
    )
    expected = 0.5 * (rate_up - rate_down)
    assert rhs[0, 0].real == pytest.approx(expected, rel=1e-10)


def test_ising_jump_terms_rates_respect_signed_frequencies():
    schedule = ising_schedule(count=1)
    terms = ising_jump_terms(ISING_SPEC, schedule)
    assert len(terms) == 8
    t = 100.0
    by_label = {term.label: term for term in terms}
    anc_15 = schedule.ancillae[0]  # h_b = 1.5 drives omega = +3 on site 0
    anc_05 = schedule.ancillae[1]  # h_b = 0.5 drives omega = -1 on site 0
    down_pos = by_label["site0/conf(1,)/down"]
    assert down_pos.rate_fn(t) == pytest.approx(2 * anc_15.g**2 * anc_15.rho_gg * t)
    down_neg = by_label["site0/conf(-1,)/down"]
    assert down_neg.rate_fn(t) == pytest.approx(2 * anc_05.g**2 * anc_05.rho_ee * t)
