import math

import numpy as np
import pytest

from collisim.hamiltonians import AncillaSpec
from collisim.spectra import (
    SpectrumQuery,
    detuned_rate,
    gamma,
    kms_ratio,
    phase_integral,
    re_gamma_rate,
)


def simpson_gamma(omega, t_local, anc, panels=2**15):
    """Composite-Simpson quadrature of the correlation integral."""
    s = np.linspace(0.0, t_local, 2 * panels + 1)
    integrand = anc.rho_ee * np.exp(1j * s * (omega + 2 * anc.h_b)) + anc.rho_gg * np.exp(
        1j * s * (omega - 2 * anc.h_b)
    )
    h = t_local / (2 * panels)
    weights = np.ones(len(s))
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return anc.g**2 * h / 3.0 * np.sum(weights * integrand)


def make_query(omega, t, anc, start=0.0, end=400.0):
    return SpectrumQuery(
        omega=omega, t=t, ancilla=anc, collision_start=start, collision_end=end
    )


ANC = AncillaSpec(h_b=1.0, temperature_mk=10.0, g=1e-3)


def test_gamma_outside_window_is_zero():
    assert gamma(make_query(2.0, -5.0, ANC)) == 0.0
    assert gamma(make_query(2.0, 401.0, ANC)) == 0.0


def test_gamma_zero_at_window_start():
    assert gamma(make_query(2.0 * ANC.h_b, 0.0, ANC)) == 0.0


def test_gamma_resonant_linear_growth():
    # real part = g^2 rho_gg t' plus the bounded oscillatory correction
    t = 150.0
    val = gamma(make_query(2.0 * ANC.h_b, t, ANC))
    linear = ANC.g**2 * ANC.rho_gg * t
    correction = abs(val.real - linear)
    assert correction <= ANC.g**2 / (4.0 * ANC.h_b) + 1e-15
    assert val.real > 0


def test_gamma_matches_quadrature(rng):
    # 100 random queries across resonant and detuned regimes
    for i in range(100):
        h_b = float(rng.uniform(0.2, 3.0))
        anc = AncillaSpec(h_b=h_b, temperature_mk=float(rng.uniform(3.0, 300.0)), g=1e-3)
        if i % 5 == 0:
            omega = 2.0 * h_b  # exactly resonant
        elif i % 5 == 1:
            omega = -2.0 * h_b
        else:
            omega = float(rng.uniform(-6.0, 6.0))
        t_local = float(rng.uniform(1.0, 400.0))
        got = gamma(make_query(omega, t_local, anc, start=0.0, end=400.0))
        want = simpson_gamma(omega, t_local, anc)
        assert abs(got - want) < 1e-8


def test_gamma_windowed_offset():
    start = 1000.0
    q = make_query(2.0, start + 37.0, ANC, start=start, end=start + 400.0)
    q0 = make_query(2.0, 37.0, ANC, start=0.0, end=400.0)
    assert gamma(q) == pytest.approx(gamma(q0), abs=1e-18)


def test_gamma_continuity_across_resonance_classification():
    # off-resonant branch at detuning 1e-6 converges to the resonant branch
    t = 300.0
    eps = 1e-6
    res = gamma(make_query(2.0 * ANC.h_b, t, ANC))
    for sign in (1.0, -1.0):
        near = gamma(make_query(2.0 * ANC.h_b + sign * eps, t, ANC))
        assert abs(res - near) < 1e-4


def test_phase_integral_series_matches_closed_form():
    # straddle the series threshold
    for a in (5e-5, 2e-4, 1e-3):
        t = 400.0
        series_val = phase_integral(a / 10, t)
        exact_small = (np.exp(1j * (a / 10) * t) - 1.0) / (1j * (a / 10))
        assert abs(series_val - exact_small) < 1e-9 * t
    assert phase_integral(0.0, 123.0) == pytest.approx(123.0)


def test_re_gamma_rate_resonant_branches():
    t = 42.0
    assert re_gamma_rate(2.0 * ANC.h_b, t, ANC) == pytest.approx(ANC.g**2 * ANC.rho_gg * t)
    assert re_gamma_rate(-2.0 * ANC.h_b, t, ANC) == pytest.approx(ANC.g**2 * ANC.rho_ee * t)
    with_rot = re_gamma_rate(2.0 * ANC.h_b, t, ANC, include_rotating=True)
    assert abs(with_rot - ANC.g**2 * ANC.rho_gg * t) <= ANC.g**2 / (4 * ANC.h_b)


def test_re_gamma_rate_monotone_linear_part():
    ts = np.linspace(0.0, 400.0, 50)
    rates = [re_gamma_rate(2.0 * ANC.h_b, t, ANC) for t in ts]
    assert all(b >= a for a, b in zip(rates, rates[1:]))
    assert rates[0] == 0.0


def test_detuned_rate_resonant_limit():
    t, pop, g = 123.0, 0.8, 1e-3
    assert detuned_rate(0.0, t, pop, g) == pytest.approx(pop * g**2 * t)
    assert detuned_rate(1e-9, t, pop, g) == pytest.approx(pop * g**2 * t, rel=1e-9)


def test_detuned_rate_bounded_by_resonance(rng):
    # brute-force sampling of sin(delta t)/delta <= t
    for _ in range(200):
        delta = float(rng.uniform(-5.0, 5.0))
        t = float(rng.uniform(0.0, 500.0))
        assert detuned_rate(delta, t, 1.0, 1.0) <= t + 1e-12


def test_detuned_rate_full_period_integrates_to_zero():
    tau_c = 400.0
    delta = 2.0 * math.pi / tau_c
    ts = np.linspace(0.0, tau_c, 100001)
    vals = np.array([detuned_rate(delta, t, 1.0, 1e-3) for t in ts])
    integral = np.trapezoid(vals, ts)
    peak = np.abs(vals).max() * tau_c
    assert abs(integral) < 1e-8 * peak


def test_kms_ratio_infinite_temperature_limit():
    hot = AncillaSpec(h_b=1.0, temperature_mk=1e12, g=1e-3)
    assert kms_ratio(1.0, hot) == pytest.approx(1.0, abs=1e-10)


def test_kms_ratio_value_at_10mk():
    # oracle: exp(2 beta h_s) with beta = 1/(0.13092 * 10)
    ratio = kms_ratio(1.0, ANC)
    assert ratio == pytest.approx(math.exp(2.0 / (0.13092 * 10.0)), rel=1e-4)
    assert ratio == pytest.approx(4.6073, abs=2e-4)


def test_kms_ratio_equals_population_ratio(rng):
    for _ in range(5):
        h_b = float(rng.uniform(0.1, 2.0))
        anc = AncillaSpec(h_b=h_b, temperature_mk=float(rng.uniform(2.0, 400.0)), g=1e-3)
        assert kms_ratio(h_b, anc) == pytest.approx(anc.rho_gg / anc.rho_ee, rel=1e-12)


def test_kms_ratio_cold_limit_sentinel():
    cold = AncillaSpec(h_b=100.0, temperature_mk=1e-3, g=1e-3)
    assert kms_ratio(100.0, cold) == math.inf


def test_kms_ratio_requires_resonance():
    with pytest.raises(ValueError, match="resonant"):
        kms_ratio(2.0, ANC)


def test_spectrum_query_validation():
    with pytest.raises(ValueError, match="positive duration"):
        SpectrumQuery(
            omega=1.0, t=0.0, ancilla=ANC, collision_start=10.0, collision_end=10.0
        ).validate()
