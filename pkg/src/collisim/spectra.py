"""Finite-collision bath correlation spectra and dissipation rates.

During a collision window [t0, t0 + tau_c] the one-sided correlation
spectrum of a thermal two-level ancilla is, with local time t' = t - t0,

    Gamma(omega, t') = g^2 [ rho_ee * I(omega + 2 h_b, t')
                           + rho_gg * I(omega - 2 h_b, t') ],
    I(a, t') = integral_0^t' exp(i a s) ds = (exp(i a t') - 1) / (i a),

and zero outside the window.  At resonance (a -> 0) the corresponding
term grows linearly, I -> t'; that linear part drives thermalization
while the bounded oscillatory remainder averages out for slow
relaxation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonians import AncillaSpec

RESONANCE_TOL = 1e-9  # |omega -+ 2 h_b| below this selects the linear branch
SERIES_TOL = 1e-4  # phase-integral switches to its series expansion


@dataclass(frozen=True)
class SpectrumQuery:
    """One spectrum evaluation: transition frequency, global time, window."""

    omega: float
    t: float
    ancilla: AncillaSpec
    collision_start: float
    collision_end: float

    def validate(self) -> None:
        if not self.collision_end > self.collision_start:
            raise ValueError("collision window must have positive duration")
        self.ancilla.validate()


def phase_integral(a: float, t: float) -> complex:
    """integral_0^t exp(i a s) ds, stable through a = 0.

    For |a| < SERIES_TOL uses the series t * sum_n (i a t)^n / (n+1)!,
    avoiding the catastrophic cancellation of (exp(iat) - 1)/(ia).
    """
    if abs(a) < SERIES_TOL:
        x = 1j * a * t
        term = 1.0 + 0j
        total = 1.0 + 0j
        for n in range(1, 14):
            term *= x / (n + 1)
            total += term
            if abs(term) < 1e-18:
                break
        return t * total
    return (np.exp(1j * a * t) - 1.0) / (1j * a)


def gamma(q: SpectrumQuery) -> complex:
    """Windowed correlation spectrum Gamma(omega, t); 0 outside the window."""
    q.validate()
    if q.t < q.collision_start or q.t > q.collision_end:
        return 0.0 + 0.0j
    t_local = q.t - q.collision_start
    anc = q.ancilla
    val = anc.rho_ee * phase_integral(q.omega + 2.0 * anc.h_b, t_local)
    val += anc.rho_gg * phase_integral(q.omega - 2.0 * anc.h_b, t_local)
    return anc.g**2 * complex(val)


def re_gamma_rate(
    omega: float,
    t_local: float,
    ancilla: AncillaSpec,
    include_rotating: bool = False,
) -> float:
    """Real part of Gamma at local time t', with the secular split at resonance.

    On resonance (|omega -+ 2 h_b| <= RESONANCE_TOL) the linear term
    g^2 * rho * t' is returned; the bounded oscillatory correction
    (magnitude <= g^2/(4 h_b)) is added only when ``include_rotating``.
    Off resonance the full real part is returned.
    """
    anc = ancilla
    a_plus = omega + 2.0 * anc.h_b
    a_minus = omega - 2.0 * anc.h_b
    g2 = anc.g**2
    if abs(a_minus) <= RESONANCE_TOL:
        rate = g2 * anc.rho_gg * t_local
        if include_rotating:
            rate += g2 * anc.rho_ee * float(phase_integral(a_plus, t_local).real)
        return rate
    if abs(a_plus) <= RESONANCE_TOL:
        rate = g2 * anc.rho_ee * t_local
        if include_rotating:
            rate += g2 * anc.rho_gg * float(phase_integral(a_minus, t_local).real)
        return rate
    return g2 * float(
        anc.rho_ee * phase_integral(a_plus, t_local).real
        + anc.rho_gg * phase_integral(a_minus, t_local).real
    )


def detuned_rate(delta: float, t_local: float, pop: float, g: float) -> float:
    """Near-resonant dissipation rate pop * g^2 * sin(delta t)/delta.

    The delta -> 0 limit recovers the resonant linear growth pop * g^2 * t;
    since sin(delta t)/delta <= t for t >= 0, resonance maximizes the rate.
    """
    if t_local < 0:
        raise ValueError("t_local must be nonnegative")
    if abs(delta * t_local) < SERIES_TOL:
        # sin(x)/delta = t (1 - x^2/6 + x^4/120), x = delta t
        x2 = (delta * t_local) ** 2
        sinc = t_local * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0))
    else:
        sinc = math.sin(delta * t_local) / delta
    return pop * g**2 * sinc


def kms_ratio(h_s: float, ancilla: AncillaSpec) -> float:
    """Detailed-balance ratio Re Gamma(2 h_s)/Re Gamma(-2 h_s) at resonance.

    Assumes the caller has matched the ancilla to the transition
    (2 h_b = 2 h_s).  The linear branches then give exactly
    rho_gg/rho_ee = exp(2 beta h_s), independent of time within the
    window; returns +inf when the excited population underflows to 0.
    """
    anc = ancilla
    if abs(2.0 * anc.h_b - 2.0 * h_s) > RESONANCE_TOL:
        raise ValueError("kms_ratio assumes a resonant ancilla (2 h_b = 2 h_s)")
    if anc.rho_ee == 0.0:
        return math.inf
    return anc.rho_gg / anc.rho_ee
