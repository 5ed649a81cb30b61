"""Time-dependent Lindblad master equations and a fixed-step RK4 integrator.

The equations are interaction-picture: there is no -i[H_S, rho] term, and
the dissipation rates are windowed, growing linearly in local time during
each collision and vanishing between collisions.  The dissipator
coefficient for a transition of frequency omega is 2 * Re Gamma(omega, t)
(the full one-sided spectrum plus its conjugate), which is what matches
the exact repeated-interaction engine order by order in g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg, states
from .collision import SEQUENTIAL, CollisionSchedule, Trajectory, TrajectoryBuilder
from .hamiltonians import IsingChain, ising_transition_frequencies
from .spectra import re_gamma_rate

SECULAR_MATCH_TOL = 1e-6  # |2 h_b - |omega|| tolerance when binding ancillae
DEFAULT_STEPS_PER_WINDOW = 200
TRACE_DRIFT_LIMIT = 1e-8
NEGATIVITY_LIMIT = 1e-8


class NumericalValidationError(RuntimeError):
    """Raised when an integrated state drifts outside physical bounds."""


@dataclass(frozen=True)
class JumpTerm:
    """A jump operator together with its (windowed) time-dependent rate."""

    operator: np.ndarray
    rate_fn: Callable[[float], float]
    label: str = ""


def dissipator(rho, o) -> np.ndarray:
    """D(rho, o) = o rho o^dag - (o^dag o rho + rho o^dag o)/2."""
    rho = linalg.as_operator(rho)
    o = linalg.as_operator(o)
    if rho.shape != o.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {o.shape}")
    od = linalg.dagger(o)
    odo = od @ o
    return o @ rho @ od - 0.5 * (odo @ rho + rho @ odo)


def _window_rate(
    schedule: CollisionSchedule,
    omega: float,
    t: float,
    ancilla_filter: Callable | None = None,
    include_rotating: bool = False,
) -> float:
    """Sum 2*Re Gamma(omega, t) over the collision windows active at t."""
    total = 0.0
    for start, end, active in schedule.windows():
        if t < start or t > end:
            continue
        for anc in active:
            if ancilla_filter is not None and not ancilla_filter(anc):
                continue
            total += 2.0 * re_gamma_rate(omega, t - start, anc, include_rotating)
    return total


def tls_rhs(rho, t: float, schedule: CollisionSchedule, h_s: float) -> np.ndarray:
    """Master-equation right-hand side for a driven two-level system.

    Emission at +2 h_s with sigma_minus, absorption at -2 h_s with
    sigma_plus; every ancilla whose window covers t contributes.
    """
    from .hamiltonians import SIGMA_MINUS, SIGMA_PLUS

    rate_down = _window_rate(schedule, 2.0 * h_s, t)
    rate_up = _window_rate(schedule, -2.0 * h_s, t)
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    if rate_down != 0.0:
        out += rate_down * dissipator(rho, SIGMA_MINUS)
    if rate_up != 0.0:
        out += rate_up * dissipator(rho, SIGMA_PLUS)
    return out


def ising_flip_operator(spec: IsingChain, site: int, neighbour_conf: tuple) -> np.ndarray:
    """sigma_minus on ``site`` restricted to a fixed neighbour configuration.

    The operator is |down><up| at the site, tensored with projectors onto
    the given +-1 spin values of the existing neighbours and identity
    elsewhere.
    """
    from .hamiltonians import IDENTITY_2, SIGMA_MINUS

    n = spec.n_sites
    neighbours = [j for j in (site - 1, site + 1) if 0 <= j < n]
    if len(neighbour_conf) != len(neighbours):
        raise ValueError(
            f"site {site} has {len(neighbours)} neighbours, got configuration {neighbour_conf}"
        )
    proj_up = np.diag([1.0 + 0j, 0.0])
    proj_down = np.diag([0.0, 1.0 + 0j])
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        if q == site:
            block = SIGMA_MINUS
        elif q in neighbours:
            s = neighbour_conf[neighbours.index(q)]
            block = proj_up if s == 1 else proj_down
        else:
            block = IDENTITY_2
        out = np.kron(out, block)
    return out


def ising_jump_operators(spec: IsingChain) -> list:
    """All (site, neighbour_conf, omega, sigma_minus-type operator) tuples.

    These are the generators of the chain's thermalizing dynamics; the
    adjoint of each entry is the matching absorption operator at -omega.
    """
    spec.validate()
    out = []
    for site in range(spec.n_sites):
        for conf, omega in ising_transition_frequencies(spec, site).items():
            out.append((site, conf, omega, ising_flip_operator(spec, site, conf)))
    return out


def match_ancillae_to_transitions(
    spec: IsingChain,
    schedule: CollisionSchedule,
    secular_tol: float = SECULAR_MATCH_TOL,
) -> list:
    """Bind each schedule ancilla to the transitions it is resonant with.

    An ancilla with half-gap h_b targeting site i drives every
    neighbour configuration of i whose |omega| equals 2 h_b within
    ``secular_tol``.  An ancilla matching nothing is a configuration
    error.
    """
    transitions = ising_jump_operators(spec)
    bound = []
    for anc in schedule.ancillae:
        matches = [
            (site, conf, omega, op)
            for site, conf, omega, op in transitions
            if site == anc.target_site and abs(2.0 * anc.h_b - abs(omega)) <= secular_tol
        ]
        if not matches:
            raise ValueError(
                f"ancilla with h_b={anc.h_b} on site {anc.target_site} matches no "
                f"transition frequency of the chain within {secular_tol}"
            )
        bound.append((anc, matches))
    return bound


def ising_rhs(rho, t: float, schedule: CollisionSchedule, spec: IsingChain) -> np.ndarray:
    """Master-equation right-hand side for the Ising chain.

    Every resonance-matched ancilla whose window covers t contributes a
    decay dissipator at +omega and the adjoint dissipator at -omega,
    with windowed linear rates related by the ancilla's thermal KMS
    ratio.
    """
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    bound = match_ancillae_to_transitions(spec, schedule)
    anc_to_matches = {id(anc): matches for anc, matches in bound}
    for start, end, active in schedule.windows():
        if t < start or t > end:
            continue
        for anc in active:
            for _site, _conf, omega, op in anc_to_matches[id(anc)]:
                rate_minus = 2.0 * re_gamma_rate(omega, t - start, anc)
                rate_plus = 2.0 * re_gamma_rate(-omega, t - start, anc)
                if rate_minus != 0.0:
                    out += rate_minus * dissipator(rho, op)
                if rate_plus != 0.0:
                    out += rate_plus * dissipator(rho, linalg.dagger(op))
    return out


def dissipator_superoperator(o: np.ndarray) -> np.ndarray:
    """Matrix of rho -> D(rho, o) acting on row-major vec(rho)."""
    o = linalg.as_operator(o)
    n = o.shape[0]
    eye = np.eye(n)
    odo = linalg.dagger(o) @ o
    return (
        np.kron(o, o.conj())
        - 0.5 * np.kron(odo, eye)
        - 0.5 * np.kron(eye, odo.T)
    )


def jump_terms_rhs(jumps: Sequence[JumpTerm]) -> Callable:
    """rhs(t, rho) = sum_k rate_k(t) D(rho, L_k) for a fixed jump list.

    Each dissipator is precomputed as a superoperator, so one stage
    evaluation costs the rate lookups plus a single matrix-vector
    product.
    """
    supers = [dissipator_superoperator(j.operator) for j in jumps]
    n = linalg.as_operator(jumps[0].operator).shape[0]

    def rhs(t: float, rho: np.ndarray) -> np.ndarray:
        v = rho.reshape(-1)
        out = np.zeros_like(v)
        for j, s in zip(jumps, supers):
            rate = j.rate_fn(t)
            if rate != 0.0:
                out += rate * (s @ v)
        return out.reshape(n, n)

    return rhs


def windowed_linear_rate(
    schedule: CollisionSchedule,
    ancilla_pop: str,
    ancilla_match: Callable,
) -> Callable[[float], float]:
    """Rate 2 g^2 rho_pop t' inside the matching windows, 0 outside.

    Windows are treated as half-open [start, start + tau_c): with
    back-to-back collisions (tau_p = tau_c) a shared boundary instant
    belongs to the *starting* window, so window-by-window integration
    never double counts.  Lookup is O(1) in the schedule length.
    """
    if ancilla_pop not in ("rho_gg", "rho_ee"):
        raise ValueError("ancilla_pop must be 'rho_gg' or 'rho_ee'")
    tau_p, tau_c = schedule.tau_p, schedule.tau_c
    per_round = schedule.collisions_per_round
    n_windows = schedule.count * per_round
    coeffs = []
    for j in range(per_round):
        if schedule.mode == SEQUENTIAL:
            active = (schedule.ancillae[j],)
        else:
            active = schedule.ancillae
        coeffs.append(
            sum(
                2.0 * anc.g**2 * getattr(anc, ancilla_pop)
                for anc in active
                if ancilla_match(anc)
            )
        )

    def rate(t: float) -> float:
        if t < 0.0:
            return 0.0
        m = int(t // tau_p)
        if m >= n_windows:
            return 0.0
        local = t - m * tau_p
        if local >= tau_c:
            return 0.0
        return coeffs[m % per_round] * local

    return rate


def tls_jump_terms(schedule: CollisionSchedule, h_s: float) -> list:
    """Windowed jump terms for the two-level master equation.

    Assumes a resonance-matched schedule (2 h_b = 2 h_s for every
    ancilla); rates are the secular linear branches.
    """
    from .hamiltonians import SIGMA_MINUS, SIGMA_PLUS

    for anc in schedule.ancillae:
        if abs(2.0 * anc.h_b - 2.0 * h_s) > SECULAR_MATCH_TOL:
            raise ValueError(
                f"ancilla h_b={anc.h_b} is detuned from the transition 2 h_s = {2 * h_s}; "
                f"use tls_rhs for detuned rates"
            )
    everyone = lambda anc: True
    return [
        JumpTerm(SIGMA_MINUS, windowed_linear_rate(schedule, "rho_gg", everyone), "decay"),
        JumpTerm(SIGMA_PLUS, windowed_linear_rate(schedule, "rho_ee", everyone), "excite"),
    ]


def ising_jump_terms(
    spec: IsingChain,
    schedule: CollisionSchedule,
    secular_tol: float = SECULAR_MATCH_TOL,
) -> list:
    """Windowed jump terms for the Ising chain master equation."""
    terms = []
    for anc, matches in match_ancillae_to_transitions(spec, schedule, secular_tol):
        only_this = lambda a, _anc=anc: a is _anc
        for site, conf, omega, op in matches:
            pop_minus = "rho_gg" if omega >= 0 else "rho_ee"
            pop_plus = "rho_ee" if omega >= 0 else "rho_gg"
            tag = f"site{site}/conf{conf}"
            terms.append(
                JumpTerm(op, windowed_linear_rate(schedule, pop_minus, only_this), tag + "/down")
            )
            terms.append(
                JumpTerm(
                    linalg.dagger(op),
                    windowed_linear_rate(schedule, pop_plus, only_this),
                    tag + "/up",
                )
            )
    return terms


def rk4_step(rhs: Callable, t: float, rho: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, rho)
    k2 = rhs(t + dt / 2.0, rho + dt / 2.0 * k1)
    k3 = rhs(t + dt / 2.0, rho + dt / 2.0 * k2)
    k4 = rhs(t + dt, rho + dt * k3)
    return rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _validate_integrated(rho: np.ndarray, t: float) -> np.ndarray:
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > TRACE_DRIFT_LIMIT:
        raise NumericalValidationError(
            f"trace drifted to {tr} at t={t} (|drift| > {TRACE_DRIFT_LIMIT})"
        )
    rho = rho / tr
    w = np.linalg.eigvalsh((rho + linalg.dagger(rho)) / 2.0)
    if w[0] < -NEGATIVITY_LIMIT:
        raise NumericalValidationError(
            f"state developed negative eigenvalue {w[0]:.3e} at t={t}"
        )
    return rho


def integrate(
    rhs: Callable,
    rho0,
    t_end: float,
    dt: float,
    windows: Sequence[tuple] | None = None,
    target: np.ndarray | None = None,
    basis: np.ndarray | None = None,
    sample_stride: int | None = None,
    keep_states: bool = False,
) -> Trajectory:
    """Fixed-step RK4 integration of drho/dt = rhs(t, rho) up to t_end.

    When ``windows`` (a sorted list of (start, end) collision intervals)
    is given, integration runs window by window and the state is held
    constant across the gaps, where the windowed rates vanish
    identically.  Samples are recorded at t=0 and at every window end
    (plus every ``sample_stride`` steps inside windows when set); each
    sampled state is re-validated and its trace renormalized.
    """
    rho = states.validate_density_matrix(rho0).astype(complex)
    if dt <= 0:
        raise ValueError("dt must be positive")
    builder = TrajectoryBuilder(target, basis, keep_states=keep_states)
    builder.add(0.0, rho)

    if windows is None:
        windows = [(0.0, float(t_end))]
    windows = sorted((float(a), float(b)) for a, b in windows)
    for start, end in windows:
        if end > t_end + 1e-12:
            break
        if not end > start:
            raise ValueError(f"bad window ({start}, {end})")
        span = end - start
        if dt > span / 50.0 + 1e-15:
            raise ValueError(f"dt={dt} too coarse for a window of {span} ns (need <= span/50)")
        n_steps = max(1, int(math.ceil(span / dt - 1e-9)))
        h = span / n_steps
        # final stage times are nudged inside the half-open window so a
        # back-to-back next window cannot shadow the end-of-window rate
        clamp = end - 1e-9 * h
        for step in range(n_steps):
            t0 = start + step * h
            k1 = rhs(t0, rho)
            k2 = rhs(t0 + h / 2.0, rho + h / 2.0 * k1)
            k3 = rhs(t0 + h / 2.0, rho + h / 2.0 * k2)
            k4 = rhs(min(t0 + h, clamp), rho + h * k3)
            rho = rho + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if sample_stride and (step + 1) % sample_stride == 0 and step + 1 < n_steps:
                t = start + (step + 1) * h
                rho = _validate_integrated(rho, t)
                builder.add(t, rho)
        rho = _validate_integrated(rho, end)
        builder.add(end, rho)
    return builder.build()
