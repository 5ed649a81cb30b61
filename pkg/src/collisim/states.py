"""Density matrices, Gibbs states and state-comparison metrics.

Fidelity here is the root (Uhlmann) form F(a, b) = Tr sqrt(sqrt(a) b
sqrt(a)); for a pure state it reduces to sqrt(<psi|b|psi>).  All
quantitative thresholds in the test suite are pinned under this
convention.
"""

from __future__ import annotations

import math

import numpy as np

from . import linalg
from .constants import KB_OVER_HBAR_RAD_PER_NS_MK

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
NEGATIVITY_TOL = 1e-10


def inverse_temperature(temperature_mk: float) -> float:
    """Inverse temperature beta in ns/rad for a temperature in mK."""
    if not temperature_mk > 0:
        raise ValueError(f"temperature must be positive, got {temperature_mk} mK")
    return 1.0 / (KB_OVER_HBAR_RAD_PER_NS_MK * temperature_mk)


def validate_density_matrix(
    rho,
    herm_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    negativity_tol: float = NEGATIVITY_TOL,
) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the validated array."""
    a = linalg.as_operator(rho)
    defect = linalg.hermiticity_defect(a)
    if defect > herm_tol:
        raise ValueError(f"density matrix not Hermitian: defect {defect:.3e}")
    tr = np.trace(a)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1 by {abs(tr - 1.0):.3e}")
    w = np.linalg.eigvalsh((a + linalg.dagger(a)) / 2.0)
    if w[0] < -negativity_tol:
        raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    return a


def thermal_state(h, temperature_mk: float) -> np.ndarray:
    """Gibbs state exp(-beta h)/Z at the given temperature.

    The spectrum is shifted by its minimum before exponentiation, so the
    construction stays finite for arbitrarily large beta*h.
    """
    beta = inverse_temperature(temperature_mk)
    dec = linalg.eig_hermitian(h)
    weights = np.exp(-beta * (dec.eigenvalues - dec.eigenvalues.min()))
    weights /= weights.sum()
    u = dec.eigenvectors
    return (u * weights) @ linalg.dagger(u)


def maximally_mixed(dim: int) -> np.ndarray:
    """Infinite-temperature state 1/d."""
    return np.eye(dim, dtype=complex) / dim


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Matrix square root of a Hermitian PSD matrix, clamping round-off negatives."""
    dec = linalg.eig_hermitian(m)
    w = np.clip(dec.eigenvalues, 0.0, None)
    u = dec.eigenvectors
    return (u * np.sqrt(w)) @ linalg.dagger(u)


def fidelity(a, b) -> float:
    """Root Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)), in [0, 1]."""
    a = linalg.as_operator(a)
    b = linalg.as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    sa = psd_sqrt(a)
    w = np.linalg.eigvalsh(sa @ b @ sa)
    return float(np.sqrt(np.clip(w, 0.0, None)).sum())


def trace_distance(a, b) -> float:
    """Half the trace norm of a - b."""
    a = linalg.as_operator(a)
    b = linalg.as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    w = np.linalg.eigvalsh(a - b)
    return float(0.5 * np.abs(w).sum())


def purity(rho) -> float:
    a = linalg.as_operator(rho)
    return float(np.real(np.trace(a @ a)))


def populations(rho, basis: np.ndarray | None = None) -> np.ndarray:
    """Diagonal of rho, optionally in the basis given by the columns of ``basis``."""
    a = linalg.as_operator(rho)
    if basis is not None:
        a = linalg.dagger(basis) @ a @ basis
    return np.real(np.diag(a)).copy()


def basis_state(bits: str) -> np.ndarray:
    """Projector onto a computational basis state, e.g. '01' -> |01><01|.

    '0' is spin up (the +1 sigma_z eigenstate), site 0 leftmost.
    """
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"bitstring must be nonempty over {{0,1}}, got {bits!r}")
    dim = 2 ** len(bits)
    idx = int(bits, 2)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


def gibbs_population_ratio(h_b: float, temperature_mk: float) -> float:
    """Two-level ground/excited population ratio exp(2 beta h_b)."""
    beta = inverse_temperature(temperature_mk)
    x = 2.0 * beta * h_b
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf
