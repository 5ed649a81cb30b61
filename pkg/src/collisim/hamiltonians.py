"""Model Hamiltonians: single spin, longitudinal Ising chain, anisotropic XY.

Spin convention: |0> = |up> is the +1 eigenstate of sigma_z, i.e. the
excited state for a positive field.  Chains are laid out with site 0 as
the slowest Kronecker index.  All couplings are angular frequencies in
rad/ns (see :mod:`collisim.constants`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import linalg
from .constants import KB_OVER_HBAR_RAD_PER_NS_MK

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |down><up|
SIGMA_PLUS = SIGMA_MINUS.conj().T
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class TLS:
    """Two-level system H = h_s * sigma_z."""

    h_s: float

    @property
    def n_sites(self) -> int:
        return 1

    def validate(self) -> None:
        if not math.isfinite(self.h_s):
            raise ValueError("h_s must be finite")


@dataclass(frozen=True)
class IsingChain:
    """Longitudinal-field Ising chain: sum_i h_i sz_i + sum_i J_i sz_i sz_{i+1}."""

    h: tuple
    J: tuple

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        object.__setattr__(self, "J", tuple(float(x) for x in self.J))

    @property
    def n_sites(self) -> int:
        return len(self.h)

    def validate(self) -> None:
        if len(self.h) < 1:
            raise ValueError("IsingChain needs at least one site")
        if len(self.J) != len(self.h) - 1:
            raise ValueError(
                f"need {len(self.h) - 1} nearest-neighbour couplings, got {len(self.J)}"
            )
        if not all(math.isfinite(x) for x in self.h + self.J):
            raise ValueError("all couplings must be finite")


@dataclass(frozen=True)
class XYDM:
    """Two-spin anisotropic XY model with a z-axis antisymmetric exchange term.

    H = J (sx1 sx2 - sy1 sy2 + sx1 sy2 - sy1 sx2).  The spectrum is
    {+2J, -2J}, each doubly degenerate; the only nonzero transition
    frequency is 4J.
    """

    J: float

    @property
    def n_sites(self) -> int:
        return 2

    def validate(self) -> None:
        if not math.isfinite(self.J):
            raise ValueError("J must be finite")


HamiltonianSpec = Union[TLS, IsingChain, XYDM]


@dataclass(frozen=True)
class AncillaSpec:
    """A fresh thermal two-level ancilla coupled to one system site.

    h_b is the ancilla half-gap (its Hamiltonian is h_b * sigma_z), so the
    ancilla resonates with a system transition of frequency 2*h_b.
    """

    h_b: float
    temperature_mk: float
    g: float
    target_site: int = 0

    def validate(self, n_sites: int | None = None) -> None:
        if self.h_b <= 0:
            raise ValueError("ancilla half-gap h_b must be positive")
        if self.g < 0:
            raise ValueError("coupling strength g must be nonnegative")
        if self.temperature_mk <= 0:
            raise ValueError("ancilla temperature must be positive")
        if self.target_site < 0:
            raise ValueError("target_site must be nonnegative")
        if n_sites is not None and self.target_site >= n_sites:
            raise ValueError(f"target_site {self.target_site} out of range for {n_sites} sites")

    @property
    def beta(self) -> float:
        """Inverse temperature in ns/rad."""
        return 1.0 / (KB_OVER_HBAR_RAD_PER_NS_MK * self.temperature_mk)

    @property
    def rho_gg(self) -> float:
        """Thermal ground (spin-down) population, overflow safe."""
        x = 2.0 * self.beta * self.h_b
        if x >= 0:
            return 1.0 / (1.0 + math.exp(-x))
        return math.exp(x) / (1.0 + math.exp(x))

    @property
    def rho_ee(self) -> float:
        """Thermal excited (spin-up) population."""
        return 1.0 - self.rho_gg


def site_operator(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-qubit operator at ``site`` in an n-qubit register."""
    if not 0 <= site < n_sites:
        raise ValueError(f"site {site} out of range for {n_sites} sites")
    out = np.array([[1.0 + 0j]])
    for i in range(n_sites):
        out = np.kron(out, op if i == site else IDENTITY_2)
    return out


def spin_values(index: int, n_sites: int) -> tuple:
    """sigma_z eigenvalues (+1 for up) of a computational basis state."""
    return tuple(1 - 2 * ((index >> (n_sites - 1 - i)) & 1) for i in range(n_sites))


def build(spec: HamiltonianSpec) -> np.ndarray:
    """Construct the 2^N x 2^N Hamiltonian of a model spec."""
    spec.validate()
    if isinstance(spec, TLS):
        return spec.h_s * SIGMA_Z
    if isinstance(spec, IsingChain):
        n = spec.n_sites
        diag = np.zeros(2**n)
        for idx in range(2**n):
            s = spin_values(idx, n)
            diag[idx] = sum(spec.h[i] * s[i] for i in range(n)) + sum(
                spec.J[i] * s[i] * s[i + 1] for i in range(n - 1)
            )
        return np.diag(diag).astype(complex)
    if isinstance(spec, XYDM):
        sx1, sx2 = site_operator(SIGMA_X, 0, 2), site_operator(SIGMA_X, 1, 2)
        sy1, sy2 = site_operator(SIGMA_Y, 0, 2), site_operator(SIGMA_Y, 1, 2)
        return spec.J * (sx1 @ sx2 - sy1 @ sy2 + sx1 @ sy2 - sy1 @ sx2)
    raise TypeError(f"unknown Hamiltonian spec {type(spec).__name__}")


def ising_transition_frequencies(spec: IsingChain, site: int) -> dict:
    """Frequencies released by flipping ``site`` down, keyed by neighbour spins.

    Keys are tuples of the sigma_z values (+1/-1) of the existing
    neighbours, left neighbour first; edge sites therefore get 2 entries
    and bulk sites 4.  The value for configuration s is
    2*(J_left*s_left + h_site + J_right*s_right) with absent-neighbour
    terms omitted.
    """
    spec.validate()
    n = spec.n_sites
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} sites")
    neighbours = [j for j in (site - 1, site + 1) if 0 <= j < n]
    out = {}
    for conf in itertools.product((1, -1), repeat=len(neighbours)):
        omega = 2.0 * spec.h[site]
        for j, s in zip(neighbours, conf):
            coupling = spec.J[min(site, j)]
            omega += 2.0 * coupling * s
        out[conf] = omega
    return out


def collision_hamiltonian(h_sys: np.ndarray, active: Sequence[AncillaSpec]) -> np.ndarray:
    """Joint Hamiltonian of the system and a set of simultaneously coupled ancillae.

    Returns H_S (x) 1 + sum_n h_b sigma_z on ancilla n + sum_n g_n
    sigma_x(target site) (x) sigma_x(ancilla n) on the space
    system (x) ancilla_1 (x) ... (x) ancilla_m.
    """
    h_sys = linalg.require_hermitian(h_sys, tol=1e-12)
    if not active:
        raise ValueError("need at least one active ancilla")
    d_sys = h_sys.shape[0]
    n_sys = int(round(math.log2(d_sys)))
    if 2**n_sys != d_sys:
        raise ValueError(f"system dimension {d_sys} is not a power of two")
    n_anc = len(active)
    d_anc = 2**n_anc
    h = np.kron(h_sys, np.eye(d_anc, dtype=complex))
    for k, anc in enumerate(active):
        anc.validate(n_sites=n_sys)
        h += np.kron(
            np.eye(d_sys, dtype=complex),
            site_operator(anc.h_b * SIGMA_Z, k, n_anc),
        )
        h += anc.g * np.kron(
            site_operator(SIGMA_X, anc.target_site, n_sys),
            site_operator(SIGMA_X, k, n_anc),
        )
    return h


def xydm_eigenbasis(J: float) -> tuple:
    """Closed-form eigenbasis of the anisotropic XY model, energies ascending.

    The two degenerate levels make the numerical eigenbasis arbitrary
    within each level; this fixed layout is what trajectory populations
    are reported in.  Returns (energies, U) with column order

        0: (|dd> - |uu>)/sqrt2   energy -2J
        1: (|du> - i|ud>)/sqrt2  energy -2J
        2: (|dd> + |uu>)/sqrt2   energy +2J
        3: (|du> + i|ud>)/sqrt2  energy +2J
    """
    s2 = 1.0 / math.sqrt(2.0)
    uu = np.array([1, 0, 0, 0], dtype=complex)
    ud = np.array([0, 1, 0, 0], dtype=complex)
    du = np.array([0, 0, 1, 0], dtype=complex)
    dd = np.array([0, 0, 0, 1], dtype=complex)
    u = np.stack(
        [(dd - uu) * s2, (du - 1j * ud) * s2, (dd + uu) * s2, (du + 1j * ud) * s2],
        axis=1,
    )
    energies = np.array([-2.0 * J, -2.0 * J, 2.0 * J, 2.0 * J])
    if J < 0:
        order = [2, 3, 0, 1]
        u = u[:, order]
        energies = energies[order]
    return energies, u
