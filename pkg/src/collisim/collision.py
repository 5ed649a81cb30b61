"""Exact repeated-interaction engine.

Each collision joins the system with fresh thermal ancillae, evolves the
joint state unitarily for tau_c under the full Hamiltonian, and traces
the ancillae out; they never interact again.  States are returned in the
interaction picture (the free system phase accumulated during the window
is undone), which makes a decoupled collision act as the identity and
puts the engine in the same frame as the master-equation engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg, states
from .hamiltonians import AncillaSpec, SIGMA_Z, collision_hamiltonian
from .states import thermal_state

JOINT_DIMENSION_CAP = 2**12

SEQUENTIAL = "sequential"
SIMULTANEOUS = "simultaneous"


@dataclass(frozen=True)
class CollisionSchedule:
    """Timing and ancilla content of a run.

    One round applies every ancilla once: one at a time in sequential
    mode (each for a full tau_c, so a round spans k*tau_p), all at once
    in simultaneous mode.  count is the number of rounds.
    """

    tau_p: float
    tau_c: float
    count: int
    mode: str
    ancillae: tuple

    def __post_init__(self):
        object.__setattr__(self, "ancillae", tuple(self.ancillae))
        if not (0 < self.tau_c <= self.tau_p):
            raise ValueError(f"need 0 < tau_c <= tau_p, got tau_c={self.tau_c}, tau_p={self.tau_p}")
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        if self.mode not in (SEQUENTIAL, SIMULTANEOUS):
            raise ValueError(f"mode must be '{SEQUENTIAL}' or '{SIMULTANEOUS}', got {self.mode!r}")
        if not self.ancillae:
            raise ValueError("schedule needs at least one ancilla")
        for anc in self.ancillae:
            anc.validate()

    @property
    def collisions_per_round(self) -> int:
        return len(self.ancillae) if self.mode == SEQUENTIAL else 1

    def windows(self):
        """Yield (start, end, ancillae) for every collision in order."""
        per_round = self.collisions_per_round
        for r in range(self.count):
            for j in range(per_round):
                m = r * per_round + j
                start = m * self.tau_p
                active = (self.ancillae[j],) if self.mode == SEQUENTIAL else self.ancillae
                yield start, start + self.tau_c, active


@dataclass
class Trajectory:
    """Sampled time series common to both engines.

    populations[i] is the diagonal of the i-th state in the reporting
    basis (computational unless an explicit eigenbasis was supplied).
    """

    times: np.ndarray
    fidelity: np.ndarray
    populations: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    states: list | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.fidelity = np.asarray(self.fidelity, dtype=float)
        self.populations = np.asarray(self.populations, dtype=float)
        self.trace = np.asarray(self.trace, dtype=float)
        self.purity = np.asarray(self.purity, dtype=float)
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        if np.any(np.abs(self.trace - 1.0) > 1e-10):
            raise ValueError("trajectory contains a state with trace off unity")

    def __len__(self) -> int:
        return len(self.times)


class TrajectoryBuilder:
    """Accumulates samples; fidelity/populations in a fixed reporting basis."""

    def __init__(
        self,
        target: np.ndarray | None,
        basis: np.ndarray | None,
        keep_states: bool = False,
    ):
        self.target = target
        self.basis = basis
        self._rows: list = []
        self._states: list | None = [] if keep_states else None

    def add(self, t: float, rho: np.ndarray) -> None:
        fid = states.fidelity(rho, self.target) if self.target is not None else math.nan
        self._rows.append(
            (
                t,
                fid,
                states.populations(rho, self.basis),
                float(np.real(np.trace(rho))),
                states.purity(rho),
            )
        )
        if self._states is not None:
            self._states.append(rho.copy())

    def build(self) -> Trajectory:
        times, fid, pops, tr, pur = zip(*self._rows)
        return Trajectory(
            times=np.array(times),
            fidelity=np.array(fid),
            populations=np.vstack(pops),
            trace=np.array(tr),
            purity=np.array(pur),
            states=self._states,
        )


@dataclass
class _JointPieces:
    propagator: np.ndarray
    ancilla_state: np.ndarray
    d_sys: int
    d_anc: int
    free_undo: np.ndarray


def _prepare(h_sys: np.ndarray, active: Sequence[AncillaSpec], tau_c: float) -> _JointPieces:
    d_sys = h_sys.shape[0]
    d_anc = 2 ** len(active)
    joint_dim = d_sys * d_anc
    if joint_dim > JOINT_DIMENSION_CAP:
        raise ValueError(
            f"joint dimension {joint_dim} exceeds the cap {JOINT_DIMENSION_CAP}; "
            f"reduce the number of simultaneous ancillae"
        )
    h_joint = collision_hamiltonian(h_sys, active)
    rho_anc = np.array([[1.0 + 0j]])
    for anc in active:
        rho_anc = np.kron(rho_anc, thermal_state(anc.h_b * SIGMA_Z, anc.temperature_mk))
    return _JointPieces(
        propagator=linalg.propagator(h_joint, tau_c),
        ancilla_state=rho_anc,
        d_sys=d_sys,
        d_anc=d_anc,
        free_undo=linalg.dagger(linalg.propagator(h_sys, tau_c)),
    )


def _apply(rho_s: np.ndarray, pieces: _JointPieces, interaction_picture: bool) -> np.ndarray:
    joint = pieces.propagator @ np.kron(rho_s, pieces.ancilla_state) @ linalg.dagger(pieces.propagator)
    reduced = linalg.partial_trace(joint, [pieces.d_sys, pieces.d_anc], keep={0})
    if interaction_picture:
        reduced = pieces.free_undo @ reduced @ linalg.dagger(pieces.free_undo)
    # guard against arithmetic drift; the map is exactly trace preserving
    return (reduced + linalg.dagger(reduced)) / 2.0


def collide(
    rho_s,
    active: Sequence[AncillaSpec],
    tau_c: float,
    h_sys,
    interaction_picture: bool = True,
) -> np.ndarray:
    """One collision: join with fresh thermal ancillae, evolve tau_c, trace out."""
    rho_s = states.validate_density_matrix(rho_s)
    h_sys = linalg.require_hermitian(h_sys, tol=1e-12)
    if not active:
        raise ValueError("need at least one active ancilla")
    if tau_c <= 0:
        raise ValueError("tau_c must be positive")
    out = _apply(rho_s, _prepare(h_sys, active, tau_c), interaction_picture)
    return states.validate_density_matrix(out)


def run(
    rho0,
    schedule: CollisionSchedule,
    h_sys,
    target,
    basis: np.ndarray | None = None,
    keep_states: bool = False,
) -> Trajectory:
    """Run a full schedule, sampling after every collision.

    The initial state is sample 0.  Sequential mode records one sample
    per individual collision; simultaneous mode one per round.
    """
    rho = states.validate_density_matrix(rho0)
    h_sys = linalg.require_hermitian(h_sys, tol=1e-12)
    builder = TrajectoryBuilder(target, basis, keep_states=keep_states)
    builder.add(0.0, rho)

    cache: dict = {}
    for start, end, active in schedule.windows():
        key = tuple(id(a) for a in active)
        if key not in cache:
            cache[key] = _prepare(h_sys, active, schedule.tau_c)
        rho = _apply(rho, cache[key], interaction_picture=True)
        builder.add(end, rho)
    return builder.build()
