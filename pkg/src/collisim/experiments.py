"""Configuration-driven experiments: frequency sweep, two-spin panels,
uniqueness analysis and engine cross-validation.

Every runner takes an :class:`~collisim.config.ExperimentConfig`, returns
a result object carrying the raw numbers, and can render itself to the
fixed CSV schema (or, for the analyzer, an indented text report).
Identical configs produce byte-identical output.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import collision, lindblad, linalg, states, transitions
from .collision import SEQUENTIAL, CollisionSchedule, Trajectory
from .config import ConfigError, ExperimentConfig, parse_initial_descriptor
from .spectra import re_gamma_rate
from .hamiltonians import (
    SIGMA_X,
    AncillaSpec,
    IsingChain,
    TLS,
    XYDM,
    build,
    ising_transition_frequencies,
    site_operator,
    xydm_eigenbasis,
)

DEFAULT_STEPS_PER_WINDOW = lindblad.DEFAULT_STEPS_PER_WINDOW


def _fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass(frozen=True)
class ModelContext:
    """A built model plus the fixed basis trajectories are reported in."""

    spec: object
    h_sys: np.ndarray
    energies: np.ndarray
    basis: np.ndarray | None  # None -> computational basis
    basis_energies: np.ndarray  # energy of each reporting-basis column


def model_context(cfg: ExperimentConfig) -> ModelContext:
    if cfg.variant == "tls":
        spec = TLS(h_s=cfg.h_s)
        h = build(spec)
        diag = np.diag(h).real.copy()
        return ModelContext(spec, h, np.sort(diag), None, diag)
    if cfg.variant == "ising":
        spec = IsingChain(h=cfg.ising_h, J=cfg.ising_j)
        h = build(spec)
        diag = np.diag(h).real.copy()
        return ModelContext(spec, h, np.sort(diag), None, diag)
    if cfg.variant == "xydm":
        spec = XYDM(J=cfg.xy_j)
        h = build(spec)
        energies, u = xydm_eigenbasis(cfg.xy_j)
        return ModelContext(spec, h, energies, u, energies)
    raise ConfigError(f"unknown model variant {cfg.variant!r}")


def initial_state(descriptor: str, ctx: ModelContext) -> np.ndarray:
    """Materialize an initial-state descriptor in the model's space.

    'excited'/'ground' select the reporting-basis column of highest or
    lowest energy (the last or first column on degenerate ties, which
    for the XY model pins a definite vector of the analytic basis).
    """
    name, arg = parse_initial_descriptor(descriptor)
    dim = ctx.h_sys.shape[0]
    if name == "infinite-temperature":
        return states.maximally_mixed(dim)
    if name == "thermal":
        return states.thermal_state(ctx.h_sys, arg)
    if name == "basis":
        if 2 ** len(arg) != dim:
            raise ConfigError(
                f"basis descriptor {descriptor!r} has {len(arg)} bits but the model has "
                f"dimension {dim}"
            )
        return states.basis_state(arg)
    if name in ("excited", "ground"):
        cols = ctx.basis if ctx.basis is not None else np.eye(dim, dtype=complex)
        energies = ctx.basis_energies
        if name == "excited":
            idx = int(np.flatnonzero(energies == energies.max())[-1])
        else:
            idx = int(np.flatnonzero(energies == energies.min())[0])
        v = cols[:, idx]
        return np.outer(v, v.conj())
    raise ConfigError(f"unknown initial state descriptor {descriptor!r}")


# ---------------------------------------------------------------------------
# sweep


@dataclass
class SweepResult:
    h_b: np.ndarray
    fidelity: np.ndarray  # shape (points, count + 1); column n = after n collisions

    def to_csv(self) -> str:
        lines = ["h_b,n,fidelity"]
        for i, hb in enumerate(self.h_b):
            for n in range(self.fidelity.shape[1]):
                lines.append(f"{_fmt(hb)},{n},{_fmt(self.fidelity[i, n])}")
        return "\n".join(lines) + "\n"


def _sweep_column(h_sys, rho0, target, hb, cfg: ExperimentConfig) -> np.ndarray:
    anc = AncillaSpec(
        h_b=hb, temperature_mk=cfg.temperature_mk, g=cfg.g, target_site=0
    )
    schedule = CollisionSchedule(
        tau_p=cfg.tau_p_ns,
        tau_c=cfg.tau_c_ns,
        count=cfg.count,
        mode=SEQUENTIAL,
        ancillae=(anc,),
    )
    traj = collision.run(rho0, schedule, h_sys, target)
    return traj.fidelity


def run_sweep(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    """Fidelity toward the bath's Gibbs state over an ancilla-frequency grid.

    Each grid point runs ``count`` collisions of a fresh thermal ancilla
    with half-gap h_b against the two-level system; row n = 0 is the
    initial fidelity.
    """
    cfg.validate()
    if cfg.variant != "tls":
        raise ConfigError("the sweep experiment runs on the two-level model")
    ctx = model_context(cfg)
    target = states.thermal_state(ctx.h_sys, cfg.temperature_mk)
    rho0 = initial_state(cfg.initial_states[0], ctx)
    if cfg.points == 1:
        grid = np.array([cfg.h_b_min])
    else:
        grid = np.linspace(cfg.h_b_min, cfg.h_b_max, cfg.points)

    def column(hb: float) -> np.ndarray:
        return _sweep_column(ctx.h_sys, rho0, target, hb, cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(pool.map(column, grid))
    else:
        columns = [column(hb) for hb in grid]
    return SweepResult(h_b=grid, fidelity=np.vstack(columns))


# ---------------------------------------------------------------------------
# trajectory panels (ising2, xy)


@dataclass
class TrajectoryPanel:
    labels: list
    trajectories: list

    def to_csv(self) -> str:
        dim = self.trajectories[0].populations.shape[1]
        header = "t_ns,label,fidelity,trace,purity," + ",".join(f"p{k}" for k in range(dim))
        lines = [header]
        for label, traj in zip(self.labels, self.trajectories):
            for i in range(len(traj)):
                pops = ",".join(_fmt(p) for p in traj.populations[i])
                lines.append(
                    f"{_fmt(traj.times[i])},{label},{_fmt(traj.fidelity[i])},"
                    f"{_fmt(traj.trace[i])},{_fmt(traj.purity[i])},{pops}"
                )
        return "\n".join(lines) + "\n"

    def by_label(self, label: str) -> Trajectory:
        return self.trajectories[self.labels.index(label)]


def ising2_ancillae(cfg: ExperimentConfig, spec: IsingChain) -> tuple:
    """One ancilla per one-spin-flip transition, h_b = |omega|/2."""
    ancs = []
    for site in range(spec.n_sites):
        freqs = ising_transition_frequencies(spec, site)
        for conf in sorted(freqs, reverse=True):
            omega = freqs[conf]
            if omega == 0.0:
                raise ConfigError(
                    f"site {site} configuration {conf} has zero transition frequency; "
                    f"no ancilla can drive it"
                )
            ancs.append(
                AncillaSpec(
                    h_b=abs(omega) / 2.0,
                    temperature_mk=cfg.temperature_mk,
                    g=cfg.g,
                    target_site=site,
                )
            )
    return tuple(ancs)


def run_ising2(cfg: ExperimentConfig) -> TrajectoryPanel:
    """Two-spin chain driven by all four transition ancillae, both modes."""
    cfg.validate()
    if cfg.variant != "ising":
        raise ConfigError("ising2 requires the ising model variant")
    ctx = model_context(cfg)
    spec = ctx.spec
    target = states.thermal_state(ctx.h_sys, cfg.temperature_mk)
    rho0 = initial_state(cfg.initial_states[0], ctx)
    ancillae = ising2_ancillae(cfg, spec)
    labels, trajectories = [], []
    for mode in cfg.modes:
        schedule = CollisionSchedule(
            tau_p=cfg.tau_p_ns,
            tau_c=cfg.tau_c_ns,
            count=cfg.count,
            mode=mode,
            ancillae=ancillae,
        )
        labels.append(mode)
        trajectories.append(collision.run(rho0, schedule, ctx.h_sys, target))
    return TrajectoryPanel(labels=labels, trajectories=trajectories)


def xy_frequency_groups(cfg: ExperimentConfig):
    """Nonzero-frequency jump operators of the first-site coupling."""
    ctx = model_context(cfg)
    coupling = site_operator(SIGMA_X, 0, 2)
    groups = transitions.jump_set(ctx.h_sys, [coupling], include_zero_freq=False)
    lowering = [g for g in groups if g.omega > 0]
    raising = [g for g in groups if g.omega < 0]
    if len(lowering) != 1 or len(raising) != 1:
        raise ConfigError("expected exactly one +/- transition frequency pair")
    return ctx, lowering[0], raising[0]


def xy_sector_projectors(cfg: ExperimentConfig) -> list:
    """Projectors onto the two conserved transition sectors.

    The nonzero-frequency jump pairs each top-level basis vector with
    its image in the bottom level; with only those jumps acting, the
    population of each pair subspace is a constant of motion.
    """
    ctx, lower, _ = xy_frequency_groups(cfg)
    u = ctx.basis
    top = [k for k in range(4) if ctx.basis_energies[k] == ctx.basis_energies.max()]
    images = []
    for k in top:
        v = lower.operator @ u[:, k]
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ConfigError("top-level vector is annihilated by the lowering jump")
        images.append(v / norm)
    overlap = abs(np.vdot(images[0], images[1]))
    if overlap > 1e-10:
        raise ConfigError(f"sector images are not orthogonal (overlap {overlap:.2e})")
    out = []
    for k, v in zip(top, images):
        out.append(np.outer(u[:, k], u[:, k].conj()) + np.outer(v, v.conj()))
    return out


def sector_weight_difference(rho: np.ndarray, projectors) -> float:
    p0 = float(np.real(np.trace(projectors[0] @ rho)))
    p1 = float(np.real(np.trace(projectors[1] @ rho)))
    return p0 - p1


def _xy_schedule(cfg: ExperimentConfig, omega: float) -> CollisionSchedule:
    h_b = cfg.h_b if cfg.h_b is not None else abs(omega) / 2.0
    anc = AncillaSpec(h_b=h_b, temperature_mk=cfg.temperature_mk, g=cfg.g, target_site=0)
    return CollisionSchedule(
        tau_p=cfg.tau_p_ns,
        tau_c=cfg.tau_c_ns,
        count=cfg.count,
        mode=SEQUENTIAL,
        ancillae=(anc,),
    )


def xy_lindblad_trajectory(
    cfg: ExperimentConfig,
    rho0: np.ndarray,
    target: np.ndarray,
    keep_states: bool = False,
) -> Trajectory:
    """Master-equation evolution with the two nonzero-frequency jumps."""
    ctx, lower, raising = xy_frequency_groups(cfg)
    schedule = _xy_schedule(cfg, lower.omega)
    jumps = [
        lindblad.JumpTerm(
            lower.operator,
            lindblad.windowed_linear_rate(schedule, "rho_gg", lambda a: True),
            "lower",
        ),
        lindblad.JumpTerm(
            raising.operator,
            lindblad.windowed_linear_rate(schedule, "rho_ee", lambda a: True),
            "raise",
        ),
    ]
    rhs = lindblad.jump_terms_rhs(jumps)
    windows = [(start, end) for start, end, _ in schedule.windows()]
    t_end = windows[-1][1] if windows else 0.0
    return lindblad.integrate(
        rhs,
        rho0,
        t_end,
        dt=cfg.tau_c_ns / DEFAULT_STEPS_PER_WINDOW,
        windows=windows,
        target=target,
        basis=ctx.basis,
        keep_states=keep_states,
    )


def run_xy(cfg: ExperimentConfig, threads: int = 1) -> TrajectoryPanel:
    """Anisotropic-XY panel: one curve per (initial state, engine).

    Collisions couple a single resonant ancilla (half-gap = half the
    model's only nonzero transition frequency) to the first spin.
    Populations are reported in the fixed analytic eigenbasis.
    """
    cfg.validate()
    if cfg.variant != "xydm":
        raise ConfigError("xy requires the xydm model variant")
    ctx, lower, _ = xy_frequency_groups(cfg)
    target = states.thermal_state(ctx.h_sys, cfg.temperature_mk)
    schedule = _xy_schedule(cfg, lower.omega)

    tasks = []
    for descriptor in cfg.initial_states:
        rho0 = initial_state(descriptor, ctx)
        for engine in cfg.engines:
            tasks.append((descriptor, engine, rho0))

    def run_one(task):
        descriptor, engine, rho0 = task
        if engine == "collision":
            return collision.run(rho0, schedule, ctx.h_sys, target, basis=ctx.basis)
        return xy_lindblad_trajectory(cfg, rho0, target)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, tasks))
    else:
        results = [run_one(t) for t in tasks]
    labels = [f"{descriptor}/{engine}" for descriptor, engine, _ in tasks]
    return TrajectoryPanel(labels=labels, trajectories=results)


# ---------------------------------------------------------------------------
# crosscheck


@dataclass
class CrosscheckResult:
    times: np.ndarray
    trace_distance: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(self.trace_distance.max())

    def to_csv(self) -> str:
        lines = ["t_ns,trace_distance"]
        for t, d in zip(self.times, self.trace_distance):
            lines.append(f"{_fmt(t)},{_fmt(d)}")
        return "\n".join(lines) + "\n"


def run_crosscheck(cfg: ExperimentConfig) -> CrosscheckResult:
    """Exact collisions vs the master equation on one resonant schedule.

    Both engines start from the same state and are sampled at every
    collision boundary; the emitted series is the per-sample trace
    distance between the two reduced states (both in the interaction
    picture).
    """
    cfg.validate()
    if cfg.variant != "tls":
        raise ConfigError("crosscheck runs on the two-level model")
    ctx = model_context(cfg)
    target = states.thermal_state(ctx.h_sys, cfg.temperature_mk)
    rho0 = initial_state(cfg.initial_states[0], ctx)
    h_b = cfg.h_b if cfg.h_b is not None else cfg.h_s
    anc = AncillaSpec(h_b=h_b, temperature_mk=cfg.temperature_mk, g=cfg.g, target_site=0)
    schedule = CollisionSchedule(
        tau_p=cfg.tau_p_ns,
        tau_c=cfg.tau_c_ns,
        count=cfg.count,
        mode=SEQUENTIAL,
        ancillae=(anc,),
    )
    traj_coll = collision.run(rho0, schedule, ctx.h_sys, target, keep_states=True)
    jumps = lindblad.tls_jump_terms(schedule, cfg.h_s)
    rhs = lindblad.jump_terms_rhs(jumps)
    windows = [(start, end) for start, end, _ in schedule.windows()]
    t_end = windows[-1][1] if windows else 0.0
    traj_me = lindblad.integrate(
        rhs,
        rho0,
        t_end,
        dt=cfg.tau_c_ns / DEFAULT_STEPS_PER_WINDOW,
        windows=windows,
        target=target,
        keep_states=True,
    )
    if len(traj_coll) != len(traj_me):
        raise RuntimeError("engines produced different sample counts")
    dists = np.array(
        [
            states.trace_distance(a, b)
            for a, b in zip(traj_coll.states, traj_me.states)
        ]
    )
    return CrosscheckResult(times=traj_coll.times.copy(), trace_distance=dists)


# ---------------------------------------------------------------------------
# analyze


@dataclass
class AnalysisResult:
    model_label: str
    level_energies: np.ndarray
    level_multiplicities: list
    groups: list  # (coupling label, FrequencyGroup)
    n_jumps: int
    report: transitions.UniquenessReport
    zero_frequency_excluded: list  # (coupling label, level, weight)
    correlation_minima: list  # (|omega|, min eigenvalue)

    def to_text(self) -> str:
        rep = self.report
        lines = [f"uniqueness analysis: {self.model_label}"]
        lines.append("  energy levels:")
        for i, (e, m) in enumerate(zip(self.level_energies, self.level_multiplicities)):
            lines.append(f"    level {i}: energy {_fmt(e)} rad/ns (multiplicity {m})")
        lines.append("  transition groups:")
        for label, grp in self.groups:
            lines.append(
                f"    {label}: omega {_fmt(grp.omega)} rad/ns, "
                f"levels {grp.level_from} -> {grp.level_to}, "
                f"norm {_fmt(float(np.linalg.norm(grp.operator)))}"
            )
        lines.append(f"  jump operators: {self.n_jumps}")
        lines.append(f"  adjoint closed: {'yes' if rep.adjoint_closed else 'no'}")
        lines.append(f"  commutant dimension: {rep.commutant_dim}")
        lines.append(f"  unique fixed point: {'yes' if rep.unique else 'no'}")
        if self.zero_frequency_excluded:
            lines.append("  zero-frequency components excluded:")
            for label, level, weight in self.zero_frequency_excluded:
                lines.append(
                    f"    {label}: within level {level}, weight {_fmt(weight)}"
                )
        else:
            lines.append("  zero-frequency components excluded: none")
        lines.append("  bath correlation positivity:")
        for omega_abs, min_eig in self.correlation_minima:
            verdict = "positive" if min_eig >= -1e-12 else "NOT positive"
            lines.append(
                f"    |omega| {_fmt(omega_abs)}: min eigenvalue {_fmt(min_eig)} ({verdict})"
            )
        return "\n".join(lines) + "\n"


def _analysis_jumps(cfg: ExperimentConfig, ctx: ModelContext):
    """Jump operators, coupling labels of groups, and zero-freq bookkeeping."""
    if cfg.variant == "tls":
        couplings = [("sigma_x", SIGMA_X)]
    else:
        n = ctx.spec.n_sites
        couplings = [(f"sigma_x[site {i}]", site_operator(SIGMA_X, i, n)) for i in range(n)]
    if cfg.variant == "ising":
        # the chain's generators are the per-configuration flip operators
        ops = []
        for site, conf, omega, op in lindblad.ising_jump_operators(ctx.spec):
            ops.append((f"site {site}, neighbours {conf}", omega, op))
        jumps = []
        groups = []
        for label, omega, op in ops:
            jumps.append(op)
            jumps.append(linalg.dagger(op))
            groups.append(
                (label, transitions.FrequencyGroup(omega=omega, level_from=-1, level_to=-1, operator=op))
            )
        return jumps, groups, []
    groups = []
    zero_excluded = []
    jumps = []
    for label, c_op in couplings:
        full = transitions.jump_set(
            ctx.h_sys, [c_op], include_zero_freq=True
        )
        for grp in full:
            is_zero = grp.level_from == grp.level_to
            if is_zero and not cfg.include_zero_frequency:
                zero_excluded.append(
                    (label, grp.level_from, float(np.linalg.norm(grp.operator)))
                )
                continue
            groups.append((label, grp))
            jumps.append(grp.operator)
    return jumps, groups, zero_excluded


def run_analyze(cfg: ExperimentConfig) -> AnalysisResult:
    """Transition tables, commutant dimension and the uniqueness verdict."""
    cfg.validate()
    ctx = model_context(cfg)
    dec = linalg.eig_hermitian(ctx.h_sys)
    levels, level_energies = transitions.level_structure(dec.eigenvalues)
    mults = [int(np.sum(levels == i)) for i in range(len(level_energies))]
    jumps, groups, zero_excluded = _analysis_jumps(cfg, ctx)
    report = transitions.uniqueness_check(jumps)

    # per-|omega| bath correlation matrix: one dedicated thermal ancilla per
    # coupling term, so cross entries vanish and the diagonal carries the
    # end-of-window rates
    by_abs_omega: dict = {}
    for label, grp in groups:
        if grp.omega == 0.0:
            continue
        key = round(abs(grp.omega), 9)
        by_abs_omega.setdefault(key, []).append(grp)
    minima = []
    for key in sorted(by_abs_omega):
        rates = []
        for grp in by_abs_omega[key]:
            anc = AncillaSpec(
                h_b=abs(grp.omega) / 2.0,
                temperature_mk=cfg.temperature_mk,
                g=cfg.g,
                target_site=0,
            )
            rates.append(2.0 * re_gamma_rate(grp.omega, cfg.tau_c_ns, anc))
        corr = np.diag(rates)
        minima.append((key, float(np.linalg.eigvalsh(corr).min())))

    if cfg.variant == "tls":
        label = f"tls (h_s = {_fmt(cfg.h_s)})"
    elif cfg.variant == "ising":
        label = f"ising chain (h = {cfg.ising_h}, J = {cfg.ising_j})"
    else:
        label = f"xydm (J = {_fmt(cfg.xy_j)})"
    return AnalysisResult(
        model_label=label,
        level_energies=level_energies,
        level_multiplicities=mults,
        groups=groups,
        n_jumps=len(jumps),
        report=report,
        zero_frequency_excluded=zero_excluded,
        correlation_minima=minima,
    )
