import itertools

import numpy as np
import pytest

from collisim.hamiltonians import (
    SIGMA_X,
    SIGMA_Z,
    AncillaSpec,
    IsingChain,
    TLS,
    XYDM,
    build,
    collision_hamiltonian,
    ising_transition_frequencies,
    site_operator,
    spin_values,
    xydm_eigenbasis,
)
from collisim.linalg import hermiticity_defect, partial_trace, propagator
from collisim.states import thermal_state


def test_tls_build():
    np.testing.assert_allclose(build(TLS(h_s=1.0)), np.diag([1.0, -1.0]))


def test_ising_two_site_diagonal():
    # oracle: evaluate h1 s1 + h2 s2 + J s1 s2 for each basis state
    spec = IsingChain(h=(0.5, 0.5), J=(1.0,))
    expected = []
    for s1, s2 in itertools.product((1, -1), repeat=2):
        expected.append(0.5 * s1 + 0.5 * s2 + 1.0 * s1 * s2)
    np.testing.assert_allclose(build(spec), np.diag(expected))
    np.testing.assert_allclose(np.diag(build(spec)).real, [2.0, -1.0, -1.0, 0.0])


def test_ising_build_is_diagonal(rng):
    h = tuple(rng.normal(size=4))
    j = tuple(rng.normal(size=3))
    mat = build(IsingChain(h=h, J=j))
    np.testing.assert_allclose(mat, np.diag(np.diag(mat)))


def test_built_hamiltonians_hermitian():
    for spec in (TLS(0.7), IsingChain(h=(0.1, -0.4, 0.9), J=(1.0, -0.3)), XYDM(J=1.3)):
        assert hermiticity_defect(build(spec)) < 1e-14


def test_xydm_spectrum_and_eigenvector_family():
    h = build(XYDM(J=1.0))
    w = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(w, [-2.0, -2.0, 2.0, 2.0], atol=1e-12)
    energies, u = xydm_eigenbasis(1.0)
    for k in range(4):
        np.testing.assert_allclose(h @ u[:, k], energies[k] * u[:, k], atol=1e-12)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_xydm_spectrum_any_coupling(rng):
    for j in rng.normal(size=4):
        if abs(j) < 1e-3:
            continue
        w = np.linalg.eigvalsh(build(XYDM(J=j)))
        np.testing.assert_allclose(np.sort(w), np.sort([2 * j, 2 * j, -2 * j, -2 * j]), atol=1e-10)


def test_transition_frequencies_two_site_example():
    spec = IsingChain(h=(0.5, 0.5), J=(1.0,))
    freqs = ising_transition_frequencies(spec, 0)
    assert freqs == {(1,): 3.0, (-1,): -1.0}


def test_transition_frequencies_zero_field_symmetry():
    spec = IsingChain(h=(0.0, 0.0, 0.0), J=(0.7, 1.3))
    freqs = ising_transition_frequencies(spec, 1)
    values = sorted(freqs.values())
    np.testing.assert_allclose(values, sorted([-4.0, -1.2, 1.2, 4.0]))
    np.testing.assert_allclose(sorted(values + [-v for v in values]), sorted(2 * values))


def test_transition_frequencies_match_energy_differences(rng):
    # oracle: flip-energy difference read off the diagonal of build(spec)
    for n in range(2, 7):
        spec = IsingChain(h=tuple(rng.normal(size=n)), J=tuple(rng.normal(size=n - 1)))
        diag = np.diag(build(spec)).real
        for site in range(n):
            freqs = ising_transition_frequencies(spec, site)
            neighbours = [j for j in (site - 1, site + 1) if 0 <= j < n]
            for idx in range(2**n):
                spins = spin_values(idx, n)
                if spins[site] != 1:
                    continue
                conf = tuple(spins[j] for j in neighbours)
                flipped = idx + 2 ** (n - 1 - site)
                np.testing.assert_allclose(diag[idx] - diag[flipped], freqs[conf], atol=1e-12)


def test_transition_frequencies_site_out_of_range():
    with pytest.raises(ValueError, match="out of range"):
        ising_transition_frequencies(IsingChain(h=(0.5,), J=()), 1)


def test_collision_hamiltonian_decoupled_leaves_state_invariant():
    h_sys = build(TLS(h_s=1.0))
    anc = AncillaSpec(h_b=1.0, temperature_mk=10.0, g=0.0)
    h = collision_hamiltonian(h_sys, [anc])
    expected = np.kron(h_sys, np.eye(2)) + np.kron(np.eye(2), 1.0 * SIGMA_Z)
    np.testing.assert_allclose(h, expected, atol=1e-14)
    # propagator factorizes: collide-and-trace in the interaction picture is identity
    rho = thermal_state(h_sys, 37.0)
    u = propagator(h, 200.0)
    joint = u @ np.kron(rho, thermal_state(SIGMA_Z, 10.0)) @ u.conj().T
    reduced = partial_trace(joint, [2, 2], keep={0})
    us = propagator(h_sys, 200.0)
    np.testing.assert_allclose(us.conj().T @ reduced @ us, rho, atol=1e-12)


def test_collision_hamiltonian_coupling_pattern():
    h_sys = build(TLS(h_s=1.0))
    g = 1e-3
    anc = AncillaSpec(h_b=1.0, temperature_mk=10.0, g=g)
    h = collision_hamiltonian(h_sys, [anc])
    coupling = h - np.kron(h_sys, np.eye(2)) - np.kron(np.eye(2), SIGMA_Z)
    np.testing.assert_allclose(coupling, g * np.kron(SIGMA_X, SIGMA_X), atol=1e-15)


def test_collision_hamiltonian_four_ancillae():
    spec = IsingChain(h=(0.5, 0.5), J=(1.0,))
    ancs = [
        AncillaSpec(h_b=hb, temperature_mk=10.0, g=1e-3, target_site=site)
        for site in (0, 1)
        for hb in (1.5, 0.5)
    ]
    h = collision_hamiltonian(build(spec), ancs)
    assert h.shape == (64, 64)
    assert hermiticity_defect(h) < 1e-13


def test_site_operator_embedding():
    op = site_operator(SIGMA_X, 1, 3)
    assert op.shape == (8, 8)
    np.testing.assert_allclose(op, np.kron(np.kron(np.eye(2), SIGMA_X), np.eye(2)))


def test_ancilla_validation():
    with pytest.raises(ValueError, match="half-gap"):
        AncillaSpec(h_b=0.0, temperature_mk=10.0, g=1e-3).validate()
    with pytest.raises(ValueError, match="temperature"):
        AncillaSpec(h_b=1.0, temperature_mk=-3.0, g=1e-3).validate()
    with pytest.raises(ValueError, match="nonnegative"):
        AncillaSpec(h_b=1.0, temperature_mk=10.0, g=-1e-3).validate()
    with pytest.raises(ValueError, match="out of range"):
        AncillaSpec(h_b=1.0, temperature_mk=10.0, g=1e-3, target_site=2).validate(n_sites=2)


def test_ising_spec_validation():
    with pytest.raises(ValueError, match="nearest-neighbour"):
        IsingChain(h=(0.5, 0.5), J=(1.0, 2.0)).validate()
