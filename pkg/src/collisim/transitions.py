"""Eigenbasis transition machinery and the steady-state uniqueness criterion.

Coupling operators are decomposed into energy-transition components
|psi_k><psi_l| of the system Hamiltonian.  Components are grouped by the
pair of energy *levels* they connect (eigenvalues within
DEGENERACY_TOL belong to one level), which keeps every downstream
result invariant under basis rotations inside degenerate subspaces.

Uniqueness of the relaxation fixed point is decided by the commutant of
the jump-operator set: for an adjoint-closed set, the dynamics is
relaxing to a unique state exactly when only multiples of the identity
commute with every generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .linalg import EigenDecomposition

DEGENERACY_TOL = 1e-9
COEFFICIENT_TOL = 1e-12
NULLSPACE_RTOL = 1e-8


def level_structure(eigenvalues: np.ndarray, tol: float = DEGENERACY_TOL) -> tuple:
    """Group ascending eigenvalues into degenerate levels.

    Returns (level_index_per_eigenvector, level_energies).
    """
    levels = []
    energies = []
    for w in eigenvalues:
        if energies and abs(w - energies[-1]) <= tol:
            levels.append(len(energies) - 1)
        else:
            levels.append(len(energies))
            energies.append(float(w))
    return np.array(levels, dtype=int), np.array(energies)


@dataclass(frozen=True)
class TransitionOperator:
    """A_kl = |psi_k><psi_l| with its transition frequency E_l - E_k."""

    k: int
    l: int
    omega: float
    operator: np.ndarray
    zero_frequency: bool


def transition_operators(h) -> list:
    """All N^2 eigenbasis transition operators of a Hermitian matrix.

    Pairs connecting states of one degenerate level are flagged
    ``zero_frequency``.
    """
    dec = linalg.eig_hermitian(h)
    levels, level_energies = level_structure(dec.eigenvalues)
    u = dec.eigenvectors
    n = dec.dim
    out = []
    for k in range(n):
        for l in range(n):
            omega = level_energies[levels[l]] - level_energies[levels[k]]
            out.append(
                TransitionOperator(
                    k=k,
                    l=l,
                    omega=float(omega),
                    operator=np.outer(u[:, k], u[:, l].conj()),
                    zero_frequency=levels[k] == levels[l],
                )
            )
    return out


@dataclass(frozen=True)
class TransitionTable:
    """Eigenbasis expansion of an operator: entries (k, l, omega, coefficient)."""

    decomposition: EigenDecomposition
    entries: tuple

    def reconstruct(self) -> np.ndarray:
        u = self.decomposition.eigenvectors
        n = self.decomposition.dim
        coeff = np.zeros((n, n), dtype=complex)
        for k, l, _omega, c in self.entries:
            coeff[k, l] = c
        return u @ coeff @ linalg.dagger(u)


def decompose(o, decomposition: EigenDecomposition) -> TransitionTable:
    """Expand an operator over the transition operators of a decomposition.

    Coefficients are <psi_k|o|psi_l>; the table reconstructs the input
    exactly (completeness of the A_kl basis).
    """
    a = linalg.as_operator(o)
    u = decomposition.eigenvectors
    if a.shape[0] != u.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {u.shape[0]}")
    levels, level_energies = level_structure(decomposition.eigenvalues)
    coeff = linalg.dagger(u) @ a @ u
    entries = []
    for k in range(u.shape[0]):
        for l in range(u.shape[0]):
            omega = level_energies[levels[l]] - level_energies[levels[k]]
            entries.append((k, l, float(omega), complex(coeff[k, l])))
    return TransitionTable(decomposition=decomposition, entries=tuple(entries))


@dataclass(frozen=True)
class MMatrix:
    """Operator-basis change between eigenbasis and product-basis components.

    For row-major vectorization, vec_product(O) = M @ vec_eigen(O) with
    M = U (x) conj(U); M is unitary, so the inverse map is its adjoint.
    """

    matrix: np.ndarray

    def to_product_basis(self, vec_eigen: np.ndarray) -> np.ndarray:
        return self.matrix @ vec_eigen

    def to_eigenbasis(self, vec_product: np.ndarray) -> np.ndarray:
        return linalg.dagger(self.matrix) @ vec_product


def m_matrix(decomposition: EigenDecomposition) -> MMatrix:
    u = decomposition.eigenvectors
    return MMatrix(matrix=np.kron(u, u.conj()))


@dataclass(frozen=True)
class FrequencyGroup:
    """Aggregated transition component of one coupling operator.

    ``operator`` is the sum of coefficient * A_kl over every eigenbasis
    pair connecting the two levels; omega = E(level_to) - E(level_from)
    with the sign convention that positive omega lowers the system
    energy (a decay-type jump).
    """

    omega: float
    level_from: int
    level_to: int
    operator: np.ndarray


def jump_set(
    h_sys,
    coupling_site_ops: Sequence[np.ndarray],
    include_zero_freq: bool = False,
    secular_tol: float = DEGENERACY_TOL,
) -> list:
    """Frequency-resolved jump operators generated by coupling operators.

    Each Hermitian coupling operator is decomposed in the eigenbasis of
    ``h_sys`` and its components grouped by the ordered pair of energy
    levels they connect.  Zero-frequency groups (within one degenerate
    level) are kept only when ``include_zero_freq``.
    """
    dec = linalg.eig_hermitian(h_sys)
    levels, level_energies = level_structure(dec.eigenvalues, tol=secular_tol)
    u = dec.eigenvectors
    n = dec.dim
    groups: list = []
    for c_op in coupling_site_ops:
        linalg.require_hermitian(c_op)
        coeff = linalg.dagger(u) @ linalg.as_operator(c_op) @ u
        by_pair: dict = {}
        for k in range(n):
            for l in range(n):
                if abs(coeff[k, l]) <= COEFFICIENT_TOL:
                    continue
                pair = (int(levels[k]), int(levels[l]))
                if pair not in by_pair:
                    by_pair[pair] = np.zeros((n, n), dtype=complex)
                by_pair[pair] += coeff[k, l] * np.outer(u[:, k], u[:, l].conj())
        for (lk, ll), op in sorted(by_pair.items()):
            if lk == ll and not include_zero_freq:
                continue
            groups.append(
                FrequencyGroup(
                    omega=float(level_energies[ll] - level_energies[lk]),
                    level_from=ll,
                    level_to=lk,
                    operator=op,
                )
            )
    return groups


def _stack_operators(ops: Sequence[np.ndarray]) -> np.ndarray:
    return np.vstack([linalg.as_operator(o).reshape(1, -1) for o in ops])


def span_is_adjoint_closed(ops: Sequence[np.ndarray], rtol: float = NULLSPACE_RTOL) -> bool:
    """True when span{ops} = span{ops, ops^dag}, by rank comparison."""
    base = _stack_operators(ops)
    both = np.vstack([base, _stack_operators([linalg.dagger(o) for o in ops])])
    sv_base = np.linalg.svd(base, compute_uv=False)
    sv_both = np.linalg.svd(both, compute_uv=False)
    thresh = rtol * sv_both[0]
    return int(np.sum(sv_base > thresh)) == int(np.sum(sv_both > thresh))


def commutant_basis(ops: Sequence[np.ndarray], rtol: float = NULLSPACE_RTOL) -> list:
    """Basis of {X : [X, A] = [X, A^dag] = 0 for all generators A}.

    Solved as the nullspace of the stacked linear maps
    vec(X) -> vec([X, A]); the dimension is exact at these scales, with
    singular values below rtol * sigma_max treated as zero.
    """
    if not ops:
        raise ValueError("need at least one generator")
    n = linalg.as_operator(ops[0]).shape[0]
    rows = []
    eye = np.eye(n)
    for a in ops:
        a = linalg.as_operator(a)
        if a.shape[0] != n:
            raise ValueError("all generators must share one dimension")
        for m in (a, linalg.dagger(a)):
            rows.append(np.kron(m, eye) - np.kron(eye, m.T))
    stacked = np.vstack(rows)
    _, sv, vh = np.linalg.svd(stacked)
    null_mask = sv <= rtol * sv[0]
    basis = [vh[i].conj().reshape(n, n) for i in range(len(sv)) if null_mask[i]]
    # rows of vh beyond len(sv) (wide matrices) are exact nullspace too
    for i in range(len(sv), vh.shape[0]):
        basis.append(vh[i].conj().reshape(n, n))
    return basis


def hermitian_commutant_basis(ops: Sequence[np.ndarray]) -> list:
    """Hermitian spanning set of the commutant (conserved observables)."""
    out = []
    for x in commutant_basis(ops):
        h1 = (x + linalg.dagger(x)) / 2.0
        h2 = (x - linalg.dagger(x)) / 2.0j
        for h in (h1, h2):
            if linalg.frobenius(h) > 1e-10:
                out.append(h / linalg.frobenius(h))
    return out


@dataclass(frozen=True)
class UniquenessReport:
    commutant_dim: int
    adjoint_closed: bool
    unique: bool


def uniqueness_check(jumps: Sequence[np.ndarray]) -> UniquenessReport:
    """Decide relaxation uniqueness from the algebra of jump operators.

    For an adjoint-closed generator set the double-commutant theorem
    reduces the criterion to a trivial commutant: the fixed point is
    unique exactly when commutant_dim == 1.
    """
    ops = [linalg.as_operator(j) for j in jumps]
    if not ops:
        raise ValueError("need at least one jump operator")
    closed = span_is_adjoint_closed(ops)
    dim = len(commutant_basis(ops))
    return UniquenessReport(commutant_dim=dim, adjoint_closed=closed, unique=closed and dim == 1)
