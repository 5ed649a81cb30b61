"""Dense complex matrix algebra for operators and density matrices.

Operators are square complex128 numpy arrays.  Multi-qubit registers use
the Kronecker-product convention with qubit 0 as the slowest (leftmost)
index.  Hermitian eigenproblems and eigendecomposition-based propagators
are backed by LAPACK through numpy; the module-level tolerances below are
validation thresholds, not solver parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-10


def as_operator(m) -> np.ndarray:
    """Coerce to a square, finite complex128 matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def hermiticity_defect(m: np.ndarray) -> float:
    return frobenius(m - dagger(m))


def require_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = as_operator(m)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: ||m - m^dag|| = {defect:.3e} > {tol:.1e}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor carries the slow index."""
    return np.kron(as_operator(a), as_operator(b))


def partial_trace(m, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    Parameters
    ----------
    m : square matrix over the tensor-product space prod(dims)
    dims : per-subsystem dimensions, slowest index first
    keep : indices of the subsystems to retain (nonempty)

    The result is ordered by ascending kept index and satisfies
    Tr(result) = Tr(m).
    """
    a = as_operator(m)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if a.shape[0] != total:
        raise ValueError(
            f"dimension mismatch: matrix is {a.shape[0]}x{a.shape[0]} "
            f"but prod(dims) = {total}"
        )
    kept = sorted(set(int(k) for k in keep))
    if not kept:
        raise ValueError("keep must name at least one subsystem")
    if kept[0] < 0 or kept[-1] >= len(dims):
        raise ValueError(f"keep indices {kept} out of range for {len(dims)} subsystems")

    n = len(dims)
    resh = a.reshape(dims + dims)
    # einsum: traced subsystems share a row/column label, kept ones stay free.
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many subsystems")
    row = list(letters[:n])
    col = [letters[n + i] if i in kept else row[i] for i in range(n)]
    out = "".join(row[i] for i in kept) + "".join(col[i] for i in kept)
    reduced = np.einsum("".join(row + col) + "->" + out, resh)
    d_keep = int(np.prod([dims[i] for i in kept]))
    return reduced.reshape(d_keep, d_keep)


@dataclass(frozen=True)
class EigenDecomposition:
    """Hermitian eigendecomposition h = U diag(eigenvalues) U^dag.

    Eigenvalues ascend; column k of ``eigenvectors`` is the k-th eigenstate.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ dagger(u)


def eig_hermitian(h, tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Rejects inputs whose anti-Hermitian part exceeds ``tol`` in Frobenius
    norm, and validates unitarity/reconstruction of the output.
    """
    a = require_hermitian(h, tol)
    w, u = np.linalg.eigh(a)
    dec = EigenDecomposition(eigenvalues=w, eigenvectors=u)
    dim = a.shape[0]
    unit_defect = frobenius(dagger(u) @ u - np.eye(dim))
    if unit_defect > 1e-12 * max(1.0, dim):
        raise ValueError(f"eigenvector matrix not unitary: defect {unit_defect:.3e}")
    scale = max(frobenius(a), 1.0)
    rec_defect = frobenius(dec.reconstruct() - a) / scale
    if rec_defect > RECONSTRUCTION_TOL:
        raise ValueError(f"eigendecomposition reconstruction defect {rec_defect:.3e}")
    return dec


def propagator(h, t: float) -> np.ndarray:
    """Unitary exp(-i h t) for Hermitian h, via eigendecomposition."""
    if t < 0:
        raise ValueError(f"propagation time must be nonnegative, got {t}")
    dec = eig_hermitian(h)
    u = dec.eigenvectors
    return (u * np.exp(-1j * dec.eigenvalues * t)) @ dagger(u)
