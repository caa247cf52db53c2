"""Dense symmetric linear algebra used by the certificate checks.

LAPACK (via ``numpy.linalg.eigh``) is the single source of truth for
spectra up to ``DENSE_LIMIT``; above it a Lanczos solve is used.
"""

import numpy as np
from scipy.sparse.linalg import eigsh

DENSE_LIMIT = 2000


class SpectralError(RuntimeError):
    """Raised when an eigensolve fails or its residual is unacceptable."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def as_symmetric(A, rtol=1e-12):
    """Validate that `A` is square and symmetric to `rtol` relative to max|A|."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = np.abs(A).max() if A.size else 0.0
    if A.size and np.abs(A - A.T).max() > rtol * scale:
        raise ValueError("matrix is not symmetric")
    return A


def max_abs(A):
    return float(np.abs(A).max()) if np.size(A) else 0.0


def sym_eigen(A, check=True):
    """Eigen-decomposition of a symmetric matrix.

    Returns ``(w, V)`` with eigenvalues ascending and orthonormal columns.
    With ``check`` the residual ``max_i ||A v_i - w_i v_i||`` is compared
    against ``1e-9 * N * max|A|``.
    """
    A = as_symmetric(A)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigh failed to converge: {exc}") from exc
    if check:
        n = A.shape[0]
        residual = float(np.linalg.norm(A @ V - V * w, axis=0).max())
        if residual > 1e-9 * n * max(max_abs(A), 1.0):
            raise SpectralError("eigen residual too large", residual=residual)
    return w, V


def eigvals(A):
    """Ascending eigenvalues of a symmetric matrix (no vectors)."""
    A = as_symmetric(A)
    try:
        return np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigvalsh failed to converge: {exc}") from exc


def _extreme_eigs(A):
    """(lambda_min, lambda_max) of a symmetric matrix."""
    n = A.shape[0]
    if n <= DENSE_LIMIT:
        w = eigvals(A)
        return float(w[0]), float(w[-1])
    A = as_symmetric(A)
    try:
        lo = eigsh(A, k=1, which="SA", return_eigenvectors=False, tol=1e-12)
        hi = eigsh(A, k=1, which="LA", return_eigenvectors=False, tol=1e-12)
    except Exception as exc:  # ArpackNoConvergence and friends
        raise SpectralError(f"Lanczos failed: {exc}") from exc
    return float(lo[0]), float(hi[0])


def spectral_norm(A):
    """Operator 2-norm of a symmetric matrix, max |lambda_i|."""
    lo, hi = _extreme_eigs(np.asarray(A, dtype=float))
    return max(abs(lo), abs(hi))


def orthonormal_basis(U, tol=1e-12):
    """Return an orthonormal basis for the column span of `U`.

    Columns that are already orthonormal are returned unchanged.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if np.abs(U.T @ U - np.eye(U.shape[1])).max() < tol:
        return U
    Qm, R = np.linalg.qr(U)
    keep = np.abs(np.diag(R)) > tol * max(np.abs(R).max(), 1.0)
    return Qm[:, keep]


def indicator_basis(labels, k=None):
    """Orthonormal basis of span{1_a}: columns 1_a / sqrt(n_a)."""
    labels = np.asarray(labels)
    k = int(labels.max()) + 1 if k is None else k
    Y = (labels[:, None] == np.arange(k)[None, :]).astype(float)
    return Y / np.sqrt(Y.sum(axis=0))


def project_out(A, U):
    """Return ``(I - U U^T) A (I - U U^T)`` for orthonormal `U`, symmetrized."""
    A = np.asarray(A, dtype=float)
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if U.shape[0] != A.shape[0]:
        raise ValueError("projector and matrix dimensions disagree")
    AU = A @ U
    UtAU = U.T @ AU
    PA = A - U @ AU.T - AU @ U.T + U @ UtAU @ U.T
    return 0.5 * (PA + PA.T)


def min_eig_on_complement(A, U):
    """Smallest eigenvalue of `A` restricted to the orthogonal complement of span(U).

    The projected matrix has spurious zeros on span(U); they are pushed
    above the spectrum by adding ``sigma U U^T`` with
    ``sigma = N max|A| + 1`` before the eigensolve.
    """
    A = np.asarray(A, dtype=float)
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    n, d = U.shape
    if d >= n:
        raise ValueError("complement is empty")
    sigma = n * max_abs(A) + 1.0
    shifted = project_out(A, U) + sigma * (U @ U.T)
    lo, _ = _extreme_eigs(0.5 * (shifted + shifted.T))
    return lo
