"""Dual certificate for the k-means SDP at a candidate clustering.

All matrices are kept in the caller's point order; a block ``(a, b)`` is
the submatrix on rows labelled ``a`` and columns labelled ``b``. The
construction is

    Q = z (I - E) + M - B

with ``E``, ``M`` fixed by the data and the clustering, ``z`` taken as
large as the nonnegativity of ``B`` allows, and ``B`` rank one on each
off-diagonal block.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .clustering import Clustering
from .spectra import indicator_basis, max_abs, min_eig_on_complement, project_out, spectral_norm

MODES = ("exact-psd", "operator-bound", "corollary-bound")
REPORT_COLUMNS = ("mode", "success", "margin", "z", "rho_min", "lambda_min", "psd_tol", "rho_tol")


class CertificateDegenerate(ArithmeticError):
    """A normalizer rho_(a,b) vanishes while u_(a,b) does not."""


def _as_clustering(c):
    if isinstance(c, Clustering):
        return c
    sizes = np.asarray(c, dtype=int)
    return Clustering(np.repeat(np.arange(sizes.size), sizes), sizes.size)


def distance_matrix(points):
    """Squared Euclidean distances, computed pairwise (no Gram cancellation)."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    return cdist(points, points, "sqeuclidean")


def build_E(clustering):
    """E^(a,b) = (1/n_a + 1/n_b)/2 on every block.

    Accepts a :class:`Clustering` or a sequence of block sizes (then the
    layout is contiguous blocks).
    """
    c = _as_clustering(clustering)
    w = 1.0 / c.sizes[c.labels]
    return 0.5 * (w[:, None] + w[None, :])


def _within_terms(D, c):
    """Per point: (D^(a,a) 1)_i, and per block: 1^T D^(a,a) 1."""
    Y = c.indicators()
    row_in = (D @ Y)[np.arange(c.N), c.labels]
    block_sum = Y.T @ row_in
    return row_in, block_sum


def build_M(D, clustering):
    """M = D + (w 1^T + 1 w^T)/2 with w_i = S_a/n_a^2 - (2/n_a)(D^(a,a) 1)_i.

    Here ``S_a = 1^T D^(a,a) 1`` and a is the block of i; this is the
    blockwise row and column correction written globally.
    """
    c = _as_clustering(clustering)
    D = np.asarray(D, dtype=float)
    row_in, S = _within_terms(D, c)
    n = c.sizes[c.labels].astype(float)
    w = S[c.labels] / n**2 - 2.0 * row_in / n
    return D + 0.5 * (w[:, None] + w[None, :])


def cross_row_sums(M, clustering):
    """N x k table T with T[i, b] = e_i^T M^(a,b) 1 for i in block a."""
    c = _as_clustering(clustering)
    return np.asarray(M) @ c.indicators()


def _pair_factor(c):
    """F[a, b] = (n_a + n_b) / (2 n_a)."""
    n = c.sizes.astype(float)
    return (n[:, None] + n[None, :]) / (2.0 * n[:, None])


def compute_z(M, clustering):
    """z = min over a != b of (2 n_a / (n_a + n_b)) min(M^(a,b) 1)."""
    c = _as_clustering(clustering)
    if c.k < 2:
        raise ValueError("z needs at least two clusters")
    T = cross_row_sums(M, c)
    F = _pair_factor(c)
    scaled = T / F[c.labels]
    scaled[np.arange(c.N), c.labels] = np.inf
    return float(scaled.min())


def default_rho_tol(M):
    return 1e-10 * max(1.0, max_abs(M) * M.shape[0])


def build_B(M, z, clustering, rho_tol=None):
    """Rank-one off-diagonal blocks B^(a,b) = u_(a,b) u_(b,a)^T / rho_(b,a).

    Returns ``(B, U, rho)``: ``U[i, b] = u_(a,b)[i]`` for i in block a (zero
    on i's own block) and ``rho[a, b] = u_(a,b)^T 1``. A pair whose rho is
    below `rho_tol` gets a zero block provided both u vectors vanish to the
    same tolerance (``||B^(a,b)||_max <= rho`` so this is the limit);
    otherwise :class:`CertificateDegenerate` is raised.
    """
    c = _as_clustering(clustering)
    M = np.asarray(M, dtype=float)
    rho_tol = default_rho_tol(M) if rho_tol is None else rho_tol
    Y = c.indicators()
    F = _pair_factor(c)
    U = M @ Y - z * F[c.labels]
    U[np.arange(c.N), c.labels] = 0.0
    rho = Y.T @ U
    np.fill_diagonal(rho, 0.0)
    rho_sym = 0.5 * (rho + rho.T)

    collapsed = np.zeros((c.k, c.k), dtype=bool)
    for a in range(c.k):
        for b in range(a + 1, c.k):
            if rho_sym[a, b] > rho_tol:
                continue
            u_ab = U[c.labels == a, b]
            u_ba = U[c.labels == b, a]
            if max(np.abs(u_ab).max(), np.abs(u_ba).max()) > rho_tol or rho_sym[a, b] < -rho_tol:
                raise CertificateDegenerate(f"rho_({a},{b}) = {rho_sym[a, b]:.3e} is not positive")
            collapsed[a, b] = collapsed[b, a] = True

    L = c.labels
    denom = rho_sym[np.ix_(L, L)]
    off = L[:, None] != L[None, :]
    live = off & ~collapsed[np.ix_(L, L)]
    UL = U[:, L]  # UL[i, j] = u_(l_i, l_j)[i]
    B = np.zeros_like(M)
    B[live] = (UL * UL.T)[live] / denom[live]
    B = 0.5 * (B + B.T)
    clamp = 1e-10 * max_abs(M)
    B[(B < 0) & (B >= -clamp)] = 0.0
    return B, U, rho


def assemble_Q(z, E, M, B):
    N = M.shape[0]
    return z * (np.eye(N) - E) + M - B


def alpha_from_z(z, D, clustering):
    """alpha_i = -z/n_a + S_a/n_a^2 - (2/n_a)(D^(a,a) 1)_i for i in block a."""
    c = _as_clustering(clustering)
    row_in, S = _within_terms(np.asarray(D, dtype=float), c)
    n = c.sizes[c.labels].astype(float)
    return -z / n + S[c.labels] / n**2 - 2.0 * row_in / n


@dataclass
class CertificateParts:
    points: np.ndarray
    clustering: Clustering
    D: np.ndarray
    E: np.ndarray
    M: np.ndarray
    z: float
    alpha: np.ndarray
    B: np.ndarray
    U: np.ndarray
    rho: np.ndarray
    Q: np.ndarray
    rho_tol: float
    psd_tol: float
    _cache: dict = field(default_factory=dict, repr=False)

    def u(self, a, b):
        """u_(a,b) as an n_a-vector."""
        return self.U[self.clustering.labels == a, b]

    def block(self, name, a, b):
        A = getattr(self, name)
        L = self.clustering.labels
        return A[np.ix_(L == a, L == b)]

    @property
    def beta(self):
        return 2.0 * self.B

    @property
    def rho_min(self):
        k = self.clustering.k
        return float(min(self.rho[a, b] for a in range(k) for b in range(k) if a != b))

    @property
    def rhs(self):
        """Right-hand side shared by the operator and corollary bounds (equals z)."""
        return self.z

    @property
    def basis(self):
        if "basis" not in self._cache:
            self._cache["basis"] = indicator_basis(self.clustering.labels, self.clustering.k)
        return self._cache["basis"]

    def dual_objective(self):
        return self.clustering.k * self.z + float(self.alpha.sum())

    def primal_objective(self):
        """Tr(D X) at the candidate's partition matrix."""
        c = self.clustering
        Y = c.indicators()
        return float(np.sum((Y.T @ self.D @ Y).diagonal() / c.sizes))

    def lambda_min(self):
        """Smallest eigenvalue of Q on the complement of span{1_a}.

        With every point its own cluster the complement is empty and the
        condition is vacuous (+inf).
        """
        if "lambda_min" not in self._cache:
            if self.clustering.k == self.clustering.N:
                self._cache["lambda_min"] = float("inf")
            else:
                self._cache["lambda_min"] = min_eig_on_complement(self.Q, self.basis)
        return self._cache["lambda_min"]

    def operator_lhs(self):
        """||P (M - B) P||_2 with P the projector off span{1_a}."""
        if "operator_lhs" not in self._cache:
            if self.clustering.k == self.clustering.N:
                self._cache["operator_lhs"] = 0.0
                return 0.0
            self._cache["operator_lhs"] = spectral_norm(project_out(self.M - self.B, self.basis))
        return self._cache["operator_lhs"]

    def psi(self):
        """Points centered at their empirical cluster means, as an m x N matrix."""
        c = self.clustering
        Y = c.indicators()
        means = (Y.T @ self.points) / c.sizes[:, None]
        return (self.points - means[c.labels]).T

    def corollary_lhs(self):
        c = self.clustering
        total = 2.0 * np.linalg.norm(self.psi(), 2) ** 2
        T = cross_row_sums(self.M, c)
        for a in range(c.k):
            for b in range(a + 1, c.k):
                r = 0.5 * (self.rho[a, b] + self.rho[b, a])
                if r <= self.rho_tol:
                    continue  # collapsed pair: B^(a,b) = 0
                t_ab = T[c.labels == a, b]
                t_ba = T[c.labels == b, a]
                total += np.linalg.norm(t_ab - t_ab.mean()) * np.linalg.norm(t_ba - t_ba.mean()) / r
        return float(total)


def build_certificate(points, clustering):
    """Assemble every certificate ingredient for `points` clustered by `clustering`."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    c = _as_clustering(clustering)
    if c.N != points.shape[0]:
        raise ValueError("points and clustering disagree on N")
    if c.k < 2:
        raise ValueError("certification needs k >= 2")
    D = distance_matrix(points)
    E = build_E(c)
    M = build_M(D, c)
    z = compute_z(M, c)
    rho_tol = default_rho_tol(M)
    B, U, rho = build_B(M, z, c, rho_tol)
    Q = assemble_Q(z, E, M, B)
    psd_tol = 1e-8 * max(1.0, max_abs(Q) * c.N)
    alpha = alpha_from_z(z, D, c)
    return CertificateParts(points, c, D, E, M, z, alpha, B, U, rho, Q, rho_tol, psd_tol)


@dataclass
class CertificateReport:
    mode: str
    success: bool
    margin: float
    z: float
    rho_min: float
    lambda_min: float
    psd_tol: float
    rho_tol: float

    def csv_row(self):
        vals = [self.mode, str(int(self.success))]
        vals += [f"{v:.17g}" for v in (self.margin, self.z, self.rho_min, self.lambda_min, self.psd_tol, self.rho_tol)]
        return ",".join(vals)


def evaluate(parts, mode):
    """Decide one certification mode from prebuilt parts."""
    tol = parts.psd_tol
    lam = float("nan")
    if mode == "exact-psd":
        lam = parts.lambda_min()
        margin = lam
        neg = parts.B.min()
        if neg < 0:
            margin = min(margin, float(neg))
    elif mode == "operator-bound":
        margin = parts.rhs - parts.operator_lhs()
    elif mode == "corollary-bound":
        margin = parts.rhs - parts.corollary_lhs()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if "lambda_min" in parts._cache:
        lam = parts._cache["lambda_min"]
    return CertificateReport(mode, bool(margin >= -tol), float(margin), parts.z, parts.rho_min, lam, tol, parts.rho_tol)


def certify(points, clustering, mode="exact-psd"):
    """Certify that `clustering` solves the k-means SDP for `points`.

    `mode` is one of ``exact-psd``, ``operator-bound``, ``corollary-bound``,
    or ``all`` (then a list of reports is returned, one per mode).
    """
    parts = build_certificate(points, clustering)
    if mode == "all":
        return [evaluate(parts, m) for m in MODES]
    return evaluate(parts, mode)


def lemma42_decomposition(cloud, a, b):
    """Split D^(a,b)1 - D^(a,a)1 = 4 n p + q for a generated stochastic-ball cloud.

    Needs the cloud's centers and offsets; clouds read from disk are rejected.
    """
    if cloud.offsets is None or cloud.config is None:
        raise ValueError("offsets and centers are unknown for this cloud")
    sizes = np.bincount(cloud.labels)
    if np.any(sizes != sizes[0]):
        raise ValueError("decomposition assumes equal cluster sizes")
    n = int(sizes[0])
    ga, gb = cloud.config.centers[a], cloud.config.centers[b]
    O = 0.5 * (ga + gb)
    delta2 = float(((ga - gb) ** 2).sum())
    xa, xb = cloud.points[cloud.labels == a], cloud.points[cloud.labels == b]
    ra = cloud.offsets[cloud.labels == a]
    p = ra @ (ga - O) + delta2 / 4.0
    drift = (xa.mean(axis=0) - xb.mean(axis=0)) - (ga - gb)
    q = 2.0 * n * ((xa - O) @ drift) + (((xb - O) ** 2).sum() - ((xa - O) ** 2).sum())
    return p, q
