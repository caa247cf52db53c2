"""k-means objectives, Lloyd's heuristic and an exhaustive solver for small N."""

from functools import lru_cache

import numpy as np

BRUTE_FORCE_CAP = 12


class LloydError(RuntimeError):
    pass


class Clustering:
    """A partition of ``0..N-1`` into k nonempty blocks, as a label array."""

    def __init__(self, labels, k=None):
        labels = np.asarray(labels, dtype=int).copy()
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty 1-d array")
        k = int(labels.max()) + 1 if k is None else int(k)
        if labels.min() < 0 or labels.max() >= k:
            raise ValueError(f"labels must lie in 0..{k - 1}")
        sizes = np.bincount(labels, minlength=k)
        if np.any(sizes == 0):
            raise ValueError(f"empty block(s): {np.flatnonzero(sizes == 0).tolist()}")
        labels.setflags(write=False)
        self.labels = labels
        self.k = k
        self.sizes = sizes

    @property
    def N(self):
        return self.labels.size

    def __repr__(self):
        return f"Clustering(k={self.k}, sizes={self.sizes.tolist()})"

    def __eq__(self, other):
        """Equality as partitions, ignoring block names."""
        if not isinstance(other, Clustering):
            return NotImplemented
        return self.N == other.N and np.array_equal(self.canonical(), other.canonical())

    def __hash__(self):
        return hash(self.canonical().tobytes())

    def canonical(self):
        """Restricted-growth form: blocks renumbered by first appearance."""
        _, first = np.unique(self.labels, return_index=True)
        rename = np.empty(self.k, dtype=int)
        rename[np.argsort(first)] = np.arange(self.k)
        return rename[self.labels]

    def indicators(self):
        """N x k 0/1 matrix whose columns are the block indicators 1_a."""
        return (self.labels[:, None] == np.arange(self.k)[None, :]).astype(float)

    def partition_matrix(self):
        """X = sum_a (1/n_a) 1_a 1_a^T."""
        Y = self.indicators()
        return (Y / self.sizes) @ Y.T

    def blocks(self):
        return [np.flatnonzero(self.labels == a) for a in range(self.k)]


def _check(points, clustering):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.shape[0] != clustering.N:
        raise ValueError("points and clustering disagree on N")
    return points


def centroids(points, clustering):
    points = _check(points, clustering)
    Y = clustering.indicators()
    return (Y.T @ points) / clustering.sizes[:, None]


def objective_centroid(points, clustering):
    """Sum over blocks of squared distances to the block centroid."""
    points = _check(points, clustering)
    c = centroids(points, clustering)
    return float(((points - c[clustering.labels]) ** 2).sum())


def objective_pairwise(points, clustering):
    """sum_a (1/n_a) sum over ordered pairs i, j in block a of ||x_i - x_j||^2."""
    points = _check(points, clustering)
    total = 0.0
    for a, idx in enumerate(clustering.blocks()):
        x = points[idx]
        d2 = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=-1)
        total += d2.sum() / clustering.sizes[a]
    return float(total)


def _nearest(points, centers):
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
    return np.argmin(d2, axis=1), d2


def _farthest_first(points, k, rng):
    chosen = [int(rng.integers(points.shape[0]))]
    dmin = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(k - 1):
        nxt = int(np.argmax(dmin))
        chosen.append(nxt)
        dmin = np.minimum(dmin, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()


def lloyd(points, k, init="farthest", rng=None, centers=None, max_iter=1000):
    """Lloyd's alternating assignment/centroid iteration.

    `init` is ``"random"`` (k distinct points drawn uniformly) or
    ``"farthest"`` (farthest-first traversal from a random start). Passing
    explicit `centers` overrides both. Ties go to the lowest block index.
    An empty block is re-seeded at the point farthest from its centroid;
    :class:`LloydError` is raised if that does not repair it.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    N = points.shape[0]
    if N < k:
        raise ValueError("need at least k points")
    rng = np.random.default_rng(0) if rng is None else rng
    if centers is not None:
        centers = np.array(centers, dtype=float)
    elif init == "random":
        centers = points[rng.choice(N, size=k, replace=False)].copy()
    elif init == "farthest":
        centers = _farthest_first(points, k, rng)
    else:
        raise ValueError(f"unknown init {init!r}")

    labels = None
    for _ in range(max_iter):
        new, d2 = _nearest(points, centers)
        for _repair in range(k):
            sizes = np.bincount(new, minlength=k)
            empty = np.flatnonzero(sizes == 0)
            if empty.size == 0:
                break
            own = d2[np.arange(N), new]
            # only steal from blocks that can spare a point
            own[sizes[new] <= 1] = -np.inf
            donor = int(np.argmax(own))
            if not np.isfinite(own[donor]):
                raise LloydError("cannot repair empty block")
            new[donor] = empty[0]
        else:
            if np.any(np.bincount(new, minlength=k) == 0):
                raise LloydError("empty block repair stalled")
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for a in range(k):
            centers[a] = points[labels == a].mean(axis=0)
    return Clustering(labels, k)


@lru_cache(maxsize=32)
def _rgs_table(N, k):
    """All restricted-growth strings of length N using exactly k blocks, lexicographic."""
    out = []
    buf = [0] * N

    def rec(i, used):
        if i == N:
            if used == k:
                out.append(tuple(buf))
            return
        # remaining slots must be able to open the missing blocks
        if N - i < k - used:
            return
        for a in range(min(used + 1, k)):
            buf[i] = a
            rec(i + 1, max(used, a + 1))

    rec(1, 1)
    table = np.array(out, dtype=np.int8)
    table.setflags(write=False)
    return table


def set_partitions(N, k):
    """Canonical label arrays for every partition of N items into k nonempty blocks."""
    if not 1 <= k <= N:
        return np.zeros((0, N), dtype=np.int8)
    return _rgs_table(N, k)


def _batch_objective(points, table, k, chunk=20000):
    sq = (points**2).sum(axis=1)
    vals = np.empty(table.shape[0])
    for s in range(0, table.shape[0], chunk):
        t = table[s : s + chunk]
        acc = np.zeros(t.shape[0])
        for a in range(k):
            mask = (t == a).astype(float)
            cnt = mask.sum(axis=1)
            sums = mask @ points
            acc += mask @ sq - (sums**2).sum(axis=1) / cnt
        vals[s : s + chunk] = acc
    return vals


def brute_force(points, k, cap=BRUTE_FORCE_CAP):
    """Exact k-means minimizer by enumerating all set partitions.

    Ties are broken towards the lexicographically smallest canonical labeling.
    Returns ``(clustering, value)``.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    N = points.shape[0]
    if N > cap:
        raise ValueError(f"brute force limited to N <= {cap}, got {N}")
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    centered = points - points.mean(axis=0)
    table = set_partitions(N, k)
    vals = _batch_objective(centered, table, k)
    scale = float((centered**2).sum())
    best = int(np.flatnonzero(vals <= vals.min() + 1e-12 * max(scale, 1e-300))[0])
    clustering = Clustering(table[best], k)
    return clustering, objective_centroid(points, clustering)


def write_clustering(path, clustering):
    """``i a`` lines, both 1-based."""
    with open(path, "w") as fh:
        for i, a in enumerate(clustering.labels):
            fh.write(f"{i + 1} {a + 1}\n")


def read_clustering(path):
    data = np.loadtxt(path, dtype=int, ndmin=2)
    order = np.argsort(data[:, 0])
    return Clustering(data[order, 1] - 1)
