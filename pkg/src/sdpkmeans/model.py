"""Stochastic ball model: ball configurations, radial laws and point clouds.

Random streams use numpy's Philox (counter-based) bit generator seeded by a
``SeedSequence`` built from integer tuples, so every cluster and every
experiment trial has its own reproducible substream.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

DISTRIBUTIONS = ("uniform-ball", "uniform-sphere", "point-mass-radius")


def make_rng(*key):
    """Philox generator keyed by a tuple of non-negative integers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(x) for x in key])))


@dataclass(frozen=True, eq=False)
class BallConfig:
    """Deterministic ball centers, stored as a ``(k, m)`` array."""

    centers: np.ndarray

    def __post_init__(self):
        c = np.array(self.centers, dtype=float)
        if c.ndim != 2:
            raise ValueError("centers must be a (k, m) array")
        if c.shape[0] < 2:
            raise ValueError("need at least two ball centers")
        if c.shape[1] < 1:
            raise ValueError("ambient dimension must be >= 1")
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        if np.min(self.pairwise_distances()[~np.eye(self.k, dtype=bool)]) <= 0:
            raise ValueError("ball centers must be distinct")

    @property
    def k(self):
        return self.centers.shape[0]

    @property
    def m(self):
        return self.centers.shape[1]

    def pairwise_distances(self):
        diff = self.centers[:, None, :] - self.centers[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))

    def distance(self, a, b):
        return float(np.linalg.norm(self.centers[a] - self.centers[b]))

    def midpoint(self, a, b):
        return 0.5 * (self.centers[a] + self.centers[b])

    @property
    def delta(self):
        """Minimum pairwise center distance."""
        return min(self.distance(a, b) for a, b in combinations(range(self.k), 2))

    @classmethod
    def simplex(cls, k, m, delta):
        """Regular simplex with all pairwise distances equal to `delta`."""
        if k < 2:
            raise ValueError("need at least two ball centers")
        if k - 1 > m:
            raise ValueError(f"cannot place {k} equidistant centers in R^{m}")
        if delta <= 0:
            raise ValueError("delta must be positive")
        # Vertices e_1..e_k of R^k are sqrt(2) apart; express them in an
        # orthonormal basis of their (k-1)-dimensional affine hull.
        vertices = np.eye(k) - 1.0 / k
        basis, _ = np.linalg.qr(vertices.T)
        coords = vertices @ basis[:, : k - 1] * (delta / np.sqrt(2.0))
        centers = np.zeros((k, m))
        centers[:, : k - 1] = coords
        return cls(centers)


def cond_gamma(config):
    """Ratio of the largest to the smallest squared center separation."""
    if config.k < 2:
        raise ValueError("Cond(gamma) needs k >= 2")
    d2 = [config.distance(a, b) ** 2 for a, b in combinations(range(config.k), 2)]
    return max(d2) / min(d2)


def separation_threshold(config):
    """Separation above which planted recovery is guaranteed: 2 + k^2 Cond / m."""
    return 2.0 + config.k**2 * cond_gamma(config) / config.m


@dataclass(frozen=True)
class RadialDistribution:
    """Rotation-invariant law supported on the closed unit ball.

    ``radius`` is only used by ``point-mass-radius``.
    """

    kind: str = "uniform-ball"
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.kind!r}")
        if self.kind == "point-mass-radius" and not 0.0 < self.radius <= 1.0:
            raise ValueError("point-mass radius must lie in (0, 1]")

    def second_moment(self, m):
        """E||r||^2 in dimension m."""
        if self.kind == "uniform-ball":
            return m / (m + 2.0)
        if self.kind == "uniform-sphere":
            return 1.0
        return self.radius**2

    def sample(self, m, size, rng):
        """Draw `size` offsets in R^m as a ``(size, m)`` array."""
        g = rng.standard_normal((size, m))
        direction = g / np.linalg.norm(g, axis=1, keepdims=True)
        if self.kind == "uniform-ball":
            r = rng.random(size) ** (1.0 / m)
        elif self.kind == "uniform-sphere":
            r = np.ones(size)
        else:
            r = np.full(size, self.radius)
        out = direction * r[:, None]
        # normalization can overshoot the unit sphere by an ulp
        norms = np.linalg.norm(out, axis=1)
        over = norms > 1.0
        out[over] /= norms[over, None]
        return out


def sample_offset(dist, m, rng):
    """A single offset vector in R^m."""
    return dist.sample(m, 1, rng)[0]


@dataclass(frozen=True, eq=False)
class LabeledPointCloud:
    """Points grouped by cluster; row order is cluster-major.

    ``offsets``, ``config`` and ``seed`` are ``None`` for clouds read from
    disk, which carry no provenance.
    """

    points: np.ndarray
    labels: np.ndarray
    n: Optional[int] = None
    offsets: Optional[np.ndarray] = None
    config: Optional[BallConfig] = None
    dist: Optional[RadialDistribution] = None
    seed: Optional[int] = None

    @property
    def N(self):
        return self.points.shape[0]

    @property
    def m(self):
        return self.points.shape[1]

    @property
    def k(self):
        return int(self.labels.max()) + 1

    def cluster(self, a):
        return self.points[self.labels == a]

    def clustering(self):
        from .clustering import Clustering

        return Clustering(self.labels, self.k)


def generate(config, dist, n, seed):
    """Draw n points per ball; cluster a uses the substream ``(seed, a)``.

    `seed` is an integer or a tuple of integers (the harness passes
    ``(master, cell, trial)``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    key = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
    offsets = np.concatenate([dist.sample(config.m, n, make_rng(*key, a)) for a in range(config.k)])
    labels = np.repeat(np.arange(config.k), n)
    points = offsets + config.centers[labels]
    return LabeledPointCloud(points, labels, n, offsets, config, dist, seed)


def write_cloud(path, cloud):
    """Write the plain-text cloud format: ``m k n`` then ``a i x_1 .. x_m`` rows."""
    labels = np.asarray(cloud.labels)
    k = int(labels.max()) + 1
    n = cloud.n if cloud.n is not None else int(np.bincount(labels).max())
    lines = [f"{cloud.m} {k} {n}"]
    within = np.zeros(len(labels), dtype=int)
    seen = np.zeros(k, dtype=int)
    for idx, a in enumerate(labels):
        seen[a] += 1
        within[idx] = seen[a]
    for a, i, x in zip(labels, within, cloud.points):
        lines.append(f"{a + 1} {i} " + " ".join(f"{v:.17g}" for v in x))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_cloud(path):
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: bad header, expected 'm k n'")
        m, k, n = (int(v) for v in header)
        data = np.loadtxt(fh, ndmin=2)
    if data.shape[1] != m + 2:
        raise ValueError(f"{path}: expected {m + 2} columns, got {data.shape[1]}")
    labels = data[:, 0].astype(int) - 1
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError(f"{path}: cluster labels must lie in 1..{k}")
    return LabeledPointCloud(data[:, 2:].copy(), labels, n)
