"""Experiment harness: phase-transition sweeps, Monte-Carlo lemma checks and
brute-force oracle cross-checks.

Every random instance is keyed by integers only, so results do not depend on
evaluation order or on the number of workers. Sweep trials share their
offsets across delta within a row (common random numbers), which keeps each
row's success curve free of independent binomial noise.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .certificate import (
    MODES,
    CertificateDegenerate,
    build_certificate,
    build_M,
    cross_row_sums,
    distance_matrix,
    evaluate,
    lemma42_decomposition,
)
from .clustering import BRUTE_FORCE_CAP, brute_force
from .model import BallConfig, RadialDistribution, generate

LEMMA_IDS = ("4.1", "4.2", "4.3", "4.4", "4.5", "4.6", "4.7", "4.8")
SWEEP_COLUMNS = ("delta", "n", "trials", "mode", "successes", "frequency")


@dataclass
class SweepSpec:
    m: int = 6
    k: int = 2
    dist: str = "uniform-ball"
    delta_min: float = 2.0
    delta_max: float = 4.0
    delta_steps: int = 41
    n_min: int = 10
    n_max: int = 200
    n_steps: int = 20
    trials: int = 30
    modes: tuple = MODES
    seed: int = 0

    def __post_init__(self):
        self.modes = tuple(self.modes)
        if self.delta_steps < 1 or self.n_steps < 1:
            raise ValueError("grids must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.delta_min <= 0 or self.delta_max < self.delta_min:
            raise ValueError("need 0 < delta_min <= delta_max")
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.k - 1 > self.m:
            raise ValueError(f"cannot place {self.k} equidistant centers in R^{self.m}")
        for mode in self.modes:
            if mode not in MODES:
                raise ValueError(f"unknown mode {mode!r}")
        RadialDistribution(self.dist)

    def deltas(self):
        return np.linspace(self.delta_min, self.delta_max, self.delta_steps)

    def ns(self):
        return np.unique(np.rint(np.linspace(self.n_min, self.n_max, self.n_steps)).astype(int))


@dataclass
class SweepCell:
    delta: float
    n: int
    trials: int
    successes: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def frequency(self, mode):
        return self.successes[mode] / self.trials


def certify_instance(points, clustering, modes):
    """Success flag per mode; a degenerate certificate fails every mode."""
    try:
        parts = build_certificate(points, clustering)
    except CertificateDegenerate:
        return {mode: False for mode in modes}
    return {mode: evaluate(parts, mode).success for mode in modes}


def _run_cell(args):
    spec, row, delta, n = args
    start = time.perf_counter()
    config = BallConfig.simplex(spec.k, spec.m, delta)
    dist = RadialDistribution(spec.dist)
    counts = dict.fromkeys(spec.modes, 0)
    for t in range(spec.trials):
        cloud = generate(config, dist, n, (spec.seed, row, t))
        for mode, ok in certify_instance(cloud.points, cloud.clustering(), spec.modes).items():
            counts[mode] += ok
    return SweepCell(float(delta), int(n), spec.trials, counts, time.perf_counter() - start)


def run_sweep(spec, workers=1, progress=None):
    """Certify the planted clustering on every (delta, n) cell of the grid.

    Cells are ordered n-major, delta-minor. Trial t in the row for the i-th n
    is keyed ``(spec.seed, i, t)`` at every delta: only the center spacing
    changes along a row.
    """
    jobs = []
    for i_n, n in enumerate(spec.ns()):
        for delta in spec.deltas():
            jobs.append((spec, i_n, delta, n))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            cells = list(pool.map(_run_cell, jobs, chunksize=4))
    else:
        cells = []
        for job in jobs:
            cells.append(_run_cell(job))
            if progress is not None:
                progress(cells[-1])
    return cells


def sweep_csv(spec, cells):
    lines = [f"# sdpkmeans {__version__} phase-transition sweep"]
    for key, value in asdict(spec).items():
        if key == "modes":
            value = " ".join(value)
        lines.append(f"# {key}={value}")
    lines.append("# centers: regular simplex, all pairwise distances = delta")
    lines.append(",".join(SWEEP_COLUMNS))
    for cell in cells:
        for mode in spec.modes:
            s = cell.successes[mode]
            lines.append(f"{cell.delta:.10g},{cell.n},{cell.trials},{mode},{s},{s / cell.trials:.6f}")
    return "\n".join(lines) + "\n"


def read_sweep_csv(path):
    """Parse a sweep CSV back into ``{(delta, n, mode): (successes, trials)}``."""
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("delta,"):
                continue
            delta, n, trials, mode, s, _ = line.strip().split(",")
            out[(float(delta), int(n), mode)] = (int(s), int(trials))
    return out


def frequency_grid(spec, cells, mode):
    """Success frequencies as an (n, delta) array, rows following ``spec.ns()``."""
    ns = list(spec.ns())
    grid = np.zeros((len(ns), spec.delta_steps))
    deltas = list(spec.deltas())
    for cell in cells:
        grid[ns.index(cell.n), int(np.argmin(np.abs(np.asarray(deltas) - cell.delta)))] = cell.frequency(mode)
    return grid


def pgm_bytes(grid):
    """ASCII PGM (P2), one pixel per cell, largest n on the top row."""
    img = np.rint(np.clip(grid[::-1], 0, 1) * 255).astype(int)
    rows = [" ".join(str(v) for v in row) for row in img]
    return f"P2\n{img.shape[1]} {img.shape[0]}\n255\n" + "\n".join(rows) + "\n"


@dataclass
class LemmaReport:
    lemma: str
    trials: int
    failures: int
    worst_margin: float
    slack_failures: int = 0
    mean_quantity: float = float("nan")
    leading_term: float = float("nan")
    notes: str = ""

    @property
    def failure_rate(self):
        return self.failures / self.trials


def _pairs(k):
    return [(a, b) for a in range(k) for b in range(k) if a != b]


def _lemma_trial(lemma, cloud, eps, sigma2):
    """(margin, slack_margin, quantity) for one instance; margin < 0 is a failure.

    `margin` checks the leading-order statement (or the explicit bound when
    one is stated); `slack_margin` adds an explicit epsilon slack term.
    """
    cfg = cloud.config
    k, n, m = cfg.k, cloud.n, cfg.m
    X = [cloud.points[cloud.labels == a] for a in range(k)]
    R = [cloud.offsets[cloud.labels == a] for a in range(k)]
    nan = float("nan")

    if lemma == "4.1":
        margins = []
        for a in range(k):
            margins.append(eps - np.linalg.norm(R[a].mean(axis=0)))
            margins.append(eps - abs((R[a] ** 2).sum(axis=1).mean() - sigma2))
        for a, b in _pairs(k):
            O = cfg.midpoint(a, b)
            expected = sigma2 + cfg.distance(a, b) ** 2 / 4.0
            margins.append(eps - abs(((X[a] - O) ** 2).sum(axis=1).mean() - expected))
        mg = float(min(margins))
        return mg, mg, nan

    if lemma == "4.2":
        margins = []
        for a, b in _pairs(k):
            _, q = lemma42_decomposition(cloud, a, b)
            margins.append((6.0 + cfg.distance(a, b)) * n * eps - np.abs(q).max())
        mg = float(min(margins))
        return mg, mg, nan

    D = distance_matrix(cloud.points)
    L = cloud.labels

    def blk(a, b):
        return D[np.ix_(L == a, L == b)]

    if lemma == "4.3":
        dev = max(abs(blk(a, a).sum() / n - 2 * n * sigma2) for a in range(k))
        mg = 4 * n * eps - dev
        return mg, mg, dev / n

    if lemma == "4.4":
        margins = []
        for a, b in _pairs(k):
            dab = cfg.distance(a, b)
            lhs = blk(a, b).sum() - blk(a, a).sum()
            margins.append(lhs - (n * n * dab**2 - (6 + 3 * dab) * n * n * eps))
        mg = float(min(margins))
        return mg, mg, nan

    if lemma == "4.8":
        psi = np.concatenate([X[a] - X[a].mean(axis=0) for a in range(k)]).T
        norm = np.linalg.norm(psi, 2)
        bound = ((1 + eps) * np.sqrt(sigma2) / np.sqrt(m) + eps) * np.sqrt(k * n)
        return float(bound - norm), float(bound - norm), float(norm / np.sqrt(k * n))

    c = cloud.clustering()
    M = build_M(D, c)
    T = cross_row_sums(M, c)
    delta = cfg.delta

    if lemma == "4.5":
        q = min(T[L == a, b].min() for a, b in _pairs(k))
        lead = n * delta * (delta - 2)
        slack = max((10 + cfg.distance(a, b)) * n * eps for a, b in _pairs(k))
        return float(q - lead), float(q - lead + slack), float(q / n)

    if lemma == "4.6":
        margins = []
        for a, b in _pairs(k):
            t = T[L == a, b]
            sq = float(((t - t.mean()) ** 2).sum())
            margins.append(4 * n**3 * cfg.distance(a, b) ** 2 / m - sq)
        mg = float(min(margins))
        return mg, nan, nan

    if lemma == "4.7":
        z = min(T[L == a, b].min() for a, b in _pairs(k))
        margins, slacked = [], []
        for a, b in _pairs(k):
            dab = cfg.distance(a, b)
            rho = T[L == a, b].sum() - n * z
            lead = n * n * (dab**2 - delta**2 + 2 * delta)
            margins.append(rho - lead)
            slacked.append(rho - lead + (20 + 3 * dab + delta) * n * n * eps)
        return float(min(margins)), float(min(slacked)), nan

    raise ValueError(f"unknown lemma {lemma!r}")


def lemma_check(lemma, m=6, delta=3.0, n=1000, eps=0.1, trials=200, seed=0, k=2, dist="uniform-ball"):
    """Monte-Carlo evaluation of one concentration estimate on fresh instances.

    A trial fails when the empirical quantity violates the estimate. For
    estimates whose epsilon constant is left unspecified (4.5, 4.6, 4.7)
    only the leading term is checked; ``slack_failures`` counts violations
    once explicit epsilon slack terms are added back (4.5, 4.7).
    """
    lemma = str(lemma)
    if lemma not in LEMMA_IDS:
        raise ValueError(f"unknown lemma {lemma!r}")
    config = BallConfig.simplex(k, m, delta)
    law = RadialDistribution(dist)
    sigma2 = law.second_moment(m)
    margins, slacks, quantities = [], [], []
    for t in range(trials):
        cloud = generate(config, law, n, (seed, t))
        mg, sl, qt = _lemma_trial(lemma, cloud, eps, sigma2)
        margins.append(mg)
        slacks.append(sl)
        quantities.append(qt)
    margins, slacks, quantities = map(np.asarray, (margins, slacks, quantities))
    lead = delta * (delta - 2) if lemma == "4.5" else float("nan")
    notes = {
        "4.5": "quantity = min(M^(a,b)1)/n; leading term delta(delta-2)",
        "4.6": "epsilon constant unspecified; leading term only",
        "4.7": "leading term n^2(delta_ab^2 - delta^2 + 2 delta)",
        "4.8": "quantity = ||Psi|| / sqrt(N)",
        "4.3": "quantity = max_a |1^T D^(a,a) 1 / n - 2 n sigma^2| / n",
    }.get(lemma, "")
    return LemmaReport(
        lemma,
        trials,
        int((margins < 0).sum()),
        float(margins.min()),
        int((slacks < 0).sum()),
        float(np.nanmean(quantities)) if np.isfinite(quantities).any() else float("nan"),
        lead,
        notes,
    )


@dataclass
class OracleReport:
    trials: int
    certified: int
    agree: int
    violations: list = field(default_factory=list)


def oracle_check(m, k, delta, n, trials, seed, dist="uniform-ball"):
    """Compare exact-psd certification with the brute-force k-means optimum."""
    if k * n > BRUTE_FORCE_CAP:
        raise ValueError(f"k*n must be <= {BRUTE_FORCE_CAP}")
    config = BallConfig.simplex(k, m, delta)
    law = RadialDistribution(dist)
    report = OracleReport(trials, 0, 0)
    for t in range(trials):
        cloud = generate(config, law, n, (seed, t))
        planted = cloud.clustering()
        if not certify_instance(cloud.points, planted, ("exact-psd",))["exact-psd"]:
            continue
        report.certified += 1
        best, _ = brute_force(cloud.points, k)
        if best == planted:
            report.agree += 1
        else:
            report.violations.append(t)
    return report
