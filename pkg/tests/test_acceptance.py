"""Acceptance suite: one test per acceptance criterion, at the stated tolerances.

Each test prints a single ``CRITERION <id>: PASS|FAIL ...`` line (visible with
``pytest -s``) and asserts the criterion. Seeds are fixed at 0 throughout.
"""

import time

import numpy as np
import pytest

from sdpkmeans.bench import SweepSpec, frequency_grid, lemma_check, oracle_check, run_sweep
from sdpkmeans.certificate import MODES, build_certificate, build_E, certify, lemma42_decomposition
from sdpkmeans.cli import main
from sdpkmeans.clustering import objective_centroid, objective_pairwise
from sdpkmeans.model import BallConfig, RadialDistribution, generate

BALL = RadialDistribution()


def report(cid, ok, detail):
    print(f"CRITERION {cid}: {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def rel_close(a, b, tol=1e-9):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1.0)
    return bool(np.abs(a - b).max(initial=0.0) <= tol * scale)


def test_criterion_1_algebraic_identities():
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    failures = []
    for t in range(100):
        k = int(rng.integers(2, 4))
        m = int(rng.integers(max(1, k - 1), 7))
        n = int(rng.integers(1, 11))
        centers = rng.normal(size=(k, m)) * rng.uniform(1.0, 6.0)
        cloud = generate(BallConfig(centers), BALL, n, (0, t))
        X, c = cloud.points, cloud.clustering()
        p = build_certificate(X, c)
        D = p.D
        tr = float(np.trace(D @ c.partition_matrix()))
        checks = {
            "objectives": rel_close(objective_pairwise(X, c), 2 * objective_centroid(X, c))
            and rel_close(objective_pairwise(X, c), tr),
        }
        nu = (X**2).sum(1)
        one = np.ones(c.N)
        checks["gram"] = rel_close(D, np.outer(nu, one) - 2 * X @ X.T + np.outer(one, nu))
        Qs = p.Q @ c.indicators()
        checks["Q1a"] = bool(np.abs(Qs).max() <= 1e-9 * max(np.abs(p.Q).max(), 1.0))
        same = c.labels[:, None] == c.labels[None, :]
        checks["B"] = rel_close(p.B, p.B.T) and p.B.min() >= 0 and np.all(p.B[same] == 0)
        checks["rho"] = rel_close(p.rho, p.rho.T)
        checks["dual"] = rel_close(p.dual_objective(), -tr)
        ok42 = True
        for a in range(k):
            for b in range(k):
                if a != b:
                    pp, q = lemma42_decomposition(cloud, a, b)
                    L = c.labels
                    lhs = D[np.ix_(L == a, L == b)].sum(1) - D[np.ix_(L == a, L == a)].sum(1)
                    ok42 &= rel_close(lhs, 4 * n * pp + q)
        checks["lemma42"] = ok42
        bad = [name for name, ok in checks.items() if not ok]
        if bad:
            failures.append((t, bad))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 1.0
    assert report(1, ok, f"100 instances, violations={failures[:5]}, {elapsed:.2f}s (limit 1s)")


def test_criterion_2_E_spectrum():
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    failures = 0
    for _ in range(200):
        k = int(rng.integers(1, 7))
        sizes = rng.integers(1, 51, size=k)
        w = np.linalg.eigvalsh(build_E(sizes))
        lam = w[-1]
        rank = int((np.abs(w) > 1e-8 * max(lam, 1.0)).sum())
        ok = rank in (1, 2) and abs(w.sum() - k) <= 1e-8 * k and lam >= k - 1e-8
        if rank == 2:
            ok &= w[0] < -1e-8
        failures += not ok
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 5.0
    assert report(2, ok, f"200 size vectors, failures={failures}, {elapsed:.2f}s (limit 5s)")


def test_criterion_3_oracle_tightness():
    # 50 instances per delta, kn <= 12, mixing k=2 and k=3 shapes
    shapes = [(2, 2, 6), (3, 2, 5), (6, 2, 4), (3, 3, 4), (2, 3, 3)]
    start = time.perf_counter()
    total = certified = 0
    violations = []
    for di, delta in enumerate((2.05, 2.5, 4.0, 8.0)):
        for si, (m, k, n) in enumerate(shapes):
            r = oracle_check(m, k, delta, n, 10, 1000 * di + si)
            total += r.trials
            certified += r.certified
            violations += [(delta, m, k, n, t) for t in r.violations]
    elapsed = time.perf_counter() - start
    ok = total == 200 and not violations and elapsed < 120
    assert report(3, ok, f"{total} instances, {certified} certified, violations={violations}, {elapsed:.1f}s")


def test_criterion_4_desk_scale_recovery():
    start = time.perf_counter()
    counts = {}
    for delta in (3.0, 1.5):
        cfg = BallConfig.simplex(2, 6, delta)
        counts[delta] = sum(
            certify(cloud.points, cloud.clustering()).success
            for cloud in (generate(cfg, BALL, 100, (0, t)) for t in range(30))
        )
    elapsed = time.perf_counter() - start
    ok = counts[3.0] >= 28 and counts[1.5] <= 2 and elapsed < 300
    detail = f"delta=3.0: {counts[3.0]}/30 (need >=28), delta=1.5: {counts[1.5]}/30 (need <=2), {elapsed:.1f}s"
    assert report(4, ok, detail)


@pytest.fixture(scope="module")
def default_sweep():
    spec = SweepSpec(seed=0)
    start = time.perf_counter()
    cells = run_sweep(spec)
    return spec, cells, time.perf_counter() - start


def worst_row_drop(grid, trials):
    worst = 0
    for row in grid:
        s = np.rint(row * trials).astype(int)
        worst = max(worst, int((np.maximum.accumulate(s) - s).max()))
    return worst


@pytest.mark.slow
def test_criterion_5i_rows_monotone(default_sweep):
    spec, cells, elapsed = default_sweep
    drops = {mode: worst_row_drop(frequency_grid(spec, cells, mode), spec.trials) for mode in MODES}
    ok = drops["exact-psd"] <= 2 and elapsed < 3600
    assert report("5(i)", ok, f"largest in-row drop (successes): {drops}, limit 2; sweep {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_5ii_right_of_threshold(default_sweep):
    spec, cells, _ = default_sweep
    line = 2 + 4 / 6
    right = [c for c in cells if c.delta > line and c.n >= 100]
    worst = min(c.successes["exact-psd"] for c in right)
    ok = len(right) > 0 and worst >= 28
    assert report("5(ii)", ok, f"{len(right)} cells right of {line:.3f} with n>=100, min exact-psd {worst}/30")


@pytest.mark.slow
def test_criterion_6_mode_ordering(default_sweep):
    _, cells, _ = default_sweep
    bad = [
        (c.delta, c.n)
        for c in cells
        if not c.successes["corollary-bound"] <= c.successes["operator-bound"] <= c.successes["exact-psd"]
    ]
    assert report(6, not bad, f"{len(cells)} cells, ordering violations={bad}")


@pytest.fixture(scope="module")
def lemma_clock():
    return {"total": 0.0}


@pytest.mark.slow
@pytest.mark.parametrize("lemma", ["4.1", "4.3", "4.8"])
def test_criterion_7_lemma_failures(lemma, lemma_clock):
    start = time.perf_counter()
    r = lemma_check(lemma, m=6, delta=3.0, n=1000, eps=0.1, trials=200, seed=0)
    lemma_clock["total"] += time.perf_counter() - start
    ok = r.failures == 0 and lemma_clock["total"] < 600
    assert report(f"7 ({lemma})", ok, f"{r.failures}/200 failures, worst margin {r.worst_margin:.4g}")


@pytest.mark.slow
def test_criterion_7_lemma45_leading_term(lemma_clock):
    start = time.perf_counter()
    r = lemma_check("4.5", m=6, delta=3.0, n=1000, eps=0.1, trials=200, seed=0)
    lemma_clock["total"] += time.perf_counter() - start
    ok = abs(r.mean_quantity - 3.0) <= 0.1 and lemma_clock["total"] < 600
    detail = f"mean min(M1)/n = {r.mean_quantity:.4f}, target 3.0 +/- 0.1; lemma suite {lemma_clock['total']:.0f}s"
    assert report("7 (4.5)", ok, detail)


def test_criterion_8_determinism(tmp_path, capsys):
    def run(tag):
        out = {}
        cloud = tmp_path / f"cloud{tag}.txt"
        main(["generate", "--m", "6", "--k", "2", "--delta", "3", "--n", "40", "--dist", "uniform-ball", "--seed", "0", "--out", str(cloud)])
        out["generate"] = cloud.read_bytes()
        rep = tmp_path / f"rep{tag}.csv"
        main(["certify", "--in", str(cloud), "--mode", "all", "--report", str(rep)])
        out["certify"] = rep.read_bytes()
        sw = tmp_path / f"sweep{tag}.csv"
        main(["sweep", "--m", "6", "--k", "2", "--dist", "uniform-ball", "--delta-min", "2", "--delta-max", "3.5",
              "--delta-steps", "4", "--n-min", "10", "--n-max", "30", "--n-steps", "3", "--trials", "5",
              "--seed", "0", "--modes", "all", "--out", str(sw)])
        out["sweep"] = sw.read_bytes()
        capsys.readouterr()
        main(["lemmas", "--id", "4.3", "--m", "6", "--delta", "3", "--n", "100", "--eps", "0.1", "--trials", "10", "--seed", "0"])
        main(["oracle", "--m", "2", "--k", "2", "--delta", "3", "--n", "4", "--trials", "10", "--seed", "0"])
        out["stdout"] = capsys.readouterr().out.encode()
        return out

    first, second = run("a"), run("b")
    differ = [key for key in first if first[key] != second[key]]
    assert report(8, not differ, f"commands compared: {sorted(first)}, differing: {differ}")
