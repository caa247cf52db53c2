"""Command-line entry point: ``sdpkmeans {generate,certify,sweep,lemmas,oracle}``."""

import argparse
import sys

import numpy as np

from . import bench
from .certificate import MODES, REPORT_COLUMNS, CertificateDegenerate, build_certificate, evaluate
from .clustering import read_clustering
from .model import BallConfig, RadialDistribution, generate, read_cloud, write_cloud


def _cmd_generate(args):
    if args.centers:
        centers = np.loadtxt(args.centers, ndmin=2)
        if centers.shape != (args.k, args.m):
            raise SystemExit(f"--centers must hold {args.k} rows of {args.m} coordinates")
        config = BallConfig(centers)
    elif args.delta is None:
        raise SystemExit("generate needs --delta or --centers")
    else:
        config = BallConfig.simplex(args.k, args.m, args.delta)
    cloud = generate(config, RadialDistribution(args.dist), args.n, args.seed)
    write_cloud(args.out, cloud)


def _cmd_certify(args):
    cloud = read_cloud(args.input)
    clustering = read_clustering(args.clustering) if args.clustering else cloud.clustering()
    modes = MODES if args.mode == "all" else (args.mode,)
    try:
        parts = build_certificate(cloud.points, clustering)
    except CertificateDegenerate as exc:
        print(f"certificate degenerate: {exc}", file=sys.stderr)
        return 2
    rows = [",".join(REPORT_COLUMNS)] + [evaluate(parts, mode).csv_row() for mode in modes]
    text = "\n".join(rows) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args):
    modes = MODES if args.modes == "all" else tuple(m.strip() for m in args.modes.split(","))
    spec = bench.SweepSpec(
        m=args.m,
        k=args.k,
        dist=args.dist,
        delta_min=args.delta_min,
        delta_max=args.delta_max,
        delta_steps=args.delta_steps,
        n_min=args.n_min,
        n_max=args.n_max,
        n_steps=args.n_steps,
        trials=args.trials,
        modes=modes,
        seed=args.seed,
    )
    cells = bench.run_sweep(spec, workers=args.workers)
    with open(args.out, "w") as fh:
        fh.write(bench.sweep_csv(spec, cells))
    if args.pgm:
        with open(args.pgm, "w") as fh:
            fh.write(bench.pgm_bytes(bench.frequency_grid(spec, cells, spec.modes[0])))


def _cmd_lemmas(args):
    r = bench.lemma_check(args.id, args.m, args.delta, args.n, args.eps, args.trials, args.seed, k=args.k, dist=args.dist)
    print("lemma,trials,failures,failure_rate,worst_margin,slack_failures,mean_quantity,leading_term")
    print(
        f"{r.lemma},{r.trials},{r.failures},{r.failure_rate:.6f},{r.worst_margin:.10g},"
        f"{r.slack_failures},{r.mean_quantity:.10g},{r.leading_term:.10g}"
    )
    if r.notes:
        print(f"# {r.notes}")


def _cmd_oracle(args):
    r = bench.oracle_check(args.m, args.k, args.delta, args.n, args.trials, args.seed, dist=args.dist)
    print("trials,certified,agree,violations")
    print(f"{r.trials},{r.certified},{r.agree},{len(r.violations)}")
    return 1 if r.violations else 0


def build_parser():
    p = argparse.ArgumentParser(prog="sdpkmeans", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a stochastic-ball point cloud")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--delta", type=float, help="simplex spacing (required unless --centers)")
    g.add_argument("--centers", help="k x m whitespace table of ball centers")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dist", choices=("uniform-ball", "uniform-sphere"), default="uniform-ball")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    c = sub.add_parser("certify", help="certify the clustering stored in a point-cloud file")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--mode", choices=MODES + ("all",), default="all")
    c.add_argument("--report", help="CSV output (default: stdout)")
    c.add_argument("--clustering", help="optional 'i a' file overriding the file's labels")
    c.set_defaults(func=_cmd_certify)

    s = sub.add_parser("sweep", help="phase-transition sweep over (delta, n)")
    s.add_argument("--m", type=int, default=6)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--dist", default="uniform-ball")
    s.add_argument("--delta-min", type=float, default=2.0)
    s.add_argument("--delta-max", type=float, default=4.0)
    s.add_argument("--delta-steps", type=int, default=41)
    s.add_argument("--n-min", type=int, default=10)
    s.add_argument("--n-max", type=int, default=200)
    s.add_argument("--n-steps", type=int, default=20)
    s.add_argument("--trials", type=int, default=30)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--modes", default="all", help="comma-separated modes or 'all'")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", required=True)
    s.add_argument("--pgm")
    s.set_defaults(func=_cmd_sweep)

    lm = sub.add_parser("lemmas", help="Monte-Carlo check of a concentration estimate")
    lm.add_argument("--id", required=True, choices=("4.1", "4.3", "4.4", "4.5", "4.6", "4.7", "4.8"))
    lm.add_argument("--m", type=int, default=6)
    lm.add_argument("--k", type=int, default=2)
    lm.add_argument("--delta", type=float, default=3.0)
    lm.add_argument("--n", type=int, default=1000)
    lm.add_argument("--eps", type=float, default=0.1)
    lm.add_argument("--trials", type=int, default=200)
    lm.add_argument("--seed", type=int, default=0)
    lm.add_argument("--dist", default="uniform-ball")
    lm.set_defaults(func=_cmd_lemmas)

    o = sub.add_parser("oracle", help="cross-check certification against brute force")
    o.add_argument("--m", type=int, required=True)
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--delta", type=float, required=True)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--trials", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--dist", default="uniform-ball")
    o.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
