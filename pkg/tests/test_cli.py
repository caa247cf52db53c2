import numpy as np
import pytest

from sdpkmeans.cli import main
from sdpkmeans.clustering import Clustering, write_clustering
from sdpkmeans.model import read_cloud


def gen(tmp_path, name="cloud.txt", **kw):
    args = dict(m=3, k=2, delta=4.0, n=10, seed=7)
    args.update(kw)
    out = tmp_path / name
    argv = ["generate", "--out", str(out)]
    for key, value in args.items():
        argv += [f"--{key}", str(value)]
    assert main(argv) == 0
    return out


def test_generate_is_reproducible(tmp_path):
    a = gen(tmp_path, "a.txt")
    b = gen(tmp_path, "b.txt")
    assert a.read_bytes() == b.read_bytes()
    c = gen(tmp_path, "c.txt", seed=8)
    assert c.read_bytes() != a.read_bytes()
    cloud = read_cloud(a)
    assert cloud.points.shape == (20, 3)


def test_generate_sphere(tmp_path):
    path = gen(tmp_path, dist="uniform-sphere", delta=5.0)
    cloud = read_cloud(path)
    centers = np.array([cloud.cluster(a).mean(axis=0) for a in range(2)])
    assert np.linalg.norm(centers[0] - centers[1]) == pytest.approx(5.0, abs=1.0)


def test_generate_from_centers_file(tmp_path):
    centers = tmp_path / "centers.txt"
    centers.write_text("0 0\n6 0\n0 8\n")
    out = tmp_path / "c.txt"
    assert main(["generate", "--m", "2", "--k", "3", "--n", "5", "--centers", str(centers), "--out", str(out)]) == 0
    cloud = read_cloud(out)
    assert np.linalg.norm(cloud.cluster(2).mean(axis=0) - [0, 8]) < 1
    with pytest.raises(SystemExit):
        main(["generate", "--m", "3", "--k", "3", "--n", "5", "--centers", str(centers), "--out", str(out)])
    with pytest.raises(SystemExit):
        main(["generate", "--m", "2", "--k", "2", "--n", "5", "--out", str(out)])


def test_certify_report(tmp_path):
    cloud = gen(tmp_path)
    report = tmp_path / "r.csv"
    assert main(["certify", "--in", str(cloud), "--mode", "all", "--report", str(report)]) == 0
    lines = report.read_text().splitlines()
    assert lines[0] == "mode,success,margin,z,rho_min,lambda_min,psd_tol,rho_tol"
    assert [l.split(",")[0] for l in lines[1:]] == ["exact-psd", "operator-bound", "corollary-bound"]
    assert lines[1].split(",")[1] == "1"
    again = tmp_path / "r2.csv"
    main(["certify", "--in", str(cloud), "--mode", "all", "--report", str(again)])
    assert again.read_bytes() == report.read_bytes()


def test_certify_stdout_and_override(tmp_path, capsys):
    cloud = gen(tmp_path, delta=8.0)
    labels = np.repeat([0, 1], 10)
    labels[[0, 10]] = [1, 0]  # swap one point across
    lab = tmp_path / "lab.txt"
    write_clustering(lab, Clustering(labels))
    assert main(["certify", "--in", str(cloud), "--mode", "exact-psd", "--clustering", str(lab)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 2 and out[1].startswith("exact-psd,0,")


def test_certify_rejects_unknown_mode(tmp_path):
    cloud = gen(tmp_path)
    with pytest.raises(SystemExit):
        main(["certify", "--in", str(cloud), "--mode", "fast"])


def sweep_argv(out, pgm=None):
    argv = ["sweep", "--m", "6", "--k", "2", "--dist", "uniform-ball", "--delta-min", "2", "--delta-max", "3"]
    argv += ["--delta-steps", "3", "--n-min", "5", "--n-max", "10", "--n-steps", "2", "--trials", "4"]
    argv += ["--seed", "3", "--modes", "exact-psd,operator-bound", "--out", str(out)]
    if pgm:
        argv += ["--pgm", str(pgm)]
    return argv


def test_sweep_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    pgm = tmp_path / "f.pgm"
    assert main(sweep_argv(a, pgm)) == 0
    assert main(sweep_argv(b)) == 0
    assert a.read_bytes() == b.read_bytes()
    body = [l for l in a.read_text().splitlines() if not l.startswith("#")]
    assert len(body) == 1 + 3 * 2 * 2
    assert pgm.read_text().splitlines()[:3] == ["P2", "3 2", "255"]


def test_lemmas_output(capsys):
    assert main(["lemmas", "--id", "4.3", "--m", "6", "--delta", "3", "--n", "200", "--eps", "0.1", "--trials", "5", "--seed", "0"]) == 0
    first = capsys.readouterr().out
    lines = first.splitlines()
    assert lines[0].startswith("lemma,trials,failures")
    assert lines[1].startswith("4.3,5,0,")
    main(["lemmas", "--id", "4.3", "--m", "6", "--delta", "3", "--n", "200", "--eps", "0.1", "--trials", "5", "--seed", "0"])
    assert capsys.readouterr().out == first


def test_lemmas_rejects_unlisted_id():
    with pytest.raises(SystemExit):
        main(["lemmas", "--id", "4.2"])


def test_oracle_output(capsys):
    assert main(["oracle", "--m", "2", "--k", "2", "--delta", "6", "--n", "4", "--trials", "10", "--seed", "0"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "10,10,10,0"


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    out = tmp_path / "c.txt"
    cmd = [sys.executable, "-m", "sdpkmeans", "generate", "--m", "2", "--k", "2", "--delta", "3", "--n", "2", "--out", str(out)]
    subprocess.run(cmd, check=True)
    assert out.read_text().splitlines()[0] == "2 2 2"
