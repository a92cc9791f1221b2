import json
import subprocess
import sys
from pathlib import Path

import pytest

BIN = [sys.executable, "-m", "propermaps.cli"]

DISC = {"curves": [{"kind": "circle", "center": [0, 0], "radius": 1.0}],
        "nodes": 256}
ANNULUS = {"curves": [{"kind": "circle", "center": [0, 0], "radius": 0.5},
                      {"kind": "circle", "center": [0, 0], "radius": 1.0}],
           "nodes": 256}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "disc.json").write_text(json.dumps(DISC))
    (d / "annulus.json").write_text(json.dumps(ANNULUS))
    return d


def run(*args, cwd=None):
    return subprocess.run(BIN + list(args), capture_output=True, text=True,
                          cwd=cwd)


@pytest.fixture(scope="module")
def built_maps(workdir):
    r1 = run("grunsky", "build", "--domain", str(workdir / "annulus.json"),
             "--b", "1:0.7", "--b", "2:0.2", "--base", "0.72,0.0",
             "--out", str(workdir / "m1"), "--grid", "12", "12")
    r2 = run("grunsky", "build", "--domain", str(workdir / "annulus.json"),
             "--b", "1:0.7", "--b", "2:3.0", "--base", "0.72,0.0",
             "--out", str(workdir / "m2"), "--grid", "12", "12")
    assert r1.returncode == 0 and r2.returncode == 0, r1.stderr + r2.stderr
    return workdir / "m1" / "map.json", workdir / "m2" / "map.json"


def test_domain_validate(workdir):
    r = run("domain", "validate", "--domain", str(workdir / "disc.json"))
    assert r.returncode == 0
    assert "domain ok" in r.stdout


def test_domain_validate_rejects_garbage(workdir):
    bad = workdir / "bad.json"
    bad.write_text(json.dumps({"curves": [
        {"kind": "circle", "center": [0, 0], "radius": 1.0},
        {"kind": "circle", "center": [3, 0], "radius": 1.0}], "nodes": 64}))
    r = run("domain", "validate", "--domain", str(bad))
    assert r.returncode == 1


def test_grunsky_build_disc(workdir):
    out = workdir / "disc_out"
    r = run("grunsky", "build", "--domain", str(workdir / "disc.json"),
            "--b", "1:0.0", "--out", str(out), "--grid", "16", "16", "--ppm")
    assert r.returncode == 0, r.stderr
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] and report["degree"] == 1
    assert report["domain_hash"] and report["nodes"] == 256
    assert (out / "map.json").exists() and (out / "grid.csv").exists()
    header = (out / "portrait.ppm").read_bytes()[:2]
    assert header == b"P6"
    csv_head = (out / "grid.csv").read_text().splitlines()[0]
    assert csv_head.startswith("x,y,re_f,im_f,disc_abs,near_pole")


def test_grunsky_build_reports_annulus_weights(workdir, built_maps):
    data = json.loads(Path(built_maps[0]).read_text())
    assert abs(data["weights"][0] - 0.5) < 1e-6
    assert data["weights"][1] == 1.0


def test_grunsky_build_missing_point(workdir):
    r = run("grunsky", "build", "--domain", str(workdir / "annulus.json"),
            "--b", "1:0.7", "--base", "0.72,0.0")
    assert r.returncode == 1
    assert "curve 2 has no marked point" in r.stderr


def test_grunsky_certify_and_eval(workdir, built_maps):
    r = run("grunsky", "certify", "--domain", str(workdir / "annulus.json"),
            "--map", str(built_maps[0]))
    assert r.returncode == 0
    out = workdir / "evalout"
    r2 = run("grunsky", "eval", "--domain", str(workdir / "annulus.json"),
             "--map", str(built_maps[0]), "--grid", "10", "10",
             "--out", str(out))
    assert r2.returncode == 0
    assert (out / "grid.csv").exists()


def test_semigroup_combine(workdir, built_maps):
    out = workdir / "comb"
    r = run("semigroup", "combine", "--domain", str(workdir / "annulus.json"),
            "--map", str(built_maps[0]), "--map", str(built_maps[1]),
            "--c", "1,1", "--out", str(out))
    assert r.returncode == 0, r.stderr
    report = json.loads(r.stdout)
    assert report["degree"] == 3 and report["multiplicities"] == [1, 2]
    assert (out / "proper_map.json").exists()


def test_semigroup_combine_negative_weight(workdir, built_maps):
    r = run("semigroup", "combine", "--domain", str(workdir / "annulus.json"),
            "--map", str(built_maps[0]), "--map", str(built_maps[1]),
            "--c", "1,-5")
    assert r.returncode == 1
    assert "nonpositive merged weight" in r.stdout


def test_semigroup_add_remove_round_trip(workdir, built_maps):
    comb = workdir / "comb" / "proper_map.json"
    out_add = workdir / "added"
    r = run("semigroup", "add-point", "--domain", str(workdir / "annulus.json"),
            "--map", str(comb), "--point", "1:2.5", "--c3", "1.0",
            "--out", str(out_add))
    assert r.returncode == 0, r.stderr
    rep = json.loads(r.stdout)
    assert rep["degree"] == 4
    out_rm = workdir / "removed"
    r2 = run("semigroup", "remove-point", "--domain", str(workdir / "annulus.json"),
             "--map", str(out_add / "proper_map.json"), "--point", "1:2.5",
             "--out", str(out_rm))
    assert r2.returncode == 0, r2.stderr
    rep2 = json.loads(r2.stdout.split("\n", 1)[1])
    assert rep2["degree"] == 3


def test_verify_fresh_artifact(workdir, built_maps):
    r = run("verify", "--domain", str(workdir / "annulus.json"),
            "--map", str(built_maps[0]))
    assert r.returncode == 0


def test_verify_tampered_weight(workdir, built_maps):
    data = json.loads(Path(built_maps[0]).read_text())
    data["weights"][0] = -data["weights"][0]
    tampered = workdir / "tampered.json"
    tampered.write_text(json.dumps(data))
    r = run("verify", "--domain", str(workdir / "annulus.json"),
            "--map", str(tampered))
    assert r.returncode == 1


def test_verify_stale_hash(workdir, built_maps):
    changed = workdir / "annulus_changed.json"
    spec = dict(ANNULUS)
    spec["curves"] = [{"kind": "circle", "center": [0, 0], "radius": 0.45},
                      ANNULUS["curves"][1]]
    changed.write_text(json.dumps(spec))
    r = run("verify", "--domain", str(changed), "--map", str(built_maps[0]))
    assert r.returncode == 3


def test_verify_node_mismatch_rebuilds(workdir, built_maps):
    r = run("verify", "--domain", str(workdir / "annulus.json"),
            "--nodes", "512", "--map", str(built_maps[0]))
    assert r.returncode == 0
    report = json.loads(r.stdout)
    assert report["nodes"] == 512
    assert report["convergence_delta"] < 1e-8


def test_determinism_byte_identical(workdir):
    outs = []
    for name in ("d1", "d2"):
        out = workdir / name
        r = run("grunsky", "build", "--domain", str(workdir / "annulus.json"),
                "--b", "1:0.7", "--b", "2:0.2", "--base", "0.72,0.0",
                "--seed", "7", "--out", str(out), "--grid", "8", "8")
        assert r.returncode == 0
        outs.append(out)
    assert (outs[0] / "map.json").read_bytes() == (outs[1] / "map.json").read_bytes()
    assert (outs[0] / "grid.csv").read_bytes() == (outs[1] / "grid.csv").read_bytes()


def test_ahlfors_command(workdir):
    r = run("ahlfors", "--domain", str(workdir / "annulus.json"),
            "--base", "0.72,0.0")
    assert r.returncode == 0, r.stderr
    rep = json.loads(r.stdout)
    assert rep["passed"] and rep["degree"] == 2
    assert rep["boundary_modulus_residual"] < 1e-8
    assert len(rep["zeros_of_szego"]) == 1


def test_threshold_override(workdir, built_maps):
    r = run("grunsky", "certify", "--domain", str(workdir / "annulus.json"),
            "--map", str(built_maps[0]), "--threshold", "properness=1e-30")
    assert r.returncode == 1  # impossible threshold must fail the gate
