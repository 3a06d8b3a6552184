import json
import os
import subprocess
import sys

import numpy as np
import pytest


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("WEYLKIT_MAX_GROUP", None)
    full_env.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "weylkit", *args],
        capture_output=True,
        text=True,
        env=full_env,
        timeout=300,
    )


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def qubit_channel(tau):
    labels = [((0,), (0,)), ((0,), (1,)), ((1,), (0,)), ((1,), (1,))]
    return {
        "dims": [2],
        "tau": [
            {"m": list(m), "n": list(n), "re": t.real, "im": t.imag}
            for (m, n), t in zip(labels, np.asarray(tau, dtype=complex))
            if t != 0
        ],
    }


@pytest.mark.parametrize(
    "args, expected",
    [
        (("subgroups", "--dims", "2", "--count-only"), "5"),
        (("subgroups", "--dims", "4,2", "--count-only"), "249"),
        (("automorphisms", "--count", "--dims", "4,2"), "147456"),
        (("automorphisms", "--dims", "2"), "6"),
        (("homs", "--dims", "4,2", "--count-only"), "64"),
        (("erasing", "enumerate", "--dims", "2", "--count-only"), "11"),
        (("erasing", "enumerate", "--dims", "2", "--phases", "none", "--count-only"), "5"),
    ],
)
def test_count_goldens(args, expected):
    res = run(*args)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == expected


def test_check_rejects_trace_violation(tmp_path):
    bad = write(tmp_path / "bad.json", qubit_channel([0.9, 0, 0, 0]))
    res = run("channel", "check", "--in", bad)
    assert res.returncode == 2
    assert "trace-preservation violated" in res.stdout + res.stderr


def test_check_accepts_identity(tmp_path):
    good = write(tmp_path / "id.json", qubit_channel([1, 1, 1, 1]))
    res = run("channel", "check", "--in", good)
    assert res.returncode == 0, res.stderr


def test_check_flags_non_cp(tmp_path):
    bad = write(tmp_path / "ncp.json", qubit_channel([1, 1, 1, -1]))
    assert run("channel", "check", "--in", bad).returncode == 2


def test_malformed_inputs(tmp_path):
    (tmp_path / "junk.json").write_text("{not json")
    assert run("channel", "check", "--in", str(tmp_path / "junk.json")).returncode == 2
    dup = qubit_channel([1, 1, 1, 1])
    dup["tau"].append(dup["tau"][0])
    assert run("channel", "check", "--in", write(tmp_path / "dup.json", dup)).returncode == 2
    oob = qubit_channel([1, 0, 0, 0])
    oob["tau"][0]["m"] = [5]
    assert run("channel", "check", "--in", write(tmp_path / "oob.json", oob)).returncode == 2


def test_usage_errors(tmp_path):
    assert run().returncode == 1
    assert run("subgroups").returncode == 1
    assert run("subgroups", "--dims", "1").returncode == 1
    assert run("subgroups", "--dims", "2", "--tol", "-1").returncode == 1
    assert run("channel", "check", "--in", str(tmp_path / "missing.json")).returncode == 1
    assert run("frobnicate").returncode == 1


def test_caps(tmp_path):
    res = run("subgroups", "--dims", "2", "--count-only", "--max-group", "2")
    assert res.returncode == 3
    res = run("subgroups", "--dims", "2", "--count-only", env={"WEYLKIT_MAX_GROUP": "2"})
    assert res.returncode == 3
    res = run("erasing", "enumerate", "--dims", "16,17", "--count-only")
    assert res.returncode == 3
    res = run("automorphisms", "--enumerate", "--dims", "4,2", "--cap", "1000")
    assert res.returncode == 3


def test_tau2lambda_and_back(tmp_path):
    ch = write(tmp_path / "ch.json", qubit_channel([1, 0.5, 0.5, 0.25]))
    out = tmp_path / "lam.json"
    res = run("channel", "tau2lambda", "--in", ch, "--out", str(out))
    assert res.returncode == 0, res.stderr
    lam = json.loads(out.read_text())
    values = [e["value"] for e in lam["lambda"]]
    assert sum(values) == pytest.approx(2)
    back = tmp_path / "back.json"
    res = run("channel", "lambda2tau", "--in", str(out), "--out", str(back))
    assert res.returncode == 0, res.stderr
    res = run("channel", "check", "--in", str(back))
    assert res.returncode == 0


def test_extreme_and_compose(tmp_path):
    res = run("channel", "extreme", "--dims", "3", "--r", "1", "--s", "2", "--out", str(tmp_path / "e.json"))
    assert res.returncode == 0, res.stderr
    res = run("channel", "extreme", "--in", str(tmp_path / "e.json"))
    assert res.returncode == 0
    res = run("channel", "compose", "--in", str(tmp_path / "e.json"), str(tmp_path / "e.json"))
    assert res.returncode == 0
    obj = json.loads(res.stdout)
    assert obj["dims"] == [3]


def test_iterate(tmp_path):
    ch = write(tmp_path / "ch.json", qubit_channel([1, 0, 0, -1]))
    res = run("channel", "iterate", "--in", ch)
    assert res.returncode == 0, res.stderr
    assert "period" in res.stdout


def test_weyl_and_transform(tmp_path):
    res = run("weyl", "--dims", "2", "--m", "0", "--n", "1")
    assert res.returncode == 0, res.stderr
    res = run("transform", "export", "--dims", "2", "--out", str(tmp_path / "t.csv"))
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "t.csv").read_text().count("\n") >= 4


def test_enumerate_roundtrip_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    res = run("erasing", "enumerate", "--dims", "2,2", "--out", str(a))
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == "channels=307 subgroups=" + res.stdout.strip().split("subgroups=")[1]
    assert run("erasing", "enumerate", "--dims", "2,2", "--out", str(b)).returncode == 0
    for f in sorted(os.listdir(a)):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["channels"] == 307 and len(manifest["files"]) == 307
    for entry in manifest["files"][::25]:
        res = run("channel", "check", "--in", str(a / entry["file"]))
        assert res.returncode == 0, res.stderr


def test_kraus_command(tmp_path):
    ch = write(tmp_path / "ch.json", qubit_channel([1, 0, 0, 1]))
    res = run("erasing", "kraus", "--in", ch)
    assert res.returncode == 0, res.stderr
    obj = json.loads(res.stdout)
    assert len(obj["kraus"]) == 2
    assert all(k["probability"] == 0.5 for k in obj["kraus"])
    mixed = write(tmp_path / "mixed.json", qubit_channel([1, 0.5, 0.5, 0.25]))
    assert run("erasing", "kraus", "--in", mixed).returncode == 2


def test_generators_command():
    res = run("erasing", "generators", "--dims", "2")
    assert res.returncode == 0, res.stderr
    obj = json.loads(res.stdout)
    assert len(obj["generators"]) == 3
