import json
import os
import subprocess

import pytest

BIN = os.environ.get("QHECKE_BIN", "qhecke")


def run(*args, env=None):
    e = dict(os.environ)
    e.pop("QHECKE_CACHE_DIR", None)
    if env:
        e.update(env)
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, env=e, timeout=600)


def run_json(*args, **kw):
    r = run(*args, **kw)
    assert r.returncode == 0, r.stderr
    return json.loads(r.stdout)


def values(eig):
    return sorted(tuple(s["values"][k] for k in sorted(s["values"], key=int)) for s in eig)


@pytest.mark.parametrize(
    "args",
    [
        ("classset", "-p", 4),
        ("classset", "-p", 1),
        ("hecke", "-p", 11, "--ell", 11),
        ("hecke", "-p", 11, "--ell", 4),
        ("hecke", "-p", 11, "-N", 2, "--ell", 2),
        ("hecke", "-p", 11, "--ell", 2, "--weight", 120),
        ("hecke", "-p", 11, "--ell", 2, "--format", "xml"),
        ("hecke", "-p", 2, "-N", 3, "--ell", 5),
        ("hecke", "-p", 11, "--ell", 2, "--weight", 1, "--general"),
        ("hecke", "-p", 11),
        ("bogus",),
    ],
)
def test_usage_errors_exit_2(args):
    assert run(*args).returncode == 2


def test_classset_p11():
    out = run_json("classset", "-p", 11)
    assert out["h"] == 2
    assert out["mass"] == "5/12"
    assert out["mass_expected"] == "5/12"
    assert sorted(c["unit_order"] for c in out["classes"]) == [4, 6]


def test_classset_p2():
    out = run_json("classset", "-p", 2)
    assert out["h"] == 1
    assert out["mass"] == "1/24"
    assert out["notes"]


def test_level1_eigensystems_p11():
    out = run_json("hecke", "-p", 11, "--ell", "2,3", "--eigen", "--brandt")
    assert out["mode"] == "level1"
    mats = {r["ell0"]: r["matrix_mod_p"] for r in out["results"]}
    assert sorted(map(sorted, mats[2])) == sorted(map(sorted, [[6, 1], [7, 0]]))
    for r in out["results"]:
        assert all(sum(row) == r["ell0"] + 1 for row in r["brandt_integer"])
    assert values(out["eigensystems"]) == [("[10,0]", "[7,0]"), ("[7,0]", "[5,0]")]
    assert out["eigen_unsplit_dimension"] == 0


def test_p13_single_class():
    out = run_json("hecke", "-p", 13, "--ell", 2)
    assert out["results"][0]["matrix_mod_p"] == [[8]]


def test_level2_weight0_contains_level1():
    lvl1 = run_json("hecke", "-p", 11, "--ell", 3, "--eigen")
    lvl2 = run_json("hecke", "-p", 11, "-N", 2, "--ell", 3, "--weight", 0, "--eigen")
    assert lvl2["mode"] == "weight"
    got = {s["values"]["3"] for s in lvl2["eigensystems"]}
    for s in lvl1["eigensystems"]:
        assert s["values"]["3"] in got


def test_cache_commands(tmp_path):
    d = str(tmp_path)
    assert run("cache", "verify", "-p", 11, "--dir", d).returncode == 1
    out = run_json("cache", "rebuild", "-p", 11, "--dir", d)
    assert out["h"] == 2 and out["status"] == "ok"
    assert run_json("cache", "verify", "-p", 11, "--dir", d)["status"] == "ok"
    path = out["path"]
    with open(path) as f:
        text = f.read()
    with open(path, "w") as f:
        f.write(text[: len(text) // 2])
    assert run("cache", "verify", "-p", 11, "--dir", d).returncode == 1
    assert run_json("cache", "rebuild", "-p", 11, "--dir", d)["status"] == "ok"


def test_cache_hit_and_determinism(tmp_path):
    d = str(tmp_path)
    args = ("hecke", "-p", 23, "--ell", "2,5", "--cache", "--cache-dir", d, "--timing")
    first = run(*args)
    assert first.returncode == 0, first.stderr
    assert "classset computed" in first.stderr
    second = run(*args)
    assert second.returncode == 0
    assert "classset cache hit" in second.stderr
    assert first.stdout == second.stdout
    env_dir = run("hecke", "-p", 23, "--ell", "2,5", "--cache", env={"QHECKE_CACHE_DIR": d})
    assert env_dir.stdout == first.stdout


def test_general_output_is_deterministic_across_threads():
    a = run("hecke", "-p", 11, "-N", 2, "--ell", 3, "--threads", 1)
    b = run("hecke", "-p", 11, "-N", 2, "--ell", 3, "--threads", 4)
    assert a.returncode == 0 and a.stdout == b.stdout
    out = json.loads(a.stdout)
    assert out["mode"] == "general"
    assert out["results"][0]["dimension"] == 2 * 120 * 6


def test_csv():
    r = run("hecke", "-p", 11, "--ell", 2, "--format", "csv")
    assert r.returncode == 0
    lines = r.stdout.strip().splitlines()
    assert lines[0] == "ell0,row,col,s,t"
    assert len(lines) == 5
    assert sorted(int(l.split(",")[3]) for l in lines[1:]) == [0, 1, 6, 7]
