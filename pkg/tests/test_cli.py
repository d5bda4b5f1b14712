import json

import pytest

from secnc.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mincut(capsys, data_dir):
    assert run(capsys, "mincut", data_dir / "separable_butterfly.graph", "--subset", "1,2")[:2] == (0, "4\n")
    assert run(capsys, "mincut", data_dir / "single_edge.graph")[:2] == (0, "1\n")
    assert run(capsys, "mincut", data_dir / "single_edge.graph", "--subset", "")[0] == 2


def test_input_errors(capsys, tmp_path, data_dir):
    bad = tmp_path / "bad.graph"
    bad.write_text("edge S\n")
    assert run(capsys, "mincut", bad)[0] == 2
    assert run(capsys, "mincut", tmp_path / "missing.graph")[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2


def test_region_outputs(capsys, data_dir):
    code, out, _ = run(capsys, "region", data_dir / "direct_edge.graph", "-k", 1, "--format", "csv")
    assert code == 0 and out.splitlines() == ["R1,R2", "0,0", "0,2", "1,0", "1,1"]
    _, outer, _ = run(capsys, "region", data_dir / "direct_edge.graph", "-k", 0)
    _, uns, _ = run(capsys, "region", data_dir / "direct_edge.graph", "--which", "unsecure")
    assert json.loads(outer)["constraints"] == json.loads(uns)["constraints"]
    _, tp, _ = run(capsys, "region", data_dir / "direct_edge.graph", "-k", 1, "--which", "two-phase")
    assert "R2 <= 3/2" in json.loads(tp)["text"]


def test_star_region(capsys, data_dir):
    code, out, _ = run(capsys, "region", data_dir / "nonseparable_three_dest.graph", "--which", "star")
    data = json.loads(out)
    assert code == 0 and not data["separable"]
    assert {"subset": [1, 2, 3], "value": -1} in data["star"]


def test_scheme_two_dest(capsys, data_dir):
    code, out, _ = run(capsys, "scheme", "two-dest", data_dir / "separable_butterfly.graph", "-k", 2)
    data = json.loads(out)
    assert code == 0 and data["achieved"] == ["1", "1"]
    assert "secure: pass (all C(12,2) = 66 subsets)" in data["report"]


def test_scheme_is_deterministic(capsys, data_dir, monkeypatch):
    args = ("scheme", "two-dest", data_dir / "separable_butterfly.graph", "-k", 1, "--seed", 4)
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
    monkeypatch.setenv("SECNC_SEED", "4")
    assert run(capsys, "scheme", "two-dest", data_dir / "separable_butterfly.graph", "-k", 1, "--seed", 99)[1] == first


def test_scheme_combination(capsys, data_dir):
    code, out, _ = run(capsys, "scheme", "combination", data_dir / "joint_coding.comb", "-k", 3, "--target", "1,1,1")
    assert code == 0 and "secure: pass (all C(18,3) = 816 subsets)" in json.loads(out)["report"]
    code, out, _ = run(capsys, "scheme", "combination", data_dir / "joint_coding.comb", "-k", 3, "--target", "0,0,0")
    assert code == 0
    assert run(capsys, "scheme", "combination", data_dir / "mixed_membership.comb", "-k", 2, "--target", "2,2,0")[0] == 1


def test_scheme_two_phase(capsys, data_dir):
    code, out, _ = run(capsys, "scheme", "two-phase", data_dir / "direct_edge.graph", "-k", 1, "--target", "2,1")
    data = json.loads(out)
    assert code == 0 and data["achieved"] == ["1", "1/2"] and len(data["rounds"]) == 2
    assert run(capsys, "scheme", "two-phase", data_dir / "direct_edge.graph", "-k", 2, "--target", "2,1")[0] == 1


def test_verify(capsys, data_dir, tmp_path):
    code, out, _ = run(capsys, "verify", data_dir / "joint_coding.graph", data_dir / "joint_coding_gf7.code.json", "-k", 3)
    assert code == 0 and "oracle: agrees (brute force says secure)" in out
    clear = tmp_path / "clear.json"
    clear.write_text(json.dumps({"q": 3, "message_dims": [1], "key_dim": 0, "vectors": {"0": [1]}}))
    code, out, _ = run(capsys, "verify", data_dir / "single_edge.graph", clear, "-k", 1)
    assert code == 1 and "leaking edge set [0]" in out


def test_search(capsys, data_dir):
    code, out, _ = run(capsys, "search", data_dir / "two_source_merge.graph", "--target", "1,0", "-k", 1)
    assert code == 1 and json.loads(out)["verdict"] == "NoCodeExists"
    code, out, _ = run(capsys, "search", data_dir / "key_relay_reversed.graph", "--target", "1,0", "-k", 1)
    assert code == 0 and json.loads(out)["verdict"] == "Found"


def test_erasure(capsys, data_dir, tmp_path):
    code, out, _ = run(capsys, "erasure", "y", data_dir / "erasure_y.params", "--sweep", 11)
    rows = out.splitlines()
    assert code == 0 and rows[0] == "R1,R2,k1,k2,k3,e" and len(rows) == 12
    dead = tmp_path / "dead.params"
    dead.write_text("param delta1 0.2\nparam delta1E 0.5\nparam delta2 0.2\nparam delta2E 0.5\n"
                    "param delta3 1\nparam delta3E 0.5\n")
    code, out, _ = run(capsys, "erasure", "y", dead)
    assert code == 1 and out.splitlines()[1:] == ["0,0,0,0,0,0"]


@pytest.mark.parametrize("variant,code,text", [
    ("bf1", 1, "secure: empty"),
    ("single_source", 0, "symmetric R <= 1"),
    ("bf2", 0, "symmetric R <= 1/2"),
])
def test_butterfly(capsys, variant, code, text):
    got, out, _ = run(capsys, "butterfly", variant, "1")
    assert got == code and text in out


def test_separate(capsys, data_dir):
    code, out, _ = run(capsys, "separate", data_dir / "separable_butterfly.graph")
    assert code == 0 and json.loads(out)["g1"] == [0, 1]


def test_output_file(capsys, data_dir, tmp_path):
    dest = tmp_path / "region.csv"
    assert run(capsys, "region", data_dir / "direct_edge.graph", "-k", 1, "--format", "csv", "-o", dest)[0] == 0
    assert dest.read_text().startswith("R1,R2")
