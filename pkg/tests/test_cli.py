import json
import subprocess
import sys

import pytest

from kronspan.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, dispatch, main, render
from kronspan.compositions import w_support
from kronspan.fields import QQ
from kronspan.tensor import SparseTensor3
from kronspan.tensor_io import read_tensor, to_json_obj, write_tensor


def run(*argv):
    code, report = dispatch(list(argv))
    return code, report


def ok(*argv):
    code, report = run(*argv)
    assert code == EXIT_OK, report
    return report["result"]


def test_power_verify_example():
    res = ok("power", "verify", "--d", "2", "--q", "3", "--trials", "100", "--seed", "7")
    assert res["all_passed"] and res["trials"] == 100


def test_secant_kernel_example():
    res = ok("secant", "kernel", "--d", "2", "--r", "1", "--p", "2")
    assert res["kernel_dimension"] == 9


def test_bound_sigma_example():
    res = ok("bound", "sigma", "--omega", "2.371866")
    assert res["exponent_bound"] == pytest.approx(1.581244, abs=1e-6)


def test_seed_is_mandatory():
    code, report = run("power", "verify", "--d", "2", "--q", "2")
    assert code == EXIT_USAGE and "seed" in report["error"]["message"]


def test_exit_codes():
    assert run("nonsense")[0] == EXIT_USAGE
    assert run("compose", "count", "--d", "2")[0] == EXIT_USAGE
    assert run("--budget", "10", "tg", "build", "--g", "1,1,1:1;1,1,2:1;1,2,1:1;2,1,1:1")[0] == EXIT_BUDGET
    code, report = run("tight", "verify", "--support", "w", "--cert", '{"alpha":[0,-1],"beta":[0,-1],"gamma":[0,0]}')
    assert code == EXIT_VERIFY and report["result"]["valid"] is False


def test_compose_verbs():
    assert ok("compose", "count", "--support", "full", "--d", "2", "--q", "3")["count"] == 120
    lst = ok("compose", "list", "--support", "w", "--q", "2")
    assert lst["count"] == 6 and lst["compositions"][0] == [2, 0, 0]
    assert ok("compose", "rank", "--support", "w", "--counts", "0,0,2")["rank"] == 5
    assert ok("compose", "unrank", "--support", "w", "--q", "2", "--index", "5")["counts"] == [0, 0, 2]


def test_tg_verbs(tmp_path):
    cw = "1,1,2:1;1,2,1:1;2,1,1:1"
    res = ok("tg", "build", "--g", cw, "--compressed")
    assert res["dims"] == [3, 3, 3] and res["nnz"] == 6
    assert ok("tg", "entry", "--g", cw, "--I", "1,1,2", "--J", "1,2,1", "--K", "2,1,1")["value"] == 1
    assert ok("tg", "entry", "--g", cw, "--I", "1,1,1", "--J", "1,2,1", "--K", "2,1,1")["value"] == 0
    assert ok("tg", "orbit-check", "--g", cw)["orbit_size"] == 6
    out = tmp_path / "t.txt"
    assert main(["tg", "build", "--g", cw, "--output", str(out)]) == 0
    assert read_tensor(out).nnz == 6


def test_interpolate():
    idx = ok("compose", "rank", "--support", "w", "--counts", "1,1,1")["rank"]
    res = ok("--field", "Q", "interpolate", "--support", "w", "--q", "3", "--index", str(idx))
    assert res["verified"] and res["composition"] == [1, 1, 1]
    assert ok("--field", "Q", "interpolate", "--support", "w", "--q", "2")["verified_all"]
    assert ok("--field", "Q", "--seed", "1", "interpolate", "--support", "w", "--q", "2", "--points", "random")["verified_all"]


def test_tight_verbs():
    res = ok("tight", "decide", "--support", "w")
    assert res["tight"]
    cert = json.dumps(res["certificate"])
    assert ok("tight", "verify", "--support", "w", "--cert", cert)["valid"]
    cube = ok("tight", "decide", "--support", "full", "--d", "2")
    assert not cube["tight"] and "witness" in cube
    assert ok("tight", "enumerate", "--d", "2", "--max-size", "1")["count"] == 8


def test_universal_verbs(tmp_path):
    stats = ok("universal", "stats", "--kind", "diag", "--d", "2")
    assert stats["block_count"] == 245157
    res = ok("--seed", "3", "universal", "entry", "--kind", "diag", "--d", "2", "--random", "5")
    assert len(res["entries"]) == 5 and all(e["value"] in (0, 1) for e in res["entries"])
    one = ok("universal", "entry", "--kind", "ud", "--d", "1", "--q", "1", "--coord", "1,1,1")
    assert one["entries"][0]["value"] == 1
    out = tmp_path / "u.json"
    assert main(["universal", "build", "--kind", "ud", "--d", "2", "--q", "2", "--output", str(out)]) == 0
    assert read_tensor(out).nnz == 64
    built = ok("universal", "build", "--kind", "u", "--support", "w", "--q", "2")
    assert built["zero_one"] and built["nnz"] == 9


def test_mm_verbs(tmp_path):
    assert ok("mm", "build", "--n", "2")["flattening_ranks"] == [4, 4, 4]
    assert ok("--seed", "1", "mm", "degenerate-verify", "--d", "2")["degenerates_to_cube"]
    assert ok("--seed", "1", "mm", "degenerate-verify", "--support", "w")["localized"]
    path = tmp_path / "w.txt"
    write_tensor(SparseTensor3((2, 2, 2), {t: 1 for t in w_support()}, QQ), path)
    assert ok("mm", "degenerate-verify", "--tensor", str(path))["degenerates_to_cube"]


def test_bound_verbs():
    tg = ok("bound", "tg", "--support", "full", "--d", "2", "--q", "3", "--index", "0")
    assert tg["value"] == "5880"
    tg2 = ok("bound", "tg", "--support", "full", "--d", "2", "--q", "3", "--index", "0", "--mm-rank", "4=48")
    assert tg2["value"] == str(48 * 120)
    basis = ok("bound", "basis", "--r", str(2**100), "--domain-size", "8", "--q", "100", "--d", "2")
    assert basis["value"].startswith("2.54209")


def test_rank_verbs(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("dims 2 2 2\nfield 2\n1 1 2 1\n1 2 1 1\n2 1 1 1\n")
    assert ok("rank", "exact", "--tensor", str(path))["rank"] == 3
    assert ok("rank", "flatten", "--tensor", str(path))["flattening_ranks"] == [2, 2, 2]
    code, _ = run("rank", "exact", "--tensor", str(tmp_path / "missing.txt"))
    assert code == EXIT_USAGE


def test_secant_verbs(tmp_path):
    mtx = tmp_path / "n.mtx"
    res = ok("secant", "build", "--d", "2", "--r", "2", "--p", "2", "--export", str(mtx))
    assert res["columns"] == 36 and mtx.exists()
    assert ok("secant", "bound", "--d", "2", "--n", "2", "--p", "2")["value"] == "12"
    assert run("secant", "bound", "--d", "2", "--n", "1", "--p", "2")[0] == EXIT_VERIFY
    paper = ok("secant", "bound", "--d", "7", "--n", "18", "--p", "186999", "--assume")
    assert float(paper["value"]) < 18.25
    greedy = ok("--seed", "4", "secant", "greedy", "--d", "2", "--p", "2", "--max-rank", "2")
    assert greedy["full_span"] and greedy["spanning_count"] == 36
    sub = tmp_path / "sub.json"
    basis = [to_json_obj(SparseTensor3((2, 2, 2), {t: 1}, QQ)) for t in w_support()]
    samples = [{"tensor": to_json_obj(SparseTensor3((2, 2, 2), {t: v for t, v in zip(w_support(), vals)}, QQ)), "rank": 3}
               for vals in [(1, 2, 3), (2, 5, 1), (7, 1, 4), (3, 3, 8), (1, 9, 2), (5, 4, 6), (2, 2, 9)]]
    sub.write_text(json.dumps({"basis": basis, "samples": samples}))
    res = ok("--field", "Q", "--seed", "0", "secant", "greedy", "--d", "2", "--p", "2", "--subspace", str(sub))
    assert res["full_span"] and res["target_dimension"] == 6


def test_batch(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("[]")
    res = ok("batch", str(empty))
    assert res["passed"] and res["count"] == 0
    items = [
        ["bound", "sigma", "--omega", "2.371866"],
        ["secant", "kernel", "--d", "2", "--r", "2", "--p", "2"],
        ["tight", "decide", "--support", "w"],
    ]
    good = tmp_path / "good.json"
    good.write_text(json.dumps(items))
    res = ok("batch", str(good), "--workers", "2")
    assert [it["argv"] for it in res["items"]] == items
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"items": [{"argv": items[0]}, {"argv": ["tight", "verify", "--support", "w", "--cert",
                                                                        '{"alpha":[0,0],"beta":[0,1],"gamma":[0,1]}']}]}))
    code, report = run("batch", str(bad))
    assert code == EXIT_VERIFY and report["result"]["failed_items"] == [1]


def test_replay_determinism():
    argv = ["--seed", "11", "secant", "greedy", "--d", "2", "--p", "2", "--max-rank", "2"]
    a, b = dispatch(argv)[1], dispatch(argv)[1]
    a.pop("meta"), b.pop("meta")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_text_rendering_and_output_file(tmp_path, capsys):
    code, report = dispatch(["--format", "text", "compose", "count", "--d", "2", "--q", "2"])
    assert "count: 36" in render(report, "text")
    out = tmp_path / "r.json"
    assert main(["--output", str(out), "compose", "count", "--d", "2", "--q", "2"]) == 0
    assert json.loads(out.read_text())["result"]["count"] == 36
    main(["compose", "count", "--d", "2", "--q", "2"])
    assert json.loads(capsys.readouterr().out)["exit_code"] == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kronspan.cli", "bound", "sigma"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["exponent_bound"] == pytest.approx(1.581244, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["compose", "count", "--d", "2"],
    ["tg", "entry", "--g", "1,1,1:2"],
    ["tight", "decide"],
    ["tight", "verify", "--support", "w"],
    ["tight", "enumerate"],
    ["universal", "stats", "--kind", "ud", "--d", "2"],
    ["mm", "build"],
    ["bound", "tg"],
])
def test_missing_options_are_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE
