import json
import pathlib
import subprocess
import sys
from types import SimpleNamespace

import pytest

from k3fano import cli
from k3fano.graph import ColoredGraph, read_records
from k3fano.targets import TargetRun


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_fano_of_a_one_line_lattice(tmp_path, capsys):
    cfg = write(tmp_path, "lat.json", {"gram": [[8, 1], [1, -2]], "h": [1, 0]})
    out = tmp_path / "run"
    assert cli.main(["fano", cfg, "--out", str(out)]) == cli.EXIT_OK
    man = json.loads((out / "manifest.json").read_text())
    assert man["lines"] == 1 and man["vertices"] == 1
    (g,) = read_records(out / "outputs.jsonl")
    assert g.n == 1 and g.color == (1,)


def test_fano_of_a_graph_with_kernel(tmp_path):
    cfg = write(tmp_path, "fo.yaml", {"graph": ColoredGraph.from_edges(16, []).to_record(),
                                      "kernel": {"golay": "K_64"}, "degree": 8})
    out = tmp_path / "run"
    assert cli.main(["fano", cfg, "--out", str(out)]) == cli.EXIT_OK
    assert json.loads((out / "manifest.json").read_text())["lines"] == 32


def test_odd_diagonal_is_an_input_error(tmp_path, capsys):
    cfg = write(tmp_path, "odd.json", {"gram": [[3, 1], [1, -2]], "h": [1, 0]})
    assert cli.main(["fano", cfg]) == cli.EXIT_INPUT
    assert "odd diagonal" in capsys.readouterr().err


@pytest.mark.parametrize("data", [{"gram": [[2, 1], [0, -2]], "h": [1, 0]},
                                  {"gram": [[2, 1], [1, -2]]},
                                  {"gram": [[2, "x"], ["x", -2]], "h": [1, 0]},
                                  {"nothing": 1},
                                  ["not", "a", "mapping"]])
def test_malformed_inputs(tmp_path, data):
    assert cli.main(["fano", write(tmp_path, "bad.json", data)]) == cli.EXIT_INPUT


def test_missing_file_and_missing_config(tmp_path):
    assert cli.main(["fano", str(tmp_path / "absent.json")]) == cli.EXIT_INPUT
    assert cli.main(["saturate"]) == cli.EXIT_INPUT


def test_unknown_target_is_rejected():
    with pytest.raises(SystemExit) as exc:
        cli.main(["reproduce", "no-such-target"])
    assert exc.value.code != 0


def test_reproduce_writes_manifest(tmp_path, capsys):
    out = tmp_path / "patterns"
    assert cli.main(["reproduce", "patterns", "--out", str(out)]) == cli.EXIT_OK
    printed = capsys.readouterr().out
    assert "PASS |pat(~D4)|: expected 441, got 441" in printed
    man = json.loads((out / "manifest.json").read_text())
    assert man["verdict"] == "match" and all(c["ok"] for c in man["checks"])
    assert cli.main(["report", str(out)]) == cli.EXIT_OK


def test_mismatch_and_unsettled_exit_codes(tmp_path, capsys):
    args = SimpleNamespace(out=str(tmp_path / "m"), config=None)
    bad = TargetRun("demo")
    bad.add("count", 3, 4)
    assert cli._report_run(bad, args) == cli.EXIT_MISMATCH
    assert "FAIL count: expected 3, got 4" in capsys.readouterr().out
    assert cli.main(["report", str(tmp_path / "m")]) == cli.EXIT_MISMATCH
    open_run = TargetRun("demo")
    open_run.add("count", 3, 3)
    open_run.unsettled.append(ColoredGraph.empty())
    assert cli._report_run(open_run, SimpleNamespace(out=None, config=None)) == cli.EXIT_UNSETTLED


def test_run_hash_ignores_worker_count(tmp_path):
    a = cli.manifest("extend", {"m": 3, "workers": 1}, [])
    b = cli.manifest("extend", {"m": 3, "workers": 4}, [])
    c = cli.manifest("extend", {"m": 2, "workers": 1}, [])
    assert a["run_hash"] == b["run_hash"] != c["run_hash"]


def test_extend_on_a_quadrangle(tmp_path):
    cfg = write(tmp_path, "ext.json", {"graph": ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).to_record(),
                                       "m": 3, "r_max": 2, "initial": {"kinds": ["line"], "max_support": 2}})
    out = tmp_path / "ext"
    assert cli.main(["extend", "--config", cfg, "--out", str(out)]) == cli.EXIT_OK
    man = json.loads((out / "manifest.json").read_text())
    assert man["survivor_counts"][0] >= 1
    assert len(read_records(out / "outputs.jsonl")) == man["outputs"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "k3fano.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "reproduce" in res.stdout


CONFIGS = pathlib.Path(__file__).parent.parent / "configs"


@pytest.mark.parametrize("argv", [["fano", "one_line.yaml"], ["fano", "kummer64.yaml"],
                                  ["extend", "--config", "quadrangle_extend.yaml"],
                                  ["saturate", "--config", "triangle_path_saturate.yaml"]])
def test_shipped_configs_run(tmp_path, argv):
    argv = [str(CONFIGS / a) if a.endswith(".yaml") else a for a in argv]
    assert cli.main(argv + ["--out", str(tmp_path / "o")]) == cli.EXIT_OK
    assert (tmp_path / "o" / "manifest.json").exists()
