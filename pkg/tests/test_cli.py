import json
import subprocess
import sys

import pytest

from rigikit.cli import main
from rigikit.graph_core import complete_bipartite, complete_graph, format_graph, octahedron

from conftest import k4_minus_edge


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json", "--deterministic")
    return code, (json.loads(out) if out else None), err


def test_global_k4(capsys, write):
    path = write("k4.txt", format_graph(complete_graph(4)))
    code, rep, _ = run_json(capsys, "global", "--dim", "2", path)
    assert code == 0 and rep["status"] == "GloballyRigid"
    assert rep["rules"] == ["D2Characterization"]


def test_bodyhinge_global_parallel_pair(capsys, write):
    path = write("h.txt", "2 2\n0 1\n0 1\n")
    code, rep, _ = run_json(capsys, "bodyhinge", "global", "--dim", "3", path)
    assert code == 0 and rep["global"] is True
    per_edge = rep["steps"][0]["payload"]["per_edge"]
    assert per_edge and all(e["ok"] and e["certificate"]["kind"] == "TreePacking" for e in per_edge)


def test_oracle_enumerate_k4_minus_edge(capsys, write):
    path = write("g.txt", format_graph(k4_minus_edge()))
    code, rep, _ = run_json(capsys, "oracle", "enumerate", "--dim", "2", path)
    assert code == 0 and rep["class_count"] == 2


def test_json_is_byte_reproducible(capsys, write):
    path = write("g.txt", format_graph(complete_bipartite(5, 5)))
    outs = [run(capsys, "global", "--dim", "3", "--seed", "4", "--json", "--deterministic", path)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 4


def test_timestamp_only_when_not_deterministic(capsys, write):
    path = write("g.txt", format_graph(complete_graph(3)))
    _, out, _ = run(capsys, "rigid", "--json", path)
    assert "timestamp" in json.loads(out)
    _, out, _ = run(capsys, "rigid", "--json", "--deterministic", path)
    assert "timestamp" not in json.loads(out)


def test_seed_precedence(capsys, write, monkeypatch):
    path = write("g.txt", format_graph(complete_graph(4)))
    monkeypatch.setenv("RIGIKIT_SEED", "17")
    assert run_json(capsys, "rank", path)[1]["seed"] == 17
    assert run_json(capsys, "rank", "--seed", "2", path)[1]["seed"] == 2
    monkeypatch.setenv("RIGIKIT_SEED", "x")
    assert run(capsys, "rank", path)[0] == 1


def test_malformed_input_exit_1(capsys, write):
    path = write("bad.txt", "3 2\n0 1\n1 q\n")
    code, out, err = run(capsys, "rigid", path)
    assert code == 1 and "line 3" in err and out == ""
    code, _, err = run(capsys, "rigid", write("missing.txt", "") + ".nope")
    assert code == 1


def test_parallel_edges_rejected_outside_multigraph_commands(capsys, write):
    path = write("m.txt", "2 2\n0 1\n0 1\n")
    code, _, err = run(capsys, "rank", path)
    assert code == 1 and "parallel" in err
    code, rep, _ = run_json(capsys, "pack", "--trees", "2", path)
    assert code == 0 and rep["packable"]
    assert run_json(capsys, "bodybar", "build", "--dim", "2", path)[0] == 0


def test_probabilistic_verdict_exit_0(capsys, write):
    path = write("g.txt", format_graph(complete_bipartite(5, 5)))
    code, rep, _ = run_json(capsys, "global", "--dim", "3", "--node-budget", "0", "--trials", "1", path)
    assert code == 0 and rep["status"] == "ProbablyNot" and rep["error_bound"] != "0"


def test_invariant_fault_exit_3(capsys, write, monkeypatch):
    from rigikit import cli
    from rigikit.errors import InvariantFault

    def boom(args):
        raise InvariantFault("broken")

    monkeypatch.setitem(cli.COMMANDS, "rigid", boom)
    code, _, err = run(capsys, "rigid", write("g.txt", format_graph(complete_graph(3))))
    assert code == 3 and "broken" in err


def test_unknown_body_hinge_exit_2(capsys, write):
    path = write("h.txt", "2 1\n0 1\n")
    code, rep, _ = run_json(capsys, "bodyhinge", "global", "--dim", "3", path)
    assert code == 2 and rep["status"] == "Unknown"


def test_usage_error_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 1


def test_analysis_commands(capsys, write):
    k4 = write("k4.txt", format_graph(complete_graph(4)))
    km = write("km.txt", format_graph(k4_minus_edge()))
    assert run_json(capsys, "rank", k4)[1]["rank"] == 5
    assert run_json(capsys, "rigid", km)[1]["rigid"] is True
    assert run_json(capsys, "redundant", km)[1]["redundantly_rigid"] is False
    assert run_json(capsys, "vredundant", k4)[1]["vertex_redundantly_rigid"] is True
    assert run_json(capsys, "laman", km)[1]["laman_rigid"] is True
    assert run_json(capsys, "circuit", k4)[1]["circuit"] is True
    assert run_json(capsys, "mcomp", km)[1]["m_connected"] is False
    assert len(run_json(capsys, "ears", k4)[1]["ears"]) == 1
    assert run_json(capsys, "hendrickson", km)[1]["passed"] is False
    assert run(capsys, "laman", "--dim", "3", km)[0] == 1


def test_certify_deconstruct(capsys, write):
    path = write("o.txt", format_graph(octahedron()))
    code, rep, _ = run_json(capsys, "certify", "--deconstruct", path)
    assert code == 0 and rep["verified"] and rep["deconstruction"]
    path = write("km.txt", format_graph(k4_minus_edge()))
    assert run(capsys, "certify", "--deconstruct", path)[0] == 1


def test_builders_and_extensions(capsys, write):
    h = write("h.txt", "2 2\n0 1\n0 1\n")
    code, rep, _ = run_json(capsys, "bodyhinge", "witness", "--dim", "3", h)
    assert code == 0 and all(c["infinitesimally_rigid"] for c in rep["configs"])
    code, rep, _ = run_json(capsys, "bodyhinge", "build", "--dim", "3", h)
    assert rep["graph"]["n"] == 12
    assert run_json(capsys, "bodybar", "check", "--dim", "3", h)[1]["rigid"] is False
    assert run_json(capsys, "bodybar", "global", "--dim", "3", h)[1]["status"] == "NotGloballyRigid"
    assert run_json(capsys, "bodyhinge", "check", "--dim", "3", h)[1]["rigid"] is True
    code, rep, _ = run_json(capsys, "kchain", "build", "--sizes", "4,4,4")
    assert rep["graph"]["n"] == 12
    code, rep, _ = run_json(capsys, "kchain", "check", "--sizes", "4,4,4", "--dim", "3")
    assert rep["status"] == "GloballyRigid"
    k4 = write("k4.txt", format_graph(complete_graph(4)))
    rep = run_json(capsys, "extend", "--one", "0,1", "--extra", "2", k4)[1]
    assert len(rep["graph"]["edges"]) == 8
    rep = run_json(capsys, "extend", "--zero", "0,1", k4)[1]
    assert rep["graph"]["n"] == 5
    assert run(capsys, "extend", "--zero", "0", k4)[0] == 1


def test_combine(capsys, write):
    data = {
        "g1": {"vertices": [0, 1, 2, 3, 4], "edges": [[a, b] for a in range(5) for b in range(a + 1, 5)]},
        "g2": {"vertices": [1, 2, 3, 4, 5], "edges": [[a, b] for a in range(1, 6) for b in range(a + 1, 6)]},
        "x": [1, 2, 3, 4],
        "h": [[1, 2]],
        "witness": {"1": 1, "2": 2, "3": 3, "4": 4, "5": 1},
    }
    code, rep, _ = run_json(capsys, "combine", "--dim", "3", write("c.json", json.dumps(data)))
    assert code == 0 and rep["status"] == "GloballyRigid"
    assert run(capsys, "combine", write("c2.json", "{"))[0] == 1


def test_oracle_probe_and_config(capsys, write):
    km = write("km.txt", format_graph(k4_minus_edge()))
    assert run_json(capsys, "oracle", "probe", km)[1]["status"] == "FoundSecondClass"
    cfg = write("p.json", json.dumps([[0, 0], [1, 0], [0.3, 0.9], [0.6, -0.8]]))
    assert run_json(capsys, "oracle", "enumerate", "--config", cfg, km)[1]["class_count"] == 2
    bad = write("p2.json", json.dumps([[0, 0]]))
    assert run(capsys, "oracle", "enumerate", "--config", bad, km)[0] == 1


def test_sweep(capsys):
    code, rep, _ = run_json(capsys, "sweep", "--max-n", "5")
    assert code == 0
    assert all(not c["failures"] for c in rep["checks"].values())


def test_stdin_and_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "rigikit.cli", "global", "--json", "--deterministic"],
        input=format_graph(complete_graph(4)),
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["status"] == "GloballyRigid"
