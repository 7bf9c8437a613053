import json
import subprocess
import sys

import pytest

from combench import mis, network
from combench.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_marketsplit_generate_then_check_planted(tmp_path, capsys):
    inst = tmp_path / "ms.txt"
    assert main(["generate", "marketsplit", "--m", "3", "--D", "50", "--seed", "4", "-o", str(inst)]) == 0
    code, out = run(capsys, "check", "marketsplit", str(inst), "--solution", "planted")
    assert code == 0 and out.startswith("STATUS Feasible")


def test_infeasible_exit_code_and_json(tmp_path, capsys):
    g = tmp_path / "g.gph"
    g.write_text(mis.write_gph(mis.Graph(3, frozenset({(0, 1), (1, 2)}))))
    s = tmp_path / "s.txt"
    s.write_text("1 2\n")
    code, _ = run(capsys, "check", "mis", str(g), "--format", "json")
    assert code == 2
    code, out = run(capsys, "check", "mis", str(g), str(s), "--format", "json")
    payload = json.loads(out)
    assert code == 1 and payload["status"] == "Infeasible"
    assert payload["violations"][0]["id"] == "edge(1,2)"


def test_usage_errors_exit_two(capsys):
    assert main(["check", "nonsense"]) == 2
    assert main(["generate", "network"]) == 2
    capsys.readouterr()


def test_check_topology(tmp_path, capsys):
    g = tmp_path / "g.txt"
    assert main(["generate", "topology", "--n", "15", "--d", "4", "-o", str(g)]) == 0
    code, out = run(capsys, "check-topology", "15", "4", "2", str(g))
    assert code == 0 and "STATUS Feasible" in out


def test_network_trivial_solution_checks(tmp_path, capsys):
    T = network.DemandMatrix(((0, 2, 1), (3, 0, 4), (1, 1, 0)))
    d = tmp_path / "d.txt"
    d.write_text(network.write_demands(T))
    sol = tmp_path / "sol.txt"
    assert main(["generate", "network", "--demands", str(d), "--p", "1", "-o", str(sol)]) == 0
    code, out = run(capsys, "check", "network", str(d), str(sol), "--p", "1")
    assert code == 0 and f"OBJECTIVE {network.ring_load(T)}" in out


def test_batch_keeps_input_order(tmp_path, capsys):
    lines = []
    for seed in range(4):
        inst = tmp_path / f"r{seed}.vrp"
        main(["generate", "routing", "--n", "6", "--K", "2", "--seed", str(seed), "-o", str(inst)])
        sol = tmp_path / f"r{seed}.sol"
        sol.write_text("Route #1: 1 2 3 4 5 6\n")
        lines.append(f"{inst} {sol}")
    batch = tmp_path / "batch.txt"
    batch.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    code, out = run(capsys, "check", "routing", "--batch", str(batch), "--threads", "3")
    files = [ln.split(" ", 1)[1] for ln in out.splitlines() if ln.startswith("FILE")]
    assert files == lines and code == 1


def test_convert_labs_and_solve(tmp_path, capsys):
    q = tmp_path / "labs.qubo"
    assert main(["convert", "labs", "--n", "6", "--to", "qubo", "-o", str(q)]) == 0
    code, out = run(capsys, "solve", str(q))
    assert code == 0 and out.startswith("OBJECTIVE 7\n")
    code, out = run(capsys, "stats", str(q))
    assert code == 0 and out.startswith("VARIABLES ")


def test_convert_routing_model_and_milp(tmp_path, capsys):
    inst = tmp_path / "r.vrp"
    main(["generate", "routing", "--n", "4", "--K", "2", "--Q", "20", "-o", str(inst)])
    model = tmp_path / "r.model"
    assert main(["convert", "routing", str(inst), "-o", str(model)]) == 0
    code, out = run(capsys, "solve", str(model), "--method", "milp", "--time-limit-s", "30")
    assert code == 0 and out.startswith("OBJECTIVE ")


def test_report_success(tmp_path, capsys):
    runs = tmp_path / "runs.txt"
    runs.write_text("1 100\n1 101\n1 110\n0\n")
    code, out = run(capsys, "report", "success", str(runs), "--epsilon", "0.01")
    assert code == 0 and "FEASIBLE 3" in out and "SUCCESSFUL 2" in out and "BEST 100" in out


@pytest.mark.parametrize("cls", ["sports", "birkhoff", "steiner", "portfolio", "labs", "mis"])
def test_generate_runs(cls, tmp_path):
    assert main(["generate", cls, "--n", "4", "-o", str(tmp_path / "out")]) == 0


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "combench", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "generate" in out.stdout
