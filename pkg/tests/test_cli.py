import csv
import json

import pytest

from moroute.cli import main
from moroute.instances import bundled_path, load_instance
from moroute.pareto import brute_force_front
from moroute.qubo import feasibility, to_bits


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_pareto_rows(capsys):
    code, out, _ = run(["pareto", "--instance", "k4"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 1 + 4
    _, out, _ = run(["pareto", "--instance", "square"], capsys)
    assert len(out.strip().splitlines()) == 1 + 3
    _, out, _ = run(["pareto", "--instance", "triangular"], capsys)
    assert len(out.strip().splitlines()) == 1 + 5


def test_generate_is_deterministic_and_encodes(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["generate", "complete", "4", "--seed", "7", "--out", str(a)]) == 0
    assert main(["generate", "complete", "4", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(["encode", "--instance", str(a), "--weights", "0.25,0.25,0.25,0.25"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 8 and len(doc["variables"]) == 8 and "scalarized" in doc


def test_generate_bundled_copy(capsys):
    _, out, _ = run(["generate", "--bundled", "k4"], capsys)
    assert out == bundled_path("k4").read_text()


def test_estimate_record(capsys):
    _, out, _ = run(["estimate", "--instance", "square"], capsys)
    rec = dict(line.split(",", 1) for line in out.strip().splitlines()[1:])
    assert rec["n_qubits"] == "11"
    assert {"depth_per_layer", "term_bound_ok", "depth_bound_ok", "n_rep"} <= set(rec)


def test_solve_csv_revalidates(tmp_path, capsys):
    out = tmp_path / "k4.csv"
    summary = tmp_path / "sum.csv"
    hist = tmp_path / "hist.csv"
    code = main(["solve", "--instance", "k4", "--p", "1", "--out", str(out), "--summary", str(summary),
                 "--history", str(hist)])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 256
    q = load_instance(bundled_path("k4")).problem()
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-6)
    for r in rows[::17]:
        bits = to_bits(r["bitstring"], q.n)
        assert bool(int(r["feasible"])) == feasibility(q, bits)
        obj = q.objective_vector(bits)
        assert [float(r[f"obj_{i + 1}"]) for i in range(4)] == pytest.approx(obj.tolist(), rel=1e-8, abs=1e-12)
        assert [float(r[f"r_{i + 1}"]) for i in range(4)] == pytest.approx(
            (obj + q.penalty_value(bits)).tolist(), rel=1e-8, abs=1e-12)
    rec = dict(r.values() for r in read_csv(summary))
    assert float(rec["success_probability"]) > 4 / 256
    best = [float(r["best_cost"]) for r in read_csv(hist)]
    assert all(b <= a for a, b in zip(best, best[1:]))


def test_solve_with_shots_is_deterministic(tmp_path):
    paths = [tmp_path / f"{i}.csv" for i in range(3)]
    for p, seed in zip(paths, (3, 3, 4)):
        main(["solve", "--instance", "k4", "--shots", "2000", "--seed", str(seed), "--out", str(p),
              "--summary", str(p) + ".sum"])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_bytes() != paths[2].read_bytes()
    probs = [float(r["probability"]) for r in read_csv(paths[0])]
    assert all(abs(x * 2000 - round(x * 2000)) < 1e-6 for x in probs)


def test_sweep_single_point_matches_solve(tmp_path):
    sweep_out, solve_out = tmp_path / "sw.csv", tmp_path / "so.csv"
    main(["sweep", "--instance", "k4", "--weights", "0.25,0.25,0.25,0.25", "--k", "256",
          "--out", str(sweep_out)])
    main(["solve", "--instance", "k4", "--weights", "0.25,0.25,0.25,0.25", "--out", str(solve_out),
          "--summary", str(tmp_path / "s")])
    feasible = {r["bitstring"]: r["probability"] for r in read_csv(solve_out) if r["feasible"] == "1"}
    swept = {r["bitstring"]: r["probability"] for r in read_csv(sweep_out)}
    assert swept == feasible


def test_sweep_union_front_within_global(tmp_path):
    out = tmp_path / "sw.csv"
    assert main(["sweep", "--instance", "square", "--grid", "1", "--k", "20", "--out", str(out)]) == 0
    q = load_instance(bundled_path("square")).problem()
    front = {r.bitstring for r in brute_force_front(q) if r.pareto_optimal}
    rows = read_csv(out)
    union_front = {r["bitstring"] for r in rows if r["union_front"] == "1"}
    assert union_front
    assert all(r["feasible"] == "1" for r in rows)
    # members of the global front that were found are never dominated inside the union
    assert front & {r["bitstring"] for r in rows} <= union_front


def test_sweep_workers_do_not_change_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["sweep", "--instance", "k4", "--grid", "1", "--k", "10"]
    main(common + ["--out", str(a), "--workers", "1"])
    main(common + ["--out", str(b), "--workers", "2"])
    assert a.read_bytes() == b.read_bytes()


def test_scaling_single_row_and_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["scaling", "--family", "cycle", "--sizes", "2", "--p-max", "1", "--instances", "1", "--seed", "5"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b)])
    rows = read_csv(a)
    assert len(rows) == 1 and rows[0]["family"] == "cycle" and rows[0]["n_qubits"] == "6"
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("args", [
    ["solve", "--instance", "k4", "--weights", "0.5,0.5"],
    ["solve", "--instance", "k4", "--weights", "a,b,c,d"],
    ["pareto", "--instance", "/nonexistent.json"],
    ["generate", "hexagon", "3"],
    ["scaling", "--family", "square_lattice", "--sizes", "4x4", "--p-max", "1", "--instances", "1"],
])
def test_errors_exit_with_code_two(args, capsys):
    assert main(args) == 2
    assert "error" in capsys.readouterr().err


def test_malformed_instance(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    doc = json.loads(bundled_path("k4").read_text())
    doc["surprise"] = True
    bad.write_text(json.dumps(doc))
    assert main(["pareto", "--instance", str(bad)]) == 2
