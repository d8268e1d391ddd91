import json
import subprocess
import sys

import pytest

from scorearrange.cli import main
from scorearrange.cnf import Semantics, evaluate, parse_dimacs

WORKED_CNF = "p cnf 4 2\n-1 3 4 0\n2 -3 4 0\n"
WORKED_SELECTION = ["True_1", "X1_false", "X2_true", "X3_false", "X4_true"]


@pytest.fixture
def worked(tmp_path):
    cnf = tmp_path / "worked_cnf.cnf"
    cnf.write_text(WORKED_CNF)
    prefix = tmp_path / "worked"
    assert main(["reduce", str(cnf), "--variant", "consonance", "--p", "1/2", "--out", str(prefix)]) == 0
    return tmp_path, f"{prefix}.score.json", f"{prefix}.map.json"


def write_selection(path, ids):
    path.write_text(json.dumps({"included": ids}))
    return str(path)


CONS = ["--p", "1/2", "--consonance"]


def test_check_valid(worked, capsys):
    tmp, score, _ = worked
    sel = write_selection(tmp / "sel.json", WORKED_SELECTION)
    assert main(["check", score, sel, *CONS]) == 0
    assert capsys.readouterr().out == ""


def test_check_both_variable_parts(worked, capsys):
    tmp, score, _ = worked
    sel = write_selection(tmp / "sel.json", WORKED_SELECTION + ["X1_true"])
    assert main(["check", score, sel, *CONS]) == 1
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert lines and {l["kind"] for l in lines} == {"dissonance"}


def test_check_missing_file(worked, capsys):
    tmp, score, _ = worked
    assert main(["check", score, str(tmp / "nope.json"), *CONS]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_check_bad_p(worked):
    tmp, score, _ = worked
    sel = write_selection(tmp / "sel.json", WORKED_SELECTION)
    assert main(["check", score, sel, "--p", "0.5"]) == 2


def test_check_unknown_part(worked):
    tmp, score, _ = worked
    assert main(["check", score, write_selection(tmp / "s.json", ["Bogus"]), *CONS]) == 2


def test_solve_p_zero(worked, capsys):
    _, score, _ = worked
    assert main(["solve", score, "--p", "0", "--consonance"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"status": "sat", "selection": [], "route": "p_zero", "nodes_explored": 0}


def test_solve_sat_via_exact(worked, capsys):
    _, score, _ = worked
    assert main(["solve", score, *CONS]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "sat" and out["route"] == "exact" and out["nodes_explored"] > 0


def test_solve_unsat(tmp_path, capsys):
    cnf = tmp_path / "c.cnf"
    cnf.write_text("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n")
    prefix = tmp_path / "c"
    assert main(["reduce", str(cnf), "--variant", "consonance", "--p", "1/2", "--out", str(prefix)]) == 0
    assert main(["solve", f"{prefix}.score.json", *CONS]) == 1
    assert json.loads(capsys.readouterr().out)["status"] == "unsat"


def test_solve_route_only(worked, capsys):
    _, score, _ = worked
    assert main(["solve", score, "--p", "2/5", "--max-chord", "1", "--route-only"]) == 0
    assert json.loads(capsys.readouterr().out) == {"route": "two_coloring"}


def test_solve_timeout(worked, capsys):
    _, score, _ = worked
    assert main(["solve", score, *CONS, "--time-budget", "0"]) == 3
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "timeout" and out["selection"] == []


def test_solve_capacity(worked):
    _, score, _ = worked
    assert main(["solve", score, *CONS, "--max-parts", "4"]) == 2


def test_reduce_is_byte_deterministic(worked, tmp_path):
    _, score, mapping = worked
    cnf = tmp_path / "worked_cnf.cnf"
    again = tmp_path / "again"
    assert main(["reduce", str(cnf), "--variant", "consonance", "--p", "1/2", "--out", str(again)]) == 0
    assert open(score, "rb").read() == open(f"{again}.score.json", "rb").read()
    assert open(mapping, "rb").read() == open(f"{again}.map.json", "rb").read()


def test_reduce_outside_hard_region(tmp_path, capsys):
    cnf = tmp_path / "x.cnf"
    cnf.write_text("p cnf 3 1\n1 2 3 0\n")
    rc = main(["reduce", str(cnf), "--variant", "maxchord", "--j", "1", "--p", "1/2", "--out", str(tmp_path / "x")])
    assert rc == 4
    assert "1/3" in capsys.readouterr().err
    assert not (tmp_path / "x.score.json").exists()


def test_reduce_bad_dimacs(tmp_path):
    cnf = tmp_path / "bad.cnf"
    cnf.write_text("p cnf 2 1\n1 2 0\n")
    assert main(["reduce", str(cnf), "--variant", "consonance", "--p", "1/2", "--out", str(tmp_path / "b")]) == 2


def test_extract_worked(worked, capsys):
    tmp, score, mapping = worked
    sel = write_selection(tmp / "sel.json", WORKED_SELECTION)
    assert main(["extract", score, mapping, sel]) == 0
    assert capsys.readouterr().out.strip() == "v -1 2 -3 4"


def test_extract_all_true(worked, capsys):
    tmp, score, mapping = worked
    sel = write_selection(tmp / "sel.json", ["True_1", "X1_true", "X2_true", "X3_true", "X4_true"])
    assert main(["extract", score, mapping, sel]) == 0
    assert capsys.readouterr().out.strip() == "v 1 2 3 4"
    assert evaluate(parse_dimacs(WORKED_CNF), {v: True for v in range(1, 5)})


def test_extract_malformed(worked):
    tmp, score, mapping = worked
    sel = write_selection(tmp / "sel.json", WORKED_SELECTION + ["X1_true"])
    assert main(["extract", score, mapping, sel]) == 5


def test_export_musicxml(worked):
    tmp, score, _ = worked
    out = tmp / "worked.musicxml"
    assert main(["export-musicxml", score, str(out)]) == 0
    assert out.read_text().count("<measure ") == 7 * 9


def test_gen_deterministic_and_reparses(capsys):
    assert main(["gen", "--vars", "4", "--clauses", "2", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert main(["gen", "--vars", "4", "--clauses", "2", "--seed", "7"]) == 0
    assert capsys.readouterr().out == first
    f = parse_dimacs(first)
    assert f.num_vars == 4 and len(f.clauses) == 2


def test_gen_rejects_few_vars():
    assert main(["gen", "--vars", "2", "--clauses", "1"]) == 2


def test_gen_x3sat_header(capsys):
    assert main(["gen", "--vars", "5", "--clauses", "3", "--semantics", "x3sat"]) == 0
    assert "x3sat" in capsys.readouterr().out


def test_argparse_usage_exit_code():
    with pytest.raises(SystemExit) as e:
        main(["solve"])
    assert e.value.code == 2


PIPELINE = [(seed, variant) for seed in range(12) for variant in ("consonance", "transition", "maxchord")]


@pytest.mark.parametrize("seed,variant", PIPELINE)
def test_full_pipeline(tmp_path, capsys, seed, variant):
    semantics = "x3sat" if variant == "maxchord" else "threesat"
    assert main(["gen", "--vars", "4", "--clauses", str(2 + seed % 4), "--seed", str(seed), "--semantics", semantics]) == 0
    text = capsys.readouterr().out
    cnf = tmp_path / "f.cnf"
    cnf.write_text(text)
    prefix = tmp_path / "f"
    extra = ["--j", "2"] if variant == "maxchord" else []
    assert main(["reduce", str(cnf), "--variant", variant, "--p", "1/2", *extra, "--out", str(prefix)]) == 0
    mapping = json.loads((tmp_path / "f.map.json").read_text())
    flags = ["--p", "1/2"]
    if variant == "consonance":
        flags.append("--consonance")
    elif variant == "maxchord":
        flags += ["--max-chord", "2"]
    else:
        flags += ["--min-segment-ticks", "8"]
    assert mapping["variant"] == variant
    rc = main(["solve", f"{prefix}.score.json", *flags])
    result = json.loads(capsys.readouterr().out)
    assert rc in (0, 1)
    if rc == 0:
        sel = write_selection(tmp_path / "sel.json", result["selection"])
        assert main(["check", f"{prefix}.score.json", sel, *flags]) == 0
        assert main(["extract", f"{prefix}.score.json", f"{prefix}.map.json", sel]) == 0
        line = capsys.readouterr().out.strip()
        assignment = {abs(int(t)): int(t) > 0 for t in line.split()[1:]}
        f = parse_dimacs(text, Semantics(semantics))
        assert evaluate(f, assignment)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "scorearrange", "gen", "--vars", "3", "--clauses", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("c") or proc.stdout.startswith("p")
