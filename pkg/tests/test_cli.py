import csv
import json

import pytest

from clifflat import cli
from clifflat import opcalc as oc
from clifflat.cli import main


def strip_volatile(text):
    report = json.loads(text)
    report.pop(cli.VOLATILE_KEY)
    return cli.dumps_report(report)


def test_verify_small_run_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--dim", "1", "--trials", "5", "--seed", "7",
                 "--suites", "witt,symbolic,momentum", "--report", str(out)])
    assert code == cli.EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["schema"] == 1 and rep["seed"] == 7
    assert rep["summary"]["all_pass"] and rep["summary"]["fail"] == 0
    for check in rep["suites"]["witt"]:
        assert set(check) >= {"id", "anchor", "semantics", "max_residual", "tolerance", "status"}
    assert "pass" in capsys.readouterr().out


def test_report_is_deterministic(tmp_path, monkeypatch):
    texts = []
    out = tmp_path / "r.json"
    for threads in ("1", "4"):
        monkeypatch.setenv("CLIFFLAT_THREADS", threads)
        assert main(["verify", "--dim", "2", "--trials", "3", "--seed", "11",
                     "--suites", "algebra,contested", "--report", str(out)]) == cli.EXIT_OK
        texts.append(out.read_text())
    assert strip_volatile(texts[0]) == strip_volatile(texts[1])
    assert texts[0] != strip_volatile(texts[0])


def test_mutation_gives_exit_one(monkeypatch):
    # a broken rewrite rule that forgets the involution when moving a letter past a function
    def no_involution(letter, factor):
        j, _ = letter
        shift = list(factor.shift)
        shift[j - 1] += 1 if letter[1] == oc.RAISE else -1
        return oc.FunFactor(factor.name, tuple(shift), factor.inv)

    monkeypatch.setattr(oc, "move_witt_past", no_involution)
    assert main(["verify", "--dim", "1", "--suites", "symbolic"]) == cli.EXIT_FAIL


@pytest.mark.parametrize("argv", [
    ["verify", "--dim", "0"],
    ["verify", "--dim", "7"],
    ["verify", "--suites", "nope"],
    ["verify", "--trials", "0"],
    ["solve-kg", "--mass", "-1"],
    ["solve-kg", "--dim", "2", "--weights", "0.5,0.6"],
    ["solve-kg", "--box", "4:-4"],
    ["dispersion", "--grid", "7"],
    ["dispersion", "--grid", "8", "--zeros"],
    ["opcalc", "--check", "bogus"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(argv):
    assert main(argv) == cli.EXIT_USAGE


def test_io_error_exits_three(tmp_path):
    bad = tmp_path / "missing" / "r.json"
    assert main(["opcalc", "--dim", "1", "--report", str(bad)]) == cli.EXIT_IO
    assert main(["solve-kg", "--dim", "1", "--out", str(bad)]) == cli.EXIT_IO


def test_solve_kg_example(tmp_path):
    out, rep = tmp_path / "field.csv", tmp_path / "kg.json"
    code = main(["solve-kg", "--dim", "1", "--h", "1", "--mass", "1.4142135", "--box", "-4:4",
                 "--out", str(out), "--report", str(rep)])
    assert code == cli.EXIT_OK
    rows = list(csv.DictReader(out.open()))
    scalar = {int(r["k1"]): float(r["re"]) for r in rows if r["blade_mask"] == "0"}
    assert [scalar[k] for k in range(4)] == pytest.approx([1, 2, 7, 26], rel=1e-6)
    assert [scalar[-k] for k in range(4)] == pytest.approx([1, 2, 7, 26], rel=1e-6)
    assert json.loads(rep.read_text())["kg_residual"] < 1e-9


def test_solve_dirac_writes_both_fields(tmp_path):
    out = tmp_path / "dirac.csv"
    rep = tmp_path / "d.json"
    code = main(["solve-dirac", "--dim", "2", "--mass", "1", "--box", "-3:3", "--out", str(out),
                 "--report", str(rep)])
    assert code == cli.EXIT_OK
    assert (tmp_path / "dirac_plus.csv").exists() and (tmp_path / "dirac_minus.csv").exists()
    assert json.loads(rep.read_text())["status"] == "pass"
    code = main(["solve-dirac", "--dim", "1", "--mass-term", "chi", "--report", str(rep)])
    assert code == cli.EXIT_OK
    assert json.loads(rep.read_text())["status"] == "report-only"


def test_dispersion_zero_count(tmp_path, capsys):
    assert main(["dispersion", "--dim", "1", "--grid", "64", "--operator", "central",
                 "--zeros"]) == cli.EXIT_OK
    text = capsys.readouterr().out
    zeros = json.loads(text[text.index("{"):])
    assert zeros["torus_count"] == 2
    curve = tmp_path / "curve.csv"
    assert main(["dispersion", "--dim", "2", "--grid", "16", "--out", str(curve)]) == cli.EXIT_OK
    rows = list(csv.reader(curve.open()))
    assert rows[0] == ["xi1", "xi2", "magnitude"] and len(rows) == 1 + 16 ** 2


def test_opcalc_leibniz(capsys):
    assert main(["opcalc", "--check", "leibniz", "--dim", "3"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "equal" in out and "not equal" not in out


def test_box_parsing():
    assert cli.parse_box("-4:4", 2) == ((-4, -4), (4, 4))
    assert cli.parse_box("0:3,1:2", 2) == ((0, 1), (3, 2))
    with pytest.raises(cli.UsageError):
        cli.parse_box("0:3,1:2,0:1", 2)
    with pytest.raises(cli.UsageError):
        cli.parse_box("a:b", 1)


def test_no_partial_file_left_on_failure(tmp_path):
    target = tmp_path / "x.json"
    with pytest.raises(TypeError):
        cli.atomic_write(target, object())
    assert list(tmp_path.iterdir()) == []
