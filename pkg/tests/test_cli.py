from medial.cli import run


def test_taut_exit_codes(capsys):
    assert run(["taut", "(x | ~x)"]) == 0
    assert run(["taut", "x"]) == 1
    out = capsys.readouterr().out
    assert "tautology" in out


def test_prove_and_check_round_trip(tmp_path, capsys):
    out = tmp_path / "proof.drv"
    assert run(["prove", "(x | ~x)", "--out", str(out)]) == 0
    assert run(["check", str(out)]) == 0
    assert "ok:" in capsys.readouterr().out


def test_prove_not_a_tautology(capsys):
    assert run(["prove", "x"]) == 1
    assert "NotATautology" in capsys.readouterr().err


def test_check_refuses_cross_system(tmp_path, capsys):
    out = tmp_path / "proof.drv"
    run(["prove", "(x | ~x)", "--out", str(out)])
    assert run(["check", str(out), "--system", "R23"]) == 1


def test_usage_and_parse_errors(capsys):
    assert run(["no-such-command"]) == 2
    assert run(["taut", "(x |"]) == 2
    assert run(["check", "/nonexistent/file.drv"]) == 2


def test_prove_lemma_eliminate_split(tmp_path):
    em = tmp_path / "em.drv"
    assert run(["prove-lemma", "excluded-middle", "(x & y)", "--out", str(em)]) == 0
    out = tmp_path / "down.drv"
    assert run(["eliminate-up", str(em), "--out", str(out)]) == 0
    assert run(["check", str(out)]) == 0
    split_out = tmp_path / "split.txt"
    assert run(["split", str(em), "--at", "L", "--out", str(split_out)]) == 0
    assert "# kind: unitary" in split_out.read_text()


def test_eval_sat_classify_audit(capsys):
    assert run(["eval", "(F p0 T)"]) == 0
    assert capsys.readouterr().out.strip() == "F"
    assert run(["eval", "(x & T)", "--assign", "x=1"]) == 0
    assert capsys.readouterr().out.strip() == "T"
    assert run(["sat", "--clone", "C3", "(x !> x)"]) == 1
    assert run(["sat", "--clone", "C2", "(x & y)"]) == 0
    assert run(["classify", "--fn", "0111/2"]) == 0
    assert "C2" in capsys.readouterr().out
    assert run(["audit", "--system", "P"]) == 0
    assert run(["audit", "--system", "R23"]) == 1  # unsound transcriptions surfaced


def test_bench_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["bench", "--clone", "C2", "--vars", "3", "--sizes", "10",
                "--samples", "3", "--seed", "4", "--out", str(a)]) == 0
    assert run(["bench", "--clone", "C2", "--vars", "3", "--sizes", "10",
                "--samples", "3", "--seed", "4", "--out", str(b)]) == 0
    strip = lambda text: [",".join(r.split(",")[:5]) for r in text.splitlines()]
    assert strip(a.read_text()) == strip(b.read_text())
