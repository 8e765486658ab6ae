import pytest

from polyinfo import builtin, camouflage_verify, loads, parity_distribution, reduce
from polyinfo.camouflage import parity_map
from polyinfo.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_rows(capsys):
    code, out, _ = run(capsys, "table", "--builtin", "dyadic")
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert code == 0
    assert len(rows) == 21
    assert [r.split()[0] for r in rows][:3] == ["H", "H2", "S2"]
    assert "K     0.000000" in rows
    assert "I↓    1.000000 [1.000000, 1.000000]" in rows


def test_table_triadic_csv(capsys):
    code, out, _ = run(capsys, "table", "--builtin", "triadic", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "measure,value,lower,upper,status"
    got = {l.split(",")[0]: l.split(",") for l in lines[1:]}
    assert got["K"][1] == "1.000000"
    assert got["I_down"][1:4] == ["0.000000"] * 3
    assert got["C"][4] == "ok"


def test_table_compare_flags_exactly_three(capsys):
    code, out, _ = run(capsys, "table", "--compare", "dyadic", "triadic")
    flagged = [l.split()[0] for l in out.splitlines() if l.endswith("*")]
    assert code == 0
    assert flagged == ["K", "I↓", "I⇓"]
    assert out.splitlines()[-1] == "# 3 measures differ: K, I↓, I⇓"
    code, out, _ = run(capsys, "table", "--compare", "dyadic", "triadic", "--format", "csv")
    assert [l.split(",")[0] for l in out.splitlines()[1:] if l.endswith(",1")] == ["K", "I_down", "I_ddown"]


def test_idiagram(capsys, tmp_path):
    code, out, _ = run(capsys, "idiagram", "--builtin", "dyadic")
    assert code == 0
    assert [l.split(",")[2] for l in out.splitlines()[1:]] == ["0.000000"] * 3 + ["1.000000"] * 3 + ["0.000000"]
    path = tmp_path / "mp.json"
    assert main(["generate", "masked_parity", "--n", "4", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "idiagram", "--input", str(path))
    rows = [l.split(",") for l in out.splitlines()[1:]]
    assert len(rows) == 15
    assert all(abs(float(v)) < 1e-9 for m, _, v in rows if bin(int(m)).count("1") >= 3)


def test_profiles(capsys, tmp_path):
    code, out, _ = run(capsys, "profile", "--kind", "connected", "--builtin", "triadic")
    assert out == "scale,value\n2,2.000000\n3,1.000000\n"
    code, out, _ = run(capsys, "profile", "--kind", "complexity", "--builtin", "dyadic")
    assert out == "scale,value\n1,3.000000\n2,3.000000\n3,0.000000\n"
    prefix = tmp_path / "mui"
    code, out, _ = run(capsys, "profile", "--kind", "mui", "--compare", "dyadic", "triadic", "--out", str(prefix))
    assert code == 0 and out.strip().endswith("identical")
    a = (tmp_path / "mui.dyadic.csv").read_bytes()
    b = (tmp_path / "mui.triadic.csv").read_bytes()
    assert a == b
    code, out, _ = run(capsys, "profile", "--kind", "connected", "--compare", "dyadic", "triadic")
    assert out.strip().endswith("different")


@pytest.mark.parametrize(
    "name,method,values",
    [
        ("dyadic", "broja", ["0.000000", "1.000000", "1.000000", "0.000000"]),
        ("triadic", "broja", ["1.000000", "0.000000", "0.000000", "1.000000"]),
        ("dyadic", "imin", ["1.000000", "0.000000", "0.000000", "1.000000"]),
    ],
)
def test_pid(capsys, name, method, values):
    code, out, _ = run(capsys, "pid", "--builtin", name, "X", "Y", "Z", "--method", method)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "method,component,value"
    assert [l.split(",")[2] for l in lines[1:]] == values
    code, out, _ = run(capsys, "pid", "--builtin", name, "X", "Y", "Z", "--method", method, "--format", "text")
    assert out.startswith(f"# {method}")


def test_generate(capsys, tmp_path):
    path = tmp_path / "c.json"
    assert main(["generate", "camouflage", "--n", "4", "--seed", "7", "--out", str(path)]) == 0
    assert camouflage_verify(loads(path.read_text())).passed
    code, out, _ = run(capsys, "generate", "parity", "--n", "4")
    assert loads(out) == parity_distribution(4) and len(loads(out)) == 8
    code, out, _ = run(capsys, "generate", "diffuse", "--builtin", "xor3", "--arity", "2")
    d = loads(out)
    assert d.n == 6
    assert reduce(d, parity_map(builtin("xor3"))) == builtin("xor3")


def test_determinism(tmp_path):
    paths = [tmp_path / f"t{i}.txt" for i in range(2)]
    for p in paths:
        assert main(["table", "--builtin", "xor3", "--seed", "3", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    gens = [tmp_path / f"g{i}.json" for i in range(2)]
    for p in gens:
        assert main(["generate", "camouflage", "--n", "5", "--seed", "2", "--out", str(p)]) == 0
    assert gens[0].read_bytes() == gens[1].read_bytes()
    assert b"\r" not in gens[0].read_bytes()


def test_stdin_input(capsys, monkeypatch):
    import io

    from polyinfo import dumps

    monkeypatch.setattr("sys.stdin", io.StringIO(dumps(builtin("xor3"))))
    code, out, _ = run(capsys, "idiagram", "--input", "-")
    assert code == 0 and out.splitlines()[-1] == "7,XYZ,-1.000000"


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "table", "--input", str(bad))[0] == 2
    assert run(capsys, "pid", "--builtin", "dyadic", "X", "X", "Z")[0] == 2
    assert run(capsys, "generate", "camouflage", "--n", "9")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["table"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["nosuch"])
    assert e.value.code == 2
    capsys.readouterr()
    assert run(capsys, "idiagram", "--input", str(tmp_path / "missing.json"))[0] == 4
    assert run(capsys, "idiagram", "--builtin", "xor3", "--out", str(tmp_path / "no" / "dir.csv"))[0] == 4


def test_search_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("POLYINFO_MAX_NODES", "2")
    code, _, err = run(capsys, "generate", "camouflage", "--n", "4", "--method", "search")
    assert code == 3
    assert "SEARCH_EXHAUSTED" in err
