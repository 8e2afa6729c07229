from fractions import Fraction

from isorank import cli, heuristics, modp, reports
from isorank.ec import ShortModel

from conftest import N19


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_rogers_top10(tmp_path, capsys):
    out = tmp_path / "r.csv"
    rc, _, _ = run(capsys, "rogers", "--curve", "[0,0,1,-38,90]", "--H", "100", "--top", "10", "--out", str(out))
    assert rc == 0
    text = out.read_text()
    assert reports.validate_csv("rogers", text) == 10
    assert text.splitlines()[1].startswith("69,")
    assert b"\r" not in out.read_bytes()


def test_nagao_family_two_rows(capsys):
    rc, out, err = run(capsys, "nagao", "--degree", "13", "--family-H", "1", "--N", "100")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "key,score,N" and len(lines) == 3
    assert {ln.split(",")[0] for ln in lines[1:]} == {"1", "-1"}
    assert "pole" in err


def test_mazur_interrupt_and_resume(tmp_path, capsys):
    snap, a, b = tmp_path / "ck.snap", tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["mazur", "--degree", "163", "--D-range", "1:300", "--t", "2000"]
    rc, _, err = run(capsys, *base, "--resume", str(snap), "--stop-after", "1", "--out", str(a))
    assert rc == 3 and "resume" in err and not a.exists()
    rc, _, _ = run(capsys, *base, "--resume", str(snap), "--out", str(a))
    assert rc == 0
    rc, _, _ = run(capsys, *base, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    rc, out, _ = run(capsys, "validate", "mazur", str(a))
    assert rc == 0 and out.startswith("ok")


def test_usage_errors(capsys):
    assert run(capsys, "rogers", "--H", "0", "--curve", "[0,0,0,-1,0]")[0] == 1
    assert run(capsys, "rogers", "--curve", "[0,0,0,-1,0]", "--degree", "11")[0] == 1
    assert run(capsys, "rogers", "--curve", "[0,0,0,0,0]")[0] == 1
    assert run(capsys, "mazur", "--degree", "20")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "--help")[0] == 0


def test_data_error_exit(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ISORANK_DATA", str(tmp_path))
    rc, _, err = run(capsys, "invariants", "--degree", "19")
    assert rc == 2 and "data error" in err


def test_snapshot_mismatch_exit(tmp_path, capsys):
    snap = tmp_path / "s.snap"
    run(capsys, "rogers", "--curve", "[0,0,0,-1,0]", "--H", "5", "--checkpoint", str(snap))
    rc, _, _ = run(capsys, "rogers", "--curve", "[0,0,0,-1,0]", "--H", "6", "--checkpoint", str(snap))
    assert rc == 2


def test_invariants_and_certify(tmp_path, capsys):
    rc, out, _ = run(capsys, "invariants", "--degree", "163", "--entry", "0")
    assert rc == 0 and "minimal [0,0,1,-2174420,1234136692]" in out
    rc, out, err = run(capsys, "certify", "--curve", "[0,0,0,-36,0]", "--search", "5", "--search-den", "1")
    assert rc == 0 and '"lower_bound": 1' in out and "rank >= 1" in err
    rc, out, _ = run(capsys, "certify", "--curve", "[0,1,1,-2,0]", "--points", "(-1,1)", "(0,0)", "--search", "0")
    assert rc == 0 and '"lower_bound": 2' in out


def test_family_curve_source(capsys):
    rc, out, _ = run(capsys, "invariants", "--family", "13", "--h", "9/8")
    assert rc == 0 and "j " in out


def test_aptable_roundtrip(tmp_path, capsys):
    out = tmp_path / "t.apcache"
    assert run(capsys, "aptable", "--curve", "[0,0,1,-38,90]", "--t", "10^3", "--out", str(out))[0] == 0
    assert modp.ApTable.load(out) == modp.ap_table(N19, 1000)


def test_validate_rejects_bad_reports(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("D,count,witnesses\n4,1,2/1\n")
    assert run(capsys, "validate", "rogers", str(bad))[0] == 2
    bad.write_text("D,min_bias,final_bias,t_max\n2,-1,0,10\n3,-5,0,10\n")
    assert run(capsys, "validate", "mazur", str(bad))[0] == 2


def test_nagao_csv_order():
    text = reports.nagao_csv([(Fraction(1), 2.0), (Fraction(-1), 2.0), (Fraction(1, 2), 3.0)], 100)
    assert text == "key,score,N\n1/2,3.0,100\n-1,2.0,100\n1,2.0,100\n"
    assert reports.validate_csv("nagao", text) == 3


def test_rogers_csv_roundtrip():
    t = heuristics.rogers_scan(ShortModel(-1, 0), 2)
    assert reports.rogers_csv(t) == "D,count,witnesses\n-6,2,-2/1;1/2\n6,2,2/1;-1/2\n"
