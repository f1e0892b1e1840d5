import subprocess
import sys

import pytest

from lirkw.cli import main
from lirkw.tableau import dump, table1_type1


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_table1(capsys):
    code, out, _ = run(capsys, "verify", "--tableau", "table1", "--type", "1", "--order", "3")
    assert code == 0
    assert len(out.splitlines()) == 24  # header + 23 rows


def test_verify_broken(capsys):
    code, out, _ = run(capsys, "verify", "--tableau", "table1-broken", "--type", "1", "--order", "1")
    assert code == 1
    row = out.splitlines()[1].split(",")
    assert row[0] == "τ1" and float(row[5]) == pytest.approx(0.1, abs=1e-15)


def test_verify_table2(capsys):
    code, out, _ = run(capsys, "verify", "--tableau", "table2", "--gamma", "0.25", "--gamma54",
                       "-0.5", "--a43", "0.3", "--type", "2", "--order", "3")
    assert code == 0
    assert len(out.splitlines()) == 20


def test_verify_file_and_parse_errors(capsys, tmp_path):
    path = tmp_path / "t1.txt"
    dump(table1_type1(), path)
    assert run(capsys, "verify", "--tableau", str(path))[0] == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("not a tableau\n")
    assert run(capsys, "verify", "--tableau", str(bad))[0] == 2
    assert run(capsys, "verify", "--tableau", str(tmp_path / "missing"))[0] == 2
    assert run(capsys, "verify", "--tableau", "table2", "--gamma", "0.2")[0] == 2


@pytest.mark.parametrize("family,order,count", [("LW1", 3, 23), ("T", 3, 4), ("LW2", 3, 19)])
def test_trees(capsys, family, order, count):
    code, out, err = run(capsys, "trees", "--family", family, "--order", str(order),
                         "--format", "pretty")
    assert code == 0
    assert out.strip().splitlines()[-1] == f"count {count}"
    assert len(out.strip().splitlines()) == count + 2


def test_converge_small(capsys):
    code, out, _ = run(capsys, "converge", "--problem", "vdpol-mild", "--tableau", "table2",
                       "--l-config", "arbitrary-L", "--n-list", "64,128,256,512")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n_steps,h,error,local_slope"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [64, 128, 256, 512]


def test_converge_band_miss(capsys):
    code, *_ = run(capsys, "converge", "--problem", "vdpol-mild", "--n-list", "64,128,256",
                   "--expect", "5")
    assert code == 1


def test_converge_nonfinite(capsys):
    code, _, err = run(capsys, "converge", "--problem", "adr2d", "--l-config", "zero-L",
                       "--n-list", "8")
    assert code == 3
    assert "non-finite" in err


def test_stability(capsys):
    code, out, _ = run(capsys, "stability", "--tableau", "table2", "--type", "2", "--grid", "0:8:1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "h_lambda,abs_R"
    assert lines[1] == "0,1"
    assert len(lines) == 1 + 10
    z, r = (float(v) for v in lines[-1].split(","))
    assert z == -1e8 and r < 1e-3


@pytest.mark.parametrize("R", [1, 2, 3])
def test_amf_check(capsys, R):
    code, out, _ = run(capsys, "amf-check", "--R", str(R), "--N", "4", "--seed", "7")
    assert code == 0
    for line in out.splitlines()[1:]:
        assert float(line.split(",")[1]) <= 1e-12


def test_manifest_rerun_is_byte_identical(capsys, tmp_path):
    out1 = tmp_path / "scan.csv"
    assert run(capsys, "stability", "--tableau", "table1", "--out", str(out1))[0] == 0
    manifest = tmp_path / "scan.csv.manifest"
    text = manifest.read_text()
    assert "subcommand=stability" in text and "version=" in text
    out2 = tmp_path / "again.csv"
    assert run(capsys, "rerun", str(manifest), "--out", str(out2))[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--order", "x"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lirkw", "trees", "--family", "T", "--order", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "count 2" in res.stderr
