import json
import shlex
import subprocess
import sys
import warnings
from pathlib import Path

import pytest

from halfint import fixtures
from halfint.cli import cli_dispatch
from halfint.io import parse_qexp, write_qexp
from halfint.qseries import qx_scale

GOLDEN = Path(__file__).parent / "data" / "cli_exit_codes.tsv"


def _golden():
    for line in GOLDEN.read_text().splitlines():
        if line and not line.startswith("#"):
            cmd, code = line.split("\t")
            yield pytest.param(cmd, int(code), id=cmd)


def run(argv, capsys):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        code = cli_dispatch(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("cmd,code", list(_golden()))
def test_exit_code_table(cmd, code, capsys):
    assert run(shlex.split(cmd), capsys)[0] == code


def test_sturm_bound_output(capsys):
    code, out, _ = run(["sturm", "bound", "--k", "7", "--N", "8"], capsys)
    assert code == 0
    assert out.splitlines() == ["index [SL2(Z):Gamma0(8)] = 12", "B = 7/2", "floor = 3"]


def test_sturm_bound_json(capsys):
    _, out, _ = run(["sturm", "bound", "--k", "5", "--N", "52", "--kohnen", "--json"], capsys)
    assert json.loads(out) == {"k": 5, "N": 52, "index_level": 208, "index": 336,
                               "bound": "70", "floor": 70, "kohnen": True}


def test_kohnen_check(capsys):
    code, out, _ = run(["kohnen", "check", "--file", "ex364_f2.qexp", "--k", "3", "--N", "364"],
                       capsys)
    assert code == 1
    assert "NotInPlusSpace(10)" in out


def test_recover_reproduces_fixture(tmp_path, capsys):
    out = tmp_path / "h.qexp"
    code, _, _ = run(["certify", "recover", "--product", "level8_fTheta.qexp",
                      "--factor", "theta.qexp", "-o", str(out)], capsys)
    assert code == 0
    expected = parse_qexp(fixtures.text("level8_f"))
    assert out.read_text() == write_qexp(expected, comments=())


def test_files_on_disk(tmp_path, capsys):
    run(["fixtures", "export", str(tmp_path)], capsys)
    assert sorted(p.stem for p in tmp_path.glob("*.qexp")) == fixtures.names()
    t = tmp_path / "theta_out.qexp"
    run(["qexp", "theta", "--prec", "12", "-o", str(t)], capsys)
    assert t.read_text() == write_qexp(fixtures.load("theta"), comments=())
    p = tmp_path / "prod.qexp"
    code, _, _ = run(["qexp", "mul", str(tmp_path / "level8_f.qexp"), str(t), "-o", str(p)],
                     capsys)
    assert code == 0
    assert parse_qexp(p.read_text()).dense() == fixtures.load("level8_fTheta").dense()


def test_theta_rule_sets_character(capsys):
    _, out, _ = run(["qexp", "mul", "ex52_f1", "theta", "--theta-rule"], capsys)
    assert "k: 6\nhalfint: false\nN: 52\ncharacter: prod(kron:13,minus4)\n" in out


def test_rank2_values_in_field(capsys):
    code, out, err = run(["certify", "rank2", "--f1", "ex52_f1", "--f2", "ex52_f2", "--k", "5",
                          "--values", "0,b", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["lambdas"] == ["b", "0"]
    assert "m0 = 2, n0 = 1" in err


def test_subspace_kernel(tmp_path, capsys):
    basis = ["ex364_f1", "ex364_f2"]
    images = []
    for name, lam in zip(basis, (3, 4)):
        path = tmp_path / f"T_{name}.qexp"
        path.write_text(write_qexp(qx_scale(lam, fixtures.load(name)), comments=()))
        images.append(f"2:{path}")
    code, out, _ = run(["subspace", "kernel", "--basis", ",".join(basis),
                        "--images", ",".join(images), "--eigenvalues", "2:3", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["extra"]["kernel"] == [["1", "0"]]


def test_report_directory(tmp_path, capsys):
    d = tmp_path / "rep"
    code, _, err = run(["certify", "rank2", "--f1", "ex364_f1", "--f2", "ex364_f2", "--k", "3",
                        "--values", "2,1", "--report", str(d)], capsys)
    assert code == 0
    names = sorted(p.name for p in d.iterdir())
    assert names == ["certificate.json", "certificate.txt", "f1.tsv", "f2.tsv", "support.png"]
    assert (d / "support.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    rows = (d / "f2.tsv").read_text().splitlines()
    assert rows[0].split("\t") == ["n", "n_mod_4", "coefficient", "nonzero", "forbidden_class",
                                   "within_bound"]
    assert rows[11].split("\t") == ["10", "2", "1", "1", "1", "1"]


def test_kohnen_jobs(capsys):
    code, out, _ = run(["kohnen", "check", "--file", "ex364_f1,ex364_f2", "--k", "3", "--N", "364",
                        "--jobs", "2"], capsys)
    assert code == 1
    assert "ConsistentUpTo(49)" in out and "NotInPlusSpace(10)" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "halfint.cli", "sturm", "bound", "--k", "3",
                           "--N", "4", "--kohnen"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "B = 3" in proc.stdout


def test_usage_error_code():
    proc = subprocess.run([sys.executable, "-m", "halfint.cli", "sturm"], capture_output=True,
                          text=True)
    assert proc.returncode == 3
