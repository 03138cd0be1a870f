import csv
import io
import json
import subprocess
import sys

import pytest

from boundstate import cli

HULTHEN = ["--preset", "hulthen", "--V0", "1", "--b", "0.2"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _table(text):
    return list(csv.DictReader(io.StringIO("".join(l + "\n" for l in text.splitlines() if not l.startswith("#")))))


def test_spectrum_hulthen_rows(capsys):
    code, out, _ = run(capsys, "spectrum", *HULTHEN, "--nmax", "2")
    assert code == 0
    rows = _table(out)
    assert len(rows) == 3
    first = rows[0]
    assert (first["D"], first["ell"], first["n"], first["admissible"]) == ("3", "0", "0", "1")
    assert float(first["E"]) == pytest.approx(-12.005, rel=1e-14)
    assert "# preset = 'hulthen'" in out


def test_spectrum_json_schema(capsys):
    code, out, _ = run(capsys, "spectrum", *HULTHEN, "--nmax", "1", "--ell-max", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"rows", "config_echo"}
    assert len(doc["rows"]) == 4
    assert set(doc["rows"][0]) == {"D", "ell", "n", "E", "c", "gamma", "admissible"}
    assert doc["config_echo"]["preset"] == "hulthen"
    assert doc["config_echo"]["alpha"] == 0.1


def test_spectrum_unbound_is_header_only(capsys):
    code, out, err = run(capsys, "spectrum", "--V1", "0.5", "--alpha", "1")
    assert code == 2
    assert _table(out) == []
    assert "no bound states" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--preset", "nope"],
        ["spectrum"],
        ["spectrum", "--V0", "1"],
        ["spectrum", *HULTHEN, "--dim", "0"],
        ["spectrum", "--V1", "-5", "--alpha", "1"],
        ["wavefunction", *HULTHEN, "--points", "2"],
        ["verify", *HULTHEN, "--modes", "bogus"],
        ["spectrum", *HULTHEN, "--bogus-flag"],
    ],
)
def test_input_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith("boundstate: error:")


def test_wavefunction_beyond_nmax_exits_2(capsys):
    code, _, _ = run(capsys, "wavefunction", *HULTHEN, "--n", "7", "--nmax", "5")
    assert code == 2


def test_wavefunction_unbound_level_exits_2(capsys):
    code, _, _ = run(capsys, "wavefunction", *HULTHEN, "--n", "60")
    assert code == 2


def test_wavefunction_output(capsys):
    code, out, _ = run(capsys, "wavefunction", *HULTHEN, "--n", "1", "--points", "200", "--rmax", "5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["r"]) == len(doc["R"]) == len(doc["full_radial_factor"]) == 200
    assert doc["r"][-1] == 5.0
    assert doc["state"]["n"] == 1
    # one interior node in R, near r = 0.4 for this level
    signs = [v > 0 for v in doc["R"] if abs(v) > 1e-12]
    assert sum(a != b for a, b in zip(signs, signs[1:])) == 1


def test_verify_passes_and_reports_every_mode(capsys):
    code, out, _ = run(capsys, "verify", *HULTHEN, "--nmax", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    names = [c["name"] for c in doc["checks"]]
    assert "aim-vs-closed-form" in names and "normalization-quadrature" in names
    assert doc["config_echo"]["modes"] == list(cli.MODES)


def test_verify_perturbation_exits_3(capsys):
    code, out, _ = run(capsys, "verify", *HULTHEN, "--modes", "aim", "--perturb", "1e-3")
    assert code == 3
    doc = json.loads(out)
    assert doc["pass"] is False
    assert not next(c for c in doc["checks"] if c["name"] == "aim-vs-closed-form")["pass"]


def test_verify_single_mode(capsys):
    code, out, _ = run(capsys, "verify", *HULTHEN, "--modes", "normalization")
    assert code == 0
    assert [c["name"] for c in json.loads(out)["checks"]] == ["normalization-quadrature"]


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", *HULTHEN, "--modes", "normalization", "--format", "csv")
    assert code == 0
    rows = _table(out)
    assert [r["name"] for r in rows] == ["normalization-quadrature"]
    assert rows[0]["pass"] == "1"


def test_output_is_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("BOUNDSTATE_SEED", "11")
    first = run(capsys, "verify", *HULTHEN, "--modes", "aim")[1]
    second = run(capsys, "verify", *HULTHEN, "--modes", "aim")[1]
    assert first == second


def test_bad_seed_is_an_input_error(capsys, monkeypatch):
    monkeypatch.setenv("BOUNDSTATE_SEED", "x")
    assert run(capsys, "verify", *HULTHEN, "--modes", "aim")[0] == 1


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("preset = hulthen\nV0 = 2.0   # overridden below\nb = 0.2\nnmax = 0\n")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--V0", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["config_echo"]["V0"] == 1.0
    assert len(doc["rows"]) == 1
    assert doc["rows"][0]["E"] == pytest.approx(-12.005, rel=1e-14)


@pytest.mark.parametrize("content", ["wrong_key = 1\n", "dim = three\n", "not a pair\n"])
def test_bad_config_files(capsys, tmp_path, content):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(content)
    code, _, err = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 1
    assert "config" in err


def test_missing_config_file(capsys, tmp_path):
    assert run(capsys, "spectrum", "--config", str(tmp_path / "absent.cfg"))[0] == 1


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "spectrum", *HULTHEN, "--output", str(target))
    assert code == 0 and out == ""
    assert _table(target.read_text())[0]["n"] == "0"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "boundstate", "spectrum", *HULTHEN, "--nmax", "0"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert float(_table(proc.stdout)[0]["E"]) == pytest.approx(-12.005, rel=1e-14)


@pytest.mark.parametrize("preset", ["coulomb", "mie", "deng_fan"])
def test_verify_passes_on_hard_presets(capsys, preset):
    code, out, _ = run(capsys, "verify", "--preset", preset, "--nmax", "2")
    assert code == 0, out
    if preset == "deng_fan":
        trend = next(c for c in json.loads(out)["checks"] if c["name"] == "pekeris-vs-exact-trend")
        assert "defined in the Pekeris form" in trend["note"]
