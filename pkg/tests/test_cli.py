import shutil
import subprocess
import sys

import pytest

from hullstats.cli import main, parse_grid, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_laws_example(capsys):
    code, out, _ = run(capsys, "laws", "--op", "regime_probability", "--u", "0.5")
    assert code == 0
    assert "0.5,out,0.978515625,501/512" in out
    assert out.startswith("# hullstats ")
    assert "# formula:" in out


def test_output_is_byte_identical(capsys):
    argv = ("laws", "--op", "perimeter_density", "--L", "0:3:7", "--u", "0.25,0.75", "--regime", "in")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_json_format(capsys):
    import json
    code, out, _ = run(capsys, "laws", "--op", "M", "--mu", "0,1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["columns"] == ["mu", "value"] and len(doc["rows"]) == 2


def test_missing_grid_is_usage_error(capsys):
    code, _, err = run(capsys, "laws", "--op", "joint_laplace", "--sigma", "1")
    assert code == 2 and "--tau" in err


def test_domain_error_is_usage_error(capsys):
    code, _, err = run(capsys, "laws", "--op", "regime_probability", "--u", "1.5")
    assert code == 2 and "u must lie" in err


def test_unknown_subcommand(capsys):
    assert run(capsys, "nonsense")[0] == 2


def test_finite_prints_fractions_and_decimals(capsys):
    code, out, _ = run(capsys, "finite", "--k", "50", "--all-d", "--family", "i")
    rows = [line for line in out.splitlines() if line.startswith("50,")]
    assert code == 0 and len(rows) == 48
    fields = rows[0].split(",")
    assert "/" in fields[3] and float(fields[5]) > 0.99


def test_finite_pmf_and_perimeter(capsys):
    code, out, _ = run(capsys, "finite", "--quantity", "pmf", "--d", "2", "--p-max", "2")
    assert code == 0 and "2,3/5,0.6" in out
    code, _, err = run(capsys, "finite", "--quantity", "perimeter", "--k", "9", "--d", "3", "--family", "ii")
    assert code == 2


def test_series_precision_guard(capsys, monkeypatch):
    monkeypatch.setenv("HULLSTATS_PRECISION", "25")
    code, _, err = run(capsys, "series", "--quantity", "F", "--k", "3")
    assert code == 2 and "precision" in err
    monkeypatch.setenv("HULLSTATS_PRECISION", "35")
    assert run(capsys, "series", "--quantity", "F", "--k", "3")[0] == 0


def test_series_propK(capsys):
    code, out, _ = run(capsys, "series", "--quantity", "propK", "--order", "6", "--lam", "1/7")
    assert code == 0 and out.strip().endswith("5,0")


def test_oracle_compare(capsys):
    code, out, _ = run(capsys, "oracle", "--N", "5", "--k", "4", "--d", "2", "--compare")
    assert code == 0 and "0 mismatching cells" in out
    code, out, _ = run(capsys, "oracle", "--N", "6", "--k", "5", "--d", "2", "--compare",
                       "--prescription", "maximal")
    assert code == 1


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("k = 6\nall_d = yes\nfamily = iii  # Eulerian\n")
    code, out, _ = run(capsys, "finite", "--config", str(cfg))
    assert code == 0 and "# family iii" in out and "# config: all_d=yes; family=iii; k=6" in out
    code, out, _ = run(capsys, "finite", "--config", str(cfg), "--family", "ii")
    assert "# family ii" in out
    cfg.write_text("colour = 1\n")
    assert run(capsys, "finite", "--config", str(cfg))[0] == 2


def test_mc_from_config(capsys, tmp_path):
    cfg = tmp_path / "mc.cfg"
    cfg.write_text("N = 100\nsamples = 10\nseed = 4\nk_bins = 3-6\nd = 2\nobservables = out_fraction\n")
    code, out, _ = run(capsys, "mc", "--config", str(cfg))
    assert code == 0 and "# plan: N=100 samples=10 seed=4" in out
    assert "bin,observable,mean,stderr,n" in out
    assert out == run(capsys, "mc", "--config", str(cfg), "--workers", "2")[1].replace(" --workers 2", "")
    assert run(capsys, "mc", "--config", str(cfg), "--observables", "bogus")[0] == 2


def test_figures_to_directory(capsys, tmp_path):
    code, _, _ = run(capsys, "figures", "--which", "2,8", "--outdir", str(tmp_path), "--family", "ii")
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["fig02_ii.csv", "fig08_ii.csv"]
    assert run(capsys, "figures", "--which", "10")[0] == 2
    assert run(capsys, "figures", "--which", "2,3")[0] == 2


def test_selftest_pass_and_fail(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "9")
    assert code == 0 and out.startswith("[PASS] criterion  9 operator identity")
    code, out, err = run(capsys, "selftest", "--only", "11")
    assert code == 1 and "first failing check: criterion 11" in err


def test_parse_grid():
    assert parse_grid("0:1:3") == ["0", "1/2", "1"]
    assert parse_grid("0.1, 0.2") == ["0.1", "0.2"]
    with pytest.raises(UsageError):
        parse_grid("0:1:0")


@pytest.mark.skipif(shutil.which("hullstats") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["hullstats", "laws", "--u", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 0 and "501/512" in proc.stdout


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hullstats.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("hullstats ")
