"""Command-line surface: full pipeline, output shapes, and exit codes."""

import json
import os
import pathlib
import subprocess
import sys

import pytest

from polarlattice.cli import EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, main
from polarlattice.sim import read_report

_FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="module")
def lattice_file(tmp_path_factory):
    """A designed n=256 lattice written once through the CLI itself."""
    out = tmp_path_factory.mktemp("cli") / "lattice.json"
    code = main([
        "construct", "--sigma", "0.3488", "--n", "256",
        "--target-pe", "5e-5", "--out", str(out),
    ])
    assert code == EXIT_OK
    return out


# ---------------------------------------------------------------------------
# happy paths
# ---------------------------------------------------------------------------

def test_capacity_reports_levels(capsys):
    assert main(["capacity", "--sigma", "0.3488", "--levels", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "level 1:" in out and "level 3:" in out
    assert "capacity=0.477" in out
    assert "capacity=0.983" in out
    assert out.strip().splitlines()[-1].startswith("sum=")


def test_capacity_quantized_column(capsys):
    assert main(["capacity", "--sigma", "0.3488", "--levels", "1", "--K", "32"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "quantized=" in out and "gap=" in out


def test_construct_writes_descriptor(lattice_file, capsys):
    payload = json.loads(lattice_file.read_text())
    assert payload["N"] == 256 and payload["r"] == 3
    assert [len(fs) for fs in payload["free_sets"]] == [21, 176]
    design = payload["design"]
    assert design["total_bound"] <= 5e-5
    assert design["sigma"] == 0.3488


def test_bounds_report_structure(lattice_file, capsys):
    assert main(["bounds", "--lattice", str(lattice_file), "--sigma", "0.3488"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["n"] == 256 and report["r"] == 3
    assert report["nested"] is True
    assert report["log2_volume"] == 256 * 2 - (21 + 176)
    assert report["vnr_db"] == pytest.approx(4.2319, abs=2e-3)
    assert report["union_bound_pe"] <= 5e-5
    assert len(report["levels"]) == 2
    assert abs(report["epsilon"]["gap_db"] - report["vnr_db"]) < 1e-6


def test_simulate_writes_report(lattice_file, tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main([
        "simulate", "--lattice", str(lattice_file), "--sigma", "0.45",
        "--seed", "9", "--max-trials", "200", "--min-errors", "10",
        "--out", str(out),
    ])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "trials=" in text and "first-error attribution" in text
    [record] = read_report(str(out))
    assert record.sigma == 0.45 and record.seed == 9
    assert record.result.trials <= 200


@pytest.mark.skipif(
    bool(os.environ.get("POLARLATTICE_NO_NUMBA")),
    reason="golden counts were frozen on the compiled decode path",
)
def test_sweep_reproduces_golden_bytes(lattice_file, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main([
        "sweep", "--lattice", str(lattice_file), "--vnr-db", "1.5,2.5",
        "--seed", "20240816", "--max-trials", "400", "--min-errors", "30",
        "--out", str(out),
    ])
    assert code == EXIT_OK
    golden = pathlib.Path(_FIXTURES) / "sweep_n256_seed20240816.csv"
    assert out.read_bytes() == golden.read_bytes()
    assert capsys.readouterr().out.count("vnr=") == 2


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "polarlattice.cli", "capacity",
         "--sigma", "0.5", "--levels", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "level 1:" in proc.stdout


# ---------------------------------------------------------------------------
# failure paths
# ---------------------------------------------------------------------------

def test_argparse_rejections_exit_2():
    for argv in (
        ["capacity", "--sigma", "-1"],
        ["capacity"],
        ["no-such-command"],
        ["sweep", "--lattice", "x", "--vnr-db", "", "--out", "y"],
    ):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 2


def test_missing_lattice_file_exits_2(tmp_path, capsys):
    code = main(["bounds", "--lattice", str(tmp_path / "nope.json"), "--sigma", "0.3"])
    assert code == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_malformed_lattice_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["bounds", "--lattice", str(bad), "--sigma", "0.3"]) == EXIT_CONFIG
    inconsistent = tmp_path / "inconsistent.json"
    inconsistent.write_text(json.dumps({"N": 8, "r": 3, "free_sets": [[7]]}))
    assert main(["bounds", "--lattice", str(inconsistent), "--sigma", "0.3"]) == EXIT_CONFIG


def test_unwritable_output_exits_2(lattice_file, tmp_path, capsys):
    out = tmp_path / "missing" / "run.csv"
    code = main([
        "simulate", "--lattice", str(lattice_file), "--sigma", "0.45",
        "--max-trials", "5", "--min-errors", "1", "--out", str(out),
    ])
    assert code == EXIT_CONFIG


def test_infeasible_design_exits_3(tmp_path, capsys):
    code = main([
        "construct", "--sigma", "2e6", "--n", "256",
        "--target-pe", "1e-4", "--out", str(tmp_path / "x.json"),
    ])
    assert code == EXIT_INFEASIBLE
    assert "infeasible" in capsys.readouterr().err
