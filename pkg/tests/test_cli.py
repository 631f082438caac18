import json

import pytest

from ertbp.cli import main
from ertbp.horizons import fixture_path

FAST = ["--order", "9", "--precision-digits", "25"]


def test_propagate_zero_time_echoes_initial(capsys):
    code = main(["propagate", "--t-end", "0",
                 "--z1", "0.25", "--z2", "-0.125",
                 "--v1", "0.5", "--v2", "1.5", *FAST])
    assert code == 0
    out = capsys.readouterr().out
    assert "# backend:" in out
    assert "2.50000000000000000000000000000e-01" in out
    assert "-1.25000000000000000000000000000e-01" in out
    assert "1.50000000000000000000000000000e+00" in out


def test_closure_short_span_reports_all_rows(capsys):
    code = main(["closure", "--t-end", "0.05", *FAST])
    assert code == 0
    out = capsys.readouterr().out
    assert "dz_si" in out and "dv_si" in out and "|r|" in out


def test_refine_zero_iterations_prints_residual(capsys):
    code = main(["refine", "--t-end", "0.05", "--max-iter", "0", *FAST])
    assert code == 0
    out = capsys.readouterr().out
    assert "iter 0: residual" in out
    assert "converged:" in out


def test_monodromy_short_span(capsys):
    code = main(["monodromy", "--t-end", "0.1", *FAST])
    assert code == 0
    out = capsys.readouterr().out
    assert "det" in out
    assert "lambda" in out or "eigen" in out


def test_compare_identical_files_zero(capsys, tmp_path):
    code = main(["compare", fixture_path(), fixture_path()])
    assert code == 0
    out = capsys.readouterr().out
    assert "min   = 0.00000000 AU" in out
    assert "max   = 0.00000000 AU" in out


def test_ellipse_against_fixture(capsys):
    code = main(["ellipse", "--count", "500"])
    assert code == 0
    out = capsys.readouterr().out
    assert "count = 500" in out
    assert "rms" in out


def test_ephemeris_csv_header_and_provenance(capsys, tmp_path):
    out_path = tmp_path / "eph.csv"
    code = main(["ephemeris", "--count", "3", "--step-days", "19",
                 "--output", str(out_path), *FAST])
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1].startswith("date,x_au,y_au,z_au,vx_au_ut")
    assert len(lines) == 5
    assert lines[2].startswith("2017-Feb-17")


def test_ephemeris_provenance_rerun_is_bit_identical(capsys, tmp_path):
    first = tmp_path / "a.csv"
    code = main(["ephemeris", "--count", "3", "--step-days", "7",
                 "--output", str(first), *FAST])
    assert code == 0
    capsys.readouterr()
    embedded = json.loads(first.read_text().splitlines()[0][len("# config: "):])
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps(embedded))
    second = tmp_path / "b.csv"
    code = main(["ephemeris", "--count", "3", "--step-days", "7",
                 "--config", str(cfg_file), "--output", str(second)])
    assert code == 0
    strip = lambda text: "\n".join(text.splitlines()[1:])  # config lines differ in output path
    assert strip(first.read_text()) == strip(second.read_text())


def test_ephemeris_table_velocity_changes_velocity_columns(capsys, tmp_path):
    plain = tmp_path / "plain.csv"
    affine = tmp_path / "affine.csv"
    main(["ephemeris", "--count", "2", "--step-days", "5",
          "--output", str(plain), *FAST])
    main(["ephemeris", "--count", "2", "--step-days", "5",
          "--table-velocity", "--output", str(affine), *FAST])
    capsys.readouterr()
    row_p = plain.read_text().splitlines()[2].split(",")
    row_a = affine.read_text().splitlines()[2].split(",")
    assert row_p[1:4] == row_a[1:4]          # positions agree
    assert row_p[4:7] != row_a[4:7]          # AU/ut velocities shifted


def test_trace_emits_svg(capsys):
    code = main(["trace", "--t-end", "0.3", "--samples", "40",
                 "--frame-of-reference", "rotating-pulsating", *FAST])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("<svg ")
    assert "polyline" in out


def test_collision_exit_code(capsys):
    # start essentially on top of the lighter primary
    code = main(["propagate", "--t-end", "0.2",
                 "--z1", "0.999046661", "--z2", "0",
                 "--v1", "0", "--v2", "0", *FAST])
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_config_error_exit_code(capsys):
    code = main(["propagate", "--t-end", "0", "--mu", "0.7", *FAST])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_fetch_offline_exit_code(capsys, tmp_path):
    code = main(["fetch", "--cache-dir", str(tmp_path)])
    assert code == 5
    assert "network" in capsys.readouterr().err


def test_fit_budget_warning_exit_code(capsys):
    code = main(["fit", "--budget", "10", "--node-deg", "135"])
    assert code == 15
    captured = capsys.readouterr()
    assert "warning:" in captured.err
    assert "objective(rms)" in captured.out
