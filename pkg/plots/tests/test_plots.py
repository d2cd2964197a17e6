import csv
import hashlib
from pathlib import Path

import pytest

from sweepfig import EmptyDataError, PlotJob, SchemaError, load_sweep_csv, render
from sweepfig.cli import main as cli_main

GOLDEN = Path(__file__).parent / "data" / "golden_sweep.csv"


def small_fixture(tmp_path, rows, columns=None):
    columns = columns or [
        "theta_deg", "p_pbch_db", "snr_db", "snr_est_db",
        "der_lower", "der_upper", "ci", "trials",
    ]
    path = tmp_path / "rows.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)
    return path


class TestLoader:
    def test_golden_loads(self):
        table = load_sweep_csv(GOLDEN, "der-panels")
        assert table.theta.size == 1638

    def test_missing_column_named(self, tmp_path):
        path = small_fixture(
            tmp_path, [[0, 0, 1]], columns=["theta_deg", "p_pbch_db", "snr_db"]
        )
        with pytest.raises(SchemaError, match="der_lower"):
            load_sweep_csv(path, "der-panels")
        # but the same file is fine for an SNR map
        assert load_sweep_csv(path, "snr-heatmap").theta.size == 1

    def test_empty_data_error(self, tmp_path):
        path = small_fixture(tmp_path, [])
        with pytest.raises(EmptyDataError):
            load_sweep_csv(path, "der-panels")

    def test_out_of_range_bounds_rejected_with_rows(self, tmp_path):
        path = small_fixture(
            tmp_path,
            [
                [0, 0, 5, "", 0.1, 0.3, 0.01, 100],
                [1, 0, 5, "", 0.2, 0.7, 0.01, 100],   # upper > 0.5
                [2, 0, 5, "", -0.05, 0.3, 0.01, 100],  # lower < 0
            ],
        )
        with pytest.raises(SchemaError) as err:
            load_sweep_csv(path, "der-panels")
        assert "3" in str(err.value) and "4" in str(err.value)

    def test_unknown_columns_ignored(self, tmp_path):
        path = small_fixture(
            tmp_path,
            [[0, 0, 5, 0.1, 0.2, "bananas", 42]],
            columns=["theta_deg", "p_pbch_db", "snr_db", "der_lower", "der_upper", "note", "x"],
        )
        table = load_sweep_csv(path, "der-panels")
        assert table.der_upper[0] == 0.2

    def test_bad_number_reported(self, tmp_path):
        path = small_fixture(tmp_path, [["zero", 0, 5, "", 0.1, 0.2, 0.01, 100]])
        with pytest.raises(SchemaError, match="row 2"):
            load_sweep_csv(path, "der-panels")


class TestRender:
    def test_der_panels_golden(self, tmp_path):
        out = render(PlotJob(GOLDEN, "der-panels", tmp_path / "panels.png"))
        assert out.exists() and out.stat().st_size > 10_000

    def test_panel_count_matches_powers(self, tmp_path):
        from sweepfig.core import _panel_powers, load_sweep_csv as load

        table = load(GOLDEN, "der-panels")
        assert len(_panel_powers(table)) == 18
        assert list(_panel_powers(table)) == sorted(set(table.p_pbch.tolist()), reverse=True)

    def test_snr_heatmap_golden(self, tmp_path):
        out = render(PlotJob(GOLDEN, "snr-heatmap", tmp_path / "heat.png"))
        assert out.exists() and out.stat().st_size > 10_000

    def test_pattern_cut_golden(self, tmp_path):
        out = render(PlotJob(GOLDEN, "pattern-cut", tmp_path / "cut.png"))
        assert out.exists()

    def test_three_row_smoke(self, tmp_path):
        path = small_fixture(
            tmp_path,
            [
                [-10, 0, 8, "", 0.05, 0.12, 0.01, 100],
                [0, 0, 12, "", 0.01, 0.02, 0.01, 100],
                [10, 0, 8, "", 0.06, 0.11, 0.01, 100],
            ],
        )
        out = render(PlotJob(path, "der-panels", tmp_path / "one.png"))
        assert out.exists()

    def test_regenerate_identical_bytes(self, tmp_path):
        a = render(PlotJob(GOLDEN, "der-panels", tmp_path / "a.png"))
        b = render(PlotJob(GOLDEN, "der-panels", tmp_path / "b.png"))
        ha = hashlib.sha256(a.read_bytes()).hexdigest()
        hb = hashlib.sha256(b.read_bytes()).hexdigest()
        assert ha == hb

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            PlotJob(GOLDEN, "pie-chart", tmp_path / "x.png")


class TestCli:
    def test_success(self, tmp_path, capsys):
        code = cli_main(
            ["--kind", "snr-heatmap", "--in", str(GOLDEN), "--out", str(tmp_path / "o.png")]
        )
        assert code == 0
        assert "wrote" in capsys.readouterr().out

    def test_schema_failure_exit_1(self, tmp_path, capsys):
        bad = small_fixture(tmp_path, [[0, 0, 5, "", 0.3, 0.9, 0.01, 100]])
        code = cli_main(["--kind", "der-panels", "--in", str(bad), "--out", str(tmp_path / "o.png")])
        assert code == 1
        assert "0.5" in capsys.readouterr().err

    def test_missing_file_exit_1(self, tmp_path):
        code = cli_main(
            ["--kind", "der-panels", "--in", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.png")]
        )
        assert code == 1
