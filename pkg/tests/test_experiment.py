import numpy as np
import pytest

from ncsim.experiment import (
    ExperimentConfig,
    SweepError,
    read_summary_csv,
    run_sweep,
    table1,
    write_summary_csv,
    SUMMARY_COLUMNS,
)


@pytest.fixture(scope="module")
def small_sweep(reactor_model, tod_cert, mtod_protocol):
    cfg = ExperimentConfig(
        protocol="mtod",
        deadbands=(0.1, 0.4, 0.8),
        seeds=3,
        horizon=2.0,
    )
    return run_sweep(reactor_model, mtod_protocol, tod_cert, cfg), cfg


class TestRunSweep:
    def test_row_grid(self, small_sweep):
        summary, cfg = small_sweep
        assert len(summary.rows) == len(cfg.deadbands)
        assert summary.deadbands == list(cfg.deadbands)
        for row in summary.rows:
            assert row.protocol == "mtod"
            assert row.seeds == cfg.seeds
            assert row.budget == pytest.approx(row.deadband * 2)

    def test_tbar_increases_with_deadband(self, small_sweep):
        summary, _ = small_sweep
        tbars = [row.tbar_mean for row in summary.rows]
        assert tbars[0] < tbars[1] < tbars[2]

    def test_interval_bound_tracks_realized_ratio(self, small_sweep, tod_cert):
        from ncsim.mati import mati_bound

        summary, _ = small_sweep
        for row in summary.rows:
            assert row.t_lower == pytest.approx(
                mati_bound(tod_cert.gamma, tod_cert.L, row.lambda_max)
            )
            assert 0.0 < row.lambda_min <= row.lambda_max < 1.0

    def test_delta_bound_positive(self, small_sweep):
        summary, _ = small_sweep
        for row in summary.rows:
            assert row.delta_bound > 0.0
            assert row.ultimate_bound < row.delta_bound

    def test_deterministic_repeat(self, reactor_model, tod_cert, mtod_protocol, small_sweep):
        summary, cfg = small_sweep
        again = run_sweep(reactor_model, mtod_protocol, tod_cert, cfg)
        assert again.rows == summary.rows

    def test_parallel_matches_serial(self, reactor_model, tod_cert, mtod_protocol, small_sweep):
        summary, cfg = small_sweep
        par_cfg = ExperimentConfig(
            protocol=cfg.protocol,
            deadbands=cfg.deadbands,
            seeds=cfg.seeds,
            horizon=cfg.horizon,
            workers=2,
        )
        par = run_sweep(reactor_model, mtod_protocol, tod_cert, par_cfg)
        assert par.rows == summary.rows

    def test_fixed_mode_requires_ratios(self):
        with pytest.raises(ValueError):
            ExperimentConfig(protocol="mtod", lambda_mode="fixed")

    def test_failure_names_cell(self, reactor_model, tod_cert, mtod_protocol):
        cfg = ExperimentConfig(
            protocol="mtod",
            deadbands=(0.2,),
            seeds=1,
            horizon=1.0,
            lambda_mode="fixed",
            fixed_lambdas={0.2: 0.5},
            mati_scale=1.0,
        )
        # sabotage: a fixed ratio so small the dwell exceeds the horizon is
        # fine, but a None ratio must blow up inside the cell with context
        bad = ExperimentConfig(
            protocol="mtod",
            deadbands=(0.2,),
            seeds=2,
            horizon=0.5,
            lambda_mode="fixed",
            fixed_lambdas={0.3: 0.5},  # missing the swept value
        )
        with pytest.raises(SweepError, match=r"deadband=0.2, seed=0"):
            run_sweep(reactor_model, mtod_protocol, tod_cert, bad)


class TestSummaryIo:
    def test_csv_round_trip(self, tmp_path, small_sweep):
        summary, _ = small_sweep
        path = tmp_path / "summary.csv"
        write_summary_csv(summary, path)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(SUMMARY_COLUMNS)
        loaded = read_summary_csv(path)
        assert loaded.rows == summary.rows

    def test_schema_guard(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="columns"):
            read_summary_csv(path)

    def test_table_extraction(self, small_sweep):
        summary, cfg = small_sweep
        pairs = table1(summary)
        assert [d for d, _ in pairs] == list(cfg.deadbands)
        assert all(t > 0 for _, t in pairs)
