import math

import numpy as np
import pytest

from ncsim.certify import LinearNcsModel, make_certificate
from ncsim.hybrid_sim import (
    HybridState,
    JumpRecord,
    SimulationError,
    Trajectory,
    TriggerConfig,
    average_transmission_interval,
    export_jump_log_csv,
    export_trajectory_csv,
    flow_step,
    in_deadband,
    jump,
    monitor_lyapunov,
    sample_initial_conditions,
    simulate,
)
from ncsim.mati import LambdaPolicy
from ncsim.numerics import SymMatrix, VectorField, integrate_fixed
from ncsim.protocols import NodePartition, Protocol

TWO_SCALAR = NodePartition([1, 1])


@pytest.fixture
def still_model():
    z2 = np.zeros((2, 2))
    return LinearNcsModel(-np.eye(2), z2, z2, z2, TWO_SCALAR)


class TestInDeadband:
    def test_origin(self):
        assert in_deadband(np.zeros(2), 0.1, TWO_SCALAR)

    def test_inside_per_node_threshold(self):
        assert in_deadband([0.04, 0.03], 0.1, TWO_SCALAR)

    def test_single_node_violation(self):
        assert not in_deadband([0.06, 0.0], 0.1, TWO_SCALAR)

    def test_zero_deadband_only_origin(self):
        assert in_deadband(np.zeros(2), 0.0, TWO_SCALAR)
        assert not in_deadband([1e-12, 0.0], 0.0, TWO_SCALAR)


class TestFlowStep:
    def test_zero_field_only_clock_moves(self):
        z2 = np.zeros((2, 2))
        model = LinearNcsModel(z2, z2, z2, z2, TWO_SCALAR)
        s0 = HybridState([1.0, 2.0], [0.3, 0.4], 0.5, 3)
        s1 = flow_step(model, s0, 0.25)
        assert np.array_equal(s1.x, s0.x)
        assert np.array_equal(s1.e, s0.e)
        assert s1.tau == 0.75
        assert s1.kappa == 3

    def test_scalar_decay(self, still_model):
        s0 = HybridState([1.0, 0.0], [0.0, 0.0], 0.0, 0)
        s1 = flow_step(still_model, s0, 1.0)
        assert s1.x[0] == pytest.approx(math.exp(-1.0), abs=1e-8)
        assert s1.tau == 1.0

    def test_matches_stacked_integration(self, reactor_model):
        rng = np.random.default_rng(0)
        z0 = rng.normal(size=8)
        s0 = HybridState(z0[:6], z0[6:], 0.0, 0)
        s1 = flow_step(reactor_model, s0, 0.05, step=1e-4)
        a = reactor_model.stacked()
        field = VectorField(8, lambda t, z: a @ z)
        z1 = integrate_fixed(field, 0.0, z0, 0.05, step=1e-4)
        assert np.allclose(np.concatenate([s1.x, s1.e]), z1, atol=1e-12)


class TestJump:
    def test_delegates_to_protocol(self):
        proto = Protocol("mtod", TWO_SCALAR)
        s0 = HybridState([1.0, -1.0], [2.0, 1.0], 0.7, 4)
        s1 = jump(s0, proto)
        assert np.array_equal(s1.e, [0.0, 1.0])
        assert s1.tau == 0.0
        assert s1.kappa == 5

    def test_plant_state_untouched(self):
        proto = Protocol("tod", TWO_SCALAR)
        x = np.array([0.1, -0.2])
        s1 = jump(HybridState(x, [1.0, 0.5], 1.0, 0), proto)
        assert s1.x.tobytes() == x.tobytes()

    def test_rr_non_granting_counter(self):
        proto = Protocol("mrr", TWO_SCALAR)
        # |e| = 0.5 gives stride 2: counter 3 grants nothing
        s0 = HybridState([0.0, 0.0], [0.3, 0.4], 0.9, 3)
        s1 = jump(s0, proto)
        assert np.array_equal(s1.e, s0.e)
        assert s1.tau == 0.0
        assert s1.kappa == 4


class TestSimulate:
    def test_origin_is_invariant(self, reactor_model, tod_cert, mtod_protocol):
        cfg = TriggerConfig(deadband=0.2, horizon=0.5, step=1e-4)
        traj = simulate(
            reactor_model, mtod_protocol, tod_cert, cfg, np.zeros(6), np.zeros(2)
        )
        assert traj.jump_count == 0
        assert traj.final_x_norm == 0.0
        assert np.all(traj.xs == 0.0)

    def test_smaller_deadband_more_jumps(self, reactor_model, tod_cert, mtod_protocol):
        rng = np.random.default_rng(1)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        counts = {}
        for d in (0.2, 1.2):
            cfg = TriggerConfig(deadband=d, horizon=1.5, step=1e-4)
            counts[d] = simulate(
                reactor_model, mtod_protocol, tod_cert, cfg, x0, e0
            ).jump_count
        assert counts[0.2] > counts[1.2]

    def test_gaps_respect_dwell_bounds(self, reactor_model, tod_cert, mtod_protocol):
        rng = np.random.default_rng(2)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.2, horizon=1.0, step=1e-4)
        traj = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x0, e0)
        assert traj.jump_count >= 2
        gaps = traj.interval_durations()
        for idx, gap in enumerate(gaps):
            assert gap >= traj.dwells[idx] * (1.0 - 1e-12) - 1e-15
        assert traj.min_interjump > 0.0

    def test_jump_guard_held_at_every_jump(self, reactor_model, tod_cert, mtod_protocol):
        rng = np.random.default_rng(3)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.3, horizon=1.0, step=1e-4)
        traj = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x0, e0)
        thresh = cfg.deadband / 2
        times = np.concatenate([[0.0], traj.jump_times])
        for idx, rec in enumerate(traj.jumps):
            tau_at_jump = rec.t - times[idx]
            assert tau_at_jump >= traj.dwells[idx] - cfg.step
            assert np.max(np.abs(rec.e_before)) >= thresh - 1e-6

    def test_deterministic_bit_identical(self, reactor_model, tod_cert, mtod_protocol):
        rng1 = np.random.default_rng(4)
        rng2 = np.random.default_rng(4)
        cfg = TriggerConfig(deadband=0.2, horizon=0.8, step=1e-4)
        x1, e1 = sample_initial_conditions(rng1, 6, 2)
        x2, e2 = sample_initial_conditions(rng2, 6, 2)
        ta = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x1, e1)
        tb = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x2, e2)
        assert ta.ts.tobytes() == tb.ts.tobytes()
        assert ta.xs.tobytes() == tb.xs.tobytes()
        assert ta.es.tobytes() == tb.es.tobytes()
        assert ta.lambdas.tobytes() == tb.lambdas.tobytes()

    def test_zero_deadband_is_pure_time_regularization(
        self, reactor_model, tod_cert, mtod_protocol
    ):
        rng = np.random.default_rng(5)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.0, horizon=0.05, step=1e-4)
        traj = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x0, e0)
        # every gap equals its dwell bound up to one integrator step
        gaps = traj.interval_durations()
        assert traj.jump_count > 0
        for idx, gap in enumerate(gaps):
            assert gap == pytest.approx(traj.dwells[idx], abs=cfg.step)

    def test_nonfinite_initial_state_rejected(self, reactor_model, tod_cert, mtod_protocol):
        cfg = TriggerConfig(deadband=0.2, horizon=0.5, step=1e-4)
        with pytest.raises(SimulationError):
            simulate(
                reactor_model,
                mtod_protocol,
                tod_cert,
                cfg,
                np.full(6, np.nan),
                np.zeros(2),
            )

    def test_divergent_flow_detected(self):
        # explosive error dynamics overflow within one long flow step
        z2 = np.zeros((2, 2))
        model = LinearNcsModel(-np.eye(2), z2, z2, 200.0 * np.eye(2), TWO_SCALAR)
        s0 = HybridState([1.0, 1.0], [0.1, 0.1], 0.0, 0)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(SimulationError):
                flow_step(model, s0, 6.0, step=1e-3)

    def test_rr_counter_starts_at_one(self, reactor_model, rr_cert, mrr_protocol):
        rng = np.random.default_rng(6)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.4, horizon=0.5, step=1e-4)
        traj = simulate(reactor_model, mrr_protocol, rr_cert, cfg, x0, e0)
        assert traj.kappas[0] == 1


class TestTrajectoryHelpers:
    def _tiny_trajectory(self, jump_ts):
        n = len(jump_ts) + 1
        ts, js, taus, kappas = [0.0], [0], [0.0], [0]
        prev = 0.0
        for j, t in enumerate(jump_ts, start=1):
            ts += [t, t]
            js += [j - 1, j]
            taus += [t - prev, 0.0]
            kappas += [j - 1, j]
            prev = t
        ts.append(jump_ts[-1] + 0.1)
        js.append(len(jump_ts))
        taus.append(0.1)
        kappas.append(len(jump_ts))
        m = len(ts)
        jumps = [
            JumpRecord(t, j + 1, np.zeros(2), np.zeros(2), 0.5, 1e-6, 1.0, 0.5)
            for j, t in enumerate(jump_ts)
        ]
        return Trajectory(
            ts=np.array(ts),
            js=np.array(js),
            xs=np.zeros((m, 1)),
            es=np.zeros((m, 2)),
            taus=np.array(taus),
            kappas=np.array(kappas),
            v_vals=np.zeros(m),
            w_vals=np.zeros(m),
            jumps=jumps,
            lambdas=np.full(n, 0.5),
            dwells=np.full(n, 1e-6),
            config=TriggerConfig(deadband=0.1, horizon=jump_ts[-1] + 0.1),
            protocol_kind="mtod",
        )

    def test_average_interval_uniform(self):
        traj = self._tiny_trajectory([1.0, 2.0, 3.0])
        assert average_transmission_interval(traj) == pytest.approx(1.0)

    def test_average_interval_mixed(self):
        traj = self._tiny_trajectory([1e-5, 0.5, 2.0])
        assert average_transmission_interval(traj) == pytest.approx(1.0, abs=1e-5)

    def test_average_interval_needs_two_jumps(self):
        traj = self._tiny_trajectory([1.0])
        with pytest.raises(ValueError):
            average_transmission_interval(traj)

    def test_zeno_violation_rejected(self):
        with pytest.raises(SimulationError):
            traj = self._tiny_trajectory([1.0, 2.0])
            object.__setattr__(traj, "dwells", np.full(3, 10.0))
            traj._check_zeno_free()


class TestSampling:
    def test_within_open_balls(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            x0, e0 = sample_initial_conditions(rng, 6, 2)
            assert np.linalg.norm(x0) < 2.0
            assert np.linalg.norm(e0) < 1.5

    def test_seed_reproducibility(self):
        a = sample_initial_conditions(np.random.default_rng(8), 6, 2)
        b = sample_initial_conditions(np.random.default_rng(8), 6, 2)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


class TestMonitor:
    def test_zero_trajectory_all_checks_pass(self, reactor_model, tod_cert, mtod_protocol):
        cfg = TriggerConfig(deadband=0.2, horizon=0.3, step=1e-4)
        traj = simulate(
            reactor_model, mtod_protocol, tod_cert, cfg, np.zeros(6), np.zeros(2)
        )
        report = monitor_lyapunov(traj, tod_cert, mtod_protocol)
        assert np.all(report.u_vals == 0.0)
        assert report.all_ok

    def test_certified_run_passes(self, reactor_model, tod_cert, mtod_protocol):
        rng = np.random.default_rng(9)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.6, horizon=2.0, step=1e-4)
        traj = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x0, e0)
        report = monitor_lyapunov(traj, tod_cert, mtod_protocol)
        assert report.flow_ok and report.jump_ok and report.envelope_ok

    def test_protocol_mismatch_rejected(self, reactor_model, tod_cert, mtod_protocol, mrr_protocol):
        cfg = TriggerConfig(deadband=0.2, horizon=0.2, step=1e-4)
        traj = simulate(
            reactor_model, mtod_protocol, tod_cert, cfg, np.zeros(6), np.zeros(2)
        )
        with pytest.raises(ValueError):
            monitor_lyapunov(traj, tod_cert, mrr_protocol)

    def test_timer_certificate_initialized_per_interval(
        self, reactor_model, tod_cert, mtod_protocol
    ):
        rng = np.random.default_rng(10)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.4, horizon=1.0, step=1e-4)
        traj = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x0, e0)
        report = monitor_lyapunov(traj, tod_cert, mtod_protocol)
        starts = np.flatnonzero(traj.taus == 0.0)
        for s in starts:
            interval = int(traj.js[s])
            assert report.phi_vals[s] == pytest.approx(1.0 / traj.lambdas[interval])


class TestCsvExport:
    def test_trajectory_schema_and_roundtrip(self, tmp_path, reactor_model, tod_cert, mtod_protocol):
        rng = np.random.default_rng(11)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.4, horizon=0.3, step=1e-4)
        traj = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x0, e0)
        report = monitor_lyapunov(traj, tod_cert, mtod_protocol)
        path = tmp_path / "traj.csv"
        export_trajectory_csv(traj, path, monitor=report)
        lines = path.read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header == (
            ["t", "j"]
            + [f"x{i}" for i in range(1, 7)]
            + ["e1", "e2", "tau", "kappa", "V", "W", "U"]
        )
        assert len(lines) == traj.ts.size + 1
        first = lines[1].split(",")
        assert float(first[0]) == traj.ts[0]
        assert float(first[-1]) == report.u_vals[0]

    def test_jump_log_schema(self, tmp_path, reactor_model, tod_cert, mtod_protocol):
        rng = np.random.default_rng(12)
        x0, e0 = sample_initial_conditions(rng, 6, 2)
        cfg = TriggerConfig(deadband=0.2, horizon=0.5, step=1e-4)
        traj = simulate(reactor_model, mtod_protocol, tod_cert, cfg, x0, e0)
        path = tmp_path / "jumps.csv"
        export_jump_log_csv(traj, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t_j,j,lambda_j,T_j,W_before,W_after"
        assert len(lines) == traj.jump_count + 1
        row = lines[1].split(",")
        assert float(row[0]) == traj.jumps[0].t
        assert float(row[2]) == traj.jumps[0].lam
