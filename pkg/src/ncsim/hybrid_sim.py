"""Hybrid simulation of a networked control loop with scheduled transmissions.

The closed loop flows continuously between transmissions and jumps at each
transmission instant.  The full state is ``(x, e, tau, kappa)``: plant and
controller state, network-induced error, time since the last transmission,
and the transmission counter.  Transmissions follow a two-phase policy:

1. after each transmission, wait ``T_j`` seconds unconditionally, where
   ``T_j`` comes from the closed-form interval bound evaluated at a decay
   ratio ``lambda_j`` generated from the protocol Lyapunov value;
2. then keep flowing while every error node stays inside the deadband
   (``|e_i| <= d / num_nodes``), and transmit at the first instant the
   deadband is violated (event-localized).

Since every ``T_j`` is strictly positive, transmissions cannot accumulate
(no Zeno behavior); the recorded trajectory asserts this.

Flows of the linear model use the one-step RK4 transition matrix, which for
a linear autonomous system is exactly the classical RK4 update at the
configured step size.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .certify import Certificate, LinearNcsModel
from .mati import LambdaPolicy, generate_lambda, mati_bound
from .protocols import NodePartition, Protocol, node_norms

__all__ = [
    "HybridState",
    "TriggerConfig",
    "JumpRecord",
    "Trajectory",
    "MonitorReport",
    "SimulationError",
    "in_deadband",
    "flow_step",
    "jump",
    "simulate",
    "monitor_lyapunov",
    "average_transmission_interval",
    "export_trajectory_csv",
    "export_jump_log_csv",
    "sample_initial_conditions",
]


class SimulationError(RuntimeError):
    """Raised when a simulation produces non-finite states."""


@dataclass(frozen=True)
class HybridState:
    """Composite state: plant/controller state, network error, local clock,
    transmission counter."""

    x: np.ndarray
    e: np.ndarray
    tau: float
    kappa: int

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "e", np.asarray(self.e, dtype=float))
        if self.tau < 0.0:
            raise ValueError("tau must be nonnegative")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")


@dataclass(frozen=True)
class TriggerConfig:
    """Transmission policy parameters.

    ``deadband`` is the total deadband budget d (each node's threshold is
    d divided by the node count).  ``mati_scale`` in (0, 1] shortens every
    ``T_j`` below the closed-form bound for extra conservatism.
    ``record_stride`` controls how many integrator steps pass between
    recorded flow samples; interval endpoints are always recorded.
    """

    deadband: float
    horizon: float
    step: float = 1e-4
    lambda_policy: LambdaPolicy = field(default_factory=LambdaPolicy)
    mati_scale: float = 1.0
    record_stride: int = 5

    def __post_init__(self):
        if self.deadband < 0.0:
            raise ValueError("deadband must be nonnegative")
        if self.horizon <= 0.0 or self.step <= 0.0:
            raise ValueError("horizon and step must be positive")
        if not 0.0 < self.mati_scale <= 1.0:
            raise ValueError("mati_scale must lie in (0, 1]")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


def in_deadband(e, deadband: float, partition: NodePartition) -> bool:
    """True iff every node block satisfies ``|e_i| <= deadband / num_nodes``."""
    thresh = deadband / partition.num_nodes
    return bool(np.all(node_norms(e, partition) <= thresh))


def _rk4_transition(a: np.ndarray, h: float) -> np.ndarray:
    """One-step RK4 transition matrix for ``zdot = a z``: the degree-4
    Taylor polynomial of the matrix exponential at ``h``."""
    ah = a * h
    m = np.eye(a.shape[0]) + ah
    term = ah
    for k in (2.0, 3.0, 4.0):
        term = term @ ah / k
        m = m + term
    return m


def flow_step(model: LinearNcsModel, state: HybridState, dt: float, step: float = 1e-4) -> HybridState:
    """Advance the flow over ``dt`` seconds: ``(x, e)`` follow the stacked
    linear dynamics under fixed-step RK4 substeps of size ``step``, ``tau``
    advances by ``dt``, ``kappa`` is held."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    from .numerics import IntegrationError, VectorField, integrate_fixed

    a = model.stacked()
    field = VectorField(a.shape[0], lambda t, z: a @ z)
    z0 = np.concatenate([state.x, state.e])
    try:
        z = integrate_fixed(field, 0.0, z0, dt, step=min(step, dt))
    except IntegrationError as exc:
        raise SimulationError(str(exc)) from exc
    return HybridState(z[: model.n_x], z[model.n_x :], state.tau + dt, state.kappa)


def jump(state: HybridState, protocol: Protocol) -> HybridState:
    """Transmission update: ``x`` unchanged, ``e`` through the protocol jump
    map, clock reset, counter incremented."""
    e_next = protocol.jump(state.kappa, state.e)
    return HybridState(state.x, e_next, 0.0, state.kappa + 1)


@dataclass(frozen=True)
class JumpRecord:
    """One transmission: time, jump index (1-based), error before/after, the
    decay ratio and dwell bound generated at this transmission (they govern
    the following interval), and the Lyapunov value before/after."""

    t: float
    j: int
    e_before: np.ndarray
    e_after: np.ndarray
    lam: float
    dwell: float
    w_before: float
    w_after: float


@dataclass
class Trajectory:
    """Recorded hybrid arc: flow samples, jump records, per-interval
    schedule parameters, and run metadata."""

    ts: np.ndarray
    js: np.ndarray
    xs: np.ndarray
    es: np.ndarray
    taus: np.ndarray
    kappas: np.ndarray
    v_vals: np.ndarray
    w_vals: np.ndarray
    jumps: List[JumpRecord]
    lambdas: np.ndarray  # per interval j = 0 .. jump_count
    dwells: np.ndarray   # matching T_j per interval
    config: TriggerConfig
    protocol_kind: str

    def __post_init__(self):
        self._check_well_ordered()
        self._check_zeno_free()

    @property
    def jump_count(self) -> int:
        return len(self.jumps)

    @property
    def jump_times(self) -> np.ndarray:
        return np.array([rec.t for rec in self.jumps])

    def interval_durations(self) -> np.ndarray:
        """Durations of all completed inter-transmission intervals, the
        initial interval ``[0, t_1]`` included."""
        if not self.jumps:
            return np.array([])
        times = np.concatenate([[self.ts[0]], self.jump_times])
        return np.diff(times)

    @property
    def min_interjump(self) -> float:
        """Smallest completed interval duration; the horizon if the run never
        completed an interval."""
        gaps = self.interval_durations()
        return float(gaps.min()) if gaps.size else float(self.config.horizon)

    @property
    def final_x_norm(self) -> float:
        return float(np.linalg.norm(self.xs[-1]))

    def realized_lambda_range(self, include_initial: bool = True) -> Tuple[float, float]:
        """(min, max) of the generated decay ratios.  ``include_initial``
        drops ``lambda_0`` (which reflects the arbitrary initial error, not
        the triggering mechanism) when False."""
        lams = self.lambdas if include_initial else self.lambdas[1:]
        if lams.size == 0:
            raise ValueError("no decay ratios generated (no jumps recorded)")
        return float(lams.min()), float(lams.max())

    def ultimate_bound(self, tail_fraction: float = 0.2) -> float:
        """Largest ``|x|`` over the final ``tail_fraction`` of the horizon."""
        t_cut = self.ts[-1] - tail_fraction * self.config.horizon
        tail = self.xs[self.ts >= t_cut]
        return float(np.sqrt((tail * tail).sum(axis=1).max()))

    def _check_well_ordered(self):
        if np.any(np.diff(self.ts) < 0.0):
            raise SimulationError("flow sample times are not nondecreasing")
        dj = np.diff(self.js)
        if np.any((dj != 0) & (dj != 1)):
            raise SimulationError("jump index must increment by exactly 1")

    def _check_zeno_free(self):
        gaps = self.interval_durations()
        for idx, gap in enumerate(gaps):
            dwell = self.dwells[idx]
            if gap < dwell * (1.0 - 1e-12) - 1e-15:
                raise SimulationError(
                    f"interval {idx} lasted {gap} < its dwell bound {dwell}"
                )


def sample_initial_conditions(
    rng: np.random.Generator, n_x: int, n_e: int, x_radius: float = 2.0, e_radius: float = 1.5
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw ``x0`` and ``e0`` uniformly from open balls by rejection sampling."""

    def ball(n: int, radius: float) -> np.ndarray:
        while True:
            v = rng.uniform(-radius, radius, size=n)
            if np.linalg.norm(v) < radius:
                return v

    return ball(n_x, x_radius), ball(n_e, e_radius)


def simulate(
    model: LinearNcsModel,
    protocol: Protocol,
    cert: Certificate,
    cfg: TriggerConfig,
    x0,
    e0,
) -> Trajectory:
    """Run the closed loop under the two-phase transmission policy.

    After every transmission (and once at the start) the decay ratio is
    generated from the protocol Lyapunov value at the pre-jump error, the
    dwell bound ``T_j`` follows from the closed-form interval bound, the
    flow runs ``T_j`` seconds without any triggering check, and then runs on
    until the deadband is violated.  The violation instant is localized to
    ``1e-10 * horizon`` by bisection inside the bracketing step.

    The transmission counter starts at 1 for RR-family protocols so the
    cyclic grant indexing (grants at counters 1, 2, ...) is aligned from the
    first transmission; the TOD family ignores the counter.
    """
    cert.check(model)
    if protocol.partition.total_dim != model.n_e:
        raise ValueError("protocol partition does not match the model error dimension")
    x0 = np.asarray(x0, dtype=float).reshape(model.n_x)
    e0 = np.asarray(e0, dtype=float).reshape(model.n_e)
    if not (np.all(np.isfinite(x0)) and np.all(np.isfinite(e0))):
        raise SimulationError("initial state is not finite")

    n_x = model.n_x
    a = model.stacked()
    h = cfg.step
    phi_full = _rk4_transition(a, h)
    # powers of the flow matrix let partial steps and event bisection reuse
    # the RK4 polynomial without rebuilding transition matrices
    a_pows = [a]
    for _ in range(3):
        a_pows.append(a_pows[-1] @ a)
    p_mat = cert.p.entries
    thresh = cfg.deadband / protocol.num_nodes
    event_tol = 1e-10 * cfg.horizon
    blocks = protocol.partition.slices()

    def out_of_deadband(z: np.ndarray) -> bool:
        e_part = z[n_x:]
        for s in blocks:
            seg = e_part[s]
            if math.sqrt(float(np.dot(seg, seg))) > thresh:
                return True
        return False

    def deadband_excess(z: np.ndarray) -> float:
        # positive once some node norm exceeds its threshold
        e_part = z[n_x:]
        worst = -math.inf
        for s in blocks:
            seg = e_part[s]
            worst = max(worst, math.sqrt(float(np.dot(seg, seg))) - thresh)
        return worst

    def step_coeffs(z_from: np.ndarray):
        return [ap @ z_from for ap in a_pows]

    def eval_step(z_from: np.ndarray, coeffs, dt: float) -> np.ndarray:
        # single RK4 step of size dt on precomputed directional terms
        out = z_from.copy()
        fac = 1.0
        for k, w in enumerate(coeffs, start=1):
            fac *= dt / k
            out += fac * w
        return out

    ts, js, zs, taus, kappas = [], [], [], [], []

    def record(t: float, j: int, z: np.ndarray, tau: float, kappa: int):
        if not np.all(np.isfinite(z)):
            raise SimulationError(f"state became non-finite near t={t}")
        if ts and ts[-1] == t and js[-1] == j:
            return  # no flow happened since the last record; state is identical
        ts.append(t)
        js.append(j)
        zs.append(z.copy())
        taus.append(tau)
        kappas.append(kappa)

    z = np.concatenate([x0, e0])
    t, j, tau = 0.0, 0, 0.0
    kappa = 1 if protocol.is_rr_family else 0

    lam = generate_lambda(protocol.lyapunov(kappa, e0), protocol.sigma, cfg.lambda_policy)
    dwell = cfg.mati_scale * mati_bound(cert.gamma, cert.L, lam)
    lambdas, dwells = [lam], [dwell]
    jumps: List[JumpRecord] = []

    record(t, j, z, tau, kappa)
    horizon_reached = False
    while not horizon_reached:
        # phase 1: dwell timer, no triggering checks
        timer_end = t + dwells[j]
        run_until = min(timer_end, cfg.horizon)
        steps_since_record = 0
        while t < run_until:
            dt = min(h, run_until - t)
            z = (phi_full @ z) if dt == h else eval_step(z, step_coeffs(z), dt)
            t += dt
            tau += dt
            steps_since_record += 1
            if steps_since_record >= cfg.record_stride:
                record(t, j, z, tau, kappa)
                steps_since_record = 0
        if timer_end >= cfg.horizon:
            horizon_reached = True
            break

        # phase 2: flow while inside the deadband, localize the violation
        if not out_of_deadband(z):
            crossed = False
            while t < cfg.horizon:
                dt = min(h, cfg.horizon - t)
                z_next = (phi_full @ z) if dt == h else eval_step(z, step_coeffs(z), dt)
                if out_of_deadband(z_next):
                    # bisect the sub-step offset from the bracket start
                    coeffs = step_coeffs(z)
                    lo, hi = 0.0, dt
                    z_hi = z_next
                    while hi - lo > event_tol:
                        mid = 0.5 * (lo + hi)
                        z_mid = eval_step(z, coeffs, mid)
                        if deadband_excess(z_mid) >= 0.0:
                            hi, z_hi = mid, z_mid
                        else:
                            lo = mid
                    z = z_hi
                    t += hi
                    tau += hi
                    crossed = True
                    break
                z = z_next
                t += dt
                tau += dt
                steps_since_record += 1
                if steps_since_record >= cfg.record_stride:
                    record(t, j, z, tau, kappa)
                    steps_since_record = 0
            if not crossed:
                horizon_reached = True
                break

        # transmission: generate the next interval's schedule from the
        # pre-jump Lyapunov value, then apply the protocol jump map
        record(t, j, z, tau, kappa)
        e_before = z[n_x:].copy()
        w_before = protocol.lyapunov(kappa, e_before)
        lam = generate_lambda(w_before, protocol.sigma, cfg.lambda_policy)
        dwell = cfg.mati_scale * mati_bound(cert.gamma, cert.L, lam)
        e_after = protocol.jump(kappa, e_before)
        w_after = protocol.lyapunov(kappa + 1, e_after)
        z = np.concatenate([z[:n_x], e_after])
        j += 1
        kappa += 1
        tau = 0.0
        jumps.append(
            JumpRecord(t, j, e_before, e_after, lam, dwell, w_before, w_after)
        )
        lambdas.append(lam)
        dwells.append(dwell)
        record(t, j, z, tau, kappa)

    record(t, j, z, tau, kappa)

    zs_arr = np.array(zs)
    xs = zs_arr[:, :n_x]
    es = zs_arr[:, n_x:]
    v_vals = np.einsum("ij,jk,ik->i", xs, p_mat, xs)
    w_vals = np.array(
        [protocol.lyapunov(int(k), e) for k, e in zip(kappas, es)]
    )
    return Trajectory(
        ts=np.array(ts),
        js=np.array(js, dtype=int),
        xs=xs,
        es=es,
        taus=np.array(taus),
        kappas=np.array(kappas, dtype=int),
        v_vals=v_vals,
        w_vals=w_vals,
        jumps=jumps,
        lambdas=np.array(lambdas),
        dwells=np.array(dwells),
        config=cfg,
        protocol_kind=protocol.kind,
    )


def average_transmission_interval(traj: Trajectory) -> float:
    """Mean time between consecutive transmissions."""
    times = traj.jump_times
    if times.size < 2:
        raise ValueError("need at least two jumps to average transmission intervals")
    return float(np.diff(times).mean())


# ---------------------------------------------------------------------------
# Lyapunov monitor
# ---------------------------------------------------------------------------

_PHI_FLOOR = -1.0  # once the timer certificate is negative only its sign matters


def _phi_rhs(p: float, gamma: float, L: float) -> float:
    return -2.0 * L * p - gamma * (p * p + 1.0)


def _phi_advance(phi: float, dt: float, gamma: float, L: float) -> float:
    """Integrate the scalar Riccati timer certificate over ``dt`` with RK4
    substeps, clamping at a floor once negative (only the sign matters for
    the composite Lyapunov value there)."""
    if phi <= _PHI_FLOOR:
        return _PHI_FLOOR
    n_sub = max(1, int(math.ceil(dt / 1e-5)))
    hs = dt / n_sub
    for _ in range(n_sub):
        k1 = _phi_rhs(phi, gamma, L)
        k2 = _phi_rhs(phi + 0.5 * hs * k1, gamma, L)
        k3 = _phi_rhs(phi + 0.5 * hs * k2, gamma, L)
        k4 = _phi_rhs(phi + hs * k3, gamma, L)
        phi = phi + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if phi <= _PHI_FLOOR:
            return _PHI_FLOOR
    return phi


@dataclass(frozen=True)
class MonitorReport:
    """Numerical audit of the stability argument along one trajectory.

    * ``flow_margin``: worst excess of the per-interval mean decrease of the
      composite Lyapunov value over ``-eta U + d_hat``; within ``flow_tol``
      on a certified run.
    * ``jump_margin``: worst excess of the post-jump value over
      ``max(1, lam_next/lam_prev)`` times the pre-jump value (timer
      certificate clamped below at its scheduled terminal ratio); within
      ``1e-9`` on a certified run.
    * ``envelope_ok``: whether the decaying envelope with offset ``d_tilde``
      dominates the composite value at every sample.
    """

    u_vals: np.ndarray
    phi_vals: np.ndarray
    flow_margin: float
    flow_tol: float
    flow_pairs_skipped: int
    jump_margin: float
    jump_tol: float
    envelope_ok: bool
    envelope_margin: float
    d_hat: float
    d_tilde: float
    eta: float

    @property
    def flow_ok(self) -> bool:
        return self.flow_margin <= self.flow_tol

    @property
    def jump_ok(self) -> bool:
        return self.jump_margin <= self.jump_tol

    @property
    def all_ok(self) -> bool:
        return self.flow_ok and self.jump_ok and self.envelope_ok


def monitor_lyapunov(traj: Trajectory, cert: Certificate, protocol: Protocol) -> MonitorReport:
    """Evaluate the composite Lyapunov value ``U = V + max(gamma phi W^2, 0)``
    along a trajectory and check its certified decrease properties.

    The timer certificate ``phi`` is reconstructed per interval by
    integrating its Riccati equation from ``1/lambda_j``.  Three checks are
    reported: the flow decrease against ``-eta U + d_hat`` (compared on
    per-sample mean slopes, so no finite-difference bias enters), the jump
    contraction with ratio ``max(1, lambda_{j+1}/lambda_j)``, and the global
    decaying envelope with offset ``d_tilde``.
    """
    if protocol.kind != traj.protocol_kind:
        raise ValueError(
            f"trajectory was produced with protocol {traj.protocol_kind!r}, "
            f"monitor called with {protocol.kind!r}"
        )
    gamma, L, eta = cert.gamma, cert.L, cert.eta
    _, alpha_bar = protocol.bounds()
    d_hat = (gamma * gamma - eta) * alpha_bar(traj.config.deadband) ** 2

    n = traj.ts.size
    phi_vals = np.empty(n)

    # reconstruct phi interval by interval (intervals are maximal runs of a
    # constant jump index)
    boundaries = np.flatnonzero(np.diff(traj.js) != 0) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [n]])
    for s, e_idx in zip(starts, ends):
        interval = int(traj.js[s])
        lam_j = float(traj.lambdas[interval])
        phi = 1.0 / lam_j
        prev_tau = float(traj.taus[s])
        if prev_tau > 0.0:
            phi = _phi_advance(phi, prev_tau, gamma, L)
        phi_vals[s] = phi
        for idx in range(s + 1, e_idx):
            dtau = float(traj.taus[idx]) - prev_tau
            if dtau > 0.0:
                phi = _phi_advance(phi, dtau, gamma, L)
                prev_tau = float(traj.taus[idx])
            phi_vals[idx] = phi

    u_vals = traj.v_vals + np.maximum(gamma * phi_vals * traj.w_vals**2, 0.0)

    # flow check: mean slope between consecutive samples of one interval
    # versus -eta * U + d_hat.  The decrease property holds almost
    # everywhere; for the RR family the Lyapunov energy jumps wherever its
    # grant schedule changes with e, so pairs straddling a schedule change
    # are not slope estimates and are skipped (their count is reported).
    flow_margin = -math.inf
    flow_pairs_skipped = 0
    same_interval = (np.diff(traj.js) == 0) & (np.diff(traj.ts) > 0.0)
    if protocol.is_rr_family:
        regimes = [
            protocol.lyapunov_regime(int(k), e)
            for k, e in zip(traj.kappas, traj.es)
        ]
        same_regime = np.array(
            [regimes[i] == regimes[i + 1] for i in range(n - 1)], dtype=bool
        )
        flow_pairs_skipped = int(np.count_nonzero(same_interval & ~same_regime))
        same_interval = same_interval & same_regime
    if np.any(same_interval):
        idx = np.flatnonzero(same_interval)
        slopes = (u_vals[idx + 1] - u_vals[idx]) / (traj.ts[idx + 1] - traj.ts[idx])
        bounds = -eta * np.minimum(u_vals[idx], u_vals[idx + 1]) + d_hat
        flow_margin = float((slopes - bounds).max())
    u_max = float(u_vals.max()) if n else 0.0
    flow_tol = 1e-3 * (1.0 + u_max)

    # jump check: pre-jump value with the timer certificate clamped below at
    # lambda_j (its scheduled terminal ratio) versus the post-jump value
    jump_margin = -math.inf
    pre_idx = np.flatnonzero(np.diff(traj.js) == 1)
    for rec, pi in zip(traj.jumps, pre_idx):
        lam_prev = float(traj.lambdas[rec.j - 1])
        lam_next = rec.lam
        phi_pre = max(float(phi_vals[pi]), lam_prev)
        u_pre = traj.v_vals[pi] + gamma * phi_pre * rec.w_before**2
        u_post = float(u_vals[pi + 1])
        jump_margin = max(jump_margin, u_post - max(1.0, lam_next / lam_prev) * u_pre)
    jump_tol = 1e-9

    # envelope check
    lam_min, lam_max = float(traj.lambdas.min()), float(traj.lambdas.max())
    eps_gap = traj.min_interjump
    d_tilde = lam_max * d_hat / (lam_min * eta * (1.0 - math.exp(-eta * eps_gap)))
    envelope = (lam_max / lam_min) * u_vals[0] * np.exp(
        -eta * (traj.ts / 2.0 + eps_gap * traj.js / 2.0)
    ) + d_tilde
    envelope_margin = float((u_vals - envelope).max())
    envelope_ok = envelope_margin <= 1e-9 * (1.0 + abs(d_tilde))

    return MonitorReport(
        u_vals=u_vals,
        phi_vals=phi_vals,
        flow_margin=flow_margin,
        flow_tol=flow_tol,
        flow_pairs_skipped=flow_pairs_skipped,
        jump_margin=jump_margin,
        jump_tol=jump_tol,
        envelope_ok=envelope_ok,
        envelope_margin=envelope_margin,
        d_hat=d_hat,
        d_tilde=d_tilde,
        eta=eta,
    )


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def export_trajectory_csv(traj: Trajectory, path, monitor: Optional[MonitorReport] = None) -> None:
    """Write flow samples as CSV: t, j, x..., e..., tau, kappa, V, W, U.

    The U column requires a monitor report; it is left empty otherwise.
    """
    n_x = traj.xs.shape[1]
    n_e = traj.es.shape[1]
    header = (
        ["t", "j"]
        + [f"x{i+1}" for i in range(n_x)]
        + [f"e{i+1}" for i in range(n_e)]
        + ["tau", "kappa", "V", "W", "U"]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(traj.ts.size):
            row = (
                [repr(float(traj.ts[i])), int(traj.js[i])]
                + [repr(float(v)) for v in traj.xs[i]]
                + [repr(float(v)) for v in traj.es[i]]
                + [
                    repr(float(traj.taus[i])),
                    int(traj.kappas[i]),
                    repr(float(traj.v_vals[i])),
                    repr(float(traj.w_vals[i])),
                    repr(float(monitor.u_vals[i])) if monitor is not None else "",
                ]
            )
            writer.writerow(row)


def export_jump_log_csv(traj: Trajectory, path) -> None:
    """Write the jump log as CSV: t_j, j, lambda_j, T_j, W_before, W_after."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_j", "j", "lambda_j", "T_j", "W_before", "W_after"])
        for rec in traj.jumps:
            writer.writerow(
                [
                    repr(rec.t),
                    rec.j,
                    repr(rec.lam),
                    repr(rec.dwell),
                    repr(rec.w_before),
                    repr(rec.w_after),
                ]
            )
