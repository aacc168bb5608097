#!/usr/bin/env python3
"""Regenerate src/ncsim/data/batch_reactor.json.

Builds the closed-loop blocks of the batch-reactor benchmark (the standard
unstable batch reactor with its stabilizing PI output controller, as used
across the networked-control literature) and synthesizes the storage
matrices P for the TOD and RR gain configurations with an SDP solver.

Requires cvxpy (not a package dependency; verification in ncsim never
solves SDPs, it only checks shipped certificates).  Run from the repo root:

    python scripts/generate_benchmark_data.py
"""

import json
import pathlib
import sys

import numpy as np

try:
    import cvxpy as cp
except ImportError:
    sys.exit("cvxpy is required to regenerate the benchmark data")

EPS_LMI = 0.001

# Plant: 4 states, 2 inputs, 2 outputs (open-loop unstable batch reactor),
# values from the benchmark's standard source.
A_P = np.array(
    [
        [1.380, -0.2077, 6.715, -5.676],
        [-0.5814, -4.290, 0.0, 0.675],
        [1.067, 4.273, -6.654, 5.893],
        [0.048, 4.273, 1.343, -2.104],
    ]
)
B_P = np.array([[0.0, 0.0], [5.679, 0.0], [1.136, -3.146], [1.136, 0.0]])
C_P = np.array([[1.0, 0.0, 1.0, -1.0], [0.0, 1.0, 0.0, 0.0]])

# PI output controller: 2 states.
A_C = np.zeros((2, 2))
B_C = np.array([[0.0, 1.0], [1.0, 0.0]])
C_C = np.array([[-2.0, 0.0], [0.0, 8.0]])
D_C = np.array([[0.0, -2.0], [5.0, 0.0]])

# Pinned benchmark gains per protocol family.
GAIN_CONFIGS = {
    "tod": {"m_bound": 1.0, "gamma": 16.92, "L": 15.73},
    "rr": {"m_bound": float(np.sqrt(2.0)), "gamma": 23.93, "L": 22.24},
}


def closed_loop_blocks():
    """Closed-loop flow blocks with only the plant outputs networked
    (e = yhat - y, zero-order hold between transmissions)."""
    a11 = np.block([[A_P + B_P @ D_C @ C_P, B_P @ C_C], [B_C @ C_P, A_C]])
    a12 = np.vstack([B_P @ D_C, B_C])
    a21 = -C_P @ np.hstack([A_P + B_P @ D_C @ C_P, B_P @ C_C])
    a22 = -C_P @ B_P @ D_C
    return a11, a12, a21, a22


def lmi_block_expr(a11, a12, a21, p, gamma, m_bound):
    n_x, n_e = a11.shape[0], a12.shape[1]
    top_left = (
        a11.T @ p + p @ a11 + m_bound**2 * (a21.T @ a21) + EPS_LMI * np.eye(n_x)
    )
    return cp.bmat(
        [
            [top_left, p @ a12],
            [(p @ a12).T, (EPS_LMI - gamma**2) * np.eye(n_e)],
        ]
    )


def min_gamma(a11, a12, a21, m_bound):
    """Smallest certified gain (cross-check against the pinned values)."""
    n_x = a11.shape[0]
    p = cp.Variable((n_x, n_x), symmetric=True)
    gamma_sq = cp.Variable()
    blk = lmi_block_expr(a11, a12, a21, p, 0.0, m_bound) - cp.bmat(
        [
            [np.zeros((n_x, n_x)), np.zeros((n_x, a12.shape[1]))],
            [np.zeros((a12.shape[1], n_x)), gamma_sq * np.eye(a12.shape[1])],
        ]
    )
    prob = cp.Problem(
        cp.Minimize(gamma_sq), [p >> 1e-6 * np.eye(n_x), blk << 0]
    )
    prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200000)
    return float(np.sqrt(gamma_sq.value))


def storage_matrix(a11, a12, a21, gamma, m_bound):
    """Max-margin P for the pinned gamma: keeps the shipped certificate
    strictly feasible so downstream eigenvalue checks have headroom."""
    n_x = a11.shape[0]
    n = n_x + a12.shape[1]
    p = cp.Variable((n_x, n_x), symmetric=True)
    margin = cp.Variable(nonneg=True)
    blk = lmi_block_expr(a11, a12, a21, p, gamma, m_bound)
    cons = [
        blk << -margin * np.eye(n),
        p >> margin * np.eye(n_x),
        p << 500.0 * np.eye(n_x),
    ]
    prob = cp.Problem(cp.Maximize(margin), cons)
    prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200000)
    if prob.status != cp.OPTIMAL:
        sys.exit(f"storage synthesis failed: {prob.status}")
    pv = 0.5 * (p.value + p.value.T)
    return pv, float(margin.value)


def mat_entry(m):
    m = np.asarray(m, dtype=float)
    return {"rows": m.shape[0], "cols": m.shape[1], "data": [float(v) for v in m.flatten()]}


def main():
    a11, a12, a21, a22 = closed_loop_blocks()
    print("|A22| =", np.linalg.norm(a22, 2))

    gains = {}
    for family, cfg in GAIN_CONFIGS.items():
        g_min = min_gamma(a11, a12, a21, cfg["m_bound"])
        print(f"{family}: minimal gamma {g_min:.4f} (pinned {cfg['gamma']})")
        if g_min > cfg["gamma"]:
            sys.exit(f"pinned gamma {cfg['gamma']} infeasible (min {g_min:.4f})")
        pv, margin = storage_matrix(a11, a12, a21, cfg["gamma"], cfg["m_bound"])
        print(f"{family}: storage margin {margin:.4g}, lambda(P) in "
              f"[{np.linalg.eigvalsh(pv)[0]:.3g}, {np.linalg.eigvalsh(pv)[-1]:.3g}]")
        gains[family] = {
            "m_bound": cfg["m_bound"],
            "gamma": cfg["gamma"],
            "L": cfg["L"],
            "eps_lmi": EPS_LMI,
            "p": mat_entry(pv),
        }

    out = {
        "name": "batch-reactor",
        "description": (
            "Unstable batch reactor with PI output controller; plant outputs "
            "networked over two single-dimensional nodes, zero-order hold."
        ),
        "provenance": (
            "Plant/controller numerics from the standard batch-reactor "
            "benchmark of the networked-control literature; closed-loop "
            "blocks derived in scripts/generate_benchmark_data.py; storage "
            "matrices synthesized with cvxpy/SCS at the pinned gains."
        ),
        "partition": [1, 1],
        "a11": mat_entry(a11),
        "a12": mat_entry(a12),
        "a21": mat_entry(a21),
        "a22": mat_entry(a22),
        "gains": gains,
    }
    dest = pathlib.Path(__file__).resolve().parents[1] / "src" / "ncsim" / "data" / "batch_reactor.json"
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print("wrote", dest)


if __name__ == "__main__":
    main()
