"""Small numerical kernel shared by the rest of the package.

Everything here is deliberately simple and deterministic: fixed-step RK4
integration, bisection-based event localization, a cyclic Jacobi eigensolver
for small symmetric matrices, and the spectral norm built on top of it.
The matrices handled by this project are tiny (at most ~12x12), so
predictability and zero surprises beat asymptotic speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

__all__ = [
    "VectorField",
    "SymMatrix",
    "IntegrationError",
    "EventNotFound",
    "integrate_fixed",
    "locate_event",
    "sym_eigenvalues",
    "spectral_norm",
]


class IntegrationError(RuntimeError):
    """Raised when an ODE right-hand side produces non-finite values."""


class EventNotFound(RuntimeError):
    """Raised when a guard never crosses zero before the time limit."""


@dataclass(frozen=True)
class VectorField:
    """An autonomous-or-not ODE right-hand side ``xdot = f(t, x)``.

    ``dimension`` is the state size; ``f`` must return a vector of exactly
    that many entries and must be deterministic for identical inputs.
    """

    dimension: int
    f: Callable[[float, np.ndarray], np.ndarray]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        dx = np.asarray(self.f(t, x), dtype=float)
        if dx.shape != (self.dimension,):
            raise IntegrationError(
                f"vector field returned shape {dx.shape}, expected ({self.dimension},)"
            )
        return dx


@dataclass(frozen=True)
class SymMatrix:
    """A real symmetric matrix, symmetrized on construction.

    The stored array satisfies ``entries[i][j] == entries[j][i]`` exactly
    (entries are averaged with their transpose, which is idempotent for an
    already symmetric input).
    """

    entries: np.ndarray

    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        a = 0.5 * (a + a.T)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def order(self) -> int:
        return self.entries.shape[0]


def _rk4_step(field: VectorField, t: float, x: np.ndarray, h: float) -> np.ndarray:
    k1 = field(t, x)
    k2 = field(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = field(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = field(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed(
    field: VectorField,
    t0: float,
    x0,
    t1: float,
    step: float = 1e-4,
) -> np.ndarray:
    """Integrate ``field`` from ``(t0, x0)`` to ``t1`` with fixed-step RK4.

    Takes whole steps of size ``step`` and one final shorter step so the
    result lands exactly on ``t1``.  Global error is O(step^4) for smooth
    fields.  Raises :class:`IntegrationError` on non-finite derivatives or
    states.
    """
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    if step <= 0.0:
        raise ValueError("step must be positive")
    x = np.array(x0, dtype=float).reshape(field.dimension)
    span = t1 - t0
    n_full = int(math.floor(span / step))
    t = t0
    for _ in range(n_full):
        x = _rk4_step(field, t, x, step)
        t += step
        if not np.all(np.isfinite(x)):
            raise IntegrationError(f"state became non-finite near t={t}")
    rem = t1 - t
    if rem > 0.0:
        x = _rk4_step(field, t, x, rem)
        if not np.all(np.isfinite(x)):
            raise IntegrationError(f"state became non-finite near t={t1}")
    return x


def locate_event(
    field: VectorField,
    guard: Callable[[np.ndarray], float],
    t0: float,
    x0,
    t_max: float,
    step: float = 1e-4,
    max_bisections: int = 50,
) -> Optional[Tuple[float, np.ndarray]]:
    """Find the first guard zero-crossing (negative to nonnegative) along a flow.

    Marches from ``(t0, x0)`` with fixed RK4 steps until the guard becomes
    nonnegative, then refines the crossing time by bisection inside the
    bracketing step (re-integrating from the bracket start, so refinement is
    monotone and repeatable).  Returns ``(t_event, x_event)`` or ``None`` if
    the guard never crosses before ``t_max``.

    The guard must be strictly negative at ``x0``.
    """
    x = np.array(x0, dtype=float).reshape(field.dimension)
    g = guard(x)
    if g >= 0.0:
        raise ValueError("guard must be negative at the initial state")
    t = t0
    while t < t_max:
        h = min(step, t_max - t)
        x_next = _rk4_step(field, t, x, h)
        if not np.all(np.isfinite(x_next)):
            raise IntegrationError(f"state became non-finite near t={t + h}")
        g_next = guard(x_next)
        if g_next >= 0.0:
            # bracketing step found: bisect on the sub-step offset
            lo, hi = 0.0, h
            x_hi = x_next
            for _ in range(max_bisections):
                mid = 0.5 * (lo + hi)
                x_mid = _rk4_step(field, t, x, mid)
                if guard(x_mid) >= 0.0:
                    hi, x_hi = mid, x_mid
                else:
                    lo = mid
                if hi - lo <= 1e-10 * max(t_max, 1.0):
                    break
            return t + hi, x_hi
        x, g, t = x_next, g_next, t + h
    return None


def sym_eigenvalues(m: SymMatrix, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.

    Sweeps Givens rotations over all off-diagonal pairs until the
    off-diagonal Frobenius mass drops below ``tol`` relative to the matrix
    norm.  Intended for the small dense matrices used in this package.
    """
    a = np.array(m.entries, dtype=float)
    n = a.shape[0]
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if n == 1:
        return a[0, :1].copy()
    fro = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                # stable tangent of the rotation angle
                if abs(theta) > 1e150:  # theta^2 would overflow
                    t_ = 0.5 / theta
                else:
                    t_ = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t_ * t_ + 1.0)
                s = t_ * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))


def spectral_norm(m) -> float:
    """Largest singular value of a rectangular matrix.

    Computed as the square root of the largest eigenvalue of ``m.T @ m``
    via the Jacobi solver above.
    """
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.size == 0:
        return 0.0
    gram = SymMatrix(a.T @ a)
    ev = sym_eigenvalues(gram)
    return math.sqrt(max(0.0, float(ev[-1])))
