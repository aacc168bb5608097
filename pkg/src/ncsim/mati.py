"""Inter-transmission time bounds and the decay-ratio schedule.

The central object is the closed-form maximum allowable transmission
interval (MATI) ``mati_bound(gamma, L, lam)``: the time a scalar Riccati
comparison system takes to decay from ``1/lam`` to ``lam`` given the ISS
gain ``gamma`` of the plant loop and the growth gain ``L`` of the error
dynamics.  ``mati_bound_by_ode`` computes the same quantity by direct
integration of the Riccati equation and serves as an independent oracle.

``generate_lambda`` produces the per-interval decay ratio from the current
protocol Lyapunov value, and ``ultimate_bound_radius`` evaluates the
practical-stability radius implied by a deadband.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .numerics import VectorField, locate_event

__all__ = [
    "MatiParams",
    "LambdaPolicy",
    "mati_bound",
    "mati_bound_by_ode",
    "generate_lambda",
    "ultimate_bound_radius",
]

# lam very close to 1 drives the bound to zero; the default ceiling keeps the
# schedule strictly inside (0,1) and acts as a numerical anti-Zeno guard
DEFAULT_LAMBDA_FLOOR = 1e-3
DEFAULT_LAMBDA_CEILING = 1.0 - 1e-6

# relative tolerance for classifying gamma == L; the bound is continuous
# across the branch so misclassification this close to it is harmless
_EQUAL_GAIN_RTOL = 1e-12


@dataclass(frozen=True)
class MatiParams:
    """Gain triple feeding the transmission interval bound."""

    gamma: float
    L: float
    lam: float

    def __post_init__(self):
        if self.gamma <= 0.0 or self.L <= 0.0:
            raise ValueError("gamma and L must be positive")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie strictly in (0, 1)")


@dataclass(frozen=True)
class LambdaPolicy:
    """How the per-interval decay ratio is chosen.

    ``state`` mode computes ``sigma(W)/W`` from the protocol Lyapunov value
    at each transmission and clamps it to ``[floor, ceiling]``; ``fixed``
    mode always returns ``fixed_value``.
    """

    mode: str = "state"
    floor: float = DEFAULT_LAMBDA_FLOOR
    ceiling: float = DEFAULT_LAMBDA_CEILING
    fixed_value: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("state", "fixed"):
            raise ValueError("mode must be 'state' or 'fixed'")
        if not (0.0 < self.floor <= self.ceiling < 1.0):
            raise ValueError("need 0 < floor <= ceiling < 1")
        if self.mode == "fixed":
            if self.fixed_value is None or not 0.0 < self.fixed_value < 1.0:
                raise ValueError("fixed mode requires fixed_value in (0, 1)")


def mati_bound(gamma: float, L: float, lam: float) -> float:
    """Closed-form upper bound on the time between transmissions.

    Three branches depending on the gain ratio: arctan for ``gamma > L``,
    a rational expression at ``gamma == L`` (within 1e-12 relative), and
    artanh for ``gamma < L``.  Strictly positive for ``lam`` in (0,1) and
    decreasing in each of ``gamma``, ``L`` and ``lam``.
    """
    MatiParams(gamma, L, lam)
    if abs(gamma - L) <= _EQUAL_GAIN_RTOL * max(gamma, L):
        return (1.0 / L) * (1.0 - lam) / (1.0 + lam)
    ratio = gamma / L
    r = math.sqrt(abs(ratio * ratio - 1.0))
    arg = r * (1.0 - lam) / (2.0 * (lam / (lam + 1.0)) * (ratio - 1.0) + 1.0 + lam)
    if gamma > L:
        return math.atan(arg) / (L * r)
    if arg >= 1.0:
        raise ValueError(
            f"artanh argument {arg} >= 1; inconsistent gain parameters"
        )
    return math.atanh(arg) / (L * r)


def mati_bound_by_ode(gamma: float, L: float, lam: float, steps_per_bound: int = 5000) -> float:
    """Transmission interval bound via direct Riccati integration.

    Integrates ``dphi/dt = -2 L phi - gamma (phi^2 + 1)`` from
    ``phi(0) = 1/lam`` and returns the first time ``phi`` reaches ``lam``,
    marching at ``steps_per_bound`` RK4 steps per unit of the closed-form
    bound (the step choice cannot bias the crossing value, only its
    resolution).  Independent cross-check for :func:`mati_bound`.
    """
    MatiParams(gamma, L, lam)
    field = VectorField(1, lambda t, p: _riccati_rhs(p, gamma, L))
    scale = mati_bound(gamma, L, lam)
    hit = locate_event(
        field,
        guard=lambda p: lam - p[0],
        t0=0.0,
        x0=[1.0 / lam],
        t_max=10.0 * scale,
        step=scale / steps_per_bound,
    )
    if hit is None:
        raise RuntimeError("Riccati trajectory never reached lam within the horizon")
    return hit[0]


def _riccati_rhs(p, gamma, L):
    import numpy as np

    return np.array([-2.0 * L * p[0] - gamma * (p[0] * p[0] + 1.0)])


def generate_lambda(w_value: float, sigma: Callable[[float], float], policy: LambdaPolicy) -> float:
    """Decay ratio for the next inter-transmission interval.

    State mode: ``clamp(sigma(w)/w, floor, ceiling)``.  A zero Lyapunov
    value means the error sits inside the deadband where no transmission
    can fire; the limit value (the ceiling) is returned.
    """
    if policy.mode == "fixed":
        return float(policy.fixed_value)
    if w_value < 0.0:
        raise ValueError("w_value must be nonnegative")
    if w_value == 0.0:
        return policy.ceiling
    ratio = sigma(w_value) / w_value
    return min(max(ratio, policy.floor), policy.ceiling)


def ultimate_bound_radius(
    gamma: float,
    eta: float,
    lambda_max: float,
    lambda_min: float,
    alpha_bar_e: Callable[[float], float],
    deadband: float,
    min_interjump: float,
) -> float:
    """Radius of the ball the plant state practically converges to.

    ``2 * lambda_max * (gamma^2 - eta) * alpha_bar_e(deadband)^2`` over
    ``lambda_min * eta * (1 - exp(-eta * min_interjump))``, where
    ``min_interjump`` is the smallest realized time between transmissions.
    """
    if eta <= 0.0 or gamma * gamma <= eta:
        raise ValueError("need gamma^2 > eta > 0; the bound is vacuous otherwise")
    if not (0.0 < lambda_min <= lambda_max < 1.0):
        raise ValueError("need 0 < lambda_min <= lambda_max < 1")
    if min_interjump <= 0.0:
        raise ValueError("min_interjump must be positive")
    a = alpha_bar_e(deadband)
    num = 2.0 * lambda_max * (gamma * gamma - eta) * a * a
    den = lambda_min * eta * (1.0 - math.exp(-eta * min_interjump))
    return num / den
