"""Gain certification for linear networked control loops.

A :class:`LinearNcsModel` packages the four blocks of the closed-loop flow::

    xdot = A11 x + A12 e        (plant + controller under the network error)
    edot = A21 x + A22 e        (network-induced error dynamics)

Certification checks, for a candidate quadratic storage matrix ``P``, the
block matrix inequality

    [[A11' P + P A11 + M^2 A21' A21 + eps I ,  P A12      ]
     [A12' P                                ,  (eps - g^2) I]]  <= 0

together with ``P > 0``.  Feasibility in ``g`` is monotone (only the lower
right block changes), so the smallest certified gain is found by bisection.
Producing ``P`` itself is left to an external semidefinite solver; this
package ships a benchmark ``P`` as data and only ever verifies.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .numerics import SymMatrix, spectral_norm, sym_eigenvalues
from .protocols import NodePartition

__all__ = [
    "LinearNcsModel",
    "Certificate",
    "CertificationError",
    "DEFAULT_EPS_LMI",
    "compute_L",
    "lmi_block",
    "verify_lmi",
    "bisect_gamma",
    "derive_eta",
    "default_gradient_bound",
]

DEFAULT_EPS_LMI = 0.001

# feasibility margin: the block matrix counts as negative semidefinite when
# its largest eigenvalue does not exceed this
_LMI_EIG_TOL = 1e-9


class CertificationError(RuntimeError):
    """Raised when no certificate can be produced for the requested gains."""


@dataclass(frozen=True)
class LinearNcsModel:
    """Closed-loop flow blocks plus the node partition of the error."""

    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray
    partition: NodePartition

    def __init__(self, a11, a12, a21, a22, partition: NodePartition):
        a11 = np.array(a11, dtype=float)
        a12 = np.array(a12, dtype=float)
        a21 = np.array(a21, dtype=float)
        a22 = np.array(a22, dtype=float)
        n_x = a11.shape[0]
        n_e = partition.total_dim
        expected = {
            "a11": (n_x, n_x),
            "a12": (n_x, n_e),
            "a21": (n_e, n_x),
            "a22": (n_e, n_e),
        }
        for name, mat in (("a11", a11), ("a12", a12), ("a21", a21), ("a22", a22)):
            if mat.shape != expected[name]:
                raise ValueError(
                    f"{name} has shape {mat.shape}, expected {expected[name]} "
                    f"for n_x={n_x}, n_e={n_e}"
                )
        for m in (a11, a12, a21, a22):
            m.flags.writeable = False
        object.__setattr__(self, "a11", a11)
        object.__setattr__(self, "a12", a12)
        object.__setattr__(self, "a21", a21)
        object.__setattr__(self, "a22", a22)
        object.__setattr__(self, "partition", partition)

    @property
    def n_x(self) -> int:
        return self.a11.shape[0]

    @property
    def n_e(self) -> int:
        return self.partition.total_dim

    def stacked(self) -> np.ndarray:
        """The (n_x+n_e) square flow matrix of the concatenated state (x, e)."""
        return np.block([[self.a11, self.a12], [self.a21, self.a22]])

    def content_hash(self) -> str:
        """Stable hash of the model blocks and partition, for certificate
        binding."""
        h = hashlib.sha256()
        h.update(json.dumps(list(self.partition.node_dims)).encode())
        for m in (self.a11, self.a12, self.a21, self.a22):
            h.update(np.ascontiguousarray(m).tobytes())
        return h.hexdigest()[:16]


def default_gradient_bound(kind: str, num_nodes: int) -> float:
    """Default Lipschitz bound M on the Lyapunov gradient per protocol family:
    1 for TOD (W is the plain error norm), sqrt(num_nodes) for RR."""
    from .protocols import canonical_kind

    if canonical_kind(kind) in ("tod", "mtod"):
        return 1.0
    return math.sqrt(float(num_nodes))


def compute_L(m_bound: float, a22) -> float:
    """Growth gain of the error dynamics: ``M * |A22|`` (spectral norm)."""
    if m_bound <= 0.0:
        raise ValueError("M must be positive")
    return m_bound * spectral_norm(a22)


def lmi_block(model: LinearNcsModel, p: SymMatrix, gamma: float, eps_lmi: float, m_bound: float) -> SymMatrix:
    """Assemble the certification block matrix for the given parameters."""
    if p.order != model.n_x:
        raise ValueError(f"P has order {p.order}, expected {model.n_x}")
    pm = p.entries
    top_left = (
        model.a11.T @ pm
        + pm @ model.a11
        + m_bound * m_bound * (model.a21.T @ model.a21)
        + eps_lmi * np.eye(model.n_x)
    )
    top_right = pm @ model.a12
    bottom_right = (eps_lmi - gamma * gamma) * np.eye(model.n_e)
    return SymMatrix(
        np.block([[top_left, top_right], [top_right.T, bottom_right]])
    )


def verify_lmi(
    model: LinearNcsModel,
    p: SymMatrix,
    gamma: float,
    eps_lmi: float = DEFAULT_EPS_LMI,
    m_bound: float = 1.0,
) -> bool:
    """True iff ``P`` is positive definite and the certification block matrix
    is negative semidefinite (largest eigenvalue <= 1e-9)."""
    p_eigs = sym_eigenvalues(p)
    if float(p_eigs[0]) <= 0.0:
        return False
    block = lmi_block(model, p, gamma, eps_lmi, m_bound)
    return float(sym_eigenvalues(block)[-1]) <= _LMI_EIG_TOL


def derive_eta(p: SymMatrix, eps_lmi: float) -> float:
    """Decay rate transferred from the LMI margin to the storage function:
    ``min(eps / lambda_max(P), eps)``, so that ``eps |x|^2`` dominates
    ``eta x'Px`` and ``eps |e|^2`` dominates ``eta W^2`` for any Lyapunov
    function with ``W >= |e|``."""
    eigs = sym_eigenvalues(p)
    if float(eigs[0]) <= 0.0:
        raise ValueError("P must be positive definite")
    return min(eps_lmi / float(eigs[-1]), eps_lmi)


@dataclass(frozen=True)
class Certificate:
    """A verified gain certificate for one model.

    Carries the storage matrix ``P``, the ISS gain ``gamma``, the error
    growth gain ``L``, the decay rate ``eta``, the LMI margin ``eps_lmi``,
    the gradient bound ``M``, and the hash of the model it certifies.
    """

    p: SymMatrix
    gamma: float
    L: float
    eta: float
    eps_lmi: float
    m_bound: float
    model_hash: str

    def check(self, model: LinearNcsModel) -> None:
        """Re-verify this certificate against a model; raises on mismatch."""
        if model.content_hash() != self.model_hash:
            raise CertificationError(
                "certificate was issued for a different model "
                f"(hash {self.model_hash} != {model.content_hash()})"
            )
        if self.gamma * self.gamma <= self.eta:
            raise CertificationError("certificate violates gamma^2 > eta")
        if not verify_lmi(model, self.p, self.gamma, self.eps_lmi, self.m_bound):
            raise CertificationError("certificate fails LMI verification")

    def to_dict(self) -> dict:
        return {
            "p": {
                "rows": self.p.order,
                "cols": self.p.order,
                "data": [float(v) for v in self.p.entries.flatten()],
            },
            "gamma": self.gamma,
            "L": self.L,
            "eta": self.eta,
            "eps_lmi": self.eps_lmi,
            "m_bound": self.m_bound,
            "model_hash": self.model_hash,
        }

    @staticmethod
    def from_dict(d: dict) -> "Certificate":
        rows = int(d["p"]["rows"])
        p = SymMatrix(np.array(d["p"]["data"], dtype=float).reshape(rows, rows))
        return Certificate(
            p=p,
            gamma=float(d["gamma"]),
            L=float(d["L"]),
            eta=float(d["eta"]),
            eps_lmi=float(d["eps_lmi"]),
            m_bound=float(d["m_bound"]),
            model_hash=str(d["model_hash"]),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def load(path) -> "Certificate":
        with open(path) as fh:
            return Certificate.from_dict(json.load(fh))


def make_certificate(
    model: LinearNcsModel,
    p: SymMatrix,
    gamma: float,
    eps_lmi: float = DEFAULT_EPS_LMI,
    m_bound: float = 1.0,
    L: Optional[float] = None,
) -> Certificate:
    """Bundle and verify a certificate from its ingredients."""
    if not verify_lmi(model, p, gamma, eps_lmi, m_bound):
        raise CertificationError(
            f"LMI verification failed at gamma={gamma}, eps={eps_lmi}, M={m_bound}"
        )
    cert = Certificate(
        p=p,
        gamma=float(gamma),
        L=float(L if L is not None else compute_L(m_bound, model.a22)),
        eta=derive_eta(p, eps_lmi),
        eps_lmi=float(eps_lmi),
        m_bound=float(m_bound),
        model_hash=model.content_hash(),
    )
    cert.check(model)
    return cert


def bisect_gamma(
    model: LinearNcsModel,
    p_source: Callable[[float], Optional[SymMatrix]],
    gamma_range: Tuple[float, float],
    eps_lmi: float = DEFAULT_EPS_LMI,
    m_bound: float = 1.0,
    tol: float = 1e-3,
) -> Tuple[float, Certificate]:
    """Smallest gamma (within ``tol``) admitting a verified certificate.

    ``p_source`` maps a candidate gamma to a storage matrix (or ``None`` if
    it has none to offer).  Feasibility is monotone in gamma for a fixed
    ``P``, which makes plain bisection sound.
    """
    lo, hi = gamma_range
    if not lo < hi:
        raise ValueError("gamma_range must satisfy lo < hi")

    def feasible(g: float) -> Optional[SymMatrix]:
        p = p_source(g)
        if p is None:
            return None
        return p if verify_lmi(model, p, g, eps_lmi, m_bound) else None

    p_hi = feasible(hi)
    if p_hi is None:
        raise CertificationError(f"no certificate at the upper gamma {hi}")
    if feasible(lo) is not None:
        raise ValueError(f"gamma_range lower end {lo} is already feasible")

    best_gamma, best_p = hi, p_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        p_mid = feasible(mid)
        if p_mid is not None:
            hi, best_gamma, best_p = mid, mid, p_mid
        else:
            lo = mid
    cert = make_certificate(model, best_p, best_gamma, eps_lmi, m_bound)
    return best_gamma, cert
