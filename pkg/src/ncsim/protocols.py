"""Scheduling protocols acting on the network-induced error vector.

A protocol decides, at each transmission counter value, which node's error
block gets updated and how.  Four variants are provided:

* ``tod``  -- try-once-discard: the node with the largest error norm is
  granted access and its block is zeroed.
* ``mtod`` -- deadband-modified TOD: the granted block is shrunk by the
  factor ``1 - min(|e_k|, 1)`` instead of zeroed, so small errors are
  updated only partially and less data is effectively transmitted.
* ``rr``   -- round robin: nodes are granted access cyclically.
* ``mrr``  -- modified RR: the cyclic schedule is slowed down by the factor
  ``floor(1 / min(|e|, 1))`` when the total error is small.

Each protocol carries a Lyapunov function ``W(counter, e)``, a contraction
function ``sigma`` with ``sigma(s) < s``, and class-Kinf sandwich bounds
``lower(|e|) <= W <= upper(|e|)`` used by the transmission scheduler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

__all__ = [
    "NodePartition",
    "Protocol",
    "ProtocolError",
    "PROTOCOL_KINDS",
    "sat",
    "node_norms",
    "tod_modified_jump",
    "tod_classic_jump",
    "rr_modified_jump",
    "rr_classic_jump",
    "rr_lyapunov",
    "tod_contraction",
    "rr_contraction",
    "sandwich_bounds",
]

PROTOCOL_KINDS = ("tod", "mtod", "rr", "mrr")

_KIND_ALIASES = {
    "classic-tod": "tod",
    "modified-tod": "mtod",
    "classic-rr": "rr",
    "modified-rr": "mrr",
}


class ProtocolError(RuntimeError):
    """Raised when a protocol computation cannot proceed (e.g. a scheduling
    sweep fails to terminate, which indicates an index-convention bug)."""


def sat(s: float) -> float:
    """Unit saturation ``min(s, 1)`` for s >= 0."""
    return s if s < 1.0 else 1.0


@dataclass(frozen=True)
class NodePartition:
    """Partition of the error vector into per-node blocks.

    ``node_dims`` lists the dimension of each node's block; the error vector
    is their concatenation.
    """

    node_dims: Tuple[int, ...]

    def __init__(self, node_dims):
        dims = tuple(int(d) for d in node_dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError("need at least one node, every block dimension >= 1")
        object.__setattr__(self, "node_dims", dims)

    @property
    def num_nodes(self) -> int:
        return len(self.node_dims)

    @property
    def total_dim(self) -> int:
        return sum(self.node_dims)

    def slices(self) -> List[slice]:
        out, start = [], 0
        for d in self.node_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def check(self, e: np.ndarray) -> np.ndarray:
        e = np.asarray(e, dtype=float)
        if e.shape != (self.total_dim,):
            raise ValueError(
                f"error vector has shape {e.shape}, expected ({self.total_dim},)"
            )
        return e


def node_norms(e: np.ndarray, partition: NodePartition) -> np.ndarray:
    """Euclidean norm of each node block of ``e``."""
    e = partition.check(e)
    return np.array([math.sqrt(float(np.dot(e[s], e[s]))) for s in partition.slices()])


# ---------------------------------------------------------------------------
# TOD family
# ---------------------------------------------------------------------------

def _tod_jump(e: np.ndarray, partition: NodePartition, modified: bool) -> np.ndarray:
    e = partition.check(e)
    norms = node_norms(e, partition)
    k = int(np.argmax(norms))  # argmax returns the smallest index on ties
    out = e.copy()
    blk = partition.slices()[k]
    psi = sat(float(norms[k])) if modified else 1.0
    if psi >= 1.0:
        out[blk] = 0.0
    else:
        out[blk] = (1.0 - psi) * out[blk]
    return out


def tod_modified_jump(e, partition: NodePartition) -> np.ndarray:
    """Deadband-modified TOD update: shrink the largest node's block by
    ``1 - min(|e_k|, 1)`` (full zeroing once that block's norm reaches 1)."""
    return _tod_jump(e, partition, modified=True)


def tod_classic_jump(e, partition: NodePartition) -> np.ndarray:
    """Classic TOD update: zero the largest node's block exactly."""
    return _tod_jump(e, partition, modified=False)


def tod_contraction(s: float, num_nodes: int) -> float:
    """One-step decay envelope of the modified-TOD error norm.

    ``s * sqrt(1 - s / num_nodes**1.5)`` up to ``s = sqrt(num_nodes)`` and
    the linear classic-TOD rate beyond.  Continuous at the branch point.
    """
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    ell = float(num_nodes)
    if s <= math.sqrt(ell):
        return s * math.sqrt(max(0.0, 1.0 - s * ell ** -1.5))
    return math.sqrt((ell - 1.0) / ell) * s


# ---------------------------------------------------------------------------
# RR family
# ---------------------------------------------------------------------------

def _rr_stride(e_norm: float, modified: bool) -> int:
    # counter stride between grants; the modified schedule slows down by
    # floor(1/sat(|e|)) when the total error is small
    if not modified:
        return 1
    return int(math.floor(1.0 / sat(e_norm)))


def _rr_selected_node(counter: int, stride: int, num_nodes: int) -> int:
    """0-based node granted access at ``counter``, or -1 for none.

    Grants happen at counter values ``stride * n`` for n = 1, 2, ...; the
    n-th grant goes to node ``(n - 1) mod num_nodes``.  Counter 0 never
    grants (grant indices start at 1).
    """
    if counter < stride or counter % stride != 0:
        return -1
    n = counter // stride
    return (n - 1) % num_nodes


def _rr_jump(counter: int, e: np.ndarray, partition: NodePartition, modified: bool) -> np.ndarray:
    if counter < 0:
        raise ValueError("counter must be nonnegative")
    e = partition.check(e)
    e_norm = float(np.linalg.norm(e))
    if e_norm == 0.0:
        return e.copy()
    stride = _rr_stride(e_norm, modified)
    k = _rr_selected_node(counter, stride, partition.num_nodes)
    out = e.copy()
    if k >= 0:
        out[partition.slices()[k]] = 0.0
    return out


def rr_modified_jump(counter: int, e, partition: NodePartition) -> np.ndarray:
    """Modified-RR update: cyclic grants at counter multiples of
    ``floor(1/min(|e|,1))``; the granted block is zeroed, all others kept."""
    return _rr_jump(counter, e, partition, modified=True)


def rr_classic_jump(counter: int, e, partition: NodePartition) -> np.ndarray:
    """Classic RR update: node ``((counter-1) mod num_nodes)`` is granted at
    every counter >= 1 and its block zeroed."""
    return _rr_jump(counter, e, partition, modified=False)


def _rr_sweep(counter: int, e, partition: NodePartition, modified: bool) -> Tuple[float, Tuple]:
    """Shared sweep behind the RR Lyapunov energy.

    Returns ``(energy, schedule)`` where ``schedule`` is the tuple of
    ``(wait, node)`` grant events of the induced discrete system.  Within a
    fixed schedule the energy is a continuous function of ``e``; schedule
    changes are where it jumps.
    """
    if counter < 0:
        raise ValueError("counter must be nonnegative")
    cur = partition.check(e).copy()
    ell = partition.num_nodes
    total = 0.0
    i = counter
    schedule = []
    # each grant either zeroes a nonzero block or hits an already-zero one;
    # a full cycle of num_nodes grants always reaches every block, so the
    # sweep must finish well within this allowance
    cap = 4 * ell * (ell + 2)
    while True:
        norm2 = float(np.dot(cur, cur))
        if norm2 == 0.0:
            break
        stride = _rr_stride(math.sqrt(norm2), modified)
        # next grant at the smallest multiple of stride that is >= max(i, stride)
        nxt = stride * max(-(-i // stride), 1)
        total += (nxt - i + 1) * norm2
        k = _rr_selected_node(nxt, stride, ell)
        cur[partition.slices()[k]] = 0.0
        schedule.append((nxt - i, k))
        i = nxt + 1
        if len(schedule) > cap:
            raise ProtocolError(
                "round-robin energy sweep did not terminate; "
                "this indicates an index-convention bug"
            )
    return math.sqrt(total), tuple(schedule)


def rr_lyapunov(counter: int, e, partition: NodePartition, modified: bool = True) -> float:
    """Lyapunov energy of the RR-scheduled error: the root of the summed
    squared norms of the error iterates from ``counter`` onward.

    The induced discrete system holds ``e`` constant between its own grants
    and zeroes one block per grant, so the sum is finite: once every node
    has been granted, the iterate is exactly zero.  Runs of constant error
    between grants are accounted in closed form rather than stepped through.

    Grant indexing is 1-based, so the sandwich bounds of
    :func:`sandwich_bounds` are guaranteed from counter 1 onward; counter 0
    sits one dead slot before the first grant and its energy can exceed the
    upper bound.  Simulations start RR counters at 1.
    """
    return _rr_sweep(counter, e, partition, modified)[0]


def rr_contraction(s: float, num_nodes: int) -> float:
    """One-step decay envelope of the modified-RR Lyapunov energy.

    ``s * sqrt(1 - s^2 / (4 num_nodes^4))`` below ``2 * num_nodes**1.5`` and
    the linear classic rate beyond.  Continuous at the branch point.
    """
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    ell = float(num_nodes)
    if s < 2.0 * math.sqrt(ell ** 3):
        return s * math.sqrt(max(0.0, 1.0 - s * s / (4.0 * ell ** 4)))
    return math.sqrt((ell - 1.0) / ell) * s


# ---------------------------------------------------------------------------
# Sandwich bounds and the protocol value object
# ---------------------------------------------------------------------------

def sandwich_bounds(kind: str, num_nodes: int):
    """Class-Kinf bounds ``(lower, upper)`` with lower(|e|) <= W <= upper(|e|).

    TOD-family Lyapunov functions equal the error norm, so both bounds are
    the identity.  The RR energy is sandwiched between the error norm and
    ``max(num_nodes * sqrt(2 s), sqrt(num_nodes) * s)`` (modified schedule)
    or ``sqrt(num_nodes) * s`` (classic schedule).
    """
    kind = canonical_kind(kind)
    ell = float(num_nodes)
    ident = lambda s: float(s)
    if kind in ("tod", "mtod"):
        return ident, ident
    if kind == "mrr":
        return ident, lambda s: max(ell * math.sqrt(2.0 * s), math.sqrt(ell) * s)
    return ident, lambda s: math.sqrt(ell) * s


def canonical_kind(kind: str) -> str:
    k = kind.strip().lower()
    k = _KIND_ALIASES.get(k, k)
    if k not in PROTOCOL_KINDS:
        raise ValueError(f"unknown protocol kind {kind!r}; expected one of {PROTOCOL_KINDS}")
    return k


@dataclass(frozen=True)
class Protocol:
    """A scheduling protocol: jump map, Lyapunov function, contraction and
    sandwich bounds, all tied to one node partition.

    The TOD-family Lyapunov function does not depend on the counter; the
    counter argument is still threaded through for interface uniformity
    with the RR family.
    """

    kind: str
    partition: NodePartition

    def __init__(self, kind: str, partition: NodePartition):
        object.__setattr__(self, "kind", canonical_kind(kind))
        object.__setattr__(self, "partition", partition)

    @property
    def num_nodes(self) -> int:
        return self.partition.num_nodes

    @property
    def is_rr_family(self) -> bool:
        return self.kind in ("rr", "mrr")

    def jump(self, counter: int, e) -> np.ndarray:
        if self.kind == "mtod":
            return tod_modified_jump(e, self.partition)
        if self.kind == "tod":
            return tod_classic_jump(e, self.partition)
        if self.kind == "mrr":
            return rr_modified_jump(counter, e, self.partition)
        return rr_classic_jump(counter, e, self.partition)

    def lyapunov(self, counter: int, e) -> float:
        if self.is_rr_family:
            return rr_lyapunov(counter, e, self.partition, modified=(self.kind == "mrr"))
        return float(np.linalg.norm(self.partition.check(e)))

    def lyapunov_regime(self, counter: int, e):
        """Hashable label of the branch the Lyapunov function currently sits
        on.  The TOD-family value is globally continuous (single branch);
        the RR energy jumps whenever its induced grant schedule changes, so
        the schedule itself is the label."""
        if self.is_rr_family:
            return _rr_sweep(counter, e, self.partition, modified=(self.kind == "mrr"))[1]
        return None

    def sigma(self, s: float) -> float:
        if self.kind == "mtod":
            return tod_contraction(s, self.num_nodes)
        if self.kind == "mrr":
            return rr_contraction(s, self.num_nodes)
        # classic protocols contract linearly
        ell = float(self.num_nodes)
        return math.sqrt((ell - 1.0) / ell) * s

    def bounds(self) -> Tuple[Callable[[float], float], Callable[[float], float]]:
        return sandwich_bounds(self.kind, self.num_nodes)
