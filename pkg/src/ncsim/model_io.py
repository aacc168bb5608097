"""Reading model files and building certificates from their gain sections.

A model file is JSON with the four closed-loop blocks (row-major, explicit
shapes), the node partition of the error vector, and optionally one gain
section per protocol family carrying the pinned gains and a storage matrix:

    {
      "name": "...",
      "partition": [1, 1],
      "a11": {"rows": 6, "cols": 6, "data": [ ... 36 floats ... ]},
      "a12": {...}, "a21": {...}, "a22": {...},
      "gains": {
        "tod": {"m_bound": 1.0, "gamma": 16.92, "L": 15.73,
                "eps_lmi": 0.001, "p": {"rows": 6, "cols": 6, "data": [...]}},
        "rr":  {...}
      }
    }

The packaged batch-reactor benchmark follows this schema.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Dict, Optional, Tuple

import numpy as np

from .certify import Certificate, CertificationError, LinearNcsModel, make_certificate
from .numerics import SymMatrix
from .protocols import NodePartition, canonical_kind

__all__ = [
    "ModelParseError",
    "load_model",
    "loads_model",
    "gain_family",
    "certificate_from_gains",
    "batch_reactor_path",
]


class ModelParseError(ValueError):
    """Raised for malformed model files; the message names the offending
    field."""


def _parse_matrix(obj, field: str) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ModelParseError(f"field '{field}' must be an object with rows/cols/data")
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelParseError(f"field '{field}' is missing rows/cols/data: {exc}") from None
    if not isinstance(data, list) or len(data) != rows * cols:
        got = len(data) if isinstance(data, list) else "non-list"
        raise ModelParseError(
            f"field '{field}' declares {rows}x{cols} but carries {got} entries"
        )
    try:
        return np.array([float(v) for v in data], dtype=float).reshape(rows, cols)
    except (TypeError, ValueError):
        raise ModelParseError(f"field '{field}' has non-numeric entries") from None


def loads_model(text: str, source: str = "<string>") -> Tuple[LinearNcsModel, Dict]:
    """Parse model JSON text; returns the model and its raw gain sections."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"{source}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ModelParseError(f"{source}: top level must be an object")

    try:
        partition = NodePartition(doc["partition"])
    except KeyError:
        raise ModelParseError(f"{source}: missing field 'partition'") from None
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"{source}: bad 'partition': {exc}") from None

    mats = {}
    for field in ("a11", "a12", "a21", "a22"):
        if field not in doc:
            raise ModelParseError(f"{source}: missing field '{field}'")
        mats[field] = _parse_matrix(doc[field], field)

    try:
        model = LinearNcsModel(
            mats["a11"], mats["a12"], mats["a21"], mats["a22"], partition
        )
    except ValueError as exc:
        raise ModelParseError(f"{source}: {exc}") from None

    gains = doc.get("gains", {})
    if not isinstance(gains, dict):
        raise ModelParseError(f"{source}: field 'gains' must be an object")
    return model, gains


def load_model(path) -> Tuple[LinearNcsModel, Dict]:
    """Load and validate a model file; see :func:`loads_model`."""
    with open(path) as fh:
        text = fh.read()
    return loads_model(text, source=str(path))


def gain_family(kind: str) -> str:
    """Gain-section key for a protocol kind: TOD variants share 'tod', RR
    variants share 'rr'."""
    return "tod" if canonical_kind(kind) in ("tod", "mtod") else "rr"


def certificate_from_gains(
    model: LinearNcsModel, gains: Dict, kind: str
) -> Certificate:
    """Build and verify a certificate from a model's gain section for the
    given protocol kind.  The shipped gamma/L values are used as-is; the
    storage matrix is re-verified against the model."""
    family = gain_family(kind)
    if family not in gains:
        raise CertificationError(
            f"model file carries no '{family}' gain section for protocol {kind!r}"
        )
    section = gains[family]
    try:
        p = SymMatrix(_parse_matrix(section["p"], f"gains.{family}.p"))
        gamma = float(section["gamma"])
        eps_lmi = float(section["eps_lmi"])
        m_bound = float(section["m_bound"])
        L = float(section["L"])
    except KeyError as exc:
        raise ModelParseError(f"gain section '{family}' is missing {exc}") from None
    return make_certificate(model, p, gamma, eps_lmi=eps_lmi, m_bound=m_bound, L=L)


def batch_reactor_path() -> str:
    """Filesystem path of the packaged batch-reactor benchmark model."""
    return str(resources.files("ncsim.data").joinpath("batch_reactor.json"))
