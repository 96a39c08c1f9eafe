"""
JSON encoding of states, subspaces, certificates and run documents.

Complex numbers are written as ``[re, im]`` pairs of finite doubles.  Vectors
use the row-major multi-index order of :mod:`entsub.hilbert`; a subspace
basis is a D x s matrix given row by row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .bounds import ThresholdReport
from .discrimination import Certificate, SimulationReport, StateSet, validate_certificate
from .errors import InvalidInput
from .hilbert import ProductState, SpaceSpec, StateVector, Subspace, span, tensor
from .search import CountResult, SearchResult

SCHEMA_VERSION = 1


def encode_complex(a) -> Any:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        z = complex(a)
        return [z.real, z.imag]
    return [encode_complex(x) for x in a]


def decode_complex(obj) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.shape[-1:] != (2,):
        raise InvalidInput("complex values must be [re, im] pairs")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("complex values must be finite")
    return a[..., 0] + 1j * a[..., 1]


def _space(obj) -> SpaceSpec:
    try:
        return SpaceSpec(tuple(int(d) for d in obj["dims"]))
    except (KeyError, TypeError) as e:
        raise InvalidInput(f"missing or malformed 'dims': {e}") from None


def state_to_dict(x: StateVector) -> dict:
    return {"dims": list(x.space.dims), "amps": encode_complex(x.amps)}


def state_from_dict(obj, space=None) -> StateVector:
    space = space or _space(obj)
    amps = decode_complex(obj["amps"] if isinstance(obj, dict) else obj)
    try:
        return StateVector(space, amps)
    except InvalidInput:
        return StateVector.from_amplitudes(space, amps)


def product_to_dict(p: ProductState) -> dict:
    return {"dims": list(p.space.dims),
            "factors": [encode_complex(f) for f in p.factors],
            "amps": encode_complex(p.amps)}


def product_from_dict(obj) -> ProductState:
    space = _space(obj)
    p = tensor([decode_complex(f) for f in obj["factors"]], space)
    if "amps" not in obj:
        return p
    # Keep the stored global vector so a round trip is bit-exact.
    amps = decode_complex(obj["amps"])
    if amps.shape != p.amps.shape or np.abs(amps - p.amps).max() > 1e-12:
        raise InvalidInput("product amplitudes do not match the Kronecker product of the factors")
    return ProductState(space, p.factors, StateVector(space, amps))


def subspace_to_dict(S: Subspace) -> dict:
    return {"dims": list(S.space.dims), "s": S.s, "basis": encode_complex(S.basis)}


def subspace_from_dict(obj) -> Subspace:
    space = _space(obj)
    B = decode_complex(obj["basis"])
    if B.ndim == 1:
        B = B[:, None]
    try:
        return Subspace(space, B)
    except InvalidInput:
        # Accept any spanning set; orthonormalize it.
        cols = [StateVector.from_amplitudes(space, B[:, k]) for k in range(B.shape[1])]
        return span(cols)


def states_to_dict(states) -> dict:
    states = list(states)
    return {"dims": list(states[0].space.dims), "states": [encode_complex(x.amps) for x in states]}


def states_from_dict(obj) -> list[StateVector]:
    space = _space(obj)
    return [state_from_dict(a, space) for a in obj["states"]]


def certificate_to_dict(cert: Certificate) -> dict:
    check = validate_certificate(cert)
    return {
        "dims": list(cert.space.dims),
        "copies": cert.copies,
        "base_dims": list(cert.base_dims) if cert.base_dims else list(cert.space.dims),
        "states": [encode_complex(x.amps) for x in cert.states],
        "products": [product_to_dict(p) for p in cert.products],
        "overlaps": encode_complex(cert.overlaps),
        "diag_floor": cert.diag_floor,
        "offdiag_tol": cert.offdiag_tol,
        "valid": cert.valid,
        "max_offdiag": check.max_offdiag,
        "min_diag": check.min_diag,
        "search_overlaps": list(cert.search_overlaps),
    }


def certificate_from_dict(obj) -> Certificate:
    space = _space(obj)
    states = tuple(state_from_dict(a, space) for a in obj["states"])
    products = tuple(product_from_dict(p) for p in obj["products"])
    if len(states) != len(products):
        raise InvalidInput("certificate needs one product state per state")
    P = np.column_stack([p.amps for p in products])
    Q = np.column_stack([x.amps for x in states])
    base = obj.get("base_dims")
    return Certificate(space, states, products, P.conj().T @ Q,
                       float(obj.get("diag_floor", 1e-6)), float(obj.get("offdiag_tol", 1e-8)),
                       int(obj.get("copies", 1)), tuple(base) if base else None,
                       tuple(obj.get("search_overlaps", ())))


def _state_payload(x):
    if x is None:
        return None
    if isinstance(x, ProductState):
        return product_to_dict(x)
    return state_to_dict(x)


def search_result_to_dict(r: SearchResult) -> dict:
    return {
        "verdict": r.verdict,
        "best_overlap": r.best_overlap,
        "best_state": _state_payload(r.best_state) if r.found else None,
        "best_candidate": _state_payload(r.best_state),
        "restarts_used": r.restarts_used,
        "sweeps_mean": r.sweeps_mean,
        "sweeps_max": r.sweeps_max,
        "heuristic_absence": r.heuristic_absence,
    }


def count_result_to_dict(c: CountResult) -> dict:
    return {
        "count": c.count,
        "saturated": c.saturated,
        "formula_expected": c.formula_expected,
        "formula_match": c.formula_match,
        "restarts_used": c.restarts_used,
        "representatives": [_state_payload(p) for p in c.representatives],
    }


def simulation_to_dict(rep: SimulationReport) -> dict:
    return {
        "trials": rep.trials,
        "tallies": [{"correct": int(a), "inconclusive": int(b), "misidentified": int(c)}
                    for a, b, c in rep.tallies],
        "misidentified": rep.misidentified,
        "empirical_success": rep.empirical_success,
        "predicted_success": rep.predicted_success,
        "sigma": rep.sigma,
        "interval_3sigma": list(rep.interval),
        "within_3sigma": rep.within_3sigma,
    }


def threshold_to_dict(rep: ThresholdReport) -> dict:
    return rep.to_dict()


@dataclass
class OutputDocument:
    command: str
    config: dict
    payload: Any
    timing: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {"schema_version": self.schema_version, "command": self.command,
                "config": self.config, "payload": self.payload, "timing": self.timing}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), allow_nan=False, **kw)

    @classmethod
    def from_json(cls, text: str) -> "OutputDocument":
        d = json.loads(text)
        return cls(d["command"], d["config"], d["payload"], d.get("timing", {}),
                   d.get("schema_version", SCHEMA_VERSION))


def load_json(path) -> Any:
    """Read a JSON file; a full output document is unwrapped to its payload."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"cannot read {path}: {e}") from None
    if isinstance(obj, dict) and "schema_version" in obj and "payload" in obj:
        return obj["payload"]
    return obj


def state_set_from_file(path) -> StateSet:
    return StateSet.of(states_from_dict(load_json(path)))
