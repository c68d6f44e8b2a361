"""JSON scenario files and report serialization.

Complex numbers are written as [re, im] pairs and matrices as row-major nested
lists of such pairs. Scenario files carry a versioned ``schema`` field.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, QSDError, ValidationError
from .operators import Ensemble, density_from_bloch, projector

log = logging.getLogger(__name__)

SCENARIO_SCHEMA = "qsdkit.scenario/1"
REPORT_SCHEMA = "qsdkit.report/1"
TASKS = (
    "min-error",
    "qubit-geometric",
    "usd",
    "max-confidence",
    "fixed-rate",
    "chernoff",
    "finite-n",
    "witness",
    "min-entropy",
    "no-signaling",
    "exclusion",
    "unitary",
    "mutual-info",
)
# tasks that cannot run without an ensemble block
NEEDS_ENSEMBLE = {"min-error", "qubit-geometric", "usd", "max-confidence", "fixed-rate", "finite-n", "min-entropy", "no-signaling", "mutual-info"}


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [encode_complex(z) for z in a]
    return [encode_matrix(row) for row in a]


def decode_matrix(data, where: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: expected nested [re, im] pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ParseError(f"{where}: complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def to_jsonable(x):
    """Convert numpy scalars/arrays (complex included) to plain JSON types."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            if np.allclose(x.imag, 0, atol=0):
                return to_jsonable(x.real)
            return encode_matrix(x)
        return [to_jsonable(v) for v in x.tolist()] if x.ndim else to_jsonable(x.item())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return encode_complex(x) if x.imag != 0 else float(x.real)
    return x


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _state(entry, where: str) -> np.ndarray:
    if not isinstance(entry, dict) or len(entry) != 1:
        raise ParseError(f"{where}: a state is one of {{'matrix'}}, {{'vector'}} or {{'bloch'}}")
    (kind, data), = entry.items()
    if kind == "matrix":
        return decode_matrix(data, where)
    if kind == "vector":
        v = decode_matrix(data, where)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError(f"{where}: zero vector")
        if abs(n - 1) > 1e-6:
            log.warning("%s: amplitude vector has norm %.6g; normalising", where, n)
        return projector(v / n)
    if kind == "bloch":
        try:
            return density_from_bloch(np.asarray(data, dtype=float))
        except QSDError as exc:
            raise ValidationError(f"{where}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: Bloch vector must be three reals") from exc
    raise ParseError(f"{where}: unknown state kind '{kind}'")


def parse_ensemble(block, where: str = "ensemble") -> Ensemble:
    if not isinstance(block, dict) or "states" not in block:
        raise ParseError(f"{where}: needs 'states' (and optionally 'priors')")
    states = [_state(s, f"{where}.states[{i}]") for i, s in enumerate(block["states"])]
    priors = block.get("priors", [1.0 / len(states)] * len(states))
    try:
        return Ensemble(np.asarray(priors, dtype=float), states)
    except QSDError as exc:
        raise ValidationError(f"{where}: {type(exc).__name__}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class Scenario:
    name: str
    task: str
    ensemble: Ensemble | None
    params: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict, repr=False)
    path: str = ""


def scenario_from_dict(data: dict, name: str = "scenario", path: str = "") -> Scenario:
    if not isinstance(data, dict):
        raise ParseError(f"{path or name}: top level must be an object")
    schema = data.get("schema")
    if schema != SCENARIO_SCHEMA:
        raise ParseError(f"{path or name}: field 'schema' must be '{SCENARIO_SCHEMA}', got {schema!r}")
    task = data.get("task")
    if task not in TASKS:
        raise ParseError(f"{path or name}: field 'task' must be one of {', '.join(TASKS)}")
    ens = parse_ensemble(data["ensemble"]) if "ensemble" in data else None
    if ens is None and task in NEEDS_ENSEMBLE:
        raise ValidationError(f"{path or name}: task '{task}' requires an 'ensemble' block")
    for key in ("params", "options", "expect"):
        if not isinstance(data.get(key, {}), dict):
            raise ParseError(f"{path or name}: field '{key}' must be an object")
    return Scenario(
        name=str(data.get("name", name)),
        task=task,
        ensemble=ens,
        params=dict(data.get("params", {})),
        options=dict(data.get("options", {})),
        expect=dict(data.get("expect", {})),
        source=data,
        path=path,
    )


def parse_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{p}: cannot read ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data, name=p.stem, path=str(p))


def finite_or_str(x: float):
    """JSON has no infinities; encode them as strings."""
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")
