"""Regenerate the bundled example scenarios in src/qsdkit/scenarios.

Run from the repository root: python3 scripts/make_scenarios.py
"""

import json
from pathlib import Path

import numpy as np

from qsdkit.ensembles import mirror_vectors, trine_vectors
from qsdkit.io import SCENARIO_SCHEMA, encode_matrix

OUT = Path(__file__).resolve().parents[1] / "src" / "qsdkit" / "scenarios"
S2 = 1 / np.sqrt(2)


def vec(v):
    return {"vector": encode_matrix(np.asarray(v, dtype=complex))}


def scenario(name, task, expect, ensemble=None, params=None, options=None):
    d = {"schema": SCENARIO_SCHEMA, "name": name, "task": task, "expect": expect}
    if ensemble is not None:
        d["ensemble"] = ensemble
    if params:
        d["params"] = params
    if options:
        d["options"] = options
    return d


ZERO_PLUS = {"priors": [0.5, 0.5], "states": [vec([1, 0]), vec([S2, S2])]}
TRINE = {"priors": [1 / 3] * 3, "states": [vec(v) for v in trine_vectors()]}
ISO_THETA = 1.0

SCENARIOS = [
    scenario("helstrom-0plus", "min-error", {"values": {"p_guess": 0.5 + np.sqrt(2) / 4}, "tol": 1e-9, "certified": True}, ZERO_PLUS),
    scenario("trine", "min-error", {"values": {"p_guess": 2 / 3}, "tol": 1e-9, "certified": True}, TRINE),
    scenario(
        "trine-bloch",
        "qubit-geometric",
        {"values": {"p_guess": 2 / 3, "active_set": [0, 1, 2]}, "tol": 1e-9, "certified": True},
        {"priors": [1 / 3] * 3, "states": [{"bloch": [np.cos(p), np.sin(p), 0.0]} for p in (2 * np.pi / 3, 0.0, -2 * np.pi / 3)]},
    ),
    scenario(
        "isosceles-narrow",
        "qubit-geometric",
        {"values": {"p_guess": (1 + np.sin(ISO_THETA)) / 3, "active_set": [0, 2]}, "tol": 1e-9, "certified": True},
        {
            "priors": [1 / 3] * 3,
            "states": [vec([np.cos((0.3 + s * ISO_THETA) / 2), np.sin((0.3 + s * ISO_THETA) / 2)]) for s in (1, 0, -1)],
        },
    ),
    scenario(
        "mirror-symmetric",
        "min-error",
        {"values": {"p_guess": 0.8}, "tol": 1e-7, "certified": True},
        {"priors": [0.4, 0.4, 0.2], "states": [vec(v) for v in mirror_vectors(np.pi / 4)]},
    ),
    scenario(
        "usd-0plus",
        "usd",
        {"values": {"inconclusive_rate": S2, "error_prob": 0.0}, "tol": 1e-8, "upper": {"max_cross_click": 1e-10}},
        ZERO_PLUS,
    ),
    scenario(
        "maxconf-trine",
        "max-confidence",
        {"values": {"confidences": [2 / 3] * 3, "inconclusive_element": [[1 - np.tan(0.5) ** 2, 0], [0, 0]]}, "tol": 1e-7},
        {"priors": [1 / 3] * 3, "states": [vec(v) for v in trine_vectors(0.5)]},
    ),
    scenario(
        "fixed-rate-0plus",
        "fixed-rate",
        {"values": {"errors": [0.5 - np.sqrt(2) / 4, 0.0224550697, 0.0]}, "tol": 1e-8},
        ZERO_PLUS,
        params={"rates": [0.0, 0.5, S2]},
    ),
    scenario("chernoff-0plus", "chernoff", {"values": {"xi": float(np.log(2))}, "tol": 1e-12}, ZERO_PLUS),
    scenario(
        "finite-n-0plus",
        "finite-n",
        {"values": {"fitted_exponent": float(np.log(2))}, "tol": 0.0, "rtol": 0.15},
        ZERO_PLUS,
        params={"n_max": 10},
    ),
    scenario(
        "q7-witness",
        "witness",
        {"values": {"bounds": [12.25, 16.33, 18.38, 19.60, 20.42, 21.0]}, "tol": 0.005},
        params={"N": 7},
    ),
    scenario("min-entropy-0plus", "min-entropy", {"values": {"H_min": 0.22853}, "tol": 1e-4}, ZERO_PLUS),
    scenario(
        "no-signaling-trine",
        "no-signaling",
        {"values": {"product": 1.0, "p": [0.5, 0.5, 0.5], "p_guess": 2 / 3}, "tol": 1e-9},
        TRINE,
    ),
    scenario(
        "exclusion-pbr",
        "exclusion",
        {"upper": {"value": 1e-6, "gap": 1e-6}},
        params={"pbr": {"overlap": S2, "n": 2}},
    ),
    scenario(
        "unitary-xz",
        "unitary",
        {"values": {"u": 2.0, "p_guess": 1.0, "perfect": True, "repetition_n": 1}, "tol": 1e-12},
        params={"U1": encode_matrix([[0, 1], [1, 0]]), "U2": encode_matrix([[1, 0], [0, -1]]), "ancilla": True},
    ),
    scenario(
        "unitary-phase",
        "unitary",
        {"values": {"u": 1.0, "perfect": False, "repetition_n": 3}, "tol": 1e-9},
        params={"U1": encode_matrix(np.eye(2)), "U2": encode_matrix(np.diag([1, np.exp(1j * np.pi / 3)])), "ancilla": True},
    ),
    scenario("mutual-info-trine", "mutual-info", {"values": {"chi": 1.0}, "tol": 1e-9, "upper": {"I": 1.0}}, TRINE),
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    names = []
    for s in SCENARIOS:
        path = OUT / f"{s['name']}.json"
        path.write_text(json.dumps(s, indent=2, sort_keys=True) + "\n")
        names.append(path.name)
    (OUT / "manifest.json").write_text(json.dumps({"scenarios": sorted(names)}, indent=2) + "\n")
    print(f"wrote {len(names)} scenarios to {OUT}")


if __name__ == "__main__":
    main()
