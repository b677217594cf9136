"""JSON readers and writers shared by the command line.

Complex numbers are ``[re, im]`` pairs of doubles; polynomials are exact
(decimal strings, see :meth:`aeset.polynomials.SparsePoly.to_json`).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .constructions import PartitionedSet
from .entanglement import Bipartition, StateSet


def complex_list(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def parse_complex_list(pairs) -> np.ndarray:
    out = []
    for item in pairs:
        if isinstance(item, (list, tuple)) and len(item) == 2:
            out.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, (int, float)):
            out.append(complex(item))
        else:
            raise ValueError(f"cannot read {item!r} as a complex number")
    return np.array(out, dtype=complex)


def matrix_json(m) -> list[list[list[float]]]:
    return [complex_list(row) for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([parse_complex_list(r) for r in rows], dtype=complex)


def stateset_to_json(states: StateSet, parts: list[list[int]] | None = None) -> dict:
    out = {
        "dim": states.dim,
        "states": [complex_list(s) for s in states.states],
        "labels": list(states.labels),
    }
    if parts is not None:
        out["parts"] = parts
    return out


def stateset_from_json(data: dict) -> StateSet:
    if "states" not in data:
        raise ValueError("state JSON needs a 'states' array")
    states = [parse_complex_list(s) for s in data["states"]]
    dim = data.get("dim")
    if dim is not None and any(len(s) != dim for s in states):
        raise ValueError(f"state length disagrees with dim = {dim}")
    return StateSet(states, data.get("labels"))


def partitioned_from_json(data: dict, bip: Bipartition) -> PartitionedSet:
    """Build a :class:`PartitionedSet` from state JSON carrying ``"parts"``.

    ``parts`` lists, for each part, the indices of its states.  Without it
    every state forms its own part.
    """
    states = stateset_from_json(data)
    parts = data.get("parts")
    if parts is None:
        parts = [[i] for i in range(len(states))]
    seen = sorted(i for part in parts for i in part)
    if seen != list(range(len(states))):
        raise ValueError("'parts' must partition the state indices")
    return PartitionedSet(
        [StateSet([states.states[i] for i in part], [states.labels[i] for i in part]) for part in parts],
        bip,
    )


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
