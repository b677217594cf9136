"""Bipartite structure of pure states.

A state of C^d is identified with C^{d1} (x) C^{d2} through the row-major
reshape: amplitude index ``s * d2 + t`` holds the coefficient of |s>|t>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import as_vector, svd_small

PRODUCT_TOL = 1e-8
NORM_TOL = 1e-12


@dataclass(frozen=True)
class Bipartition:
    d1: int
    d2: int

    def __post_init__(self):
        if self.d1 < 2 or self.d2 < 2:
            raise ValueError(f"both factors must be >= 2, got {self.d1}x{self.d2}")

    @property
    def d(self) -> int:
        return self.d1 * self.d2

    @classmethod
    def parse(cls, text: str) -> "Bipartition":
        """Parse ``"D1xD2"`` (lowercase x)."""
        parts = text.split("x")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ValueError(f"bipartition must look like 2x3, got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def __str__(self) -> str:
        return f"{self.d1}x{self.d2}"


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns live in C^{d1}
    right_vectors: np.ndarray  # columns live in C^{d2}

    def reconstruct(self) -> np.ndarray:
        return np.einsum(
            "k,ik,jk->ij", self.coefficients, self.left_vectors, self.right_vectors
        ).reshape(-1)


@dataclass(frozen=True)
class StateSet:
    """Normalized pure states sharing a common dimension.

    States are normalized at construction; zero vectors are rejected.
    """

    states: tuple
    labels: tuple = field(default=())

    def __init__(self, states: Sequence, labels: Sequence[str] | None = None):
        vecs = [as_vector(s) for s in states]
        if not vecs:
            raise ValueError("a state set needs at least one state")
        d = vecs[0].shape[0]
        normed = []
        for i, v in enumerate(vecs):
            if v.shape[0] != d:
                raise ValueError(f"state {i} has dimension {v.shape[0]}, expected {d}")
            nrm = np.linalg.norm(v)
            if nrm == 0:
                raise ValueError(f"state {i} is the zero vector")
            v = v / nrm
            v.flags.writeable = False
            normed.append(v)
        if labels is None:
            labels = [f"psi{i + 1}" for i in range(len(normed))]
        if len(labels) != len(normed):
            raise ValueError("labels and states differ in length")
        object.__setattr__(self, "states", tuple(normed))
        object.__setattr__(self, "labels", tuple(str(x) for x in labels))

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def matrix(self) -> np.ndarray:
        """States as the columns of a d x N matrix."""
        return np.column_stack(self.states)

    def transformed(self, u: np.ndarray) -> "StateSet":
        return StateSet([u @ s for s in self.states], self.labels)


def _check_dim(state: np.ndarray, bip: Bipartition) -> None:
    if state.shape[0] != bip.d:
        raise ValueError(f"state of dimension {state.shape[0]} does not split as {bip}")


def reshape(state, bip: Bipartition) -> np.ndarray:
    """Amplitude matrix: entry (s, t) is the coefficient of |s>|t>."""
    state = as_vector(state)
    _check_dim(state, bip)
    return state.reshape(bip.d1, bip.d2)


def schmidt(state, bip: Bipartition) -> SchmidtDecomposition:
    left, s, right = svd_small(reshape(state, bip))
    return SchmidtDecomposition(s, left, right.conj())


def product_defect(state, bip: Bipartition) -> float:
    """1 - (largest Schmidt coefficient)^2 of the normalized state.

    Zero exactly on product states, at most 1 - 1/min(d1, d2).
    """
    m = reshape(state, bip)
    s = np.linalg.svd(m, compute_uv=False)
    total = float(np.sum(s * s))
    # Sum of the smaller squared coefficients: avoids cancellation in 1 - s1^2.
    return float(np.sum(s[1:] ** 2)) / total


def is_product(state, bip: Bipartition, tol: float = PRODUCT_TOL) -> bool:
    return product_defect(state, bip) < tol


def numeric_rank(states: Sequence, tol: float = 1e-9) -> int:
    """Count singular values of the stacked states above ``tol * s_max``."""
    if len(states) == 0:
        raise ValueError("numeric_rank of an empty list")
    vecs = [as_vector(s) for s in states]
    if len({v.shape[0] for v in vecs}) != 1:
        raise ValueError("states have mixed dimensions")
    s = np.linalg.svd(np.column_stack(vecs), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class Prop1Entry:
    index: int
    dim: int
    passed: bool


@dataclass(frozen=True)
class Prop1Verdict:
    bipartition: Bipartition
    threshold: int
    entries: tuple

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failing(self) -> list[int]:
        return [e.index for e in self.entries if not e.passed]


def prop1_check(states: StateSet, bip: Bipartition, tol: float = 1e-9) -> Prop1Verdict:
    """Leave-one-out dimension test for absolute entanglement.

    An absolutely entangled set needs ``dim span(S minus psi_i) >= d2 + 1``
    for every i.  A failing index admits an explicit product-mapping
    unitary (see :func:`aeset.constructions.prop1_witness_unitary`).
    """
    if len(states) < 2:
        raise ValueError("the leave-one-out check needs at least two states")
    _check_dim(states.states[0], bip)
    entries = []
    for i in range(len(states)):
        rest = [s for j, s in enumerate(states.states) if j != i]
        r = numeric_rank(rest, tol)
        entries.append(Prop1Entry(i, r, r >= bip.d2 + 1))
    return Prop1Verdict(bip, bip.d2 + 1, tuple(entries))
