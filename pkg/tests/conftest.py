import numpy as np
import pytest

from aeset.constructions import PartitionedSet
from aeset.entanglement import Bipartition, StateSet
from aeset.linalg import haar_unitary

BIPARTITIONS = [Bipartition(2, 2), Bipartition(2, 3), Bipartition(2, 4), Bipartition(3, 3)]

_ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}".rstrip())


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_state(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_partitioned_set(rng, bip=None):
    """Orthogonal parts, each spanning at most d2 dimensions, k <= d1 parts."""
    if bip is None:
        bip = BIPARTITIONS[rng.integers(len(BIPARTITIONS))]
    frame = haar_unitary(bip.d, rng)
    k = int(rng.integers(1, bip.d1 + 1))
    parts = []
    start = 0
    for _ in range(k):
        n_i = int(rng.integers(1, bip.d2 + 1))
        cols = frame[:, start:start + n_i]
        start += n_i
        count = n_i + int(rng.integers(0, 3))
        coeffs = rng.standard_normal((n_i, count)) + 1j * rng.standard_normal((n_i, count))
        parts.append(StateSet(list((cols @ coeffs).T)))
    return PartitionedSet(parts, bip)


def random_prop1_set(rng, bip, case):
    """States whose leave-one-out span at index i has dimension <= d2.

    ``case`` is "i" (psi_i orthogonal to the span) or "ii" (psi_i with a
    component inside it).  Returns ``(StateSet, i)``.
    """
    frame = haar_unitary(bip.d, rng)
    r = int(rng.integers(1, bip.d2 + 1))
    span = frame[:, :r]
    count = r + int(rng.integers(0, 3))
    coeffs = rng.standard_normal((r, count)) + 1j * rng.standard_normal((r, count))
    rest = list((span @ coeffs).T)
    outside = frame[:, r:] @ (rng.standard_normal(bip.d - r) + 1j * rng.standard_normal(bip.d - r))
    if case == "i":
        psi = outside
    else:
        psi = outside + span @ (rng.standard_normal(r) + 1j * rng.standard_normal(r))
    i = int(rng.integers(0, len(rest) + 1))
    rest.insert(i, psi)
    return StateSet(rest), i
