import numpy as np
import pytest

from aeset.feng import (
    FengBasis, FengBlock, FengStructureError, feng_decompose, feng_generate, feng_validate,
)
from aeset.linalg import haar_unitary


def computational_block(n=2):
    return FengBasis([FengBlock([1, 0], np.eye(n), np.eye(n))])


def random_partition(n, rng):
    parts = []
    left = n
    while left:
        k = int(rng.integers(1, left + 1))
        parts.append(k)
        left -= k
    return parts


def test_generate_counts():
    fb = feng_generate(2, [2], seed=1)
    assert len(fb.flatten()) == 4
    fb = feng_generate(3, [1, 2], seed=1)
    assert len(fb.blocks) == 2 and len(fb.flatten()) == 6
    with pytest.raises(ValueError):
        feng_generate(3, [1, 1], seed=1)


def test_generate_validates():
    rng = np.random.default_rng(0)
    for seed in range(20):
        n = int(rng.integers(2, 6))
        fb = feng_generate(n, random_partition(n, rng), seed)
        v = feng_validate(fb, 1e-10)
        assert v.passed, v.messages
        m = np.column_stack(fb.flatten())
        np.testing.assert_allclose(m.conj().T @ m, np.eye(2 * n), atol=1e-10)


def test_validate_computational_block():
    assert feng_validate(computational_block()).passed


def test_validate_flags_condition_2():
    fb = computational_block()
    fb.blocks[0].Aprime = np.array([[1, 1], [0, 1]], dtype=complex) / np.sqrt([1, 2])
    v = feng_validate(fb)
    assert not v.conditions["2"]
    assert v.conditions["1"]


def test_validate_flags_condition_4():
    a = np.array([1, 0], dtype=complex)
    b = np.array([1, 1], dtype=complex) / np.sqrt(2)
    e1 = np.array([[1], [0]], dtype=complex)
    fb = FengBasis([FengBlock(a, e1, e1), FengBlock(b, e1, e1)])
    v = feng_validate(fb)
    assert not v.conditions["4"]
    assert any("overlap" in m for m in v.messages)


def test_validate_flags_condition_3():
    fb = computational_block(3)
    blk = fb.blocks[0]
    # Equal sizes, different spans.
    fb = FengBasis([
        FengBlock(blk.a, np.eye(3)[:, :2], np.eye(3)[:, 1:]),
        FengBlock(np.array([1, 1]) / np.sqrt(2), np.eye(3)[:, 2:], np.eye(3)[:, 2:]),
    ])
    assert not feng_validate(fb).conditions["3"]


def test_decompose_roundtrip_22():
    fb = feng_generate(4, [2, 2], seed=7)
    out = feng_decompose(fb.flatten())
    assert sorted(out.partition) == [2, 2]
    assert feng_validate(out, 1e-10).passed


def test_decompose_computational_basis():
    out = feng_decompose(list(np.eye(6)))
    assert out.partition == [3]


def test_decompose_rejects_bell_basis():
    bell = np.array([[1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0]]) / np.sqrt(2)
    with pytest.raises(FengStructureError, match="not all product"):
        feng_decompose(list(bell))


def test_decompose_rejects_non_orthonormal():
    states = list(np.eye(4))
    states[1] = states[0]
    with pytest.raises(FengStructureError, match="orthonormal"):
        feng_decompose(states)


def test_decompose_block_order():
    fb = feng_generate(5, [1, 3, 1], seed=3)
    out = feng_decompose(fb.flatten())
    assert out.partition == [3, 1, 1]


def test_decompose_local_unitary_covariance():
    rng = np.random.default_rng(5)
    for seed in range(20):
        n = int(rng.integers(2, 6))
        part = random_partition(n, rng)
        fb = feng_generate(n, part, seed)
        local = np.kron(haar_unitary(2, rng), haar_unitary(n, rng))
        out = feng_decompose([local @ s for s in fb.flatten()])
        assert sorted(out.partition) == sorted(part)


def test_decompose_shuffled_input():
    rng = np.random.default_rng(6)
    fb = feng_generate(4, [2, 1, 1], seed=2)
    states = fb.flatten()
    order = rng.permutation(len(states))
    out = feng_decompose([states[i] for i in order])
    assert sorted(out.partition) == [1, 1, 2]


def test_json_roundtrip():
    fb = feng_generate(3, [2, 1], seed=4)
    back = FengBasis.from_json(fb.to_json())
    for s, t in zip(fb.flatten(), back.flatten()):
        np.testing.assert_array_equal(s, t)
