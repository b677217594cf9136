import warnings

import numpy as np
import pytest

from aeset.constructions import (
    PartitionedSet, PremiseError, example1_set, prop1_witness_unitary, prop2_embed_unitary,
    theorem1_premise, theorem1_set, theorem2_set, witness_case,
)
from aeset.entanglement import Bipartition, StateSet, numeric_rank, prop1_check, product_defect
from aeset.linalg import haar_unitary, is_unitary

from conftest import BIPARTITIONS, random_partitioned_set, random_prop1_set

B22 = Bipartition(2, 2)


def ket(k, d=4):
    e = np.zeros(d, dtype=complex)
    e[k] = 1
    return e


def test_premise_values():
    holds, lam = theorem1_premise([0.8] * 3, [0.6] * 3)
    assert holds and lam == pytest.approx(0.18 / 0.64, abs=1e-15)
    assert lam == pytest.approx(0.28125)
    holds, lam = theorem1_premise([2 ** -0.5] * 3, [2 ** -0.5] * 3)
    assert holds and lam == pytest.approx(0.5)
    holds, lam = theorem1_premise([3 ** -0.5], [(2 / 3) ** 0.5])
    assert not holds and lam == pytest.approx(1.0)
    with pytest.raises(PremiseError):
        theorem1_premise([0.0, 1.0], [1.0, 1.0])


def test_theorem1_overlaps():
    s = theorem1_set(4, 0.8, 0.6)
    assert len(s) == 4
    for i in range(1, 4):
        assert np.vdot(s.states[0], s.states[i]) == pytest.approx(0.8)


def test_theorem1_pairwise_overlaps_random_params():
    rng = np.random.default_rng(0)
    for d in (4, 6, 8, 9):
        b = rng.uniform(0.2, 0.6, d - 1) * np.exp(1j * rng.uniform(0, 6.3, d - 1))
        a = np.sqrt(1 - np.abs(b) ** 2) * np.exp(1j * rng.uniform(0, 6.3, d - 1))
        basis = haar_unitary(d, int(rng.integers(1 << 30)))
        s = theorem1_set(d, a, b, basis)
        assert len(s) == d
        for i in range(1, d):
            for j in range(1, d):
                if i != j:
                    assert abs(np.vdot(s.states[i], s.states[j]) - np.conj(a[i - 1]) * a[j - 1]) < 1e-12


def test_theorem1_passes_prop1_for_every_factorization():
    rng = np.random.default_rng(1)
    for d, splits in ((4, [(2, 2)]), (6, [(2, 3), (3, 2)]), (8, [(2, 4), (4, 2)]), (9, [(3, 3)])):
        s = theorem1_set(d, 0.8, 0.6, haar_unitary(d, int(rng.integers(1 << 30))))
        for d1, d2 in splits:
            v = prop1_check(s, Bipartition(d1, d2))
            assert v.passed
            assert all(e.dim >= d - 1 for e in v.entries)


def test_theorem1_errors():
    with pytest.raises(ValueError):
        theorem1_set(5, 0.8, 0.6)
    with pytest.raises(PremiseError):
        theorem1_set(4, 3 ** -0.5, (2 / 3) ** 0.5)
    with pytest.raises(PremiseError):
        theorem1_set(4, 0.8, 0.0)


def test_example1_amplitudes_and_norms():
    s = example1_set(0.5)
    assert len(s) == 5
    raw = np.array([0.25, 0.0625, 2.0 ** -8, 2.0 ** -16])
    np.testing.assert_allclose(s.states[3], raw / np.linalg.norm(raw), rtol=1e-14)
    for v in s.states:
        assert abs(np.linalg.norm(v) - 1) < 1e-12
    for i in range(3):
        for j in range(3):
            if i != j:
                assert np.vdot(s.states[i], s.states[j]) == 0


def test_example1_rejects_and_warns():
    with pytest.raises(ValueError):
        example1_set(1.0)
    with pytest.warns(UserWarning):
        example1_set(0.8241267479897942)


def test_theorem2_shapes():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s = theorem2_set(2, 7, 0.9)
    assert len(s) == 5 and s.dim == 4
    exps = [7, 49, 343, 2401]
    raw = np.array([0.9 ** e for e in exps])
    np.testing.assert_allclose(s.states[3], raw / np.linalg.norm(raw), rtol=1e-12)
    s = theorem2_set(3, 8, 0.5)
    assert len(s) == 7 and s.dim == 6
    m = s.matrix()[:, :5]
    np.testing.assert_allclose(m.conj().T @ m, np.eye(5))


def test_theorem2_p7_warns_and_small_p_rejected():
    with pytest.warns(UserWarning):
        theorem2_set(2, 7, 0.9)
    with pytest.raises(ValueError):
        theorem2_set(2, 6, 0.9)
    with pytest.raises(ValueError):
        theorem2_set(2, 8, 1.5)


def test_power_sum_amplitudes_decrease():
    for s in (example1_set(0.7), theorem2_set(3, 8, 0.99)):
        amps = np.abs(s.states[-2])
        nz = amps[amps > 0]
        assert np.all(np.diff(nz) < 0)


def test_prop2_already_product():
    pset = PartitionedSet([[ket(0), ket(1)], [ket(2)]], B22)
    u = prop2_embed_unitary(pset)
    assert is_unitary(u)
    for psi in pset.all_states():
        assert product_defect(u @ psi, B22) < 1e-10


def test_prop2_recovers_rotated_set():
    pset = PartitionedSet([[ket(0), ket(1)], [ket(2)]], B22)
    g = haar_unitary(4, 9)
    rotated = PartitionedSet([[g @ s for s in p.states] for p in pset.parts], B22)
    assert max(product_defect(s, B22) for s in rotated.all_states()) > 1e-3
    u = prop2_embed_unitary(rotated)
    for psi in rotated.all_states():
        assert product_defect(u @ psi, B22) < 1e-10


def test_prop2_errors():
    with pytest.raises(ValueError, match="parts"):
        prop2_embed_unitary(PartitionedSet([[ket(0)], [ket(1)], [ket(2)]], B22))
    with pytest.raises(ValueError, match="spans dimension"):
        prop2_embed_unitary(PartitionedSet([[ket(0), ket(1), ket(2)]], B22))
    with pytest.raises(ValueError, match="not orthogonal"):
        prop2_embed_unitary(PartitionedSet([[ket(0)], [ket(0) + ket(1)]], B22))


def test_prop2_random_instances():
    rng = np.random.default_rng(3)
    for _ in range(30):
        pset = random_partitioned_set(rng)
        u = prop2_embed_unitary(pset)
        assert is_unitary(u)
        assert max(product_defect(u @ s, pset.bip) for s in pset.all_states()) < 1e-10


def test_witness_case_i_verbatim():
    s = StateSet([ket(0), ket(1), ket(2)])
    assert witness_case(s, 2) == "i"
    u = prop1_witness_unitary(s, 2, B22)
    np.testing.assert_allclose(u @ ket(0), ket(0), atol=1e-12)  # |1>|1>
    np.testing.assert_allclose(u @ ket(1), ket(1), atol=1e-12)  # |1>|2>
    np.testing.assert_allclose(u @ ket(2), ket(2), atol=1e-12)  # |2>|1>
    assert all(product_defect(u @ v, B22) == 0 for v in s)


def test_witness_case_ii_factored_form():
    psi3 = (ket(0) + ket(1) + ket(2)) / np.sqrt(3)
    s = StateSet([ket(0), ket(1), psi3])
    assert witness_case(s, 2) == "ii"
    u = prop1_witness_unitary(s, 2, B22)
    # c = (1, 1)/sqrt3, beta = 1/sqrt3: (|1> + beta/|c| |2>) (x) (c_1|1> + c_2|2>)
    expected = np.kron([1, 1 / np.sqrt(2)], [1, 1]) / np.sqrt(3)
    np.testing.assert_allclose(u @ psi3, expected, atol=1e-12)
    assert product_defect(u @ psi3, B22) < 1e-10
    for v in s:
        assert product_defect(u @ v, B22) < 1e-10


def test_witness_rejects_large_span():
    s = StateSet([ket(0), ket(1), ket(2), ket(3)])
    with pytest.raises(ValueError):
        prop1_witness_unitary(s, 0, B22)


@pytest.mark.parametrize("case", ["i", "ii"])
def test_witness_random_sets(case):
    rng = np.random.default_rng(7 if case == "i" else 8)
    for k in range(20):
        bip = BIPARTITIONS[k % 4]
        s, i = random_prop1_set(rng, bip, case)
        assert numeric_rank([v for j, v in enumerate(s.states) if j != i]) <= bip.d2
        assert witness_case(s, i) == case
        u = prop1_witness_unitary(s, i, bip)
        assert is_unitary(u)
        assert max(product_defect(u @ v, bip) for v in s) < 1e-10
