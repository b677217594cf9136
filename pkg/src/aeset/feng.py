"""Block structure of orthonormal product bases of C^2 (x) C^n.

Every such basis splits into blocks ``{a_k (x) A_k, a_k_perp (x) A'_k}``
where A_k and A'_k are orthonormal families spanning the same subspace of
C^n and those subspaces decompose C^n.  This module generates, validates
and recovers that structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .entanglement import Bipartition, product_defect, schmidt
from .linalg import haar_unitary

SAME_DIRECTION = 1 - 1e-8
ANTIPODAL = 1e-8


class FengStructureError(ValueError):
    """Input that cannot be put in block form."""


def perp(a: np.ndarray) -> np.ndarray:
    """The unit vector orthogonal to ``a`` in C^2."""
    return np.array([-np.conj(a[1]), np.conj(a[0])])


@dataclass
class FengBlock:
    a: np.ndarray
    A: np.ndarray  # n x n_k, columns are the members of A_k
    Aprime: np.ndarray
    a_perp: np.ndarray | None = None

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.A = np.asarray(self.A, dtype=complex).reshape(-1, np.shape(self.A)[-1])
        self.Aprime = np.asarray(self.Aprime, dtype=complex).reshape(-1, np.shape(self.Aprime)[-1])
        if self.a_perp is None:
            self.a_perp = perp(self.a)
        else:
            self.a_perp = np.asarray(self.a_perp, dtype=complex)

    @property
    def size(self) -> int:
        return self.A.shape[1]


@dataclass
class FengBasis:
    blocks: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.blocks[0].A.shape[0]

    @property
    def partition(self) -> list[int]:
        return [b.size for b in self.blocks]

    def flatten(self) -> list[np.ndarray]:
        """The 2n product states, block by block (a-side first)."""
        out = []
        for b in self.blocks:
            out.extend(np.kron(b.a, b.A[:, i]) for i in range(b.A.shape[1]))
            out.extend(np.kron(b.a_perp, b.Aprime[:, i]) for i in range(b.Aprime.shape[1]))
        return out

    def to_json(self) -> dict:
        return {
            "blocks": [
                {
                    "a": _cjson(b.a),
                    "A": [_cjson(b.A[:, i]) for i in range(b.A.shape[1])],
                    "Aprime": [_cjson(b.Aprime[:, i]) for i in range(b.Aprime.shape[1])],
                }
                for b in self.blocks
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "FengBasis":
        blocks = []
        for blk in data["blocks"]:
            a = _cparse(blk["a"])
            A = np.column_stack([_cparse(v) for v in blk["A"]])
            Ap = np.column_stack([_cparse(v) for v in blk["Aprime"]])
            blocks.append(FengBlock(a, A, Ap))
        return cls(blocks)


def _cjson(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _cparse(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs])


def feng_generate(n: int, partition: Sequence[int], seed: int = 0) -> FengBasis:
    """Random orthonormal product basis of C^2 (x) C^n with block sizes ``partition``."""
    partition = [int(k) for k in partition]
    if n < 1 or any(k < 1 for k in partition) or sum(partition) != n:
        raise ValueError(f"partition {partition} must be positive parts summing to n = {n}")
    rng = np.random.default_rng(seed)
    frame = haar_unitary(n, rng)
    directions = _distinct_directions(len(partition), rng)
    blocks = []
    start = 0
    for size, a in zip(partition, directions):
        sub = frame[:, start:start + size]
        start += size
        A = sub @ haar_unitary(size, rng)
        Ap = sub @ haar_unitary(size, rng)
        blocks.append(FengBlock(a, A, Ap))
    return FengBasis(blocks)


def _distinct_directions(t: int, rng: np.random.Generator, margin: float = 0.05) -> list[np.ndarray]:
    # Pairs {a, a_perp} must differ across blocks: keep every overlap
    # modulus away from 0 and 1.
    out: list[np.ndarray] = []
    while len(out) < t:
        a = haar_unitary(2, rng)[:, 0]
        if all(margin < abs(np.vdot(b, a)) < 1 - margin for b in out):
            out.append(a)
    return out


@dataclass
class FengVerdict:
    conditions: dict
    messages: list

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def to_json(self) -> dict:
        return {"passed": self.passed, "conditions": dict(self.conditions), "messages": list(self.messages)}


def feng_validate(fb: FengBasis, tol: float = 1e-10) -> FengVerdict:
    """Check the four block conditions plus orthonormality of the flattened basis.

    Condition keys: ``"1"`` A_k orthonormal, ``"2"`` A'_k orthonormal,
    ``"3"`` span(A_k) = span(A'_k) with equal sizes, ``"4"`` the spans
    decompose C^n.  ``"pairs"`` checks unit, distinct {a_k, a_k_perp} pairs
    and ``"basis"`` the Gram matrix of all 2n product states.
    """
    conds = {"1": True, "2": True, "3": True, "4": True, "pairs": True, "basis": True}
    msgs: list[str] = []

    def fail(key, msg):
        conds[key] = False
        msgs.append(msg)

    if not fb.blocks:
        fail("4", "no blocks")
        return FengVerdict(conds, msgs)
    n = fb.blocks[0].A.shape[0]
    for k, b in enumerate(fb.blocks):
        for key, fam, name in (("1", b.A, "A"), ("2", b.Aprime, "A'")):
            if fam.shape[0] != n:
                fail(key, f"block {k}: {name} vectors not in C^{n}")
                continue
            err = _gram_error(fam)
            if err >= tol:
                fail(key, f"block {k}: {name} not orthonormal (gram error {err:.3g})")
        if b.A.shape[1] != b.Aprime.shape[1]:
            fail("3", f"block {k}: n_k = {b.A.shape[1]} but n_k' = {b.Aprime.shape[1]}")
        elif b.A.shape[0] == b.Aprime.shape[0] == n:
            # Projecting A' onto span(A) must preserve it.
            q, _ = np.linalg.qr(b.A)
            resid = b.Aprime - q @ (q.conj().T @ b.Aprime)
            if np.max(np.abs(resid)) >= tol:
                fail("3", f"block {k}: span(A) != span(A') (residual {np.max(np.abs(resid)):.3g})")
        if abs(np.linalg.norm(b.a) - 1) >= tol:
            fail("pairs", f"block {k}: a is not a unit vector")
        if abs(np.vdot(b.a, b.a_perp)) >= tol:
            fail("pairs", f"block {k}: a_perp is not orthogonal to a")

    sizes = [b.A.shape[1] for b in fb.blocks]
    if sum(sizes) != n:
        fail("4", f"block sizes {sizes} do not sum to n = {n}")
    if all(b.A.shape[0] == n for b in fb.blocks):
        union = np.column_stack([b.A for b in fb.blocks])
        err = _gram_error(union)
        if err >= tol:
            fail("4", f"block subspaces overlap (gram error {err:.3g})")

    for k in range(len(fb.blocks)):
        for j in range(k + 1, len(fb.blocks)):
            ov = abs(np.vdot(fb.blocks[k].a, fb.blocks[j].a))
            if ov > SAME_DIRECTION or ov < ANTIPODAL:
                fail("pairs", f"blocks {k} and {j} share the pair {{a, a_perp}}")

    if all(b.A.shape[0] == n and b.Aprime.shape[0] == n for b in fb.blocks):
        states = np.column_stack(fb.flatten())
        err = _gram_error(states)
        if states.shape[1] != 2 * n or err >= tol:
            fail("basis", f"flattened states are not an orthonormal basis of C^{2 * n}")
    return FengVerdict(conds, msgs)


def _gram_error(cols: np.ndarray) -> float:
    return float(np.max(np.abs(cols.conj().T @ cols - np.eye(cols.shape[1]))))


def _phase_fix(a: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(a)))
    return a * (abs(a[k]) / a[k])


def feng_decompose(states: Sequence, tol: float = 1e-8) -> FengBasis:
    """Recover the block form of an orthonormal product basis of C^2 (x) C^n.

    States are grouped by the direction of their C^2 factor; each group is
    paired with the group carrying the orthogonal direction.  Blocks come
    out sorted by descending size, ties broken by first occurrence.
    """
    vecs = [np.asarray(s, dtype=complex) for s in states]
    if not vecs or vecs[0].shape[0] % 2 or len(vecs) != vecs[0].shape[0]:
        raise FengStructureError("expected 2n states in C^(2n)")
    n = vecs[0].shape[0] // 2
    if n < 2:
        raise FengStructureError("need n >= 2")
    bip = Bipartition(2, n)
    m = np.column_stack(vecs)
    if np.max(np.abs(m.conj().T @ m - np.eye(2 * n))) >= tol:
        raise FengStructureError("input is not orthonormal")
    bad = [i for i, v in enumerate(vecs) if product_defect(v, bip) >= tol]
    if bad:
        raise FengStructureError(f"not all product: states {bad} are entangled")

    factors = []
    for v in vecs:
        sd = schmidt(v, bip)
        a = _phase_fix(sd.left_vectors[:, 0])
        # v = a (x) b with b = (a^dagger (x) I) v
        b = a.conj() @ v.reshape(2, n)
        factors.append((a, b))

    groups: list[list[int]] = []
    for i, (a, _) in enumerate(factors):
        for grp in groups:
            if abs(np.vdot(factors[grp[0]][0], a)) > SAME_DIRECTION:
                grp.append(i)
                break
        else:
            groups.append([i])

    used = set()
    raw_blocks = []
    for gi, grp in enumerate(groups):
        if gi in used:
            continue
        a0 = factors[grp[0]][0]
        partners = [
            gj for gj in range(len(groups))
            if gj != gi and gj not in used and abs(np.vdot(factors[groups[gj][0]][0], a0)) < ANTIPODAL
        ]
        if len(partners) != 1:
            raise FengStructureError(f"direction group {gi} has {len(partners)} antipodal partners")
        gj = partners[0]
        used.update((gi, gj))
        other = groups[gj]
        if len(grp) != len(other):
            raise FengStructureError(f"block sizes differ: {len(grp)} vs {len(other)}")
        a_perp = perp(a0)
        A = np.column_stack([factors[i][1] for i in grp])
        # Rewrite the partner states over the fixed a_perp.
        Ap = np.column_stack([a_perp.conj() @ vecs[i].reshape(2, n) for i in other])
        raw_blocks.append((min(grp[0], other[0]), FengBlock(a0, A, Ap, a_perp)))

    raw_blocks.sort(key=lambda t: (-t[1].size, t[0]))
    fb = FengBasis([b for _, b in raw_blocks])
    verdict = feng_validate(fb, max(tol, 1e-10))
    if not verdict.passed:
        raise FengStructureError("recovered blocks fail validation: " + "; ".join(verdict.messages))
    return fb
