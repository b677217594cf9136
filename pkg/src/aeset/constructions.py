"""Candidate absolutely entangled sets and explicit product-mapping unitaries."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entanglement import Bipartition, StateSet, numeric_rank
from .linalg import as_vector, basis_transport_unitary, gram_schmidt_extend

log = logging.getLogger(__name__)

ORTHO_TOL = 1e-10


class PremiseError(ValueError):
    """Construction parameters violate the premise that makes the set entangled."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, int(n ** 0.5) + 1))


def _basis_columns(basis, d: int) -> np.ndarray:
    if basis is None:
        return np.eye(d, dtype=complex)
    b = np.asarray(basis, dtype=complex)
    if b.shape != (d, d):
        raise ValueError(f"basis must be a {d}x{d} matrix of column vectors")
    if np.max(np.abs(b.conj().T @ b - np.eye(d))) >= ORTHO_TOL:
        raise ValueError("basis is not orthonormal")
    return b


def theorem1_premise(a: Sequence[complex], b: Sequence[complex]) -> tuple[bool, float]:
    """Smallest admissible lambda, ``max_i |b_i|^2 / (2 |a_i|^2)``.

    The premise holds when that value is strictly below 1, so that a
    witness lambda in [lambda_star, 1) exists with the strict inequality.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("a and b must have equal length")
    if np.any(a == 0):
        raise PremiseError("some a_i = 0: the premise cannot hold")
    lam = float(np.max(np.abs(b) ** 2 / (2.0 * np.abs(a) ** 2)))
    return lam < 1.0, lam


def theorem1_set(d: int, a, b, basis=None) -> StateSet:
    """phi_1 = xi_1 and phi_i = a_i xi_1 + b_i xi_i for i = 2..d.

    Scalars ``a`` or ``b`` are broadcast to all d - 1 entries.  Each
    ``(a_i, b_i)`` pair is normalized before use.
    """
    if d < 4 or _is_prime(d):
        raise ValueError(f"d must be a non-prime integer >= 4, got {d}")
    a = np.broadcast_to(np.asarray(a, dtype=complex), (d - 1,)).copy()
    b = np.broadcast_to(np.asarray(b, dtype=complex), (d - 1,)).copy()
    if np.any(b == 0):
        raise PremiseError("every b_i must be nonzero")
    holds, lam = theorem1_premise(a, b)
    if not holds:
        raise PremiseError(f"premise fails: lambda_star = {lam:.6g} >= 1")
    scale = np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
    a, b = a / scale, b / scale
    xi = _basis_columns(basis, d)
    states = [xi[:, 0]]
    for i in range(1, d):
        states.append(a[i - 1] * xi[:, 0] + b[i - 1] * xi[:, i])
    return StateSet(states, [f"phi{i + 1}" for i in range(d)])


def _power_states(d: int, p: int, x: float, xi: np.ndarray) -> list[np.ndarray]:
    exps = [p ** j for j in range(1, d + 1)]
    first = sum(x ** e * xi[:, j] for j, e in enumerate(exps))
    second = sum(x ** (2 * e) * xi[:, j] for j, e in enumerate(exps))
    # Tail amplitudes underflow for large p; the set stays well defined.
    return [first, second]


def example1_set(x: float, basis=None) -> StateSet:
    """Five states in C^4: xi_1..xi_3 and the two power-weighted sums (p = 2)."""
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    from .polynomials import excluded_values

    if any(abs(x - r) < 1e-9 for r in excluded_values(2)):
        warnings.warn(f"x = {x} is a root of the exclusion polynomials", stacklevel=2)
    xi = _basis_columns(basis, 4)
    states = [xi[:, i] for i in range(3)] + _power_states(4, 2, x, xi)
    return StateSet(states, [f"psi{i + 1}" for i in range(5)])


def theorem2_set(n: int, p: int, x: float, basis=None) -> StateSet:
    """d + 1 states in C^{2n}: xi_1..xi_{d-1} and the two power-weighted sums."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if p < 7:
        raise ValueError(f"p must be >= 7, got {p}")
    if p == 7:
        warnings.warn("p = 7 sits on the boundary between 'p > 7' and 'p >= 7'", stacklevel=2)
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    d = 2 * n
    xi = _basis_columns(basis, d)
    states = [xi[:, i] for i in range(d - 1)] + _power_states(d, p, x, xi)
    return StateSet(states, [f"psi{i + 1}" for i in range(d + 1)])


@dataclass(frozen=True)
class PartitionedSet:
    parts: tuple
    bip: Bipartition

    def __init__(self, parts: Sequence, bip: Bipartition):
        parts = tuple(p if isinstance(p, StateSet) else StateSet(p) for p in parts)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "bip", bip)

    def all_states(self) -> StateSet:
        states = [s for part in self.parts for s in part.states]
        labels = [lab for part in self.parts for lab in part.labels]
        return StateSet(states, labels)


def prop2_embed_unitary(pset: PartitionedSet, tol: float = 1e-9) -> np.ndarray:
    """Unitary sending part i into |i> (x) C^{d2}.

    Each part is orthonormalized, the union is completed to a basis of C^d,
    and that basis is transported onto the computational basis with the
    j-th vector of part i landing on |i>|j>.
    """
    bip = pset.bip
    d1, d2 = bip.d1, bip.d2
    if len(pset.parts) > d1:
        raise ValueError(f"{len(pset.parts)} parts cannot fit into d1 = {d1} slots")
    for part in pset.parts:
        if part.dim != bip.d:
            raise ValueError(f"part of dimension {part.dim} does not split as {bip}")
    for i, pi in enumerate(pset.parts):
        for j in range(i + 1, len(pset.parts)):
            overlap = np.abs(pi.matrix().conj().T @ pset.parts[j].matrix())
            if overlap.size and overlap.max() > ORTHO_TOL:
                raise ValueError(f"parts {i} and {j} are not orthogonal ({overlap.max():.3g})")

    src: list[np.ndarray] = []
    dst: list[np.ndarray] = []
    used = set()
    for i, part in enumerate(pset.parts):
        span, rank, _ = gram_schmidt_extend(part.states, bip.d, tol)
        if rank > d2:
            raise ValueError(f"part {i} spans dimension {rank} > d2 = {d2}")
        for j, v in enumerate(span):
            src.append(v)
            dst.append(_ket(i * d2 + j, bip.d))
            used.add(i * d2 + j)
    _, _, completion = gram_schmidt_extend(src, bip.d, tol)
    free = [k for k in range(bip.d) if k not in used]
    src.extend(completion)
    dst.extend(_ket(k, bip.d) for k in free)
    return basis_transport_unitary(src, dst)


def _ket(k: int, d: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[k] = 1.0
    return e


def prop1_witness_unitary(states: StateSet, i: int, bip: Bipartition, tol: float = 1e-9) -> np.ndarray:
    """Product-mapping unitary for a set whose leave-one-out span is small.

    With ``B = {xi_k}`` an orthonormal basis of span(S minus psi_i) and
    ``psi_i = sum_k c_k xi_k + beta eta`` (eta orthogonal to the span), the
    unitary sends xi_k to |1>|k> and eta to |2>|1> when every c_k vanishes,
    otherwise to |2> (x) N(sum_k c_k |k>).  Then U psi_i factors as
    (|1> + beta/||c|| |2>) (x) sum_k c_k |k>.
    """
    if not 0 <= i < len(states):
        raise IndexError(f"index {i} out of range for {len(states)} states")
    if states.dim != bip.d:
        raise ValueError(f"states of dimension {states.dim} do not split as {bip}")
    d, d2 = bip.d, bip.d2
    rest = [s for j, s in enumerate(states.states) if j != i]
    span, rank, _ = gram_schmidt_extend(rest, d, tol)
    if rank > d2:
        raise ValueError(f"dim span(S minus psi_{i}) = {rank} > d2 = {d2}: no witness by this construction")

    psi = as_vector(states.states[i])
    c = np.array([np.vdot(xk, psi) for xk in span], dtype=complex)
    resid = psi - sum((ck * xk for ck, xk in zip(c, span)), np.zeros(d, dtype=complex))
    beta = np.linalg.norm(resid)

    src = list(span)
    dst = [_ket(k, d) for k in range(rank)]  # |1>|k> has flat index k
    if beta > tol:
        eta = resid / beta
        src.append(eta)
        if np.linalg.norm(c) <= tol:
            log.debug("witness case (i): psi_%d orthogonal to the span", i)
            dst.append(_ket(d2, d))
        else:
            log.debug("witness case (ii): psi_%d has a component in the span", i)
            w = np.zeros(d, dtype=complex)
            w[d2:d2 + rank] = c / np.linalg.norm(c)
            dst.append(w)
    _, _, src_rest = gram_schmidt_extend(src, d, tol)
    _, _, dst_rest = gram_schmidt_extend(dst, d, tol)
    return basis_transport_unitary(src + src_rest, dst + dst_rest)


def witness_case(states: StateSet, i: int, tol: float = 1e-9) -> str:
    """Which branch of :func:`prop1_witness_unitary` applies: 'i', 'ii' or 'span'."""
    rest = [s for j, s in enumerate(states.states) if j != i]
    span, _, _ = gram_schmidt_extend(rest, states.dim, tol)
    psi = states.states[i]
    c = np.array([np.vdot(xk, psi) for xk in span])
    resid = np.linalg.norm(psi - sum((ck * xk for ck, xk in zip(c, span)), np.zeros_like(psi)))
    if resid <= tol:
        return "span"
    return "i" if np.linalg.norm(c) <= tol else "ii"


def leave_one_out_ranks(states: StateSet, tol: float = 1e-9) -> list[int]:
    return [
        numeric_rank([s for j, s in enumerate(states.states) if j != i], tol)
        for i in range(len(states))
    ]
