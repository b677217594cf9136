"""Small-dimension complex linear algebra.

Vectors are 1-D complex numpy arrays, matrices 2-D complex arrays.  All
routines here are pure functions of their inputs.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

UNITARY_TOL = 1e-10


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    return arr


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def gram_schmidt_extend(vectors: Sequence, d: int, tol: float = 1e-9):
    """Orthonormalize ``vectors`` and complete them to a basis of C^d.

    A vector is dropped when its residual after projecting out the kept
    vectors has norm below ``tol * (1 + ||v||)``.

    Returns ``(span, rank, completion)`` where ``span`` is the list of kept
    orthonormal vectors and ``span + completion`` is an orthonormal basis.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    span: list[np.ndarray] = []
    for v in vectors:
        v = as_vector(v)
        if v.shape[0] != d:
            raise ValueError(f"vector of dimension {v.shape[0]} in C^{d}")
        r = _residual(v, span)
        nrm = np.linalg.norm(r)
        if nrm < tol * (1.0 + np.linalg.norm(v)):
            continue
        span.append(r / nrm)
    rank = len(span)

    basis = list(span)
    completion: list[np.ndarray] = []
    # Some canonical vector always keeps a residual of norm >= sqrt(1/d).
    for i in range(d):
        if len(basis) == d:
            break
        e = np.zeros(d, dtype=complex)
        e[i] = 1.0
        r = _residual(e, basis)
        nrm = np.linalg.norm(r)
        if nrm < 1e-6:
            continue
        r = r / nrm
        basis.append(r)
        completion.append(r)
    if len(basis) != d:  # pragma: no cover - every C^d basis has d canonical members
        raise RuntimeError("failed to complete the basis")
    return span, rank, completion


def _residual(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    # Two passes of modified Gram-Schmidt keep the residual orthogonal to
    # working precision.
    r = v.astype(complex, copy=True)
    for _ in range(2):
        for b in basis:
            r = r - np.vdot(b, r) * b
    return r


def haar_unitary(d: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Haar-distributed element of U(d).

    QR of a standard complex Gaussian matrix, with the columns of Q
    rephased so that R has a positive real diagonal.
    """
    if d <= 0:
        raise ValueError("d must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases[np.newaxis, :]


def svd_small(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = left @ diag(s) @ right.conj().T`` with ``s`` descending."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or 0 in m.shape:
        raise ValueError(f"expected a non-empty matrix, got shape {m.shape}")
    left, s, vh = np.linalg.svd(m, full_matrices=False)
    return left, s, vh.conj().T


def basis_transport_unitary(src: Sequence, dst: Sequence, tol: float = 1e-10) -> np.ndarray:
    """Unitary ``U`` with ``U @ src[i] == dst[i]`` for every i."""
    a = _basis_matrix(src, "source", tol)
    b = _basis_matrix(dst, "target", tol)
    if a.shape != b.shape:
        raise ValueError(f"basis shapes differ: {a.shape} vs {b.shape}")
    return b @ a.conj().T


def _basis_matrix(vectors: Sequence, name: str, tol: float) -> np.ndarray:
    cols = [as_vector(v) for v in vectors]
    if not cols:
        raise ValueError(f"{name} basis is empty")
    d = cols[0].shape[0]
    if any(c.shape[0] != d for c in cols):
        raise ValueError(f"{name} basis vectors have mixed dimensions")
    if len(cols) != d:
        raise ValueError(f"{name} basis has {len(cols)} vectors in C^{d}")
    m = np.column_stack(cols)
    if np.max(np.abs(m.conj().T @ m - np.eye(d))) >= tol:
        raise ValueError(f"{name} basis is not orthonormal")
    return m


def skew_hermitian(params: np.ndarray, d: int) -> np.ndarray:
    """Map d^2 real parameters onto the skew-Hermitian matrices u(d)."""
    params = np.asarray(params, dtype=float)
    a = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, k=1)
    m = len(iu[0])
    re, im, diag = params[:m], params[m:2 * m], params[2 * m:]
    a[iu] = re + 1j * im
    a = a - a.conj().T
    a[np.diag_indices(d)] = 1j * diag
    return a


def expm_skew(a: np.ndarray) -> np.ndarray:
    """exp(a) for skew-Hermitian ``a``; the result is unitary to rounding."""
    w, v = np.linalg.eigh(-1j * a)
    return (v * np.exp(1j * w)) @ v.conj().T
