"""Multi-start search of U(d) for a unitary that makes every state product.

The objective is the summed product defect of the rotated states.  Each
restart starts from a seeded Haar unitary and runs damped Gauss-Newton
(Levenberg-Marquardt) steps along the exponential retraction
``U <- U exp(A)``.  The Jacobian comes from central finite differences
over the d^2 real coordinates of the skew-Hermitian ``A``.

A found mapping is a checkable witness.  Failing to find one is evidence
of absolute entanglement, never a proof.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .entanglement import Bipartition, StateSet
from .linalg import expm_skew, haar_unitary, skew_hermitian

log = logging.getLogger(__name__)

PRODUCT_MAPPING_FOUND = "ProductMappingFound"
NO_MAPPING_FOUND = "NoMappingFound"
EVIDENCE_NOTE = "evidence, not proof: no product mapping was found within the search budget"


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 50
    max_iters: int = 200
    step_tol: float = 1e-12
    objective_tol: float = 1e-6
    seed: int = 0
    fd_step: float = 1e-6
    stop_on_success: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step_tol <= 0 or self.objective_tol <= 0 or self.fd_step <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class RestartResult:
    index: int
    seed: int
    objective: float
    initial_objective: float
    iterations: int
    unitary: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SearchReport:
    best_objective: float
    best_unitary: np.ndarray
    per_restart: tuple
    verdict: str
    tol: float

    def to_json(self) -> dict:
        out = {
            "best_objective": self.best_objective,
            "verdict": self.verdict,
            "unitary": [[[float(z.real), float(z.imag)] for z in row] for row in self.best_unitary],
            "restarts": [
                {"seed": r.seed, "objective": r.objective, "iters": r.iterations}
                for r in self.per_restart
            ],
        }
        if self.verdict == NO_MAPPING_FOUND:
            out["note"] = EVIDENCE_NOTE
        return out


def _defects(images: np.ndarray, bip: Bipartition) -> np.ndarray:
    """Product defects of columns of ``images``; leading axes are batch axes."""
    *batch, d, n = images.shape
    mats = np.swapaxes(images, -1, -2).reshape(*batch, n, bip.d1, bip.d2)
    s2 = np.linalg.svd(mats, compute_uv=False) ** 2
    return s2[..., 1:].sum(axis=-1) / s2.sum(axis=-1)


def objective(u: np.ndarray, states: StateSet, bip: Bipartition) -> float:
    """Sum over the set of the product defect of ``u @ psi``."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (bip.d, bip.d) or states.dim != bip.d:
        raise ValueError(f"unitary {u.shape} / states of dimension {states.dim} do not match {bip}")
    return float(_defects(u @ states.matrix(), bip).sum())


@lru_cache(maxsize=32)
def _fd_generators(d: int, h: float) -> np.ndarray:
    """exp(+h E_k) and exp(-h E_k) for the coordinate basis of u(d), stacked."""
    eye = np.eye(d * d)
    plus = [expm_skew(skew_hermitian(h * eye[k], d)) for k in range(d * d)]
    minus = [m.conj().T for m in plus]
    out = np.stack(plus + minus)
    out.flags.writeable = False
    return out


def _restart_seed(seed: int, r: int) -> int:
    return int(np.random.SeedSequence([seed, r]).generate_state(1)[0])


def _residuals(images: np.ndarray, bip: Bipartition) -> np.ndarray:
    """Each image minus its best product approximation, as one real vector.

    The squared norm is the summed product defect of unit-norm images.
    """
    *batch, d, n = images.shape
    mats = np.swapaxes(images, -1, -2).reshape(*batch, n, bip.d1, bip.d2)
    left, s, right = np.linalg.svd(mats, full_matrices=False)
    tail = (left[..., :, 1:] * s[..., None, 1:]) @ right[..., 1:, :]
    flat = tail.reshape(*batch, -1)
    return np.concatenate([flat.real, flat.imag], axis=-1)


def _descend(start: np.ndarray, psi: np.ndarray, bip: Bipartition, cfg: SearchConfig,
             rng: np.random.Generator) -> tuple[np.ndarray, float, int]:
    """Levenberg-Marquardt on the residuals, stepping along ``U exp(A)``.

    A product mapping is a zero-residual solution, where this converges
    much faster than plain gradient descent.
    """
    d = bip.d
    gens = _fd_generators(d, cfg.fd_step)
    m = d * d
    target = cfg.objective_tol * 1e-3

    def f(u):
        return float(_defects(u @ psi, bip).sum())

    u = start
    val = f(u)
    mu = 1e-3
    stalls = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if val < target:
            it -= 1
            break
        r = _residuals(u @ psi, bip)
        batch = _residuals((u @ gens) @ psi, bip)
        jac = ((batch[:m] - batch[m:]) / (2 * cfg.fd_step)).T
        jtj = jac.T @ jac
        grad = jac.T @ r
        cand = None
        while mu < 1e12:
            x = np.linalg.solve(jtj + mu * np.eye(m), -grad)
            trial = u @ expm_skew(skew_hermitian(x, d))
            tval = f(trial)
            if tval < val:
                cand, cval = trial, tval
                mu = max(mu / 3, 1e-12)
                break
            mu *= 4
        if cand is None:
            # Stalled, typically where the top Schmidt coefficients tie.
            stalls += 1
            if stalls > 5:
                break
            kick = rng.standard_normal(m) * 1e-3
            u = u @ expm_skew(skew_hermitian(kick, d))
            val = f(u)
            mu = 1e-3
            continue
        improvement = val - cval
        u, val = cand, cval
        if improvement < cfg.step_tol * max(1.0, val):
            break
    return u, val, it


def _run_restart(r: int, psi: np.ndarray, bip: Bipartition, cfg: SearchConfig) -> RestartResult:
    seed = _restart_seed(cfg.seed, r)
    rng = np.random.default_rng(seed)
    start = haar_unitary(bip.d, rng)
    init = float(_defects(start @ psi, bip).sum())
    u, val, iters = _descend(start, psi, bip, cfg, rng)
    # Descent only accepts improving steps but a stall kick may not; keep
    # the restart's final point no worse than its start.
    if val > init:
        u, val = start, init
    log.debug("restart %d seed %d: %.3e -> %.3e in %d iterations", r, seed, init, val, iters)
    return RestartResult(r, seed, val, init, iters, u)


def verdict_of(best_objective: float, tol: float) -> str:
    return PRODUCT_MAPPING_FOUND if best_objective < tol else NO_MAPPING_FOUND


def minimize_over_unitaries(states: StateSet, bip: Bipartition, cfg: SearchConfig = SearchConfig()) -> SearchReport:
    """Multi-start minimization of the summed product defect over U(d).

    Results depend only on ``cfg`` (restart r is seeded from ``(seed, r)``),
    not on how restarts are scheduled.  With ``stop_on_success`` the report
    is truncated after the lowest-index restart that reaches the tolerance.
    """
    if states.dim != bip.d:
        raise ValueError(f"states of dimension {states.dim} do not split as {bip}")
    psi = states.matrix()
    results: list[RestartResult] = []
    chunk = max(1, cfg.workers) if cfg.stop_on_success else cfg.restarts
    indices = list(range(cfg.restarts))
    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        for lo in range(0, cfg.restarts, chunk):
            batch = indices[lo:lo + chunk]
            if cfg.workers > 1:
                out = list(pool.map(lambda r: _run_restart(r, psi, bip, cfg), batch))
            else:
                out = [_run_restart(r, psi, bip, cfg) for r in batch]
            if cfg.stop_on_success:
                for res in out:
                    results.append(res)
                    if res.objective < cfg.objective_tol:
                        break
                if results[-1].objective < cfg.objective_tol:
                    break
            else:
                results.extend(out)
    best = min(results, key=lambda r: (r.objective, r.index))
    return SearchReport(
        best.objective, best.unitary, tuple(results),
        verdict_of(best.objective, cfg.objective_tol), cfg.objective_tol,
    )


def replay(report: SearchReport, states: StateSet, bip: Bipartition) -> Sequence[float]:
    """Per-state defects of the report's best unitary, recomputed independently."""
    from .entanglement import product_defect

    return [product_defect(report.best_unitary @ s, bip) for s in states.states]
