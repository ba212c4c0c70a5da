"""Exact time evolution and survival-probability estimators.

Every realization is diagonalized densely; the survival probability follows
from the eigenfunction sum P(t) = |sum_a |c_a|^2 exp(-i e_a t)|^2 with
c_a = <a|0> the overlaps of the eigenvectors with the level state.  Averaging
is realization-parallel and bit-reproducible: results are keyed by
realization index and BLAS threading is pinned to one thread while sampling,
so 1 worker and many workers produce identical curves.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from threadpoolctl import threadpool_limits

from . import _kernels
from .ensembles import (
    EnsembleSpec,
    Realization,
    sample_dot,
    sample_poisson_dot,
    sample_realization,
    substream,
)
from .errors import RealizationError

__all__ = [
    "OverlapSet",
    "SurvivalCurve",
    "SffCurve",
    "decompose",
    "survival",
    "survival_rows",
    "average_survival",
    "plateau_estimate",
    "empirical_sff",
]

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8         # eigenpair residual gate, in units of lam
OVERLAP_NORM_TOL = 1e-10    # |sum of overlap weights - 1| gate
MIN_SUCCESS_FRACTION = 0.9


@dataclass
class OverlapSet:
    """Eigenvalues and level-state overlaps of one realization."""

    energies: np.ndarray     # ascending
    overlaps: np.ndarray     # c_a = <a|0>, as returned by the eigensolver
    weights: np.ndarray      # |c_a|^2, renormalized to sum to exactly 1.0
    cls: str                 # symmetry class (degenerate pairs for "S")


def _exact_unit_sum(weights: np.ndarray) -> np.ndarray:
    """Nudge the largest weight so the float sum is exactly 1.0."""
    w = weights / weights.sum()
    top = int(np.argmax(w))
    for _ in range(4):
        gap = 1.0 - w.sum()
        if gap == 0.0:
            break
        w[top] += gap
    return w


def decompose(realization: Realization, residual_tol: float = RESIDUAL_TOL) -> OverlapSet:
    """Dense eigendecomposition with residual and normalization gates.

    Raises :class:`RealizationError` when any eigenpair residual exceeds
    ``residual_tol * lam`` or the overlap weights fail to sum to one; callers
    discard such realizations rather than repairing them.
    """
    a = realization.matrix()
    energies, vecs = sla.eigh(a, driver="evr", check_finite=False)
    resid = a @ vecs
    resid -= vecs * energies
    worst = float(np.sqrt((np.abs(resid) ** 2).sum(axis=0)).max())
    lam = realization.spec.lam
    if not worst <= residual_tol * lam:
        raise RealizationError(
            f"eigenpair residual {worst:.3e} above {residual_tol:.1e}*lam for "
            f"seed_path={realization.seed_path}")
    overlaps = vecs[0, :].conj()
    weights = np.abs(overlaps) ** 2
    norm = float(weights.sum())
    if abs(norm - 1.0) > OVERLAP_NORM_TOL:
        raise RealizationError(
            f"overlap normalization off by {norm - 1.0:.3e} for seed_path={realization.seed_path}")
    return OverlapSet(energies=energies, overlaps=overlaps,
                      weights=_exact_unit_sum(weights), cls=realization.spec.cls)


def survival(overlaps: OverlapSet, times) -> np.ndarray:
    """Survival probability P(t) on a grid of absolute times.

    P(0) = (sum of weights)^2 = 1 identically; the t = 0 grid value is pinned
    to exactly 1.0 so it does not pick up summation-order rounding.
    """
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    out = _kernels.phase_survival(overlaps.weights, overlaps.energies, times)
    out[times == 0.0] = 1.0
    return out


def plateau_estimate(overlaps: OverlapSet) -> float:
    """Infinite-time average of P(t): the coherent diagonal sum.

    For class S the eigenvalues are exactly degenerate Kramers pairs, so the
    diagonal sum runs over pair weights (sum of the two member weights).
    """
    w = overlaps.weights
    if overlaps.cls == "S":
        w = w[0::2] + w[1::2]
    return float((w * w).sum())


def _survival_row(spec: EnsembleSpec, master_seed: int, index: int, times: np.ndarray) -> np.ndarray:
    return survival(decompose(sample_realization(spec, master_seed, index)), times)


def survival_rows(spec: EnsembleSpec, tau_grid, indices, master_seed: int,
                  workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Per-realization survival curves for the given realization indices.

    Returns ``(rows, ok)`` where ``rows[i]`` is the curve for ``indices[i]``
    (NaN when that realization was rejected) and ``ok`` is the success mask.
    Output depends only on ``(spec, tau_grid, indices, master_seed)``.
    """
    tau_grid = np.asarray(tau_grid, dtype=np.float64)
    times = spec.tau_to_time(tau_grid)
    indices = list(indices)
    rows = np.full((len(indices), tau_grid.size), np.nan)
    ok = np.zeros(len(indices), dtype=bool)

    def work(slot: int):
        idx = indices[slot]
        try:
            rows[slot] = _survival_row(spec, master_seed, idx, times)
            ok[slot] = True
        except RealizationError as exc:
            log.warning("discarding realization %d: %s", idx, exc)

    # single-threaded BLAS keeps results identical for any worker count
    with threadpool_limits(limits=1):
        if workers <= 1:
            for slot in range(len(indices)):
                work(slot)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(work, range(len(indices))))
    return rows, ok


@dataclass
class SurvivalCurve:
    """Ensemble-averaged survival probability on a fixed time grid."""

    tau: np.ndarray          # time in units of the Heisenberg time
    t: np.ndarray            # absolute time
    mean: np.ndarray
    stderr: np.ndarray
    samples: int
    spec: EnsembleSpec
    master_seed: int


def reduce_rows(rows: np.ndarray, ok: np.ndarray, spec: EnsembleSpec, tau_grid,
                master_seed: int, requested: int) -> SurvivalCurve:
    """Mean/stderr reduction over successful rows, with the >=90% success gate."""
    n_ok = int(ok.sum())
    if n_ok < math.ceil(MIN_SUCCESS_FRACTION * requested):
        raise RealizationError(
            f"only {n_ok}/{requested} realizations succeeded (need >= {MIN_SUCCESS_FRACTION:.0%})")
    good = rows[ok]
    mean = good.mean(axis=0)
    stderr = (good.std(axis=0, ddof=1) / np.sqrt(n_ok)) if n_ok > 1 else np.zeros_like(mean)
    tau_grid = np.asarray(tau_grid, dtype=np.float64)
    return SurvivalCurve(tau=tau_grid, t=spec.tau_to_time(tau_grid), mean=mean,
                         stderr=stderr, samples=n_ok, spec=spec, master_seed=master_seed)


def average_survival(spec: EnsembleSpec, tau_grid, n_samples: int, master_seed: int,
                     workers: int = 1) -> SurvivalCurve:
    """Ensemble-averaged survival curve over ``n_samples`` i.i.d. realizations."""
    if n_samples < 2:
        raise ValueError("need n_samples >= 2 for a standard error")
    rows, ok = survival_rows(spec, tau_grid, range(n_samples), master_seed, workers=workers)
    return reduce_rows(rows, ok, spec, tau_grid, master_seed, n_samples)


@dataclass
class SffCurve:
    """Connected spectral form factor of the isolated dot, plateau-normalized."""

    tau: np.ndarray
    k: np.ndarray
    stderr: np.ndarray
    samples: int
    spec: EnsembleSpec
    master_seed: int


def _semicircle_staircase(energies: np.ndarray, n: int, lam: float) -> np.ndarray:
    """Mean integrated density of the semicircle law (unit mean spacing)."""
    e = np.clip(energies / (2.0 * lam), -1.0, 1.0)
    return n * (0.5 + (e * np.sqrt(1.0 - e * e) + np.arcsin(e)) / np.pi)


def empirical_sff(spec: EnsembleSpec, n_samples: int, tau_grid, master_seed: int,
                  workers: int = 1, window: float = 0.5) -> SffCurve:
    """Connected form factor of the dot spectrum near the band center.

    The coupling is ignored: only the dot block is diagonalized.  Levels with
    |E| < window*lam are unfolded with the semicircle staircase; class S
    Kramers pairs are collapsed to single levels first.  Normalization is
    such that the tau -> infinity plateau equals 1.
    """
    tau_grid = np.atleast_1d(np.asarray(tau_grid, dtype=np.float64))
    sums = np.zeros((n_samples, tau_grid.size), dtype=np.complex128)
    counts = np.zeros(n_samples)

    def work(idx: int):
        rng = substream(master_seed, idx)
        h = sample_poisson_dot(spec, rng) if spec.bath == "poisson" else sample_dot(spec, rng)
        energies = np.linalg.eigvalsh(h)
        if spec.cls == "S":
            energies = 0.5 * (energies[0::2] + energies[1::2])
        sel = energies[np.abs(energies) < window * spec.lam]
        unfolded = _semicircle_staircase(sel, spec.n, spec.lam)
        sums[idx] = _kernels.phase_sum(unfolded, tau_grid)
        counts[idx] = sel.size

    with threadpool_limits(limits=1):
        if workers <= 1:
            for idx in range(n_samples):
                work(idx)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(work, range(n_samples)))

    mean_count = counts.mean()
    abs2 = np.abs(sums) ** 2
    connected = abs2.mean(axis=0) - np.abs(sums.mean(axis=0)) ** 2
    k = connected / mean_count
    stderr = abs2.std(axis=0, ddof=1) / np.sqrt(n_samples) / mean_count
    return SffCurve(tau=tau_grid, k=k, stderr=stderr, samples=n_samples,
                    spec=spec, master_seed=master_seed)
