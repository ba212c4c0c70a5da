"""Hot inner-loop kernels with a numba fast path and a pure-numpy fallback.

The numba path is used when numba imports cleanly; setting the environment
variable ``LEVELDOT_NO_NUMBA=1`` forces the numpy path.  Both paths are
deterministic for fixed inputs, but they may differ in the last few ulps
because numpy reduces sums pairwise while the jitted loops are sequential.
``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "phase_survival", "phase_sum"]

_TWO_PI = 2.0 * np.pi


def _phase_survival_numpy(weights, energies, times):
    """|sum_a w_a exp(-i e_a t)|^2 on a time grid (weights real, sum to 1)."""
    phase = np.exp(-1j * np.outer(times, energies))
    amp = phase @ weights.astype(np.complex128)
    return np.abs(amp) ** 2


def _phase_sum_numpy(unfolded, taus):
    """sum_i exp(-2*pi*i * e_i * tau) for unfolded levels, per tau."""
    return np.exp(-2j * np.pi * np.outer(taus, unfolded)).sum(axis=1)


def _want_numba() -> bool:
    return os.environ.get("LEVELDOT_NO_NUMBA", "0").strip().lower() in ("", "0", "false")


_phase_survival_numba = None
_phase_sum_numba = None

if _want_numba():
    try:
        import numba
    except ImportError:
        numba = None
    if numba is not None:

        @numba.njit(cache=True, nogil=True)
        def _phase_survival_numba(weights, energies, times):  # pragma: no cover - jitted
            out = np.empty(times.shape[0], dtype=np.float64)
            for j in range(times.shape[0]):
                t = times[j]
                re = 0.0
                im = 0.0
                for k in range(energies.shape[0]):
                    arg = energies[k] * t
                    re += weights[k] * np.cos(arg)
                    im -= weights[k] * np.sin(arg)
                out[j] = re * re + im * im
            return out

        @numba.njit(cache=True, nogil=True)
        def _phase_sum_numba(unfolded, taus):  # pragma: no cover - jitted
            out = np.empty(taus.shape[0], dtype=np.complex128)
            for j in range(taus.shape[0]):
                re = 0.0
                im = 0.0
                for k in range(unfolded.shape[0]):
                    arg = _TWO_PI * unfolded[k] * taus[j]
                    re += np.cos(arg)
                    im -= np.sin(arg)
                out[j] = complex(re, im)
            return out


if _phase_survival_numba is not None:
    BACKEND = "numba"
    _phase_survival = _phase_survival_numba
    _phase_sum = _phase_sum_numba
else:
    BACKEND = "numpy"
    _phase_survival = _phase_survival_numpy
    _phase_sum = _phase_sum_numpy


def phase_survival(weights, energies, times):
    """Survival probability |sum_a w_a exp(-i e_a t)|^2 on a time grid.

    ``weights`` are the level-state overlap probabilities |<a|0>|^2,
    normalized to unit sum.
    """
    w = np.ascontiguousarray(weights, dtype=np.float64)
    e = np.ascontiguousarray(energies, dtype=np.float64)
    t = np.ascontiguousarray(times, dtype=np.float64)
    return _phase_survival(w, e, t)


def phase_sum(unfolded, taus):
    """Complex level sum sum_i exp(-2*pi*i*e_i*tau) for each tau."""
    e = np.ascontiguousarray(unfolded, dtype=np.float64)
    t = np.ascontiguousarray(taus, dtype=np.float64)
    return _phase_sum(e, t)
