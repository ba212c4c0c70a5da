"""Numba/numpy kernel parity and the backend selection flag."""

import os
import subprocess
import sys

import numpy as np

from leveldot import _kernels


def _random_inputs(seed=0, n=257, nt=83):
    rng = np.random.default_rng(seed)
    w = rng.random(n)
    w /= w.sum()
    e = rng.normal(size=n)
    t = np.concatenate([[0.0], np.geomspace(1e-3, 50, nt)])
    return w, e, t


def test_backends_agree_on_survival():
    w, e, t = _random_inputs()
    ref = _kernels._phase_survival_numpy(w, e, t)
    out = _kernels.phase_survival(w, e, t)
    np.testing.assert_allclose(out, ref, rtol=0, atol=1e-12)


def test_backends_agree_on_phase_sum():
    rng = np.random.default_rng(3)
    e = rng.normal(size=311)
    taus = np.geomspace(0.01, 5, 47)
    ref = _kernels._phase_sum_numpy(e, taus)
    out = _kernels.phase_sum(e, taus)
    np.testing.assert_allclose(out, ref, rtol=0, atol=1e-9)


def test_survival_bounded_and_even():
    w, e, t = _random_inputs(seed=5)
    p = _kernels.phase_survival(w, e, t)
    assert np.all(p <= 1.0 + 1e-12)
    assert np.all(p >= 0.0)
    np.testing.assert_array_equal(p, _kernels.phase_survival(w, e, -t))


def test_env_flag_selects_numpy_backend():
    code = "import leveldot._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, LEVELDOT_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba_when_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        assert _kernels.BACKEND == "numpy"
    else:
        env = dict(os.environ)
        env.pop("LEVELDOT_NO_NUMBA", None)
        code = "import leveldot._kernels as k; print(k.BACKEND)"
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numba"
