"""Acceptance suite: every primary criterion at its stated tolerance.

Each test prints one PASS line with the measured numbers.  The Monte Carlo
criteria run at desk scale and take on the order of two hours combined on a
couple of cores; heavy runs are chunk-checkpointed under the cache directory
(override with LEVELDOT_ACCEPTANCE_CACHE to reuse across sessions).

Two criteria are known-unattainable and are left failing by design (both
divide physical finite-bath corrections by Monte Carlo standard errors that
shrink with sample count; details in the test docstrings):

* ``test_survival_curves_match_crossover_formula`` (curve overlays at the
  stock desk scale); its companion
  ``test_survival_curves_finite_size_envelope`` quantifies the agreement
  that does hold at bath size 999: a 2% finite-size envelope plus 3 sigma
  over the window t*lam >= 30 where the short-time corrections have decayed;
* ``test_sweep_reproduces_stationary_crossover`` at its two largest
  couplings, where the finite-bath plateau shift (~0.5*gamma/n at the
  pinned bath size 399) is 5-10x the windowed-mean standard error.

The class-profile overlay comparison runs at bath size 999 (its criterion
pins neither bath size nor samples), while the universal-ratio criterion
runs exactly at its pinned dim-400/2000-sample scale.
"""

import os
import pathlib
import time
from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg as sla

from leveldot import harness, io, theory
from leveldot.ensembles import EnsembleSpec, sample_dot, sample_realization, substream
from leveldot.harness import ExperimentConfig, build_presets, plateau_stats
from leveldot.spectral import decompose, plateau_estimate, survival

SEED = 20260810
UNIVERSAL_T_LAM = 30.0     # t*lam above which the infinite-bath formulas apply


def _announce(name, detail):
    print(f"ACCEPTANCE PASS: {name} -- {detail}")


@pytest.fixture(scope="session")
def cache_root(tmp_path_factory):
    env = os.environ.get("LEVELDOT_ACCEPTANCE_CACHE")
    if env:
        os.makedirs(env, exist_ok=True)
        return env
    return tmp_path_factory.mktemp("acceptance")


# --- analytic criteria -----------------------------------------------------


def test_oracle_pair_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for gamma in np.geomspace(1e-3, 1e3, 25):
        point = theory.crossover_point(float(gamma))
        worst = max(worst, point.discrepancy)
        assert point.discrepancy <= 1e-8
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _announce("oracle pair identity",
              f"max |closed - integral| = {worst:.2e} over 25 gammas in {elapsed:.3f}s")


def test_crossover_boundary_value():
    for gamma in (0.022, 0.46, 46.0):
        assert theory.survival_crossover(0.0, gamma).value == 1.0
    _announce("crossover boundary", "P(tau=0) == 1.0 exactly for gamma in {0.022, 0.46, 46}")


def test_crossover_reaches_stationary_limit():
    t0 = time.perf_counter()
    worst = 0.0
    for gamma in (0.022, 0.46, 46.0):
        diff = abs(theory.survival_crossover(50.0, gamma).value - theory.residence_prob(gamma))
        worst = max(worst, diff)
        assert diff <= 1e-4
    _announce("crossover -> residence consistency",
              f"max |P(50) - P_res| = {worst:.2e} in {time.perf_counter() - t0:.2f}s")


def test_strong_coupling_asymptote():
    t0 = time.perf_counter()
    gamma = 100.0
    taus = np.geomspace(0.05, 3.0, 40)
    diffs = [abs(theory.survival_crossover(float(t), gamma).value -
                 theory.survival_strong_coupling(float(t), gamma)) for t in taus]
    elapsed = time.perf_counter() - t0
    assert max(diffs) <= 5e-4
    assert elapsed < 300
    _announce("strong-coupling asymptote",
              f"sup |crossover - piecewise| = {max(diffs):.2e} at gamma=100 in {elapsed:.1f}s")


# --- heavy Monte Carlo fixtures ---------------------------------------------


@pytest.fixture(scope="session")
def sweep_runs(cache_root):
    cfg = build_presets()["panel-d"]
    out1 = os.path.join(str(cache_root), "panel-d-w1")
    out4 = os.path.join(str(cache_root), "panel-d-w4")
    table1 = harness.run_sweep(cfg, out_dir=out1, workers=1)
    table4 = harness.run_sweep(cfg, out_dir=out4, workers=4)
    return cfg, out1, out4, table1, table4


def _overlay_config(gamma, name):
    return ExperimentConfig(
        spec=EnsembleSpec.with_gamma("U", 999, gamma), name=name,
        tau_points=50, n_samples=2000, master_seed=SEED,
        theory_formulas=("crossover",))


@pytest.fixture(scope="session")
def crossover_overlays(cache_root):
    """Bath size 999 runs for the finite-size-envelope companion check."""
    runs = {}
    for gamma, tag in ((46.0, "a"), (0.46, "b"), (0.022, "c")):
        cfg = _overlay_config(gamma, f"acc-panel-{tag}")
        out = os.path.join(str(cache_root), f"acc-panel-{tag}")
        mc = harness.run_simulate(cfg, out_dir=out, workers=2)
        th = harness.run_theory(cfg, out_dir=out)
        runs[gamma] = (cfg, mc["curve"], th["crossover"])
    return runs


@pytest.fixture(scope="session")
def desk_scale_overlays(cache_root):
    """The stock desk scale (dim 400, 2000 samples) on 50 grid points."""
    presets = build_presets()
    runs = {}
    for gamma, name in ((46.0, "panel-a"), (0.46, "panel-b"), (0.022, "panel-c")):
        cfg = replace(presets[name], tau_points=50, theory_formulas=("crossover",))
        out = os.path.join(str(cache_root), f"desk-{name}")
        mc = harness.run_simulate(cfg, out_dir=out, workers=2)
        th = harness.run_theory(cfg, out_dir=out)
        runs[gamma] = (cfg, mc["curve"], th["crossover"])
    return runs


@pytest.fixture(scope="session")
def ratio_runs(cache_root):
    cfg = build_presets()["panel-e"]
    out = os.path.join(str(cache_root), "panel-e")
    written = harness.run_simulate(cfg, out_dir=out, workers=2)
    return {cls: io.read_survival_csv(path) for cls, path in written.items()}


@pytest.fixture(scope="session")
def profile_overlays(cache_root):
    runs = {}
    for cls in ("U", "O", "S"):
        cfg = ExperimentConfig(
            spec=EnsembleSpec.with_gamma(cls, 999, 46.0), name=f"acc-profile-{cls}",
            tau_points=200, n_samples=2000, master_seed=SEED,
            classes=(cls,), theory_formulas=("class_profile",))
        out = os.path.join(str(cache_root), f"acc-profile-{cls}")
        mc = harness.run_simulate(cfg, out_dir=out, workers=2)
        th = harness.run_theory(cfg, out_dir=out)
        runs[cls] = (mc[cls], th[f"class_profile_{cls}"])
    return runs


# --- Monte Carlo criteria ---------------------------------------------------


def test_sweep_reproduces_stationary_crossover(sweep_runs):
    """Criterion as stated; fails at the two strongest couplings by design.

    The comparator is the bath-size -> infinity stationary formula, while
    the Monte Carlo at the pinned bath size 399 carries a real plateau shift
    of ~0.5*gamma/n (+3% at gamma=24.6, +6.5% at gamma=50); the standard
    error of the windowed mean is 0.5-0.6%, so those two points sit at
    z ~ 5 and 10 no matter how the statistics are improved.  All weaker
    couplings pass once the stationary window rescales with the coupling
    (see stationary_window).
    """
    _, _, _, table, _ = sweep_runs
    assert len(table) == 12
    outside = []
    for row in table:
        z = abs(row["p_late"] - row["p_residence"]) / row["p_late_stderr"]
        if z > 3.0:
            outside.append((round(row["gamma"], 3), round(z, 2)))
    zs = [abs(r["p_late"] - r["p_residence"]) / r["p_late_stderr"] for r in table]
    assert len(outside) <= 1, (
        f"{len(outside)}/12 couplings outside 3 sigma of the infinite-bath formula "
        f"(gamma, z): {outside}; the strong-coupling excesses are the finite-bath "
        f"plateau shift ~0.5*gamma/399")
    _announce("stationary sweep vs closed form",
              f"{len(outside)}/12 gammas outside 3 combined sigma (max z = {max(zs):.2f})")


def test_survival_curves_match_crossover_formula(desk_scale_overlays):
    """Criterion as stated; expected to fail (see the decisions ledger).

    The z statistic divides physical finite-bath corrections that the
    infinite-bath formula cannot contain (short-time non-universality,
    band-edge ringing, finite-bandwidth decay corrections, the ~gamma/n
    plateau shift) by a standard error that shrinks with sample count, so at
    2000 samples the bias dominates and no practical bath size restores the
    stated 2%/3-sigma discipline.  The companion test below quantifies the
    agreement that does hold.
    """
    failures = []
    for gamma, (cfg, mc_path, th_path) in desk_scale_overlays.items():
        report = harness.run_compare(
            mc_path, th_path,
            tolerances={"z_threshold": 3.0, "max_z_fail_fraction": 0.02})
        if not report.checks["z_fraction"]:
            failures.append(
                f"gamma={gamma}: {report.frac_z_exceeding:.1%} of {report.n_used} points "
                f"exceed |z|=3 (max |z| = {report.max_abs_z:.1f})")
    assert not failures, (
        "finite-bath corrections dominate the Monte Carlo standard error at desk scale: "
        + "; ".join(failures))
    _announce("survival curves vs crossover formula (strict desk scale)", "within 2%/3-sigma")


def test_survival_curves_finite_size_envelope(crossover_overlays):
    """Companion check: 2% finite-size envelope plus 3 sigma at bath size 999.

    Restricted to t*lam >= 30 where the short-time corrections have decayed;
    the 2% allowance covers the measured ~0.44*gamma/n plateau shift and the
    residual 1/(lam*t) decay correction.
    """
    for gamma, (cfg, mc_path, th_path) in crossover_overlays.items():
        mc = io.read_survival_csv(mc_path)
        th = io.read_theory_csv(th_path)
        assert np.allclose(mc.tau, th.tau)
        window = mc.tau >= UNIVERSAL_T_LAM / (2 * cfg.spec.n)
        bound = 0.02 * th.values[window] + 3.0 * mc.stderr[window]
        excess = np.abs(mc.mean[window] - th.values[window]) - bound
        worst = float(excess.max())
        assert worst <= 0, (
            f"gamma={gamma}: curve leaves the finite-size envelope by {worst:.2e} "
            f"at tau={mc.tau[window][int(np.argmax(excess))]:.3f}")
        _announce(f"finite-size envelope (gamma={gamma})",
                  f"{int(window.sum())} points within 2% + 3 sigma of the crossover formula")


def test_universal_plateau_offset_ratios(ratio_runs):
    expected = {"U": (2.0, 0.2), "O": (1.5, 0.15), "S": (3.0, 0.4)}
    for cls, curve in ratio_runs.items():
        target, width = expected[cls]
        stats = plateau_stats(curve)
        assert abs(stats["ratio"] - target) <= width, (cls, stats)
        _announce(f"universal ratio class {cls}",
                  f"P_pl/P_off = {stats['ratio']:.3f} +- {stats['ratio_err']:.3f} "
                  f"(target {target} +- {width})")


def test_class_profiles_overlay(profile_overlays):
    for cls, (mc_path, th_path) in profile_overlays.items():
        exclude = [(0.0, 0.2), (5.0, 1e9)]
        if cls == "S":
            exclude.append((0.9, 1.1))
        report = harness.run_compare(
            mc_path, th_path,
            tolerances={"z_threshold": 3.0, "max_z_fail_fraction": 0.05,
                        "exclude_tau": exclude})
        assert report.checks["z_fraction"], (
            f"class {cls}: {report.frac_z_exceeding:.1%} of {report.n_used} points exceed "
            f"|z|=3 (max |z| = {report.max_abs_z:.2f}, flagged {report.flagged_tau})")
        _announce(f"class-profile overlay {cls}",
                  f"{report.frac_z_exceeding:.1%} of {report.n_used} points over |z|=3")


def test_plateau_estimator_matches_inverse_gamma(cache_root):
    spec = EnsembleSpec.with_gamma("U", 399, 46.0)
    vals = [plateau_estimate(decompose(sample_realization(spec, SEED, i)))
            for i in range(400)]
    mean = float(np.mean(vals))
    target = 1.0 / 46.0
    assert abs(mean - target) / target <= 0.15
    _announce("plateau estimator",
              f"mean sum of |c|^4 = {mean:.5f} vs 1/gamma = {target:.5f} "
              f"({(mean - target) / target:+.1%})")


def test_physics_invariants_per_realization():
    checked = 0
    for cls in ("U", "O", "S"):
        for bath in ("rmt", "poisson"):
            spec = EnsembleSpec(cls=cls, n=60, lam=1.0, g=0.1, bath=bath)
            for idx in range(4):
                r = sample_realization(spec, SEED + idx, idx)
                a = r.matrix()
                energies, vecs = np.linalg.eigh(a)
                resid = a @ vecs - vecs * energies
                assert np.sqrt((np.abs(resid) ** 2).sum(axis=0)).max() <= 1e-8 * spec.lam
                ov = decompose(r)
                assert abs(float(np.abs(ov.overlaps).dot(np.abs(ov.overlaps))) - 1.0) <= 1e-10
                assert survival(ov, [0.0])[0] == 1.0
                checked += 1
    # small-N matrix-exponential oracle
    for cls, n in (("U", 7), ("O", 8), ("S", 3)):
        spec = EnsembleSpec(cls=cls, n=n, g=0.5)
        r = sample_realization(spec, SEED, 0)
        ov = decompose(r)
        for t in (0.4, 2.2, 9.0):
            exact = abs(sla.expm(-1j * r.matrix() * t)[0, 0]) ** 2
            assert survival(ov, [t])[0] == pytest.approx(exact, abs=1e-8)
    _announce("physics invariants",
              f"{checked} realizations: P(0)==1, unit overlap norm, residuals <= 1e-8*lam; "
              "small-N survival matches expm oracle to 1e-8")


def test_semicircle_band_center_density():
    spec = EnsembleSpec(cls="U", n=1000)
    count = 0
    for i in range(100):
        w = np.linalg.eigvalsh(sample_dot(spec, substream(SEED, i)))
        count += np.sum(np.abs(w) < 0.1 * spec.lam)
    density = count / 100 / (0.2 * spec.lam)
    target = spec.n / (np.pi * spec.lam)
    assert abs(density - target) / target <= 0.05
    _announce("semicircle density",
              f"band-center density {density:.1f} vs n/(pi*lam) = {target:.1f} "
              f"({(density - target) / target:+.2%})")


def test_poisson_bath_dip_and_plateau(cache_root):
    cfg = build_presets()["poisson"]
    out = os.path.join(str(cache_root), "poisson")
    written = harness.run_simulate(cfg, out_dir=out, workers=2)
    curve = io.read_survival_csv(written["curve"])
    stats = plateau_stats(curve)
    assert stats["p_off"] < stats["p_pl"], "no dip-then-recovery structure"
    assert abs(stats["ratio"] - 2.0) <= 0.3, stats
    _announce("poisson-bath robustness",
              f"P_pl/P_off = {stats['ratio']:.3f} +- {stats['ratio_err']:.3f} (target 2 +- 0.3)")


def test_worker_count_determinism(sweep_runs):
    _, out1, out4, _, _ = sweep_runs
    names = sorted(p.name for p in pathlib.Path(out1).glob("*.csv"))
    assert names, "no CSV artifacts found"
    for name in names:
        a = os.path.join(out1, name)
        b = os.path.join(out4, name)
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read(), f"{name} differs between 1 and 4 workers"
    _announce("worker-count determinism",
              f"{len(names)} CSV files byte-identical between 1 and 4 workers")
