"""Analytic predictions for the level-decay crossover.

Everything is expressed in the dimensionless coupling ``gamma = g*n`` and the
dimensionless time ``tau = t / (2*pi*nu)`` with band-center level density
``nu = n/(pi*lam)``.  The centerpiece is :func:`survival_crossover`, the
two-coordinate quadrature representation of the ensemble-averaged survival
probability, valid for class U at any coupling; its stationary limit is the
closed-form :func:`residence_prob`, and for strong coupling it collapses to
the piecewise :func:`survival_strong_coupling`.  The other symmetry classes
enter through the form-factor profile :func:`survival_class_profile`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError
from .numerics import (
    QuadratureResult,
    bessel_i_scaled,
    erfc_scaled,
    integrate_1d,
    integrate_2d,
)

__all__ = [
    "CLASS_OFFSET_COEFF",
    "CLASS_RECOVERY_COEFF",
    "TheoryCurve",
    "CrossoverPoint",
    "golden_rule_rate",
    "golden_rule_rate_from_dos",
    "residence_prob",
    "residence_prob_quad",
    "crossover_point",
    "survival_crossover",
    "survival_strong_coupling",
    "form_factor",
    "survival_class_profile",
    "profile_plateau",
    "profile_offset",
    "evaluate_theory_curve",
]

# Semiclassical offset and form-factor recovery coefficients per class, in
# units of 1/(2*gamma).  They follow the small-time slope of the class form
# factor (2/beta = 1, 2, 1/2): the coherent correction to the classical
# return doubles it for class O (weak localization) and halves it for the
# class-S Kramers-doublet level (weak anti-localization; the survival is
# measured as the return to one doublet member).  The recovery coefficient
# is fixed by the plateau/offset ratios (2, 3/2, 3), i.e. b = (ratio-1)*a.
CLASS_OFFSET_COEFF = {"U": 1.0, "O": 2.0, "S": 0.5}
CLASS_RECOVERY_COEFF = {"U": 1.0, "O": 1.0, "S": 1.0}

CROSSOVER_REL_TOL = 1e-6
CROSSOVER_ABS_TOL = 1e-9


def golden_rule_rate(g: float, lam: float) -> float:
    """Golden-rule decay rate 2*g*lam of the level into the dot continuum."""
    return 2.0 * g * lam

def golden_rule_rate_from_dos(g: float, lam: float, n: int) -> float:
    """Same rate via 2*pi * <|W|^2> * nu, with nu the band-center density."""
    return 2.0 * np.pi * (g * lam * lam / n) * (n / (np.pi * lam))


def residence_prob(gamma):
    """Closed-form stationary probability to remain on the level.

    Evaluated through the scaled complementary error function, so there is no
    overflow up to gamma ~ 1e6; the result decays like 1/gamma at strong
    coupling and tends to 1 for a decoupled level.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if np.any(gamma < 0):
        raise ValueError("gamma must be nonnegative")
    root = np.sqrt(gamma)
    out = 1.0 - gamma - np.sqrt(np.pi) * root * (0.5 - gamma) * erfc_scaled(root)
    return out if out.ndim else float(out)


def residence_prob_quad(gamma: float, abs_tol: float = 1e-10) -> QuadratureResult:
    """Stationary residence probability as an explicit Laplace-type integral.

    Independent cross-check for :func:`residence_prob`: the integral of
    exp(-gamma*t) * (1 + t/4) / (1 + t)^{5/2} over [0, infinity), evaluated
    adaptively after the exact substitution u = (1 + t)^{-1/2}, which removes
    the algebraic t^{-3/2} tail:

        integral = int_0^1 du exp(-gamma*(1/u^2 - 1)) * (3*u^2 + 1) / 2
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")

    def f(u):
        u2 = u * u
        return np.exp(-gamma * (1.0 - u2) / u2) * (3.0 * u2 + 1.0) / 2.0

    return integrate_1d(f, 0.0, 1.0, rel_tol=1e-10, abs_tol=abs_tol)


@dataclass(frozen=True)
class CrossoverPoint:
    """Closed-form/quadrature pair for the stationary residence probability."""

    gamma: float
    p_res: float
    p_res_integral: float
    discrepancy: float


def crossover_point(gamma: float) -> CrossoverPoint:
    closed = float(residence_prob(gamma))
    quad = residence_prob_quad(gamma).value
    return CrossoverPoint(gamma=gamma, p_res=closed, p_res_integral=quad,
                          discrepancy=abs(closed - quad))


def _crossover_integrand(tau: float, gamma: float, vmax: float):
    """Integrand of the two-coordinate survival formula on the unit square.

    The radial coordinates are regularized by lam_b = 1 + u^2 (non-compact)
    and lam_f = 1 - v^2 (compact), which turns the integrable 1/(lam_b -
    lam_f) corner into the bounded factor 4uv/(u^2+v^2); the step-function
    support x = 2*tau - u^2 - v^2 > 0 is mapped exactly onto the unit square
    via v = vmax*q, u = sqrt(2*tau - v^2)*p.  Bessel growth is absorbed into
    scaled functions, leaving exp(-2*gamma*x/(lam_b+mu_b)) <= 1.
    """

    def f(p, q):
        v = vmax * q
        w2 = np.maximum(2.0 * tau - v * v, 0.0)
        u = np.sqrt(w2) * p
        uu = u * u
        lam_b = 1.0 + uu
        mu_b = u * np.sqrt(uu + 2.0)
        x = w2 * (1.0 - p * p)
        z = 2.0 * gamma * x * mu_b
        r2 = uu + v * v
        pref = np.divide(4.0 * u * v, r2, out=np.zeros_like(r2), where=r2 > 0)
        damp = np.exp(-2.0 * gamma * x / (lam_b + mu_b))
        bessel = lam_b * bessel_i_scaled(0, z) - mu_b * bessel_i_scaled(1, z)
        return pref * x * x * damp * bessel * (vmax * np.sqrt(w2))

    return f


def survival_crossover(tau: float, gamma: float, rel_tol: float = CROSSOVER_REL_TOL,
                       abs_tol: float = CROSSOVER_ABS_TOL, limit: int = 8192) -> QuadratureResult:
    """Ensemble-averaged survival probability P(tau) for class U, any coupling.

    Sum of the bare exponential decay exp(-4*gamma*tau) and a two-dimensional
    quadrature capturing coherent returns; exact value 1 at tau = 0 because
    the return term has empty support there.  Tolerances apply to the
    returned probability.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if tau == 0.0:
        return QuadratureResult(1.0, 0.0, 0)
    vmax = float(min(np.sqrt(2.0), np.sqrt(2.0 * tau)))
    pref = 2.0 * gamma * gamma
    term1 = float(np.exp(-4.0 * gamma * tau))
    try:
        part = integrate_2d(_crossover_integrand(tau, gamma, vmax), (0.0, 1.0, 0.0, 1.0),
                            rel_tol=rel_tol, abs_tol=abs_tol / pref, limit=limit)
    except QuadratureError as exc:
        best = exc.result
        raise QuadratureError(
            f"survival crossover at tau={tau}, gamma={gamma} did not converge",
            result=QuadratureResult(term1 + pref * best.value, pref * best.error,
                                    best.evaluations),
        ) from exc
    return QuadratureResult(term1 + pref * part.value, pref * part.error, part.evaluations)


def survival_strong_coupling(tau, gamma: float):
    """Piecewise strong-coupling profile: decay, offset ramp, then plateau.

    Continuous at tau = 1 where the ramp (1 + tau)/(2*gamma) meets the
    plateau 1/gamma.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    tau = np.asarray(tau, dtype=np.float64)
    ramp = np.where(tau < 1.0, (1.0 + tau) / (2.0 * gamma), 1.0 / gamma)
    out = np.exp(-4.0 * gamma * np.abs(tau)) + ramp
    return out if out.ndim else float(out)


def form_factor(cls: str, tau):
    """Unit-normalized connected spectral form factor of class U, O or S.

    Class S has a logarithmic divergence at tau = 1, reported as +inf.
    """
    tau = np.asarray(tau, dtype=np.float64)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    with np.errstate(divide="ignore"):
        if cls == "U":
            out = np.where(tau < 1.0, tau, 1.0)
        elif cls == "O":
            early = tau * (2.0 - np.log(2.0 * tau + 1.0))
            late_arg = np.where(tau > 0.5, (2.0 * tau + 1.0) / np.abs(2.0 * tau - 1.0), 1.0)
            late = 2.0 - tau * np.log(late_arg)
            out = np.where(tau < 1.0, early, late)
        elif cls == "S":
            out = np.where(tau < 2.0, 0.25 * tau * (2.0 - np.log(np.abs(1.0 - tau))), 1.0)
        else:
            raise ValueError(f"unknown symmetry class {cls!r}")
    return out if out.ndim else float(out)


def survival_class_profile(cls: str, tau, gamma: float):
    """Strong-coupling survival profile with the class form factor.

    exp(-4*gamma*tau) + [offset + recovery * K_cls(tau)] / (2*gamma); the
    late-time plateau is (offset + recovery)/(2*gamma) and the post-decay
    minimum sits near offset/(2*gamma), giving the universal plateau/offset
    ratios 2, 3/2 and 3 for classes U, O and S.
    """
    a = CLASS_OFFSET_COEFF[cls]
    b = CLASS_RECOVERY_COEFF[cls]
    tau = np.asarray(tau, dtype=np.float64)
    out = np.exp(-4.0 * gamma * tau) + (a + b * form_factor(cls, tau)) / (2.0 * gamma)
    return out if out.ndim else float(out)


def profile_plateau(cls: str, gamma: float) -> float:
    """Predicted late-time plateau of the class profile."""
    return (CLASS_OFFSET_COEFF[cls] + CLASS_RECOVERY_COEFF[cls]) / (2.0 * gamma)


def profile_offset(cls: str, gamma: float, tau_grid=None) -> float:
    """Post-decay minimum of the class profile (numerical, on a fine grid)."""
    if tau_grid is None:
        tau_grid = np.geomspace(1e-3, 10.0, 1999)
    vals = survival_class_profile(cls, tau_grid, gamma)
    return float(np.min(vals[np.isfinite(vals)]))


@dataclass
class TheoryCurve:
    """Analytic P(tau) evaluations with per-point error estimates."""

    tau: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    formula: str             # "crossover" | "strong_coupling" | "class_profile"
    gamma: float
    cls: str = "U"


def evaluate_theory_curve(formula: str, tau_grid, gamma: float, cls: str = "U",
                          rel_tol: float = CROSSOVER_REL_TOL,
                          abs_tol: float = CROSSOVER_ABS_TOL) -> TheoryCurve:
    """Evaluate one analytic formula on a tau grid.

    Crossover points that fail to converge keep their best estimate with the
    (large) error attached rather than aborting the whole curve.
    """
    tau_grid = np.atleast_1d(np.asarray(tau_grid, dtype=np.float64))
    if formula == "crossover":
        values = np.empty_like(tau_grid)
        errors = np.empty_like(tau_grid)
        for i, tau in enumerate(tau_grid):
            try:
                res = survival_crossover(float(tau), gamma, rel_tol=rel_tol, abs_tol=abs_tol)
            except QuadratureError as exc:
                res = exc.result
            values[i] = res.value
            errors[i] = res.error
    elif formula == "strong_coupling":
        values = survival_strong_coupling(tau_grid, gamma)
        errors = np.zeros_like(tau_grid)
    elif formula == "class_profile":
        values = survival_class_profile(cls, tau_grid, gamma)
        errors = np.zeros_like(tau_grid)
    else:
        raise ValueError(f"unknown theory formula {formula!r}")
    return TheoryCurve(tau=tau_grid, values=values, errors=errors,
                       formula=formula, gamma=gamma, cls=cls)
