"""Level-dot decay laboratory.

Monte Carlo sampling, exact diagonalization and analytic theory for the
survival probability of a single level coupled to a finite random-matrix
bath, from golden-rule exponential decay through form-factor recovery to the
discrete-spectrum plateau.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .ensembles import (
    EnsembleSpec,
    Realization,
    assemble,
    sample_coupling,
    sample_dot,
    sample_poisson_dot,
    sample_realization,
    substream,
)
from .errors import (
    AssemblyError,
    ComparisonError,
    ConfigError,
    LevelDotError,
    QuadratureError,
    RealizationError,
)
from .numerics import (
    QuadratureResult,
    bessel_i_scaled,
    erfc,
    erfc_scaled,
    integrate_1d,
    integrate_2d,
)
from .spectral import (
    OverlapSet,
    SffCurve,
    SurvivalCurve,
    average_survival,
    decompose,
    empirical_sff,
    plateau_estimate,
    survival,
)
from .theory import (
    CrossoverPoint,
    TheoryCurve,
    crossover_point,
    form_factor,
    golden_rule_rate,
    profile_offset,
    profile_plateau,
    residence_prob,
    residence_prob_quad,
    survival_class_profile,
    survival_crossover,
    survival_strong_coupling,
)
from .harness import (
    ComparisonReport,
    ExperimentConfig,
    build_presets,
    run_compare,
    run_simulate,
    run_sweep,
    run_theory,
)

__all__ = [
    "__version__",
    "BACKEND",
    # ensembles
    "EnsembleSpec", "Realization", "assemble", "sample_coupling", "sample_dot",
    "sample_poisson_dot", "sample_realization", "substream",
    # errors
    "AssemblyError", "ComparisonError", "ConfigError", "LevelDotError",
    "QuadratureError", "RealizationError",
    # numerics
    "QuadratureResult", "bessel_i_scaled", "erfc", "erfc_scaled",
    "integrate_1d", "integrate_2d",
    # spectral
    "OverlapSet", "SffCurve", "SurvivalCurve", "average_survival", "decompose",
    "empirical_sff", "plateau_estimate", "survival",
    # theory
    "CrossoverPoint", "TheoryCurve", "crossover_point", "form_factor",
    "golden_rule_rate", "profile_offset", "profile_plateau", "residence_prob",
    "residence_prob_quad", "survival_class_profile", "survival_crossover",
    "survival_strong_coupling",
    # harness
    "ComparisonReport", "ExperimentConfig", "build_presets", "run_compare",
    "run_simulate", "run_sweep", "run_theory",
]
