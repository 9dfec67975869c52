"""Cohen's d generalised to linear regression: estimation, exact bias
correction, standard error and non-central t confidence intervals."""

__version__ = "0.1.0"

from .data import Dataset, load_csv
from .effect import (
    EffectSizeEstimate,
    MomentPair,
    cohens_d,
    cohens_d_classic,
    cohens_d_from_t,
    dhat_moments,
    estimate,
    f_squared,
    hedges_g,
    se_hedges_g,
    tau_hat,
)
from .formula import ModelSpec, parse_formula, render_formula
from .intervals import ConfidenceInterval, inversion_ci, normal_ci
from .linalg import DesignMatrix, RegressionFit, build_design_matrix, ols_fit, v1_squared_two_group
from .nct import CFactorMethod, NctParams, c_factor, invert_noncentrality, nct_cdf, nct_mean, nct_sf, nct_variance
from .report import EffectSizeReport, analyze_fit
from .simulation import SimConfig, SimulationReport, run_simulation
