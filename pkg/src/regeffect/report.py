"""Effect-size report assembly and serialisation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .effect import EffectSizeEstimate, effect_label, estimate
from .formula import ModelSpec, render_formula
from .intervals import ConfidenceInterval, inversion_tau_bounds, normal_quantile
from .linalg import DesignMatrix, RegressionFit
from .nct import CFactorMethod, c_factor

SIGNIFICANT_DIGITS = 10


@dataclass(frozen=True)
class EffectSizeReport:
    formula: str
    alpha: float
    estimate: EffectSizeEstimate
    inversion_ci: ConfidenceInterval
    normal_ci: ConfidenceInterval
    tau_lower: float
    tau_upper: float
    z: float
    fit: RegressionFit
    design: DesignMatrix
    c_factors: dict[str, float]
    label: str

    def to_dict(self) -> dict:
        est = self.estimate
        fit = self.fit
        return _rounded({
            "formula": self.formula,
            "alpha": self.alpha,
            "d_hat": est.d_hat,
            "d_u": est.d_u,
            "se_d_u": est.se_d_u,
            "tau_hat": est.tau_hat,
            "t_statistic": est.tau_hat,
            "v1_squared": est.v1_squared,
            "m": est.m,
            "f_squared": est.f_squared,
            "c_m": est.c_m,
            "label": self.label,
            "inversion_ci": {
                "lower": self.inversion_ci.lower,
                "upper": self.inversion_ci.upper,
                "level": self.inversion_ci.level,
                "method": "inversion",
                "tau_lower": self.tau_lower,
                "tau_upper": self.tau_upper,
            },
            "normal_ci": {
                "lower": self.normal_ci.lower,
                "upper": self.normal_ci.upper,
                "level": self.normal_ci.level,
                "method": "normal",
                "z": self.z,
            },
            "fit": {
                "n": fit.n,
                "n0": fit.n0,
                "n1": fit.n1,
                "k": fit.k,
                "m": fit.m,
                "beta_hat": dict(zip(fit.column_names, map(float, fit.beta_hat))),
                "sigma_hat": fit.sigma_hat,
                "sigma2_hat": fit.sigma2_hat,
                "rows_dropped": self.design.rows_dropped,
            },
            "level_mapping": {
                "group": self.design.column_names[self.design.group_column_index],
                "reference": self.design.reference_level,
                "other": self.design.other_level,
                "sign": "other minus reference",
            },
            "c_factors": self.c_factors,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    def to_text(self) -> str:
        d = self.to_dict()
        mp = d["level_mapping"]
        inv, nrm = d["inversion_ci"], d["normal_ci"]
        level = f"{100 * (1 - self.alpha):g}%"
        rows = [
            ("formula", d["formula"]),
            ("group coding", f"{mp['group']}: {mp['reference']} -> 0, {mp['other']} -> 1"),
            ("n (n0, n1)", f"{d['fit']['n']} ({d['fit']['n0']}, {d['fit']['n1']})"),
            ("covariates k", d["fit"]["k"]),
            ("degrees of freedom m", d["m"]),
            ("beta_1", d["fit"]["beta_hat"][mp["group"]]),
            ("sigma_hat", d["fit"]["sigma_hat"]),
            ("v1^2", d["v1_squared"]),
            ("d_hat", d["d_hat"]),
            ("c(m) exact", d["c_m"]),
            ("d_u (bias-corrected)", d["d_u"]),
            ("se(d_u)", d["se_d_u"]),
            ("tau_hat", d["tau_hat"]),
            (f"{level} CI inversion", f"[{inv['lower']}, {inv['upper']}]"),
            ("  tau bounds", f"[{inv['tau_lower']}, {inv['tau_upper']}]"),
            (f"{level} CI normal", f"[{nrm['lower']}, {nrm['upper']}]"),
            ("  z", nrm["z"]),
            ("f^2", d["f_squared"]),
            ("effect", d["label"]),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def _round(x: float):
    if not math.isfinite(x):
        return None
    return float(format(x, f".{SIGNIFICANT_DIGITS}g"))


def _rounded(obj):
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, bool) or isinstance(obj, (int, str)) or obj is None:
        return obj
    return _round(float(obj))


def analyze_fit(design: DesignMatrix, fit: RegressionFit, spec: ModelSpec, alpha: float = 0.05) -> EffectSizeReport:
    est = estimate(fit)
    t1, t2 = inversion_tau_bounds(est.tau_hat, est.m, alpha)
    root = math.sqrt(est.v1_squared)
    z = normal_quantile(1.0 - alpha / 2.0)
    factors = {}
    for method in CFactorMethod:
        try:
            factors[method.value] = c_factor(est.m, method)
        except ArithmeticError:
            factors[method.value] = math.nan
    return EffectSizeReport(
        formula=render_formula(spec),
        alpha=alpha,
        estimate=est,
        inversion_ci=ConfidenceInterval(float(t1) * root, float(t2) * root, 1.0 - alpha, "inversion"),
        normal_ci=ConfidenceInterval(est.d_u - z * est.se_d_u, est.d_u + z * est.se_d_u, 1.0 - alpha, "normal"),
        tau_lower=float(t1),
        tau_upper=float(t2),
        z=z,
        fit=fit,
        design=design,
        c_factors=factors,
        label=effect_label(est.d_u),
    )


def simulation_json(report) -> str:
    return json.dumps(_rounded(report.to_dict()), indent=2, allow_nan=False)
