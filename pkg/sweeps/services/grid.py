import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool

from core.services.analytic import (
    breakeven_reward,
    combined_terms,
    double_spend_probs,
    double_spend_probs_stealth,
    double_spend_probs_stubborn,
    normalized_ratio,
    revenue,
    revenue_stealth,
    revenue_stubborn,
)
from core.services.optimize import SCAN_CAP, max_profitable_l, max_profitable_s, optimal_l, optimal_s
from core.services.params import STUBBORN, DomainError, ModelParams

logger = logging.getLogger(__name__)

# metric -> fixed parameters it needs
REQUIRED_FIXED = {
    "rho_L": ("level",),
    "sigma_S": ("level",),
    "L_star": (),
    "S_star": (),
    "L_bar": (),
    "S_bar": (),
    "ds_prob_stubborn": ("k",),
    "ds_prob_stealth": ("k",),
    "move_funds": ("k",),
    "service": ("k", "strategy"),
    "r_star": ("k", "strategy"),
    "normalized_ratio": ("level", "strategy"),
}
METRICS = tuple(REQUIRED_FIXED)

AUX_COLUMNS = {
    "rho_L": ("numerator", "denominator"),
    "sigma_S": ("numerator", "denominator"),
    "L_star": ("ratio", "method", "iterations"),
    "S_star": ("ratio", "method", "iterations"),
    "r_star": ("plain_ratio", "slope"),
    "normalized_ratio": ("ratio",),
}


@dataclass(frozen=True)
class SweepSpec:
    alpha_range: tuple
    gamma_range: tuple
    metric: str
    fixed: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ReportRow:
    alpha: float
    gamma: float
    value: object
    aux: dict = field(default_factory=dict)


def expand_range(start, stop, step):
    if step <= 0:
        raise DomainError(f"step must be > 0 (got {step})")
    if stop < start:
        raise DomainError(f"stop must be >= start (got start={start}, stop={stop})")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def grid_points(spec):
    alphas = expand_range(*spec.alpha_range)
    gammas = expand_range(*spec.gamma_range)
    return [(alpha, gamma) for alpha in alphas for gamma in gammas]


def _ratio_row(report):
    return report.ratio, {"numerator": report.numerator, "denominator": report.denominator}


def _optimum_row(best):
    return best.best_level, {"ratio": best.best_ratio, "method": best.method, "iterations": best.iterations}


def evaluate_metric(metric, params, fixed, cap=SCAN_CAP):
    """Value and aux fields of one sweep metric at a single (alpha, gamma)."""
    if metric not in REQUIRED_FIXED:
        raise DomainError(f"metric must be one of {', '.join(METRICS)} (got {metric!r})")
    missing = [name for name in REQUIRED_FIXED[metric] if fixed.get(name) is None]
    if missing:
        raise DomainError(f"metric {metric} needs {', '.join(missing)}")
    level, k = fixed.get("level"), fixed.get("k")
    strategy = fixed.get("strategy") or STUBBORN

    if metric == "rho_L":
        return _ratio_row(revenue_stubborn(params, level))
    if metric == "sigma_S":
        return _ratio_row(revenue_stealth(params, level))
    if metric == "L_star":
        return _optimum_row(optimal_l(params, cap))
    if metric == "S_star":
        return _optimum_row(optimal_s(params, cap))
    if metric == "L_bar":
        return max_profitable_l(params, cap), {}
    if metric == "S_bar":
        return max_profitable_s(params, cap), {}
    if metric == "ds_prob_stubborn":
        return double_spend_probs_stubborn(params, k).double_spending, {}
    if metric == "ds_prob_stealth":
        return double_spend_probs_stealth(params, k).double_spending, {}
    if metric == "move_funds":
        return double_spend_probs(params, strategy, k).move_funds, {}
    if metric == "service":
        return double_spend_probs(params, strategy, k).service, {}
    if metric == "r_star":
        terms = combined_terms(params, k, strategy)
        return breakeven_reward(params, k, strategy), {"plain_ratio": terms.plain_ratio, "slope": terms.slope}
    report = revenue(params, strategy, level)
    return normalized_ratio(report, params), {"ratio": report.ratio}


def evaluate_cell(task):
    metric, alpha, gamma, fixed, cap = task
    value, aux = evaluate_metric(metric, ModelParams(alpha, gamma), dict(fixed), cap)
    return ReportRow(alpha=alpha, gamma=gamma, value=value, aux=aux)


def run_sweep(spec, cap=SCAN_CAP, workers=1):
    points = grid_points(spec)
    for alpha, gamma in points:
        ModelParams(alpha, gamma)
    fixed = tuple(sorted(spec.fixed.items()))
    tasks = [(spec.metric, alpha, gamma, fixed, cap) for alpha, gamma in points]
    logger.info("sweep metric=%s cells=%s workers=%s", spec.metric, len(tasks), workers)
    if workers > 1:
        with Pool(processes=workers) as pool:
            rows = pool.map(evaluate_cell, tasks)
    else:
        rows = [evaluate_cell(task) for task in tasks]
    return sorted(rows, key=lambda row: (row.alpha, row.gamma))
