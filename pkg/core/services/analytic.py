import logging
import math
from dataclasses import dataclass

import numpy as np

from core.services.combinatorics import (
    catalan,
    catalan_generating,
    log_catalan,
    log_pre_dyck_count,
    pre_dyck_count,
    truncated_series,
    wald_extension,
)
from core.services.params import (
    INFINITE,
    STEALTH,
    STUBBORN,
    DomainError,
    check_depth,
    check_level,
    check_strategy,
    is_infinite,
)

logger = logging.getLogger(__name__)

# below this gamma the closed form for the equal-fork ratio cancels badly
SERIES_GAMMA = 1e-6

# largest n + m for which integer path counts are used directly
EXACT_COUNT_LIMIT = 60


@dataclass(frozen=True)
class RevenueReport:
    ratio: float
    successful_blocks: float
    unsuccessful_adversarial_blocks: float
    total_unsuccessful_blocks: float

    @property
    def numerator(self):
        return self.successful_blocks + self.unsuccessful_adversarial_blocks

    @property
    def denominator(self):
        return self.successful_blocks + self.total_unsuccessful_blocks


@dataclass(frozen=True)
class EventProbs:
    double_spending: float
    move_funds: float
    service: float


@dataclass(frozen=True)
class CombinedRevenueParams:
    k: int
    reward_r: float

    def __post_init__(self):
        check_depth(self.k)
        if self.reward_r < 0:
            raise DomainError(f"reward must be >= 0 (got {self.reward_r})")


@dataclass(frozen=True)
class CombinedTerms:
    """Combined ratio as (base_numerator + R * slope) / denominator."""

    base_numerator: float
    slope: float
    denominator: float
    plain_ratio: float

    def ratio(self, reward_r):
        return (self.base_numerator + reward_r * self.slope) / self.denominator


def _success_terms(params, level):
    m = np.arange(level)
    logs = log_pre_dyck_count(level - 1, m) + level * math.log(params.alpha) + m * math.log(params.beta)
    return m, np.exp(logs)


def _log_unsuccess(params, n):
    n = np.asarray(n, dtype=float)
    return log_catalan(n) + n * math.log(params.alpha) + (n + 1) * math.log(params.beta)


def _unsuccess_terms(params, count):
    n = np.arange(count)
    return n, np.exp(_log_unsuccess(params, n))


def _prefix_stay(gamma, exponents):
    return np.power(1.0 - gamma, exponents)


def success_prob(params, l, m):
    if l < 1 or m < 0 or m >= l:
        raise DomainError(f"success_prob needs 0 <= m < l (got l={l}, m={m})")
    if l + m <= EXACT_COUNT_LIMIT:
        return pre_dyck_count(l - 1, m) * params.alpha**l * params.beta**m
    logs = log_pre_dyck_count(l - 1, m) + l * math.log(params.alpha) + m * math.log(params.beta)
    return float(np.exp(logs))


def unsuccess_prob(params, n):
    if n < 0:
        raise DomainError(f"n must be >= 0 (got {n})")
    if 2 * n <= EXACT_COUNT_LIMIT:
        return catalan(n) * params.alpha**n * params.beta ** (n + 1)
    return float(np.exp(_log_unsuccess(params, n)))


def unsuccess_prefix_prob(params, n, i):
    """Unsuccessful cycle ending at H = n+1 whose H-chain carries i adversarial prefix blocks."""
    if i < 0 or i > n:
        raise DomainError(f"unsuccess_prefix_prob needs 0 <= i <= n (got n={n}, i={i})")
    switched = params.gamma if i != 0 else 1.0
    return unsuccess_prob(params, n) * (1.0 - params.gamma) ** (n - i) * switched


def expected_prefix(n, gamma):
    """Mean adversarial prefix length of an unsuccessful cycle ending at H = n+1.

    Each of the n matched honest arrivals moves the prefix to its height with
    probability gamma, so E_n = (1 - gamma) E_{n-1} + gamma n with E_0 = 0.
    """
    n = np.asarray(n, dtype=float)
    if gamma == 0:
        value = np.zeros_like(n)
    elif gamma == 1:
        value = n
    else:
        # (1 - (1-gamma)^n) / gamma without cancellation for small gamma
        reach = -np.expm1(n * math.log1p(-gamma)) / gamma
        value = n - (1.0 - gamma) * reach
    return float(value) if value.ndim == 0 else value


def _successful_blocks(params, level):
    m, probs = _success_terms(params, level)
    extension = (level - m - 1) * wald_extension(1, params.alpha)
    return float(np.sum(probs * (level + extension)))


def _report(successful, adversarial, total):
    ratio = (successful + adversarial) / (successful + total)
    return RevenueReport(
        ratio=ratio,
        successful_blocks=successful,
        unsuccessful_adversarial_blocks=adversarial,
        total_unsuccessful_blocks=total,
    )


def _honest_report(params):
    return RevenueReport(
        ratio=params.alpha,
        successful_blocks=params.alpha,
        unsuccessful_adversarial_blocks=0.0,
        total_unsuccessful_blocks=params.beta,
    )


def _equal_fork_total(params):
    # sum over n of (n+1) P_u(n)
    return params.beta / (1.0 - 2.0 * params.alpha)


def _equal_fork_report(params):
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    if gamma == 0:
        return _report(0.0, 0.0, _equal_fork_total(params))
    if gamma < SERIES_GAMMA:

        def log_adversarial(n):
            with np.errstate(divide="ignore"):
                return _log_unsuccess(params, n) + np.log(expected_prefix(n, gamma))

        def log_total(n):
            return _log_unsuccess(params, n) + np.log(n + 1.0)

        adversarial = truncated_series(log_adversarial)
        total = truncated_series(log_total)
        logger.debug("equal-fork ratio by series alpha=%s gamma=%s", alpha, gamma)
        return _report(0.0, adversarial, total)
    shrink = 1.0 - beta * catalan_generating((1.0 - gamma) * alpha * beta)
    ratio = alpha / beta - ((1.0 - 2.0 * alpha) * (1.0 - gamma) / (beta * gamma)) * shrink
    total = _equal_fork_total(params)
    return RevenueReport(
        ratio=ratio,
        successful_blocks=0.0,
        unsuccessful_adversarial_blocks=ratio * total,
        total_unsuccessful_blocks=total,
    )


def revenue_stubborn(params, level):
    level = check_level(level)
    if level == 1:
        return _honest_report(params)
    if is_infinite(level):
        return _equal_fork_report(params)
    successful = _successful_blocks(params, level)
    n, probs = _unsuccess_terms(params, level)
    adversarial = float(np.sum(probs * expected_prefix(n, params.gamma)))
    total = float(np.sum(probs * (n + 1)))
    return _report(successful, adversarial, total)


def revenue_stealth(params, level):
    level = check_level(level)
    if level == 1:
        return _honest_report(params)
    if is_infinite(level):
        return _report(0.0, 0.0, _equal_fork_total(params))
    successful = _successful_blocks(params, level)
    n, probs = _unsuccess_terms(params, level)
    # only the match at A = H = S-1 can put adversarial blocks in the prefix
    adversarial = float(probs[-1]) * params.gamma * (level - 1)
    total = float(np.sum(probs * (n + 1)))
    return _report(successful, adversarial, total)


def revenue(params, strategy, level):
    if check_strategy(strategy) == STEALTH:
        return revenue_stealth(params, level)
    return revenue_stubborn(params, level)


def selfish_ratio(params):
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    numerator = alpha * beta**2 * (4 * alpha + gamma * (1 - 2 * alpha)) - alpha**3
    return numerator / (1 - alpha * (1 + (2 - alpha) * alpha))


def normalized_ratio(ratio, params):
    if isinstance(ratio, RevenueReport):
        ratio = ratio.ratio
    return ratio / params.alpha


def double_spend_probs_stubborn(params, k):
    k = check_depth(k)
    gamma = params.gamma
    m, success = _success_terms(params, k + 1)
    # a prefix switch on the honest block after height k no longer saves B
    exponents = m - (m == k).astype(int)
    double_spending = float(np.sum(success * _prefix_stay(gamma, exponents)))
    double_spending += unsuccess_prob(params, k) * (1.0 - gamma) ** (k - 1) * gamma
    n, unsuccess = _unsuccess_terms(params, k + 1)
    service = float(np.sum(unsuccess * _prefix_stay(gamma, n)))
    move_funds = max(0.0, 1.0 - double_spending - service)
    return EventProbs(double_spending=double_spending, move_funds=move_funds, service=service)


def double_spend_probs_stealth(params, k):
    k = check_depth(k)
    _, success = _success_terms(params, k + 1)
    double_spending = float(np.sum(success)) + unsuccess_prob(params, k) * params.gamma
    return EventProbs(double_spending=double_spending, move_funds=0.0, service=1.0 - double_spending)


def double_spend_probs(params, strategy, k):
    if check_strategy(strategy) == STEALTH:
        return double_spend_probs_stealth(params, k)
    return double_spend_probs_stubborn(params, k)


def combined_terms(params, k, strategy):
    """Affine pieces of the level-(k+1) ratio with R per replaced confirmed block."""
    k = check_depth(k)
    gamma = params.gamma
    m, success = _success_terms(params, k + 1)
    replaced = 1.0 + (k - m) * wald_extension(1, params.alpha)
    if check_strategy(strategy) == STUBBORN:
        report = revenue_stubborn(params, k + 1)
        stay = _prefix_stay(gamma, m - (m == k).astype(int))
        slope = float(np.sum(success * stay * replaced))
        slope += unsuccess_prob(params, k) * (1.0 - gamma) ** (k - 1) * gamma
    else:
        report = revenue_stealth(params, k + 1)
        slope = float(np.sum(success * replaced)) + unsuccess_prob(params, k) * gamma
    return CombinedTerms(
        base_numerator=report.numerator,
        slope=slope,
        denominator=report.denominator,
        plain_ratio=report.ratio,
    )


def combined_revenue_stubborn(params, cfg):
    return combined_terms(params, cfg.k, STUBBORN).ratio(cfg.reward_r)


def combined_revenue_stealth(params, cfg):
    return combined_terms(params, cfg.k, STEALTH).ratio(cfg.reward_r)


def breakeven_reward(params, k, strategy):
    terms = combined_terms(params, k, strategy)
    if terms.plain_ratio >= params.alpha:
        return 0.0
    if terms.slope <= 0:
        return INFINITE
    return max(0.0, (params.alpha * terms.denominator - terms.base_numerator) / terms.slope)


def service_profitability(params, k, v, f, strategy):
    """Whether a level-(k+1) attack with one attacked payment per cycle beats honest mining."""
    if v < 0:
        raise DomainError(f"service value must be >= 0 (got {v})")
    if f < v:
        raise DomainError(f"fee must be >= service value (got f={f}, v={v})")
    k = check_depth(k)
    if check_strategy(strategy) == STUBBORN:
        report = revenue_stubborn(params, k + 1)
        events = double_spend_probs_stubborn(params, k)
        gain = report.numerator + v * events.double_spending
        honest_share = params.alpha * report.denominator + (f - v) * events.service
    else:
        report = revenue_stealth(params, k + 1)
        events = double_spend_probs_stealth(params, k)
        gain = report.numerator + v
        honest_share = params.alpha * report.denominator + f * events.service
    return gain >= honest_share
