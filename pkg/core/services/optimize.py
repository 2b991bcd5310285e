import logging
import math
from dataclasses import dataclass

from core.services.analytic import revenue_stealth, revenue_stubborn
from core.services.params import INFINITE, STEALTH, DomainError, check_strategy, format_level

logger = logging.getLogger(__name__)

FIXED_POINT = "fixed_point"
SCAN_FALLBACK = "scan_fallback"

SCAN_CAP = 512
MAX_ITERATIONS = 10
SNAP_TOLERANCE = 1e-9
SCAN_TOLERANCE = 1e-12
MEMBERSHIP_STEP = 1e-6


class CapExceededError(RuntimeError):
    def __init__(self, message, level_reached=None, last_ratio=None, infinite_ratio=None):
        super().__init__(message)
        self.level_reached = level_reached
        self.last_ratio = last_ratio
        self.infinite_ratio = infinite_ratio


@dataclass(frozen=True)
class OptimizerResult:
    best_level: float
    best_ratio: float
    iterations: int
    method: str


@dataclass(frozen=True)
class NarrowDecision:
    u: float
    v: float


def _ratio_table(evaluate):
    values = {}

    def ratio_of(level):
        if level not in values:
            values[level] = evaluate(level).ratio
        return values[level]

    return ratio_of


def _stubborn_table(params):
    return _ratio_table(lambda level: revenue_stubborn(params, level))


def _stealth_table(params):
    return _ratio_table(lambda level: revenue_stealth(params, level))


def _check_cap(cap):
    if cap < 2:
        raise DomainError(f"cap must be >= 2 (got {cap})")
    return int(cap)


def _ceil_snapped(x):
    nearest = round(x)
    if abs(x - nearest) < SNAP_TOLERANCE:
        return int(nearest)
    return math.ceil(x)


def narrow_decision(params, ratio):
    u = 1.0 - params.gamma
    if u <= 0:
        raise DomainError("v is undefined for gamma = 1")
    v = (1.0 - params.gamma * (1.0 - ratio) / (1.0 - 2.0 * params.alpha)) / u
    return NarrowDecision(u=u, v=v)


def _stealth_margin(params, x, sigma):
    alpha, gamma = params.alpha, params.gamma
    spread = 1.0 - 2.0 * alpha
    value = 1.0 - spread * (x + 1.0 - gamma * x)
    if gamma:
        value -= gamma * spread / (alpha * params.beta) * (x * x - 1.0) / (2.0 * (2.0 * x - 1.0))
    return value - sigma


def stealth_level_bound(params, sigma):
    """sup of x where the stealth narrowing inequality still holds for ratio sigma.

    The left side decreases on x > 1/2, so the sup is the larger root of the
    quadratic obtained by clearing the 2(2x - 1) denominator. Returns None when
    the root fails the membership check.
    """
    alpha, gamma = params.alpha, params.gamma
    spread = 1.0 - 2.0 * alpha
    slack = 1.0 - sigma
    if gamma == 0:
        x = slack / spread - 1.0
    else:
        scale = gamma * spread / (alpha * params.beta)
        a = scale + 4.0 * spread * (1.0 - gamma)
        b = 2.0 * spread * (1.0 + gamma) - 4.0 * slack
        c = 2.0 * slack - scale - 2.0 * spread
        disc = max(0.0, b * b - 4.0 * a * c)
        x = (-b + math.sqrt(disc)) / (2.0 * a)
    inside = _stealth_margin(params, x, sigma) >= -SNAP_TOLERANCE
    beyond = _stealth_margin(params, x + MEMBERSHIP_STEP, sigma) <= SNAP_TOLERANCE
    if not (inside and beyond):
        logger.warning(
            "stealth bound failed membership check alpha=%s gamma=%s sigma=%.12g x=%.12g",
            alpha,
            gamma,
            sigma,
            x,
        )
        return None
    return x


def _scan(ratio_of, cap, infinite_ratio):
    level = 1
    best_level, best_ratio = 1, ratio_of(1)
    previous = best_ratio
    while level < cap:
        following = ratio_of(level + 1)
        if following < previous - SCAN_TOLERANCE:
            break
        level += 1
        if following >= best_ratio - SCAN_TOLERANCE:
            best_level, best_ratio = level, following
        previous = following
    else:
        if infinite_ratio >= best_ratio - SCAN_TOLERANCE:
            return INFINITE, infinite_ratio
        raise CapExceededError(
            f"no decrease found up to level {cap} and the infinite level is not the maximum "
            f"(ratio at cap {best_ratio:.12g}, infinite level {infinite_ratio:.12g})",
            level_reached=cap,
            last_ratio=previous,
            infinite_ratio=infinite_ratio,
        )
    return best_level, best_ratio


def scan_optimal_l(params, l_cap=SCAN_CAP, ratio_of=None):
    ratio_of = ratio_of or _stubborn_table(params)
    level, ratio = _scan(ratio_of, _check_cap(l_cap), ratio_of(INFINITE))
    return OptimizerResult(best_level=level, best_ratio=ratio, iterations=0, method=SCAN_FALLBACK)


def scan_optimal_s(params, s_cap=SCAN_CAP, ratio_of=None):
    ratio_of = ratio_of or _stealth_table(params)
    level, ratio = _scan(ratio_of, _check_cap(s_cap), ratio_of(INFINITE))
    return OptimizerResult(best_level=level, best_ratio=ratio, iterations=0, method=SCAN_FALLBACK)


def _certified(ratio_of, level):
    best = ratio_of(level)
    if level > 1 and ratio_of(level - 1) > best + SCAN_TOLERANCE:
        return False
    return ratio_of(level + 1) < best - SCAN_TOLERANCE and ratio_of(INFINITE) <= best + SCAN_TOLERANCE


def _largest_tied(ratio_of, level, cap):
    # ties go to the largest level, as in the scan
    while level < cap and ratio_of(level + 1) >= ratio_of(level) - SCAN_TOLERANCE:
        level += 1
    return level


def _seed(ratio_of, levels):
    best_level = levels[0]
    for level in levels[1:]:
        if ratio_of(level) >= ratio_of(best_level):
            best_level = level
    return best_level


def optimal_l(params, l_cap=SCAN_CAP):
    l_cap = _check_cap(l_cap)
    ratio_of = _stubborn_table(params)
    if params.gamma in (0.0, 1.0):
        logger.info("optimal_l scanning for degenerate gamma=%s alpha=%s", params.gamma, params.alpha)
        return scan_optimal_l(params, l_cap, ratio_of)

    log_u = math.log(1.0 - params.gamma)
    level = _seed(ratio_of, [1, 2, INFINITE])
    if narrow_decision(params, ratio_of(level)).v <= 0:
        return OptimizerResult(best_level=INFINITE, best_ratio=ratio_of(INFINITE), iterations=0, method=FIXED_POINT)

    iterations = 0
    while level > 1:
        iterations += 1
        v = narrow_decision(params, ratio_of(level)).v
        if iterations > MAX_ITERATIONS or v <= 0:
            logger.warning(
                "optimal_l fixed point did not settle alpha=%s gamma=%s level=%s iterations=%s",
                params.alpha,
                params.gamma,
                format_level(level),
                iterations,
            )
            return scan_optimal_l(params, l_cap, ratio_of)
        following = max(1, _ceil_snapped(math.log(v) / log_u))
        if following == level:
            break
        if following > l_cap:
            logger.warning("optimal_l iterate %s above cap %s, scanning", following, l_cap)
            return scan_optimal_l(params, l_cap, ratio_of)
        level = following

    level = _largest_tied(ratio_of, level, l_cap)
    if not _certified(ratio_of, level):
        logger.warning(
            "optimal_l certificate failed alpha=%s gamma=%s level=%s, scanning",
            params.alpha,
            params.gamma,
            level,
        )
        return scan_optimal_l(params, l_cap, ratio_of)
    return OptimizerResult(best_level=level, best_ratio=ratio_of(level), iterations=iterations, method=FIXED_POINT)


def optimal_s(params, s_cap=SCAN_CAP):
    s_cap = _check_cap(s_cap)
    ratio_of = _stealth_table(params)
    level = _seed(ratio_of, [1, 2])

    iterations = 0
    while level > 1:
        iterations += 1
        bound = stealth_level_bound(params, ratio_of(level))
        if iterations > MAX_ITERATIONS or bound is None:
            logger.warning(
                "optimal_s fixed point did not settle alpha=%s gamma=%s level=%s iterations=%s",
                params.alpha,
                params.gamma,
                level,
                iterations,
            )
            return scan_optimal_s(params, s_cap, ratio_of)
        following = max(1, _ceil_snapped(bound))
        if following == level:
            break
        if following > s_cap:
            return scan_optimal_s(params, s_cap, ratio_of)
        level = following

    level = _largest_tied(ratio_of, level, s_cap)
    if not _certified(ratio_of, level):
        logger.warning(
            "optimal_s certificate failed alpha=%s gamma=%s level=%s, scanning",
            params.alpha,
            params.gamma,
            level,
        )
        return scan_optimal_s(params, s_cap, ratio_of)
    return OptimizerResult(best_level=level, best_ratio=ratio_of(level), iterations=iterations, method=FIXED_POINT)


def _max_profitable(params, ratio_of, start, cap):
    level = start
    while level < cap:
        if ratio_of(level + 1) < params.alpha:
            return level
        level += 1
    raise CapExceededError(
        f"ratio still >= alpha at level {cap} although the infinite level is below alpha "
        f"(infinite level {ratio_of(INFINITE):.12g})",
        level_reached=cap,
        last_ratio=ratio_of(cap),
        infinite_ratio=ratio_of(INFINITE),
    )


def max_profitable_l(params, l_cap=SCAN_CAP):
    l_cap = _check_cap(l_cap)
    ratio_of = _stubborn_table(params)
    if ratio_of(INFINITE) >= params.alpha:
        return INFINITE
    best = optimal_l(params, l_cap)
    return _max_profitable(params, ratio_of, best.best_level, l_cap)


def max_profitable_s(params, s_cap=SCAN_CAP):
    s_cap = _check_cap(s_cap)
    ratio_of = _stealth_table(params)
    if ratio_of(INFINITE) >= params.alpha:
        return INFINITE
    best = optimal_s(params, s_cap)
    return _max_profitable(params, ratio_of, best.best_level, s_cap)


def optimal_level(params, strategy, cap=SCAN_CAP):
    if check_strategy(strategy) == STEALTH:
        return optimal_s(params, cap)
    return optimal_l(params, cap)


def max_profitable_level(params, strategy, cap=SCAN_CAP):
    if check_strategy(strategy) == STEALTH:
        return max_profitable_s(params, cap)
    return max_profitable_l(params, cap)


def safe_confirmation_depth(params, strategy, cap=SCAN_CAP):
    """Smallest k for which the level-(k+1) attack earns less than honest mining."""
    return max_profitable_level(params, strategy, cap)
