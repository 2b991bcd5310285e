import math
from dataclasses import dataclass
from fractions import Fraction

INFINITE = math.inf

STUBBORN = "stubborn"
STEALTH = "stealth"
STRATEGIES = (STUBBORN, STEALTH)


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Adversary hash fraction alpha and network influence gamma."""

    alpha: float
    gamma: float

    def __post_init__(self):
        if not 0 < self.alpha < 0.5:
            raise DomainError(f"alpha must satisfy 0 < alpha < 0.5 (got {self.alpha})")
        if not 0 <= self.gamma <= 1:
            raise DomainError(f"gamma must satisfy 0 <= gamma <= 1 (got {self.gamma})")

    @property
    def beta(self):
        return 1.0 - self.alpha


def is_infinite(level):
    return level == INFINITE


def check_level(level, minimum=1):
    if is_infinite(level):
        return level
    if isinstance(level, bool) or int(level) != level:
        raise DomainError(f"level must be an integer or inf (got {level!r})")
    level = int(level)
    if level < minimum:
        raise DomainError(f"level must be >= {minimum} (got {level})")
    return level


def check_strategy(strategy):
    if strategy not in STRATEGIES:
        raise DomainError(f"strategy must be one of {', '.join(STRATEGIES)} (got {strategy!r})")
    return strategy


def check_depth(k):
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"k must be an integer >= 1 (got {k!r})")
    return int(k)


def parse_level(text):
    value = str(text).strip().lower()
    if value in ("inf", "infinite", "∞"):
        return INFINITE
    try:
        return check_level(int(value))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"level must be an integer >= 1 or 'inf' (got {text!r})") from exc


def format_level(level):
    return "inf" if is_infinite(level) else str(int(level))


def parse_fraction(text):
    """Parse '0.35' or '1/3' into a float; slash rationals keep full precision."""
    try:
        return float(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a number: {text!r}") from exc
