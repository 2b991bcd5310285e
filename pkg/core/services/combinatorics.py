import logging
import math

import numpy as np
from django.conf import settings
from scipy.special import comb, gammaln

from core.services.params import DomainError

logger = logging.getLogger(__name__)

TAIL_TOLERANCE = 1e-16
TAIL_MAX_TERMS = 10_000


def catalan(n):
    if n < 0:
        raise DomainError(f"n must be >= 0 (got {n})")
    return int(comb(2 * n, n, exact=True)) // (n + 1)


def pre_dyck_count(n, m):
    """Strings of n X's and m Y's where no prefix holds more Y's than X's."""
    if n < 0 or m < 0:
        raise DomainError(f"n and m must be >= 0 (got n={n}, m={m})")
    if m > n:
        return 0
    return (n - m + 1) * int(comb(n + m + 1, n + 1, exact=True)) // (n + m + 1)


def log_catalan(n):
    n = np.asarray(n, dtype=float)
    return gammaln(2 * n + 1) - 2 * gammaln(n + 1) - np.log(n + 1)


def log_pre_dyck_count(n, m):
    """log P[n, m], elementwise; -inf where m > n."""
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    valid = m <= n
    safe_m = np.where(valid, m, 0.0)
    value = (
        np.log(n - safe_m + 1)
        - np.log(n + safe_m + 1)
        + gammaln(n + safe_m + 2)
        - gammaln(n + 2)
        - gammaln(safe_m + 1)
    )
    return np.where(valid, value, -np.inf)


def catalan_generating(x):
    if x < 0 or x > 0.25:
        raise DomainError(f"x must satisfy 0 <= x <= 1/4 (got {x})")
    return 2.0 / (1.0 + math.sqrt(1.0 - 4.0 * x))


def wald_extension(gap, alpha):
    if gap < 1:
        raise DomainError(f"gap must be >= 1 (got {gap})")
    if not 0 < alpha < 0.5:
        raise DomainError(f"alpha must satisfy 0 < alpha < 0.5 (got {alpha})")
    return gap * alpha / (1.0 - 2.0 * alpha)


def truncated_series(log_term, tolerance=None, max_terms=None, block=256):
    """Sum exp(log_term(n)) for n = 0, 1, ... until the tail is negligible.

    log_term maps an integer array of indices to log-domain terms. Summation
    stops once a term drops below tolerance relative to the running sum, or
    after max_terms terms.
    """
    if tolerance is None:
        tolerance = getattr(settings, "FORKRISK_TAIL_TOLERANCE", TAIL_TOLERANCE)
    if max_terms is None:
        max_terms = getattr(settings, "FORKRISK_TAIL_MAX_TERMS", TAIL_MAX_TERMS)
    total = 0.0
    log_tolerance = math.log(tolerance)
    start = 0
    while start < max_terms:
        stop = min(start + block, max_terms)
        logs = np.asarray(log_term(np.arange(start, stop)), dtype=float)
        terms = np.exp(logs)
        partial = total + np.cumsum(terms)
        with np.errstate(divide="ignore", invalid="ignore"):
            relative = logs - np.log(partial)
        # zero terms (log = -inf) say nothing about the tail
        small = np.nonzero(np.isfinite(logs) & (relative < log_tolerance))[0]
        if small.size:
            cut = small[0]
            return float(partial[cut])
        total = float(partial[-1])
        start = stop
    logger.warning("series truncated at cap terms=%s sum=%.17g", max_terms, total)
    return total
