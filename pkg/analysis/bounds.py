"""
Closed-form achievable rates of coded delivery over random caches.

All values are in file units per request round. Components that are
undefined at M = 0 (anything dividing by M) evaluate to +inf.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy

from network.exceptions import InvalidParameters
from network.placement import rlfu_distribution, uniform_distribution

logger = logging.getLogger(__name__)

LOG_SPACE_USERS = 60

PSI = 'psi'
DISTINCT_MASS = 'mbar-Mbar'
PER_REQUEST = 'L(m/M-1)'
ALL_REQUESTS = 'Ln'
UNCACHED = 'm-M'
TRUNCATED = 'head+tail'


@dataclass(frozen=True)
class RateBound:
    value: float
    components: dict
    scheme: str
    m_tilde: int = None
    epsilon: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def binding_component(self):
        """Label of the smallest component (the first one on ties)."""
        return min(self.components, key=lambda name: self.components[name])

    @classmethod
    def from_components(cls, components, scheme, **extra):
        value = min(components.values())
        return cls(value=float(value), components=dict(components), scheme=scheme, **extra)


def _per_request_term(L, m, M):
    return math.inf if M == 0 else L * (m / M - 1)


def _scores(p, M, n, ell):
    cached = np.clip(p.p * float(M), 0.0, 1.0)
    # numpy evaluates 0.0 ** 0 as 1
    return np.power(cached, ell - 1) * np.power(1.0 - cached, n - ell + 1)


def rho(q, p, M, n, ell):
    """
    Probability that file f has the largest score among ell independent
    requests, ties going to the lower file index.
    """
    if not 1 <= ell <= n:
        raise InvalidParameters(f'ell must lie in 1..{n}, got {ell}')
    if q.m != p.m:
        raise InvalidParameters(f'demand covers {q.m} files, caching distribution {p.m}')
    scores = _scores(p, M, n, ell)
    order = np.lexsort((np.arange(q.m), -scores))
    ranked = q.q[order]
    after = np.concatenate([np.cumsum(ranked[::-1])[::-1][1:], [0.0]])
    result = np.empty(q.m)
    result[order] = np.power(after + ranked, ell) - np.power(after, ell)
    return result


def psi(q, p, M, n, L):
    """L * sum_ell C(n, ell) sum_f rho_{f,ell} (1 - p_f M)^(n-ell+1) (p_f M)^(ell-1)."""
    cached = np.clip(p.p * float(M), 0.0, 1.0)
    terms = []
    for ell in range(1, n + 1):
        weights = rho(q, p, M, n, ell)
        if n > LOG_SPACE_USERS:
            log_binom = gammaln(n + 1) - gammaln(ell + 1) - gammaln(n - ell + 1)
            with np.errstate(divide='ignore'):
                log_factor = xlogy(n - ell + 1, 1.0 - cached) + xlogy(ell - 1, cached)
            terms.extend(weights * np.exp(log_binom + log_factor))
        else:
            terms.extend(math.comb(n, ell) * weights * _scores(p, M, n, ell))
    return L * math.fsum(terms)


def _request_probability(q, n, L):
    """1 - (1 - q_f)^(nL) for every file."""
    with np.errstate(divide='ignore'):
        return -np.expm1(n * L * np.log1p(-q.q))


def m_bar(q, n, L):
    """Expected number of distinct files among the nL requests."""
    return math.fsum(_request_probability(q, n, L))


def M_bar(q, p, n, L, M=None, scaled=False):
    """
    Cached mass of the requested files, sum_f p_f (1 - (1 - q_f)^(nL)).

    With ``scaled`` every p_f is multiplied by M, giving the expected stored
    fraction of the requested files instead.
    """
    if scaled and M is None:
        raise InvalidParameters('the scaled cached mass needs M')
    weights = p.p * float(M) if scaled else p.p
    return math.fsum(weights * _request_probability(q, n, L))


def thm1_bound(q, p, params, scaled_cached_mass=False):
    """min{psi, mbar - Mbar}: the GCLC rate of RAP placement with caching distribution p."""
    n, L, M = params.n, params.L, params.M
    p.check_capacity(M)
    components = {
        PSI: psi(q, p, M, n, L),
        DISTINCT_MASS: max(0.0, m_bar(q, n, L) - M_bar(q, p, n, L, M=M, scaled=scaled_cached_mass)),
    }
    return RateBound.from_components(
        components, scheme=p.label, m_tilde=p.m_tilde,
        details={'scaled_cached_mass': scaled_cached_mass},
    )


def _min_expression(params):
    n, m, L, M = params.n, params.m, params.L, float(params.M)
    return {
        PER_REQUEST: _per_request_term(L, m, M),
        ALL_REQUESTS: float(L * n),
        UNCACHED: m - M,
    }


def thm2_bound(params):
    """min{L(m/M - 1), Ln, m - M}: uniform placement under any demand distribution."""
    return RateBound.from_components(_min_expression(params), scheme='up', m_tilde=params.m)


def _cutoff_curve(params, q, cutoffs):
    n, m, L, M = params.n, params.m, params.L, float(params.M)
    cutoffs = np.asarray(cutoffs, dtype=np.int64)
    head_mass = np.cumsum(q.q)[cutoffs - 1]
    with np.errstate(divide='ignore', invalid='ignore'):
        per_request = L * (cutoffs / M - 1) if M > 0 else np.full(cutoffs.shape, np.inf)
    head = np.minimum(per_request, cutoffs - M)
    tail = np.minimum(L * n * np.clip(1.0 - head_mass, 0.0, None), m - cutoffs)
    return head + tail


def corollary1_bound(params, q, m_tilde):
    """RLFU with cut-off m_tilde: the UP expression on the head plus uncoded delivery of the tail."""
    m_tilde = int(m_tilde)
    if not params.M <= m_tilde <= params.m:
        raise InvalidParameters(f'cut-off m_tilde={m_tilde} must lie in [M={params.M}, m={params.m}]')
    if q.m != params.m:
        raise InvalidParameters(f'demand covers {q.m} files, library has {params.m}')
    n, m, L, M = params.n, params.m, params.L, float(params.M)
    head = min(_per_request_term(L, m_tilde, M), m_tilde - M)
    tail = min(L * n * max(0.0, 1.0 - q.head_mass(m_tilde)), m - m_tilde)
    components = {
        TRUNCATED: head + tail,
        ALL_REQUESTS: float(L * n),
        UNCACHED: m - M,
    }
    scheme = 'up' if m_tilde == m else 'rlfu'
    return RateBound.from_components(components, scheme=scheme, m_tilde=m_tilde)


def mtilde_curve(params, q):
    """Every admissible cut-off ceil(M)..m with its truncated-placement value."""
    if params.M < 1:
        raise InvalidParameters(f'the cut-off search needs M >= 1, got M={params.M}')
    if q.m != params.m:
        raise InvalidParameters(f'demand covers {q.m} files, library has {params.m}')
    cutoffs = np.arange(math.ceil(params.M), params.m + 1)
    values = np.minimum(
        np.minimum(_cutoff_curve(params, q, cutoffs), params.L * params.n),
        params.m - float(params.M),
    )
    return cutoffs, values


def optimize_mtilde(params, q):
    """Exhaustive cut-off scan; the lowest minimizing m_tilde wins."""
    cutoffs, values = mtilde_curve(params, q)
    best = int(cutoffs[int(np.argmin(values))])
    bound = corollary1_bound(params, q, best)
    logger.debug('Optimal cut-off for %s: m_tilde=%d, rate %.6g', params, best, bound.value)
    return best, bound


def rlfu_thm1_bound(params, q, m_tilde=None, scaled_cached_mass=False):
    """The min{psi, mbar - Mbar} value of RLFU, at the optimal cut-off unless one is given."""
    if m_tilde is None:
        m_tilde, _ = optimize_mtilde(params, q)
    p = rlfu_distribution(params.m, m_tilde, params.M)
    return thm1_bound(q, p, params, scaled_cached_mass=scaled_cached_mass)


def thm4_bound(params, alpha, epsilon=0.0):
    """
    Uniform placement under Zipf demand with 0 <= alpha < 1. The value is the
    uniform-placement expression; ``details`` records whether M <= (1 - epsilon) m.
    """
    alpha = float(alpha)
    if not 0 <= alpha < 1:
        raise InvalidParameters(f'this bound covers Zipf exponents in [0, 1), got alpha={alpha}')
    within = float(params.M) <= (1 - float(epsilon)) * params.m
    return RateBound.from_components(
        _min_expression(params), scheme='up', m_tilde=params.m,
        details={'alpha': alpha, 'epsilon': float(epsilon), 'capacity_condition': within},
    )


def thm5_bound(params):
    """Scalar uniform placement: min{L(m/M - 1), Ln, m - M}, reached up to 1 + o(1) for large L."""
    params.require_scalar()
    regime = thm5_regime(params)
    return RateBound.from_components(
        _min_expression(params), scheme='sup',
        details={'threshold': regime.threshold, 'ratio': regime.ratio},
    )


@dataclass(frozen=True)
class Regime:
    """How far L is from the request count where the scalar bound becomes tight."""
    threshold: float
    ratio: float
    half_full: bool
    storage_ratio: float

    @property
    def reached(self):
        return self.ratio >= 1.0


def _safe_exp(log_value):
    return math.exp(log_value) if log_value < 709 else math.inf


def thm5_regime(params):
    """
    threshold = n (m / (m - M))^n when M/m >= 1/2, and
    (n M / m) (m / M)^n / (1 - M / m) otherwise; ratio = L / threshold.
    ``storage_ratio`` is M / L, which the tight regime also needs to grow.
    """
    params.require_scalar()
    n, m, M, L = params.n, params.m, int(params.M), params.L
    half_full = 2 * M >= m
    if M == m or M == 0:
        threshold = math.inf
    elif half_full:
        threshold = _safe_exp(math.log(n) + n * math.log(m / (m - M)))
    else:
        fill = M / m
        threshold = _safe_exp(math.log(n * fill) + n * math.log(m / M) - math.log1p(-fill))
    return Regime(
        threshold=threshold,
        ratio=L / threshold,
        half_full=half_full,
        storage_ratio=M / L,
    )


@dataclass(frozen=True)
class GapConstants:
    c1: float
    c2: float
    note: str = 'regime-to-gap tables are not reproduced; only the two constants are computed'


def gap_constants(eps_prime=0.0):
    """c1 = (1 - 1/e - eps')(1 - e^(1/e - 1) - eps'), c2 = (1 - 1/e)^2."""
    eps_prime = float(eps_prime)
    if eps_prime < 0:
        raise InvalidParameters(f"eps' must be non-negative, got {eps_prime}")
    c1 = (1 - math.exp(-1) - eps_prime) * (1 - math.exp(math.exp(-1) - 1) - eps_prime)
    c2 = (1 - math.exp(-1)) ** 2
    return GapConstants(c1=c1, c2=c2)


def evaluate_point(params, q, m_tilde=None, scaled_cached_mass=False, alpha=None):
    """
    Every bound that applies at one parameter point, keyed by name.

    ``alpha`` is the Zipf exponent behind q, if any; the Zipf uniform-placement
    bound is added when it lies in [0, 1).

    RLFU uses ``m_tilde`` when given and the optimal cut-off otherwise
    (only when M >= 1). The scalar bound is included when B = 1 and M is an
    integer.
    """
    up = uniform_distribution(params.m)
    results = {
        'thm1_up': thm1_bound(q, up, params, scaled_cached_mass=scaled_cached_mass),
        'thm2': thm2_bound(params),
    }
    if alpha is not None and 0 <= alpha < 1:
        results['thm4'] = thm4_bound(params, alpha)
    if m_tilde is not None or params.M >= 1:
        if m_tilde is None:
            m_tilde, results['corollary1'] = optimize_mtilde(params, q)
        else:
            results['corollary1'] = corollary1_bound(params, q, m_tilde)
        results['thm1_rlfu'] = rlfu_thm1_bound(params, q, m_tilde, scaled_cached_mass=scaled_cached_mass)
    if params.B == 1 and params.M_is_integer:
        results['thm5'] = thm5_bound(params)
    return results
