"""
System parameters, demand distributions and random demand matrices.

File identifiers are 1-based everywhere they leave this module (demand
matrices, JSON, CSV); arrays indexed by file use ``file_id - 1``.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import InfeasibleDemand, InvalidParameters

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-12
DEMAND_MODES = ('iid', 'distinct')
MAX_SEED = 2 ** 64


def as_fraction(value):
    """Coerce a cache size to an exact rational (floats go through their decimal text)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidParameters(f'cache size must be a number, got {value!r}')
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidParameters(f'cache size must be finite, got {value!r}')
        return Fraction(repr(value))
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParameters(f'cache size {value!r} is not a rational number') from exc


@dataclass(frozen=True)
class SystemParams:
    """The tuple (n, m, M, L, B) plus the RNG seed governing one experiment."""
    n: int
    m: int
    M: Fraction
    L: int
    B: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'M', as_fraction(self.M))
        for name in ('n', 'm', 'L', 'B'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidParameters(f'{name} must be an integer, got {value!r}')
            if value < 1:
                raise InvalidParameters(f'{name} must be at least 1, got {value}')
            object.__setattr__(self, name, int(value))
        if not 0 <= self.M <= self.m:
            raise InvalidParameters(f'cache size M={self.M} must lie in [0, m={self.m}]')
        if not 0 <= int(self.seed) < MAX_SEED:
            raise InvalidParameters(f'seed must be an unsigned 64-bit integer, got {self.seed}')
        object.__setattr__(self, 'seed', int(self.seed))

    @property
    def cache_packets(self):
        """Packets a user can store: floor(M * B)."""
        return math.floor(self.M * self.B)

    @property
    def M_is_integer(self):
        return self.M.denominator == 1

    def require_scalar(self):
        """Scalar (whole-file) placement needs B = 1 and an integer M."""
        if self.B != 1:
            raise InvalidParameters(f'scalar placement needs B=1, got B={self.B}')
        if not self.M_is_integer:
            raise InvalidParameters(f'scalar placement needs an integer cache size, got M={self.M}')

    def rng(self):
        return np.random.default_rng(self.seed)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return {
            'n': self.n,
            'm': self.m,
            'M': float(self.M) if not self.M_is_integer else int(self.M),
            'L': self.L,
            'B': self.B,
            'seed': self.seed,
        }

    def __str__(self):
        return f'n={self.n} m={self.m} M={self.M} L={self.L} B={self.B}'


@dataclass(frozen=True, eq=False)
class DemandDistribution:
    """
    Per-request file popularity q, sorted non-increasing.

    ``permutation[i]`` is the 0-based position, in the caller's original
    ordering, of the file that ranks i-th here.
    """
    q: np.ndarray
    permutation: np.ndarray = None

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64)
        if q.ndim != 1 or q.size == 0:
            raise InvalidParameters('a demand distribution needs at least one file')
        if np.any(q < 0) or not np.all(np.isfinite(q)):
            raise InvalidParameters('demand probabilities must be finite and non-negative')
        total = math.fsum(q)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidParameters(f'demand probabilities sum to {total!r}, not 1')
        if np.any(np.diff(q) > 0):
            raise InvalidParameters('demand probabilities must be non-increasing')
        permutation = self.permutation
        if permutation is None:
            permutation = np.arange(q.size)
        permutation = np.array(permutation, dtype=np.int64)
        if permutation.shape != q.shape or not np.array_equal(np.sort(permutation), np.arange(q.size)):
            raise InvalidParameters('permutation must reorder every file exactly once')
        q.flags.writeable = False
        permutation.flags.writeable = False
        object.__setattr__(self, 'q', q)
        object.__setattr__(self, 'permutation', permutation)

    @classmethod
    def from_weights(cls, weights):
        """Normalize arbitrary non-negative weights and sort them descending."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size == 0:
            raise InvalidParameters('a demand distribution needs at least one file')
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InvalidParameters('demand weights must be finite and non-negative')
        total = math.fsum(weights)
        if total <= 0:
            raise InvalidParameters('demand weights must not all be zero')
        order = np.argsort(-weights, kind='stable')
        q = weights[order] / total
        # renormalize once more so the sorted vector passes the 1e-12 check
        q = q / math.fsum(q)
        return cls(q=q, permutation=order)

    @property
    def m(self):
        return int(self.q.size)

    @property
    def support(self):
        return int(np.count_nonzero(self.q))

    def head_mass(self, k):
        """G_k: total probability of the k most popular files."""
        k = max(0, min(int(k), self.m))
        return math.fsum(self.q[:k])

    def is_uniform(self):
        return bool(np.all(self.q == self.q[0]))


def zipf(m, alpha):
    """q_f = f^-alpha / sum_i i^-alpha over f = 1..m."""
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidParameters(f'library size must be a positive integer, got {m!r}')
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0:
        raise InvalidParameters(f'Zipf exponent must be non-negative, got {alpha}')
    ranks = np.arange(1, int(m) + 1, dtype=np.float64)
    weights = np.power(ranks, -alpha)
    return DemandDistribution(q=weights / math.fsum(weights))


def uniform_demand(m):
    return zipf(m, 0.0)


def load_distribution(path):
    """Read a newline-delimited list of decimal probabilities (blank lines and # comments skipped)."""
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.split('#', 1)[0].strip()
        if not text:
            continue
        try:
            values.append(float(text))
        except ValueError as exc:
            raise InvalidParameters(f'{path}:{lineno}: {text!r} is not a probability') from exc
    total = math.fsum(values) if values else 0.0
    if values and abs(total - 1.0) > 1e-9:
        logger.warning('Probabilities in %s sum to %.12g; renormalizing', path, total)
    return DemandDistribution.from_weights(values)


@dataclass(frozen=True, eq=False)
class DemandMatrix:
    """The L x n request matrix F; column u holds user u's L requests (1-based file ids)."""
    F: np.ndarray
    m: int
    mode: str = 'iid'

    def __post_init__(self):
        F = np.array(self.F, dtype=np.int64)
        if F.ndim != 2 or F.size == 0:
            raise InvalidParameters('a demand matrix must be a non-empty L x n array')
        if self.mode not in DEMAND_MODES:
            raise InvalidParameters(f'demand mode must be one of {DEMAND_MODES}, got {self.mode!r}')
        if F.min() < 1 or F.max() > self.m:
            raise InvalidParameters(f'requested file ids must lie in 1..{self.m}')
        if self.mode == 'distinct':
            for column in F.T:
                if np.unique(column).size != column.size:
                    raise InvalidParameters('distinct-mode columns must not repeat a file')
        F.flags.writeable = False
        object.__setattr__(self, 'F', F)

    @property
    def L(self):
        return int(self.F.shape[0])

    @property
    def n(self):
        return int(self.F.shape[1])

    def requests(self, user):
        """The L requests of a 0-based user, as issued."""
        return self.F[:, user]

    def distinct_files(self, user):
        """Sorted distinct 1-based file ids requested by a 0-based user."""
        return np.unique(self.F[:, user])

    def requested_files(self):
        return np.unique(self.F)


def sample_demands(q, n, L, mode='iid', rng=None):
    """
    Draw an L x n demand matrix from q.

    iid: every entry independent. distinct: each user's L requests are drawn
    one after another from q renormalized over the files not yet requested,
    realized with the Gumbel top-k construction.
    """
    if mode not in DEMAND_MODES:
        raise InvalidParameters(f'demand mode must be one of {DEMAND_MODES}, got {mode!r}')
    if n < 1 or L < 1:
        raise InvalidParameters(f'need n >= 1 and L >= 1, got n={n}, L={L}')
    if rng is None:
        rng = np.random.default_rng()
    m = q.m
    if mode == 'iid':
        F = rng.choice(m, size=(L, n), p=q.q) + 1
    else:
        if L > m:
            raise InfeasibleDemand(f'{L} distinct requests per user exceed the library size {m}')
        if q.support < L:
            raise InfeasibleDemand(f'only {q.support} files have positive probability, {L} distinct requests needed')
        with np.errstate(divide='ignore'):
            log_q = np.log(q.q)
        keys = log_q[None, :] + rng.gumbel(size=(n, m))
        order = np.argsort(-keys, axis=1, kind='stable')[:, :L]
        F = order.T + 1
    return DemandMatrix(F=F, m=m, mode=mode)
