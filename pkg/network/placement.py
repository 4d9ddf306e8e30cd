"""
Caching phase: caching distributions and cache-realization samplers.

RAP stores round(p_f * M * B) random packets of every file f at every user;
SUP stores M whole files (B = 1) chosen uniformly at random.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InconsistentInstance, InvalidParameters
from .system import SUM_TOLERANCE, as_fraction

logger = logging.getLogger(__name__)

SCHEMES = ('packetized', 'scalar')


@dataclass(frozen=True, eq=False)
class CachingDistribution:
    """How a user splits its cache across files: p_f of the M*B packet budget goes to file f."""
    p: np.ndarray
    label: str = 'custom'
    m_tilde: int = None

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise InvalidParameters('a caching distribution needs at least one file')
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InvalidParameters('caching probabilities must be finite and non-negative')
        total = math.fsum(p)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidParameters(f'caching probabilities sum to {total!r}, not 1')
        p.flags.writeable = False
        object.__setattr__(self, 'p', p)

    @property
    def m(self):
        return int(self.p.size)

    def check_capacity(self, M):
        """0 <= p_f <= 1/M for every f; vacuous when M <= 1."""
        M = as_fraction(M)
        if M <= 1:
            return
        worst = float(self.p.max()) * float(M)
        if worst > 1.0 + 1e-12:
            raise InvalidParameters(
                f'caching distribution puts p_f*M={worst:.6g} > 1 on some file (M={M})'
            )

    def cached_fraction(self, M):
        """p_f * M, the fraction of each file a user stores."""
        return self.p * float(as_fraction(M))


def uniform_distribution(m):
    """Uniform Placement: p_f = 1/m."""
    if m < 1:
        raise InvalidParameters(f'library size must be positive, got {m}')
    return CachingDistribution(p=np.full(int(m), 1.0 / m), label='up', m_tilde=int(m))


def rlfu_distribution(m, m_tilde, M):
    """Truncated uniform placement over the m_tilde most popular files."""
    M = as_fraction(M)
    m_tilde = int(m_tilde)
    if m_tilde > m:
        raise InvalidParameters(f'cut-off m_tilde={m_tilde} exceeds the library size m={m}')
    if m_tilde < M or m_tilde < 1:
        raise InvalidParameters(f'cut-off m_tilde={m_tilde} must be at least M={M} and positive')
    p = np.zeros(int(m))
    p[:m_tilde] = 1.0 / m_tilde
    label = 'up' if m_tilde == m else 'rlfu'
    return CachingDistribution(p=p, label=label, m_tilde=m_tilde)


@dataclass(frozen=True, eq=False)
class CacheConfiguration:
    """
    The realization C: ``cached[u, f, b]`` is True when user u stores packet b
    of file f (all indices 0-based here, 1-based in JSON).
    """
    cached: np.ndarray
    scheme: str = 'packetized'

    def __post_init__(self):
        cached = np.array(self.cached, dtype=bool)
        if cached.ndim != 3:
            raise InvalidParameters('cache contents must be an n x m x B boolean array')
        if self.scheme not in SCHEMES:
            raise InvalidParameters(f'unknown placement scheme {self.scheme!r}')
        if self.scheme == 'scalar' and cached.shape[2] != 1:
            raise InvalidParameters('scalar placement stores whole files, so B must be 1')
        cached.flags.writeable = False
        object.__setattr__(self, 'cached', cached)

    @property
    def n(self):
        return int(self.cached.shape[0])

    @property
    def m(self):
        return int(self.cached.shape[1])

    @property
    def B(self):
        return int(self.cached.shape[2])

    def packets(self, user, file_id):
        """Sorted 1-based packet indices of file_id stored at 1-based user."""
        return (np.flatnonzero(self.cached[user - 1, file_id - 1]) + 1).tolist()

    def user_load(self, user):
        """Total packets stored at a 1-based user."""
        return int(self.cached[user - 1].sum())

    def loads(self):
        return self.cached.reshape(self.n, -1).sum(axis=1)

    def holders(self, file_id, packet):
        """1-based users storing the given packet."""
        return (np.flatnonzero(self.cached[:, file_id - 1, packet - 1]) + 1).tolist()

    def check_against(self, params):
        if (self.n, self.m, self.B) != (params.n, params.m, params.B):
            raise InconsistentInstance(
                f'cache shape {(self.n, self.m, self.B)} does not match {params}'
            )

    def to_dict(self):
        users = {}
        for u in range(self.n):
            files = {}
            for f in range(self.m):
                stored = np.flatnonzero(self.cached[u, f])
                if stored.size:
                    files[str(f + 1)] = (stored + 1).tolist()
            users[str(u + 1)] = files
        return {'scheme': self.scheme, 'n': self.n, 'm': self.m, 'B': self.B, 'users': users}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        try:
            cached = np.zeros((int(data['n']), int(data['m']), int(data['B'])), dtype=bool)
            for user, files in data['users'].items():
                for file_id, packets in files.items():
                    cached[int(user) - 1, int(file_id) - 1, np.asarray(packets, dtype=int) - 1] = True
        except (KeyError, IndexError, ValueError, TypeError) as exc:
            raise InvalidParameters(f'malformed cache configuration: {exc}') from exc
        return cls(cached=cached, scheme=data.get('scheme', 'packetized'))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def packet_counts(p, params):
    """
    Packets of each file a RAP user stores.

    floor(p_f*M*B) per file, then the leftover budget floor(M*B) - sum goes one
    packet at a time to the files with the largest fractional parts (lower file
    index on ties), never above B and never to a file with p_f = 0.
    """
    B = params.B
    budget = params.cache_packets
    raw = p.p * float(params.M) * B
    base = np.floor(raw + 1e-9)
    counts = np.minimum(base.astype(np.int64), B)
    fractional = np.clip(raw - base, 0.0, None)
    order = np.lexsort((np.arange(p.m), -fractional))
    eligible = p.p > 0

    remaining = budget - int(counts.sum())
    while remaining > 0:
        progressed = False
        for f in order:
            if remaining == 0:
                break
            if eligible[f] and counts[f] < B:
                counts[f] += 1
                remaining -= 1
                progressed = True
        if not progressed:
            break
    # float slack in the floor can overshoot the budget by a packet or two
    for f in order[::-1]:
        if remaining >= 0:
            break
        take = min(int(counts[f]), -remaining)
        counts[f] -= take
        remaining += take
    return counts


def rap_cache(p, params, rng):
    """Random popularity-based placement: independent uniform packet subsets per user and file."""
    if p.m != params.m:
        raise InconsistentInstance(f'caching distribution covers {p.m} files, library has {params.m}')
    p.check_capacity(params.M)
    counts = packet_counts(p, params)
    cached = np.zeros((params.n, params.m, params.B), dtype=bool)
    for f in np.flatnonzero(counts):
        k = int(counts[f])
        if k == params.B:
            cached[:, f, :] = True
            continue
        keys = rng.random((params.n, params.B))
        chosen = np.argsort(keys, axis=1)[:, :k]
        np.put_along_axis(cached[:, f, :], chosen, True, axis=1)
    logger.debug('RAP placement: %s, %d packets per user', params, int(counts.sum()))
    return CacheConfiguration(cached=cached, scheme='packetized')


def sup_cache(params, rng):
    """Scalar uniform placement: every user stores M whole files chosen uniformly at random."""
    params.require_scalar()
    M = int(params.M)
    cached = np.zeros((params.n, params.m, 1), dtype=bool)
    if M > 0:
        keys = rng.random((params.n, params.m))
        chosen = np.argsort(keys, axis=1)[:, :M]
        np.put_along_axis(cached[:, :, 0], chosen, True, axis=1)
    return CacheConfiguration(cached=cached, scheme='scalar')
