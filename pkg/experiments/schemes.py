"""
Placement schemes a run can use: up, rlfu or rlfu(<m_tilde>), rap (explicit p), sup.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

from analysis import bounds
from network.exceptions import InvalidParameters
from network.placement import CachingDistribution, rap_cache, rlfu_distribution, sup_cache, uniform_distribution

SCHEME_PATTERN = re.compile(r'^(?P<kind>up|rlfu|rap|sup)(?:\((?P<m_tilde>\d+)\))?$')


@dataclass(frozen=True)
class Scheme:
    kind: str
    m_tilde: int = None
    p: CachingDistribution = None

    def __post_init__(self):
        if self.kind not in ('up', 'rlfu', 'rap', 'sup'):
            raise InvalidParameters(f'unknown scheme {self.kind!r}')
        if self.m_tilde is not None and self.kind != 'rlfu':
            raise InvalidParameters(f'only rlfu takes a cut-off, got {self.kind}({self.m_tilde})')

    @classmethod
    def parse(cls, text, m_tilde=None, p=None):
        match = SCHEME_PATTERN.match(str(text).strip().lower())
        if not match:
            raise InvalidParameters(f'cannot parse scheme {text!r}; expected up, rlfu, rlfu(<m_tilde>), rap or sup')
        if match['m_tilde'] is not None:
            m_tilde = int(match['m_tilde'])
        if p is not None and not isinstance(p, CachingDistribution):
            p = CachingDistribution(p=p, label='rap')
        return cls(kind=match['kind'], m_tilde=m_tilde, p=p)

    @property
    def label(self):
        if self.kind == 'rlfu' and self.m_tilde is not None:
            return f'rlfu({self.m_tilde})'
        return self.kind

    def resolve(self, params, q):
        """Fix the cut-off of an rlfu scheme at its optimum when none was given."""
        if self.kind == 'rlfu' and self.m_tilde is None:
            m_tilde, _ = bounds.optimize_mtilde(params, q)
            return replace(self, m_tilde=m_tilde)
        return self

    def caching_distribution(self, params):
        if self.kind == 'up':
            return uniform_distribution(params.m)
        if self.kind == 'rlfu':
            if self.m_tilde is None:
                raise InvalidParameters('resolve the rlfu cut-off before placing caches')
            return rlfu_distribution(params.m, self.m_tilde, params.M)
        if self.kind == 'rap':
            if self.p is None:
                raise InvalidParameters('the rap scheme needs a caching distribution p')
            return self.p
        return None

    def place(self, params, rng):
        if self.kind == 'sup':
            return sup_cache(params, rng)
        return rap_cache(self.caching_distribution(params), params, rng)

    def bounds(self, params, q, scaled_cached_mass=False):
        """The closed forms that describe this scheme, keyed by name; the first is the primary one."""
        if self.kind == 'sup':
            return {'thm5': bounds.thm5_bound(params)}
        p = self.caching_distribution(params)
        results = {'thm1': bounds.thm1_bound(q, p, params, scaled_cached_mass=scaled_cached_mass)}
        if self.kind == 'up':
            results['thm2'] = bounds.thm2_bound(params)
        elif self.kind == 'rlfu':
            results['corollary1'] = bounds.corollary1_bound(params, q, self.m_tilde)
        return results
