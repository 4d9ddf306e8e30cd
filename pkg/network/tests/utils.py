from fractions import Fraction

import numpy as np

from network.conflict import build_conflict_graph
from network.placement import CacheConfiguration, rap_cache, uniform_distribution
from network.system import DemandMatrix, SystemParams, sample_demands, uniform_demand


def cache_from_sets(n, m, B, stored):
    """stored maps 1-based user -> {file: [packets]}."""
    cached = np.zeros((n, m, B), dtype=bool)
    for user, files in stored.items():
        for file_id, packets in files.items():
            for packet in packets:
                cached[user - 1, file_id - 1, packet - 1] = True
    return CacheConfiguration(cached=cached)


def xor_instance(B=1):
    """Two users, two files; each stores the file the other one asks for."""
    params = SystemParams(n=2, m=2, M=1, L=1, B=B)
    everything = list(range(1, B + 1))
    cache = cache_from_sets(2, 2, B, {1: {1: everything}, 2: {2: everything}})
    demands = DemandMatrix(F=[[2, 1]], m=2)
    return params, cache, demands


def empty_cache_instance(n=3, B=2):
    """Nothing cached, every user asks for a different file."""
    params = SystemParams(n=n, m=n, M=0, L=1, B=B)
    cache = CacheConfiguration(cached=np.zeros((n, n, B), dtype=bool))
    demands = DemandMatrix(F=[list(range(1, n + 1))], m=n)
    return params, cache, demands


def random_instance(rng, max_users=4, max_files=4, max_packets=2, max_requests=2, max_vertices=None):
    """A uniform-placement instance with small dimensions; redraws until it fits max_vertices."""
    while True:
        n = int(rng.integers(1, max_users + 1))
        m = int(rng.integers(1, max_files + 1))
        B = int(rng.integers(1, max_packets + 1))
        L = int(rng.integers(1, max_requests + 1))
        M = Fraction(int(rng.integers(0, m * B + 1)), B)
        params = SystemParams(n=n, m=m, M=M, L=L, B=B)
        cache = rap_cache(uniform_distribution(m), params, rng)
        demands = sample_demands(uniform_demand(m), n, L, rng=rng)
        graph = build_conflict_graph(cache, demands, params)
        if max_vertices is None or len(graph) <= max_vertices:
            return params, cache, demands, graph
