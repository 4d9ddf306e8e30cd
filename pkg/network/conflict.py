"""
Directed conflict graph over (requested packet, requesting user) pairs.

A vertex exists for every packet a user requested and does not already
store; a user asking for the same file twice contributes its missing
packets once. Vertex v2 has an edge to v1 when v1's packet is missing at
v2's user and the two vertices carry different packets.

Edges are implicit: the graph keeps, per distinct packet, which users
request it and which users store it, and answers neighbourhood queries from
those two tables. ``adjacency()`` and ``to_networkx()`` materialize them.
"""
from __future__ import annotations

import logging
from typing import NamedTuple

import networkx as nx
import numpy as np

from .conf import get_setting
from .exceptions import GraphTooLarge, InconsistentInstance, UnknownVertex

logger = logging.getLogger(__name__)


class Vertex(NamedTuple):
    """A requested packet at its requesting user; all three ids are 1-based."""
    user: int
    file: int
    packet: int

    @property
    def packet_id(self):
        return (self.file, self.packet)

    @property
    def label(self):
        return f'{self.user}:{self.file}:{self.packet}'

    @classmethod
    def parse(cls, label):
        user, file_id, packet = (int(part) for part in label.split(':'))
        return cls(user, file_id, packet)


class ConflictGraph:
    """
    Vertices are stored in canonical order (user, file, packet ascending).

    Per vertex i: ``users[i]``, ``files[i]``, ``packets[i]`` (0-based) and
    ``pids[i]``, the index of its packet in the packet tables. Per packet p:
    ``requesters[p, u]`` and ``cached_at[p, u]``.
    """

    def __init__(self, users, files, packets, cache, demands=None, params=None):
        self.cache = cache
        self.demands = demands
        self.params = params
        self.n = cache.n
        self.B = cache.B
        self.users = np.asarray(users, dtype=np.int64)
        self.files = np.asarray(files, dtype=np.int64)
        self.packets = np.asarray(packets, dtype=np.int64)

        keys = self.files * self.B + self.packets
        if keys.size:
            unique_keys, first_seen, inverse = np.unique(keys, return_index=True, return_inverse=True)
            # packets are numbered in order of their first vertex
            order = np.argsort(first_seen, kind='stable')
            rank = np.empty_like(order)
            rank[order] = np.arange(order.size)
            self.pids = rank[np.ravel(inverse)]
            packet_keys = unique_keys[order]
        else:
            self.pids = np.zeros(0, dtype=np.int64)
            packet_keys = np.zeros(0, dtype=np.int64)
        self.packet_files = packet_keys // self.B
        self.packet_indices = packet_keys % self.B

        self.requesters = np.zeros((packet_keys.size, self.n), dtype=bool)
        self.requesters[self.pids, self.users] = True
        self.cached_at = cache.cached[:, self.packet_files, self.packet_indices].T.reshape(packet_keys.size, self.n)
        self.group_sizes = np.bincount(self.pids, minlength=packet_keys.size)
        self._index = None

    def __len__(self):
        return int(self.users.size)

    def __repr__(self):
        return f'<ConflictGraph |V|={len(self)} packets={self.num_packets}>'

    @property
    def num_vertices(self):
        return len(self)

    @property
    def num_packets(self):
        return int(self.packet_files.size)

    def vertex(self, i):
        return Vertex(int(self.users[i]) + 1, int(self.files[i]) + 1, int(self.packets[i]) + 1)

    @property
    def vertices(self):
        return [self.vertex(i) for i in range(len(self))]

    def index_of(self, vertex):
        if isinstance(vertex, (int, np.integer)):
            if not 0 <= vertex < len(self):
                raise UnknownVertex(f'vertex index {vertex} out of range')
            return int(vertex)
        if self._index is None:
            self._index = {self.vertex(i): i for i in range(len(self))}
        try:
            return self._index[Vertex(*vertex)]
        except (KeyError, TypeError):
            raise UnknownVertex(f'{vertex!r} is not a vertex of this conflict graph') from None

    def user_vertices(self, u):
        """Indices of the vertices requested by 0-based user u."""
        return np.flatnonzero(self.users == u)

    def active_users(self):
        """0-based users that have at least one vertex."""
        return np.unique(self.users)

    def lacks(self, u):
        """Mask of vertices whose packet 0-based user u does not store."""
        return ~self.cached_at[self.pids, u]

    def out_neighbors(self, vertex):
        i = self.index_of(vertex)
        return np.flatnonzero(self.lacks(self.users[i]) & (self.pids != self.pids[i]))

    def has_edge(self, source, target):
        i, j = self.index_of(source), self.index_of(target)
        return bool(self.pids[i] != self.pids[j] and not self.cached_at[self.pids[j], self.users[i]])

    def num_edges(self):
        if not len(self):
            return 0
        lacking = np.array([self.lacks(u).sum() for u in range(self.n)], dtype=np.int64)
        return int((lacking[self.users] - self.group_sizes[self.pids]).sum())

    def _check_enumerable(self):
        limit = get_setting('ENUMERATION_LIMIT')
        if len(self) > limit:
            raise GraphTooLarge(f'refusing to list the edges of {len(self)} vertices (limit {limit})')

    def adjacency(self):
        """Out-neighbour index lists, one per vertex."""
        self._check_enumerable()
        return [self.out_neighbors(i).tolist() for i in range(len(self))]

    def edges(self):
        self._check_enumerable()
        for i in range(len(self)):
            for j in self.out_neighbors(i):
                yield i, int(j)

    def to_networkx(self):
        graph = nx.DiGraph()
        labels = [self.vertex(i).label for i in range(len(self))]
        graph.add_nodes_from(labels)
        graph.add_edges_from((labels[i], labels[j]) for i, j in self.edges())
        return graph

    def write_edge_list(self, path):
        """Plain-text edge list, one 'u:f:b u:f:b' pair per line."""
        nx.write_edgelist(self.to_networkx(), path, data=False)


def build_conflict_graph(cache, demands, params):
    """One vertex per (user, requested-and-missing packet); edges by the interference rule."""
    cache.check_against(params)
    if demands.m != params.m or demands.n != params.n or demands.L != params.L:
        raise InconsistentInstance(
            f'demand matrix is {demands.L}x{demands.n} over {demands.m} files, expected {params}'
        )
    users, files, packets = [], [], []
    for u in range(params.n):
        for file_id in demands.distinct_files(u):
            missing = np.flatnonzero(~cache.cached[u, file_id - 1])
            users.append(np.full(missing.size, u))
            files.append(np.full(missing.size, file_id - 1))
            packets.append(missing)
    if users:
        users, files, packets = (np.concatenate(part) for part in (users, files, packets))
    graph = ConflictGraph(users, files, packets, cache, demands=demands, params=params)
    logger.debug('Conflict graph for %s: %d vertices, %d packets', params, len(graph), graph.num_packets)
    return graph


def closed_out_neighborhood(graph, vertex):
    """{v} together with every vertex v points to."""
    i = graph.index_of(vertex)
    members = {graph.vertex(j) for j in graph.out_neighbors(i)}
    members.add(graph.vertex(i))
    return frozenset(members)


def uncoded_rate(graph):
    """Distinct requested-and-missing packets over B: one plain transmission per packet."""
    return graph.num_packets / graph.B
