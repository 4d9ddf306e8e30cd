"""
Greedy constrained local coloring of a conflict graph.

Colors are consecutive integers starting at 1. The transmission count of a
coloring is its local value: the largest number of distinct colors any vertex
sees in its closed out-neighbourhood.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import tablib

from .conf import get_setting
from .exceptions import GraphTooLarge, ImproperColoring

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Coloring:
    colors: np.ndarray
    num_colors: int
    local_value: int

    @classmethod
    def for_graph(cls, graph, colors):
        """Validate ``colors`` (one per vertex, in vertex order) and compute its local value."""
        colors = np.array(colors, dtype=np.int64).reshape(-1)
        if colors.size != len(graph):
            raise ImproperColoring(f'{colors.size} colors given for {len(graph)} vertices')
        num_colors = int(colors.max()) if colors.size else 0
        if colors.size and (colors.min() < 1 or np.unique(colors).size != num_colors):
            raise ImproperColoring('colors must be the consecutive integers 1..k')
        value = _local_value(graph, colors, num_colors)
        colors.flags.writeable = False
        return cls(colors=colors, num_colors=num_colors, local_value=value)

    def __len__(self):
        return int(self.colors.size)

    def color_of(self, graph, vertex):
        return int(self.colors[graph.index_of(vertex)])

    def classes(self):
        """color -> vertex indices, in vertex order."""
        return {c: np.flatnonzero(self.colors == c) for c in range(1, self.num_colors + 1)}

    def to_dataset(self, graph):
        dataset = tablib.Dataset(headers=['vertex', 'user', 'file', 'packet', 'color'])
        for i in range(len(graph)):
            vertex = graph.vertex(i)
            dataset.append([vertex.label, vertex.user, vertex.file, vertex.packet, int(self.colors[i])])
        return dataset

    def to_csv(self, graph):
        return self.to_dataset(graph).export('csv')


def compatible_packets(graph, packet):
    """
    Packets that may share a color with ``packet``.

    q is compatible with p when every requester of p stores q and every
    requester of q stores p; then no vertex of either packet interferes with
    a vertex of the other.
    """
    requested_by = graph.requesters[packet]
    stored_where_needed = graph.cached_at[:, requested_by].all(axis=1)
    blocked = (graph.requesters & ~graph.cached_at[packet]).any(axis=1)
    return stored_where_needed & ~blocked


def _user_labels(graph):
    """Packets requested or stored by the same set of users get the same label."""
    if not graph.num_packets:
        return np.zeros(0, dtype=np.int64)
    pattern = graph.requesters | graph.cached_at
    _, labels = np.unique(pattern, axis=0, return_inverse=True)
    return np.ravel(labels)


def gclc_color(graph):
    """
    Greedy constrained coloring over packet groups.

    Packets are visited in the order of their first vertex. Each uncolored
    packet opens a class; remaining uncolored packets are then added in the
    same order whenever they are compatible with every member already in the
    class, first among packets carrying the opener's label and then among the
    rest. All vertices of a packet take the packet's color.
    """
    P = graph.num_packets
    packet_colors = np.zeros(P, dtype=np.int64)
    labels = _user_labels(graph)
    everything = np.ones(P, dtype=bool)
    color = 0
    for opener in range(P):
        if packet_colors[opener]:
            continue
        color += 1
        packet_colors[opener] = color
        candidates = (packet_colors == 0) & compatible_packets(graph, opener)
        for pool in (labels == labels[opener], everything):
            while True:
                eligible = np.flatnonzero(candidates & pool)
                if not eligible.size:
                    break
                member = eligible[0]
                packet_colors[member] = color
                candidates &= compatible_packets(graph, member)
    coloring = Coloring.for_graph(graph, packet_colors[graph.pids])
    logger.debug(
        'GCLC: %d vertices, %d packets, %d colors, local value %d',
        len(graph), P, coloring.num_colors, coloring.local_value,
    )
    return coloring


def _local_value(graph, colors, num_colors):
    if not len(graph):
        return 0
    width = num_colors + 1
    best = 0
    for u in graph.active_users():
        lacking = graph.lacks(u)
        seen_colors = colors[lacking]
        seen_pids = graph.pids[lacking]
        per_color = np.bincount(seen_colors, minlength=width)
        distinct = int(np.count_nonzero(per_color))

        keys, counts = np.unique(seen_pids * width + seen_colors, return_counts=True)
        # a (packet, color) pair is exclusive when nothing else seen by u has that color
        exclusive = counts == per_color[keys % width]
        exclusive_per_pid = np.bincount(keys[exclusive] // width, minlength=graph.num_packets)

        own = graph.user_vertices(u)
        positions = np.searchsorted(keys, graph.pids[own] * width + colors[own])
        if not exclusive[positions].all():
            i = int(own[np.flatnonzero(~exclusive[positions])[0]])
            raise ImproperColoring(f'vertex {graph.vertex(i).label} shares its color with a neighbour')
        # colors reachable only through same-packet vertices drop out of N+[v]
        values = distinct - (exclusive_per_pid[graph.pids[own]] - 1)
        best = max(best, int(values.max()))
    return best


def local_value(graph, coloring):
    """max over v of |c(N+[v])|; 0 for the empty graph. Rejects improper colorings."""
    colors = coloring.colors if isinstance(coloring, Coloring) else np.asarray(coloring, dtype=np.int64)
    if colors.size != len(graph):
        raise ImproperColoring(f'{colors.size} colors given for {len(graph)} vertices')
    if colors.size and colors.min() < 1:
        raise ImproperColoring('colors must be positive integers')
    return _local_value(graph, colors, int(colors.max()) if colors.size else 0)


def greedy_chromatic_bound(graph):
    """Max degree + 1 of the undirected conflict graph between packets."""
    P = graph.num_packets
    if not P:
        return 0
    degree = max(P - 1 - int(compatible_packets(graph, p).sum()) for p in range(P))
    return degree + 1


def _find_local_coloring_rec(k, undirected, watchers, closed, curr, n_used, coloring):
    if curr == len(coloring):
        return True
    forbidden = {coloring[j] for j in undirected[curr] if j < curr}
    for color in range(1, n_used + 2):
        if color in forbidden:
            continue
        coloring[curr] = color
        fits = all(
            len({coloring[w] for w in closed[v] if coloring[w]}) <= k
            for v in watchers[curr]
        )
        if fits and _find_local_coloring_rec(k, undirected, watchers, closed, curr + 1, max(n_used, color), coloring):
            return True
    coloring[curr] = 0
    return False


def exact_local_chromatic(graph, limit=None):
    """Exhaustive minimum local value over all proper colorings; small graphs only."""
    limit = get_setting('EXACT_LOCAL_LIMIT') if limit is None else limit
    V = len(graph)
    if V > limit:
        raise GraphTooLarge(f'exhaustive local coloring is limited to {limit} vertices, graph has {V}')
    if V == 0:
        return 0
    out = [set(graph.out_neighbors(i).tolist()) for i in range(V)]
    closed = [out[i] | {i} for i in range(V)]
    undirected = [out[i] | {j for j in range(V) if i in out[j]} for i in range(V)]
    watchers = [[v for v in range(V) if i in closed[v]] for i in range(V)]

    upper = gclc_color(graph).local_value
    for k in range(1, upper):
        if _find_local_coloring_rec(k, undirected, watchers, closed, 0, 0, [0] * V):
            return k
    return upper
