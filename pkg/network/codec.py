"""
MDS-coded delivery over GF(2^s).

Color c is assigned the field point x_c = alpha^(c-1) for a primitive alpha,
and the generator is the Vandermonde matrix A[i, c] = x_c^i with nu rows.
Every color class is summed into one class symbol (each distinct packet
once) and the server sends y = A z.

A user that lacks packets of k <= nu colors strips the classes it can rebuild
from its own cache out of the first k transmissions and is left with a
square Vandermonde system in the k unknown class symbols.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import galois
import numpy as np

from .conf import get_setting
from .exceptions import DecodingError, DimensionMismatch, FieldTooSmall, InvalidParameters, MissingPayload

logger = logging.getLogger(__name__)


def field(bits=None):
    """GF(2^bits); defaults to the FIELD_BITS setting."""
    return _binary_field(get_setting('FIELD_BITS') if bits is None else int(bits))


@lru_cache(maxsize=None)
def _binary_field(bits):
    if not 1 <= bits <= 32:
        raise InvalidParameters(f'field size must be between 2^1 and 2^32, got 2^{bits}')
    return galois.GF(2 ** bits)


def field_points(num_colors, GF):
    if num_colors > GF.order - 1:
        raise FieldTooSmall(
            f'{num_colors} colors need {num_colors} distinct non-zero points, GF({GF.order}) has {GF.order - 1}'
        )
    return GF.primitive_element ** np.arange(num_colors)


def mds_generator(num_colors, nu, GF):
    """nu x num_colors Vandermonde matrix; any nu of its columns are independent."""
    if nu > num_colors:
        raise DimensionMismatch(f'cannot take {nu} rows from a code of length {num_colors}')
    x = field_points(num_colors, GF)
    A = GF.Zeros((nu, num_colors))
    if nu:
        A[0] = 1
    for i in range(1, nu):
        A[i] = A[i - 1] * x
    return A


def solve_vandermonde(x, b):
    """
    Solve sum_j x_j^i w_j = b_i for i < len(x) with the Bjorck-Pereyra
    recurrence. ``b`` may carry a trailing symbol axis.
    """
    b = b.copy()
    n = len(x)
    step = x if b.ndim == 1 else x[:, None]
    for k in range(n - 1):
        b[k + 1:] = b[k + 1:] - x[k] * b[k:n - 1]
    for k in range(n - 2, -1, -1):
        b[k + 1:] = b[k + 1:] / (step[k + 1:] - step[:n - k - 1])
        b[k:n - 1] = b[k:n - 1] - b[k + 1:]
    return b


@dataclass(frozen=True, eq=False)
class Codeword:
    """
    One delivery: ``payload`` holds the nu transmitted symbols.

    ``class_colors[j]`` / ``class_pids[j]`` list the (color, packet) pairs
    whose packets are summed into each class symbol.
    """
    GF: type
    points: galois.FieldArray
    generator: galois.FieldArray
    payload: galois.FieldArray
    colors: np.ndarray
    class_colors: np.ndarray
    class_pids: np.ndarray

    @property
    def nu(self):
        return int(self.generator.shape[0])

    @property
    def num_colors(self):
        return int(self.points.size)

    def vertex_generator(self):
        """G: one coding vector per vertex, the column of its color."""
        return self.generator[:, self.colors - 1]


def packet_symbols(graph, packets, GF):
    """Payload symbols of the graph's packets, in packet-table order."""
    if isinstance(packets, dict):
        try:
            rows = [packets[(int(f) + 1, int(b) + 1)] for f, b in zip(graph.packet_files, graph.packet_indices)]
        except KeyError as exc:
            raise MissingPayload(f'no payload for packet {exc.args[0]}') from None
        if not rows:
            return GF.Zeros(0)
        return GF(np.stack([np.asarray(r) for r in rows]))
    library = packets
    if library.ndim < 2 or graph.num_packets and (
        graph.packet_files.max() >= library.shape[0] or graph.packet_indices.max() >= library.shape[1]
    ):
        raise MissingPayload(f'library of shape {library.shape} does not cover every requested packet')
    return GF(library[graph.packet_files, graph.packet_indices])


def _class_sums(GF, colors, pids, symbols, num_colors):
    """XOR each listed packet symbol into its color's slot."""
    raw = np.asarray(symbols.view(np.ndarray))
    total = np.zeros((num_colors,) + raw.shape[1:], dtype=raw.dtype)
    if colors.size:
        np.bitwise_xor.at(total, colors - 1, raw[pids])
    return GF(total)


def encode(graph, coloring, packets, GF=None):
    GF = GF or field()
    symbols = packet_symbols(graph, packets, GF)
    K, nu = coloring.num_colors, coloring.local_value
    A = mds_generator(K, nu, GF)
    pairs = np.unique(np.stack([coloring.colors, graph.pids], axis=1), axis=0) if len(graph) else np.zeros((0, 2), dtype=np.int64)
    class_colors, class_pids = pairs[:, 0], pairs[:, 1]
    z = _class_sums(GF, class_colors, class_pids, symbols, K)
    payload = A @ z if nu else GF.Zeros((0,) + z.shape[1:])
    logger.debug('Encoded %d vertices into %d symbols over %d colors', len(graph), nu, K)
    return Codeword(
        GF=GF,
        points=field_points(K, GF),
        generator=A,
        payload=payload,
        colors=np.asarray(coloring.colors),
        class_colors=class_colors,
        class_pids=class_pids,
    )


def decode(user, codeword, cache, graph, library):
    """
    Recover every packet 1-based ``user`` requested and lacks.

    Only packets ``cache`` records at the user are read from ``library``.
    Returns {(file, packet): symbol} with 1-based ids.
    """
    u = user - 1
    GF = codeword.GF
    own = graph.user_vertices(u)
    if not own.size:
        return {}
    stored = cache.cached[u, graph.packet_files[codeword.class_pids], graph.packet_indices[codeword.class_pids]]
    unknown = np.unique(codeword.class_colors[~stored])
    k = unknown.size
    if k > codeword.nu:
        raise DecodingError(f'user {user} lacks packets of {k} colors but only {codeword.nu} symbols were sent', user=user)

    library = GF(library)
    held = stored & ~np.isin(codeword.class_colors, unknown)
    known = _class_sums(
        GF, codeword.class_colors[held], codeword.class_pids[held],
        _cached_symbols(graph, library), codeword.num_colors,
    )
    b = codeword.payload[:k] - codeword.generator[:k] @ known
    solved = solve_vandermonde(codeword.points[unknown - 1], b)

    # other members of a lacked class are stored at u, so they cancel out
    partial = _class_sums(
        GF, codeword.class_colors[stored], codeword.class_pids[stored],
        _cached_symbols(graph, library), codeword.num_colors,
    )
    missing_per_color = np.bincount(codeword.class_colors[~stored], minlength=codeword.num_colors + 1)

    recovered = {}
    for i in own:
        c = int(codeword.colors[i])
        if missing_per_color[c] != 1:
            raise DecodingError(
                f'user {user} lacks {missing_per_color[c]} packets of color {c}',
                user=user, vertex=graph.vertex(i),
            )
        symbol = solved[np.searchsorted(unknown, c)] - partial[c - 1]
        recovered[(int(graph.files[i]) + 1, int(graph.packets[i]) + 1)] = symbol
    return recovered


def _cached_symbols(graph, library):
    return library[graph.packet_files, graph.packet_indices]


def verify_full_rank(A, E=None):
    """True iff [A; E] has full column rank; E holds unit rows marking known coordinates."""
    GF = type(A)
    if E is None or len(E) == 0:
        stacked = A
    else:
        E = GF(np.asarray(E, dtype=np.int64))
        if E.ndim != 2 or E.shape[1] != A.shape[1]:
            raise DimensionMismatch(f'A has {A.shape[1]} columns, E has shape {E.shape}')
        stacked = np.vstack([A, E])
    if stacked.shape[0] < stacked.shape[1]:
        raise DimensionMismatch(f'stacked matrix {stacked.shape} is wide; rows must cover every column')
    return int(np.linalg.matrix_rank(stacked)) == stacked.shape[1]


def known_color_rows(codeword, cache, graph, user):
    """Unit rows e_c for every color a 1-based user can rebuild from its cache."""
    stored = cache.cached[user - 1, graph.packet_files[codeword.class_pids], graph.packet_indices[codeword.class_pids]]
    unknown = set(np.unique(codeword.class_colors[~stored]).tolist())
    known = [c for c in range(1, codeword.num_colors + 1) if c not in unknown]
    E = np.zeros((len(known), codeword.num_colors), dtype=np.int64)
    E[np.arange(len(known)), np.asarray(known, dtype=np.int64) - 1] = 1
    return E


def random_library(params, GF=None, rng=None, symbols=1):
    """Uniform random payload: one symbol (or ``symbols`` symbols) per packet of every file."""
    GF = GF or field()
    shape = (params.m, params.B) if symbols == 1 else (params.m, params.B, int(symbols))
    return GF.Random(shape, seed=rng)
