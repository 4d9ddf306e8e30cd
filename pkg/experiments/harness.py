"""
Monte Carlo runner: placement -> demands -> conflict graph -> coloring -> codec.

Every trial draws its caches, then its demands, then (when verifying) the
random library from one generator; trial generators are spawned from the
master seed, so reports depend only on (config, seed).
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dataclass_field

import numpy as np
import tablib
from rest_framework.exceptions import ValidationError

from analysis.export import format_number
from network.codec import decode, encode, field, random_library
from network.coloring import gclc_color
from network.conf import get_setting
from network.conflict import Vertex, build_conflict_graph
from network.exceptions import CacheNetError, DecodingError, InvalidParameters
from network.system import sample_demands

from .config import error_text, parse_experiment
from .schemes import Scheme
from .serializers import SweepConfigSerializer

logger = logging.getLogger(__name__)

TRIAL_HEADERS = ['trial', 'rate', 'decode_ok', 'num_vertices', 'num_packets', 'num_colors', 'local_value']
SWEEP_HEADERS = [
    'scheme', 'n', 'm', 'M', 'L', 'B', 'alpha', 'mode', 'm_tilde',
    'bound_name', 'bound', 'binding_component', 'trials', 'mean_rate', 'std_error', 'error',
]


@dataclass(frozen=True)
class TrialResult:
    """
    One delivery round. ``rate`` is nu / B in file units. ``decode_ok`` is
    None when decoding was not checked; a failed check raises instead.
    """
    rate: float
    decode_ok: bool
    num_vertices: int
    num_colors: int
    local_value: int
    num_packets: int = 0
    trial: int = 0

    def as_row(self):
        ok = '' if self.decode_ok is None else str(self.decode_ok).lower()
        return [self.trial, format_number(self.rate), ok, self.num_vertices, self.num_packets,
                self.num_colors, self.local_value]


def verify_delivery(graph, coloring, cache, params, rng, GF=None):
    """Encode a random library and check that every user recovers every packet it lacks."""
    if not len(graph):
        return True
    GF = GF or field()
    library = random_library(params, GF, rng)
    codeword = encode(graph, coloring, library, GF)
    for u in graph.active_users():
        user = int(u) + 1
        recovered = decode(user, codeword, cache, graph, library)
        expected = graph.user_vertices(u).size
        if len(recovered) != expected:
            raise DecodingError(f'user {user} recovered {len(recovered)} of {expected} packets', user=user)
        for (file_id, packet), symbol in recovered.items():
            if not np.array_equal(symbol, library[file_id - 1, packet - 1]):
                raise DecodingError(
                    f'user {user} decoded packet {file_id}:{packet} incorrectly',
                    user=user, vertex=Vertex(user, file_id, packet),
                )
    return True


def deliver(params, cache, demands, rng=None, verify=True, GF=None, trial=0):
    """Serve one demand matrix from one cache realization."""
    graph = build_conflict_graph(cache, demands, params)
    coloring = gclc_color(graph)
    decode_ok = None
    if verify:
        rng = rng if rng is not None else params.rng()
        decode_ok = verify_delivery(graph, coloring, cache, params, rng, GF)
    return TrialResult(
        rate=coloring.local_value / params.B,
        decode_ok=decode_ok,
        num_vertices=len(graph),
        num_colors=coloring.num_colors,
        local_value=coloring.local_value,
        num_packets=graph.num_packets,
        trial=trial,
    )


def run_trial(params, scheme, q, mode='iid', rng=None, verify=True, GF=None, trial=0):
    if isinstance(scheme, str):
        scheme = Scheme.parse(scheme)
    scheme = scheme.resolve(params, q)
    rng = rng if rng is not None else params.rng()
    cache = scheme.place(params, rng)
    demands = sample_demands(q, params.n, params.L, mode, rng)
    return deliver(params, cache, demands, rng=rng, verify=verify, GF=GF, trial=trial)


def _trial_task(task):
    trial, params, scheme, q, mode, seed_seq, verify, bits = task
    rng = np.random.default_rng(seed_seq)
    return run_trial(params, scheme, q, mode=mode, rng=rng, verify=verify, GF=field(bits), trial=trial)


@dataclass(frozen=True)
class ExperimentReport:
    params: object
    scheme: str
    mode: str
    seed: int
    results: tuple
    bounds: dict = dataclass_field(default_factory=dict)

    @property
    def trials(self):
        return len(self.results)

    @property
    def rates(self):
        return np.array([result.rate for result in self.results])

    @property
    def mean_rate(self):
        return math.fsum(self.rates) / self.trials

    @property
    def std_error(self):
        if self.trials < 2:
            return 0.0
        return float(np.std(self.rates, ddof=1) / math.sqrt(self.trials))

    @property
    def decode_ok(self):
        checks = [result.decode_ok for result in self.results]
        if any(check is None for check in checks):
            return None
        return all(checks)

    def fraction_above(self, limit):
        """Share of trials whose rate exceeds ``limit``."""
        return float(np.count_nonzero(self.rates > limit)) / self.trials

    def within_bound(self, bound_name=None, tolerance=None, quantile=None):
        """At least ``quantile`` of the trials lie below bound * (1 + tolerance)."""
        tolerance = get_setting('RATE_TOLERANCE') if tolerance is None else tolerance
        quantile = get_setting('RATE_QUANTILE') if quantile is None else quantile
        bound = self.bounds[bound_name] if bound_name else next(iter(self.bounds.values()))
        return 1.0 - self.fraction_above(bound.value * (1 + tolerance)) >= quantile

    def dataset(self):
        dataset = tablib.Dataset(headers=TRIAL_HEADERS)
        for result in self.results:
            dataset.append(result.as_row())
        return dataset

    def to_csv(self):
        return self.dataset().export('csv')

    def summary(self):
        return {
            'scheme': self.scheme,
            'params': self.params.as_dict(),
            'mode': self.mode,
            'trials': self.trials,
            'mean_rate': self.mean_rate,
            'std_error': self.std_error,
            'decode_ok': self.decode_ok,
            'bounds': {name: bound.value for name, bound in self.bounds.items()},
        }


def monte_carlo(params, scheme, q, trials, mode='iid', seed=None, workers=None, verify=True,
                field_bits=None, scaled_cached_mass=False):
    """
    Average ``trials`` independent rounds. Trial k uses the k-th child of
    SeedSequence(seed), seed defaulting to params.seed; results are ordered
    by trial whatever the worker count.
    """
    if trials < 1:
        raise InvalidParameters(f'need at least one trial, got {trials}')
    if isinstance(scheme, str):
        scheme = Scheme.parse(scheme)
    scheme = scheme.resolve(params, q)
    seed = params.seed if seed is None else int(seed)
    workers = get_setting('WORKERS') if workers is None else int(workers)
    bits = get_setting('FIELD_BITS') if field_bits is None else int(field_bits)

    children = np.random.SeedSequence(seed).spawn(trials)
    tasks = [(k, params, scheme, q, mode, child, verify, bits) for k, child in enumerate(children)]
    logger.info('Running %d trials of %s at %s (%s demands, %d workers)', trials, scheme.label, params, mode, workers)
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_task, tasks))
    else:
        results = [_trial_task(task) for task in tasks]

    report = ExperimentReport(
        params=params,
        scheme=scheme.label,
        mode=mode,
        seed=seed,
        results=tuple(results),
        bounds=scheme.bounds(params, q, scaled_cached_mass=scaled_cached_mass),
    )
    logger.info('%s: mean rate %.6g +/- %.3g over %d trials', scheme.label, report.mean_rate, report.std_error, trials)
    return report


def grid_points(grid):
    """Cartesian product of the grid axes in the order given; no axes means no points."""
    if not grid:
        return []
    axes = list(grid)
    return [dict(zip(axes, values)) for values in itertools.product(*(grid[axis] for axis in axes))]


def _point_data(base, point, scheme):
    data = {**base, **point}
    data['scheme'] = scheme.kind
    if scheme.kind == 'rlfu':
        if scheme.m_tilde is not None:
            data['m_tilde'] = scheme.m_tilde
    else:
        data.pop('m_tilde', None)
    if scheme.kind != 'rap':
        data.pop('p', None)
    return data


def sweep(config, base_dir=None, workers=None, verify=True):
    """
    One row per grid point per scheme. Points that cannot be run carry the
    reason in the ``error`` column; a decoding failure aborts the sweep.
    """
    serializer = SweepConfigSerializer(data=config)
    serializer.is_valid(raise_exception=True)
    valid = serializer.validated_data
    base = dict(valid['base'])
    if 'trials' in valid:
        base['trials'] = valid['trials']
    if 'seed' in valid:
        base['seed'] = valid['seed']
    run = valid['run']
    schemes = [Scheme.parse(text) for text in valid['schemes']]

    dataset = tablib.Dataset(headers=SWEEP_HEADERS)
    points = grid_points(valid['grid'])
    logger.info('Sweep over %d grid points x %d schemes (%s)', len(points), len(schemes), run)
    for point in points:
        for scheme in schemes:
            data = _point_data(base, point, scheme)
            row = dict.fromkeys(SWEEP_HEADERS, '')
            row.update({key: format_number(data.get(key)) for key in ('n', 'm', 'M', 'L', 'B', 'alpha', 'mode')})
            row['scheme'] = scheme.label
            try:
                experiment = parse_experiment(data, base_dir=base_dir)
                params, q = experiment.params, experiment.q
                resolved = experiment.scheme.resolve(params, q)
                row['scheme'] = resolved.label
                row['B'] = params.B
                row['mode'] = experiment.mode
                row['m_tilde'] = format_number(resolved.m_tilde if resolved.kind == 'rlfu' else None)
                if run in ('analytical', 'both'):
                    name, bound = next(iter(resolved.bounds(params, q, experiment.scaled_cached_mass).items()))
                    row.update(bound_name=name, bound=format_number(bound.value),
                               binding_component=bound.binding_component)
                if run in ('empirical', 'both'):
                    report = monte_carlo(
                        params, resolved, q, experiment.trials, mode=experiment.mode, workers=workers,
                        verify=verify, field_bits=experiment.field_bits,
                    )
                    row.update(trials=report.trials, mean_rate=format_number(report.mean_rate),
                               std_error=format_number(report.std_error))
            except DecodingError:
                raise
            except (CacheNetError, ValidationError) as exc:
                row['error'] = error_text(exc)
                logger.warning('Grid point %s with %s skipped: %s', point, scheme.label, row['error'])
            dataset.append([row[header] for header in SWEEP_HEADERS])
    return dataset
