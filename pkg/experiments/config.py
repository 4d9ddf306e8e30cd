"""
Loading experiment configs: JSON file -> serializer -> Experiment.

A config holds {n, m, M, L, B, alpha | q_file | q, mode, seed} plus the run
options scheme, m_tilde, p, trials, scaled_cached_mass and field_bits.
Without alpha, q_file or q the demand is uniform.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from rest_framework.exceptions import ValidationError

from network.exceptions import CacheNetError
from network.system import DemandDistribution, SystemParams, load_distribution, zipf

from .schemes import Scheme
from .serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Experiment:
    params: SystemParams
    q: DemandDistribution
    alpha: float
    scheme: Scheme
    mode: str
    trials: int
    scaled_cached_mass: bool = False
    field_bits: int = 16
    m_tilde: int = None


def read_json(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise ValidationError(f'cannot read config {path}: {exc.strerror}') from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f'{path} is not valid JSON: {exc}') from exc


def demand_distribution(data, base_dir=None):
    """q from validated config data, in the order alpha, q_file, q, uniform."""
    m = data['m']
    if 'q_file' in data:
        path = Path(data['q_file'])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        try:
            q = load_distribution(path)
        except OSError as exc:
            raise ValidationError({'q_file': f'cannot read {path}: {exc.strerror}'}) from exc
        if q.m != m:
            raise ValidationError({'q_file': f'{path} lists {q.m} probabilities, the library has {m} files'})
        return q
    if 'q' in data:
        return DemandDistribution.from_weights(data['q'])
    return zipf(m, data.get('alpha', 0.0))


def parse_experiment(data, base_dir=None, **overrides):
    """Validate a config dict, apply non-None overrides, and build the Experiment."""
    merged = dict(data)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    serializer = ExperimentConfigSerializer(data=merged)
    serializer.is_valid(raise_exception=True)
    valid = serializer.validated_data
    try:
        params = SystemParams(
            n=valid['n'], m=valid['m'], M=valid['M'], L=valid['L'], B=valid['B'], seed=valid['seed'],
        )
        q = demand_distribution(valid, base_dir=base_dir)
        cutoff = valid.get('m_tilde') if valid['scheme'] == 'rlfu' else None
        scheme = Scheme.parse(valid['scheme'], m_tilde=cutoff, p=valid.get('p'))
    except CacheNetError as exc:
        raise ValidationError(str(exc)) from exc
    return Experiment(
        params=params,
        q=q,
        alpha=valid.get('alpha', 0.0 if 'q_file' not in valid and 'q' not in valid else None),
        scheme=scheme,
        mode=valid['mode'],
        trials=valid['trials'],
        scaled_cached_mass=valid['scaled_cached_mass'],
        field_bits=valid['field_bits'],
        m_tilde=valid.get('m_tilde'),
    )


def load_experiment(path, **overrides):
    data = read_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f'{path} must hold a JSON object')
    return parse_experiment(data, base_dir=Path(path).parent, **overrides)


def load_sweep(path, **overrides):
    """Raw sweep config plus the directory relative q_file paths resolve against."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f'{path} must hold a JSON object')
    data.update({key: value for key, value in overrides.items() if value is not None})
    return data, Path(path).parent


def error_text(exc):
    """One line describing a validation or simulator error."""
    if isinstance(exc, ValidationError):
        detail = exc.detail
        if isinstance(detail, dict):
            parts = []
            for key, value in detail.items():
                messages = value if isinstance(value, list) else [value]
                parts.append(f'{key}: {" ".join(str(message) for message in messages)}')
            return '; '.join(parts)
        if isinstance(detail, list):
            return ' '.join(str(item) for item in detail)
        return str(detail)
    return str(exc)


def write_csv(text, path):
    """Write exported CSV text unchanged (tablib already uses CRLF row endings)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as handle:
        handle.write(text)
    return path
