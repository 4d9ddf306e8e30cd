"""CSV export of bound values."""
import math

import tablib

BOUND_HEADERS = ['scheme', 'n', 'm', 'M', 'L', 'alpha', 'm_tilde', 'value', 'binding_component']


def format_number(value):
    """Shortest round-tripping text for floats; integers stay integers."""
    if value is None:
        return ''
    if isinstance(value, float):
        if math.isfinite(value) and value == int(value) and abs(value) < 2 ** 53:
            return str(int(value))
        return repr(value)
    return str(value)


def bound_row(bound, params, alpha=None, name=None):
    """One CSV row; with ``name`` the scheme column reads scheme:name, e.g. up:thm2."""
    return [
        f'{bound.scheme}:{name}' if name else bound.scheme,
        params.n,
        params.m,
        format_number(float(params.M)),
        params.L,
        format_number(alpha),
        format_number(bound.m_tilde),
        format_number(bound.value),
        bound.binding_component,
    ]


def bounds_dataset(rows=()):
    dataset = tablib.Dataset(headers=BOUND_HEADERS)
    for row in rows:
        dataset.append(row)
    return dataset
