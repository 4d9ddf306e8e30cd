from django.conf import settings

DEFAULTS = {
    'FIELD_BITS': 16,
    'DEFAULT_TRIALS': 100,
    'DEFAULT_SEED': 0,
    'RATE_TOLERANCE': 0.05,
    'RATE_QUANTILE': 0.95,
    'EXACT_LOCAL_LIMIT': 12,
    'ENUMERATION_LIMIT': 2000,
    'WORKERS': 1,
}


def get_setting(key):
    """Read a simulator default from settings.CACHENET, falling back to DEFAULTS."""
    overrides = getattr(settings, 'CACHENET', {})
    if key in overrides:
        return overrides[key]
    return DEFAULTS[key]
