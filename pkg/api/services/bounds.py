"""
Desk-scale limits shared by the ``nc`` command and the REST views.
"""
from django.conf import settings

from .errors import BoundExceeded

ENUMERATE = 'FREECALC_MAX_ENUMERATE_K'
WEINGARTEN = 'FREECALC_MAX_WEINGARTEN_K'
MODEL = 'FREECALC_MAX_MODEL_ORDER'

DEFAULTS = {ENUMERATE: 6, WEINGARTEN: 8, MODEL: 4}

SUITE_BOUNDS = {
    'fatfacts': {'k': ENUMERATE},
    'mobius': {'k': ENUMERATE},
    'weingarten-asymptotics': {'k': WEINGARTEN, 'K': WEINGARTEN},
}


def bound(setting):
    return getattr(settings, setting, DEFAULTS[setting])


def check_bound(name, value, setting, force=False):
    limit = bound(setting)
    if not force and value > limit:
        raise BoundExceeded(name, value, limit)


def check_suite_params(suite_id, params, force=False):
    limits = SUITE_BOUNDS.get(suite_id, {'k': MODEL, 'K': MODEL})
    for key, setting in limits.items():
        if params.get(key) is not None:
            check_bound(key, int(params[key]), setting, force)
