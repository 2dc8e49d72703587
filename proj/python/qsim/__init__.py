"""Python bindings for the qsim epidemic simulator.

Configurations are JSON documents (see the README for the schema); every
function accepts either a dict or a JSON string.
"""

import json as _json

from . import _qsim
from ._qsim import IoError, NumericalError, ValidationError, figure, figure_ids

__all__ = [
    "IoError",
    "NumericalError",
    "ValidationError",
    "cost_ratio",
    "figure",
    "figure_ids",
    "match_peak",
    "normalize_config",
    "peak",
    "simulate",
    "sweep",
]


def _text(config):
    if config is None:
        return "{}"
    return config if isinstance(config, str) else _json.dumps(config)


def normalize_config(config=None):
    return _json.loads(_qsim.normalize_config(_text(config)))


def simulate(config=None):
    return _qsim.simulate(_text(config))


def peak(config=None, observable="total_infected"):
    return _qsim.peak(_text(config), observable)


def match_peak(config=None, strategy="abrupt", psi=0.1):
    return _qsim.match_peak(_text(config), strategy, psi)


def cost_ratio(config=None, psi=0.1, strategy="abrupt"):
    return _qsim.cost_ratio(_text(config), psi, strategy)


def sweep(config, threads=0):
    return _qsim.sweep(_text(config), threads)
