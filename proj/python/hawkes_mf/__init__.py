"""Hawkes processes on Erdos-Renyi graphs: simulation, mean-field limits and
statistical verification. Thin layer over the compiled ``_core`` module."""

import json as _json

from ._core import (  # noqa: F401
    CapabilityError,
    ConfigError,
    ContractError,
    DomainError,
    Kernel,
    Network,
    ParameterError,
    RegimeError,
    SchemeMismatchError,
    StateError,
    StepSizeError,
    TransferFunction,
    __version__,
    build_complementary_network,
    experiment_names,
    fixed_point,
    main,
    sample_network,
    simulate,
    simulate_fluctuations,
    solve_mean_field,
    weight_statistics,
)
from . import _core


def verify(config, experiment="", jobs=1):
    """Run a verification experiment from a config dict; returns the report dict."""
    return _json.loads(_core._verify_json(_json.dumps(config), experiment, jobs))
