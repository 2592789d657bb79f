"""Python bindings for the MW-UCB scheduling simulator."""

from ._mwucb import (
    Config,
    Topology,
    __version__,
    coupled_run,
    default_hyperparams,
    enumerate_activations,
    expand_preset,
    is_admissible,
    load_config,
    max_weight_activation,
    parse_config,
    preset_names,
    run,
    run_experiment,
    selftest,
    summarize,
)

__all__ = [
    "Config",
    "Topology",
    "__version__",
    "coupled_run",
    "default_hyperparams",
    "enumerate_activations",
    "expand_preset",
    "is_admissible",
    "load_config",
    "max_weight_activation",
    "parse_config",
    "preset_names",
    "run",
    "run_experiment",
    "selftest",
    "summarize",
]
