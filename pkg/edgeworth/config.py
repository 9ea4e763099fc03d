# edgeworth/config.py
"""Configuration for the expansion engine."""

import json
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple, Union

from dotenv import load_dotenv

from edgeworth.errors import ConfigError

load_dotenv()

# Worker pool and work-unit sizing
THREADS = int(os.environ.get("EDGEWORTH_THREADS", os.cpu_count() or 1))
BATCH_SIZE = int(os.environ.get("EDGEWORTH_BATCH_SIZE", 256))
MAX_BATCH_POINTS = int(os.environ.get("EDGEWORTH_MAX_BATCH_POINTS", 2**22))

# Numerics
QUADRATURE_NODES = int(os.environ.get("EDGEWORTH_QUADRATURE_NODES", 64))
MAX_GRID_POINTS = 2**26

# Output
SHOW_PROGRESS = os.environ.get("EDGEWORTH_PROGRESS", "1") == "1"
LOG_FILE = os.environ.get("EDGEWORTH_LOG_FILE")
SCHEMA_VERSION = 1

# Experiment limits
MIN_PATHS = 100
MODES = ("coupled", "independent")


@dataclass(frozen=True)
class ComponentSpec:
    """A named model or test function plus its parameter record."""

    name: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    model: ComponentSpec
    test_function: Optional[ComponentSpec] = None
    horizon: float = 1.0
    n_list: Tuple[int, ...] = (4, 16, 64)
    m: Union[int, str] = "auto"
    paths: int = 10_000
    seed: int = 0
    mode: str = "coupled"
    antithetic: bool = False
    threads: int = THREADS
    quadrature_nodes: int = QUADRATURE_NODES
    output: str = "report.csv"


def _component(raw: Dict[str, Any], key: str, name_key: str) -> ComponentSpec:
    if key not in raw:
        raise ConfigError(f"missing key '{key}'")
    value = raw[key]
    if isinstance(value, str):
        return ComponentSpec(value)
    if not isinstance(value, dict) or name_key not in value:
        raise ConfigError(f"key '{key}' must be a name or an object with '{name_key}'")
    params = value.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"key '{key}.params' must be an object")
    return ComponentSpec(str(value[name_key]), dict(params))


def _integer(raw: Dict[str, Any], key: str, default: int) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"key '{key}' must be an integer")
    return value


def parse_experiment_config(raw: Dict[str, Any], require_test_function: bool = True) -> ExperimentConfig:
    """Validate a decoded config mapping and build an ExperimentConfig.

    The CLT check never evaluates f, so it parses with ``require_test_function=False``.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    model = _component(raw, "model", "name")
    test_function = None
    if require_test_function or "test_function" in raw:
        test_function = _component(raw, "test_function", "id")

    horizon = raw.get("horizon", 1.0)
    if isinstance(horizon, bool) or not isinstance(horizon, (int, float)) or horizon <= 0:
        raise ConfigError("key 'horizon' must be a positive number")

    n_list = raw.get("n_list")
    if n_list is None:
        raise ConfigError("missing key 'n_list'")
    if (
        not isinstance(n_list, list)
        or not n_list
        or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in n_list)
    ):
        raise ConfigError("key 'n_list' must be a non-empty list of positive integers")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("key 'n_list' must be strictly ascending")

    m = raw.get("m", "auto")
    if m != "auto" and (isinstance(m, bool) or not isinstance(m, int) or m < 2):
        raise ConfigError("key 'm' must be 'auto' or an integer >= 2")

    paths = _integer(raw, "paths", 10_000)
    if paths < MIN_PATHS:
        raise ConfigError(f"key 'paths': paths below minimum ({paths} < {MIN_PATHS})")

    seed = _integer(raw, "seed", 0)
    if not 0 <= seed < 2**64:
        raise ConfigError("key 'seed' must fit in 64 unsigned bits")

    mode = raw.get("mode", "coupled")
    if mode not in MODES:
        raise ConfigError(f"key 'mode' must be one of {MODES}")

    antithetic = raw.get("antithetic", False)
    if not isinstance(antithetic, bool):
        raise ConfigError("key 'antithetic' must be a boolean")
    if antithetic and paths % 2:
        raise ConfigError("key 'paths' must be even in antithetic mode")

    threads = _integer(raw, "threads", THREADS)
    if threads < 1:
        raise ConfigError("key 'threads' must be positive")

    nodes = _integer(raw, "quadrature_nodes", QUADRATURE_NODES)
    if nodes < 2:
        raise ConfigError("key 'quadrature_nodes' must be at least 2")

    output = raw.get("output", "report.csv")
    if not isinstance(output, str) or not output:
        raise ConfigError("key 'output' must be a file path")

    return ExperimentConfig(
        model=model,
        test_function=test_function,
        horizon=float(horizon),
        n_list=tuple(n_list),
        m=m,
        paths=paths,
        seed=seed,
        mode=mode,
        antithetic=antithetic,
        threads=threads,
        quadrature_nodes=nodes,
        output=output,
    )


def load_experiment_config(
    path: str,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    output: Optional[str] = None,
    require_test_function: bool = True,
) -> ExperimentConfig:
    """Read a JSON experiment file and apply command-line overrides."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config parse error in {path}: {e}") from e

    experiment = parse_experiment_config(raw, require_test_function)

    overrides = {}
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ConfigError("key 'seed' must fit in 64 unsigned bits")
        overrides["seed"] = seed
    if threads is not None:
        if threads < 1:
            raise ConfigError("key 'threads' must be positive")
        overrides["threads"] = threads
    if output is not None:
        overrides["output"] = output
    return replace(experiment, **overrides) if overrides else experiment
