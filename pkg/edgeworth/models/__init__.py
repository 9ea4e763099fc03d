"""Built-in model registry."""

import inspect
import math
from typing import Any, Dict, Optional

from edgeworth.errors import InvalidModelError, ResolutionError
from edgeworth.models import bs_delta_hedge, brownian_identity, exp_pair, linear_pair
from edgeworth.models.base import (
    CoefficientPoint,
    GFunction,
    GModel,
    Partials,
    PartialsPair,
    eval_coefficients,
    finite_diff_partials,
)

models = {
    brownian_identity.NAME: brownian_identity.build,
    exp_pair.NAME: exp_pair.build,
    bs_delta_hedge.NAME: bs_delta_hedge.build,
    linear_pair.NAME: linear_pair.build,
}


def make_builtin(name: str, params: Optional[Dict[str, Any]] = None, horizon: float = 1.0) -> GModel:
    """Build a registered model; ``horizon`` is the simulation horizon T."""
    builder = models.get(name)
    if builder is None:
        raise ResolutionError(f"unknown model '{name}' (known: {sorted(models)})")

    params = dict(params or {})
    accepted = set(inspect.signature(builder).parameters) - {"horizon"}
    unknown = set(params) - accepted
    if unknown:
        raise InvalidModelError(f"model {name}: unknown parameters {sorted(unknown)}")
    for key, value in params.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidModelError(f"model {name}: parameter '{key}' must be a finite number, got {value!r}")
    try:
        return builder(**params, horizon=horizon)
    except TypeError as e:
        raise InvalidModelError(f"model {name}: {e}") from e


__all__ = [
    "CoefficientPoint",
    "GFunction",
    "GModel",
    "Partials",
    "PartialsPair",
    "eval_coefficients",
    "finite_diff_partials",
    "make_builtin",
    "models",
]
