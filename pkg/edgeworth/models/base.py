# edgeworth/models/base.py
"""The Ito pair X_t = g_X(t, W_t), Y_t = g_Y(t, W_t) and its coefficient processes."""

import logging
from dataclasses import dataclass, field, fields
from typing import Any, Callable, Dict, Optional

import numpy as np

from edgeworth.errors import ModelEvaluationError

logger = logging.getLogger(__name__)

PartialFn = Callable[[Any, Any], Any]

PARTIAL_NAMES = ("value", "d_t", "d_w", "d_ww", "d_www", "d_tw")

# Central-difference step per derivative order
FD_STEPS = {1: 1e-5, 2: 1e-4, 3: 1e-3}


def constant(c: float) -> PartialFn:
    """A partial that is identically ``c``, broadcast to the (t, w) shape."""

    def partial(t, w):
        shape = np.broadcast(np.asarray(t), np.asarray(w)).shape
        return np.full(shape, float(c)) if shape else float(c)

    return partial


@dataclass(frozen=True)
class GFunction:
    """A scalar function g(t, w) together with its closed-form partials.

    Every callable takes broadcastable (t, w) and must be vectorized.
    """

    value: PartialFn
    d_t: PartialFn
    d_w: PartialFn
    d_ww: PartialFn
    d_www: PartialFn
    d_tw: PartialFn


@dataclass(frozen=True)
class Partials:
    value: Any
    d_t: Any
    d_w: Any
    d_ww: Any
    d_www: Any
    d_tw: Any


@dataclass(frozen=True)
class PartialsPair:
    g_x: Partials
    g_y: Partials


@dataclass(frozen=True)
class GModel:
    """An immutable Markovian Ito pair.

    Built-ins document why they meet the smoothness and growth hypotheses;
    a directly constructed model has ``user_supplied=True`` and reports
    mark its hypotheses as asserted by the user.
    """

    name: str
    g_x: GFunction
    g_y: GFunction
    params: Dict[str, Any] = field(default_factory=dict)
    user_supplied: bool = True

    def describe(self) -> str:
        args = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})" if args else self.name


@dataclass(frozen=True)
class CoefficientPoint:
    """Coefficient processes of the pair at (t, w); fields broadcast together.

    xi, theta are the drifts of X, Y; gamma, sigma their diffusions;
    d_plus_theta, d_plus_sigma the forward-limit Malliavin derivatives of
    theta and sigma; d1_gs, d2_gs the first two w-derivatives of
    gamma^2 sigma^2.
    """

    xi: Any
    theta: Any
    gamma: Any
    sigma: Any
    d_plus_theta: Any
    d_plus_sigma: Any
    d1_gs: Any
    d2_gs: Any
    x_val: Any
    y_val: Any

    def as_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _evaluate(model: GModel, which: str, partial: str, t, w):
    g = getattr(model, which)
    out = getattr(g, partial)(t, w)
    if not np.all(np.isfinite(out)):
        raise ModelEvaluationError(f"model {model.name}: non-finite {which}.{partial}")
    return out


def analytic_partials(model: GModel, which: str, t, w) -> Partials:
    return Partials(*(_evaluate(model, which, name, t, w) for name in PARTIAL_NAMES))


def eval_coefficients(model: GModel, t, w) -> CoefficientPoint:
    """Ito's lemma applied to g_X, g_Y, plus the Malliavin derivatives
    D_t F = d_w h(s, W_s) of the Markovian class."""
    px = analytic_partials(model, "g_x", t, w)
    py = analytic_partials(model, "g_y", t, w)

    gamma, sigma = px.d_w, py.d_w
    product = gamma * sigma
    product_w = px.d_ww * sigma + gamma * py.d_ww
    product_ww = px.d_www * sigma + 2.0 * px.d_ww * py.d_ww + gamma * py.d_www

    return CoefficientPoint(
        xi=px.d_t + 0.5 * px.d_ww,
        theta=py.d_t + 0.5 * py.d_ww,
        gamma=gamma,
        sigma=sigma,
        d_plus_theta=py.d_tw + 0.5 * py.d_www,
        d_plus_sigma=py.d_ww,
        d1_gs=2.0 * product * product_w,
        d2_gs=2.0 * (product_w * product_w + product * product_ww),
        x_val=px.value,
        y_val=py.value,
    )


def _fd_partials(g: Callable, t, w, steps: Dict[int, float]) -> Partials:
    h1, h2, h3 = steps[1], steps[2], steps[3]
    return Partials(
        value=g(t, w),
        d_t=(g(t + h1, w) - g(t - h1, w)) / (2.0 * h1),
        d_w=(g(t, w + h1) - g(t, w - h1)) / (2.0 * h1),
        d_ww=(g(t, w + h2) - 2.0 * g(t, w) + g(t, w - h2)) / (h2 * h2),
        d_www=(g(t, w + 2 * h3) - 2.0 * g(t, w + h3) + 2.0 * g(t, w - h3) - g(t, w - 2 * h3))
        / (2.0 * h3**3),
        d_tw=(g(t + h2, w + h2) - g(t + h2, w - h2) - g(t - h2, w + h2) + g(t - h2, w - h2))
        / (4.0 * h2 * h2),
    )


def finite_diff_partials(model: GModel, t, w, step: Optional[float] = None) -> PartialsPair:
    """Central-difference estimates of every partial of g_X and g_Y.

    With ``step=None`` each derivative order uses its own step from
    ``FD_STEPS``; otherwise ``step`` is used throughout.
    """
    if step is not None and step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    steps = FD_STEPS if step is None else {1: step, 2: step, 3: step}
    return PartialsPair(
        g_x=_fd_partials(model.g_x.value, t, w, steps),
        g_y=_fd_partials(model.g_y.value, t, w, steps),
    )
