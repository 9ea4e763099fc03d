"""X = Y = W: the discretization error of the integral of W dW.

Every coefficient is constant, so the error has an exact per-block closed
form and serves as the reference model for moment checks.
"""

from edgeworth.models.base import GFunction, GModel, constant

NAME = "brownian_identity"


def _identity():
    return GFunction(
        value=lambda t, w: w + 0.0 * t,
        d_t=constant(0.0),
        d_w=constant(1.0),
        d_ww=constant(0.0),
        d_www=constant(0.0),
        d_tw=constant(0.0),
    )


def build(horizon: float = 1.0) -> GModel:
    return GModel(name=NAME, g_x=_identity(), g_y=_identity(), params={}, user_supplied=False)
