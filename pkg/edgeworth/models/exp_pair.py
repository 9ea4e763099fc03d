"""g_X = exp(a w + b t), g_Y = exp(c w + d t).

Smooth with derivatives of exponential growth in w, so the expansion
hypotheses hold on any finite horizon.  Theta vanishes when d = -c^2 / 2.
"""

import numpy as np

from edgeworth.errors import InvalidModelError
from edgeworth.models.base import GFunction, GModel

NAME = "exp_pair"


def _exponential(a: float, b: float) -> GFunction:
    def value(t, w):
        return np.exp(a * w + b * t)

    return GFunction(
        value=value,
        d_t=lambda t, w: b * value(t, w),
        d_w=lambda t, w: a * value(t, w),
        d_ww=lambda t, w: a * a * value(t, w),
        d_www=lambda t, w: a * a * a * value(t, w),
        d_tw=lambda t, w: a * b * value(t, w),
    )


def build(a: float, b: float, c: float, d: float, horizon: float = 1.0) -> GModel:
    if a == 0 or c == 0:
        raise InvalidModelError(
            f"{NAME}: gamma * sigma is identically zero (a={a}, c={c})"
        )
    return GModel(
        name=NAME,
        g_x=_exponential(float(a), float(b)),
        g_y=_exponential(float(c), float(d)),
        params={"a": a, "b": b, "c": c, "d": d},
        user_supplied=False,
    )
