"""g_X = gx (1 + kx t) w, g_Y = gy (1 + ky t) w.

Gamma and Sigma are deterministic functions of time, so V0 is deterministic,
the anticipating terms vanish and the expansion reduces to the classical
Edgeworth form.
"""

import numpy as np

from edgeworth.errors import InvalidModelError
from edgeworth.models.base import GFunction, GModel, constant

NAME = "linear_pair"


def _linear(g: float, k: float) -> GFunction:
    return GFunction(
        value=lambda t, w: g * (1.0 + k * t) * w,
        d_t=lambda t, w: g * k * w + 0.0 * t,
        d_w=lambda t, w: g * (1.0 + k * t) + 0.0 * np.asarray(w),
        d_ww=constant(0.0),
        d_www=constant(0.0),
        d_tw=constant(g * k),
    )


def build(gx: float, kx: float, gy: float, ky: float, horizon: float = 1.0) -> GModel:
    if gx == 0 or gy == 0:
        raise InvalidModelError(f"{NAME}: gamma * sigma is identically zero")
    for name, k in (("kx", kx), ("ky", ky)):
        if 1.0 + k * horizon <= 0.0:
            raise InvalidModelError(f"{NAME}: slope factor 1 + {name} t vanishes on [0, T]")
    return GModel(
        name=NAME,
        g_x=_linear(float(gx), float(kx)),
        g_y=_linear(float(gy), float(ky)),
        params={"gx": gx, "kx": kx, "gy": gy, "ky": ky},
        user_supplied=False,
    )
