"""Discrete delta hedging of a call under a zero-rate Black-Scholes stock.

Y is the stock S_t = s0 exp(vol W_t - vol^2 t / 2) and X the call delta
N(d1(t, S_t)), so the integral of X dY is the continuously rebalanced hedge
and Z is the scaled discrete hedging error.  The option matures strictly
after the horizon, which keeps every coefficient smooth and bounded on [0, T].
"""

import math

import numpy as np
from scipy.stats import norm

from edgeworth.errors import InvalidModelError
from edgeworth.models.base import GFunction, GModel

NAME = "bs_delta_hedge"


def _stock(s0: float, vol: float) -> GFunction:
    def value(t, w):
        return s0 * np.exp(vol * w - 0.5 * vol * vol * t)

    return GFunction(
        value=value,
        d_t=lambda t, w: -0.5 * vol * vol * value(t, w),
        d_w=lambda t, w: vol * value(t, w),
        d_ww=lambda t, w: vol**2 * value(t, w),
        d_www=lambda t, w: vol**3 * value(t, w),
        d_tw=lambda t, w: -0.5 * vol**3 * value(t, w),
    )


def _delta(s0: float, vol: float, strike: float, maturity: float) -> GFunction:
    log_moneyness = math.log(s0 / strike) + 0.5 * vol * vol * maturity

    def d1(t, w):
        tau = maturity - t
        return (log_moneyness + vol * w - vol * vol * t) / (vol * np.sqrt(tau))

    def beta(t):
        # d d1 / dw
        return 1.0 / np.sqrt(maturity - t)

    def d1_t(t, w):
        tau = maturity - t
        return -vol / np.sqrt(tau) + d1(t, w) / (2.0 * tau)

    def d_tw(t, w):
        d = d1(t, w)
        tau = maturity - t
        return norm.pdf(d) * (0.5 * tau**-1.5 - d * d1_t(t, w) * beta(t))

    return GFunction(
        value=lambda t, w: norm.cdf(d1(t, w)),
        d_t=lambda t, w: norm.pdf(d1(t, w)) * d1_t(t, w),
        d_w=lambda t, w: norm.pdf(d1(t, w)) * beta(t),
        d_ww=lambda t, w: -d1(t, w) * norm.pdf(d1(t, w)) * beta(t) ** 2,
        d_www=lambda t, w: (d1(t, w) ** 2 - 1.0) * norm.pdf(d1(t, w)) * beta(t) ** 3,
        d_tw=d_tw,
    )


def build(
    s0: float = 1.0,
    vol: float = 0.2,
    strike: float = 1.0,
    maturity: float = 2.0,
    horizon: float = 1.0,
) -> GModel:
    if vol <= 0:
        raise InvalidModelError(f"{NAME}: vol must be positive, got {vol}")
    if s0 <= 0 or strike <= 0:
        raise InvalidModelError(f"{NAME}: s0 and strike must be positive")
    if maturity <= horizon:
        raise InvalidModelError(
            f"{NAME}: delta singular at maturity (maturity {maturity} <= horizon {horizon})"
        )
    return GModel(
        name=NAME,
        g_x=_delta(float(s0), float(vol), float(strike), float(maturity)),
        g_y=_stock(float(s0), float(vol)),
        params={"s0": s0, "vol": vol, "strike": strike, "maturity": maturity},
        user_supplied=False,
    )
