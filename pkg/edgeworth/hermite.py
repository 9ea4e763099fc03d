# edgeworth/hermite.py
"""Variance-parameterized Gaussian density, Hermite polynomials and the
first-order expansion density.

Everything here is written against the variance ``v`` rather than the
standard deviation, matching phi(z, v) = (2 pi v)^(-1/2) exp(-z^2 / 2v) and
H_k(z, v) = (-1)^k / phi * d^k/dz^k phi.  All functions broadcast over numpy
arrays and are pure.
"""

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss

from edgeworth import config
from edgeworth.errors import NonFiniteInputError, UnsupportedOrderError

logger = logging.getLogger(__name__)

MAX_HERMITE_ORDER = 8
EXPANSION_ORDERS = (1, 3, 5)


def check_variance(v):
    """Return ``v`` as a float array, rejecting non-finite or non-positive values."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise NonFiniteInputError("non-finite input: variance")
    if np.any(v <= 0.0):
        raise ValueError(f"variance must be strictly positive, got min {v.min()}")
    return v


def check_order(k: int, max_order: int = MAX_HERMITE_ORDER) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 0:
        raise UnsupportedOrderError(f"order must be a non-negative integer, got {k!r}")
    if k > max_order:
        raise UnsupportedOrderError(f"unsupported order {k} (maximum {max_order})")
    return int(k)


def _check_finite(z):
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInputError("non-finite input: z")
    return z


def gaussian_pdf(z, v):
    """phi(z, v): the centred Gaussian density with variance ``v``."""
    z = _check_finite(z)
    v = check_variance(v)
    out = np.exp(-(z * z) / (2.0 * v)) / np.sqrt(2.0 * np.pi * v)
    return out if out.ndim else float(out)


def hermite_h(k: int, z, v):
    """H_k(z, v) by the three-term recurrence in (z/v, 1/v)."""
    k = check_order(k)
    z = _check_finite(z)
    v = check_variance(v)

    ratio = z / v
    inv_v = 1.0 / v
    h_prev = np.ones(np.broadcast(z, v).shape)
    if k == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = ratio * np.ones_like(h_prev)
    for j in range(1, k):
        h_prev, h = h, ratio * h - j * inv_v * h_prev
    return h if h.ndim else float(h)


def qn_density(z, v0, a1, a3, a5, n):
    """Q_n(z) = {1 + n^(-1/2) (A1 H1 + A3 H3 + A5 H5)} phi(z, V0).

    Not a density: it integrates to one but goes negative in the tails for
    large coefficients.  It is never clamped, clamping breaks the moments.
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    correction = (
        a1 * hermite_h(1, z, v0) + a3 * hermite_h(3, z, v0) + a5 * hermite_h(5, z, v0)
    )
    return (1.0 + correction / np.sqrt(n)) * gaussian_pdf(z, v0)


@lru_cache(maxsize=16)
def gauss_hermite_rule(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E[g(X)], X ~ N(0, 1/2) scaled back to sqrt(pi)."""
    if nodes < 2:
        raise ValueError(f"need at least 2 quadrature nodes, got {nodes}")
    x, w = hermgauss(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gaussian_expectation(
    func: Callable[[np.ndarray], np.ndarray],
    v,
    shift=0.0,
    nodes: int = config.QUADRATURE_NODES,
):
    """E[func(shift + Z)], Z ~ N(0, v), by Gauss-Hermite with z = sqrt(2v) x.

    ``v`` and ``shift`` may be arrays; the quadrature axis is appended last.
    """
    v = check_variance(v)
    shift = np.asarray(shift, dtype=float)
    x, w = gauss_hermite_rule(nodes)
    z = shift[..., None] + np.sqrt(2.0 * v)[..., None] * x
    out = (w * func(z)).sum(axis=-1) / np.sqrt(np.pi)
    return out if out.ndim else float(out)


def pair_integral(f, k: int, v, shift=0.0, nodes: int = config.QUADRATURE_NODES):
    """Integral of f(z) H_k(z - shift, v) phi(z - shift, v) dz.

    Integration by parts turns the pairing into E[f^(k)(shift + Z)],
    Z ~ N(0, v), which ``f`` evaluates in closed form or by quadrature.
    """
    k = check_order(k)
    return f.gaussian_expectation(k, v, shift, nodes)


def direct_pairing(f, k: int, v, shift=0.0, nodes: int = config.QUADRATURE_NODES):
    """The same pairing integrated literally, without moving derivatives onto f."""
    k = check_order(k)
    v = check_variance(v)
    return gaussian_expectation(
        lambda z: f(z) * hermite_h(k, z - np.asarray(shift)[..., None], v[..., None]),
        v,
        shift,
        nodes,
    )


def heat_smoothed(f, v, x=0.0, nodes: int = config.QUADRATURE_NODES):
    """q(v, x) = integral of f(z) phi(x - z, v) dz, the heat flow of f."""
    return pair_integral(f, 0, v, x, nodes)


def expansion_value(f, v0, a1, a3, a5, n, nodes: int = config.QUADRATURE_NODES):
    """Integral of f against Q_n for one draw of (V0, A1, A3, A5).

    Vectorizes over arrays of coefficients, one entry per path.
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    correction = (
        a1 * pair_integral(f, 1, v0, nodes=nodes)
        + a3 * pair_integral(f, 3, v0, nodes=nodes)
        + a5 * pair_integral(f, 5, v0, nodes=nodes)
    )
    return pair_integral(f, 0, v0, nodes=nodes) + correction / np.sqrt(n)
