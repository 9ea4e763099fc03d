# edgeworth/observables.py
"""Test functions f for E[f(Z)], with analytic derivatives up to order 5."""

import logging
import math
from dataclasses import dataclass, fields
from typing import Any, Dict, List

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite_e import hermeval
from scipy.special import expit

from edgeworth import config
from edgeworth.errors import ConfigError, ResolutionError
from edgeworth.hermite import check_order, check_variance, gaussian_expectation

logger = logging.getLogger(__name__)

MAX_DERIVATIVE_ORDER = 5
MAX_MONOMIAL_DEGREE = 6


class TestFunction:
    """A registered test function.

    ``gaussian_expectation(k, v, shift)`` returns E[f^(k)(shift + Z)] with
    Z ~ N(0, v); by integration by parts this is the pairing
    integral of f against H_k(z - shift, v) phi(z - shift, v).
    """

    __test__ = False  # not a pytest class

    id: str = ""
    diagnostic_only = False

    def derivative(self, k: int, z):
        raise NotImplementedError

    def __call__(self, z):
        return self.derivative(0, z)

    def gaussian_expectation(self, k: int, v, shift=0.0, nodes: int = config.QUADRATURE_NODES):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        return gaussian_expectation(lambda z: self.derivative(k, z), v, shift, nodes)

    @property
    def label(self) -> str:
        return self.id


@dataclass(frozen=True)
class CosShifted(TestFunction):
    """z -> cos(a (z - c))."""

    a: float = 1.0
    c: float = 0.0
    id = "cos_shifted"

    def derivative(self, k, z):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        return self.a**k * _cos_quarter_turns(self.a * (np.asarray(z) - self.c), k)

    def gaussian_expectation(self, k, v, shift=0.0, nodes=config.QUADRATURE_NODES):
        # E cos(aZ + theta) = cos(theta) exp(-a^2 v / 2)
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        v = check_variance(v)
        theta = self.a * (np.asarray(shift, dtype=float) - self.c)
        out = self.a**k * _cos_quarter_turns(theta, k) * np.exp(-0.5 * self.a**2 * v)
        return out if np.ndim(out) else float(out)

    @property
    def label(self):
        return f"cos_shifted(a={self.a:g},c={self.c:g})"


@dataclass(frozen=True)
class SinScaled(TestFunction):
    """z -> sin(a z)."""

    a: float = 1.0
    id = "sin_scaled"

    def derivative(self, k, z):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        return self.a**k * _sin_quarter_turns(self.a * np.asarray(z), k)

    def gaussian_expectation(self, k, v, shift=0.0, nodes=config.QUADRATURE_NODES):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        v = check_variance(v)
        theta = self.a * np.asarray(shift, dtype=float)
        out = self.a**k * _sin_quarter_turns(theta, k) * np.exp(-0.5 * self.a**2 * v)
        return out if np.ndim(out) else float(out)

    @property
    def label(self):
        return f"sin_scaled(a={self.a:g})"


@dataclass(frozen=True)
class GaussBump(TestFunction):
    """z -> exp(-z^2 / 2 s^2)."""

    s: float = 1.0
    id = "gauss_bump"

    def derivative(self, k, z):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        u = np.asarray(z) / self.s
        return (-1.0 / self.s) ** k * hermeval(u, [0.0] * k + [1.0]) * np.exp(-0.5 * u * u)

    @property
    def label(self):
        return f"gauss_bump(s={self.s:g})"


def _logistic_polynomials(order: int) -> List[Polynomial]:
    # d/dz p(sigma) = p'(sigma) sigma (1 - sigma)
    slope = Polynomial([0.0, 1.0, -1.0])
    polys = [Polynomial([0.0, 1.0])]
    for _ in range(order):
        polys.append(polys[-1].deriv() * slope)
    return polys


@dataclass(frozen=True)
class Logistic(TestFunction):
    """z -> 1 / (1 + exp(-z))."""

    id = "logistic"

    def derivative(self, k, z):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        return _LOGISTIC_POLYNOMIALS[k](expit(np.asarray(z, dtype=float)))


_LOGISTIC_POLYNOMIALS = _logistic_polynomials(MAX_DERIVATIVE_ORDER)


@dataclass(frozen=True)
class Monomial(TestFunction):
    """z -> z^j.  Unbounded, so only used for moment checks."""

    j: int = 1
    id = "monomial"
    diagnostic_only = True

    def derivative(self, k, z):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        z = np.asarray(z, dtype=float)
        if k > self.j:
            return np.zeros_like(z)
        return math.perm(self.j, k) * z ** (self.j - k)

    def gaussian_expectation(self, k, v, shift=0.0, nodes=config.QUADRATURE_NODES):
        k = check_order(k, MAX_DERIVATIVE_ORDER)
        v = check_variance(v)
        if np.any(np.asarray(shift) != 0.0):
            return super().gaussian_expectation(k, v, shift, nodes)
        if k > self.j:
            logger.info(f"{self.label}: derivative order {k} vanishes, pairing is 0")
            out = np.zeros_like(v)
            return out if out.ndim else 0.0
        p = self.j - k
        if p % 2:
            out = np.zeros_like(v)
        else:
            # E Z^p = (p - 1)!! v^(p/2)
            double_factorial = math.prod(range(p - 1, 0, -2))
            out = math.perm(self.j, k) * double_factorial * v ** (p // 2)
        return out if np.ndim(out) else float(out)

    @property
    def label(self):
        return f"monomial(j={self.j})"


def _cos_quarter_turns(x, k):
    """cos(x + k pi / 2) without rounding pi / 2."""
    return (np.cos(x), -np.sin(x), -np.cos(x), np.sin(x))[k % 4]


def _sin_quarter_turns(x, k):
    """sin(x + k pi / 2) without rounding pi / 2."""
    return (np.sin(x), np.cos(x), -np.sin(x), -np.cos(x))[k % 4]


functions = {
    CosShifted.id: CosShifted,
    SinScaled.id: SinScaled,
    GaussBump.id: GaussBump,
    Logistic.id: Logistic,
    Monomial.id: Monomial,
}


def make_function(name: str, params: Dict[str, Any] = None) -> TestFunction:
    """Build a registered test function from its id and parameter record."""
    cls = functions.get(name)
    if cls is None:
        raise ResolutionError(f"unknown test function '{name}' (known: {sorted(functions)})")
    try:
        f = cls(**(params or {}))
    except TypeError as e:
        raise ConfigError(f"key 'test_function.params' invalid for {name}: {e}") from e

    for field in fields(f):
        value = getattr(f, field.name)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"key 'test_function.params.{field.name}' must be a finite number, got {value!r}")

    if isinstance(f, Monomial):
        if not isinstance(f.j, int) or not 0 <= f.j <= MAX_MONOMIAL_DEGREE:
            raise ConfigError(f"key 'test_function.params.j' must be in 0..{MAX_MONOMIAL_DEGREE}")
    if isinstance(f, GaussBump) and f.s <= 0:
        raise ConfigError("key 'test_function.params.s' must be positive")
    return f
