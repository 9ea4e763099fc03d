# edgeworth/oracle.py
"""Independent oracles for the derived reference values.

Nothing here goes through the production simulation path: the Brownian
moments are simulated from coarse increments with the per-block closed form,
the zero-path integrals use their own trapezoid on closed-form integrands,
and Hermite polynomials are obtained by differentiating phi symbolically.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List

import numpy as np
from numpy.polynomial import Polynomial

from edgeworth.errors import NumericalError

logger = logging.getLogger(__name__)

METHODS = (
    "closed-form",
    "quadrature-refinement",
    "coarse-increment simulation",
    "symbolic-differentiation",
)

ORACLE_CHUNK = 100_000


class OracleFailure(NumericalError): ...


@dataclass(frozen=True)
class OracleReport:
    name: str
    value: float
    method: str
    tolerance: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown oracle method {self.method!r}")


@dataclass(frozen=True)
class MomentReport:
    """Sample cumulants of the brownian_identity error with standard errors."""

    n: int
    horizon: float
    paths: int
    mean: float
    mean_stderr: float
    var: float
    var_stderr: float
    third_cumulant: float
    third_stderr: float

    @property
    def targets(self) -> Dict[str, float]:
        return {
            "mean": 0.0,
            "var": self.horizon / 2.0,
            "third_cumulant": self.horizon**1.5 / math.sqrt(self.n),
        }


def brownian_identity_moments(n: int, horizon: float, paths: int, seed: int) -> MomentReport:
    """Simulate Z exactly for X = Y = W from coarse increments alone.

    Per block the Ito integral of (W - W_tj) dW is ((dW_j)^2 - h) / 2, so no
    fine grid is needed.
    """
    h = horizon / n
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = np.empty(paths)
    for start in range(0, paths, ORACLE_CHUNK):
        stop = min(paths, start + ORACLE_CHUNK)
        g = rng.standard_normal((stop - start, n)) * math.sqrt(h)
        z[start:stop] = math.sqrt(n / horizon) * 0.5 * (g * g - h).sum(axis=1)

    mean = z.mean()
    centered = z - mean
    second = centered**2
    third = centered**3
    return MomentReport(
        n=n,
        horizon=horizon,
        paths=paths,
        mean=float(mean),
        mean_stderr=float(z.std(ddof=1) / math.sqrt(paths)),
        var=float(second.sum() / (paths - 1)),
        var_stderr=float(second.std(ddof=1) / math.sqrt(paths)),
        third_cumulant=float(third.sum() * paths / ((paths - 1) * (paths - 2))),
        third_stderr=float(third.std(ddof=1) / math.sqrt(paths)),
    )


def zero_path_integrands(a: float = 0.5, c: float = 0.5, horizon: float = 1.0) -> Dict[str, Callable]:
    """Closed-form time integrands of V0, A1, A3, A5 for exp_pair(a, 0, c, 0) on W = 0."""
    ac = a * c
    dv = lambda t: (a + c) * ac**2 * (horizon - t)  # noqa: E731
    d2v = lambda t: 2.0 * (a + c) ** 2 * ac**2 * (horizon - t)  # noqa: E731
    prefactor = 0.5 * a * a * c + 0.5 * c * c * a + c * c * a
    return {
        "constant": lambda t: np.ones_like(t),
        "v0": lambda t: 0.5 * ac**2 * np.ones_like(t),
        "a1": lambda t: 0.5 * (0.25 * a * a * c * c + 0.5 * a * c**3) * np.ones_like(t),
        "a3": lambda t: 0.25 * (prefactor * dv(t) + ac * d2v(t)) + ac**3 / 6.0,
        "a5": lambda t: 0.125 * ac * dv(t) ** 2,
    }


def zero_path_closed_forms(a: float = 0.5, c: float = 0.5, horizon: float = 1.0) -> Dict[str, float]:
    ac = a * c
    T = horizon
    prefactor = 0.5 * a * a * c + 0.5 * c * c * a + c * c * a
    return {
        "constant": T,
        "v0": 0.5 * ac**2 * T,
        "a1": 0.5 * (0.25 * a * a * c * c + 0.5 * a * c**3) * T,
        "a3": 0.25 * (prefactor * (a + c) * ac**2 + ac * 2.0 * (a + c) ** 2 * ac**2) * T**2 / 2.0
        + ac**3 * T / 6.0,
        "a5": 0.125 * ac * ((a + c) * ac**2) ** 2 * T**3 / 3.0,
    }


def exp_pair_clt_prediction(a: float, c: float, horizon: float = 1.0) -> float:
    """E[(1/3) int Gamma^4 Sigma^4 dt] for exp_pair(a, 0, c, 0).

    Gamma Sigma = ac exp((a + c) W_t) and E exp(lam W_t) = exp(lam^2 t / 2).
    """
    rate = 8.0 * (a + c) ** 2
    return (a * c) ** 4 * math.expm1(rate * horizon) / rate / 3.0


def _trapezoid(y: np.ndarray, h: float) -> float:
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))


def quadrature_refinement(
    integrand: str, levels: int = 5, base: int = 16, horizon: float = 1.0
) -> OracleReport:
    """Trapezoid at doubling resolutions with a ratio test and Richardson step."""
    integrands = zero_path_integrands(horizon=horizon)
    if integrand not in integrands:
        raise OracleFailure(f"unknown integrand {integrand!r}")
    if levels < 3:
        raise ValueError("need at least 3 levels for the ratio test")
    func = integrands[integrand]

    values = []
    for level in range(levels):
        steps = base * 2**level
        t = np.linspace(0.0, horizon, steps + 1)
        values.append(_trapezoid(func(t), horizon / steps))

    diffs = np.diff(values)
    scale = max(1.0, abs(values[-1]))
    if np.all(np.abs(diffs) <= 1e-14 * scale):
        return OracleReport(f"quadrature_refinement:{integrand}", values[-1], "quadrature-refinement", 1e-14 * scale)

    ratios = diffs[:-1] / diffs[1:]
    if not np.all(np.abs(ratios - 4.0) < 0.1):
        raise OracleFailure(f"{integrand}: trapezoid ratios {ratios} are not 4 +- 0.1")
    extrapolated = values[-1] + (values[-1] - values[-2]) / 3.0
    logger.info(f"{integrand}: ratios {ratios}, extrapolated {extrapolated!r}")
    return OracleReport(
        f"quadrature_refinement:{integrand}",
        float(extrapolated),
        "quadrature-refinement",
        float(abs(diffs[-1])) / 3.0,
    )


def symbolic_hermite_polynomial(k: int, v: float) -> Polynomial:
    """H_k(., v) from d/dz [P phi] = (P' - (z / v) P) phi, applied k times."""
    p = Polynomial([1.0])
    z_over_v = Polynomial([0.0, 1.0 / v])
    for _ in range(k):
        p = p.deriv() - z_over_v * p
    return (-1) ** k * p


def symbolic_hermite(k: int, z, v: float):
    return symbolic_hermite_polynomial(k, v)(z)


def symbolic_diff_check(k: int, variances=(0.25, 0.5, 1.0, 2.0)) -> OracleReport:
    """Largest deviation of hermite_h from the symbolic derivative of phi,
    relative to the largest |H_k| on the grid."""
    from edgeworth.hermite import hermite_h

    worst = 0.0
    for v in variances:
        z = np.linspace(-4.0, 4.0, 81) * math.sqrt(v)
        exact = symbolic_hermite(k, z, v)
        scale = max(1.0, float(np.max(np.abs(exact))))
        worst = max(worst, float(np.max(np.abs(hermite_h(k, z, v) - exact))) / scale)
    return OracleReport(f"symbolic_diff_check:k={k}", worst, "symbolic-differentiation", 1e-12)


def derived_values() -> List[OracleReport]:
    """Every pinned reference value, recomputed from the oracles."""
    e_quarter = math.exp(-0.25)
    closed = zero_path_closed_forms()
    reports = [
        OracleReport("gaussian_pdf(0,1)", 1.0 / math.sqrt(2.0 * math.pi), "closed-form", 1e-15),
        OracleReport("gaussian_pdf(0,0.5)", 1.0 / math.sqrt(math.pi), "closed-form", 1e-15),
        OracleReport("hermite_h(1,1,1)", float(symbolic_hermite(1, 1.0, 1.0)), "symbolic-differentiation", 1e-12),
        OracleReport("hermite_h(3,1,1)", float(symbolic_hermite(3, 1.0, 1.0)), "symbolic-differentiation", 1e-12),
        OracleReport("hermite_h(5,0,0.5)", float(symbolic_hermite(5, 0.0, 0.5)), "symbolic-differentiation", 1e-12),
        OracleReport("hermite_h(3,2,0.5)", float(symbolic_hermite(3, 2.0, 0.5)), "symbolic-differentiation", 1e-10),
        OracleReport(
            "qn_density(1,0.5,0,1/6,0,4)",
            math.exp(-1.0) / math.sqrt(math.pi) * (1.0 + 0.5 * float(symbolic_hermite(3, 1.0, 0.5)) / 6.0),
            "closed-form",
            1e-9,
        ),
        OracleReport("pair_integral(cos_shifted(1,0),0,0.5)", e_quarter, "closed-form", 1e-12),
        OracleReport("pair_integral(cos_shifted(1,0),3,0.5)", 0.0, "closed-form", 1e-12),
        OracleReport("pair_integral(cos_shifted(1,1),0,0.5)", math.cos(1.0) * e_quarter, "closed-form", 1e-9),
        OracleReport("pair_integral(cos_shifted(1,1),3,0.5)", -math.sin(1.0) * e_quarter, "closed-form", 1e-9),
        OracleReport(
            "expansion_value(cos_shifted(1,1),0.5,0,1/6,0,16)",
            math.cos(1.0) * e_quarter - math.sin(1.0) * e_quarter / 24.0,
            "closed-form",
            1e-9,
        ),
        OracleReport("pair_integral(monomial(3),3,1)", 6.0, "closed-form", 1e-12),
        OracleReport("exp_pair(0.5,0,0.5,0)@(0,0).xi", 0.125, "symbolic-differentiation", 1e-15),
        OracleReport("exp_pair(0.5,0,0.5,0)@(0,0).d1_gs", 0.125, "symbolic-differentiation", 1e-15),
        OracleReport("zero_path.v0", closed["v0"], "closed-form", 1e-12),
        OracleReport("zero_path.a1", closed["a1"], "closed-form", 1e-12),
        OracleReport("zero_path.a3", closed["a3"], "closed-form", 1e-12),
        OracleReport("zero_path.a5", closed["a5"], "closed-form", 1e-9),
        OracleReport("brownian_identity.var(n=16,T=1)", 0.5, "closed-form", 0.0),
        OracleReport("brownian_identity.kappa3(n=16,T=1)", 0.25, "closed-form", 0.0),
        OracleReport("clt_predicted.brownian_identity(T=1)", 1.0 / 3.0, "closed-form", 1e-15),
        OracleReport(
            "clt_predicted.exp_pair(0.5,0,0.5,0,T=1)",
            exp_pair_clt_prediction(0.5, 0.5),
            "closed-form",
            1e-9,
        ),
    ]
    return reports


def regenerate_fixtures(path: str) -> List[OracleReport]:
    """Write the pinned fixtures file consumed by the test suite."""
    reports = derived_values()
    for name in ("v0", "a1", "a3", "a5"):
        refined = quadrature_refinement(name)
        closed = zero_path_closed_forms()[name]
        if abs(refined.value - closed) > max(refined.tolerance, 1e-12) * 10:
            raise OracleFailure(f"zero-path {name}: refinement {refined.value} vs closed form {closed}")
    with open(path, "w", encoding="utf-8") as f:
        json.dump([asdict(r) for r in reports], f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Wrote {len(reports)} fixtures to {path}")
    return reports
