# edgeworth/selftest.py
"""Fast invariant suite run by ``python -m edgeworth selftest``."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from edgeworth import hermite, oracle
from edgeworth.estimator import SAMPLE_FIELDS, PathSimulator
from edgeworth.malliavin import dplus_consistency_check
from edgeworth.models import make_builtin
from edgeworth.models.base import PARTIAL_NAMES, analytic_partials, finite_diff_partials
from edgeworth.observables import GaussBump, Logistic
from edgeworth.paths import GridSpec, sample_path

logger = logging.getLogger(__name__)

VARIANCES = (0.25, 0.5, 1.0, 2.0)

SELFTEST_MODELS = (
    ("brownian_identity", {}),
    ("exp_pair", {"a": 0.5, "b": 0.1, "c": 0.5, "d": -0.2}),
    ("linear_pair", {"gx": 1.0, "kx": 0.5, "gy": 0.8, "ky": -0.3}),
    ("bs_delta_hedge", {}),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_hermite_recurrence() -> Tuple[bool, str]:
    worst = 0.0
    for k in range(hermite.MAX_HERMITE_ORDER + 1):
        for v in VARIANCES:
            z = np.linspace(-4.0, 4.0, 33) * math.sqrt(v)
            exact = oracle.symbolic_hermite(k, z, v)
            scale = max(1.0, float(np.max(np.abs(exact))))
            worst = max(worst, float(np.max(np.abs(hermite.hermite_h(k, z, v) - exact))) / scale)
    return worst < 1e-10, f"max relative deviation {worst:.3g}"


def check_hermite_orthogonality() -> Tuple[bool, str]:
    worst = 0.0
    for v in VARIANCES:
        for j in range(6):
            for k in range(6):
                got = hermite.gaussian_expectation(
                    lambda z: hermite.hermite_h(j, z, v) * hermite.hermite_h(k, z, v), v, nodes=32
                )
                want = math.factorial(k) / v**k if j == k else 0.0
                worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst < 1e-9, f"max deviation {worst:.3g}"


def check_hermite_derivative() -> Tuple[bool, str]:
    """-d/dz [H_(k-1) phi] = H_k phi, one central difference at a time."""
    worst = 0.0
    for v in VARIANCES:
        z = np.linspace(-3.0, 3.0, 25) * math.sqrt(v)
        step = 1e-3 * math.sqrt(v)
        for k in range(1, 6):

            def density(x):
                return hermite.hermite_h(k - 1, x, v) * hermite.gaussian_pdf(x, v)

            fd = -(density(z + step) - density(z - step)) / (2.0 * step)
            exact = hermite.hermite_h(k, z, v) * hermite.gaussian_pdf(z, v)
            scale = max(1e-3, float(np.max(np.abs(exact))))
            worst = max(worst, float(np.max(np.abs(fd - exact))) / scale)
    return worst < 1e-4, f"max relative deviation {worst:.3g}"


def check_heat_equation() -> Tuple[bool, str]:
    """dq/dv = (1/2) d2q/dx2 for the heat flow of a smooth test function."""
    f = GaussBump(0.8)
    worst = 0.0
    for v in (0.3, 0.7, 1.5):
        for x in (-1.0, 0.0, 0.4, 1.2):
            hv, hx = 1e-4, 1e-3
            dq_dv = (hermite.heat_smoothed(f, v + hv, x) - hermite.heat_smoothed(f, v - hv, x)) / (2.0 * hv)
            d2q_dx2 = (
                hermite.heat_smoothed(f, v, x + hx)
                - 2.0 * hermite.heat_smoothed(f, v, x)
                + hermite.heat_smoothed(f, v, x - hx)
            ) / (hx * hx)
            worst = max(worst, abs(dq_dv - 0.5 * d2q_dx2))
    return worst < 1e-6, f"max residual {worst:.3g}"


def check_pairing_identity() -> Tuple[bool, str]:
    worst = 0.0
    for f in (GaussBump(1.0), Logistic()):
        for v in (0.5, 1.0):
            for k in range(6):
                closed = hermite.pair_integral(f, k, v)
                direct = hermite.direct_pairing(f, k, v)
                worst = max(worst, abs(closed - direct))
    return worst < 1e-8, f"max deviation {worst:.3g}"


def check_qn_mass() -> Tuple[bool, str]:
    worst = 0.0
    for v0, a1, a3, a5, n in ((0.5, 0.0, 1 / 6, 0.0, 4), (0.03125, 0.0234375, 0.0085, 4e-5, 16), (1.0, -0.3, 0.2, 0.1, 1)):
        z = np.linspace(-14.0, 14.0, 4001) * math.sqrt(v0)
        q = hermite.qn_density(z, v0, a1, a3, a5, n)
        mass = float((z[1] - z[0]) * (q.sum() - 0.5 * (q[0] + q[-1])))
        worst = max(worst, abs(mass - 1.0))
    return worst < 1e-10, f"max mass deviation {worst:.3g}"


def check_model_partials() -> Tuple[bool, str]:
    t = np.array([0.1, 0.4, 0.7, 0.9])
    w = np.array([-0.8, 0.0, 0.3, 1.1])
    failures = []
    for name, params in SELFTEST_MODELS:
        model = make_builtin(name, params)
        fd = finite_diff_partials(model, t, w)
        for which in ("g_x", "g_y"):
            exact = analytic_partials(model, which, t, w)
            approx = getattr(fd, which)
            for partial in PARTIAL_NAMES:
                a, b = getattr(exact, partial), getattr(approx, partial)
                scale = max(1.0, float(np.max(np.abs(a))))
                if np.max(np.abs(a - b)) > 1e-5 * scale:
                    failures.append(f"{name}.{which}.{partial}")
    return not failures, f"mismatched partials {failures}" if failures else "all partials agree"


def check_dplus_consistency() -> Tuple[bool, str]:
    spec = GridSpec.build(1.0, 4, 16)
    failures = []
    for name, params in SELFTEST_MODELS:
        model = make_builtin(name, params)
        report = dplus_consistency_check(model, sample_path(7, 0, spec))
        if not report.passed(1e-6):
            failures.append(name)
    return not failures, f"inconsistent D+ for {failures}" if failures else "D+ consistent"


def check_determinism(threads: int = 4) -> Tuple[bool, str]:
    """One batch schedule, one thread against ``threads``, identical bits."""
    model = make_builtin("exp_pair", {"a": 0.5, "b": 0.0, "c": 0.5, "d": 0.0})
    spec = GridSpec.build(1.0, 4, 8)
    runs = [
        PathSimulator(model, spec, seed=11, threads=count, batch_size=8, show_progress=False).simulate(64)
        for count in (1, max(2, threads))
    ]
    differing = [name for name in SAMPLE_FIELDS if not np.array_equal(getattr(runs[0], name), getattr(runs[1], name))]
    return not differing, f"fields differ across thread counts: {differing}" if differing else "bit-identical"


CHECKS: List[Tuple[str, Callable[..., Tuple[bool, str]]]] = [
    ("hermite recurrence", check_hermite_recurrence),
    ("hermite orthogonality", check_hermite_orthogonality),
    ("hermite derivative", check_hermite_derivative),
    ("heat equation", check_heat_equation),
    ("pairing identity", check_pairing_identity),
    ("qn mass", check_qn_mass),
    ("model partials", check_model_partials),
    ("d-plus consistency", check_dplus_consistency),
    ("determinism", check_determinism),
]


def run_checks(threads: int = 4) -> List[CheckResult]:
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check(threads) if check is check_determinism else check()
        except Exception as e:
            passed, detail = False, f"raised {type(e).__name__}: {e}"
        logger.info(f"{name}: {'ok' if passed else 'FAILED'} ({detail})")
        results.append(CheckResult(name, bool(passed), detail))
    return results


def selftest(threads: int = 4) -> int:
    """0 when every invariant holds, else 1 after naming the first failure."""
    results = run_checks(threads)
    failed = [r for r in results if not r.passed]
    if failed:
        logger.error(f"selftest failed: {failed[0].name}: {failed[0].detail}")
        return 1
    logger.info(f"selftest passed ({len(results)} checks)")
    return 0
