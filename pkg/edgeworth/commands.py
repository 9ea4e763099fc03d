# edgeworth/commands.py
"""The run, check-clt, plot and selftest commands.

Each returns an exit code; failures propagate as EdgeworthError subclasses
and the entry point turns them into their exit codes.
"""

import logging
from typing import List, Tuple

from edgeworth import selftest as selftest_suite
from edgeworth.config import ExperimentConfig
from edgeworth.errors import ConfigError
from edgeworth.estimator import CltCheck, clt_variance_check, convergence_study
from edgeworth.models import bs_delta_hedge, make_builtin
from edgeworth.models.base import GModel
from edgeworth.observables import TestFunction, make_function
from edgeworth.paths import GridTemplate
from edgeworth.report import render_svg, write_clt_csv, write_report_csv

logger = logging.getLogger(__name__)

# Below this many steps the CLT ratio is recorded but not judged
CLT_ASYMPTOTIC_N = 16
CLT_RATIO_BAND = (0.95, 1.05)


def resolve(experiment: ExperimentConfig) -> Tuple[GModel, TestFunction]:
    if experiment.test_function is None:
        raise ConfigError("missing key 'test_function'")
    model = make_builtin(experiment.model.name, experiment.model.params, horizon=experiment.horizon)
    f = make_function(experiment.test_function.name, experiment.test_function.params)
    logger.info(f"Resolved model {model.describe()} and test function {f.label}")
    return model, f


def run(experiment: ExperimentConfig) -> int:
    """Convergence study over n_list, written as the report CSV."""
    model, f = resolve(experiment)
    if model.name == bs_delta_hedge.NAME:
        logger.info(
            "Z is the sqrt(n)-scaled error of rebalancing the Black-Scholes call delta "
            f"at {max(experiment.n_list)} or fewer dates; {f.label} is evaluated on that hedging error"
        )

    report = convergence_study(
        model,
        f,
        experiment.n_list,
        GridTemplate(experiment.horizon, experiment.m),
        paths=experiment.paths,
        seed=experiment.seed,
        mode=experiment.mode,
        antithetic=experiment.antithetic,
        nodes=experiment.quadrature_nodes,
        threads=experiment.threads,
    )
    write_report_csv(report, experiment.output)
    return 0


def check_clt(experiment: ExperimentConfig) -> int:
    """Variance of sqrt(n/T)(V0^n - V0) against its predicted limit for each n."""
    model = make_builtin(experiment.model.name, experiment.model.params, horizon=experiment.horizon)
    logger.info(f"Resolved model {model.describe()}")
    template = GridTemplate(experiment.horizon, experiment.m)
    if experiment.antithetic:
        logger.info("Antithetic flag ignored by the CLT check")

    checks: List[CltCheck] = []
    for n in experiment.n_list:
        check = clt_variance_check(
            model, template.at(n), experiment.paths, experiment.seed, threads=experiment.threads
        )
        if n < CLT_ASYMPTOTIC_N:
            logger.info(f"n={n}: ratio {check.ratio:.4f} recorded (pre-asymptotic)")
        elif CLT_RATIO_BAND[0] <= check.ratio <= CLT_RATIO_BAND[1]:
            logger.info(f"n={n}: ratio {check.ratio:.4f} within {CLT_RATIO_BAND}")
        else:
            logger.warning(f"n={n}: ratio {check.ratio:.4f} outside {CLT_RATIO_BAND}")
        checks.append(check)
    write_clt_csv(checks, experiment.output)
    return 0


def plot(csv_path: str, svg_path: str) -> int:
    render_svg(csv_path, svg_path)
    return 0


def selftest(threads: int = 4) -> int:
    return selftest_suite.selftest(threads)
