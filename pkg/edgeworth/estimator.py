# edgeworth/estimator.py
"""Parallel Monte Carlo estimation of E[f(Z)] and of its expansion."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from edgeworth import config
from edgeworth.hermite import expansion_value, pair_integral
from edgeworth.malliavin import (
    clt_variance_integral,
    dv_trajectories,
    expansion_coefficients,
)
from edgeworth.models.base import GModel
from edgeworth.observables import TestFunction
from edgeworth.paths import (
    GridSpec,
    GridTemplate,
    coefficient_trajectory,
    discretization_error,
    sample_paths,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "model", "f", "T", "n", "m", "paths", "mode",
    "mc_mean", "mc_stderr", "zeroth_mean", "zeroth_stderr",
    "expansion_mean", "expansion_stderr",
    "a1_mean", "a3_mean", "a5_mean", "v0_mean",
    "scaled_residual", "scaled_residual_stderr",
]  # fmt: skip

SAMPLE_FIELDS = ("z", "v0n", "v0", "a1", "a3", "a5", "clt")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_paths: int

    @property
    def ci95(self) -> Tuple[float, float]:
        return (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)

    @classmethod
    def from_samples(cls, samples: np.ndarray, n_paths: Optional[int] = None) -> "McEstimate":
        """Mean and Bessel-corrected standard error of i.i.d. sampling units."""
        samples = np.asarray(samples, dtype=float).ravel()
        units = samples.size
        if units < 2:
            raise ValueError(f"need at least 2 sampling units, got {units}")
        mean = float(samples.sum() / units)
        stderr = float(math.sqrt(((samples - mean) ** 2).sum() / (units - 1) / units))
        return cls(mean=mean, stderr=stderr, n_paths=n_paths or units)


@dataclass
class SampleSet:
    """Per-path quantities in stream order.

    Every array is (units, k): k = 2 in antithetic mode, where column 1 is the
    sign-flipped twin of column 0, else k = 1.
    """

    z: np.ndarray
    v0n: np.ndarray
    v0: np.ndarray
    a1: np.ndarray
    a3: np.ndarray
    a5: np.ndarray
    clt: np.ndarray
    first_stream: int = 0

    @property
    def units(self) -> int:
        return self.z.shape[0]

    @property
    def paths(self) -> int:
        return self.z.size

    def merge(self, other: "SampleSet") -> "SampleSet":
        """Concatenate a set that continues this one's stream range."""
        if other.first_stream != self.first_stream + self.units:
            raise ValueError("sample sets must cover adjacent stream ranges")
        return SampleSet(
            **{name: np.concatenate([getattr(self, name), getattr(other, name)]) for name in SAMPLE_FIELDS},
            first_stream=self.first_stream,
        )

    def unit_values(self, per_path: np.ndarray) -> np.ndarray:
        """Average a per-path quantity over each antithetic pair."""
        return per_path.mean(axis=1)

    def error_values(self, f: TestFunction) -> np.ndarray:
        return self.unit_values(f(self.z))

    def expansion_values(self, f: TestFunction, rate: float, nodes: int) -> np.ndarray:
        return self.unit_values(
            expansion_value(f, self.v0, self.a1, self.a3, self.a5, rate, nodes=nodes)
        )

    def zeroth_values(self, f: TestFunction, nodes: int) -> np.ndarray:
        return self.unit_values(pair_integral(f, 0, self.v0, nodes=nodes))


class PathSimulator:
    """Simulates error and expansion samples over a range of streams.

    Work is split into fixed-size batches of consecutive streams.  The batch
    size depends only on the grid, so every output bit is independent of the
    number of worker threads.
    """

    def __init__(
        self,
        model: GModel,
        spec: GridSpec,
        seed: int,
        antithetic: bool = False,
        threads: int = config.THREADS,
        batch_size: Optional[int] = None,
        show_progress: bool = config.SHOW_PROGRESS,
    ):
        self.model = model
        self.spec = spec
        self.seed = seed
        self.antithetic = antithetic
        self.threads = max(1, int(threads))
        self.show_progress = show_progress
        if batch_size is None:
            batch_size = config.MAX_BATCH_POINTS // (spec.fine_steps + 1)
            batch_size = min(config.BATCH_SIZE, batch_size)
        self.batch_size = max(1, int(batch_size))

    def _evaluate(self, path) -> Dict[str, np.ndarray]:
        traj = coefficient_trajectory(self.model, path)
        error = discretization_error(self.model, path, traj)
        mal = dv_trajectories(traj, path)
        sample = expansion_coefficients(traj, mal, self.spec, stream_id=path.stream_id)
        return {
            "z": error.z,
            "v0n": error.v0n,
            "v0": sample.v0,
            "a1": sample.a1,
            "a3": sample.a3,
            "a5": sample.a5,
            "clt": clt_variance_integral(traj, self.spec),
        }

    def _simulate_batch(self, streams: np.ndarray) -> Dict[str, np.ndarray]:
        path = sample_paths(self.seed, streams, self.spec)
        columns = [self._evaluate(path)]
        if self.antithetic:
            columns.append(self._evaluate(path.negated()))
        return {name: np.stack([c[name] for c in columns], axis=1) for name in SAMPLE_FIELDS}

    def simulate(self, units: int, first_stream: int = 0) -> SampleSet:
        """Simulate ``units`` sampling units from streams first_stream, first_stream + 1, ..."""
        if units < 1:
            raise ValueError(f"units must be positive, got {units}")
        streams = np.arange(first_stream, first_stream + units, dtype=np.uint64)
        batches = [streams[i : i + self.batch_size] for i in range(0, units, self.batch_size)]
        logger.info(
            f"Simulating {units} units of {self.model.name} on n={self.spec.n}, m={self.spec.m} "
            f"({len(batches)} batches, {self.threads} threads)"
        )

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            results = list(
                tqdm(
                    pool.map(self._simulate_batch, batches),
                    total=len(batches),
                    desc=f"n={self.spec.n}",
                    disable=not self.show_progress,
                )
            )

        # Fixed stream order; the pool returns batches in submission order
        return SampleSet(
            **{name: np.concatenate([r[name] for r in results]) for name in SAMPLE_FIELDS},
            first_stream=first_stream,
        )


def _units(paths: int, antithetic: bool) -> int:
    if paths < 2:
        raise ValueError(f"need at least 2 paths, got {paths}")
    if antithetic:
        if paths % 2:
            raise ValueError("antithetic mode needs an even number of paths")
        return paths // 2
    return paths


def estimate_error_expectation(
    model: GModel,
    f: TestFunction,
    spec: GridSpec,
    paths: int,
    seed: int,
    antithetic: bool = False,
    first_stream: int = 0,
    **options,
) -> McEstimate:
    """Monte Carlo estimate of E[f(Z)] over streams first_stream onwards."""
    simulator = PathSimulator(model, spec, seed, antithetic=antithetic, **options)
    samples = simulator.simulate(_units(paths, antithetic), first_stream)
    return McEstimate.from_samples(samples.error_values(f), n_paths=paths)


def estimate_expansion(
    model: GModel,
    f: TestFunction,
    spec: GridSpec,
    paths: int,
    seed: int,
    mode: str = "coupled",
    antithetic: bool = False,
    nodes: int = config.QUADRATURE_NODES,
    **options,
) -> McEstimate:
    """Monte Carlo mean of the per-path expansion value.

    Coupled mode uses the same streams as ``estimate_error_expectation``;
    independent mode uses the disjoint range [paths, 2 paths).
    """
    first_stream = _first_stream(mode, paths)
    simulator = PathSimulator(model, spec, seed, antithetic=antithetic, **options)
    samples = simulator.simulate(_units(paths, antithetic), first_stream)
    return McEstimate.from_samples(samples.expansion_values(f, spec.rate, nodes), n_paths=paths)


def _first_stream(mode: str, paths: int) -> int:
    if mode == "coupled":
        return 0
    if mode == "independent":
        return paths
    raise ValueError(f"mode must be 'coupled' or 'independent', got {mode!r}")


@dataclass(frozen=True)
class CltCheck:
    """Variance of sqrt(n/T)(V0^n - V0) against E[(1/3) int Gamma^4 Sigma^4]."""

    n: int
    paths: int
    empirical_var: McEstimate
    centered_mean: McEstimate
    predicted: float
    predicted_stderr: float = 0.0

    @property
    def ratio(self) -> float:
        return self.empirical_var.mean / self.predicted


def clt_variance_check(model: GModel, spec: GridSpec, paths: int, seed: int, **options) -> CltCheck:
    options.pop("antithetic", None)
    simulator = PathSimulator(model, spec, seed, antithetic=False, **options)
    samples = simulator.simulate(_units(paths, False))

    u = math.sqrt(spec.rate) * (samples.v0n - samples.v0).ravel()
    centered_mean = McEstimate.from_samples(u)
    squares = (u - centered_mean.mean) ** 2
    units = u.size
    empirical_var = McEstimate(
        mean=float(squares.sum() / (units - 1)),
        stderr=McEstimate.from_samples(squares).stderr * units / (units - 1),
        n_paths=units,
    )
    predicted_estimate = McEstimate.from_samples(samples.clt)
    predicted = predicted_estimate.mean
    logger.info(
        f"CLT check n={spec.n}: empirical {empirical_var.mean:.6g} +- {empirical_var.stderr:.2g}, "
        f"predicted {predicted:.6g}"
    )
    return CltCheck(spec.n, paths, empirical_var, centered_mean, predicted, predicted_estimate.stderr)


@dataclass(frozen=True)
class ReportRow:
    n: int
    m: int
    paths: int
    mc: McEstimate
    zeroth_order: McEstimate
    expansion: McEstimate
    residual: McEstimate
    a1_mean: float
    a3_mean: float
    a5_mean: float
    v0_mean: float
    scaled_residual: float
    scaled_residual_stderr: float


@dataclass
class ExperimentReport:
    model: str
    function: str
    horizon: float
    mode: str
    rows: List[ReportRow] = field(default_factory=list)
    hypotheses_asserted_by_user: bool = False
    diagnostic_only: bool = False

    def to_frame(self) -> pd.DataFrame:
        records = [
            {
                "model": self.model,
                "f": self.function,
                "T": self.horizon,
                "n": row.n,
                "m": row.m,
                "paths": row.paths,
                "mode": self.mode,
                "mc_mean": row.mc.mean,
                "mc_stderr": row.mc.stderr,
                "zeroth_mean": row.zeroth_order.mean,
                "zeroth_stderr": row.zeroth_order.stderr,
                "expansion_mean": row.expansion.mean,
                "expansion_stderr": row.expansion.stderr,
                "a1_mean": row.a1_mean,
                "a3_mean": row.a3_mean,
                "a5_mean": row.a5_mean,
                "v0_mean": row.v0_mean,
                "scaled_residual": row.scaled_residual,
                "scaled_residual_stderr": row.scaled_residual_stderr,
            }
            for row in self.rows
        ]
        return pd.DataFrame.from_records(records, columns=REPORT_COLUMNS)


def _mean(values: np.ndarray) -> float:
    return float(values.sum() / values.size)


def convergence_study(
    model: GModel,
    f: TestFunction,
    n_list: Sequence[int],
    spec_template: GridTemplate,
    paths: int,
    seed: int,
    mode: str = "coupled",
    antithetic: bool = False,
    nodes: int = config.QUADRATURE_NODES,
    **options,
) -> ExperimentReport:
    """One report row per n: MC value, zeroth-order and first-order expansions."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    units = _units(paths, antithetic)

    report = ExperimentReport(
        model=model.name,
        function=f.id,
        horizon=spec_template.horizon,
        mode=mode,
        hypotheses_asserted_by_user=model.user_supplied,
        diagnostic_only=f.diagnostic_only,
    )
    if model.user_supplied:
        logger.warning(f"Model {model.name}: expansion hypotheses asserted by user")
    if f.diagnostic_only:
        logger.warning(f"{f.label} is unbounded: rows are moment diagnostics outside the bounded smooth class")

    for n in n_list:
        spec = spec_template.at(n)
        simulator = PathSimulator(model, spec, seed, antithetic=antithetic, **options)
        samples = simulator.simulate(units, 0)
        mc_values = samples.error_values(f)

        if mode == "coupled":
            expansion_samples = samples
        else:
            expansion_samples = simulator.simulate(units, _first_stream(mode, paths))
        exp_values = expansion_samples.expansion_values(f, spec.rate, nodes)
        zeroth_values = expansion_samples.zeroth_values(f, nodes)

        mc = McEstimate.from_samples(mc_values, n_paths=paths)
        expansion = McEstimate.from_samples(exp_values, n_paths=paths)
        if mode == "coupled":
            residual = McEstimate.from_samples(mc_values - exp_values, n_paths=paths)
        else:
            residual = McEstimate(
                mean=mc.mean - expansion.mean,
                stderr=math.hypot(mc.stderr, expansion.stderr),
                n_paths=paths,
            )

        scale = math.sqrt(spec.rate)
        row = ReportRow(
            n=n,
            m=spec.m,
            paths=paths,
            mc=mc,
            zeroth_order=McEstimate.from_samples(zeroth_values, n_paths=paths),
            expansion=expansion,
            residual=residual,
            a1_mean=_mean(expansion_samples.a1),
            a3_mean=_mean(expansion_samples.a3),
            a5_mean=_mean(expansion_samples.a5),
            v0_mean=_mean(expansion_samples.v0),
            scaled_residual=scale * residual.mean,
            scaled_residual_stderr=scale * residual.stderr,
        )
        logger.info(
            f"n={n}: mc {mc.mean:.6g} +- {mc.stderr:.2g}, expansion {expansion.mean:.6g}, "
            f"scaled residual {row.scaled_residual:.4g} +- {row.scaled_residual_stderr:.2g}"
        )
        report.rows.append(row)
    return report
