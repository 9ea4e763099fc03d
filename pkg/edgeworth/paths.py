# edgeworth/paths.py
"""Reproducible Brownian paths on a two-level grid and the simulated
discretization error.

The coarse grid is the rebalancing partition jT/n; each coarse step is cut
into m fine substeps on which X and Y are evaluated exactly as g(t, W_t).
The only simulation bias left is the fine-grid Ito sum for the integral of
X dY, which shrinks as m grows.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

import numpy as np

from edgeworth import config
from edgeworth.errors import ConfigError, PathEvaluationError, ResourceError
from edgeworth.models.base import CoefficientPoint, GModel, eval_coefficients

logger = logging.getLogger(__name__)

MAX_KEY = 2**64


def auto_substeps(n: int) -> int:
    """Default fine substeps per coarse step, max(64, ceil(8 sqrt(n)))."""
    return max(64, math.ceil(8.0 * math.sqrt(n)))


@dataclass(frozen=True)
class GridSpec:
    horizon: float
    n: int
    m: int

    def __post_init__(self):
        if not self.horizon > 0 or not math.isfinite(self.horizon):
            raise ConfigError(f"key 'horizon' must be positive and finite, got {self.horizon}")
        if self.n < 1:
            raise ConfigError(f"key 'n_list': n must be at least 1, got {self.n}")
        if self.m < 2:
            raise ConfigError(f"key 'm': need at least 2 substeps, got {self.m}")
        if self.n * self.m > config.MAX_GRID_POINTS:
            raise ResourceError(
                f"grid too large: n*m = {self.n * self.m} exceeds {config.MAX_GRID_POINTS}"
            )

    @classmethod
    def build(cls, horizon: float, n: int, m: Union[int, str] = "auto") -> "GridSpec":
        return cls(float(horizon), int(n), auto_substeps(n) if m == "auto" else int(m))

    @property
    def fine_steps(self) -> int:
        return self.n * self.m

    @property
    def dt(self) -> float:
        return self.horizon / self.fine_steps

    @property
    def rate(self) -> float:
        """Rebalancing steps per unit time; the error is scaled by its square root."""
        return self.n / self.horizon

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.fine_steps + 1) * self.dt

    @property
    def coarse_index(self) -> np.ndarray:
        """For fine step k, the fine index of its coarse left endpoint."""
        return (np.arange(self.fine_steps) // self.m) * self.m


@dataclass(frozen=True)
class GridTemplate:
    """Horizon and substep rule shared by every n of a convergence study."""

    horizon: float = 1.0
    m: Union[int, str] = "auto"

    def at(self, n: int) -> GridSpec:
        return GridSpec.build(self.horizon, n, self.m)


@dataclass(frozen=True)
class PathGrid:
    """Brownian values W at the fine nodes; ``w`` is (..., n*m + 1)."""

    spec: GridSpec
    w: np.ndarray
    stream_id: Any = 0
    antithetic: bool = False

    def negated(self) -> "PathGrid":
        return PathGrid(self.spec, -self.w, self.stream_id, not self.antithetic)

    @property
    def coarse(self) -> np.ndarray:
        return self.w[..., :: self.spec.m]


@dataclass(frozen=True)
class ErrorSample:
    z: Any
    v0n: Any
    stream_id: Any


@dataclass(frozen=True)
class CoefficientTrajectory(CoefficientPoint):
    """Coefficient processes at every fine node of a path."""

    times: np.ndarray = None


def _check_key(name: str, value: int):
    if not 0 <= int(value) < MAX_KEY:
        raise ConfigError(f"key '{name}' must fit in 64 unsigned bits, got {value}")


def stream_generator(seed: int, stream_id: int) -> np.random.Generator:
    """Philox keyed on (seed, stream).

    Each stream is its own generator, so the draws of a path never depend on
    which worker simulates it or in what order.
    """
    _check_key("seed", seed)
    _check_key("stream_id", stream_id)
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(stream_id)))


def brownian_increments(seed: int, stream_id: int, spec: GridSpec) -> np.ndarray:
    gen = stream_generator(seed, stream_id)
    return gen.standard_normal(spec.fine_steps) * math.sqrt(spec.dt)


def _cumulate(increments: np.ndarray) -> np.ndarray:
    w = np.zeros(increments.shape[:-1] + (increments.shape[-1] + 1,))
    np.cumsum(increments, axis=-1, out=w[..., 1:])
    return w


def sample_path(seed: int, stream_id: int, spec: GridSpec, antithetic: bool = False) -> PathGrid:
    """One path, a pure function of (seed, stream_id, spec, antithetic)."""
    increments = brownian_increments(seed, stream_id, spec)
    if antithetic:
        increments = -increments
    return PathGrid(spec, _cumulate(increments), int(stream_id), antithetic)


def sample_paths(
    seed: int, stream_ids: Sequence[int], spec: GridSpec, antithetic: bool = False
) -> PathGrid:
    """A batch of paths stacked row-wise in the order of ``stream_ids``."""
    stream_ids = np.asarray(stream_ids, dtype=np.uint64)
    increments = np.empty((len(stream_ids), spec.fine_steps))
    for row, stream_id in enumerate(stream_ids):
        increments[row] = brownian_increments(seed, int(stream_id), spec)
    if antithetic:
        increments = -increments
    return PathGrid(spec, _cumulate(increments), stream_ids, antithetic)


def _offending_streams(path: PathGrid, bad_rows: np.ndarray):
    ids = np.atleast_1d(np.asarray(path.stream_id))
    if ids.size == 1:
        return [int(ids[0])]
    return [int(i) for i in ids[np.atleast_1d(bad_rows)]]


def coefficient_trajectory(model: GModel, path: PathGrid) -> CoefficientTrajectory:
    """eval_coefficients at every fine node, aligned with ``path.w``."""
    times = path.spec.times
    point = eval_coefficients(model, times, path.w)
    return CoefficientTrajectory(**point.as_dict(), times=times)


def discretization_error(
    model: GModel, path: PathGrid, traj: Optional[CoefficientTrajectory] = None
) -> ErrorSample:
    """Z = sqrt(n/T) * fine Ito sum of (X - X^n) dY, and the left-point V0^n."""
    spec = path.spec
    if traj is None:
        times = spec.times
        x = model.g_x.value(times, path.w)
        y = model.g_y.value(times, path.w)
        sigma = model.g_y.d_w(times, path.w)
    else:
        x, y, sigma = traj.x_val, traj.y_val, traj.sigma

    gap = x[..., :-1] - x[..., spec.coarse_index]
    dy = np.diff(y, axis=-1)
    z = math.sqrt(spec.rate) * (gap * dy).sum(axis=-1)
    v0n = spec.rate * (gap * gap * sigma[..., :-1] ** 2).sum(axis=-1) * spec.dt

    finite = np.isfinite(z) & np.isfinite(v0n)
    if not np.all(finite):
        streams = _offending_streams(path, ~finite)
        raise PathEvaluationError(f"non-finite error sample on streams {streams}")
    return ErrorSample(z=z, v0n=v0n, stream_id=path.stream_id)
