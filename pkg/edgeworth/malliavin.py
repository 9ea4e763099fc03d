# edgeworth/malliavin.py
"""Pathwise anticipating functionals and the expansion coefficients.

For the Markovian class D_t[Gamma_s^2 Sigma_s^2] = d_w(Gamma^2 Sigma^2)(s, W_s)
whenever t <= s, so D^-V_t and (D^-)^2 V_t are plain suffix integrals of the
d1_gs and d2_gs trajectories.  Every dt-integral uses the trapezoid rule on
the fine grid; left-point sums are kept for the Ito sums of ``paths``.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from edgeworth.errors import DegenerateModelError
from edgeworth.models.base import GModel, eval_coefficients
from edgeworth.paths import CoefficientTrajectory, GridSpec, PathGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MalliavinTrajectory:
    v0: Any
    dminus_v: np.ndarray
    dminus2_v: np.ndarray


@dataclass(frozen=True)
class ExpansionSample:
    v0: Any
    a1: Any
    a3: Any
    a5: Any
    stream_id: Any = None


@dataclass(frozen=True)
class DPlusReport:
    """Largest deviation of the closed-form D+Theta, D+Sigma from d/dw of
    Theta, Sigma, absolute and relative to the trajectory's magnitude."""

    theta_abs: float
    sigma_abs: float
    theta_rel: float
    sigma_rel: float

    def passed(self, rtol: float) -> bool:
        return self.theta_rel < rtol and self.sigma_rel < rtol


def trapezoid(y: np.ndarray, dx: float):
    """Trapezoid rule along the last axis."""
    return dx * (0.5 * (y[..., 0] + y[..., -1]) + y[..., 1:-1].sum(axis=-1))


def suffix_trapezoid(y: np.ndarray, dx: float) -> np.ndarray:
    """S[k] = integral of y from node k to the last node; S[-1] = 0 exactly."""
    segments = 0.5 * dx * (y[..., :-1] + y[..., 1:])
    out = np.zeros(y.shape)
    out[..., :-1] = np.cumsum(segments[..., ::-1], axis=-1)[..., ::-1]
    return out


def dv_trajectories(traj: CoefficientTrajectory, path: PathGrid) -> MalliavinTrajectory:
    """V0, D^-V_t and (D^-)^2 V_t in one suffix pass over the fine grid."""
    dt = path.spec.dt
    gs = traj.gamma * traj.gamma * traj.sigma * traj.sigma
    return MalliavinTrajectory(
        v0=0.5 * trapezoid(gs, dt),
        dminus_v=0.5 * suffix_trapezoid(traj.d1_gs, dt),
        dminus2_v=0.5 * suffix_trapezoid(traj.d2_gs, dt),
    )


def expansion_coefficients(
    traj: CoefficientTrajectory,
    mal: MalliavinTrajectory,
    spec: GridSpec,
    stream_id: Optional[Any] = None,
) -> ExpansionSample:
    """(V0, A1, A3, A5) of the first-order expansion for each path."""
    bad = np.atleast_1d(np.asarray(mal.v0) <= 0.0)
    if bad.any():
        ids = np.atleast_1d(np.asarray(stream_id))
        where = ids[bad].tolist() if ids.size == bad.size else ids.tolist()
        raise DegenerateModelError(f"V0 vanishes on streams {where}: expansion density undefined")

    dt = spec.dt
    gamma, sigma = traj.gamma, traj.sigma
    gamma_sigma = gamma * sigma

    a1 = 0.5 * trapezoid(traj.xi * traj.theta + traj.d_plus_theta * gamma, dt)
    # D^-V_t is taken at the same t as the prefactor
    mixed = (traj.xi * sigma + traj.theta * gamma + traj.d_plus_sigma * gamma) * mal.dminus_v
    a3 = 0.25 * trapezoid(mixed + gamma_sigma * mal.dminus2_v, dt) + trapezoid(
        gamma_sigma**3, dt
    ) / 6.0
    a5 = 0.125 * trapezoid(gamma_sigma * mal.dminus_v**2, dt)
    return ExpansionSample(v0=mal.v0, a1=a1, a3=a3, a5=a5, stream_id=stream_id)


def clt_variance_integral(traj: CoefficientTrajectory, spec: GridSpec):
    """(1/3) integral of Gamma^4 Sigma^4, the stable-limit variance of sqrt(n)(V0^n - V0)."""
    gs = traj.gamma * traj.sigma
    return trapezoid(gs**4, spec.dt) / 3.0


def dplus_consistency_check(model: GModel, path: PathGrid, step: float = 1e-5) -> DPlusReport:
    """Compare D+Theta and D+Sigma with central differences of Theta and Sigma in w."""
    times = path.spec.times
    base = eval_coefficients(model, times, path.w)
    up = eval_coefficients(model, times, path.w + step)
    down = eval_coefficients(model, times, path.w - step)

    fd_theta = (up.theta - down.theta) / (2.0 * step)
    fd_sigma = (up.sigma - down.sigma) / (2.0 * step)
    theta_abs = float(np.max(np.abs(fd_theta - base.d_plus_theta)))
    sigma_abs = float(np.max(np.abs(fd_sigma - base.d_plus_sigma)))
    theta_scale = max(1.0, float(np.max(np.abs(base.d_plus_theta))))
    sigma_scale = max(1.0, float(np.max(np.abs(base.d_plus_sigma))))
    report = DPlusReport(
        theta_abs=theta_abs,
        sigma_abs=sigma_abs,
        theta_rel=theta_abs / theta_scale,
        sigma_rel=sigma_abs / sigma_scale,
    )
    logger.info(f"D+ consistency for {model.name}: {report}")
    return report
