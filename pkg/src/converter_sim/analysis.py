"""Numerical certification of the closed loop's proved properties."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controller import Sigma1Gains, Sigma2Gains
from .errors import TooCoarse
from .plant import ConverterParams
from .simulator import SimResult


@dataclass(frozen=True)
class ErrorSystemSigma1:
    """3x3 LTI matrix governing the output-stage error coordinates."""

    A: np.ndarray


def sigma1_error_matrix(g1: Sigma1Gains, p: ConverterParams) -> ErrorSystemSigma1:
    A = np.array([
        [-(p.R2 + g1.kappa1) / p.L2, 0.0, 0.0],
        [1.0 / p.C2, -g1.kappa2 / p.C2, -g1.kappa3 / p.C2],
        [0.0, 1.0, 0.0],
    ])
    return ErrorSystemSigma1(A=A)


def _char_poly_coeffs(A: np.ndarray) -> tuple[float, float, float, float]:
    """Coefficients (a3, a2, a1, a0) of det(sI - A) for a 3x3 matrix."""
    tr = A[0, 0] + A[1, 1] + A[2, 2]
    m = 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        m += A[i, i] * A[j, j] - A[i, j] * A[j, i]
    det = (
        A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
        - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
        + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
    )
    return 1.0, -tr, m, -det


def hurwitz(sys: ErrorSystemSigma1) -> bool:
    """Routh-Hurwitz certificate on the cubic characteristic polynomial.

    For a3*s^3 + a2*s^2 + a1*s + a0 with a3 > 0: stable iff a2, a1, a0 > 0
    and a2*a1 > a3*a0. No eigensolver involved.
    """
    a3, a2, a1, a0 = _char_poly_coeffs(sys.A)
    return a2 > 0.0 and a1 > 0.0 and a0 > 0.0 and a2 * a1 > a3 * a0


@dataclass(frozen=True)
class SprMargin:
    min_real_part: float
    argmin_omega: float


def default_omega_grid() -> np.ndarray:
    return np.logspace(0.0, 6.0, 400)


def spr_margin(p: ConverterParams, omega_grid=None) -> SprMargin:
    """Minimum of Re G(jw) for G(s) = s / (L2 s^2 + R2 s + 1/C2) over a grid.

    The closed form is R2 w^2 / [(1/C2 - L2 w^2)^2 + (R2 w)^2], strictly
    positive for every w > 0.
    """
    omega = default_omega_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    if omega.size == 0 or np.any(omega <= 0.0):
        raise ValueError("omega grid must be nonempty and strictly positive")
    re = (p.R2 * omega ** 2) / ((1.0 / p.C2 - p.L2 * omega ** 2) ** 2 + (p.R2 * omega) ** 2)
    i = int(np.argmin(re))
    return SprMargin(min_real_part=float(re[i]), argmin_omega=float(omega[i]))


def _smooth_mask(traj: SimResult, pad: int = 2) -> np.ndarray:
    """Samples where finite differencing of the power balance is valid.

    The duty ratios are non-smooth exactly where a reference/load step hits
    the feedback or a saturation limit engages or releases; differencing
    across those instants measures the kink, not the balance. A small
    neighborhood (+/-pad samples) of each such event is excluded, as are the
    one-sided boundary stencils.
    """
    n = len(traj.t)
    mask = np.ones(n, dtype=bool)
    events = np.zeros(n, dtype=bool)
    for col in ("sat1", "sat2", "x2star", "x4star", "il"):
        series = traj.column(col)
        changed = np.flatnonzero(np.diff(series) != 0)
        events[changed] = True
        events[changed + 1] = True
    for idx in np.flatnonzero(events):
        mask[max(0, idx - pad):idx + pad + 1] = False
    mask[:pad + 1] = False
    mask[n - pad - 1:] = False
    return mask


def _interval_residual(H: np.ndarray, rate: np.ndarray, rate_end: np.ndarray,
                       traj: SimResult) -> float:
    """Worst normalized energy-balance defect across sampled intervals.

    Compares the stored-energy change over each interval with the trapezoid
    integral of the balance rate (duty held over the interval), expressed as
    an average-rate error and normalized by the peak rate magnitude.
    """
    h = np.diff(traj.t)
    defect = np.diff(H) / h - 0.5 * (rate[:-1] + rate_end)
    mask = _smooth_mask(traj)
    valid = mask[:-1] & mask[1:]
    scale = max(float(np.max(np.abs(rate))), 1e-12)
    if not np.any(valid):
        return 0.0
    return float(np.max(np.abs(defect[valid])) / scale)


def passivity_residual_sigma2(traj: SimResult, p: ConverterParams,
                              max_sample_ratio: float = 10.0,
                              dt_hint: float | None = None) -> float:
    """Worst normalized residual of the storage-stage power balance.

    Checks d/dt H2 = -d2 - x2*x3*u2 with H2 the storage-stage co-energy and
    d2 its dissipation, integrated over each sampled interval with the duty
    held at its start-of-interval value.
    """
    t = traj.t
    if len(t) < 5:
        raise TooCoarse("need at least 5 samples")
    sample_period = float(t[1] - t[0])
    if dt_hint is not None and sample_period > max_sample_ratio * dt_hint + 1e-15:
        raise TooCoarse(
            f"sample period {sample_period:.3g} s exceeds {max_sample_ratio} x dt"
        )
    H2 = 0.5 * (p.L1 * traj.x1 ** 2 + p.C1 * traj.x2 ** 2 + p.Csc * traj.x5 ** 2)
    d2 = p.R1 * traj.x1 ** 2 + p.G * traj.x2 ** 2 + p.Gsc * traj.x5 ** 2
    rate = -d2 - traj.x2 * traj.x3 * traj.u2
    # the duty is held over each sampled interval, so the end-of-interval
    # rate is evaluated with the start-of-interval duty
    rate_end = -d2[1:] - traj.x2[1:] * traj.x3[1:] * traj.u2[:-1]
    return _interval_residual(H2, rate, rate_end, traj)


def passivity_residual_sigma1(traj: SimResult, p: ConverterParams) -> float:
    """Normalized residual of d/dt H1 = -R2*x3^2 + x2*x3*u2 (IL = 0 case)."""
    H1 = 0.5 * (p.L2 * traj.x3 ** 2 + p.C2 * traj.x4 ** 2)
    rate = -p.R2 * traj.x3 ** 2 + traj.x2 * traj.x3 * traj.u2
    rate_end = -p.R2 * traj.x3[1:] ** 2 + traj.x2[1:] * traj.x3[1:] * traj.u2[:-1]
    return _interval_residual(H1, rate, rate_end, traj)


def phi_sup(traj: SimResult, x2star: float, p: ConverterParams,
            transient_cut: float) -> float:
    """Post-transient supremum of |x1 - x1ref| + |x3| + |G*x2star|."""
    if transient_cut >= traj.t[-1]:
        raise ValueError("transient_cut must fall inside the horizon")
    mask = traj.t >= transient_cut
    phi = np.abs(traj.x1 - traj.x1ref)[mask] + np.abs(traj.x3)[mask] + abs(p.G * x2star)
    return float(np.max(phi))


def ultimate_bound(phiM: float, kappa5: float, g2: Sigma2Gains,
                   p: ConverterParams) -> float:
    """Asymptotic ceiling on |x2 - x2star|: phiM / (G + kappa5*um)."""
    denom = p.G + kappa5 * g2.um
    if not (denom > 0.0):
        raise ValueError("requires G + kappa5*um > 0")
    return phiM / denom


@dataclass(frozen=True)
class ResponseMetrics:
    settling_time_2pct: float | None
    overshoot_pct: float
    steady_state_error: float
    ultimate_bound: float | None = None

    @property
    def settled(self) -> bool:
        return self.settling_time_2pct is not None


def response_metrics(traj: SimResult, channel: str, ref_value: float,
                     step_time: float) -> ResponseMetrics:
    """Settling/overshoot/steady-state metrics for a step on x2 or x4.

    Settling is the first instant after the step past which the channel stays
    inside +/-2% of the reference; overshoot is the worst excursion beyond the
    reference as a percentage of the step size.
    """
    if channel not in ("x2", "x4"):
        raise ValueError("channel must be 'x2' or 'x4'")
    y = traj.column(channel)
    t = traj.t
    if step_time > t[-1]:
        raise ValueError("step_time beyond horizon")
    after = t >= step_time
    y_after = y[after]
    t_after = t[after]

    pre_mask = t < step_time
    y0 = y[pre_mask][-1] if np.any(pre_mask) else y_after[0]
    step = ref_value - y0

    band = 0.02 * abs(ref_value)
    inside = np.abs(y_after - ref_value) <= band
    settling = None
    # last exit from the band determines the settling instant
    if inside[-1]:
        outside = np.flatnonzero(~inside)
        if outside.size == 0:
            settling = 0.0
        else:
            settling = float(t_after[outside[-1] + 1] - step_time)

    if abs(step) > 1e-12:
        excursion = (y_after - ref_value) * np.sign(step)
        overshoot = 100.0 * max(float(np.max(excursion)), 0.0) / abs(step)
    else:
        overshoot = 0.0

    tail = t >= t[-1] - 0.1 * (t[-1] - t[0])
    sse = float(np.mean(y[tail]) - ref_value)
    return ResponseMetrics(
        settling_time_2pct=settling,
        overshoot_pct=overshoot,
        steady_state_error=sse,
    )
