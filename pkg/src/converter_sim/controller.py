"""Cascaded voltage-regulation controller.

The output-stage loop drives x4 to its setpoint through a dynamic reference
x3ref for the boost-leg current; the storage-stage loop keeps x2 near its
setpoint through a dynamic reference x1ref for the buck-leg current, with a
sign-scheduled gain kappa5 that follows the direction of the energy flow.

Two algebraically equivalent forms of the storage-stage duty law are provided:
the deployed closed-form solution and a fixed-point solve of the
derivative-based form, kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DivisionGuard, InfeasibleGains, SingularDenominator
from .plant import ControlInput, ConverterParams, PlantState


@dataclass(frozen=True)
class Sigma1Gains:
    kappa1: float = 10.0
    kappa2: float = 1.0
    kappa3: float = 500.0

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "kappa3"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"Sigma1Gains.{name} must be strictly positive")


@dataclass(frozen=True)
class Sigma2Gains:
    kappa4: float = 1.0
    kappa5_magnitude: float = 1.8
    epsilon: float = 0.01
    x1_min: float = -50.0
    x1_max: float = 50.0
    um: float = 0.05
    uM: float = 0.95
    hysteresis_band: float = 0.2
    x2_floor: float = 1.0
    denom_floor: float = 0.5
    schedule_kappa5: bool = True
    # fraction of the singular current C1*x2/(L1*kappa5) the reference
    # command may reach; keeps the deployed duty-law denominator alive
    x1ref_margin: float = 0.85

    def __post_init__(self):
        if not (self.kappa4 > 0.0):
            raise ValueError("Sigma2Gains.kappa4 must be strictly positive")
        if not (self.epsilon > 0.0):
            raise ValueError("Sigma2Gains.epsilon must be strictly positive")
        if not (self.x1_min < 0.0 < self.x1_max):
            raise ValueError("Sigma2Gains requires x1_min < 0 < x1_max")
        if not (0.0 < self.um < self.uM <= 1.0):
            raise ValueError("Sigma2Gains requires 0 < um < uM <= 1")
        if not (self.hysteresis_band >= 0.0):
            raise ValueError("Sigma2Gains.hysteresis_band must be nonnegative")


@dataclass(frozen=True)
class References:
    x2star: float
    x4star: float

    def __post_init__(self):
        if not (self.x2star > 0.0 and self.x4star > 0.0):
            raise ValueError("References must be strictly positive")


@dataclass(frozen=True)
class ControllerState:
    x3ref: float
    x1ref: float
    kappa5_sign: int = 1
    # last-applied gain and setpoint; x1ref integrates -kappa5*x2dot, which
    # tracks the target -kappa5*(x2 - x2star) only while both stay constant,
    # so x1ref is re-anchored whenever either changes
    kappa5_last: float | None = None
    x2star_last: float | None = None


def saturate(u_raw: float, um: float, uM: float) -> float:
    """Clamp a duty ratio into its admissible interval."""
    return min(max(u_raw, um), uM)


def sigma1_control(state: PlantState, cs: ControllerState, refs: References,
                   IL: float, g1: Sigma1Gains, p: ConverterParams,
                   x2_floor: float = 1.0):
    """Output-stage duty law and reference-current rate.

    Returns (u2_raw, x3ref_dot). Raises DivisionGuard when x2 has collapsed
    below the floor and the 1/x2 feedback term is meaningless.
    """
    if state.x2 < x2_floor:
        raise DivisionGuard(f"x2={state.x2:.3g} V below floor {x2_floor:.3g} V")
    e3 = state.x3 - cs.x3ref
    e4 = state.x4 - refs.x4star
    load_err = state.x3 - IL
    x3ref_dot = -(g1.kappa2 / p.C2) * load_err - g1.kappa3 * e4
    u2_raw = (
        state.x4
        + p.R2 * cs.x3ref
        - g1.kappa1 * e3
        - p.L2 * g1.kappa3 * e4
        - (p.L2 * g1.kappa2 / p.C2) * load_err
    ) / state.x2
    return u2_raw, x3ref_dot


def hysteresis_sign(x1: float, prev_sign: int, band: float) -> int:
    """Debounced sign of x1: flips only past +/-band."""
    if x1 > band:
        return 1
    if x1 < -band:
        return -1
    return prev_sign


def kappa5_schedule(x1: float, x2: float, g2: Sigma2Gains, p: ConverterParams,
                    prev_sign: int = 1):
    """Scheduled gain for the storage-stage loop.

    Returns (kappa5, sign). The sign tracks the hysteresis-filtered sign of x1
    so that kappa5*x1 >= 0; the magnitude honors both the user setting and the
    branch lower bound that keeps the deployed duty-law denominator away from
    zero.
    """
    if g2.kappa5_magnitude < -p.G / g2.um + g2.epsilon:
        raise InfeasibleGains(
            f"kappa5 magnitude {g2.kappa5_magnitude:.3g} violates the "
            f"well-posedness bound {-p.G / g2.um + g2.epsilon:.3g}"
        )
    sign = hysteresis_sign(x1, prev_sign, g2.hysteresis_band)
    if not g2.schedule_kappa5:
        # constant-gain mode: positive kappa5 regardless of the current
        # direction, as in the reference experiments
        return g2.kappa5_magnitude, sign
    if sign >= 0:
        branch_bound = (p.C1 / p.L1) * (x2 / g2.x1_max) + g2.epsilon
        return max(g2.kappa5_magnitude, branch_bound), sign
    branch_bound = (p.C1 / p.L1) * (x2 / g2.x1_min) - g2.epsilon
    return min(-g2.kappa5_magnitude, branch_bound), sign


def x1ref_bounds(x2: float, kappa5: float, g2: Sigma2Gains, p: ConverterParams):
    """Admissible range for the storage-leg reference current.

    Combines the physical current envelope with a margin below the singular
    current C1*x2/(L1*kappa5) at which the deployed duty law loses its unique
    solution; large setpoint steps are slew-limited through this clamp instead
    of commanding currents past the singularity.
    """
    lo, hi = g2.x1_min, g2.x1_max
    if kappa5 > 0.0:
        hi = min(hi, g2.x1ref_margin * p.C1 * x2 / (p.L1 * kappa5))
    elif kappa5 < 0.0:
        lo = max(lo, g2.x1ref_margin * p.C1 * x2 / (p.L1 * kappa5))
    return lo, hi


def sigma2_control_deployed(state: PlantState, cs: ControllerState, u2: float,
                            kappa5: float, g2: Sigma2Gains, p: ConverterParams):
    """Storage-stage duty law in closed form.

    Returns (u1_raw, x1ref_dot); x1ref_dot is evaluated with the returned raw
    duty (callers integrating with a saturated duty recompute it via
    x1ref_dot).
    """
    e1 = state.x1 - cs.x1ref
    denom = state.x2 - (p.L1 * kappa5 / p.C1) * state.x1
    if abs(denom) < g2.denom_floor:
        raise SingularDenominator(
            f"|x2 - L1*kappa5*x1/C1| = {abs(denom):.3g} V below floor "
            f"{g2.denom_floor:.3g} V"
        )
    coupling = state.x3 * u2 + p.G * state.x2
    u1_raw = (
        state.x5 - p.R1 * cs.x1ref + g2.kappa4 * e1
        - (p.L1 / p.C1) * kappa5 * coupling
    ) / denom
    return u1_raw, x1ref_dot(state, u1_raw, u2, kappa5, p)


def x1ref_dot(state: PlantState, u1: float, u2: float, kappa5: float,
              p: ConverterParams) -> float:
    """Rate of the storage-stage dynamic reference, -kappa5*x2dot."""
    return -(kappa5 / p.C1) * (state.x1 * u1 - state.x3 * u2 - p.G * state.x2)


def sigma2_control_oracle(state: PlantState, cs: ControllerState, u2: float,
                          kappa5: float, g2: Sigma2Gains, p: ConverterParams) -> float:
    """Derivative-form duty law solved as a root of its own residual.

    Never rearranges the equation into the closed form: the residual
    x2*u1 - [x5 + kappa4*(x1 - x1ref) + w(u1)] is affine in u1, so a secant
    step from two evaluations lands on the exact root. Cross-check only.
    """
    e1 = state.x1 - cs.x1ref

    def residual(u1):
        w = -p.L1 * x1ref_dot(state, u1, u2, kappa5, p) - p.R1 * cs.x1ref
        return state.x2 * u1 - (state.x5 + g2.kappa4 * e1 + w)

    f0 = residual(0.0)
    f1 = residual(1.0)
    if f1 == f0:
        raise SingularDenominator("derivative-form duty law has no unique solution")
    return -f0 / (f1 - f0)


@dataclass(frozen=True)
class ControllerOutput:
    u: ControlInput
    cs_next: ControllerState
    kappa5: float
    u1_raw: float
    u2_raw: float

    @property
    def sat1(self) -> bool:
        return self.u.u1 != self.u1_raw

    @property
    def sat2(self) -> bool:
        return self.u.u2 != self.u2_raw


def controller_step(state: PlantState, cs: ControllerState, refs: References,
                    IL: float, g1: Sigma1Gains, g2: Sigma2Gains,
                    p: ConverterParams, dt: float) -> ControllerOutput:
    """One controller update: duty ratios plus advanced dynamic extensions.

    The reference integrators advance with the saturated duties substituted;
    no further anti-windup is applied.
    """
    u2_raw, x3ref_dot = sigma1_control(state, cs, refs, IL, g1, p, g2.x2_floor)
    u2 = saturate(u2_raw, g2.um, g2.uM)
    kappa5, sign = kappa5_schedule(state.x1, state.x2, g2, p, cs.kappa5_sign)
    lo, hi = x1ref_bounds(state.x2, kappa5, g2, p)
    target = -kappa5 * (state.x2 - refs.x2star)
    if (kappa5 != cs.kappa5_last or refs.x2star != cs.x2star_last
            or not lo <= target <= hi):
        cs = replace(cs, x1ref=min(max(target, lo), hi))
    u1_raw, _ = sigma2_control_deployed(state, cs, u2, kappa5, g2, p)
    u1 = saturate(u1_raw, g2.um, g2.uM)
    x1ref_next = cs.x1ref + dt * x1ref_dot(state, u1, u2, kappa5, p)
    cs_next = replace(
        cs,
        x3ref=cs.x3ref + dt * x3ref_dot,
        x1ref=min(max(x1ref_next, lo), hi),
        kappa5_sign=sign,
        kappa5_last=kappa5,
        x2star_last=refs.x2star,
    )
    return ControllerOutput(
        u=ControlInput(u1=u1, u2=u2),
        cs_next=cs_next,
        kappa5=kappa5,
        u1_raw=u1_raw,
        u2_raw=u2_raw,
    )


def initial_controller_state(x0: PlantState, refs: References, IL: float,
                             g2: Sigma2Gains, p: ConverterParams) -> ControllerState:
    """Start the dynamic extensions at their instantaneous targets."""
    sign = hysteresis_sign(x0.x1, 1, g2.hysteresis_band)
    kappa5, sign = kappa5_schedule(x0.x1, x0.x2, g2, p, sign)
    lo, hi = x1ref_bounds(x0.x2, kappa5, g2, p)
    return ControllerState(
        x3ref=IL,
        x1ref=min(max(-kappa5 * (x0.x2 - refs.x2star), lo), hi),
        kappa5_sign=sign,
        kappa5_last=kappa5,
        x2star_last=refs.x2star,
    )
