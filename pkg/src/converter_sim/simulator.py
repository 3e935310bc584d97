"""Fixed-step closed-loop simulation in averaged and PWM-switched modes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .controller import (
    ControllerState,
    References,
    Sigma1Gains,
    Sigma2Gains,
    controller_step,
    initial_controller_state,
)
from .errors import ConfigError, NonFinite, SimError
from .plant import ControlInput, ConverterParams, PlantState, derivative

CSV_HEADER = ("t,x1,x2,x3,x4,x5,u1,u2,x3ref,x1ref,kappa5,il,x2star,x4star,"
              "sat1,sat2")

Schedule = Sequence[tuple[float, float]]

DEFAULT_ENVELOPE = {"x1": 50.0, "x2": 250.0, "x3": 60.0, "x4": 150.0, "x5": 150.0}


def schedule_value(schedule: Schedule, t: float) -> float:
    """Piecewise-constant lookup; each value holds from its breakpoint on."""
    value = schedule[0][1]
    for bp, v in schedule:
        if bp <= t:
            value = v
        else:
            break
    return value


def _validate_schedule(name: str, schedule: Schedule):
    if not schedule:
        raise ConfigError(f"schedule '{name}' is empty")
    times = [bp for bp, _ in schedule]
    if times[0] != 0.0:
        raise ConfigError(f"schedule '{name}' must start at t=0")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError(f"schedule '{name}' breakpoints must be strictly increasing")


@dataclass(frozen=True)
class Scenario:
    name: str = "scenario"
    params: ConverterParams = field(default_factory=ConverterParams)
    g1: Sigma1Gains = field(default_factory=Sigma1Gains)
    g2: Sigma2Gains = field(default_factory=Sigma2Gains)
    x2star_schedule: Schedule = ((0.0, 100.0),)
    x4star_schedule: Schedule = ((0.0, 50.0),)
    il_schedule: Schedule = ((0.0, 5.0),)
    x0: PlantState | None = None
    model: str = "averaged"
    fsw: float = 10e3
    dt: float = 1e-5
    horizon: float = 1.0
    sample_period: float = 1e-4
    envelope: dict = field(default_factory=lambda: dict(DEFAULT_ENVELOPE))

    def __post_init__(self):
        if self.model not in ("averaged", "switched"):
            raise ConfigError(f"unknown model '{self.model}'")
        if not (self.dt > 0.0):
            raise ConfigError("dt must be strictly positive")
        if not (self.horizon > 0.0):
            raise ConfigError("horizon must be strictly positive")
        if not (self.sample_period > 0.0):
            raise ConfigError("sample_period must be strictly positive")
        if self.model == "switched" and self.dt > 1.0 / (50.0 * self.fsw):
            raise ConfigError(
                f"switched mode requires dt <= 1/(50*fsw) = {1.0 / (50.0 * self.fsw):.3g} s"
            )
        for name in ("x2star_schedule", "x4star_schedule", "il_schedule"):
            _validate_schedule(name, getattr(self, name))

    def initial_state(self) -> PlantState:
        if self.x0 is not None:
            return self.x0
        return PlantState(
            x1=0.0,
            x2=schedule_value(self.x2star_schedule, 0.0),
            x3=schedule_value(self.il_schedule, 0.0),
            x4=schedule_value(self.x4star_schedule, 0.0),
            x5=48.0,
        )

    def refs_at(self, t: float) -> References:
        return References(
            x2star=schedule_value(self.x2star_schedule, t),
            x4star=schedule_value(self.x4star_schedule, t),
        )

    def il_at(self, t: float) -> float:
        return schedule_value(self.il_schedule, t)


@dataclass
class SimResult:
    scenario_name: str
    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    x4: np.ndarray
    x5: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    x3ref: np.ndarray
    x1ref: np.ndarray
    kappa5: np.ndarray
    il: np.ndarray
    x2star: np.ndarray
    x4star: np.ndarray
    sat1: np.ndarray
    sat2: np.ndarray

    COLUMNS = ("t", "x1", "x2", "x3", "x4", "x5", "u1", "u2", "x3ref",
               "x1ref", "kappa5", "il", "x2star", "x4star", "sat1", "sat2")

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def to_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            cols = [self.column(c) for c in self.COLUMNS]
            for i in range(len(self.t)):
                cells = []
                for name, col in zip(self.COLUMNS, cols):
                    if name in ("sat1", "sat2"):
                        cells.append(str(int(col[i])))
                    else:
                        cells.append(repr(float(col[i])))
                fh.write(",".join(cells) + "\n")

    @classmethod
    def from_csv(cls, path, scenario_name: str = "") -> "SimResult":
        with open(path) as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ConfigError(f"unexpected CSV header: {header!r}")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        kwargs = {name: data[:, i] for i, name in enumerate(cls.COLUMNS)}
        kwargs["sat1"] = kwargs["sat1"].astype(int)
        kwargs["sat2"] = kwargs["sat2"].astype(int)
        return cls(scenario_name=scenario_name, **kwargs)


def rk4_step(field_fn: Callable, state: PlantState, dt: float) -> PlantState:
    """Classical fourth-order Runge-Kutta step on the five plant states."""
    if not (dt > 0.0):
        raise ValueError("dt must be strictly positive")
    s = (state.x1, state.x2, state.x3, state.x4, state.x5)

    def f(v):
        return field_fn(PlantState(*v))

    k1 = f(s)
    k2 = f(tuple(si + 0.5 * dt * ki for si, ki in zip(s, k1)))
    k3 = f(tuple(si + 0.5 * dt * ki for si, ki in zip(s, k2)))
    k4 = f(tuple(si + dt * ki for si, ki in zip(s, k3)))
    new = tuple(
        si + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for si, a, b, c, d in zip(s, k1, k2, k3, k4)
    )
    if not all(math.isfinite(v) for v in new):
        raise NonFinite(f"non-finite state after step: {new}")
    return PlantState(*new)


def _sample_times(sc: Scenario) -> list[float]:
    n = math.floor(sc.horizon / sc.sample_period + 1e-9)
    times = [k * sc.sample_period for k in range(n + 1)]
    if times[-1] < sc.horizon - 1e-12:
        pass  # last sample lands before the horizon; contract keeps n+1 rows
    return times


def _breakpoints(sc: Scenario) -> list[float]:
    bps = set()
    for sched in (sc.x2star_schedule, sc.x4star_schedule, sc.il_schedule):
        for bp, _ in sched:
            if 0.0 < bp < sc.horizon:
                bps.add(bp)
    return sorted(bps)


class _Recorder:
    def __init__(self, sc: Scenario):
        self.sc = sc
        self.rows = {name: [] for name in SimResult.COLUMNS}

    def record(self, t, state, cs, u, kappa5, sat1, sat2):
        r = self.rows
        refs = self.sc.refs_at(t)
        r["t"].append(t)
        r["x1"].append(state.x1)
        r["x2"].append(state.x2)
        r["x3"].append(state.x3)
        r["x4"].append(state.x4)
        r["x5"].append(state.x5)
        r["u1"].append(u.u1)
        r["u2"].append(u.u2)
        r["x3ref"].append(cs.x3ref)
        r["x1ref"].append(cs.x1ref)
        r["kappa5"].append(kappa5)
        r["il"].append(self.sc.il_at(t))
        r["x2star"].append(refs.x2star)
        r["x4star"].append(refs.x4star)
        r["sat1"].append(int(sat1))
        r["sat2"].append(int(sat2))

    def result(self) -> SimResult:
        return SimResult(
            scenario_name=self.sc.name,
            **{name: np.array(col) for name, col in self.rows.items()},
        )


def simulate_averaged(sc: Scenario) -> SimResult:
    """Integrate the closed loop with continuous duty ratios.

    The controller updates at every plant step; integration steps never
    straddle a schedule breakpoint or a sample instant.
    """
    if sc.model != "averaged":
        raise ConfigError("scenario model is not 'averaged'")
    p = sc.params
    state = sc.initial_state()
    refs = sc.refs_at(0.0)
    il = sc.il_at(0.0)
    cs = initial_controller_state(state, refs, il, sc.g2, p)
    rec = _Recorder(sc)

    events = sorted(set(_sample_times(sc)) | set(_breakpoints(sc)) | {0.0, sc.horizon})
    sample_set = set(_sample_times(sc))
    t_now = 0.0
    try:
        for a, b in zip(events, events[1:] + [None]):
            refs = sc.refs_at(a)
            il = sc.il_at(a)
            if a in sample_set:
                peek = controller_step(state, cs, refs, il, sc.g1, sc.g2, p, sc.dt)
                rec.record(a, state, cs, peek.u, peek.kappa5, peek.sat1, peek.sat2)
            if b is None:
                break
            n = max(1, math.ceil((b - a) / sc.dt - 1e-9))
            h = (b - a) / n
            for i in range(n):
                t_now = a + i * h
                out = controller_step(state, cs, refs, il, sc.g1, sc.g2, p, h)
                u = out.u
                state = rk4_step(lambda x: derivative(x, u, il, p), state, h)
                cs = out.cs_next
    except SimError as exc:
        raise type(exc)(f"[{sc.name}] {exc}",
                        t=exc.t if exc.t is not None else t_now) from exc
    return rec.result()


def _carrier(t: float, fsw: float) -> float:
    """Unit-amplitude triangular carrier, phase-aligned to t=0."""
    phase = (t * fsw) % 1.0
    return 2.0 * phase if phase < 0.5 else 2.0 * (1.0 - phase)


def simulate_switched(sc: Scenario) -> SimResult:
    """Integrate the closed loop with binary PWM switch signals.

    Duties are held over each carrier period (one digital controller update
    per period) and compared against a shared triangular carrier; the plant
    sees {0,1} switch values.
    """
    if sc.model != "switched":
        raise ConfigError("scenario model is not 'switched'")
    p = sc.params
    Tc = 1.0 / sc.fsw
    state = sc.initial_state()
    refs = sc.refs_at(0.0)
    il = sc.il_at(0.0)
    cs = initial_controller_state(state, refs, il, sc.g2, p)
    rec = _Recorder(sc)

    sample_set = set(_sample_times(sc))
    n_periods = math.ceil(sc.horizon / Tc - 1e-9)
    carrier_bounds = [m * Tc for m in range(n_periods)] + [sc.horizon]
    events = sorted(set(_sample_times(sc)) | set(_breakpoints(sc))
                    | set(carrier_bounds) | {0.0, sc.horizon})
    carrier_set = set(carrier_bounds)

    out = None
    t_now = 0.0
    try:
        for a, b in zip(events, events[1:] + [None]):
            refs = sc.refs_at(a)
            il = sc.il_at(a)
            if out is None or a in carrier_set:
                out = controller_step(state, cs, refs, il, sc.g1, sc.g2, p, Tc)
                cs = out.cs_next
            if a in sample_set:
                rec.record(a, state, cs, out.u, out.kappa5, out.sat1, out.sat2)
            if b is None:
                break
            n = max(1, math.ceil((b - a) / sc.dt - 1e-9))
            h = (b - a) / n
            for k in range(n):
                t_now = a + k * h
                c = _carrier(t_now, sc.fsw)
                sw = ControlInput(
                    u1=1.0 if out.u.u1 >= c else 0.0,
                    u2=1.0 if out.u.u2 >= c else 0.0,
                )
                state = rk4_step(lambda x: derivative(x, sw, il, p), state, h)
    except SimError as exc:
        raise type(exc)(f"[{sc.name}] {exc}",
                        t=exc.t if exc.t is not None else t_now) from exc
    return rec.result()


def simulate(sc: Scenario) -> SimResult:
    return simulate_averaged(sc) if sc.model == "averaged" else simulate_switched(sc)
