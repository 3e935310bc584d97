"""Flat key-value scenario configs with dotted section prefixes.

Format, one `key = value` pair per line, `#` comments:

    name = fig5_baseline
    params.l1 = 0.01
    gains.kappa1 = 10
    schedules.x4star = 0:50, 0.5:70
    sim.model = averaged
    sweep.gain = kappa1
    sweep.values = 1, 5, 10

Unknown keys are rejected; schedules are comma-separated time:value pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .controller import Sigma1Gains, Sigma2Gains
from .errors import ConfigError
from .plant import ConverterParams, PlantState, experimental_params
from .simulator import Scenario

PARAM_KEYS = {
    "l1": "L1", "l2": "L2", "c1": "C1", "c2": "C2", "csc": "Csc",
    "r1": "R1", "r2": "R2", "g": "G", "gsc": "Gsc",
}
GAIN_KEYS = {
    "kappa1", "kappa2", "kappa3", "kappa4", "kappa5", "epsilon",
    "x1_min", "x1_max", "u_min", "u_max", "hysteresis_band",
    "x2_floor", "denom_floor", "schedule_kappa5",
}
REQUIRED_GAIN_KEYS = {"kappa1", "kappa2", "kappa3", "kappa4", "kappa5"}
SCHEDULE_KEYS = {"x2star", "x4star", "il"}
SIM_KEYS = {"model", "dt", "fsw", "horizon", "sample_period"}
X0_KEYS = {"x1", "x2", "x3", "x4", "x5"}
SWEEP_KEYS = {"gain", "values"}
SWEEPABLE_GAINS = {"kappa1", "kappa2", "kappa3", "kappa4", "kappa5"}


@dataclass
class ScenarioConfig:
    name: str
    params: dict = field(default_factory=dict)
    gains: dict = field(default_factory=dict)
    schedules: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    x0: dict | None = None
    sweep_gain: str | None = None
    sweep_values: list | None = None

    def scenario(self) -> Scenario:
        return build_scenario(self)


def _parse_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"key '{key}': cannot parse '{text}' as a number") from None


def _parse_schedule(key: str, text: str):
    points = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigError(f"key '{key}': expected time:value pairs, got '{chunk}'")
        t_str, v_str = chunk.split(":", 1)
        points.append((_parse_float(key, t_str), _parse_float(key, v_str)))
    if not points:
        raise ConfigError(f"key '{key}': empty schedule")
    return tuple(points)


def parse_config(text: str) -> ScenarioConfig:
    cfg = ScenarioConfig(name="scenario")
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        seen.add(key)
        _assign(cfg, key, value)
    _check_required(cfg)
    return cfg


def _assign(cfg: ScenarioConfig, key: str, value: str):
    if key == "name":
        cfg.name = value
        return
    if "." not in key:
        raise ConfigError(f"unknown key '{key}'")
    section, sub = key.split(".", 1)
    if section == "params":
        if sub == "preset":
            if value not in ("table1", "experimental"):
                raise ConfigError(f"key '{key}': unknown preset '{value}'")
            cfg.params["preset"] = value
            return
        if sub not in PARAM_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        v = _parse_float(key, value)
        if not v > 0.0:
            raise ConfigError(f"key '{key}': must be strictly positive, got {v}")
        cfg.params[sub] = v
    elif section == "gains":
        if sub not in GAIN_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        if sub == "schedule_kappa5":
            if value not in ("true", "false"):
                raise ConfigError(f"key '{key}': expected true or false")
            cfg.gains[sub] = value == "true"
            return
        v = _parse_float(key, value)
        if sub in REQUIRED_GAIN_KEYS and sub != "kappa5" and not v > 0.0:
            raise ConfigError(f"key '{key}': must be strictly positive, got {v}")
        cfg.gains[sub] = v
    elif section == "schedules":
        if sub not in SCHEDULE_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        cfg.schedules[sub] = _parse_schedule(key, value)
    elif section == "sim":
        if sub not in SIM_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        cfg.sim[sub] = value if sub == "model" else _parse_float(key, value)
    elif section == "x0":
        if sub not in X0_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        if cfg.x0 is None:
            cfg.x0 = {}
        cfg.x0[sub] = _parse_float(key, value)
    elif section == "sweep":
        if sub not in SWEEP_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        if sub == "gain":
            if value not in SWEEPABLE_GAINS:
                raise ConfigError(f"key '{key}': '{value}' is not a sweepable gain")
            cfg.sweep_gain = value
        else:
            cfg.sweep_values = [_parse_float(key, chunk.strip())
                                for chunk in value.split(",") if chunk.strip()]
    else:
        raise ConfigError(f"unknown key '{key}'")


def _check_required(cfg: ScenarioConfig):
    for k in sorted(REQUIRED_GAIN_KEYS):
        if k not in cfg.gains:
            raise ConfigError(f"missing required key 'gains.{k}'")
    for k in sorted(SCHEDULE_KEYS):
        if k not in cfg.schedules:
            raise ConfigError(f"missing required key 'schedules.{k}'")
    for k in ("model", "horizon"):
        if k not in cfg.sim:
            raise ConfigError(f"missing required key 'sim.{k}'")
    if cfg.x0 is not None:
        missing = sorted(X0_KEYS - set(cfg.x0))
        if missing:
            raise ConfigError(f"missing required key 'x0.{missing[0]}'")
    if (cfg.sweep_gain is None) != (cfg.sweep_values is None):
        raise ConfigError("sweep.gain and sweep.values must be given together")


def build_scenario(cfg: ScenarioConfig, gain_override: dict | None = None) -> Scenario:
    pkv = dict(cfg.params)
    preset = pkv.pop("preset", "table1")
    base = experimental_params() if preset == "experimental" else ConverterParams()
    if pkv:
        fields = {name: getattr(base, name) for name in
                  ("L1", "L2", "C1", "C2", "Csc", "R1", "R2", "G", "Gsc")}
        fields.update({PARAM_KEYS[k]: v for k, v in pkv.items()})
        base = ConverterParams(**fields)

    gains = dict(cfg.gains)
    if gain_override:
        gains.update(gain_override)
    try:
        g1 = Sigma1Gains(kappa1=gains["kappa1"], kappa2=gains["kappa2"],
                         kappa3=gains["kappa3"])
        g2 = Sigma2Gains(
            kappa4=gains["kappa4"],
            kappa5_magnitude=gains["kappa5"],
            epsilon=gains.get("epsilon", 0.01),
            x1_min=gains.get("x1_min", -50.0),
            x1_max=gains.get("x1_max", 50.0),
            um=gains.get("u_min", 0.05),
            uM=gains.get("u_max", 0.95),
            hysteresis_band=gains.get("hysteresis_band", 0.2),
            x2_floor=gains.get("x2_floor", 1.0),
            denom_floor=gains.get("denom_floor", 0.5),
            schedule_kappa5=gains.get("schedule_kappa5", True),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    x0 = PlantState(**cfg.x0) if cfg.x0 is not None else None
    sim = cfg.sim
    model = sim.get("model", "averaged")
    dt_default = 1e-6 if model == "switched" else 1e-5
    return Scenario(
        name=cfg.name,
        params=base,
        g1=g1,
        g2=g2,
        x2star_schedule=cfg.schedules["x2star"],
        x4star_schedule=cfg.schedules["x4star"],
        il_schedule=cfg.schedules["il"],
        x0=x0,
        model=model,
        fsw=sim.get("fsw", 10e3),
        dt=sim.get("dt", dt_default),
        horizon=sim["horizon"],
        sample_period=sim.get("sample_period", 1e-4),
    )


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(float(v))


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text form: sorted keys within fixed section order."""
    lines = [f"name = {cfg.name}"]
    if "preset" in cfg.params:
        lines.append(f"params.preset = {cfg.params['preset']}")
    for k in sorted(k for k in cfg.params if k != "preset"):
        lines.append(f"params.{k} = {_fmt(cfg.params[k])}")
    for k in sorted(cfg.gains):
        lines.append(f"gains.{k} = {_fmt(cfg.gains[k])}")
    for k in sorted(cfg.schedules):
        pairs = ", ".join(f"{_fmt(t)}:{_fmt(v)}" for t, v in cfg.schedules[k])
        lines.append(f"schedules.{k} = {pairs}")
    for k in sorted(cfg.sim):
        v = cfg.sim[k]
        lines.append(f"sim.{k} = {v if k == 'model' else _fmt(v)}")
    if cfg.x0 is not None:
        for k in sorted(cfg.x0):
            lines.append(f"x0.{k} = {_fmt(cfg.x0[k])}")
    if cfg.sweep_gain is not None:
        lines.append(f"sweep.gain = {cfg.sweep_gain}")
        lines.append("sweep.values = " + ", ".join(_fmt(v) for v in cfg.sweep_values))
    return "\n".join(lines) + "\n"


def normalize_config(text: str) -> str:
    return serialize_config(parse_config(text))
