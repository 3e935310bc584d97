"""Built-in scenario catalog for the reference response studies."""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import ScenarioConfig
from .simulator import Scenario

BASELINE_GAINS = {
    "kappa1": 10.0,
    "kappa2": 1.0,
    "kappa3": 500.0,
    "kappa4": 1.0,
    "kappa5": 1.8,
}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    config: ScenarioConfig
    expected_metrics: dict = field(default_factory=dict)

    def scenario(self) -> Scenario:
        return self.config.scenario()


def _cfg(name, schedules, horizon, sweep_gain=None, sweep_values=None,
         gains=None, sim_extra=None) -> ScenarioConfig:
    g = dict(BASELINE_GAINS)
    if gains:
        g.update(gains)
    sim = {"model": "averaged", "horizon": horizon}
    if sim_extra:
        sim.update(sim_extra)
    return ScenarioConfig(
        name=name,
        gains=g,
        schedules={k: tuple(v) for k, v in schedules.items()},
        sim=sim,
        sweep_gain=sweep_gain,
        sweep_values=list(sweep_values) if sweep_values else None,
    )


_SIGMA1_STEP = {
    "x2star": [(0.0, 100.0)],
    "x4star": [(0.0, 50.0), (0.5, 70.0)],
    "il": [(0.0, 5.0)],
}
_SIGMA2_STEP = {
    "x2star": [(0.0, 100.0), (0.25, 120.0)],
    "x4star": [(0.0, 50.0)],
    "il": [(0.0, 5.0)],
}
_FULL_SCHEDULES = {
    "x2star": [(0.0, 100.0)],
    "x4star": [(0.0, 45.0), (0.15, 50.0), (0.3, 55.0), (0.45, 60.0)],
    "il": [(0.0, 5.0), (0.6, -5.0), (0.8, 0.0), (1.0, 5.0)],
}


def build_catalog() -> dict[str, CatalogEntry]:
    entries = [
        CatalogEntry(
            name="fig5a",
            description="output-voltage step 50->70 V at IL=5 A, kappa1 sweep",
            config=_cfg("fig5a", _SIGMA1_STEP, 2.0,
                        sweep_gain="kappa1", sweep_values=[1.0, 5.0, 10.0, 50.0]),
            expected_metrics={"settling_window_s": [0.04, 0.10],
                              "final_x4_v": [69.5, 70.5]},
        ),
        CatalogEntry(
            name="fig5b",
            description="output-voltage step 50->70 V at IL=5 A, kappa2 sweep",
            config=_cfg("fig5b", _SIGMA1_STEP, 2.0,
                        sweep_gain="kappa2", sweep_values=[0.5, 1.0, 2.0, 5.0, 10.0]),
        ),
        CatalogEntry(
            name="fig5c",
            description="output-voltage step 50->70 V at IL=5 A, kappa3 sweep",
            config=_cfg("fig5c", _SIGMA1_STEP, 2.0,
                        sweep_gain="kappa3", sweep_values=[50.0, 100.0, 250.0, 500.0]),
        ),
        CatalogEntry(
            name="fig6a",
            description="bus-voltage step 100->120 V at IL=5 A, kappa4 sweep",
            config=_cfg("fig6a", _SIGMA2_STEP, 1.5,
                        sweep_gain="kappa4", sweep_values=[0.1, 0.5, 1.0, 5.0, 10.0]),
            expected_metrics={"steady_state_x2_v": [114.0, 121.0]},
        ),
        CatalogEntry(
            name="fig6b",
            description="bus-voltage step 100->120 V at IL=5 A, kappa5 sweep",
            config=_cfg("fig6b", _SIGMA2_STEP, 1.5,
                        sweep_gain="kappa5", sweep_values=[0.9, 1.8, 3.6, 10.0]),
            expected_metrics={"steady_state_x2_v": [114.0, 121.0]},
        ),
        CatalogEntry(
            name="fig7",
            description="bus-voltage regulation under stepped load current",
            config=_cfg(
                "fig7",
                {
                    "x2star": [(0.0, 100.0), (0.25, 120.0)],
                    "x4star": [(0.0, 50.0)],
                    "il": [(0.0, 2.0), (1.0, 5.0), (2.0, 8.0)],
                },
                3.0,
            ),
        ),
        CatalogEntry(
            name="fig8",
            description="staircase output reference then bidirectional load steps",
            config=_cfg("fig8", _FULL_SCHEDULES, 1.2,
                        gains={"schedule_kappa5": False}),
            expected_metrics={"x4_plateaus_v": [45.0, 50.0, 55.0, 60.0]},
        ),
        CatalogEntry(
            name="fig9",
            description="supercapacitor voltage during charge/discharge cycling",
            config=_cfg("fig9", _FULL_SCHEDULES, 1.2,
                        gains={"schedule_kappa5": False}),
        ),
    ]
    return {e.name: e for e in entries}


CATALOG = build_catalog()


def get_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry '{name}'; known: {sorted(CATALOG)}") from None
