"""Shared fixtures: cached catalog runs and gain sweeps.

The catalog simulations are the slow part of the suite, so they run once per
session and are shared between the behavioural tests and the acceptance
gate.
"""

from __future__ import annotations

from dataclasses import replace

import pytest

from converter_sim.catalog import CATALOG
from converter_sim.cli import default_transient_cut, scenario_metrics
from converter_sim.config import build_scenario
from converter_sim.simulator import simulate


@pytest.fixture(scope="session")
def catalog_runs():
    """name -> (scenario, trajectory, metrics) for every catalog entry."""
    out = {}
    for name, entry in CATALOG.items():
        sc = build_scenario(entry.config)
        traj = simulate(sc)
        out[name] = (sc, traj, scenario_metrics(sc, traj))
    return out


def _sweep(entry_name: str):
    entry = CATALOG[entry_name]
    gain = entry.config.sweep_gain
    rows = []
    for value in entry.config.sweep_values:
        sc = build_scenario(entry.config, {gain: value})
        sc = replace(sc, name=f"{entry_name}.{gain}={value:g}")
        traj = simulate(sc)
        rows.append((value, sc, traj, scenario_metrics(sc, traj)))
    return rows


@pytest.fixture(scope="session")
def sweep_fig5a():
    return _sweep("fig5a")


@pytest.fixture(scope="session")
def sweep_fig5b():
    return _sweep("fig5b")


@pytest.fixture(scope="session")
def sweep_fig6a():
    return _sweep("fig6a")


@pytest.fixture(scope="session")
def sweep_fig6b():
    return _sweep("fig6b")


__all__ = ["default_transient_cut"]
