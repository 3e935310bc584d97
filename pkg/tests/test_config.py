"""Scenario config parsing, validation, and round-tripping."""

import pytest

from converter_sim.config import (
    build_scenario,
    normalize_config,
    parse_config,
    serialize_config,
)
from converter_sim.errors import ConfigError

MINIMAL = """
name = demo
gains.kappa1 = 10
gains.kappa2 = 1
gains.kappa3 = 500
gains.kappa4 = 1
gains.kappa5 = 1.8
schedules.x2star = 0:100
schedules.x4star = 0:50, 0.5:70
schedules.il = 0:5
sim.model = averaged
sim.horizon = 1.0
"""


class TestParsing:
    def test_minimal_config(self):
        cfg = parse_config(MINIMAL)
        assert cfg.name == "demo"
        assert cfg.gains["kappa3"] == 500.0
        assert cfg.schedules["x4star"] == ((0.0, 50.0), (0.5, 70.0))
        assert cfg.sim == {"model": "averaged", "horizon": 1.0}

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config(MINIMAL + "\n# a comment\n\nsim.dt = 1e-5  # inline\n")
        assert cfg.sim["dt"] == 1e-5

    def test_missing_required_gain(self):
        broken = MINIMAL.replace("gains.kappa3 = 500\n", "")
        with pytest.raises(ConfigError, match="kappa3"):
            parse_config(broken)

    def test_negative_gain_rejected(self):
        broken = MINIMAL.replace("gains.kappa2 = 1", "gains.kappa2 = -1")
        with pytest.raises(ConfigError, match="positive"):
            parse_config(broken)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(MINIMAL + "gains.kappa9 = 1\n")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(MINIMAL + "foo.bar = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(MINIMAL + "sim.model = averaged\n")

    def test_malformed_line_rejected(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config(MINIMAL + "just some words\n")

    def test_malformed_schedule_rejected(self):
        with pytest.raises(ConfigError, match="time:value"):
            parse_config(MINIMAL.replace("schedules.il = 0:5", "schedules.il = 5"))

    def test_bad_number_rejected(self):
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_config(MINIMAL.replace("sim.horizon = 1.0", "sim.horizon = soon"))

    def test_sweep_keys_must_pair(self):
        with pytest.raises(ConfigError, match="together"):
            parse_config(MINIMAL + "sweep.gain = kappa1\n")
        with pytest.raises(ConfigError, match="not a sweepable gain"):
            parse_config(MINIMAL + "sweep.gain = epsilon\nsweep.values = 1\n")

    def test_partial_initial_state_rejected(self):
        with pytest.raises(ConfigError, match="x0"):
            parse_config(MINIMAL + "x0.x1 = 0\n")

    def test_bad_preset_rejected(self):
        with pytest.raises(ConfigError, match="preset"):
            parse_config(MINIMAL + "params.preset = bench\n")


class TestRoundTrip:
    def test_normalize_is_idempotent(self):
        once = normalize_config(MINIMAL)
        assert normalize_config(once) == once

    def test_serialize_parse_identity(self):
        text = MINIMAL + (
            "params.l1 = 0.012\n"
            "gains.schedule_kappa5 = false\n"
            "x0.x1 = 0\nx0.x2 = 100\nx0.x3 = 5\nx0.x4 = 50\nx0.x5 = 48\n"
            "sweep.gain = kappa1\nsweep.values = 1, 5, 10\n"
        )
        assert serialize_config(parse_config(text)) == normalize_config(text)
        cfg = parse_config(normalize_config(text))
        assert cfg.params["l1"] == 0.012
        assert cfg.gains["schedule_kappa5"] is False
        assert cfg.sweep_values == [1.0, 5.0, 10.0]


class TestBuildScenario:
    def test_defaults(self):
        sc = build_scenario(parse_config(MINIMAL))
        assert sc.model == "averaged"
        assert sc.dt == 1e-5
        assert sc.sample_period == 1e-4
        assert sc.params.L1 == 0.01
        assert sc.g1.kappa1 == 10.0
        assert sc.g2.kappa5_magnitude == 1.8

    def test_switched_default_step(self):
        cfg = parse_config(MINIMAL.replace("sim.model = averaged",
                                           "sim.model = switched"))
        assert build_scenario(cfg).dt == 1e-6

    def test_experimental_preset(self):
        cfg = parse_config(MINIMAL + "params.preset = experimental\n")
        sc = build_scenario(cfg)
        assert sc.params.R1 == 1.58
        assert sc.params.Csc == 62.5

    def test_param_override_on_preset(self):
        cfg = parse_config(MINIMAL + "params.preset = experimental\nparams.l1 = 0.02\n")
        sc = build_scenario(cfg)
        assert sc.params.L1 == 0.02
        assert sc.params.L2 == 8.55e-3

    def test_gain_override_argument(self):
        sc = build_scenario(parse_config(MINIMAL), {"kappa1": 99.0})
        assert sc.g1.kappa1 == 99.0

    def test_invalid_combination_maps_to_config_error(self):
        cfg = parse_config(MINIMAL + "gains.u_min = 0.9\ngains.u_max = 0.1\n")
        with pytest.raises(ConfigError):
            build_scenario(cfg)

    def test_duty_limit_and_envelope_keys(self):
        cfg = parse_config(
            MINIMAL + "gains.u_min = 0.1\ngains.u_max = 0.9\n"
            "gains.x1_min = -40\ngains.x1_max = 40\n"
            "gains.hysteresis_band = 0.5\ngains.denom_floor = 1.0\n"
        )
        g2 = build_scenario(cfg).g2
        assert (g2.um, g2.uM) == (0.1, 0.9)
        assert (g2.x1_min, g2.x1_max) == (-40.0, 40.0)
        assert g2.hysteresis_band == 0.5
        assert g2.denom_floor == 1.0
