from tcentre.config import Config, config


def test_defaults():
    fresh = Config()
    assert fresh.get_physics_setting("G_E") == 2.005
    assert fresh.get_numeric_setting("REGIME_MIN_T_OVER_TAU") == 10.0
    assert fresh.get_app_setting("OUTPUT_FLOAT_FORMAT") == "%.9f"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("TCENTRE_G_N", "5.5857")
    monkeypatch.setenv("TCENTRE_SECULAR_FACTOR", "20")
    monkeypatch.setenv("TCENTRE_ENABLE_GNUPLOT_SCRIPT", "false")
    fresh = Config()
    assert fresh.get_physics_setting("G_N") == 5.5857
    assert fresh.get_numeric_setting("SECULAR_FACTOR") == 20.0
    assert not fresh.is_feature_enabled("gnuplot_script")
    assert fresh.is_feature_enabled("provenance")


def test_bad_worker_count_falls_back(monkeypatch):
    monkeypatch.setenv("TCENTRE_MAP_WORKERS", "0")
    assert Config().get_app_setting("MAP_WORKERS") == 1


def test_snapshot_has_no_app_settings():
    snapshot = config.snapshot()
    assert set(snapshot) == {"physics", "numerics"}
    assert snapshot["physics"] == config.physics_config
    assert snapshot["physics"] is not config.physics_config
