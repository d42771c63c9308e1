import pytest

from xentrack.assignment.association import GateMode
from xentrack.config.run_config import RunConfig, key_line, load_run_config, parse_run_config
from xentrack.errors import ConfigError, StorageError
from xentrack.geometry.iou import IoUMode


def test_defaults():
    config = load_run_config(None)
    assert config == RunConfig()
    assert config.tracker.iou_gate == 0.3
    assert config.tracker.max_age == 3
    assert config.tracker.min_hits == 2
    assert config.tracker.iou_mode is IoUMode.ROTATED
    assert config.tracker.gate_mode is GateMode.POST
    assert config.metrics.match_iou == 0.5
    assert config.scenario is None
    assert config.workers == 1


def test_load_from_toml(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        "workers = 4\n"
        "\n"
        "[tracker]\n"
        "min_hits = 1\n"
        'iou_mode = "aabb"\n'
        'gate_mode = "premask"\n'
        "\n"
        "[filter]\n"
        "q_position = 2.0\n"
        "\n"
        "[metrics]\n"
        "match_iou = 0.3\n"
        "\n"
        "[io]\n"
        'detections = "dets.jsonl"\n',
        encoding="utf-8",
    )
    config = load_run_config(path)
    assert config.workers == 4
    assert config.tracker.min_hits == 1
    assert config.tracker.iou_mode is IoUMode.AABB
    assert config.tracker.gate_mode is GateMode.PREMASK
    assert config.filter.q_position == 2.0
    assert config.metrics.match_iou == 0.3
    assert config.io.detections == "dets.jsonl"
    assert "workers" in config.model_fields_set


def test_scenario_section():
    config = parse_run_config(
        "[scenario]\n"
        "seed = 42\n"
        "n_tracks = 3\n"
        "width_range = [10.0, 20.0]\n"
    )
    assert config.scenario.seed == 42
    assert config.scenario.width_range == (10.0, 20.0)


def test_out_of_range_value_names_key_and_line():
    text = "[tracker]\nmax_age = 5\niou_gate = 1.5\n"
    with pytest.raises(ConfigError) as info:
        parse_run_config(text, "run.toml")
    assert info.value.key == "tracker.iou_gate"
    assert info.value.line == 3
    assert str(info.value).startswith("run.toml:3: tracker.iou_gate:")


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError) as info:
        parse_run_config("[tracker]\nmax_agee = 5\n")
    assert info.value.key == "tracker.max_agee"
    assert info.value.line == 2


def test_unknown_section_is_rejected():
    with pytest.raises(ConfigError) as info:
        parse_run_config("[trackers]\nmax_age = 5\n")
    assert info.value.key == "trackers"
    assert info.value.line == 1


def test_scenario_validation_points_at_section():
    with pytest.raises(ConfigError) as info:
        parse_run_config("workers = 2\n[scenario]\nseed = 1\nwidth_range = [5.0, 1.0]\n")
    assert info.value.key == "scenario"
    assert info.value.line == 2


def test_toml_syntax_error_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_run_config("[tracker]\nmax_age = \n")
    assert info.value.line == 2


def test_workers_must_be_positive():
    with pytest.raises(ConfigError) as info:
        parse_run_config("workers = 0\n")
    assert info.value.key == "workers"
    assert info.value.line == 1


def test_missing_file(tmp_path):
    with pytest.raises(StorageError):
        load_run_config(tmp_path / "absent.toml")


def test_key_line():
    text = "a = 1\n[tracker]  # lifecycle\nmax_age = 3\n\n[io]\nout = 'x'\n"
    assert key_line(text, "a") == 1
    assert key_line(text, "tracker") == 2
    assert key_line(text, "tracker.max_age") == 3
    assert key_line(text, "io.out") == 6
    assert key_line(text, "io.detections") is None
