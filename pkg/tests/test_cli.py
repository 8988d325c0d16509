import json

import pytest

from altcausal.cli import _EXPERIMENTS, build_parser, main

FAST_ARGS = {
    "duality": ["--points", "9"],
    "switch": ["--points", "5"],
    "ac-vs-ico": ["--steps", "4"],
    "photonclock": ["--bounces", "8"],
    "cascade": ["--sites", "3", "--horizon", "9"],
    "wfecho": [],
    "pif": ["--slices", "50"],
    "fito-vs-pif": ["--slices", "50"],
    "capacity": ["--n-bits", "2000"],
    "rcp": ["--points", "9"],
    "list": [],
}


@pytest.mark.parametrize("command", sorted(FAST_ARGS))
def test_every_experiment_exits_zero(command, capsys):
    assert main([command, *FAST_ARGS[command]]) == 0
    out = capsys.readouterr().out
    assert f"experiment: {command}" in out or command == "list"


def test_no_command_prints_help_and_exits_two(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().out


def test_unknown_experiment_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_bad_domain_input_exits_one(capsys):
    assert main(["cascade", "--sites", "40"]) == 1
    assert "error:" in capsys.readouterr().err


def test_bad_format_exits_one(tmp_path, capsys):
    assert main(["wfecho", "--format", "bogus", "--out", str(tmp_path)]) == 1
    assert "unknown output format" in capsys.readouterr().err


def test_json_to_stdout_suppresses_summary(capsys):
    assert main(["wfecho", "--json", "-"]) == 0
    out = capsys.readouterr().out
    report = json.loads(out)
    assert report["experiment"] == "wfecho"
    assert "experiment: wfecho" not in out


def test_json_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["pif", "--slices", "200", "--flip-forward", "0.01", "--seed", "42"]
    assert main([*args, "--json", str(a)]) == 0
    assert main([*args, "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"flip_forward": 0.5, "flip_backward": 0.5}))
    out = tmp_path / "r.json"
    assert main(["capacity", "--config", str(cfg), "--n-bits", "1000",
                 "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["metrics"]["c_one_way"] == 0.0
    assert report["config"]["n_bits"] == 1000


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"flip_forward": 0.5, "flip_backward": 0.5}))
    out = tmp_path / "r.json"
    assert main(["capacity", "--config", str(cfg), "--flip-forward", "0.0",
                 "--flip-backward", "0.0", "--n-bits", "1000", "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["metrics"]["c_one_way"] == 64.0
    assert report["metrics"]["c_pif"] == 128.0


def test_unknown_config_key_is_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"warp_factor": 9}))
    assert main(["capacity", "--config", str(cfg)]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_csv_has_header_and_one_row_per_point(tmp_path):
    path = tmp_path / "d.csv"
    assert main(["duality", "--points", "12", "--csv", str(path)]) == 0
    lines = path.read_text().strip().splitlines()
    assert "t" in lines[0].split(",")
    assert "deviation" in lines[0].split(",")
    assert len(lines) == 13


def test_svg_is_written(tmp_path):
    path = tmp_path / "d.svg"
    assert main(["rcp", "--points", "9", "--svg", str(path)]) == 0
    text = path.read_text()
    assert text.startswith("<svg")
    assert "polyline" in text


def test_out_dir_format_list(tmp_path):
    assert main(["wfecho", "--format", "json,csv", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "wfecho.json").exists()
    assert (tmp_path / "wfecho.csv").exists()


@pytest.mark.parametrize("command", sorted(FAST_ARGS))
def test_all_three_formats_for_every_experiment(command, tmp_path):
    args = [command, *FAST_ARGS[command], "--format", "json,csv,svg",
            "--out", str(tmp_path)]
    assert main(args) == 0
    for ext in ("json", "csv", "svg"):
        assert (tmp_path / f"{command}.{ext}").exists()
    # a report with no series still yields a well-formed placeholder svg
    assert (tmp_path / f"{command}.svg").read_text().startswith("<svg")


def test_list_names_every_experiment(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in _EXPERIMENTS:
        assert name in out


def test_parser_covers_every_experiment():
    parser = build_parser()
    actions = [a for a in parser._actions if hasattr(a, "choices") and a.choices]
    commands = set(actions[0].choices)
    assert set(_EXPERIMENTS) | {"list"} <= commands


def test_clean_pif_balances_exactly(tmp_path):
    out = tmp_path / "pif.json"
    assert main(["pif", "--slices", "500", "--json", str(out)]) == 0
    metrics = json.loads(out.read_text())["metrics"]
    assert metrics["delta_s"] == 0.0
    assert metrics["landauer_joules"] == 0.0
    assert metrics["conservation_violation"] == 0.0
    assert metrics["detected_mismatches"] == 0


def test_duality_deviation_is_tiny(tmp_path):
    out = tmp_path / "dual.json"
    assert main(["duality", "--points", "16", "--json", str(out)]) == 0
    metrics = json.loads(out.read_text())["metrics"]
    assert metrics["max_duality_deviation"] < 1e-12
    assert metrics["valid_at_origin"] is True


def test_skewed_duality_is_reported_not_flagged(tmp_path):
    out = tmp_path / "skew.json"
    assert main(["duality", "--points", "16", "--skew", "1e-3",
                 "--json", str(out)]) == 0
    metrics = json.loads(out.read_text())["metrics"]
    assert 5e-4 <= metrics["max_duality_deviation"] <= 2e-3
