import json
import os

import numpy as np
import pytest

from rezone.errors import ConfigError
from rezone.io import parse_config
from rezone.io.runner import EXIT_COMPUTATION, EXIT_OK, compute, run
from rezone.io.svg import render_portrait_svg
from rezone.io.writers import atomic_write, parse_csv, render_csv, render_json


# --- config parsing ---------------------------------------------------------------


def test_minimal_equilibria_config():
    config = parse_config("a = 2\nb = 1\np = 1\nmu1 = 1\nmu2 = 0\n", "equilibria")
    assert config.command == "equilibria"
    assert config.values["mu1"] == 1.0
    assert config.values["b3"] == 0.0  # default applied


def test_header_supplies_command():
    config = parse_config("[equilibria]\nmu1 = 1\nmu2 = 0\n")
    assert config.command == "equilibria"


def test_header_conflict_rejected():
    with pytest.raises(ConfigError):
        parse_config("[portrait]\nmu1 = 1\nmu2 = 0\n", "equilibria")


def test_duplicate_key_names_line():
    with pytest.raises(ConfigError) as err:
        parse_config("mu1 = 1\nmu2 = 0\nmu1 = 2\n", "equilibria")
    assert "line 3" in str(err.value)
    assert "mu1" in str(err.value)


def test_range_violation_names_key_and_range():
    with pytest.raises(ConfigError) as err:
        parse_config("mu1 = 1\nmu2 = 0\np = 0\n", "equilibria")
    assert "p" in str(err.value)
    assert ">= 1" in str(err.value)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("mu1 = 1\nmu2 = 0\nbogus = 3\n", "equilibria")
    assert "bogus" in str(err.value)


def test_missing_required_key():
    with pytest.raises(ConfigError) as err:
        parse_config("mu1 = 1\n", "equilibria")
    assert "mu2" in str(err.value)


def test_comments_and_blank_lines_ignored():
    config = parse_config("# comment\n\nmu1 = 1  # trailing\nmu2 = 0\n", "equilibria")
    assert config.values["mu1"] == 1.0


def test_seed_is_universal():
    config = parse_config("mu1 = 1\nmu2 = 0\nseed = 7\n", "equilibria")
    assert config.seed == 7


# --- serialization ----------------------------------------------------------------


def test_csv_round_trip_is_lossless():
    rng = np.random.default_rng(3)
    values = [float(x) for x in rng.uniform(-10, 10, 40)] + [1.0 / 3.0, 2.0 ** -45]
    text = render_csv(("x",), [(v,) for v in values], {"k": "v"})
    _, rows, meta = parse_csv(text)
    recovered = [float(r[0]) for r in rows]
    assert recovered == values  # exact binary equality via repr round-trip
    assert meta["k"] == "v"


def test_json_round_trip_is_lossless():
    payload = {"values": [1.0 / 3.0, 1e-300, 6.02e23]}
    text = render_json(payload, {"cmd": "t"})
    decoded = json.loads(text)
    assert decoded["values"] == payload["values"]
    assert decoded["metadata"]["cmd"] == "t"


def test_metadata_embeds_config_and_version():
    config = parse_config("mu1 = 1\nmu2 = 0\n", "equilibria")
    result = compute(config)
    text = result.artifacts[0].text
    _, _, meta = parse_csv(text)
    assert "rezone 0.1.0" in text.splitlines()[0]
    assert meta["command"] == "equilibria"
    assert meta["mu1"] == "1.0"


def test_atomic_write_never_leaves_partial_file(tmp_path):
    target = tmp_path / "out.csv"
    target.write_text("original")
    atomic_write(str(target), "replaced")
    assert target.read_text() == "replaced"
    leftovers = [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]
    assert leftovers == []


# --- command execution -------------------------------------------------------------


def test_equilibria_command_row_count(tmp_path):
    config = parse_config("a = 2\nb = 1\np = 1\nmu1 = 1\nmu2 = 0\n", "equilibria")
    status = run(config, str(tmp_path))
    assert status == EXIT_OK
    header, rows, _ = parse_csv((tmp_path / "equilibria.csv").read_text())
    assert header == ["mu1", "mu2", "p", "a", "b", "label", "u", "v", "kind", "delta", "energy"]
    assert len(rows) == 2  # the v = pi pair
    labels = {r[5] for r in rows}
    assert labels == {"O2+", "O2-"}


def test_orbit_csv_schema(tmp_path):
    config = parse_config(
        "[map-orbits]\nvariant = euler\nalpha = 0.17\nmu1 = 1\nmu2 = 2.1\n"
        "n_steps = 50\nstarts = 0.1:0.1\n"
    )
    run(config, str(tmp_path))
    header, rows, _ = parse_csv((tmp_path / "orbit_000.csv").read_text())
    assert header == ["step_or_tau", "u", "v", "v_unwrapped", "energy"]
    assert len(rows) == 51


def test_reconnect_command_schema(tmp_path):
    config = parse_config(
        "mu1_values = 0.2,0.3\nmu2_lo = 2.0\nmu2_hi = 3.2\n", "reconnect"
    )
    run(config, str(tmp_path), jobs=2)
    header, rows, _ = parse_csv((tmp_path / "reconnection.csv").read_text())
    assert header == ["curve_id", "mu1", "mu2"]
    assert [r[0] for r in rows] == ["m6", "m6"]
    assert [float(r[1]) for r in rows] == [0.2, 0.3]  # input order preserved


def test_bifdiag_json_schema(tmp_path):
    config = parse_config(
        "grid_n1 = 151\ngrid_n2 = 101\ncurve_points = 120\ntrace_points = 60\n"
        "mu2_min = 0.0\nmu2_max = 3.5\n",
        "bifdiag",
    )
    run(config, str(tmp_path))
    doc = json.loads((tmp_path / "diagram.json").read_text())
    ids = {c["id"] for c in doc["curves"]}
    assert {"m3", "m4", "m5+", "m5-", "m6"} <= ids
    assert doc["regions"], "region samples expected"
    sample = doc["regions"][0]
    assert {"mu1", "mu2", "signature"} <= set(sample)
    header, rows, _ = parse_csv((tmp_path / "curves.csv").read_text())
    assert header == ["curve_id", "mu1", "mu2"]


def test_verify_command_reports_table(tmp_path, capsys):
    config = parse_config("fast = true\nseed = 1\n", "verify")
    status = run(config, str(tmp_path))
    printed = capsys.readouterr().out
    assert "PASS" in printed
    assert status == EXIT_OK
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["all_passed"] is True


def test_average_command_outputs(tmp_path):
    config = parse_config(
        "perturbation = hamiltonian_cos_wave\nn_nodes = 512\nv_points = 128\n",
        "average",
    )
    run(config, str(tmp_path))
    doc = json.loads((tmp_path / "averaged.json").read_text())
    assert abs(doc["b0"]) < 1e-8
    assert doc["identities_pass"] is True
    header, rows, _ = parse_csv((tmp_path / "averaged.csv").read_text())
    assert header == ["v", "a0", "p0", "q0"]
    assert len(rows) == 128


def test_resonances_command(tmp_path):
    config = parse_config(
        "omega_poly = 2,-2,1\ni_min = 0\ni_max = 2\nnu = 1\np_max = 1\nq_max = 1\n",
        "resonances",
    )
    run(config, str(tmp_path))
    header, rows, _ = parse_csv((tmp_path / "resonances.csv").read_text())
    assert header == ["p", "q", "i_pq", "j", "s", "bj", "bj1"]
    assert len(rows) == 1
    assert float(rows[0][2]) == pytest.approx(1.0, abs=1e-9)  # omega = 1 + (I-1)^2
    assert rows[0][3] == "2"


def test_portrait_command_svg_deterministic(tmp_path):
    text = "mu1 = 1\nmu2 = 0\nu_min = -3\nu_max = 3\ngrid = 128\n"
    config = parse_config(text, "portrait")
    first = compute(config, svg=True)
    second = compute(config, svg=True)
    svg_first = next(a for a in first.artifacts if a.kind == "svg")
    svg_second = next(a for a in second.artifacts if a.kind == "svg")
    assert svg_first.text == svg_second.text
    assert svg_first.text.startswith("<?xml")


def test_empty_contour_svg_still_valid():
    from rezone.flow import PhasePortrait

    portrait = PhasePortrait(
        window=(-1.0, 1.0, 0.0, 6.28), levels=(), equilibria=(), saddle_levels=()
    )
    text = render_portrait_svg(portrait)
    assert "<svg" in text and "</svg>" in text


def test_diagram_svg_contains_exact_tags(tmp_path):
    config = parse_config(
        "grid_n1 = 151\ngrid_n2 = 101\ncurve_points = 120\ntrace_points = 60\n"
        "mu2_min = 0.0\nmu2_max = 3.5\n",
        "bifdiag",
    )
    result = compute(config, svg=True)
    svg_text = next(a for a in result.artifacts if a.kind == "svg").text
    for tag in ("m3", "m4", "m5+", "m5-", "m6"):
        assert f'class="{tag}"' in svg_text


def test_map_orbit_jobs_preserve_input_order(tmp_path):
    config = parse_config(
        "[map-orbits]\nvariant = standard\na = 1.2\nbeta = 0.4\nn_steps = 30\n"
        "starts = 0.1:0.1;0.5:0.3;0.9:0.7\n"
    )
    run(config, str(tmp_path), jobs=3)
    for index, (u0, v0) in enumerate([(0.1, 0.1), (0.5, 0.3), (0.9, 0.7)]):
        _, rows, meta = parse_csv((tmp_path / f"orbit_{index:03d}.csv").read_text())
        assert float(rows[0][1]) == u0
        assert float(rows[0][2]) == v0
        assert meta["start_index"] == str(index)


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    from rezone import verification

    def fake_run_all(seed=0, fast=False):
        return [verification.CheckResult("forced", False, "injected failure")]

    monkeypatch.setattr("rezone.io.runner.run_all", fake_run_all)
    config = parse_config("", "verify")
    status = run(config, str(tmp_path))
    assert status == EXIT_COMPUTATION
