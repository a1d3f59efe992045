import json

from stringfock.cli import dispatch, main


def run_captured(capsys, argv):
    code = dispatch(argv)
    out = capsys.readouterr().out
    return code, out


def test_basis_counts(capsys):
    code, out = run_captured(capsys, ["basis", "--directions", "24", "--cutoff", "0"])
    assert code == 0
    data = json.loads(out)
    assert data["total"] == 1
    code, out = run_captured(capsys, ["basis", "--directions", "24", "--cutoff", "2"])
    data = json.loads(out)
    assert data["total"] == 1 + 24 + 324
    assert data["per_level"][2]["count"] == 324


def test_spectrum_frozen_rows(capsys):
    code, out = run_captured(capsys, ["spectrum", "--gauge", "lc", "--cutoff", "3",
                                      "--a", "1"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "level,mass_squared,degeneracy"
    assert lines[1:] == ["0,-2,1", "1,0,24", "2,2,324", "3,4,3200"]


def test_spectrum_is_bit_identical_between_runs(capsys):
    _, first = run_captured(capsys, ["spectrum", "--gauge", "cov", "--cutoff", "3",
                                     "--a", "1/2"])
    _, second = run_captured(capsys, ["spectrum", "--gauge", "cov", "--cutoff", "3",
                                      "--a", "1/2"])
    assert first == second
    assert "-1" in first.splitlines()[1]


def test_noghost_exit_codes(capsys):
    code, out = run_captured(capsys, ["noghost", "--d", "26", "--a", "1",
                                      "--max-level", "1"])
    assert code == 0
    data = json.loads(out)
    assert [row["match"] for row in data] == [True, True]


def test_ccr_check_small(capsys):
    code, out = run_captured(capsys, ["ccr-check", "--cutoff", "2", "--d", "4",
                                      "--gauge", "cov"])
    assert code == 0
    data = json.loads(out)
    assert data["all_zero"] is True
    assert data["pairs_checked"] == len(data["results"]) > 0


def test_virasoro_check_small(capsys):
    code, out = run_captured(capsys, ["virasoro-check", "--cutoff", "4", "--d", "4"])
    assert code == 0
    data = json.loads(out)
    assert data["all_zero"] is True
    assert data["fitted_central_coefficient"] == "4"


def test_usage_errors_exit_two(capsys):
    assert dispatch(["spectrum", "--cutoff", "3"]) == 2          # missing --gauge
    capsys.readouterr()
    assert dispatch(["no-such-command"]) == 2
    capsys.readouterr()
    assert dispatch(["basis", "--directions", "24", "--cutoff", "2",
                     "--bogus-flag"]) == 2
    capsys.readouterr()


def test_out_writes_data_and_manifest(tmp_path, capsys):
    out_path = tmp_path / "spectrum.csv"
    code = dispatch(["spectrum", "--gauge", "lc", "--cutoff", "2", "--a", "1",
                     "--out", str(out_path)])
    assert code == 0
    assert out_path.exists()
    manifest = json.loads((tmp_path / "spectrum.csv.manifest.json").read_text())
    assert manifest["command"] == "spectrum"
    assert manifest["tool_version"]
    assert str(out_path) in manifest["outputs"]
    assert out_path.read_text().splitlines()[1] == "0,-2,1"


def test_config_file_feeds_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("d = 6\n")
    code, out = run_captured(capsys, ["spectrum", "--gauge", "lc", "--cutoff", "1",
                                      "--a", "1", "--config", str(cfg)])
    assert code == 0
    # d = 6 in light-cone gauge: 4 transverse colors at level 1
    assert out.strip().splitlines()[2] == "1,0,4"


def test_worldsheet_demo(capsys):
    code, out = run_captured(capsys, ["worldsheet-demo", "--samples", "4"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("tau,sigma,X0")
    assert len(lines) == 1 + 16


def test_observable_check_cli(tmp_path, capsys):
    spec = {
        "bump": {"t_center": 0.0, "t_radius": 0.5, "x_center": 0.0, "x_radius": 0.5},
        "internal": [{"modes": [[1, 2]], "coeff": "1"}],
        "d": 26, "cutoff": 2, "a": "1",
        "shells": {"pmax": 30, "n": 600},
    }
    path = tmp_path / "field.json"
    path.write_text(json.dumps(spec))
    code, out = run_captured(capsys, ["observable-check", "--spec", str(path)])
    assert code == 0
    assert json.loads(out)["observable"] is True

    spec["internal"] = [{"modes": [[1, 0]], "coeff": "1"}]
    path.write_text(json.dumps(spec))
    code, out = run_captured(capsys, ["observable-check", "--spec", str(path)])
    assert code == 1
    assert json.loads(out)["observable"] is False


def test_pauli_jordan_dump(capsys):
    code, out = run_captured(capsys, ["pauli-jordan", "--r", "0", "--xmax", "2",
                                      "--tmax", "0.5", "--h", "0.05",
                                      "--dt-out", "0.5", "--dx-out", "1.0"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,x,value"
    assert len(lines) > 2


def test_string_cone_cli(capsys):
    code, out = run_captured(capsys, ["string-cone", "--N", "1", "--h", "0.05",
                                      "--T", "0.6", "--extent", "2.0"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("t,support_radius_extended")


def test_locality_scan_cli(capsys):
    code, out = run_captured(capsys, ["locality-scan", "--separations", "3,4",
                                      "--timelike", "2.5", "--h", "0.02"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "separation,kind,commutator_abs,control_magnitude"
    kinds = [ln.split(",")[1] for ln in lines[1:]]
    assert kinds == ["spacelike", "spacelike", "timelike"]


def test_main_entry(capsys):
    assert main(["basis", "--directions", "2", "--cutoff", "1"]) == 0
    capsys.readouterr()
