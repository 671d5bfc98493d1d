import json
import math

import numpy as np
import pytest

from jetgeodesic import io
from jetgeodesic.cli import _sweep_instance, cmd_sweep, main, select_interval
from jetgeodesic.config import ScenarioConfig
from jetgeodesic.holonomy import PeriodReport, certify, holonomy


def _config(tmp_path, name="cfg.json", **d):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return str(p)


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("coeffs,code", [
    ((0.0, 1.0), 0),
    ((3.0, 0.0, 1.0), 2),      # F >= 3 everywhere
    ((-1.0, 0.0, 2.0), 3),     # critical endpoints
])
def test_certify_exit_codes(tmp_path, capsys, coeffs, code):
    cfg = _config(tmp_path, coefficients=list(coeffs))
    got, _, err = _run(["certify", "--config", cfg], capsys)
    assert got == code
    if code:
        assert "error" in err


def test_hill_exit_codes(tmp_path, capsys):
    assert _run(["hill", "--config", _config(tmp_path, coefficients=[3.0])], capsys)[0] == 2
    code, text, _ = _run(["hill", "--config", _config(tmp_path, coefficients=[0.0, 1.0])], capsys)
    assert code == 0 and "XPeriodic" in text
    assert _run(["certify", "--config", _config(tmp_path, k=2)], capsys)[0] == 1


def test_config_errors_exit_1(tmp_path, capsys):
    assert _run(["certify", "--config", str(tmp_path / "missing.json")], capsys)[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(["hill", "--config", str(bad)], capsys)[0] == 1
    assert _run(["hill", "--config", _config(tmp_path, coefficients=[1, 2], k=3)], capsys)[0] == 1
    assert _run(["hill", "--config", _config(tmp_path, coefficients=[0, 1], colour="red")], capsys)[0] == 1
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 1


def test_certify_constant_is_degenerate(tmp_path, capsys):
    code, text, _ = _run(["certify", "--config", _config(tmp_path, coefficients=[0.3])], capsys)
    assert code == 0 and json.loads(text)["verdict"] == "DegenerateInput"


def test_certify_report_round_trip(tmp_path, capsys):
    cfg = _config(tmp_path, coefficients=[0.0, 1.0])
    out = tmp_path / "rep.json"
    assert _run(["certify", "--config", cfg, "--out", str(out)], capsys)[0] == 0
    rep = PeriodReport.from_dict(json.loads(out.read_text()))
    assert rep.L == pytest.approx(2 * math.pi, rel=1e-12)
    assert rep.verdict.value == "NotPeriodic"
    assert PeriodReport.from_dict(rep.to_dict()) == rep


def test_hill_report(tmp_path, capsys):
    cfg = _config(tmp_path, coefficients=[-1.0, 0.0, 2.0])
    out = tmp_path / "hill.json"
    code, text, _ = _run(["hill", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0 and text.count("\n") == 2
    d = json.loads(out.read_text())
    assert [(h["lo"], h["hi"]) for h in d["intervals"]] == [(-1.0, 0.0), (0.0, 1.0)]
    assert {h["geo_class"] for h in d["intervals"]} == {"EndpointCritical"}


def test_geodesic_csv(tmp_path, capsys):
    cfg = _config(tmp_path, coefficients=[0.0, 1.0])
    code, text, _ = _run(["geodesic", "--config", cfg], capsys)
    assert code == 0
    header, data = io.read_trajectory_csv(text)
    assert header == ["t", "x", "p_x", "theta_0", "theta_1", "energy_drift"]
    assert len(data) == 512
    assert data[-1, 0] == pytest.approx(2 * math.pi, rel=1e-14)
    assert data[-1, 1:3] == pytest.approx(data[0, 1:3], abs=1e-8)
    assert data[-1, 3:5] == pytest.approx(holonomy(*_harmonic()), abs=1e-8)
    assert np.max(np.abs(data[:, -1])) <= 1e-8
    code, text, _ = _run(["geodesic", "--config", cfg, "--t-end", "0"], capsys)
    assert code == 0 and len(io.read_trajectory_csv(text)[1]) == 1


def _harmonic():
    from jetgeodesic.hill import hill_intervals
    from jetgeodesic.poly import Polynomial
    f = Polynomial((0.0, 1.0))
    return f, hill_intervals(f)[0]


def test_geodesic_zero_field(tmp_path, capsys):
    code, text, _ = _run(["geodesic", "--config", _config(tmp_path, coefficients=[0.0, 0.0]), "--t-end", "1"],
                         capsys)
    assert code == 0
    _, data = io.read_trajectory_csv(text)
    assert np.allclose(data[:, 1], data[:, 0], atol=1e-14) and np.all(data[:, 2] == 1.0)
    assert np.all(data[:, 3:5] == 0.0)


def test_geodesic_horizontal_line(tmp_path, capsys):
    cfg = _config(tmp_path, coefficients=[0.6])
    assert _run(["geodesic", "--config", cfg], capsys)[0] == 1   # no period, no --t-end
    code, text, _ = _run(["geodesic", "--config", cfg, "--t-end", "2"], capsys)
    assert code == 0
    _, data = io.read_trajectory_csv(text)
    # unit speed split as p_x = 0.8, theta_0 rate F = 0.6
    assert data[-1, 1] == pytest.approx(1.6, rel=1e-12)
    assert data[-1, 3] == pytest.approx(1.2, rel=1e-12)


def test_certify_matches_geodesic(tmp_path, capsys):
    cfg = _config(tmp_path, coefficients=[0.2, -0.7, 0.0, 0.9])
    out = tmp_path / "rep.json"
    assert _run(["certify", "--config", cfg, "--out", str(out)], capsys)[0] == 0
    rep = json.loads(out.read_text())
    _, text, _ = _run(["geodesic", "--config", cfg], capsys)
    _, data = io.read_trajectory_csv(text)
    assert data[-1, 0] == pytest.approx(rep["L"], rel=1e-14)
    assert np.max(np.abs(data[-1, 3:-1] - np.array(rep["delta_theta"]))) <= 1e-6


def test_sweep_parallel_matches_serial(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _run(["sweep", "--seed", "3", "--count", "12", "--out", str(a)], capsys)[0] == 0
    assert _run(["sweep", "--seed", "3", "--count", "12", "--jobs", "2", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    d = json.loads(a.read_text())
    assert d["attempted"] == 12 and d["kept"] == len(d["rows"])
    assert d["aggregate"]["all_not_periodic"]


def test_sweep_instance_matches_certify():
    row = _sweep_instance(((0.0, 1.0),))
    rep = PeriodReport.from_dict(json.loads(io.dumps(certify(*_harmonic()).to_dict())))
    assert row["L"] == rep.L and row["lambda_min"] == rep.lambda_min
    assert row["verdict"] == "NotPeriodic"


def test_sweep_rejects_bad_counts():
    from jetgeodesic.errors import ConfigError
    with pytest.raises(ConfigError):
        cmd_sweep(ScenarioConfig(k=3), 0, 1)
    with pytest.raises(ConfigError):
        cmd_sweep(ScenarioConfig(k=3), 5, 1, jobs=0)


def test_select_interval_hint():
    cfg = ScenarioConfig(k=2, coefficients=(-1.0, 0.0, 2.0), interval_hint=(0.1, 0.9))
    assert select_interval(cfg).lo == 0.0
    from jetgeodesic.errors import ConfigError
    with pytest.raises(ConfigError):
        select_interval(ScenarioConfig(k=1, coefficients=(0.0, 1.0), interval_hint=(5.0, 6.0)))


@pytest.mark.parametrize("kind", ["phase", "projection"])
def test_plot_svg(tmp_path, capsys, kind):
    cfg = _config(tmp_path, coefficients=[0.0, 1.0])
    out = tmp_path / f"{kind}.svg"
    assert _run(["plot", "--config", cfg, "--kind", kind, "--out", str(out)], capsys)[0] == 0
    svg = out.read_text()
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600"')
    assert svg.count("<polyline") == 1 and svg.rstrip().endswith("</svg>")


def test_phase_plot_rejects_critical(tmp_path, capsys):
    cfg = _config(tmp_path, coefficients=[-1.0, 0.0, 2.0])
    assert _run(["plot", "--config", cfg, "--kind", "phase"], capsys)[0] == 3
