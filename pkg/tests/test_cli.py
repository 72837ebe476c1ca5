import json
from importlib import resources

import numpy as np
import pytest

from qubit_tracking.cli import main
from qubit_tracking.export import read_csv


def bundled(name):
    return json.loads((resources.files("qubit_tracking") / "configs" / f"{name}.json").read_text())


def write(tmp_path, raw, **numerics):
    raw = dict(raw)
    raw["numerics"] = {**raw.get("numerics", {}), **numerics}
    raw.setdefault("outputs", {"formats": ["csv", "pgm", "json"]})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    return path


def run(tmp_path, command, cfg_path, *extra):
    out = tmp_path / "out"
    return main([command, "--config", str(cfg_path), "--out", str(out), "--workers", "1", *extra]), out


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_missing_required_key_is_config_error(tmp_path, capsys):
    raw = bundled("fig2")
    del raw["system"]["mu"]
    code, _ = run(tmp_path, "synth", write(tmp_path, raw))
    assert code == 3
    assert "system.mu" in capsys.readouterr().out


def test_unknown_key_and_bad_json_are_config_errors(tmp_path):
    raw = bundled("fig2")
    raw["noise"]["temperature"] = 1.0
    assert run(tmp_path, "synth", write(tmp_path, raw))[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "synth", bad)[0] == 3
    assert main(["synth", "--figure", "99"]) == 3


def test_inconsistent_initial_population_is_config_error(tmp_path):
    raw = bundled("fig2")
    raw["initial"]["P0"] = 0.7
    assert run(tmp_path, "synth", write(tmp_path, raw))[0] == 3


def test_linear_phase_through_crossing_is_infeasible(tmp_path, capsys):
    raw = bundled("fig5")
    raw["phase"] = {"kind": "linear", "alpha": 1e-3}
    code, out = run(tmp_path, "synth", write(tmp_path, raw))
    assert code == 2
    assert "1750" in capsys.readouterr().out
    assert manifest(out)["exit_code"] == 2


def test_synth_writes_waveform_and_manifest(tmp_path, capsys):
    code, out = run(tmp_path, "synth", write(tmp_path, bundled("fig5"), n_samples=1001))
    assert code == 0
    header, rows = read_csv(out / "waveform.csv")
    assert header == ["t", "E", "A", "Lambda", "X", "Y"] and rows.shape == (1001, 6)
    text = capsys.readouterr().out
    assert "feasible: yes" in text and "1750" in text
    m = manifest(out)
    assert m["command"] == "synth" and "waveform.csv" in m["outputs"]


def test_track_passes_for_fig2(tmp_path):
    code, out = run(tmp_path, "track", write(tmp_path, bundled("fig2")))
    assert code == 0
    assert manifest(out)["summary"]["passed"] is True


def test_rwa_track_of_printed_order_breaches_tolerance(tmp_path):
    cfg = write(tmp_path, bundled("fig8"), tol_P=1e-6, tol_Phi=1e-6, frame="rwa")
    assert run(tmp_path, "track", cfg)[0] == 0
    code, out = run(tmp_path, "track", cfg, "--printed-order")
    assert code == 4
    assert manifest(out)["flags"]["printed_order"] is True


def test_zero_field_propagation(tmp_path):
    raw = bundled("fig2")
    code, out = run(tmp_path, "propagate", write(tmp_path, raw), "--zero-field")
    assert code == 0
    _, rows = read_csv(out / "trajectory.csv")
    g = 1e-3 + 1e-4 * (2 * 0 + 1)
    assert np.allclose(rows[:, 2], 0.2 * np.exp(-g * rows[:, 0]), rtol=1e-9)


def test_reach_fig3b_small_grid(tmp_path):
    code, out = run(tmp_path, "reach", write(tmp_path, bundled("fig3b"), n_grid=11))
    assert code == 0
    _, rows = read_csv(out / "map.csv")
    cell = rows[(np.isclose(rows[:, 0], 0.9)) & (np.isclose(rows[:, 1], 0.4))]
    assert cell[0, 2] == 3
    assert (out / "map.pgm").exists()


def test_reach_fig4i_has_noise_accessible_cells(tmp_path):
    code, out = run(tmp_path, "reach", write(tmp_path, bundled("fig4i"), n_grid=21))
    assert code == 0
    assert manifest(out)["summary"]["counts"]["noise_accessible"] > 0


def test_reach_minimal_grid(tmp_path):
    code, out = run(tmp_path, "reach", write(tmp_path, bundled("fig3b"), n_grid=2))
    assert code == 0
    _, rows = read_csv(out / "map.csv")
    assert rows.shape == (4, 3)


def test_steady_without_noise_is_infeasible(tmp_path):
    raw = bundled("fig1")
    raw.pop("sweep", None)
    raw["noise"] = {"gamma": 0.0, "Gamma": 0.0, "nbar": 0.0}
    assert run(tmp_path, "steady", write(tmp_path, raw))[0] == 2


def test_steady_table(tmp_path):
    code, out = run(tmp_path, "steady", write(tmp_path, bundled("fig1"), n_points=11))
    assert code == 0
    tables = sorted(out.glob("steady*.csv"))
    assert tables
    header, rows = read_csv(tables[0])
    assert header == ["P", "C_inf", "C_inf_sq", "C0_required", "k", "feasible"]


def test_coherence_infeasible_sweep_member(tmp_path):
    raw = bundled("fig7b")
    raw["sweep"] = raw["sweep"] + [{"gamma": 1e-3, "Gamma": 1e-3, "nbar": 0.3}]
    code, out = run(tmp_path, "coherence", write(tmp_path, raw, n_points=101))
    assert code == 2
    assert len(list(out.glob("coherence_*.csv"))) == len(raw["sweep"])


def test_reruns_are_byte_identical(tmp_path):
    cfg = write(tmp_path, bundled("fig3b"), n_grid=11)
    main(["reach", "--config", str(cfg), "--out", str(tmp_path / "a"), "--workers", "1"])
    main(["reach", "--config", str(cfg), "--out", str(tmp_path / "b"), "--workers", "2"])
    for name in ("map.csv", "map.pgm", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_png_rendered_next_to_csv(tmp_path):
    raw = bundled("fig2")
    raw["outputs"] = {"formats": ["csv", "png", "json"]}
    code, out = run(tmp_path, "synth", write(tmp_path, raw, n_samples=501))
    assert code == 0
    assert (out / "waveform.png").stat().st_size > 0


def test_figure_family_writes_one_directory_per_panel(tmp_path):
    code = main(["coherence", "--figure", "7", "--out", str(tmp_path)])
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"fig7a", "fig7b"}


def test_parser_requires_config_source():
    with pytest.raises(SystemExit):
        main(["synth"])
