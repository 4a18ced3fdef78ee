import json

import pytest

from raftguard import cli

RHO = 1.9098593171027442e-05


@pytest.fixture(autouse=True)
def serial_workers(monkeypatch):
    # keep unit runs in-process; the dedicated test below exercises the pool
    monkeypatch.setenv("RAFTGUARD_WORKERS", "1")


def base_config(tmp_path, **overrides):
    cfg = {
        "scenario": "coverage_vs_beta",
        "sweep": {"variable": "beta_db", "start": -30.0, "stop": 0.0, "step": 10.0},
        "n_trials": 2000,
        "master_seed": 7,
        "output": {"path": str(tmp_path / "out.csv"), "format": "csv"},
        "params": {"rho_t": RHO, "rho_j": RHO, "beta_dl_db": -20.0, "beta_ul_db": -20.0},
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=2) + "\n")
    return str(path)


def read_rows(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, ln.split(","))) for ln in lines[1:]]


# ---------------------------------------------------------------- running


def test_beta_sweep_writes_expected_table(tmp_path, capsys):
    cfg = base_config(tmp_path)
    cfg["sweep"]["step"] = 2.0
    code = cli.main(["--config", write_config(tmp_path, cfg), "--trials", "500"])
    assert code == 0
    header, rows = read_rows(tmp_path / "out.csv")
    assert header == cli.COVERAGE_COLUMNS
    assert len(rows) == 16
    joint = [float(r["p_joint_analytic"]) for r in rows]
    assert all(b < a for a, b in zip(joint, joint[1:]))
    assert "wrote 16 rows" in capsys.readouterr().out


def test_zero_jammer_intensity_gives_unit_cells(tmp_path):
    cfg = base_config(tmp_path)
    cfg["params"]["rho_j"] = 0.0
    code = cli.main(["--config", write_config(tmp_path, cfg), "--trials", "200"])
    assert code == 0
    _, rows = read_rows(tmp_path / "out.csv")
    for r in rows:
        for col in ("p_dl_analytic", "p_ul_analytic", "p_joint_analytic",
                    "p_dl_mc", "p_ul_mc", "p_joint_mc"):
            assert float(r[col]) == 1.0


def test_jam_area_sweep_handles_empty_band(tmp_path):
    cfg = base_config(tmp_path, scenario="coverage_vs_jam_area")
    cfg["sweep"] = {"variable": "z2", "start": 0.0, "stop": 60.0, "step": 20.0}
    code = cli.main(["--config", write_config(tmp_path, cfg), "--trials", "300"])
    assert code == 0
    _, rows = read_rows(tmp_path / "out.csv")
    assert float(rows[0]["p_joint_mc"]) == 1.0
    assert float(rows[-1]["p_joint_analytic"]) < 1.0


def test_roc_headline_value(tmp_path):
    cfg = base_config(tmp_path, scenario="roc")
    cfg["sweep"] = {"variable": "p_fa", "start": 0.05, "stop": 0.15, "step": 0.05}
    cfg["auth"] = {"m": 5, "n_eves": 5, "profile_seed": 28294, "lq_db": 10.0}
    code = cli.main(["--config", write_config(tmp_path, cfg), "--trials", "2000"])
    assert code == 0
    header, rows = read_rows(tmp_path / "out.csv")
    assert header == cli.ROC_COLUMNS
    at_tenth = [r for r in rows if float(r["p_fa"]) == 0.1][0]
    assert float(at_tenth["p_d_cf"]) >= 0.95


def test_auth_sweep_schema(tmp_path):
    cfg = base_config(tmp_path, scenario="auth_errors_vs_lq")
    cfg["sweep"] = {"variable": "lq_db", "start": 0.0, "stop": 10.0, "step": 5.0}
    cfg["auth"] = {"m": 5, "n_eves": 5, "profile_seed": 28294, "epsilon_db": 1.0}
    code = cli.main(["--config", write_config(tmp_path, cfg), "--trials", "2000"])
    assert code == 0
    header, rows = read_rows(tmp_path / "out.csv")
    assert header == cli.AUTH_COLUMNS
    assert len(rows) == 3
    # fixed threshold: the closed-form false alarm falls as noise shrinks
    pfa = [float(r["p_fa_cf"]) for r in rows]
    assert pfa[0] > pfa[-1]


def test_json_output_round_trips(tmp_path):
    cfg = base_config(tmp_path)
    code = cli.main(["--config", write_config(tmp_path, cfg),
                     "--trials", "200", "--format", "json",
                     "--out", str(tmp_path / "out.json")])
    assert code == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    assert doc["schema_version"] == cli.SCHEMA_VERSION
    assert doc["columns"] == cli.COVERAGE_COLUMNS
    assert len(doc["rows"]) == 4


# ------------------------------------------------------------ determinism


def test_reruns_are_byte_identical(tmp_path, monkeypatch):
    cfg = base_config(tmp_path)
    path = write_config(tmp_path, cfg)
    assert cli.main(["--config", path, "--out", str(tmp_path / "a.csv")]) == 0
    monkeypatch.setenv("RAFTGUARD_WORKERS", "2")
    assert cli.main(["--config", path, "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_seed_override_changes_monte_carlo_only(tmp_path):
    cfg = base_config(tmp_path)
    path = write_config(tmp_path, cfg)
    cli.main(["--config", path, "--out", str(tmp_path / "a.csv")])
    cli.main(["--config", path, "--out", str(tmp_path / "b.csv"), "--seed", "8"])
    _, a = read_rows(tmp_path / "a.csv")
    _, b = read_rows(tmp_path / "b.csv")
    assert [r["p_dl_analytic"] for r in a] == [r["p_dl_analytic"] for r in b]
    assert any(x["p_dl_mc"] != y["p_dl_mc"] for x, y in zip(a, b))


# -------------------------------------------------------------- validation


def test_validate_only_reports_ok(tmp_path, capsys):
    path = write_config(tmp_path, base_config(tmp_path))
    assert cli.main(["--config", path, "--validate-only"]) == 0
    out = capsys.readouterr().out
    assert "config OK" in out and "4 sweep points" in out
    assert not (tmp_path / "out.csv").exists()


def test_inverted_annulus_rejected(tmp_path, capsys):
    cfg = base_config(tmp_path)
    cfg["params"]["annulus_inner_m"] = 200.0
    cfg["params"]["annulus_outer_m"] = 100.0
    assert cli.main(["--config", write_config(tmp_path, cfg), "--validate-only"]) == 2
    assert "annulus" in capsys.readouterr().err


def test_alpha_two_rejected(tmp_path, capsys):
    cfg = base_config(tmp_path)
    cfg["params"]["alpha"] = 2.0
    assert cli.main(["--config", write_config(tmp_path, cfg), "--validate-only"]) == 2
    assert "alpha" in capsys.readouterr().err


def test_parse_error_is_line_anchored(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "scenario": "roc",\n  "sweep": [,]\n}\n')
    assert cli.main(["--config", str(path), "--validate-only"]) == 2
    assert "line 3" in capsys.readouterr().err


def test_unknown_keys_rejected(tmp_path, capsys):
    cfg = base_config(tmp_path)
    cfg["params"]["alpa"] = 3.0
    assert cli.main(["--config", write_config(tmp_path, cfg), "--validate-only"]) == 2
    assert "alpa" in capsys.readouterr().err


def test_sweep_variable_must_match_scenario(tmp_path, capsys):
    cfg = base_config(tmp_path, scenario="coverage_vs_jam_area")
    assert cli.main(["--config", write_config(tmp_path, cfg), "--validate-only"]) == 2
    assert "z2" in capsys.readouterr().err


def test_roc_targets_must_be_interior(tmp_path, capsys):
    cfg = base_config(tmp_path, scenario="roc")
    cfg["sweep"] = {"variable": "p_fa", "start": 0.0, "stop": 0.5, "step": 0.1}
    cfg["auth"] = {"m": 5, "n_eves": 5, "profile_seed": 1}
    assert cli.main(["--config", write_config(tmp_path, cfg), "--validate-only"]) == 2
    assert "(0, 1)" in capsys.readouterr().err


def test_auth_scenario_requires_auth_block(tmp_path, capsys):
    cfg = base_config(tmp_path, scenario="auth_errors_vs_lq")
    cfg["sweep"] = {"variable": "lq_db", "start": 0.0, "stop": 10.0, "step": 5.0}
    assert cli.main(["--config", write_config(tmp_path, cfg), "--validate-only"]) == 2
    assert "auth" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["--config", str(tmp_path / "nope.json"), "--validate-only"]) == 2
    assert capsys.readouterr().err


def test_diagnostics_enumerate_all_problems(tmp_path, capsys):
    cfg = base_config(tmp_path)
    cfg["n_trials"] = 0
    cfg["params"]["alpha"] = 1.5
    assert cli.main(["--config", write_config(tmp_path, cfg), "--validate-only"]) == 2
    err = capsys.readouterr().err
    assert "n_trials" in err and "alpha" in err


# ---------------------------------------------------------- failure paths


def test_numeric_failure_exits_three(tmp_path, capsys, monkeypatch):
    def boom(config, index, value):
        raise FloatingPointError("synthetic blowup")

    monkeypatch.setitem(cli._ROW_BUILDERS, "coverage_vs_beta", boom)
    path = write_config(tmp_path, base_config(tmp_path))
    assert cli.main(["--config", path]) == 3
    err = capsys.readouterr().err
    assert "numeric failure" in err and "beta_db" in err


def test_shipped_configs_validate():
    import glob

    configs = sorted(glob.glob("configs/*.json"))
    assert len(configs) == 9
    for path in configs:
        assert cli.main(["--config", path, "--validate-only"]) == 0
