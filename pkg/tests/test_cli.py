import json

import pytest

from multibump.cli import (
    ConfigError,
    RunConfig,
    _render_json,
    main,
    parse_config,
)
from multibump.expansion import ExpansionConstants, Provenance


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_defaults_happy_path():
    cfg = parse_config("mu1 = 1\nmu2 = 1\nbeta = 0\nm = 2\na = 1\nn = 2\n"
                       "b = 1\nk = 8")
    assert cfg == RunConfig(mu1=1.0, mu2=1.0, beta=0.0, m=2.0, a=1.0,
                            n=2.0, b=1.0, k=8)
    assert cfg.family == "synchronized"
    assert cfg.solver == "newton"


def test_parse_comments_and_blank_lines():
    cfg = parse_config("# leading comment\n\nk = 6  # trailing\n\n")
    assert cfg.k == 6


def test_parse_names_the_violated_constraint():
    with pytest.raises(ConfigError, match="m > 1"):
        parse_config("m = 0.5")
    with pytest.raises(ConfigError, match="tol > 0"):
        parse_config("tol = 0")
    with pytest.raises(ConfigError, match="inadmissible coupling"):
        parse_config("beta = 1.0")


def test_parse_duplicate_key_reports_both_lines():
    with pytest.raises(ConfigError, match=r"lines 1 and 3"):
        parse_config("k = 8\nr = 10\nk = 9")


def test_parse_unknown_key_reports_line():
    with pytest.raises(ConfigError, match=r"line 2: unknown key 'krx'"):
        parse_config("k = 8\nkrx = 9")


def test_parse_malformed_lines():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just words")
    with pytest.raises(ConfigError, match="bad value"):
        parse_config("k = eight")
    with pytest.raises(ConfigError, match="empty value"):
        parse_config("k =")


def test_render_json_is_deterministic_and_17_digit():
    text = _render_json({"b": 1.0 / 3.0, "a": [True, None, 2]})
    assert '"b": 0.33333333333333331' in text
    assert '"a": [\n    true,\n    null,\n    2\n  ]' in text
    assert text.index('"a"') < text.index('"b"')


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main(["energy"]) == 1  # missing --config
    assert main(["energy", "--config", str(tmp_path / "absent.cfg")]) == 1
    bad = _write(tmp_path, "m = 0.5")
    assert main(["energy", "--config", bad]) == 1
    assert "m > 1" in capsys.readouterr().err


def test_energy_refuses_large_rings(tmp_path, capsys):
    cfg = _write(tmp_path, "k = 12")
    assert main(["energy", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "fit" in err and "2k = 24" in err


def test_constants_artifacts_and_determinism(tmp_path):
    cfg = _write(tmp_path, "mu1 = 1\nmu2 = 2\nbeta = -0.5\n")
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["constants", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["constants", "--config", cfg, "--out", str(out2)]) == 0
    for name in ("constants.json", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    data = json.loads((out1 / "constants.json").read_text())
    assert data["window_class"] == "Repulsive"
    assert len(data["config_sha256"]) == 64
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["config_sha256"] == data["config_sha256"]
    assert manifest["subcommand"] == "constants"
    assert "constants.json" in manifest["artifacts"]


def test_seed_override_lands_in_manifest(tmp_path):
    cfg = _write(tmp_path, "seed = 3")
    out = tmp_path / "o"
    assert main(["constants", "--config", cfg, "--out", str(out),
                 "--seed", "11"]) == 0
    assert json.loads((out / "manifest.json").read_text())["seed"] == 11


def test_ground_state_csv_embeds_the_config_hash(tmp_path):
    cfg = _write(tmp_path, "mu1 = 1\n")
    out = tmp_path / "o"
    assert main(["ground-state", "--config", cfg, "--out", str(out)]) == 0
    head = (out / "ground_state_mu1.csv").read_text().splitlines()[0]
    data = json.loads((out / "ground_state.json").read_text())
    assert head == f"# config_sha256 = {data['config_sha256']}"
    assert data["profiles"][0]["w0"] == pytest.approx(4.337387679976883)


def test_reduce_solves_with_analytic_constants(tmp_path):
    cfg = _write(tmp_path, "k = 12\n")
    out = tmp_path / "o"
    assert main(["reduce", "--config", cfg, "--out", str(out)]) == 0
    data = json.loads((out / "reduce.json").read_text())
    assert data["constants_source"] == "analytic"
    assert data["grad_norm"] < 1e-9
    assert isinstance(data["in_window"], bool)


def test_artifact_hash_gate(tmp_path):
    fit_json = tmp_path / "fit.json"
    c = ExpansionConstants(A0=75.0, A1=37.0, C_beta=46.0, D_beta=29.0,
                           provenance=Provenance.Fitted)
    payload = {"constants": c.as_dict(), "config_sha256": "0" * 64}
    fit_json.write_text(json.dumps(payload))
    cfg = _write(tmp_path, f"k = 12\nconstants_from = {fit_json}\n")
    out = str(tmp_path / "o")

    # stale hash -> verification failure
    assert main(["reduce", "--config", cfg, "--out", out]) == 3

    # matching hash -> consumed
    import hashlib
    live = hashlib.sha256(open(cfg, "rb").read()).hexdigest()
    payload["config_sha256"] = live
    fit_json.write_text(json.dumps(payload))
    assert main(["reduce", "--config", cfg, "--out", out]) == 0
    data = json.loads((tmp_path / "o" / "reduce.json").read_text())
    assert data["constants_source"] == "artifact:fit.json"


def test_sweep_csv_contract(tmp_path):
    cfg = _write(tmp_path, "k_list = 10, 12\n")
    out = tmp_path / "o"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("# config_sha256 = ")
    assert lines[1] == "k,r_star,h_star,rho_star,grad_norm,iters,in_window,curvature"
    assert len(lines) == 4
    assert lines[2].split(",")[0] == "10"


def test_verify_subset_and_exit_codes(tmp_path):
    cfg = _write(tmp_path, "checks = amplitude-identities\nseed = 5\n")
    out1, out2 = tmp_path / "v1", tmp_path / "v2"
    assert main(["verify", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["verify", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "verify.json").read_bytes() == (out2 / "verify.json").read_bytes()
    data = json.loads((out1 / "verify.json").read_text())
    assert data["all_passed"] is True
    assert data["checks"][0]["name"] == "amplitude-identities"

    bad = _write(tmp_path, "checks = not-a-check\n", name="bad.cfg")
    assert main(["verify", "--config", bad, "--out", str(tmp_path / "vb")]) == 1
