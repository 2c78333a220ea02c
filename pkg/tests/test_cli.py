import csv
import json

import pytest

from gaussunc import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_defaults_validate():
    cfg = cli.parse_and_validate(["simulate"])
    assert cfg.protocol.n == 128 and cfg.extra["theta2"] == 1.0
    assert cfg.settings["protocol.alpha1"] == "0.6"


def test_rates_json(capsys):
    code, out, _ = run(capsys, "rates", "--gamma2", "1", "--delta2", "1.5", "--power", "10")
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["c_lower"] == pytest.approx(0.4313, abs=1e-4)
    assert doc["config"]["channel.delta2"] == "1.5"


def test_rates_not_defined_flag(capsys):
    _, out, _ = run(capsys, "rates", "--delta2", "2.5")
    assert json.loads(out)["result"]["p_min"] == "not-defined"


def test_sweep_csv_zero_below_one(capsys):
    code, out, _ = run(capsys, "--format", "csv", "sweep", "--lo", "0.5", "--hi", "100",
                       "--num", "200")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "param,value"
    rows = [(float(a), float(b)) for a, b in csv.reader(lines[1:])]
    assert all(c == 0 for p, c in rows if p <= 1.0)
    assert all(c > 0 for p, c in rows if p > 1.0)
    assert "# columns=P,C_L" in out


def test_report_tables(capsys):
    _, out, _ = run(capsys, "experiment", "report", "power")
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert body[0] == "P,C_L" and len(body) == 301
    _, out, _ = run(capsys, "experiment", "report", "gamma2", "--lo", "0.5", "--hi", "1.5",
                    "--num", "5")
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert body[0] == "gamma2,C_L_inf" and body[-1] == "1.5,infinite"


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "bogus")
    assert code == 2 and "invalid choice" in err


def test_beta3_error_named(capsys):
    code, _, err = run(capsys, "simulate", "--beta3", "0.05", "--beta1", "0.05", "--beta2", "0.0")
    assert code == 2 and "beta3 > beta1 + beta2" in err


def test_channel_ordering_named(capsys):
    code, _, err = run(capsys, "rates", "--gamma2", "2", "--delta2", "1")
    assert code == 2 and "0 < gamma2 <= delta2" in err


def test_errors_aggregated(capsys):
    code, _, err = run(capsys, "simulate", "--beta3", "0.01", "--eta", "0.3", "--theta2", "9")
    assert code == 2
    assert "beta3 > beta1 + beta2" in err and "eta < beta1" in err and "simulate.theta2" in err


def test_bad_number(capsys):
    code, _, err = run(capsys, "rates", "--power", "ten")
    assert code == 2 and "protocol.power" in err


def test_config_file_and_override(tmp_path, capsys):
    cfgf = tmp_path / "c.ini"
    cfgf.write_text("[channel]\ndelta2 = 1.25\n[protocol]\npower = 4\n")
    _, out, _ = run(capsys, "--config", str(cfgf), "rates", "--power", "5")
    doc = json.loads(out)
    assert doc["config"]["channel.delta2"] == "1.25" and doc["config"]["protocol.power"] == "5"


def test_missing_config_is_io_error(capsys):
    code, _, _ = run(capsys, "--config", "/nonexistent/file.ini", "rates")
    assert code == 3


def test_unwritable_output_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "--out", str(tmp_path / "no" / "dir" / "x.json"), "rates")
    assert code == 3 and "cannot write" in err


def test_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.main(["--seed", "4", "--out", str(p), "simulate", "--theta2", "1.25"]) == 0
    assert a.read_bytes() == b.read_bytes()
    for p in (a, b):
        cli.main(["--seed", "4", "--format", "csv", "--out", str(p), "attack", "--trials", "30"])
    assert a.read_bytes() == b.read_bytes()


def test_simulate_replay(tmp_path, capsys):
    f = tmp_path / "s.json"
    assert cli.main(["--seed", "2", "--out", str(f), "simulate"]) == 0
    code, out, _ = run(capsys, "replay", str(f))
    r = json.loads(out)["result"]
    assert code == 0 and r["accepted"] and r["matches_original"]


def test_replay_rejects_tampered(tmp_path, capsys):
    f = tmp_path / "s.json"
    cli.main(["--out", str(f), "simulate"])
    doc = json.loads(f.read_text())
    doc["result"]["c"] ^= 1
    f.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "replay", str(f))
    assert code == 1 and json.loads(out)["result"]["reason"] == "otp"


def test_replay_bad_input(tmp_path, capsys):
    f = tmp_path / "x.json"
    f.write_text(json.dumps({"result": {}}))
    assert run(capsys, "replay", str(f))[0] == 2
    assert run(capsys, "replay", str(tmp_path / "missing.json"))[0] == 3


def test_simulate_csv_header(capsys):
    code, out, _ = run(capsys, "--format", "csv", "simulate", "--message", "5")
    assert code == 0
    assert out.startswith("# ") and "param,value" in out and "\nc,5\n" in out


def test_reduce_check(capsys):
    code, out, _ = run(capsys, "reduce-check", "--case", "alice-cheats", "--samples", "3000")
    r = json.loads(out)["result"]
    assert code == 0 and {"statistic", "threshold", "pass"} <= set(r)


def test_reduce_check_refusal(capsys):
    code, _, err = run(capsys, "reduce-check", "--case", "honest", "--delta2", "1.5",
                       "--samples", "100")
    assert code == 1 and "refused" in err


@pytest.mark.parametrize("kind", ["binding", "concealment", "reduction"])
def test_attack_kinds(capsys, kind):
    extra = {"binding": ["--trials", "20"], "concealment": ["--m", "6", "--l", "2"],
             "reduction": ["--case", "bob-cheats", "--samples", "2000"]}[kind]
    code, out, _ = run(capsys, "attack", "--kind", kind, *extra)
    assert code == 0 and "pass" in json.loads(out)["result"]


def test_attack_concealment_refusal(capsys):
    code, _, err = run(capsys, "attack", "--kind", "concealment", "--m", "13")
    assert code == 1 and "refused" in err


def test_attack_s2_range(capsys):
    code, _, err = run(capsys, "attack", "--s2", "3")
    assert code == 2 and "attack.s2" in err


@pytest.mark.parametrize("suite", ["impossibility", "hashing"])
def test_experiment_run(capsys, suite):
    code, out, _ = run(capsys, "experiment", "run", suite)
    assert code == 0 and json.loads(out)["result"]["pass"]


def test_experiment_failure_exit(tmp_path, capsys):
    cfgf = tmp_path / "c.ini"
    cfgf.write_text("[impossibility]\neps1 = 1.0\n")
    code, _, _ = run(capsys, "--config", str(cfgf), "experiment", "run", "impossibility")
    assert code == 1


def test_global_flags_after_subcommand(capsys):
    _, out, _ = run(capsys, "rates", "--format", "csv")
    assert "param,value" in out
