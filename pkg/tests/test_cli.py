import csv
import io
import json

import pytest
from click.testing import CliRunner

from falsetate import cli
from falsetate.artin import InconsistencyError


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli.main, list(args), catch_exceptions=False)


def test_info_label(runner):
    res = invoke(runner, "info", "21A4", "--format", "json")
    assert res.exit_code == 0
    (rec,) = json.loads(res.output)
    assert rec["conductor"] == 21
    assert [(x["q"], x["kodaira"]) for x in rec["local"]] == [(3, "I2"), (7, "I1")]
    assert rec["torsion"] == 4


def test_info_raw_coefficients(runner):
    res = invoke(runner, "info", "0,-1,1,0,0", "--format", "json")
    assert json.loads(res.output)[0]["conductor"] == 11


def test_info_malformed_is_usage_error(runner):
    res = runner.invoke(cli.main, ["info", "1,2,x"])
    assert res.exit_code == 2
    assert "Invalid value" in res.output


def test_epsilon_command(runner):
    res = invoke(runner, "epsilon", "--p", "5", "--m", "2", "--format", "csv")
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    assert lines[0] == "p,m,eps_sigma,eps_rho"
    assert lines[1] == "5,2,-5^{3/2},-5^{5/2}"


def test_congruence_p3(runner):
    res = invoke(runner, "congruence", "--curve", "11A1", "--p", "3", "--m", "2", "--format", "json")
    assert res.exit_code == 0
    (rec,) = json.loads(res.output)
    assert rec["summary"] == "1 ≡ 1 mod 3, OK"
    assert rec["congruent"] is True


def test_table_omits_sign_minus_one(runner):
    res = invoke(runner, "table", "--curve", "11A3", "--p", "3", "--m", "11", "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.output) == []


def test_table_empty_m_list(runner):
    res = invoke(runner, "table", "--curve", "11A1", "--p", "3", "--format", "json")
    assert res.exit_code == 0 and json.loads(res.output) == []


def test_table_rows_and_columns(runner):
    res = invoke(runner, "table", "--curve", "11A1", "--p", "3", "--m", "5", "--m", "2", "--m", "4", "--format", "csv")
    assert res.exit_code == 0
    rows = list(csv.reader(io.StringIO(res.output)))
    assert rows[0][:7] == ["m", "N(rho)", "N(E,rho)", "L*", "Sha", "L_E(sigma)", "L_E(rho)"]
    assert [r[0] for r in rows[1:]] == ["2", "5"]  # 4 defines the same field as 2


def test_table_rank_positive_row_shows_dash(runner):
    res = invoke(runner, "table", "--curve", "14A1", "--p", "3", "--m", "5", "--format", "json")
    (row,) = json.loads(res.output)
    assert row["Sha"] == "-"
    assert row["provenance"]["Sha"] == "BSD-analytic"


def test_json_round_trip(runner):
    res = invoke(runner, "table", "--curve", "11A1", "--p", "3", "--m", "2", "--m", "7", "--format", "json")
    parsed = json.loads(res.output)
    assert cli.dump_json(parsed) + "\n" == res.output


def test_assume_override(runner):
    res = invoke(runner, "table", "--curve", "11A1", "--p", "3", "--m", "2", "--format", "json",
                 "--assume", "sha=descent-known")
    assert json.loads(res.output)[0]["provenance"]["Sha"] == "descent-known"
    bad = runner.invoke(cli.main, ["table", "--curve", "11A1", "--p", "3", "--m", "2", "--assume", "sha=maybe"])
    assert bad.exit_code == 2


def test_lvalue_budget_cap_exit_code(runner):
    res = runner.invoke(cli.main, ["lvalue", "--curve", "21A4", "--p", "5", "--m", "2", "--twist", "sigma",
                                   "--coeff-cap", "100"])
    assert res.exit_code == 2
    assert "required budget" in res.output


def test_lvalue_curve(runner):
    res = invoke(runner, "lvalue", "--curve", "11A1", "--p", "3", "--format", "json")
    (rec,) = json.loads(res.output)
    assert abs(float(rec["value"]) - 0.253841860855911) < 1e-12


def test_unsupported_tower_exit_code(runner):
    res = runner.invoke(cli.main, ["epsilon", "--p", "3", "--m", "24"])
    assert res.exit_code == 2


def test_iwasawa_command(runner):
    res = invoke(runner, "iwasawa", "--curve", "11A1", "--p", "3", "--m", "2", "--format", "json")
    (rec,) = json.loads(res.output)
    assert rec["main_theorem"]["consistent"] is True
    assert rec["hypotheses"]["mu(E/K) = 0"] == "assumed"
    assert any("chi'_na" in f for f in rec["flags"])


def test_inconsistency_exit_code():
    def boom():
        raise InconsistencyError("bad")

    with pytest.raises(SystemExit) as info:
        cli._run(boom)
    assert info.value.code == 1


def test_p7_label(runner):
    # the default accuracy target is out of reach here, but the run is still labelled
    res = invoke(runner, "congruence", "--curve", "11A1", "--p", "7", "--m", "2", "--format", "json")
    assert "unverified" in res.output
    assert res.exit_code == 2 and "coefficients are required" in res.output
