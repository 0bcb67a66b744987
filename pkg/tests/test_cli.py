import json

import pytest
from hypothesis import given, settings, strategies as st

from poisson_deform.algebra import format_poly, parse_poly
from poisson_deform.cli import main
from poisson_deform.report import emit, run
from poisson_deform.scenario import (FIXTURES, ScenarioError, load_fixture,
                                     parse_scenario, print_scenario, sign_mutations)

from strategies import polys

FAST = ["mc_residual", "beta_closure", "golden"]


def write(tmp_path, doc, name="s.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
    return str(p)


def base(**kw):
    d = {"name": "t", "dimension": 2, "order": 2, "sigma": [["1"]], "potential_h": "z1*w1 + z2*w2"}
    d.update(kw)
    return d


def test_fixture_parses():
    s = load_fixture("flat")
    assert (s.n, s.order) == (2, 3)
    assert s.sigma.entry(1, 2) == parse_poly("1", 2)
    assert s.h == parse_poly("z1*w1 + z2*w2", 2)
    assert "golden" in s.checks and "ks_identity" in s.checks
    assert "rank_locus" not in load_fixture("heisenberg3").checks


@pytest.mark.parametrize("name", FIXTURES)
def test_roundtrip_fixtures(name):
    s = load_fixture(name)
    assert parse_scenario(print_scenario(s)) == s


@settings(max_examples=100, deadline=None)
@given(polys(holomorphic=True, max_deg=3), polys(), st.integers(1, 6), st.integers(0, 3))
def test_roundtrip_random(p, h, N, eo):
    doc = base(sigma=[[format_poly(p)]], potential_h=format_poly(h), order=N, echo_order=eo)
    s = parse_scenario(json.dumps(doc))
    assert parse_scenario(print_scenario(s)) == s


def test_full_matrix_and_omega():
    a = parse_scenario(json.dumps(base(sigma=[["0", "z1"], ["-z1", "0"]])))
    b = parse_scenario(json.dumps(base(sigma=[["z1"]])))
    assert a.sigma == b.sigma
    doc = base()
    del doc["potential_h"]
    doc["omega"] = [["1", "0"], ["0", "1"]]
    assert parse_scenario(json.dumps(doc)).h == a.h


@pytest.mark.parametrize("doc, fragment", [
    ('{"name": "x",\n  "dimension": 2,,}', "line 2"),
    (base(sigma=[["z1*w2"]]), "holomorphic"),
    (base(sigma=[["0", "1"], ["1", "0"]]), "antisymmetric"),
    (base(dimension=3, sigma=[["z3", "z1*z2"], ["z1"]], potential_h="z1*w1"), "(z1, z2, z3)"),
    (base(dimension=3, sigma=[["z3", "0"], ["0"]], potential_h="z1*w1", checks=["rank_locus"]), "dimension 2"),
    (base(checks=["nope"]), "unknown check"),
    (base(sigma=[["z1 +"]]), "column"),
    (base(order=99), "cap"),
    (base(order=0), "order"),
    (base(extra=1), "unknown field"),
])
def test_input_errors(doc, fragment):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text)
    assert fragment in str(exc.value)


def test_syntax_error_location():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario('{\n  "name": "x"\n  "dimension": 2}')
    assert (exc.value.line, exc.value.column) == (3, 3)


def test_run_flat_all_checks():
    rep = run(load_fixture("flat"))
    assert rep.passed
    assert rep.echo["phi"]["2"] == "0"
    assert {c.name for c in rep.checks} >= {"mc_residual", "period_first_order", "golden"}


def test_structured_output_deterministic():
    s = load_fixture("heisenberg3")
    a = emit([run(s)], "json")
    b = emit([run(load_fixture("heisenberg3"))], "json")
    assert a == b
    doc = json.loads(a)
    assert "timings" not in doc["reports"][0]
    assert json.loads(emit([run(s)], "json", timing=True))["reports"][0]["timings"]


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "flat", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "pass"

    assert main(["run", "heisenberg3", "--verify-only"]) == 1
    out = capsys.readouterr().out
    assert "ks_identity" in out and "first failing order 1" in out and "phi_1" not in out

    bad = write(tmp_path, base(sigma=[["w1"]]))
    assert main(["run", bad]) == 2
    assert "holomorphic" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    assert main(["run", "flat", "--order", "50"]) == 2
    assert main(["run", "flat", "--checks", "rank_locus,bogus"]) == 2


def test_cli_checks_and_echo(capsys):
    assert main(["run", "cubic", "--order", "3", "--checks", ",".join(FAST),
                 "--echo-order", "1", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    rep = doc["reports"][0]
    assert [c["name"] for c in rep["checks"]] == FAST
    assert set(rep["echo"]["phi"]) == {"1"}


def test_cli_jobs_preserves_order(capsys):
    args = ["run", "heisenberg3", "flat", "--checks", "mc_residual", "--format", "json"]
    assert main(args + ["--jobs", "2"]) == 0
    par = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == par
    assert [r["scenario"] for r in json.loads(par)["reports"]] == ["heisenberg3", "flat"]


def test_cli_show_and_fixtures(capsys):
    assert main(["fixtures"]) == 0
    assert capsys.readouterr().out.split() == list(FIXTURES)
    assert main(["show", "flat"]) == 0
    assert parse_scenario(capsys.readouterr().out) == load_fixture("flat")


@pytest.mark.parametrize("name", FIXTURES)
def test_every_sign_mutation_is_caught(name):
    s = load_fixture(name, order=2, checks=FAST)
    muts = list(sign_mutations(s))
    assert muts
    for label, m in muts:
        rep = run(m)
        failed = [c for c in rep.checks if not c.passed]
        assert failed, label
        assert all(c.first_failing_order is not None for c in failed), label
