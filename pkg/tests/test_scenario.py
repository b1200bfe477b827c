import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhydro import ContractError, Free, Grid1D, Harmonic, Params, Tabulated, Uniform
from qhydro.scenario import (
    ALL_OUTPUTS,
    GaussianAtRest,
    Scenario,
    ScenarioError,
    apply_overrides,
    bundled_path,
    bundled_scenarios,
    emit_scenario,
    load_scenario,
    parse_scenario,
    resolve_path,
    run_scenario,
)


def small(**kw):
    base = dict(name="small", grid=Grid1D(-30.0, 30.0, 241), params=Params(k=1.0, potential=Harmonic(0.02)),
                t_end=0.5, snapshot_every=0.25, initial=GaussianAtRest(-2.0, 0.05))
    base.update(kw)
    return Scenario(**base)


def test_bundled_scenarios_listed():
    assert bundled_scenarios() == ["paper-k0", "paper-k0.1", "paper-k1"]
    s = load_scenario(bundled_path("paper-k0.1"))
    assert s.params.k == 0.1 and s.t_end == 20.0 and s.dt is None
    assert resolve_path("paper-k1") == bundled_path("paper-k1")


@pytest.mark.parametrize("name", ["paper-k0", "paper-k0.1", "paper-k1"])
def test_bundled_files_round_trip(name):
    text = bundled_path(name).read_text()
    s = parse_scenario(text)
    assert emit_scenario(s) == text
    s.validate()


finite = st.floats(-1e3, 1e3, allow_nan=False)
positive = st.floats(1e-3, 1e3, allow_nan=False)
potentials = st.one_of(
    positive.map(Harmonic),
    finite.map(Uniform),
    st.just(Free()),
    st.lists(finite, min_size=11, max_size=11).map(lambda v: Tabulated(tuple(v))),
)


@settings(max_examples=60, deadline=None)
@given(potentials, finite, positive, positive, st.one_of(st.none(), positive),
       st.lists(st.sampled_from(ALL_OUTPUTS), min_size=1, max_size=4, unique=True), st.booleans())
def test_emit_parse_round_trip(pot, center, a, t_end, dt, outputs, override):
    s = Scenario(name="h", grid=Grid1D(-1.5, 2.5, 11), params=Params(hbar=0.7, m=1.3, k=0.2, potential=pot),
                 t_end=t_end, snapshot_every=t_end / 3, initial=GaussianAtRest(center, a),
                 outputs=tuple(outputs), dt=dt, override_dt=override)
    assert parse_scenario(emit_scenario(s)) == s


def with_line(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


@pytest.fixture
def k1_text():
    return bundled_path("paper-k1").read_text()


def test_bad_number_reports_line_and_column(k1_text):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(with_line(k1_text, "n = 1201", "n = twelve"))
    assert (err.value.line, err.value.column) == (9, 5)
    assert "line 9, column 5" in str(err.value)


def test_unknown_key_rejected(k1_text):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(with_line(k1_text, "k = 1.0", "k = 1.0\ngamma = 2"))
    assert "gamma" in str(err.value) and err.value.line == 15


@pytest.mark.parametrize("old,new,word", [
    ("potential = harmonic", "potential = morse", "morse"),
    ("variant = gaussian-at-rest", "variant = plane-wave", "plane-wave"),
    ("boundary = extrapolate-velocity", "boundary = periodic", "boundary"),
    ("quantities = density", "quantities = entropy density", "entropy"),
    ("a = 0.05", "a = -1", "a must"),
    ("n = 1201", "n = 2", "n"),
    ("override_dt = false", "override_dt = maybe", "true or false"),
    ("t_end = 100.0", "t_end = nan", "finite"),
])
def test_invalid_values(k1_text, old, new, word):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(with_line(k1_text, old, new))
    assert word in str(err.value)


def test_missing_and_duplicate(k1_text):
    with pytest.raises(ScenarioError, match="missing key 'x_max'"):
        parse_scenario(with_line(k1_text, "x_max = 30.0\n", ""))
    with pytest.raises(ScenarioError, match="duplicate"):
        parse_scenario(with_line(k1_text, "n = 1201", "n = 1201\nn = 801"))
    with pytest.raises(ScenarioError, match="before the first"):
        parse_scenario("name = x\n" + k1_text)
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario("/nonexistent/file.ini")


def test_validate_checks_step_and_cadence():
    with pytest.raises(ContractError):
        small(dt=1.0).validate()
    small(dt=1.0, override_dt=True).validate()
    with pytest.raises(ContractError, match="does not divide"):
        small(snapshot_every=0.3).validate()


def test_overrides():
    s = apply_overrides(small(), dt=1e-4, grid_n=401)
    assert s.grid.n == 401 and s.dt == 1e-4 and s.grid.x_max == 30.0


def test_run_writes_tables_and_manifest(tmp_path):
    s = small()
    res = run_scenario(s, tmp_path, do_cross_check=True, overrides={"grid_n": 241})
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted([f"{o}.dat" for o in ALL_OUTPUTS] + ["grid.dat", "cross_check.dat", "manifest.json"])
    density = np.loadtxt(tmp_path / "density.dat")
    assert density.shape == (3, 242)
    assert np.allclose(density[:, 0], [0, 0.25, 0.5], atol=s.solver.dt)
    assert np.array_equal(density[-1, 1:], res.trajectory[-1].rho)
    x = np.loadtxt(tmp_path / "grid.dat")
    assert np.array_equal(x[:, 1], s.grid.x)
    norm = np.loadtxt(tmp_path / "norm.dat")
    assert np.allclose(norm[:, 1], 1.0, atol=1e-12)
    assert (tmp_path / "liapunov.dat").read_text().startswith("# t liapunov\n")
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["overrides"] == {"grid_n": 241}
    assert parse_scenario(m["config"]) == s
    assert m["steps"] == res.trajectory.steps and m["snapshots"] == 3
    assert max(m["cross_check"]["max_abs_density_diff"]) < 1e-2


def test_selected_outputs_only(tmp_path):
    run_scenario(small(outputs=("norm",)), tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["grid.dat", "manifest.json", "norm.dat"]


def test_non_oscillator_reference_state():
    U = Harmonic(0.02).evaluate(Grid1D(-30.0, 30.0, 241))
    s = small(params=Params(k=1.0, potential=Tabulated(tuple(U))), t_end=0.25)
    res = run_scenario(s)
    assert res.reference.E_s == pytest.approx(np.sqrt(0.02) / 2, rel=1e-3)


def test_rerun_is_bit_identical(tmp_path):
    s = replace(small(), t_end=1.0)
    a = run_scenario(s, tmp_path / "a")
    run_scenario(s, tmp_path / "b")
    for f in a.files:
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
