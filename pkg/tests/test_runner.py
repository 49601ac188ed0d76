import json
import math

import numpy as np
import pytest

from locdisc import cli, runner
from locdisc.errors import DomainError, ResourceError
from locdisc.qubit import make_pair


def test_sweep_spec_validation():
    with pytest.raises(DomainError):
        runner.SweepSpec(strategies=())
    with pytest.raises(DomainError):
        runner.SweepSpec(strategies=("magic",))
    with pytest.raises(ResourceError):
        runner.SweepSpec(n_values=(41,))
    runner.SweepSpec(n_values=(41,), allow_large=True)
    runner.SweepSpec(n_values=(60,), strategies=("collective",))


def test_sweep_n_fig1_rows():
    rows = runner.sweep_n(runner.SweepSpec(n_values=(1, 2, 3, 4, 5)))
    assert [r["N"] for r in rows] == [1, 2, 3, 4, 5]
    for s in runner.STRATEGIES:
        col = [r[s] for r in rows]
        assert col[0] == pytest.approx(0.217157, abs=1e-6)
        assert all(b <= a + 1e-9 for a, b in zip(col, col[1:]))
        assert all(0 <= v <= 0.5 for v in col)
    assert all(r["flags"] == "" for r in rows)


def test_sweep_n_identical_states():
    rows = runner.sweep_n(runner.SweepSpec(0.5, 0.5, 0.0, (1, 3), grid_points=501))
    assert all(r[s] == pytest.approx(0.5, abs=1e-12) for r in rows for s in runner.STRATEGIES)


def test_failed_cell_is_recorded(monkeypatch):
    def boom(*a, **k):
        raise FloatingPointError("synthetic")
    monkeypatch.setattr(runner, "collective_error", boom)
    rows = runner.sweep_n(runner.SweepSpec(n_values=(2,), strategies=("collective", "repeated")))
    assert math.isnan(rows[0]["collective"])
    assert rows[0]["collective_status"].startswith("error")
    assert rows[0]["repeated"] > 0


def test_sweep_r_maximally_mixed_row():
    rows = runner.sweep_r(math.pi / 2, 25, [0.0, 0.3], strategies=("collective", "repeated"))
    assert rows[0]["collective"] == math.log(2) / 25
    assert rows[0]["repeated"] == math.log(2) / 25
    assert rows[1]["collective"] == pytest.approx(rows[1]["repeated"], rel=0.02)


def test_gap_cases():
    assert runner.gap(make_pair(0.5, 0.5, 0.0), 4).delta == 0.0
    pure = runner.gap(make_pair(1, 1, 1.0), 6)
    assert abs(pure.delta) < 1e-6 and not pure.flagged
    mixed = runner.gap(make_pair(0.8, 0.8, math.pi / 2), 6)
    assert mixed.delta > 0


def test_fit_recovers_model():
    ns = np.arange(25, 36)
    c = 0.2 + 0.1 * np.log(ns) / ns + 0.05 / ns
    fit = runner.fit_rate(list(zip(ns, np.exp(-c * ns))))
    assert (fit.c0, fit.c1, fit.c2) == pytest.approx((0.2, 0.1, 0.05), abs=1e-12)
    assert fit.window == (25, 35) and fit.residual < 1e-12


def test_fit_rejects_degenerate_window():
    with pytest.raises(DomainError):
        runner.fit_rate([(25, 1e-3), (26, 9e-4)])
    with pytest.raises(DomainError):
        runner.fit_rate([(25, 1e-3), (26, 9e-4), (40, 1e-5)], window=(25, 30))


def test_copies_ratio():
    res = runner.copies_ratio(make_pair(1, 1, 1.0), 6)
    assert res.f == pytest.approx(1, abs=1e-4)
    mixed = runner.copies_ratio(make_pair(0.9, 0.9, math.pi / 2), 10)
    assert 1 < mixed.f <= 2 + 1e-6
    with pytest.raises(DomainError):
        runner.copies_ratio(make_pair(0.4, 0.4, 0.0), 3)


def test_csv_is_deterministic_and_round_trips():
    spec = runner.SweepSpec(n_values=(3, 1, 2), grid_points=2001)
    a, b = runner.to_csv(runner.sweep_n(spec)), runner.to_csv(runner.sweep_n(spec))
    assert a == b
    header, first = a.splitlines()[:2]
    cells = dict(zip(header.split(","), first.split(",")))
    assert cells["N"] == "1"
    assert float(cells["collective"]) == runner.sweep_n(spec)[0]["collective"]


def test_worker_pool_gives_same_rows(monkeypatch):
    spec = runner.SweepSpec(n_values=(1, 2, 3), strategies=("collective", "repeated", "ppt"))
    serial = runner.to_csv(runner.sweep_n(spec))
    monkeypatch.setenv(runner.WORKERS_ENV, "2")
    assert runner.to_csv(runner.sweep_n(spec)) == serial


def test_json_metadata():
    text = runner.to_json([{"N": 1, "x": math.nan}], {"tol": 1e-8}, 0.5)
    data = json.loads(text)
    assert data["records"] == [{"N": 1, "x": None}]
    assert {"spec", "versions", "tolerances", "wall_time_s"} <= set(data["metadata"])


def test_parse_angle():
    assert cli.parse_angle("pi/2") == math.pi / 2
    assert cli.parse_angle("3pi/4") == 3 * math.pi / 4
    assert cli.parse_angle("0.5*pi") == math.pi / 2
    assert cli.parse_angle("1.25") == 1.25


def test_cli_collective(capsys):
    assert cli.main(["collective", "--n", "1", "--theta", "pi/2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "N,collective"
    assert float(out[1].split(",")[1]) == pytest.approx(0.217157287525381, abs=1e-12)


def test_cli_json_file(tmp_path):
    path = tmp_path / "out.json"
    assert cli.main(["repeated", "--n-max", "3", "--format", "json", "--out", str(path)]) == 0
    data = json.loads(path.read_text())
    assert [r["N"] for r in data["records"]] == [1, 2, 3]


def test_cli_errors_are_json(capsys):
    assert cli.main(["ppt", "--n", "41"]) != 0
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ResourceError"
    assert cli.main(["collective", "--n", "2", "--r0", "1.5"]) != 0
    assert json.loads(capsys.readouterr().err)["error"] == "DomainError"


def test_cli_verify_small(capsys):
    assert cli.main(["verify", "--n-max", "3", "--samples", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N,check,max_dev,pass" and all(l.endswith("True") for l in lines[1:])
