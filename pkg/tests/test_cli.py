import csv
import json
import math

import numpy as np
import pytest

from etfbounds import frames as fr
from etfbounds.cli import main
from etfbounds.measurement import load_density


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def qubit_sic(tmp_path):
    path = tmp_path / "sic.json"
    assert main(["frame", "gen", "--kind", "optimize", "--d", "2", "--n", "4", "--seed", "7", "--out", str(path)]) == 0
    return path


def test_frame_gen_simplex(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["frame", "gen", "--kind", "simplex", "--d", "3", "--out", str(out)]) == 0
    frame = fr.load_frame(out)
    assert (frame.d, frame.n) == (3, 4)
    err = capsys.readouterr().err
    assert "# seed=0" in err
    assert '"verdict": "pass"' in err


def test_frame_gen_basis_and_validate(tmp_path):
    out = tmp_path / "b.json"
    report = tmp_path / "r.json"
    assert main(["frame", "gen", "--kind", "basis", "--d", "3", "--out", str(out)]) == 0
    assert main(["frame", "validate", "--frame", str(out), "--out", str(report)]) == 0
    assert json.loads(report.read_text())["verdict"] == "pass"


def test_frame_validate_rejects_bad_frame(tmp_path):
    data = fr.frame_to_dict(fr.simplex_etf(2))
    data["vectors"][0] = [[1.0, 0.0], [0.0, 0.0]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    report = tmp_path / "r.json"
    assert main(["frame", "validate", "--frame", str(path), "--out", str(report)]) == 1
    result = json.loads(report.read_text())
    assert result["verdict"] == "fail"
    assert result["equiangular"] == "fail"


def test_frame_gen_optimize(qubit_sic):
    frame = fr.load_frame(qubit_sic)
    assert (frame.d, frame.n) == (2, 4)
    assert frame.report().passed


def test_frame_complement_cli(tmp_path, qubit_sic):
    out = tmp_path / "c.json"
    assert main(["frame", "complement", "--frame", str(qubit_sic), "--out", str(out)]) == 0
    comp = fr.load_frame(out)
    assert (comp.d, comp.n) == (2, 4)
    out2 = tmp_path / "c2.json"
    assert main(["frame", "gen", "--kind", "complement", "--frame", str(qubit_sic), "--out", str(out2)]) == 0


def test_complement_of_basis_is_input_error(tmp_path):
    basis = tmp_path / "b.json"
    main(["frame", "gen", "--kind", "basis", "--d", "3", "--out", str(basis)])
    assert main(["frame", "complement", "--frame", str(basis), "--out", str(tmp_path / "c.json")]) == 1
    assert main(["frame", "gen", "--kind", "complement", "--frame", str(basis), "--out", str(tmp_path / "g.json")]) == 1


def test_optimizer_failure_exit_code(tmp_path, capsys):
    # no 8-vector ETF exists in dimension 3
    rc = main(["frame", "gen", "--kind", "optimize", "--d", "3", "--n", "8", "--restarts", "1",
               "--max-iter", "300", "--out", str(tmp_path / "f.json")])
    assert rc == 2
    assert "did not converge" in capsys.readouterr().err


def test_welch_violation_is_input_error(tmp_path):
    assert main(["frame", "gen", "--kind", "optimize", "--d", "2", "--n", "5", "--out", str(tmp_path / "f.json")]) == 1


def test_round_trip(tmp_path, qubit_sic):
    frame = fr.load_frame(qubit_sic)
    again = tmp_path / "again.json"
    fr.save_frame(frame, again)
    assert np.max(np.abs(fr.load_frame(again).vectors - frame.vectors)) <= 1e-15


def test_state_commands(tmp_path, capsys):
    r = tmp_path / "r.json"
    assert main(["state", "random", "--d", "3", "--rank", "2", "--seed", "5", "--out", str(r)]) == 0
    assert "# seed=5" in capsys.readouterr().err
    rho, dA, dB = load_density(r)
    assert rho.shape == (3, 3) and dA is None
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2
    assert '"seed": 5' in r.read_text()

    s = tmp_path / "s.json"
    assert main(["state", "random", "--d", "2", "--separable", "3", "--seed", "1", "--out", str(s)]) == 0
    rho, dA, dB = load_density(s)
    assert (dA, dB) == (2, 2)

    m = tmp_path / "m.json"
    assert main(["state", "maxent", "--d", "2", "--out", str(m)]) == 0
    rho, dA, dB = load_density(m)
    assert rho[0, 3] == pytest.approx(0.5)


def test_measure(tmp_path, qubit_sic):
    st = tmp_path / "st.json"
    main(["state", "mixed", "--d", "2", "--out", str(st)])
    out = tmp_path / "p.csv"
    assert main(["measure", "--frame", str(qubit_sic), "--state", str(st), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "outcome,probability"
    assert [float(x.split(",")[1]) for x in lines[1:]] == pytest.approx([0.25] * 4)


def test_bounds_mixed_all_saturated(tmp_path, qubit_sic):
    out = tmp_path / "b.csv"
    assert main(["bounds", "--frame", str(qubit_sic), "--mixed", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "bound_name,alpha,bound_value,achieved,slack,saturated"
    rows = _rows(out)
    assert rows and all(r["saturated"] == "true" for r in rows)
    assert {r["alpha"] for r in rows if r["bound_name"] == "renyi"} >= {"3", "inf"}


def test_bounds_random_sweep(tmp_path):
    frame = tmp_path / "s.json"
    main(["frame", "gen", "--kind", "simplex", "--d", "2", "--out", str(frame)])
    out = tmp_path / "b.csv"
    rc = main(["bounds", "--frame", str(frame), "--random", "100", "--seed", "3",
               "--family", "ic,maxprob", "--family", "state_independent", "--out", str(out)])
    assert rc == 0
    rows = _rows(out)
    names = {r["bound_name"] for r in rows}
    assert {"index_of_coincidence", "max_prob", "collision_si"} <= names
    assert "tsallis" not in names
    assert all(float(r["slack"]) >= -1e-9 for r in rows)


def test_bounds_with_eta(tmp_path, qubit_sic):
    st = tmp_path / "st.json"
    main(["state", "random", "--d", "2", "--seed", "2", "--out", str(st)])
    out = tmp_path / "b.csv"
    assert main(["bounds", "--frame", str(qubit_sic), "--state", str(st), "--eta", "0.8",
                 "--alphas", "0.5,1,2", "--out", str(out)]) == 0
    eta_rows = [r for r in _rows(out) if r["bound_name"] == "tsallis_eta0.8"]
    assert [r["alpha"] for r in eta_rows] == ["0.5", "1", "2"]


def test_bounds_needs_a_state(tmp_path, qubit_sic):
    assert main(["bounds", "--frame", str(qubit_sic)]) == 1


def test_witness_g_on_phi_plus(tmp_path, qubit_sic):
    st = tmp_path / "phi.json"
    main(["state", "maxent", "--d", "2", "--out", str(st)])
    out = tmp_path / "w.csv"
    assert main(["witness", "--frame", str(qubit_sic), "--state", str(st), "--mode", "g", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "criterion,alpha,statistic,threshold,violated"
    (row,) = _rows(out)
    assert float(row["statistic"]) == pytest.approx(0.5, abs=1e-12)
    assert float(row["threshold"]) == pytest.approx(1 / 3, abs=1e-15)
    assert row["violated"] == "true"


def test_witness_separable_never_flagged(tmp_path, qubit_sic):
    for seed in range(5):
        st = tmp_path / f"sep{seed}.json"
        main(["state", "random", "--d", "2", "--separable", "4", "--seed", str(seed), "--out", str(st)])
        for mode in ("g", "convolution", "steer"):
            out = tmp_path / f"w{seed}{mode}.csv"
            assert main(["witness", "--frame", str(qubit_sic), "--state", str(st), "--mode", mode, "--out", str(out)]) == 0
            assert all(r["violated"] == "false" for r in _rows(out))


def test_steer_on_mixed(tmp_path, qubit_sic):
    st = tmp_path / "mm.json"
    main(["state", "mixed", "--d", "2", "--bipartite", "--out", str(st)])
    out = tmp_path / "s.csv"
    assert main(["steer", "--frame", str(qubit_sic), "--state", str(st), "--out", str(out)]) == 0
    rows = _rows(out)
    assert [r["alpha"] for r in rows] == ["0.5", "1", "1.5", "2"]
    assert all(r["violated"] == "false" for r in rows)


def test_stdout_carries_only_csv(capsys, qubit_sic):
    assert main(["bounds", "--frame", str(qubit_sic), "--mixed", "--out", "-"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "bound_name,alpha,bound_value,achieved,slack,saturated"
    assert all(line.count(",") == 5 for line in out)


def test_witness_dimension_mismatch(tmp_path, qubit_sic):
    st = tmp_path / "phi3.json"
    main(["state", "maxent", "--d", "3", "--out", str(st)])
    assert main(["witness", "--frame", str(qubit_sic), "--state", str(st)]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frame"],
        ["frame", "gen"],
        ["frame", "gen", "--kind", "spiral"],
        ["bounds", "--frame", "x.json", "--alphas", "0,-1"],
        ["bounds", "--frame", "x.json", "--eta", "1.5"],
    ],
)
def test_usage_errors_exit_1(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_missing_file_exit_1(tmp_path):
    assert main(["frame", "validate", "--frame", str(tmp_path / "nope.json")]) == 1


def test_inf_alpha_parsing(tmp_path, qubit_sic):
    out = tmp_path / "b.csv"
    assert main(["bounds", "--frame", str(qubit_sic), "--mixed", "--alphas", "inf", "--out", str(out)]) == 0
    renyi = [r for r in _rows(out) if r["bound_name"] == "renyi"]
    assert [r["alpha"] for r in renyi] == ["inf"]
    assert float(renyi[0]["bound_value"]) == pytest.approx(math.log(4))
