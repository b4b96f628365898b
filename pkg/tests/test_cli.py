import json

import numpy as np
import pytest

from qfiroof.cli import build_operator, build_state, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# figure commands
# ---------------------------------------------------------------------------

def test_figure_rs_rows_and_summary(capsys):
    code, out, err = run_cli(capsys, "figure-rs", "--samples", "4", "--seed", "11",
                             "--restarts", "2", "--local-steps", "80")
    assert code == 0 and err == ""
    lines = out.strip().splitlines()
    assert lines[0] == "sample,lhs_minus_rhs_rs,lhs_minus_rhs_k,lhs_minus_rhs_roof"
    assert len(lines) == 6  # header + 4 samples + summary
    assert lines[-1].startswith("summary,4,")
    for line in lines[1:-1]:
        fields = line.split(",")
        rs, k, roof = map(float, fields[1:])
        # tighter bounds leave less slack, never negative beyond tolerance
        assert roof <= k + 1e-9
        assert k <= rs + 1e-9
        assert roof >= -1e-9


def test_figure_rs_deterministic(capsys):
    args = ("figure-rs", "--samples", "2", "--seed", "7",
            "--restarts", "2", "--local-steps", "60")
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_figure_planar_anchor_rows(capsys):
    code, out, _ = run_cli(capsys, "figure-planar", "--j-list", "0.5,1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "j,fq_jz,b_fq,reference_2j"
    row_half = lines[1].split(",")
    assert float(row_half[2]) == pytest.approx(1.0, abs=1e-9)
    row_one = lines[2].split(",")
    assert float(row_one[2]) == pytest.approx(9 / 4, abs=1e-9)
    for line in lines[1:]:
        _, fq, bfq, _ = map(float, line.split(","))
        assert bfq <= fq + 1e-9


def test_figure_spinsq_limits(capsys):
    code, out, _ = run_cli(capsys, "figure-spinsq", "--j", "10",
                           "--lambda-min", "0.1", "--lambda-max", "1e6",
                           "--lambda-points", "7")
    assert code == 0
    lines = out.strip().splitlines()
    rows = [list(map(float, line.split(","))) for line in lines[1:]]
    for _, fq, bfq, ref in rows:
        assert bfq <= fq + 1e-9
        assert ref == 20.0
    # at the stiffest pinning both sides sit at the 2j reference
    assert rows[-1][1] == pytest.approx(20.0, rel=0.01)
    assert rows[-1][2] == pytest.approx(20.0, rel=0.01)


def test_figure_json_format(capsys):
    code, out, _ = run_cli(capsys, "figure-planar", "--j-list", "0.5", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload[0]["j"] == "0.5"


# ---------------------------------------------------------------------------
# check / roof / state-factory
# ---------------------------------------------------------------------------

def test_check_duan_product_coherent(capsys):
    spec = json.dumps({"constructor": "coherent_product",
                       "params": {"alpha1": [0.3, 0.0], "alpha2": [0.0, 0.4]}})
    code, out, _ = run_cli(capsys, "check", "duan", "--state", spec, "--cutoff", "40")
    assert code == 0
    payload = json.loads(out)
    assert payload["lhs"] == pytest.approx(2.0, abs=1e-6)
    assert payload["violated"] is False


def test_check_rs_on_random_qutrit(capsys):
    spec = json.dumps({"constructor": "random", "params": {"dim": 3, "seed": 4}})
    code, out, _ = run_cli(capsys, "check", "rs", "--state", spec)
    assert code == 0
    payload = json.loads(out)
    assert payload["slack"] >= -1e-9
    assert set(payload) == {"name", "lhs", "rhs", "slack", "violated", "meta"}


def test_check_two_spin_singlet(capsys):
    spec = json.dumps({"constructor": "singlet", "params": {"j": 0.5}})
    code, out, _ = run_cli(capsys, "check", "two-spin", "--state", spec,
                           "--j1", "0.5", "--j2", "0.5")
    assert code == 0
    payload = json.loads(out)
    assert payload["violated"] is True
    assert payload["meta"]["fq_sum_minus"] == pytest.approx(12.0, abs=1e-9)


def test_roof_pure_state_min_is_variance(capsys):
    spec = json.dumps({"constructor": "spin_coherent_polar",
                       "params": {"j": 1.0, "theta": 0.8, "phi": 0.3}})
    code, out, _ = run_cli(capsys, "roof", "--state", spec, "--ops", "jz",
                           "--direction", "min")
    assert code == 0
    payload = json.loads(out)
    assert payload["converged"] is True
    assert len(payload["decomposition"]) == 1
    # pure state: roof equals the plain variance
    from qfiroof import make_spin_algebra, spin_coherent_polar, variance
    psi = spin_coherent_polar(1.0, 0.8, 0.3)
    assert payload["value"] == pytest.approx(variance(psi, make_spin_algebra(1).jz), abs=1e-12)


def test_state_factory_roundtrip(capsys):
    spec = json.dumps({"constructor": "maximally_mixed", "params": {"dim": 3}})
    code, out, _ = run_cli(capsys, "state-factory", spec)
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "mixed"
    assert payload["dim"] == 3
    mat = np.array(payload["re"]).reshape(3, 3)
    assert np.allclose(mat, np.eye(3) / 3)


def test_check_json_determinism(capsys):
    spec = json.dumps({"constructor": "random", "params": {"dim": 3, "seed": 21}})
    args = ("check", "improved-rs", "--state", spec, "--seed", "5",
            "--restarts", "2", "--local-steps", "60")
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


# ---------------------------------------------------------------------------
# error handling
# ---------------------------------------------------------------------------

def test_unknown_constructor_gives_json_error(capsys):
    code, out, err = run_cli(capsys, "check", "rs", "--state",
                             json.dumps({"constructor": "nope"}))
    assert code == 1
    assert out == ""
    payload = json.loads(err)
    assert "nope" in payload["message"]


def test_malformed_state_spec(capsys):
    code, _, err = run_cli(capsys, "check", "rs", "--state", "{not json")
    assert code == 1
    assert json.loads(err)["error"] == "JSONDecodeError"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run_cli(capsys, "figure-planar", "--j-list", "0.5",
                           "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("j,fq_jz")


# ---------------------------------------------------------------------------
# spec helpers
# ---------------------------------------------------------------------------

def test_build_operator_named_spin():
    op = build_operator("jz", dim=3, cutoff=40)
    assert np.allclose(np.diag(op.mat).real, [1, 0, -1])


def test_build_operator_inline_matrix():
    op = build_operator(json.dumps({"dim": 2, "re": [0, 1, 1, 0], "im": [0, 0, 0, 0]}),
                        dim=2, cutoff=40)
    assert np.allclose(op.mat, [[0, 1], [1, 0]])


def test_build_operator_two_mode_quadratures():
    op = build_operator("x2", dim=16, cutoff=4)
    assert op.dim == 16
    with pytest.raises(ValueError):
        build_operator("x", dim=16, cutoff=4)


def test_build_state_inline_matrix():
    state = build_state({"matrix": {"dim": 2, "kind": "pure",
                                    "re": [1, 0], "im": [0, 0]}}, cutoff=40)
    assert np.allclose(state.vec, [1, 0])
