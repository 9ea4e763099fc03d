import logging

import numpy as np
import pandas as pd
import pytest

import edgeworth.hermite
from edgeworth.__main__ import build_parser, main
from edgeworth.estimator import REPORT_COLUMNS
from edgeworth.report import CLT_COLUMNS
from edgeworth.selftest import run_checks

BROWNIAN = {
    "model": {"name": "brownian_identity"},
    "test_function": {"id": "monomial", "params": {"j": 3}},
    "n_list": [4, 16],
    "m": 16,
    "paths": 100,
    "seed": 1,
}

EXP_PAIR = {
    "model": {"name": "exp_pair", "params": {"a": 0.5, "b": 0.0, "c": 0.5, "d": 0.0}},
    "test_function": {"id": "cos_shifted", "params": {"a": 1.0, "c": 1.0}},
    "n_list": [4, 16, 64],
    "m": 8,
    "paths": 100,
    "seed": 7,
}


def _exit_code(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


class TestParser:
    def test_overrides(self):
        args = build_parser().parse_args(["run", "cfg.json", "--seed", "5", "--threads", "2", "--out", "x.csv"])
        assert (args.command, args.seed, args.threads, args.out) == ("run", 5, 2, "x.csv")

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_description(self):
        assert build_parser().description == "First-order expansion of discretization errors of Ito integrals"


class TestRun:
    def test_writes_report(self, write_config, tmp_path, caplog):
        out = tmp_path / "report.csv"
        assert _exit_code(["run", write_config(**BROWNIAN), "--out", str(out)]) == 0

        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# schema=1"
        assert lines[1] == ",".join(REPORT_COLUMNS)
        frame = pd.read_csv(out, comment="#")
        assert frame["n"].tolist() == [4, 16]
        assert frame["expansion_mean"].iloc[1] == 0.25
        # monomial rows are flagged as diagnostics
        assert "moment diagnostics" in caplog.text

    def test_thread_count_does_not_change_bytes(self, write_config, tmp_path):
        config = write_config(**EXP_PAIR)
        outputs = []
        for threads in (1, 4):
            out = tmp_path / f"report-{threads}.csv"
            assert _exit_code(["run", config, "--threads", str(threads), "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_seed_override_changes_results(self, write_config, tmp_path):
        config = write_config(**EXP_PAIR)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        _exit_code(["run", config, "--out", str(a)])
        _exit_code(["run", config, "--seed", "8", "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()

    def test_paths_below_minimum(self, write_config, caplog):
        assert _exit_code(["run", write_config(**{**BROWNIAN, "paths": 10})]) == 2
        assert "paths below minimum" in caplog.text

    def test_unknown_model(self, write_config, tmp_path):
        config = write_config(**{**BROWNIAN, "model": {"name": "heston"}})
        assert _exit_code(["run", config, "--out", str(tmp_path / "r.csv")]) == 3

    def test_invalid_model_parameters(self, write_config, tmp_path):
        config = write_config(**{**EXP_PAIR, "model": {"name": "exp_pair", "params": {"a": 0, "b": 0, "c": 1, "d": 0}}})
        assert _exit_code(["run", config, "--out", str(tmp_path / "r.csv")]) == 3

    def test_non_numeric_function_parameter(self, write_config, tmp_path, caplog):
        config = write_config(**{**EXP_PAIR, "test_function": {"id": "gauss_bump", "params": {"s": "wide"}}})
        assert _exit_code(["run", config, "--out", str(tmp_path / "r.csv")]) == 2
        assert "test_function.params.s" in caplog.text

    def test_non_numeric_model_parameter(self, write_config, tmp_path):
        config = write_config(**{**EXP_PAIR, "model": {"name": "exp_pair", "params": {"a": "x", "b": 0, "c": 1, "d": 0}}})
        assert _exit_code(["run", config, "--out", str(tmp_path / "r.csv")]) == 3

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        assert _exit_code(["run", str(path)]) == 2

    def test_missing_config_file(self, tmp_path):
        assert _exit_code(["run", str(tmp_path / "absent.json")]) == 2

    def test_numerical_failure(self, write_config, tmp_path, caplog):
        config = write_config(**{**EXP_PAIR, "model": {"name": "exp_pair", "params": {"a": 800.0, "b": 0, "c": 0.5, "d": 0}}})
        with np.errstate(all="ignore"):
            assert _exit_code(["run", config, "--out", str(tmp_path / "r.csv")]) == 4
        assert "ModelEvaluationError" in caplog.text


class TestCheckClt:
    def test_writes_clt_csv(self, write_config, tmp_path):
        out = tmp_path / "clt.csv"
        config = write_config(**{**BROWNIAN, "paths": 200})
        assert _exit_code(["check-clt", config, "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# schema=1"
        assert lines[1] == ",".join(CLT_COLUMNS)
        frame = pd.read_csv(out, comment="#")
        assert frame["n"].tolist() == [4, 16]
        np.testing.assert_allclose(frame["predicted"], 1.0 / 3.0, rtol=1e-12)

    def test_missing_model_key(self, write_config):
        config = write_config(test_function="cos_shifted", n_list=[4])
        assert _exit_code(["check-clt", config]) == 2

    def test_test_function_not_required(self, write_config, tmp_path):
        raw = {k: v for k, v in BROWNIAN.items() if k != "test_function"}
        config = write_config(**{**raw, "n_list": [4]})
        assert _exit_code(["check-clt", config, "--out", str(tmp_path / "clt.csv")]) == 0
        # run still needs it
        assert _exit_code(["run", config, "--out", str(tmp_path / "r.csv")]) == 2

    def test_pre_asymptotic_rows_are_not_judged(self, write_config, tmp_path, caplog):
        caplog.set_level(logging.INFO, logger="edgeworth")
        config = write_config(**{**BROWNIAN, "n_list": [4]})
        assert _exit_code(["check-clt", config, "--out", str(tmp_path / "clt.csv")]) == 0
        assert "pre-asymptotic" in caplog.text


class TestPlot:
    def _report(self, write_config, tmp_path):
        out = tmp_path / "report.csv"
        assert _exit_code(["run", write_config(**EXP_PAIR), "--out", str(out)]) == 0
        return out

    def test_points_and_series(self, write_config, tmp_path):
        csv = self._report(write_config, tmp_path)
        svg = tmp_path / "chart.svg"
        assert _exit_code(["plot", str(csv), str(svg)]) == 0
        text = svg.read_text(encoding="utf-8")
        assert text.count('<circle class="point"') == 6
        assert text.count('<line class="whisker"') == 6
        assert text.count("<polyline") == 2
        assert 'id="series-zeroth"' in text
        assert 'id="series-expansion"' in text

    def test_deterministic_bytes(self, write_config, tmp_path):
        csv = self._report(write_config, tmp_path)
        first, second = tmp_path / "one.svg", tmp_path / "two.svg"
        _exit_code(["plot", str(csv), str(first)])
        _exit_code(["plot", str(csv), str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_empty_csv(self, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_text("", encoding="utf-8")
        assert _exit_code(["plot", str(csv), str(tmp_path / "chart.svg")]) == 2

    def test_header_only_csv(self, tmp_path):
        csv = tmp_path / "header.csv"
        csv.write_text("# schema=1\n" + ",".join(REPORT_COLUMNS) + "\n", encoding="utf-8")
        assert _exit_code(["plot", str(csv), str(tmp_path / "chart.svg")]) == 2

    def test_wrong_header(self, tmp_path):
        csv = tmp_path / "other.csv"
        csv.write_text("n,value\n4,0.1\n", encoding="utf-8")
        assert _exit_code(["plot", str(csv), str(tmp_path / "chart.svg")]) == 2


class TestSelftest:
    def test_passes(self):
        assert _exit_code(["selftest", "--threads", "2"]) == 0

    def test_names_first_failing_check(self, monkeypatch, caplog):
        original = edgeworth.hermite.hermite_h
        monkeypatch.setattr(edgeworth.hermite, "hermite_h", lambda k, z, v: original(k, z, v) + 1e-3)
        assert _exit_code(["selftest", "--threads", "2"]) == 1
        assert "selftest failed: hermite recurrence" in caplog.text

    def test_thread_count_does_not_change_outcome(self):
        one = {r.name: r.passed for r in run_checks(1)}
        many = {r.name: r.passed for r in run_checks(8)}
        assert one == many
        assert all(one.values())
