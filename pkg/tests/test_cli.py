"""Command-line front-end: artifacts, exit codes, determinism."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dirapprox.cli import main
from dirapprox.laurent import rational_from_json_dict
from dirapprox.series import DirichletPolynomial, evaluate, seminorm_sigma


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


TWO_POW = {"coefficients": [[0, 0], [1, 0]]}  # 2^{-s}
DISC_EXP = {
    "set": {"kind": "disc", "center": [-1, 0], "radius": 0.5},
    "target": {"kind": "named", "name": "exp"},
}
ANNULUS = {"kind": "annulus", "center": [0, 0], "r_inner": 1, "r_outer": 2}


class TestEval:
    def test_prints_half_for_two_power_at_one(self, tmp_path, capsys):
        src = write(tmp_path / "p.json", {**TWO_POW, "points": [[1, 0]]})
        assert main(["eval", "--input", src]) == 0
        assert capsys.readouterr().out.strip() == "0.5"

    def test_complex_points_and_output_file(self, tmp_path, capsys):
        pts = [[0.5, 1.0], [2.0, -3.0]]
        src = write(tmp_path / "p.json", {**TWO_POW, "points": pts})
        out = tmp_path / "vals.json"
        assert main(["eval", "--input", src, "--output", str(out)]) == 0
        vals = json.loads(out.read_text())["values"]
        p = DirichletPolynomial.from_pairs(TWO_POW["coefficients"])
        for (re, im), (pre, pim) in zip(pts, vals):
            v = evaluate(p, complex(re, im))
            assert abs(complex(pre, pim) - v) <= 1e-15

    def test_eval_consumes_fit_artifact(self, tmp_path, capsys):
        src = write(tmp_path / "in.json", DISC_EXP)
        fit_out = tmp_path / "fit.json"
        assert main(
            ["fit", "--input", src, "--degree", "8", "--density", "0.03",
             "--output", str(fit_out)]
        ) == 0
        merged = json.loads(fit_out.read_text())
        merged["points"] = [[-1.0, 0.0]]
        src2 = write(tmp_path / "fitted.json", merged)
        assert main(["eval", "--input", src2]) == 0
        value = complex(float(capsys.readouterr().out.split("\n")[-2].split("+")[0]), 0)
        assert abs(value.real - math.exp(-1)) <= 1e-2


class TestPolynomialCommands:
    def test_shift_then_eval_matches_translated_point(self, tmp_path, capsys):
        src = write(tmp_path / "p.json", TWO_POW)
        shifted = tmp_path / "q.json"
        assert main(["shift", "--input", src, "--sigma", "0.5", "--output", str(shifted)]) == 0
        merged = json.loads(shifted.read_text())
        merged["points"] = [[0.5, 0]]
        assert main(["eval", "--input", write(tmp_path / "q2.json", merged)]) == 0
        printed = float(capsys.readouterr().out.strip().split("\n")[-1])
        assert printed == pytest.approx(0.5, abs=1e-12)

    def test_seminorm_prints_the_module_value(self, tmp_path, capsys):
        coeffs = [[1, 0], [0.5, 0.5], [0, -2]]
        src = write(tmp_path / "p.json", {"coefficients": coeffs})
        assert main(["seminorm", "--input", src, "--sigma", "0.7"]) == 0
        p = DirichletPolynomial.from_pairs(coeffs)
        assert float(capsys.readouterr().out.strip()) == pytest.approx(
            seminorm_sigma(p, 0.7), abs=1e-16
        )

    def test_supnorm_artifact_brackets_the_value(self, tmp_path, capsys):
        src = write(tmp_path / "p.json", TWO_POW)
        out = tmp_path / "sup.json"
        assert main(["supnorm", "--input", src, "--sigma", "0", "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["value"] <= rep["upper_bound"]
        assert rep["value"] == pytest.approx(1.0, abs=1e-6)


class TestAbscissa:
    def test_all_ones_rule_lands_near_one(self, tmp_path):
        src = write(tmp_path / "r.json", {"rule": {"kind": "all-ones"}, "truncation": 20000})
        out = tmp_path / "a.json"
        assert main(["abscissa", "--input", src, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert abs(rep["sigma_c_estimate"] - 1.0) <= 0.1
        assert rep["ordering_holds"] is True

    def test_explicit_list_rule_reports_sentinels(self, tmp_path):
        src = write(
            tmp_path / "r.json",
            {"rule": {"kind": "explicit-list", "coefficients": [[1, 0], [2, 0]]}},
        )
        out = tmp_path / "a.json"
        assert main(["abscissa", "--input", src, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["sigma_c_estimate"] == "neg_inf"

    def test_unknown_rule_kind_is_invalid_input(self, tmp_path):
        src = write(tmp_path / "r.json", {"rule": {"kind": "named-custom"}})
        assert main(["abscissa", "--input", src]) == 2


class TestBohr:
    def test_lift_artifact_matches_nonzero_terms(self, tmp_path):
        coeffs = [[1, 0], [0.5, 0], [0.25, 0], [0, 0], [0.1, 0], [0.05, 0]]
        src = write(tmp_path / "p.json", {"coefficients": coeffs})
        out = tmp_path / "lift.json"
        assert main(["bohr-lift", "--input", src, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["variable_count"] == 3  # primes 2, 3, 5
        assert len(rep["terms"]) == 5
        assert {tuple(t["exponents"]) for t in rep["terms"]} == {
            (), (1,), (0, 1), (0, 0, 1), (1, 1),
        }

    def test_gap_check_passes_for_single_prime(self, tmp_path):
        src = write(tmp_path / "p.json", TWO_POW)
        out = tmp_path / "gap.json"
        assert main(["bohr-check", "--input", src, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["within_tolerance"] is True
        assert rep["relative_gap"] <= 0.02

    def test_gap_check_exit_3_when_tolerance_unreachable(self, tmp_path):
        # complex phases keep the two sups off the sampling grids, so the
        # estimates agree to ~1e-6 but never to 1e-14
        src = write(
            tmp_path / "p.json",
            {"coefficients": [[1, 0], [0.8, 0.2], [0.5, -0.4]]},
        )
        assert main(["bohr-check", "--input", src, "--tol", "1e-14"]) == 3


class TestFitCommands:
    def test_fit_artifact_and_determinism(self, tmp_path):
        src = write(tmp_path / "in.json", DISC_EXP)
        out1, out2 = tmp_path / "f1.json", tmp_path / "f2.json"
        for out in (out1, out2):
            assert main(
                ["fit", "--input", src, "--degree", "8", "--density", "0.03",
                 "--output", str(out)]
            ) == 0
        assert out1.read_bytes() == out2.read_bytes()
        rep = json.loads(out1.read_text())
        assert rep["converged"] is True
        assert rep["minimax_error"] <= 1e-4

    def test_constrained_fit_with_inactive_budget(self, tmp_path):
        spec = {
            "set": {"kind": "rectangle", "corner_lo": [-2, -1], "corner_hi": [-0.5, 1]},
            "target": {"kind": "named", "name": "constant", "constant": [1, 0]},
            "base": [[0, 0]],
        }
        src = write(tmp_path / "in.json", spec)
        out = tmp_path / "c.json"
        code = main(
            ["fit-constrained", "--input", src, "--degree", "6", "--sigma", "1",
             "--eps", "1000000", "--density", "0.05", "--output", str(out)]
        )
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["minimax_error"] <= 1e-8
        assert rep["converged"] is True

    def test_convergence_study_csv(self, tmp_path, capsys):
        src = write(tmp_path / "in.json", {**DISC_EXP, "degrees": [5, 10, 20]})
        out = tmp_path / "study.csv"
        assert main(
            ["convergence-study", "--input", src, "--density", "0.03",
             "--output", str(out)]
        ) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "N,minimax_error"
        errs = [float(line.split(",")[1]) for line in lines[1:]]
        assert len(errs) == 3
        assert all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))


class TestLaurentCommands:
    def test_identity_on_annulus_splits_cleanly(self, tmp_path):
        spec = {"set": ANNULUS, "function": {"kind": "named", "name": "identity"},
                "anchors": [[0, 0]]}
        src = write(tmp_path / "in.json", spec)
        out = tmp_path / "l.json"
        assert main(["laurent", "--input", src, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["residual"] <= 1e-8
        assert rep["warning"] is False
        assert rep["hole_pieces"] == 1

    def test_rational_fit_artifact_round_trips(self, tmp_path):
        spec = {"set": ANNULUS, "function": {"kind": "named", "name": "exp"},
                "anchors": [[0, 0]], "degrees": [8, 8]}
        src = write(tmp_path / "in.json", spec)
        out = tmp_path / "r.json"
        assert main(["rational-fit", "--input", src, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        r = rational_from_json_dict(rep["rational"])
        assert len(r.parts) == 1
        assert np.isfinite(rep["sup_error"])


UNIVERSAL_FAMILY = {
    "family": [
        {"target": {"kind": "named", "name": "constant", "constant": [0, 0]},
         "compact_index": 1, "tol": 0.1, "label": "zero"},
    ]
}


class TestUniversalCommands:
    def test_build_then_verify_round_trip(self, tmp_path):
        src = write(tmp_path / "fam.json", UNIVERSAL_FAMILY)
        sched = tmp_path / "sched.json"
        assert main(["universal-build", "--input", src, "--output", str(sched)]) == 0
        verify_in = write(
            tmp_path / "vin.json",
            {"schedule": json.loads(sched.read_text()),
             "family": UNIVERSAL_FAMILY["family"]},
        )
        out = tmp_path / "verify.json"
        assert main(["universal-verify", "--input", verify_in, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["pass"] is True

    def test_unreachable_stage_exits_3_with_partial_schedule(self, tmp_path):
        fam = {
            "family": UNIVERSAL_FAMILY["family"] + [
                {"target": {"kind": "named", "name": "constant", "constant": [1, 0]},
                 "compact_index": 1, "tol": 1e-6, "label": "flat"},
            ],
            "options": {"block_steps": [1, 2, 5]},
        }
        src = write(tmp_path / "fam.json", fam)
        sched = tmp_path / "sched.json"
        assert main(["universal-build", "--input", src, "--output", str(sched)]) == 3
        rep = json.loads(sched.read_text())
        assert rep["cuts"] == [1]
        assert rep["records"][-1]["converged"] is False

    def test_unknown_option_key_is_invalid_input(self, tmp_path):
        fam = {**UNIVERSAL_FAMILY, "options": {"mystery": 1}}
        src = write(tmp_path / "fam.json", fam)
        assert main(["universal-build", "--input", src]) == 2


class TestChordalCommand:
    def test_writes_json_and_csv(self, tmp_path, capsys):
        src = write(tmp_path / "in.json", {"interval": [2, 3], "ladder": [10, 100, 1000]})
        out = tmp_path / "chord.json"
        assert main(["chordal-check", "--input", src, "--eps", "0.01",
                     "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["n0"] == 100
        csv_lines = (tmp_path / "chord.csv").read_text().strip().split("\n")
        assert csv_lines[0] == "N,chi_sup_error"
        assert len(csv_lines) == 4
        assert [float(line.split(",")[1]) for line in csv_lines[1:]] == rep["errors"]

    def test_byte_identical_across_runs(self, tmp_path):
        src = write(tmp_path / "in.json", {"interval": [-1, 2], "ladder": [10, 100]})
        outs = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.json"
            assert main(["chordal-check", "--input", src, "--eps", "0.2",
                         "--output", str(out)]) == 0
            outs.append((out.read_bytes(), (tmp_path / f"{name}.csv").read_bytes()))
        assert outs[0] == outs[1]

    def test_missing_output_is_invalid_input(self, tmp_path):
        src = write(tmp_path / "in.json", {"interval": [2, 3], "ladder": [10]})
        assert main(["chordal-check", "--input", src, "--eps", "0.01"]) == 2

    def test_unreached_target_exits_3(self, tmp_path, monkeypatch):
        import dirapprox.chordal as chordal_mod

        report = chordal_mod.ConvergenceReport(
            interval=(2.0, 3.0), target_eps=1e-12, ladder=(10,), errors=(0.02,),
            n0=None, n0_error=None, n0_source=None, grid_per_unit=2000.0,
            grid_points=2001, grid_converged=True, searched_to=10_000_000,
        )
        monkeypatch.setattr(
            chordal_mod, "zeta_chordal_convergence_check", lambda *a, **k: report
        )
        src = write(tmp_path / "in.json", {"interval": [2, 3], "ladder": [10]})
        out = tmp_path / "chord.json"
        assert main(["chordal-check", "--input", src, "--eps", "1e-12",
                     "--output", str(out)]) == 3
        assert json.loads(out.read_text())["n0"] is None


class TestExitCodes:
    def test_missing_input_flag(self):
        assert main(["seminorm", "--sigma", "1"]) == 2

    def test_nonexistent_input_file(self, tmp_path):
        assert main(["eval", "--input", str(tmp_path / "nope.json")]) == 2

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["eval", "--input", str(bad)]) == 2

    def test_missing_required_field(self, tmp_path):
        src = write(tmp_path / "p.json", {"coefficients": [[1, 0]]})
        assert main(["eval", "--input", src]) == 2  # no points

    def test_bad_degree_is_invalid_input(self, tmp_path):
        src = write(tmp_path / "in.json", DISC_EXP)
        assert main(["fit", "--input", src, "--degree", "-3"]) == 2

    def test_missing_required_flag_exits_2(self, tmp_path):
        src = write(tmp_path / "in.json", DISC_EXP)
        with pytest.raises(SystemExit) as exc:
            main(["fit", "--input", src])
        assert exc.value.code == 2

    def test_unwritable_output_is_invalid_input(self, tmp_path):
        src = write(tmp_path / "p.json", {**TWO_POW, "points": [[1, 0]]})
        out = tmp_path / "no" / "such" / "dir" / "x.json"
        assert main(["eval", "--input", src, "--output", str(out)]) == 2


class TestThreadCap:
    def test_cap_exported_to_blas_variables(self, tmp_path, monkeypatch):
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            monkeypatch.delenv(var, raising=False)
        monkeypatch.setenv("DIRAPPROX_THREADS", "2")
        src = write(tmp_path / "p.json", {**TWO_POW, "points": [[1, 0]]})
        assert main(["eval", "--input", src]) == 0
        import os

        assert os.environ["OMP_NUM_THREADS"] == "2"
        assert os.environ["OPENBLAS_NUM_THREADS"] == "2"

    def test_specific_variable_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OMP_NUM_THREADS", "4")
        monkeypatch.setenv("DIRAPPROX_THREADS", "2")
        src = write(tmp_path / "p.json", {**TWO_POW, "points": [[1, 0]]})
        assert main(["eval", "--input", src]) == 0
        import os

        assert os.environ["OMP_NUM_THREADS"] == "4"

    def test_invalid_cap_is_invalid_input(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DIRAPPROX_THREADS", "zero")
        src = write(tmp_path / "p.json", {**TWO_POW, "points": [[1, 0]]})
        assert main(["eval", "--input", src]) == 2
        monkeypatch.setenv("DIRAPPROX_THREADS", "-1")
        assert main(["eval", "--input", src]) == 2


class TestConsoleScript:
    def test_installed_entry_point(self, tmp_path):
        src = write(tmp_path / "p.json", {**TWO_POW, "points": [[1, 0]]})
        proc = subprocess.run(
            ["dirapprox", "eval", "--input", src],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "0.5"

    def test_diagnostics_go_to_stderr(self, tmp_path):
        proc = subprocess.run(
            ["dirapprox", "eval", "--input", str(tmp_path / "ghost.json")],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 2
        assert "error:" in proc.stderr
        assert proc.stdout == ""

    def test_module_invocation(self, tmp_path):
        src = write(tmp_path / "p.json", {**TWO_POW, "points": [[1, 0]]})
        proc = subprocess.run(
            [sys.executable, "-m", "dirapprox.cli", "eval", "--input", src],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "0.5"
