import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from onpath.cli import EXIT_FAIL, EXIT_GUARD, EXIT_OK, EXIT_USAGE, main, run

FIG = Path(__file__).resolve().parent.parent / "figures"


def fig(n: int) -> str:
    return str(FIG / f"fig{n}.json")


class TestCheck:
    def test_failing_axiom_reports_cycle(self):
        code, rep = run(["check", fig(3), "--axiom", "cond2"])
        assert code == EXIT_FAIL
        assert rep["result"]["verdicts"][0]["witness"] == {"cycle": [0, 1]}

    def test_passing_axiom(self):
        assert run(["check", fig(3), "--axiom", "nnsarp"])[0] == EXIT_OK

    def test_report_envelope(self):
        _, rep = run(["check", fig(1), "--axiom", "cond1"])
        assert rep["schema"] == "onpath.report/1"
        digest = "sha256:" + hashlib.sha256(Path(fig(1)).read_bytes()).hexdigest()
        assert rep["input_digest"] == digest
        assert rep["command"] == ["check", fig(1), "--axiom", "cond1"]

    def test_malformed_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"periods": 2,\n ]')
        code, rep = run(["check", str(bad)])
        assert code == EXIT_USAGE and "line 2" in rep["result"]["message"]

    def test_invalid_dataset_lists_violations(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"periods": 2, "alternatives": [["a"], ["b"]],
                                   "observations": [{"budget": [[0, 0]], "choice": [0, 1]}]}))
        code, rep = run(["check", str(bad)])
        assert code == EXIT_USAGE and rep["result"]["violations"]

    def test_unknown_axiom_is_usage(self):
        assert run(["check", fig(1), "--axiom", "garp"])[0] == EXIT_USAGE

    def test_exhaustive_guard(self, tmp_path):
        obs = [{"budget": [[0, 0]], "choice": [0, 0]}] * 21
        path = tmp_path / "big.json"
        path.write_text(json.dumps({"periods": 2, "alternatives": [["a"], ["b"]], "observations": obs}))
        assert run(["check", str(path), "--axiom", "cond1", "--mode", "exhaustive"])[0] == EXIT_GUARD

    def test_all_on_two_periods(self):
        _, rep = run(["check", fig(3)])
        names = [v["axiom"] for v in rep["result"]["verdicts"]]
        assert "nnsarp" in names and "condition4" in names


class TestRationalizeAndOracle:
    def test_figure2_naive_witness(self):
        code, rep = run(["rationalize", fig(2), "--model", "naive"])
        assert code == EXIT_FAIL
        assert rep["result"]["witness"]["witness"] == {"subset": [0, 1]}

    def test_figure2_sophisticated_verified(self):
        code, rep = run(["rationalize", fig(2), "--model", "sophisticated"])
        assert code == EXIT_OK and rep["result"]["verified"] is True

    def test_figure4_strict_nash_cycle(self):
        code, rep = run(["rationalize", fig(4), "--model", "strict-nash"])
        assert code == EXIT_FAIL and "cycle" in rep["result"]["witness"]["witness"]

    def test_oracle_null_witness(self):
        code, rep = run(["oracle", fig(3), "--model", "sophisticated", "--class", "weak"])
        assert code == EXIT_FAIL and rep["result"]["witness"] is None

    def test_oracle_enumeration_guard(self):
        assert run(["oracle", fig(1), "--model", "naive", "--method", "enumerate"])[0] == EXIT_GUARD


class TestGen:
    def test_necessity_pipeline(self, tmp_path):
        out = tmp_path / "naive.json"
        code, _ = run(["gen", "--seed", "7", "--model", "naive", "--periods", "2", "--sizes", "2,3",
                       "--k", "3", "--out", str(out)])
        assert code == EXIT_OK
        assert run(["check", str(out), "--axiom", "nsarp,cond1"])[0] == EXIT_OK

    def test_periods_must_match_sizes(self):
        assert run(["gen", "--periods", "3", "--sizes", "2,2"])[0] == EXIT_USAGE

    def test_bad_config(self):
        assert run(["gen", "--k", "0"])[0] == EXIT_USAGE


class TestQhd:
    def test_repro_thm1(self):
        code, rep = run(["qhd", "repro", "thm1"])
        assert code == EXIT_OK and rep["result"]["delta_required"] == pytest.approx(2.0)

    def test_repro_thm2_fields(self):
        # the equilibrium checks fail, so the command exits 1
        code, rep = run(["qhd", "repro", "thm2"])
        res = rep["result"]
        assert code == (EXIT_OK if res["passed"] else EXIT_FAIL)
        got = {c["name"]: c["got"] for c in res["checks"]}
        assert got["soc_positive"] == pytest.approx(0.126, abs=1e-3)
        assert got["soc_negative_magnitude"] == pytest.approx(0.103, abs=1e-3)

    def test_equilibrium(self):
        code, rep = run(["qhd", "equilibrium", "--beta", "1", "--delta", "1", "--p", "1,1,1", "--m", "0.6"])
        assert code == EXIT_OK
        assert rep["result"]["equilibrium"]["x"] == pytest.approx([0.2, 0.2, 0.2], abs=1e-6)

    def test_focs_check_file(self, tmp_path):
        path = tmp_path / "q.json"
        path.write_text(json.dumps({"observations": [{"x": [0.1, 0.1, 0.1], "p": [4, 3, 1]},
                                                     {"x": [2, 1, 1], "p": [1, 1, 1]}]}))
        code, rep = run(["qhd", "focs-check", str(path)])
        assert code == EXIT_FAIL
        rows = rep["result"]["observations"]
        assert rows[0]["certificate"] is not None and rows[1]["certificate"] is None

    def test_gen_appendix(self, tmp_path):
        out = tmp_path / "a.json"
        code, rep = run(["qhd", "gen-appendixA", "--K", "10", "--out", str(out)])
        assert code == EXIT_OK
        assert len(json.loads(out.read_text())["observations"]) == 12

    def test_bad_qhd_file(self, tmp_path):
        path = tmp_path / "q.json"
        path.write_text('{"observations": [{"x": [1], "p": [1, 1, 1]}]}')
        assert run(["qhd", "exp-focs", str(path)])[0] == EXIT_USAGE


class TestOutput:
    def test_pretty_anywhere(self, capsys):
        assert main(["--pretty", "check", fig(3), "--axiom", "nnsarp"]) == EXIT_OK
        text = capsys.readouterr().out
        assert text.startswith("{\n  ")
        json.loads(text)

    def test_compact_by_default(self, capsys):
        main(["check", fig(3), "--axiom", "nnsarp"])
        assert "\n" not in capsys.readouterr().out.strip()

    @pytest.mark.parametrize("argv", [
        ["check", "FIG3", "--axiom", "all"],
        ["rationalize", "FIG2", "--model", "sophisticated"],
        ["oracle", "FIG4", "--model", "nash"],
        ["gen", "--seed", "3", "--sizes", "2,2,2", "--k", "2"],
        ["qhd", "repro", "appendixA", "--K", "8"],
    ])
    def test_echo_reproduces_payload(self, argv):
        argv = [fig(int(a[-1])) if a.startswith("FIG") else a for a in argv]
        _, first = run(argv)
        _, again = run(first["command"])
        assert json.dumps(again["result"], sort_keys=True) == json.dumps(first["result"], sort_keys=True)

    def test_usage_error_exit_code(self):
        assert run(["check"])[0] == EXIT_USAGE
        assert run(["frobnicate"])[0] == EXIT_USAGE

    def test_console_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "onpath.cli", "check", fig(3), "--axiom", "cond2"],
                              capture_output=True, text=True)
        assert proc.returncode == EXIT_FAIL
        assert json.loads(proc.stdout)["result"]["verdicts"][0]["holds"] is False
