import subprocess
import sys
from pathlib import Path

from regforge.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
SRC = Path(__file__).resolve().parent.parent / "src"


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestPlantCommand:
    def test_default_parameters(self, capsys):
        code, out = run(capsys, "plant")
        assert code == 0
        assert "256" in out and "18.2857" in out
        assert "A = [-2.5, -1; 1, 0]" in out
        assert "stability[plant]: stable" in out

    def test_params_file(self, capsys):
        code, out = run(capsys, "plant", "--params", str(SCENARIOS / "reference-params.cfg"))
        assert code == 0
        assert "efficiency         : 57.1429 %" in out

    def test_efficiency_discrepancy_warning(self, capsys):
        _, out = run(capsys, "plant")
        warning = [l for l in out.splitlines() if l.startswith("WARNING")]
        assert warning, "expected a published-values discrepancy warning"
        text = warning[0]
        assert "57.1429" in text and "76.92" in text
        assert "1828.57" in text and "1300" in text

    def test_missing_parameter_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "p.cfg"
        bad.write_text("generator.k1 = 4\n")
        code = main(["plant", "--params", str(bad)])
        err = capsys.readouterr().err
        assert code == 1
        assert "turbine.tau_t" in err

    def test_nonpositive_parameter_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "p.cfg"
        bad.write_text(
            (SCENARIOS / "reference-params.cfg").read_text().replace(
                "generator.r_l = 8", "generator.r_l = 0"
            )
        )
        code = main(["plant", "--params", str(bad)])
        err = capsys.readouterr().err
        assert code == 1
        assert "generator.r_l" in err


class TestSynthesizeCommand:
    def test_lqr_gains(self, capsys):
        code, out = run(capsys, "synthesize", "--scenario", str(SCENARIOS / "paper-lqr.cfg"))
        assert code == 0
        assert "K = [0.216583, 0.264911]" in out
        assert "CARE residual" in out

    def test_observer_report(self, capsys):
        code, out = run(capsys, "synthesize", "--scenario", str(SCENARIOS / "paper-observer.cfg"))
        assert code == 0
        assert "K = [1.772, 2]" in out
        assert "A = [-4.272, -39; 1, 9]" in out
        assert "stability[A-HC]: NOT Hurwitz" in out
        assert "closed-loop eigenvalues (unity feedback, reported not asserted)" in out
        assert any("not Hurwitz" in l for l in out.splitlines() if l.startswith("WARNING"))

    def test_paper_numeric_convention_matrices(self, capsys):
        code, out = run(
            capsys, "synthesize", "--scenario", str(SCENARIOS / "paper-observer.cfg"),
            "--convention", "paper-numeric",
        )
        assert code == 0
        assert "B = [2; -0.5]" in out
        assert "C = [1.772, 2]" in out

    def test_open_loop_scenario_rejected(self, capsys):
        code = main(["synthesize", "--scenario", str(SCENARIOS / "open-loop.cfg")])
        assert code == 1


class TestSimulateCommand:
    def test_open_loop_run(self, capsys, tmp_path):
        code, out = run(
            capsys, "simulate", "--scenario", str(SCENARIOS / "open-loop.cfg"),
            "--out", str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / "open-loop.csv").exists()
        assert "steady state       : 91.42" in out

    def test_closed_loop_lqr_run(self, capsys, tmp_path):
        code, out = run(
            capsys, "simulate", "--scenario", str(SCENARIOS / "paper-lqr.cfg"),
            "--out", str(tmp_path),
        )
        assert code == 0
        assert "reference prescaler" in out
        assert "steady state       : 219.9" in out

    def test_diverging_observer_run_exits_2(self, capsys, tmp_path):
        code, out = run(
            capsys, "simulate", "--scenario", str(SCENARIOS / "paper-observer.cfg"),
            "--out", str(tmp_path),
        )
        assert code == 2
        assert any("diverged" in l for l in out.splitlines() if l.startswith("WARNING"))

    def test_svg_format(self, capsys, tmp_path):
        code, _ = run(
            capsys, "simulate", "--scenario", str(SCENARIOS / "open-loop.cfg"),
            "--out", str(tmp_path), "--format", "both",
        )
        assert code == 0
        svg = (tmp_path / "open-loop.svg").read_text()
        assert svg.startswith("<svg ")

    def test_missing_scenario_file_exit_3(self, capsys, tmp_path):
        code = main(["simulate", "--scenario", str(tmp_path / "nope.cfg")])
        assert code == 3


class TestMetricsCommand:
    def test_round_trip_metrics(self, capsys, tmp_path):
        run(capsys, "simulate", "--scenario", str(SCENARIOS / "paper-lqr.cfg"),
            "--out", str(tmp_path))
        code, out = run(capsys, "metrics", str(tmp_path / "paper-lqr.csv"))
        assert code == 0
        assert "settling time" in out
        assert "steady state       : 219.9" in out


class TestReproduceCommand:
    def test_figure4_both_presets(self, capsys, tmp_path):
        code, out = run(capsys, "reproduce", "--figure", "4", "--out", str(tmp_path))
        assert code == 0
        assert (tmp_path / "figure4-exact.csv").exists()
        assert (tmp_path / "figure4-paper-rounded.csv").exists()
        assert "91.42" in out and "89.99" in out

    def test_figure4_deterministic(self, capsys, tmp_path):
        run(capsys, "reproduce", "--figure", "4", "--out", str(tmp_path / "a"))
        run(capsys, "reproduce", "--figure", "4", "--out", str(tmp_path / "b"))
        for name in ("figure4-exact.csv", "figure4-paper-rounded.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_figure5_power_columns(self, capsys, tmp_path):
        code, out = run(capsys, "reproduce", "--figure", "5", "--preset", "exact",
                        "--out", str(tmp_path))
        assert code == 0
        header = (tmp_path / "figure5-exact.csv").read_text().splitlines()[0]
        assert header == "t,u,y,x1,x2,i_a,e_g,p_out,p_in"
        assert "output power at steady state: 1044." in out

    def test_figure7_warning_states_published_values(self, capsys, tmp_path):
        _, out = run(capsys, "reproduce", "--figure", "7", "--preset", "exact",
                     "--out", str(tmp_path))
        warning = [l for l in out.splitlines() if l.startswith("WARNING")][0]
        assert "76.92" in warning and "57.1429" in warning and "1300" in warning

    def test_figure8_all_legs(self, capsys, tmp_path):
        code, out = run(capsys, "reproduce", "--figure", "8", "--preset", "paper-rounded",
                        "--out", str(tmp_path))
        assert code == 0
        assert (tmp_path / "figure8-lqr-paper-rounded.csv").exists()
        assert (tmp_path / "figure8-observer-published-paper-rounded.csv").exists()
        assert (tmp_path / "figure8-observer-stable-paper-rounded.csv").exists()
        assert "K = [0.216583, 0.264911]" in out
        assert "K = [1.772, 2]" in out
        assert any(
            "not reproducible" in l for l in out.splitlines() if l.startswith("WARNING")
        )

    def test_figure8_lqr_only(self, capsys, tmp_path):
        code, out = run(capsys, "reproduce", "--figure", "8", "--controller", "lqr",
                        "--preset", "paper-rounded", "--out", str(tmp_path))
        assert code == 0
        assert not (tmp_path / "figure8-observer-published-paper-rounded.csv").exists()
        assert "settling time      : 7.09" in out

    def test_env_var_out_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("REGFORGE_OUT", str(tmp_path / "envout"))
        code, _ = run(capsys, "reproduce", "--figure", "4", "--preset", "exact")
        assert code == 0
        assert (tmp_path / "envout" / "figure4-exact.csv").exists()

    def test_bad_figure_rejected(self, capsys):
        code = main(["reproduce", "--figure", "9"])
        assert code == 1


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        env = {"PYTHONPATH": str(SRC), "REGFORGE_OUT": str(tmp_path)}
        proc = subprocess.run(
            [sys.executable, "-m", "regforge", "plant"],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0
        assert "steady state at 5 g/s" in proc.stdout
