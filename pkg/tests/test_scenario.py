import numpy.testing as npt
import pytest

from regforge.errors import ValidationError
from regforge.scenario import load_plant_params, load_scenario, parse_kv_file


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestKvParsing:
    def test_comments_and_blanks(self, tmp_path):
        path = write(tmp_path, "a.cfg", "# header\n\nkey = 1  # trailing\nother = two\n")
        assert parse_kv_file(path) == {"key": "1", "other": "two"}

    def test_missing_equals_rejected(self, tmp_path):
        path = write(tmp_path, "a.cfg", "key value\n")
        with pytest.raises(ValidationError, match="a.cfg:1"):
            parse_kv_file(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = write(tmp_path, "a.cfg", "k = 1\nk = 2\n")
        with pytest.raises(ValidationError, match="duplicate"):
            parse_kv_file(path)


REFERENCE_TEXT = """
turbine.tau_t = 2
generator.k1 = 4
generator.n = 4
generator.l_f = 3
generator.r_f = 2
generator.l_a = 4
generator.r_a = 4
generator.r_l = 8
"""


class TestPlantParams:
    def test_reference_file(self, tmp_path):
        params = load_plant_params(write(tmp_path, "p.cfg", REFERENCE_TEXT))
        assert params.turbine.tau_t == 2.0
        assert params.generator.r_l == 8.0

    def test_missing_field_named(self, tmp_path):
        text = "\n".join(l for l in REFERENCE_TEXT.splitlines() if "tau_t" not in l)
        with pytest.raises(ValidationError, match="turbine.tau_t"):
            load_plant_params(write(tmp_path, "p.cfg", text))

    def test_nonpositive_value_named(self, tmp_path):
        text = REFERENCE_TEXT.replace("generator.r_l = 8", "generator.r_l = 0")
        with pytest.raises(ValidationError, match="generator.r_l"):
            load_plant_params(write(tmp_path, "p.cfg", text))

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="generator.frobnicator"):
            load_plant_params(
                write(tmp_path, "p.cfg", REFERENCE_TEXT + "generator.frobnicator = 1\n")
            )


class TestScenario:
    def test_preset_open_loop(self, tmp_path):
        scn = load_scenario(write(tmp_path, "s.cfg", (
            "name = demo\nplant.preset = exact\ncontroller.type = none\n"
            "sim.amplitude = 5\n"
        )))
        assert scn.name == "demo"
        assert scn.preset == "exact"
        assert scn.controller.kind == "none"
        assert scn.sim.duration == 20.0  # open-loop default
        assert scn.sim.input_amplitude == 5.0

    def test_lqr_scenario(self, tmp_path):
        scn = load_scenario(write(tmp_path, "s.cfg", (
            "plant.preset = paper-rounded\ncontroller.type = lqr\n"
            "controller.q_diag = 3 3\ncontroller.r = 5\nreference = 220\n"
        )))
        assert scn.name == "s"  # falls back to the file stem
        npt.assert_array_equal(scn.controller.q_diag, [3.0, 3.0])
        assert scn.controller.r == 5.0
        assert scn.reference == 220.0
        assert scn.sim.duration == 15.0  # closed-loop default

    def test_observer_scenario(self, tmp_path):
        scn = load_scenario(write(tmp_path, "s.cfg", (
            "plant.preset = paper-rounded\ncontroller.type = observer\n"
            "controller.q_diag = 8 8\ncontroller.r = 1\ncontroller.h = 2, -0.5\n"
            "controller.convention = paper-numeric\nreference = 220\n"
        )))
        npt.assert_array_equal(scn.controller.h, [2.0, -0.5])
        assert scn.controller.convention == "paper-numeric"

    def test_inline_physical_parameters(self, tmp_path):
        lines = "\n".join(
            "plant." + l for l in REFERENCE_TEXT.strip().splitlines()
        )
        scn = load_scenario(write(tmp_path, "s.cfg", lines + "\ncontroller.type = none\n"))
        npt.assert_allclose(scn.plant_tf.den.coeffs, [14.0, 35.0, 14.0])

    def test_explicit_tf(self, tmp_path):
        scn = load_scenario(write(tmp_path, "s.cfg", (
            "plant.tf.num = 18\nplant.tf.den = 1 2.5 1\ncontroller.type = none\n"
        )))
        npt.assert_allclose(scn.plant_model.a, [[-2.5, -1.0], [1.0, 0.0]])
        assert scn.plant_params is None

    def test_explicit_ss_controller(self, tmp_path):
        scn = load_scenario(write(tmp_path, "s.cfg", (
            "plant.preset = paper-rounded\ncontroller.type = ss\n"
            "controller.a = -4.272 -39; 1 9\ncontroller.b = 2; -0.5\n"
            "controller.c = 1.772 2\nreference = 220\n"
        )))
        npt.assert_allclose(scn.controller.model.a, [[-4.272, -39.0], [1.0, 9.0]])
        npt.assert_allclose(scn.controller.model.b, [[2.0], [-0.5]])

    def test_reference_without_controller_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="reference requires"):
            load_scenario(write(tmp_path, "s.cfg", (
                "plant.preset = exact\ncontroller.type = none\nreference = 220\n"
            )))

    def test_conflicting_plant_sources_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="more than once"):
            load_scenario(write(tmp_path, "s.cfg", (
                "plant.preset = exact\nplant.tf.num = 1\nplant.tf.den = 1 1\n"
                "controller.type = none\n"
            )))

    def test_unknown_keys_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="unknown scenario keys"):
            load_scenario(write(tmp_path, "s.cfg", (
                "plant.preset = exact\ncontroller.type = none\nsim.dy = 1\n"
            )))

    def test_zero_duration_guard(self, tmp_path):
        with pytest.raises(ValidationError, match="duration"):
            load_scenario(write(tmp_path, "s.cfg", (
                "plant.preset = exact\ncontroller.type = none\n"
                "sim.dt = 0.1\nsim.duration = 0.05\n"
            )))

    def test_missing_controller_field_named(self, tmp_path):
        with pytest.raises(ValidationError, match="controller.r"):
            load_scenario(write(tmp_path, "s.cfg", (
                "plant.preset = exact\ncontroller.type = lqr\ncontroller.q_diag = 1 1\n"
            )))

    def test_bad_outputs_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="outputs"):
            load_scenario(write(tmp_path, "s.cfg", (
                "plant.preset = exact\ncontroller.type = none\noutputs = csv pdf\n"
            )))

    def test_repo_scenarios_parse(self):
        from pathlib import Path

        base = Path(__file__).resolve().parent.parent / "scenarios"
        for name in ("open-loop.cfg", "paper-lqr.cfg", "paper-observer.cfg"):
            scn = load_scenario(base / name)
            assert scn.name
