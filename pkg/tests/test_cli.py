import numpy as np
import pytest

from pursuit_lab import cli
from pursuit_lab.errors import ConfigError

CONFIG_DIR = __file__.rsplit("/", 2)[0] + "/configs"


class TestAngleParsing:
    @pytest.mark.parametrize("text,expected", [
        ("11/12pi", 11 * np.pi / 12),
        ("pi", np.pi),
        ("-1/2pi", -np.pi / 2),
        ("0.25pi", 0.25 * np.pi),
        ("0.785", 0.785),
        ("-pi", -np.pi),
    ])
    def test_values(self, text, expected):
        assert abs(cli.parse_angle(text) - expected) < 1e-15

    def test_bad_value_names_key(self):
        with pytest.raises(ConfigError, match="alpha"):
            cli.parse_angle("pie", key="alpha")

    def test_list_with_repeats(self):
        values = cli.parse_angle_list("1/6pi*3, 1/7pi*3, 1/8pi*4", 10,
                                      "alpha")
        assert len(values) == 10
        assert abs(values[0] - np.pi / 6) < 1e-15
        assert abs(values[5] - np.pi / 7) < 1e-15
        assert abs(values[9] - np.pi / 8) < 1e-15

    def test_list_broadcast_and_mismatch(self):
        assert len(cli.parse_angle_list("0.3", 5, "alpha")) == 5
        with pytest.raises(ConfigError, match="alpha"):
            cli.parse_angle_list("0.1, 0.2", 5, "alpha")


class TestParseConfig:
    def test_fig2_config(self):
        cfg = cli.parse_config(f"{CONFIG_DIR}/fig2.cfg", "simulate")
        assert cfg.params.n == 10
        assert cfg.params.lam == 0.5
        assert cfg.params.mu == 1.0
        assert abs(cfg.params.alpha[0] - np.pi / 6) < 1e-15
        assert abs(cfg.params.alpha[9] - np.pi / 8) < 1e-15
        assert cfg.T == 100.0 and cfg.dt == 0.01

    def test_unit_lambda_rejected(self):
        with pytest.raises(ConfigError, match="lambda"):
            cli.parse_config(f"{CONFIG_DIR}/fig2.cfg", "simulate",
                             overrides=["lambda=1.0"])

    def test_missing_k_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[system]\nn = 3\nmu = 1\nlambda = 0.5\n"
                        "alpha = 1/6pi\nalpha0 = 1/4pi\n\n[pure-shape]\n"
                        "t = 1\n")
        with pytest.raises(ConfigError, match="'k'"):
            cli.parse_config(path, "pure-shape")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="wibble"):
            cli.parse_config(f"{CONFIG_DIR}/fig2.cfg", "simulate",
                             overrides=["wibble=3"])

    def test_mode_assumption_validation(self):
        # stability needs a common alpha; fig2's alpha list is mixed
        with pytest.raises(ConfigError, match="alpha"):
            cli.parse_config(f"{CONFIG_DIR}/fig2.cfg", "stability",
                             overrides=["stability.m=1"])

    def test_seed_override_wins(self):
        cfg = cli.parse_config(f"{CONFIG_DIR}/reference.cfg", "shape-sim",
                               seed=77)
        assert cfg.seed == 77


class TestRun:
    def test_equilibria_mode_report(self, tmp_path):
        cfg = cli.parse_config(f"{CONFIG_DIR}/reference.cfg", "equilibria",
                               out_dir=tmp_path)
        artifacts = cli.run(cfg)
        report = (tmp_path / "equilibria.txt").read_text()
        assert "0.828427" in report          # the circling radius
        assert "1.0471975512" in report      # kappa = pi/3
        assert (tmp_path / "manifest.txt").exists()
        assert all(p.exists() for p in artifacts)

    def test_stability_mode_artifacts(self, tmp_path):
        cfg = cli.parse_config(f"{CONFIG_DIR}/reference.cfg", "stability",
                               out_dir=tmp_path)
        cli.run(cfg)
        report = (tmp_path / "stability.txt").read_text()
        assert "verdict: PASS" in report
        rows = [ln for ln in
                (tmp_path / "spectrum.csv").read_text().splitlines()
                if ln and not ln.startswith("#")]
        assert len(rows) == 1 + 15  # header plus 5n eigenvalues
        assert sum("constraint" in r for r in rows) == 7
        assert sum("informative" in r for r in rows) == 8

    def test_sweep_mode_rows(self, tmp_path):
        cfg = cli.parse_config(f"{CONFIG_DIR}/sweep_alpha0.cfg", "sweep",
                               out_dir=tmp_path)
        cli.run(cfg)
        rows = [ln for ln in
                (tmp_path / "sweep.csv").read_text().splitlines()
                if ln and not ln.startswith("#")]
        assert len(rows) == 1 + 64
        # verdict column is 0/1 and order follows the sample index
        indices = [int(r.split(",")[0]) for r in rows[1:]]
        assert indices == list(range(64))

    def test_deterministic_outputs(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            cfg = cli.parse_config(f"{CONFIG_DIR}/reference.cfg",
                                   "shape-sim", out_dir=out,
                                   overrides=["t=0.5"])
            cli.run(cfg)
        assert (out_a / "shape.csv").read_bytes() \
            == (out_b / "shape.csv").read_bytes()
        assert (out_a / "manifest.txt").read_bytes() \
            == (out_b / "manifest.txt").read_bytes()

    def test_portrait_mode(self, tmp_path):
        cfg = cli.parse_config(f"{CONFIG_DIR}/fig5.cfg", "portrait",
                               out_dir=tmp_path,
                               overrides=["t=5", "kappa_samples=5",
                                          "rho_samples=4"])
        cli.run(cfg)
        grid_rows = [ln for ln in
                     (tmp_path / "grid.csv").read_text().splitlines()
                     if ln and not ln.startswith("#")]
        assert len(grid_rows) == 1 + 20
        assert (tmp_path / "traj_00.csv").exists()
        assert (tmp_path / "traj_03.csv").exists()


class TestMainExitCodes:
    def test_success(self, tmp_path, capsys):
        code = cli.main(["equilibria", "--config",
                         f"{CONFIG_DIR}/reference.cfg", "--out",
                         str(tmp_path)])
        assert code == 0
        assert "equilibria.txt" in capsys.readouterr().out

    def test_config_error_exit_code(self, tmp_path, capsys):
        code = cli.main(["simulate", "--config", f"{CONFIG_DIR}/fig2.cfg",
                         "--out", str(tmp_path), "--override", "lambda=1.0"])
        assert code == 2

    def test_precondition_exit_code(self, tmp_path, capsys):
        # m = 3 makes sin(m*pi/n) = 0 for n = 3: singular mode
        code = cli.main(["stability", "--config",
                         f"{CONFIG_DIR}/reference.cfg", "--out",
                         str(tmp_path), "--override", "stability.m=3"])
        assert code == 5
