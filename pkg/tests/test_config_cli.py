import numpy as np
import pytest

from entwave import cli
from entwave.config import (
    ConfigError,
    ExperimentConfig,
    emit_config,
    parse_config,
    validate,
)
from entwave.csvio import (
    SchemaError,
    read_diagnostics_csv,
    read_fits_csv,
    write_fits_csv,
)


class TestConfig:
    def test_minimal_config_resolves_defaults(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[wave]\ndelta = 0.03\n\n[run]\nt_end = 10.0\n")
        cfg = parse_config(path)
        assert cfg.delta == 0.03
        assert cfg.t_end == 10.0
        assert cfg.gamma == pytest.approx(5.0 / 3.0)
        assert cfg.n1 == 4096

    def test_bad_gamma_named(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[gas]\ngamma = 0.9\n")
        with pytest.raises(ConfigError, match="gamma must exceed 1"):
            parse_config(path)

    def test_unknown_key_named(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[gas]\ngamma = 1.4\nviscosity = 3\n")
        with pytest.raises(ConfigError, match="viscosity"):
            parse_config(path)

    def test_unknown_section_named(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[turbo]\nx = 1\n")
        with pytest.raises(ConfigError, match="turbo"):
            parse_config(path)

    def test_emit_parse_roundtrip(self, tmp_path):
        cfg = ExperimentConfig(delta=0.07, n1=512, t_end=33.5, mass_mode="zero",
                               collapse_transverse=False, seed=7)
        path = tmp_path / "exp.ini"
        path.write_text(emit_config(cfg))
        assert parse_config(path) == cfg

    def test_manual_grid_requires_length(self):
        with pytest.raises(ConfigError, match="L > 0"):
            validate(ExperimentConfig(grid_mode="manual", L=0.0))

    def test_bad_mass_mode(self):
        with pytest.raises(ConfigError, match="mass_mode"):
            validate(ExperimentConfig(mass_mode="both"))


class TestCsvIo:
    def test_fits_roundtrip(self, tmp_path):
        from entwave.decay import RateFit

        fit = RateFit(-0.512, 0.02, (10.0, 40.0), 0.03, 25, "power")
        rows = [
            __import__("entwave.csvio", fromlist=["fit_row"]).fit_row(
                "theorem1", "linf_zero_mode", fit, True
            )
        ]
        path = tmp_path / "fits.csv"
        write_fits_csv(path, rows)
        back = read_fits_csv(path)
        assert back[0]["experiment"] == "theorem1"
        assert back[0]["value"] == pytest.approx(-0.512)
        assert back[0]["passed"] == "pass"

    def test_schema_gate(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("# schema=somethingelse.v9\n# t,x\n0,1\n")
        with pytest.raises(SchemaError, match="somethingelse"):
            read_diagnostics_csv(path)


class TestCliPlumbing:
    def test_profile_subcommand(self, tmp_path):
        ini = tmp_path / "exp.ini"
        ini.write_text("[wave]\ndelta = 0.05\n")
        rc = cli.main(["profile", "--config", str(ini), "--out", str(tmp_path), "--quiet"])
        assert rc == 0
        assert (tmp_path / "profile.csv").exists()
        assert (tmp_path / "config.resolved.ini").exists()

    def test_structure_check_subcommand(self, tmp_path):
        rc = cli.main(["structure-check", "--out", str(tmp_path), "--quiet"])
        assert rc == 0
        report = (tmp_path / "report.txt").read_text()
        assert "left condition violated" in report

    def test_config_error_exit_code(self, tmp_path):
        ini = tmp_path / "exp.ini"
        ini.write_text("[gas]\ngamma = 0.5\n")
        rc = cli.main(["profile", "--config", str(ini), "--out", str(tmp_path)])
        assert rc == 2

    def test_analyze_requires_diagnostics(self, tmp_path):
        rc = cli.main(["analyze", "--out", str(tmp_path), "--quiet"])
        assert rc == 2

    def test_analyze_on_synthetic_series(self, tmp_path):
        from entwave.csvio import write_diagnostics_csv
        from entwave.diagnostics import COLUMNS, DiagnosticsSeries

        series = DiagnosticsSeries()
        t = np.linspace(0.0, 100.0, 120)
        for tk in t:
            row = {c: 1.0 for c in COLUMNS}
            row["t"] = tk
            row["linf_pert_bar"] = (1.0 + tk) ** -0.5
            row["nonzero_h1"] = np.exp(-0.8 * tk) + 1e-14
            series.append(row)
        csv = tmp_path / "diagnostics.csv"
        write_diagnostics_csv(csv, series)
        rc = cli.main([
            "analyze", "--diagnostics", str(csv), "--out", str(tmp_path), "--quiet",
        ])
        assert rc == 0
        fits = read_fits_csv(tmp_path / "fits.csv")
        power = [f for f in fits if f["quantity"] == "linf_pert_bar"][0]
        assert power["value"] == pytest.approx(-0.5, abs=1e-6)
        exp = [f for f in fits if f["quantity"] == "nonzero_h1"][0]
        assert exp["value"] == pytest.approx(0.8, rel=0.05)

    def test_evolve_periodic_checkpoints(self, tmp_path):
        ini = tmp_path / "exp.ini"
        ini.write_text(
            "[wave]\ndelta = 0.05\n\n[grid]\ngrid_mode = manual\nL = 40.0\n"
            "n1 = 256\nn2 = 4\nn3 = 4\n\n[run]\nt_end = 1.0\nobserver_dt = 0.5\n"
            "checkpoint_dt = 0.5\n\n[perturbation]\namplitude = 0.01\n"
        )
        out = tmp_path / "ck"
        rc = cli.main(["evolve", "--config", str(ini), "--out", str(out), "--quiet"])
        assert rc == 0
        saved = sorted(out.glob("checkpoint_*.npz"))
        assert len(saved) == 3  # t = 0, 0.5, 1.0

    def test_evolve_checkpoint_resume(self, tmp_path):
        ini = tmp_path / "exp.ini"
        ini.write_text(
            "[wave]\ndelta = 0.05\n\n[grid]\ngrid_mode = manual\nL = 40.0\n"
            "n1 = 256\nn2 = 4\nn3 = 4\n\n[run]\nt_end = 1.0\nobserver_dt = 0.5\n"
            "\n[perturbation]\namplitude = 0.01\n"
        )
        out1 = tmp_path / "a"
        rc = cli.main(["evolve", "--config", str(ini), "--out", str(out1), "--quiet"])
        assert rc == 0
        assert (out1 / "final.npz").exists()
        assert (out1 / "diagnostics.csv").exists()
        data = read_diagnostics_csv(out1 / "diagnostics.csv")
        assert data["t"][-1] == pytest.approx(1.0)
        # resume to a later horizon from the checkpoint
        ini2 = tmp_path / "exp2.ini"
        ini2.write_text(
            "[wave]\ndelta = 0.05\n\n[grid]\ngrid_mode = manual\nL = 40.0\n"
            "n1 = 256\nn2 = 4\nn3 = 4\n\n[run]\nt_end = 1.5\nobserver_dt = 0.5\n"
            "\n[perturbation]\namplitude = 0.01\n"
        )
        out2 = tmp_path / "b"
        rc = cli.main([
            "evolve", "--config", str(ini2), "--out", str(out2),
            "--resume", str(out1 / "final.npz"), "--quiet",
        ])
        assert rc == 0
        from entwave.solver import load_checkpoint

        final = load_checkpoint(out2 / "final.npz")
        assert final.t == pytest.approx(1.5)
