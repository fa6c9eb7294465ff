import os
from fractions import Fraction

import pytest

from adelic.cli import main
from adelic.config import ConfigError, load_config, parse_config
from adelic.experiments import (
    build_family_sample,
    run_convergence,
    run_measure,
    run_quasitile,
    run_spectral,
)

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def config_path(name):
    return os.path.join(CONFIG_DIR, name)


BASIC = """
ring = "Z"
element = "1 - t"
output = "{out}"

[[family]]
label = "torus"
kind = "torus"
schedule = [4, 8]
"""


class TestConfigParsing:
    def test_shipped_configs_parse(self):
        for name in ("converge_z.toml", "spectral_z.toml", "quasitile.toml", "converge_zi.toml"):
            cfg = load_config(config_path(name))
            assert cfg.families

    def test_defaults(self):
        cfg = parse_config(BASIC.format(out="x.csv"))
        assert cfg.ring == "Z"
        assert cfg.moments == 3
        assert cfg.families[0].schedule == (4, 8)

    def test_missing_element(self):
        with pytest.raises(ConfigError):
            parse_config('ring = "Z"\n[[family]]\nkind = "torus"\nschedule = [2]\n')

    def test_bad_schedule(self):
        text = BASIC.format(out="x.csv").replace("[4, 8]", "[8, 4]")
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_unknown_ring(self):
        with pytest.raises(ConfigError):
            parse_config('ring = "Q"\nelement = "1"\n[[family]]\nkind = "torus"\nschedule = [2]\n')

    def test_duplicate_labels(self):
        text = BASIC.format(out="x.csv")
        text += '\n[[family]]\nlabel = "torus"\nkind = "torus"\nschedule = [4]\n'
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_epsilon_schedule(self):
        cfg = parse_config(
            BASIC.format(out="x.csv")
            + '\n[[family]]\nlabel = "p"\nkind = "perturbed"\nepsilon = "1/n"\nschedule = [4]\n'
        )
        fam = cfg.families[1]
        assert fam.epsilon_at(4) == pytest.approx(0.25)
        assert fam.epsilon_at(100) == pytest.approx(0.01)


class TestRunners:
    def test_convergence_audits_pass(self, tmp_path):
        cfg = parse_config(BASIC.format(out=tmp_path / "c.csv"))
        result = run_convergence(cfg)
        assert result.audits_ok
        header = result.rows[0].split(",")
        assert header[:6] == ["family", "n", "size", "rank", "nu_zero", "nu_unit"]
        assert "tv_to_torus" in header
        row = dict(zip(header, result.rows[1].split(",")))
        assert row["rank"] == "3/4"
        assert row["len_identity_residual"] == "0"
        assert row["tv_to_torus"] == "0"

    def test_identical_families_zero_distance(self, tmp_path):
        text = BASIC.format(out=tmp_path / "c.csv")
        text += '\n[[family]]\nlabel = "torus2"\nkind = "torus"\nschedule = [4, 8]\n'
        result = run_convergence(parse_config(text))
        for line in result.rows[1:]:
            row = dict(zip(result.rows[0].split(","), line.split(",")))
            assert row["tv_to_torus"] == "0" and row["tv_to_torus2"] == "0"

    def test_spectral_run(self, tmp_path):
        cfg = parse_config(BASIC.format(out=tmp_path / "s.csv"))
        result = run_spectral(cfg)
        assert result.audits_ok
        row = dict(zip(result.rows[0].split(","), result.rows[1].split(",")))
        assert row["m1"] == "2" and row["g1"] == "2" and row["gap1"] == "0"

    def test_quasitile_run(self, tmp_path):
        text = "tiles = [4]\ntile_epsilon = 0.5\n" + BASIC.format(out=tmp_path / "q.csv")
        result = run_quasitile(parse_config(text))
        assert result.audits_ok
        assert result.rows[-1].startswith("final,")

    def test_quasitile_quality_diagnostic(self, tmp_path):
        # perturbing a 2-d torus breaks commutators, so the quality gate trips
        text = (
            'ring = "Z"\ngroup = "free_abelian"\ndimension = 2\n'
            'element = "1"\noutput = "{}"\ntiles = [[4, 4]]\ntile_epsilon = 0.25\n'
            '[[family]]\nlabel = "p"\nkind = "perturbed"\nepsilon = 0.3\nschedule = [12]\nseed = 5\n'
        ).format(tmp_path / "q.csv")
        result = run_quasitile(parse_config(text))
        assert not result.audits_ok
        assert result.rows[1].startswith("error,quality,")

    def test_measure_output(self, tmp_path):
        cfg = parse_config(BASIC.format(out=tmp_path / "m.csv"))
        out = run_measure(cfg, 4)
        assert out.splitlines()[0] == "ideal,mass_num,mass_den"

    def test_family_dispatch_errors(self):
        cfg = parse_config(
            'ring = "Z"\ngroup = "lamplighter"\nelement = "1"\n'
            '[[family]]\nkind = "wreath"\nschedule = [2]\n'
        )
        X = build_family_sample(cfg, cfg.families[0], 2)
        assert X.size == 8


class TestCliExitCodes:
    def test_converge_success(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["converge", config_path("converge_z.toml")]) == 0
        assert "wrote" in capsys.readouterr().out

    def test_missing_config_is_input_error(self, capsys):
        assert main(["converge", "/nonexistent.toml"]) == 1

    def test_malformed_config_is_input_error(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("element = [unclosed\n")
        assert main(["converge", str(bad)]) == 1

    def test_quality_failure_is_audit_exit(self, tmp_path, monkeypatch):
        cfg = tmp_path / "q.toml"
        cfg.write_text(
            'ring = "Z"\ngroup = "free_abelian"\ndimension = 2\n'
            'element = "1"\noutput = "q.csv"\ntiles = [[4, 4]]\ntile_epsilon = 0.25\n'
            '[[family]]\nlabel = "p"\nkind = "perturbed"\nepsilon = 0.3\nschedule = [12]\nseed = 5\n'
        )
        monkeypatch.chdir(tmp_path)
        assert main(["quasitile", str(cfg)]) == 2

    def test_snf_output(self, tmp_path, capsys):
        mat = tmp_path / "m.csv"
        mat.write_text("2,4\n6,8\n")
        assert main(["snf", str(mat)]) == 0
        out = capsys.readouterr().out
        assert "divisor,2,4" in out
        assert "free_count,0" in out

    def test_measure_subcommand(self, capsys):
        assert main(["measure", config_path("converge_z.toml"), "--n", "5"]) == 0
        out = capsys.readouterr().out
        assert "ideal,mass_num,mass_den" in out
        assert "2,1,5" in out

    def test_plot_renders_figures(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["converge", config_path("converge_z.toml"), "--plot"]) == 0
        assert (tmp_path / "converge_z_convergence.png").exists()


class TestDeterminism:
    @pytest.mark.parametrize(
        "name,command",
        [
            ("converge_z.toml", "converge"),
            ("spectral_z.toml", "spectral"),
            ("quasitile.toml", "quasitile"),
            ("converge_zi.toml", "converge"),
        ],
    )
    def test_rerun_byte_identical(self, name, command, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main([command, config_path(name)]) == 0
        cfg = load_config(config_path(name))
        first = (tmp_path / cfg.output).read_bytes()
        assert main([command, config_path(name)]) == 0
        assert (tmp_path / cfg.output).read_bytes() == first
