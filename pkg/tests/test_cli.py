import csv

import numpy as np
import pytest

from hughes1d import ConfigError
from hughes1d.cli import BUNDLED, load_config, main

MINIMAL = """
[model]
velocity = linear
cost = reciprocal
rho_max = 0.99

[initial]
segments =
    -1.0 1.0 0.25

[discretization]
num_particles = 32
num_cells = 40

[time]
t_end = 0.4
snapshot_count = 5

[integrator]
rel_tol = 1e-6
abs_tol = 1e-9

[output]
prefix = mini
"""

RIEMANN_COLLIDING = """
[model]
velocity = linear
cost = reciprocal
rho_max = 0.99

[initial]
segments =
    -1.0 0.0 0.1
     0.0 1.0 0.9

[discretization]
riemann_n_minus = 5
riemann_n_plus = 45
num_cells = 40

[time]
t_end = 0.4
snapshot_count = 5

[output]
prefix = jump
"""


@pytest.fixture
def minimal_cfg(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(MINIMAL)
    return str(p)


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestLoadConfig:
    def test_bundled_configs_parse(self):
        for name in BUNDLED:
            cfg = load_config(name)
            assert cfg.t_end > 0.0
            cfg.particle_configuration()

    def test_minimal_file(self, minimal_cfg):
        cfg = load_config(minimal_cfg)
        assert cfg.num_particles == 32
        assert cfg.model.rho_max == 0.99
        assert cfg.prefix == "mini"

    @pytest.mark.parametrize("mutation, phrase", [
        (("segments =\n    -1.0 1.0 0.25", "segments ="), "no segments"),
        (("-1.0 1.0 0.25", "-1.0 1.5 0.25"), "outside"),
        (("-1.0 1.0 0.25", "-1.0 1.0 0.995"), "outside"),
        (("t_end = 0.4", "t_end = -1"), "t_end"),
        (("num_particles = 32", "num_particles = 0"), "choose exactly one"),
        (("[integrator]", "[integrator]\ncrossing_policy = bounce"),
         "crossing policy"),
    ])
    def test_validation_errors(self, tmp_path, mutation, phrase):
        old, new = mutation
        p = tmp_path / "bad.cfg"
        p.write_text(MINIMAL.replace(old, new))
        with pytest.raises(ConfigError, match=phrase):
            load_config(str(p))

    def test_overlapping_segments_rejected(self, tmp_path):
        text = MINIMAL.replace("    -1.0 1.0 0.25",
                               "    -1.0 0.5 0.25\n    0.4 1.0 0.3")
        p = tmp_path / "bad.cfg"
        p.write_text(text)
        with pytest.raises(ConfigError):
            load_config(str(p))

    def test_riemann_mode_needs_jump_segments(self, tmp_path):
        text = RIEMANN_COLLIDING.replace("0.0 1.0 0.9", "0.0 1.0 0.05")
        p = tmp_path / "bad.cfg"
        p.write_text(text)
        with pytest.raises(ConfigError, match="riemann"):
            load_config(str(p))

    def test_unknown_config_name(self):
        with pytest.raises(ConfigError):
            load_config("fig99")


class TestCommands:
    def test_simulate_ftl_writes_csvs(self, minimal_cfg, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["simulate-ftl", "--config", minimal_cfg,
                     "--out", str(out)]) == 0
        snaps = read_rows(out / "mini_snapshots.csv")
        assert snaps[0] == ["t", "x_left", "x_right", "density"]
        times = sorted({float(r[0]) for r in snaps[1:]})
        np.testing.assert_allclose(times, np.linspace(0.0, 0.4, 5))
        xi = read_rows(out / "mini_xi.csv")
        assert xi[0] == ["t", "xi"]
        assert len(xi) == 6
        events = read_rows(out / "mini_events.csv")
        assert events[0] == ["t", "particle_index", "side", "xi",
                             "relative_speed"]
        particles = read_rows(out / "mini_particles.csv")
        assert particles[0] == ["t", "index", "position"]
        # 33 atomized particles minus the one removed at the balance point
        assert len(particles) == 1 + 5 * 32

    def test_simulate_godunov_writes_csvs(self, minimal_cfg, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate-godunov", "--config", minimal_cfg,
                     "--out", str(out)]) == 0
        snaps = read_rows(out / "mini_snapshots.csv")
        assert len(snaps) == 1 + 5 * 40
        assert not (out / "mini_events.csv").exists()

    def test_collision_run_reports_events(self, tmp_path):
        p = tmp_path / "jump.cfg"
        p.write_text(RIEMANN_COLLIDING)
        out = tmp_path / "out"
        assert main(["simulate-ftl", "--config", str(p),
                     "--out", str(out)]) == 0
        events = read_rows(out / "jump_events.csv")
        assert len(events) > 1
        assert events[1][2] == "left-neighbor"

    def test_byte_identical_reruns(self, minimal_cfg, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main(["simulate-ftl", "--config", minimal_cfg,
                         "--out", str(out)]) == 0
        for name in ("mini_snapshots.csv", "mini_xi.csv",
                     "mini_particles.csv", "mini_events.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_compare_writes_report(self, minimal_cfg, tmp_path):
        out = tmp_path / "out"
        assert main(["compare", "--config", minimal_cfg,
                     "--out", str(out)]) == 0
        rows = read_rows(out / "mini_comparison.csv")
        assert rows[0] == ["t", "l1_density", "xi_ftl", "xi_godunov",
                           "abs_xi_diff"]
        assert len(rows) == 6
        assert all(float(r[1]) < 0.1 for r in rows[1:])

    def test_atomize_dumps_positions(self, minimal_cfg, tmp_path):
        out = tmp_path / "out"
        assert main(["atomize", "--config", minimal_cfg,
                     "--out", str(out)]) == 0
        rows = read_rows(out / "mini_particles.csv")
        assert rows[0] == ["index", "position"]
        assert len(rows) == 1 + 33
        positions = [float(r[1]) for r in rows[1:]]
        assert positions == sorted(positions)

    def test_analyze_prints_report(self, tmp_path, capsys):
        text = MINIMAL.replace("rho_max = 0.99", "rho_max = 0.2")
        text = text.replace("-1.0 1.0 0.25", "-1.0 1.0 0.2")
        p = tmp_path / "small.cfg"
        p.write_text(text)
        assert main(["analyze", "--config", str(p)]) == 0
        outp = capsys.readouterr().out
        assert "TV(initial) = 0.4" in outp
        assert "smallness condition: satisfied" in outp
        assert "critical rho_max = 0.2648" in outp

    def test_analyze_riemann_block(self, tmp_path, capsys):
        p = tmp_path / "jump.cfg"
        p.write_text(RIEMANN_COLLIDING)
        assert main(["analyze", "--config", str(p)]) == 0
        outp = capsys.readouterr().out
        assert "collision predicted" in outp

    def test_config_error_exit_code(self, tmp_path, capsys):
        assert main(["analyze", "--config", str(tmp_path / "none.cfg")]) == 2

    def test_bundled_name_resolves(self, tmp_path, capsys):
        assert main(["analyze", "--config", "fig4"]) == 0
        assert "collision predicted" in capsys.readouterr().out
