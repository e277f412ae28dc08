import hashlib
import json
import math

import numpy as np
import pytest

from dypp import cli
from dypp.config import (ConfigError, build_config, config_hash, format_config, load_config, parse_text,
                         valid_keys, with_overrides)
from dypp.engine import GameConfig, run_simulation
from dypp.experiment import compare_schemes, median_iterations, population_digest
from dypp.game_model import DOProfile, curator_realized_payoff_per_do, do_realized_payoff
from dypp.traceio import TRACE_COLUMNS, read_json, read_trace, write_json, write_trace


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.ini"
        path.write_text("")
        cfg = load_config(path)
        assert cfg == GameConfig()
        e = cfg.econ
        assert (e.lambda_r, e.nu, e.varpi, e.lambda_s, e.mu, e.zeta_1, e.zeta_2) == (
            0.08, 2.5, 0.6, 0.2, 0.13, 35.4278, 102.2444)
        assert (cfg.grids.K, cfg.grids.J, cfg.grids.p_max, cfg.grids.sigma_max) == (32, 12, 16.0, 0.6)
        assert cfg.loss_params.gamma == (0.013, 0.0044, 0.0057, 8.18, 0.14)
        assert (cfg.do_wolf.eta, cfg.do_wolf.phi) == (0.5, 0.8)

    def test_zero_price_intervals_rejected(self):
        with pytest.raises(ConfigError, match="K"):
            build_config(parse_text("[grid]\nK = 0\n"))

    def test_eta_override_changes_hash(self):
        base = build_config({})
        cfg = build_config(parse_text("[learning]\neta = 0.3\n"))
        assert cfg.do_wolf.eta == cfg.curator_wolf.eta == 0.3
        assert config_hash(cfg) != config_hash(base)

    def test_side_specific_override(self):
        cfg = build_config(parse_text("[learning]\neta = 0.3\ncurator_eta = 0.2\nscheme = q-learning\n"))
        assert (cfg.do_wolf.eta, cfg.curator_wolf.eta) == (0.3, 0.2)
        assert cfg.do_scheme == cfg.curator_scheme == "q-learning"

    def test_unknown_key_lists_valid_keys(self):
        with pytest.raises(ConfigError) as info:
            parse_text("[grid]\nKK = 3\n")
        assert "grid.K" in str(info.value) and "run.seed" in str(info.value)
        with pytest.raises(ConfigError):
            parse_text("[grids]\nK = 3\n")

    def test_bad_values(self):
        for text in ("[loss]\ngamma = 1, 2\n", "[run]\nearly_stop = maybe\n", "[run]\niterations = 2.5\n",
                     "[learning]\nscheme = sarsa\n", "[econ]\nvarpi = 2\n"):
            with pytest.raises(ConfigError):
                build_config(parse_text(text))

    def test_format_round_trip(self, tmp_path):
        cfg = build_config(parse_text("[grid]\nK = 8\n[learning]\ndo_scheme = greedy\nphi = 0.7\n"
                                      "[population]\nc_range = 1, 2\n[run]\nseed = 12\nthreshold = 0.002\n"))
        path = tmp_path / "c.ini"
        path.write_text(format_config(cfg))
        again = load_config(path)
        assert again == cfg
        assert config_hash(again) == config_hash(cfg)

    def test_hash_ignores_workers(self):
        cfg = build_config({})
        assert config_hash(cfg) == config_hash(build_config(parse_text("[run]\nworkers = 4\n")))
        assert config_hash(cfg) != config_hash(with_overrides(cfg, seed=1))

    def test_pure_resolution(self, tmp_path):
        path = tmp_path / "c.ini"
        path.write_text("[population]\nN = 12\n")
        assert config_hash(load_config(path)) == config_hash(load_config(path))

    def test_valid_keys(self):
        keys = valid_keys()
        assert "learning.eta" in keys and len(keys) == len(set(keys))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.ini")


class TestTrace:
    def test_row_count(self, tmp_path):
        res = run_simulation(GameConfig(N=2, iterations=1))
        path = write_trace(res.trace, tmp_path / "t.csv", res.config.grids)
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert lines[0].split(",") == list(TRACE_COLUMNS)

    def test_rows_recompute(self, tmp_path):
        cfg = GameConfig(N=3, iterations=40, early_stop=False, master_seed=3)
        res = run_simulation(cfg)
        rows = read_trace(write_trace(res.trace, tmp_path / "t.csv", cfg.grids))
        g, econ, lp = cfg.grids, cfg.econ, cfg.loss_params
        for row in rows:
            prof = res.state.profiles[row["do_id"]]
            p, ds = g.prices()[row["price_index"]], g.savings()[row["noise_index"]]
            assert row["price"] == p and row["delta_sigma"] == pytest.approx(ds, rel=1e-9)
            assert row["do_reward"] == pytest.approx(do_realized_payoff(p, ds, prof, econ, g), rel=1e-6, abs=1e-12)
            assert row["curator_reward_n"] == pytest.approx(
                curator_realized_payoff_per_do(p, ds, prof.beta_n, econ, lp), rel=1e-6)
            if row["noise_index"] == g.J:
                assert math.isinf(row["alpha"])

    def test_identical_digest(self, tmp_path):
        cfg = GameConfig(N=3, iterations=200, early_stop=False, master_seed=21)
        a = write_trace(run_simulation(cfg).trace, tmp_path / "a.csv", cfg.grids)
        b = write_trace(run_simulation(cfg).trace, tmp_path / "b.csv", cfg.grids)
        assert digest(a) == digest(b)

    def test_json_infinity(self, tmp_path):
        path = write_json({"a": math.inf, "b": np.int64(3), "c": [1.5, None]}, tmp_path / "x.json")
        assert read_json(path) == {"a": "inf", "b": 3, "c": [1.5, None]}


class TestExperiment:
    def test_single_scheme_is_plain_run(self):
        cfg = GameConfig(N=3, iterations=300, master_seed=2)
        cmp = compare_schemes(cfg, ["wolf-phc"])
        assert cmp["results"]["wolf-phc"].summary == run_simulation(cfg).summary

    def test_shared_population(self):
        cfg = GameConfig(N=4, iterations=100, master_seed=3)
        cmp = compare_schemes(cfg, parallel=True)
        assert set(cmp["results"]) == {"wolf-phc", "q-learning", "greedy"}
        assert len({r.state.profiles for r in cmp["results"].values()}) == 1
        assert cmp["population_digest"] == population_digest(cfg)

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            compare_schemes(GameConfig(N=2, iterations=5), ["sarsa"])

    def test_median_counts_failures_as_infinite(self):
        assert median_iterations([10, None, None]) == math.inf
        assert median_iterations([10, 20, None]) == 20


class TestCLI:
    def test_run_and_verify(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert cli.main(["run", "--seed", "4", "--iterations", "150", "--out", str(out)]) == 0
        for name in ("trace.csv", "summary.json", "manifest.json", "config.ini", "state.npz"):
            assert (out / name).exists()
        manifest = read_json(out / "manifest.json")
        assert manifest["master_seed"] == 4
        assert manifest["config_hash"] == config_hash(load_config(out / "config.ini"))
        capsys.readouterr()
        assert cli.main(["verify-ne", "--out", str(out)]) == 0
        assert "most-visited" in capsys.readouterr().out
        summary = read_json(out / "summary.json")
        assert set(summary["exploitability"]) == {"most-visited", "visit-weighted"}

    def test_rerun_is_byte_identical(self, tmp_path):
        for d in ("a", "b"):
            assert cli.main(["run", "--iterations", "120", "--out", str(tmp_path / d)]) == 0
        assert digest(tmp_path / "a" / "trace.csv") == digest(tmp_path / "b" / "trace.csv")

    def test_unknown_key_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text("[run]\nseeds = 3\n")
        assert cli.main(["print-config", "--config", str(path)]) == 1
        assert "valid keys" in capsys.readouterr().err

    def test_runtime_error_exit_code(self, tmp_path):
        assert cli.main(["verify-ne", "--out", str(tmp_path / "missing")]) in (1, 2)

    def test_print_config(self, capsys):
        assert cli.main(["print-config", "--scheme", "greedy"]) == 0
        text = capsys.readouterr().out
        assert "do_scheme = greedy" in text and "# config hash" in text

    def test_compare(self, tmp_path, capsys):
        out = tmp_path / "cmp"
        assert cli.main(["compare", "--iterations", "150", "--scheme", "greedy", "--scheme", "wolf-phc",
                         "--out", str(out)]) == 0
        report = read_json(out / "compare.json")
        assert set(report["schemes"]) == {"greedy", "wolf-phc"}
        assert (out / "greedy" / "trace.csv").exists()

    def test_compare_over_seeds(self, tmp_path, capsys):
        out = tmp_path / "seeds"
        assert cli.main(["compare", "--iterations", "120", "--seeds", "2", "--scheme", "greedy",
                         "--out", str(out)]) == 0
        report = read_json(out / "compare.json")
        assert len(report["greedy"]["runs"]) == 2
