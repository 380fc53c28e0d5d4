import csv
import json
import os

import pytest

from coalwalk.cli import (
    ExperimentConfig,
    SweepSpec,
    fit_scaling,
    main,
    parse_config,
    run,
)
from coalwalk.errors import ConfigError, InsufficientPoints
from coalwalk.graphs import load_edge_list


CONFIG_TEMPLATE = """
[experiment]
master_seed = 909
trials = 40
quantities = exact,simulate,verify
outdir = {outdir}

[sweep:cycles]
family = cycle
sizes = 8 16
"""


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(CONFIG_TEMPLATE.format(outdir=tmp_path / "out"))
    return str(path)


class TestFitScaling:
    def test_exact_square_law(self):
        series = [(n, float(n * n)) for n in (8, 16, 32, 64)]
        fit = fit_scaling(series)
        assert fit.exponent == pytest.approx(2.0, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_nlogn_model_reports_spread(self):
        import math
        series = [(n, 3.0 * n * math.log(n)) for n in (8, 16, 32, 64)]
        fit = fit_scaling(series, model="n*log n")
        assert fit.exponent is None
        assert fit.ratio_min == pytest.approx(3.0)
        assert fit.ratio_spread == pytest.approx(1.0)

    def test_insufficient_points(self):
        with pytest.raises(InsufficientPoints):
            fit_scaling([(8, 1.0), (16, 2.0), (32, 3.0)])
        with pytest.raises(InsufficientPoints):
            fit_scaling([(8, 1.0), (16, 0.0), (32, 3.0), (64, 4.0)])


class TestConfig:
    def test_parse(self, config_file):
        config = parse_config(config_file)
        assert config.master_seed == 909
        assert config.sweeps == [SweepSpec("cycle", (8, 16))]
        assert config.quantities == ("exact", "simulate", "verify")

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            parse_config("/nonexistent/exp.ini")

    def test_sizes_must_increase(self):
        config = ExperimentConfig(sweeps=[SweepSpec("cycle", (16, 8))])
        with pytest.raises(ConfigError):
            config.validate()

    def test_monte_carlo_needs_seed(self):
        config = ExperimentConfig(sweeps=[SweepSpec("cycle", (8,))],
                                  quantities=("simulate",), trials=10)
        with pytest.raises(ConfigError):
            config.validate()

    def test_unknown_family(self):
        config = ExperimentConfig(sweeps=[SweepSpec("mystery", (8,))])
        with pytest.raises(ConfigError):
            config.validate()


class TestRun:
    def test_pipeline_outputs(self, config_file, tmp_path):
        result = run(parse_config(config_file))
        assert result["explicit_ok"]
        assert len(result["records"]) == 2
        record = json.loads(open(result["records"][0]).read())
        assert {"spec", "measured", "bound_report", "estimates"} <= set(record)
        with open(result["csv"]) as handle:
            rows = list(csv.DictReader(handle))
        assert rows[0].keys() == {"family", "n", "m", "quantity", "value",
                                  "stderr", "trials", "censored", "seed"}
        quantities = {row["quantity"] for row in rows}
        assert {"t_hit", "t_mix", "t_meet", "t_coalescence_sim"} <= quantities

    def test_rerun_byte_identical_and_worker_invariant(self, tmp_path):
        outs = []
        for idx, workers in ((0, "1"), (1, "2")):
            outdir = tmp_path / f"out{idx}"
            path = tmp_path / f"exp{idx}.ini"
            path.write_text(CONFIG_TEMPLATE.format(outdir=outdir))
            os.environ["COALWALK_WORKERS"] = workers
            try:
                result = run(parse_config(str(path)))
            finally:
                os.environ.pop("COALWALK_WORKERS", None)
            outs.append(open(result["csv"], "rb").read())
        assert outs[0] == outs[1]


class TestCommands:
    def test_gen_and_reload(self, capsys):
        assert main(["gen", "--family", "cycle", "--n", "6"]) == 0
        text = capsys.readouterr().out
        g = load_edge_list(text)
        assert g.n == 6 and g.m == 6

    def test_exact_json(self, capsys):
        assert main(["exact", "--family", "clique", "--n", "4"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["measured"]["t_hit"] == pytest.approx(6.0)

    def test_simulate_requires_seed(self, capsys):
        code = main(["simulate", "--family", "cycle", "--n", "8",
                     "--trials", "10"])
        assert code == 1
        assert "seed" in capsys.readouterr().err

    def test_simulate_runs(self, capsys):
        code = main(["simulate", "--family", "clique", "--n", "2",
                     "--kind", "meeting", "--u", "0", "--v", "1",
                     "--trials", "200", "--seed", "5"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert 1.5 <= payload["mean"] <= 2.5

    def test_verify_exit_zero_on_pass(self, capsys, tmp_path):
        csv_path = str(tmp_path / "report.csv")
        code = main(["verify", "--family", "clique", "--n", "8",
                     "--csv", csv_path])
        assert code == 0
        assert open(csv_path).readline().startswith("name,lhs,rel")

    def test_all_command(self, config_file, capsys):
        assert main(["all", "--config", config_file]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["explicit_ok"]

    def test_scale_command(self, tmp_path, capsys):
        path = tmp_path / "scale.ini"
        path.write_text(
            "[experiment]\nquantities = exact\noutdir = %s\n"
            "meeting_limit = 4\n\n"
            "[sweep:c]\nfamily = cycle\nsizes = 8 12 16 24\n"
            % (tmp_path / "out"))
        assert main(["scale", "--config", str(path)]) == 0
        fits = json.loads(capsys.readouterr().out)
        assert 1.7 <= fits["cycle:t_hit"]["exponent"] <= 2.2

    def test_edge_list_input(self, tmp_path, capsys):
        edges = tmp_path / "g.txt"
        edges.write_text("0 1\n1 2\n2 0\n")
        assert main(["exact", "--family", "clique",
                     "--edge-list", str(edges)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n"] == 3

    def test_verify_exit_two_on_violation(self, capsys, monkeypatch):
        import coalwalk.bounds as bounds_mod
        import coalwalk.cli as cli_mod

        def poisoned(g, mq):
            report = bounds_mod.BoundReport()
            report.add_explicit("synthetic", 2.0, "<=", 1.0)
            return report

        monkeypatch.setattr(cli_mod.bounds, "verify_relations", poisoned)
        code = main(["verify", "--family", "clique", "--n", "4"])
        assert code == 2

    def test_all_flag_overrides(self, config_file, tmp_path, capsys):
        override = str(tmp_path / "elsewhere")
        assert main(["all", "--config", config_file, "--trials", "10",
                     "--seed", "77", "--outdir", override]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["csv"].startswith(override)
