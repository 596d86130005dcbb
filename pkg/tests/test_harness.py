import csv
import json

import numpy as np
import pytest
from pydantic import ValidationError

from qlan.cli import EXIT_CONFIG, EXIT_OK, main
from qlan.harness import ExperimentConfig, run


def cfg(**kw):
    return ExperimentConfig(**kw)


class TestConfig:
    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            cfg(experiment="gaussian-risk", colour="blue")

    def test_unknown_experiment(self):
        with pytest.raises(ValidationError):
            cfg(experiment="nonsense")

    @pytest.mark.parametrize("mu", [[0.3, 0.7], [0.5, 0.4], [0.5, 0.5]])
    def test_bad_spectrum(self, mu):
        with pytest.raises(ValidationError):
            cfg(experiment="gaussian-risk", d=2, r=2, mu=mu)

    def test_rank_checks(self):
        with pytest.raises(ValidationError):
            cfg(experiment="gaussian-risk", d=2, r=3)
        with pytest.raises(ValidationError):
            cfg(experiment="gaussian-risk", d=3, r=2, mu=[1.0])

    def test_observable_shape(self):
        with pytest.raises(ValidationError):
            cfg(experiment="functional", d=2, r=1, mu=[1.0], observable=[[0, 1], [2, 0]])

    def test_bounds(self):
        with pytest.raises(ValidationError):
            cfg(experiment="two-stage", eps=0.6)
        with pytest.raises(ValidationError):
            cfg(experiment="schurweyl-verify", n_max=9)

    def test_missing_mu(self):
        with pytest.raises(ValueError):
            run(cfg(experiment="gaussian-risk", d=2, r=1))


class TestRunners:
    def test_gaussian_risk(self):
        rep = run(cfg(experiment="gaussian-risk", d=4, r=3, mu=[0.5, 0.3, 0.2], reps=100_000, seed=3))
        assert rep.theory == pytest.approx(0.62 + 2 * (0.5 * 3 + 0.3 * 2 + 0.2 * 1))
        assert abs(rep.mc_estimate - rep.theory) <= 3 * rep.mc_stderr

    def test_standard_error_scaling(self):
        base = dict(experiment="gaussian-risk", d=2, r=2, mu=[0.75, 0.25], seed=1)
        big = run(cfg(reps=40_000, **base))
        small = run(cfg(reps=10_000, **base))
        assert small.mc_stderr / big.mc_stderr == pytest.approx(2.0, rel=0.1)

    def test_bayes_pure(self):
        rep = run(cfg(experiment="bayes-risk", d=2, r=1, mu=[1.0], prior_vars=(1.0, 1.0), reps=100_000))
        assert rep.theory == pytest.approx(1.0)
        assert abs(rep.mc_estimate - 1.0) <= 3 * rep.mc_stderr
        assert "classical_block" not in rep.extras

    def test_bayes_thermal_block(self):
        rep = run(cfg(experiment="bayes-risk", d=3, r=2, mu=[0.7, 0.3], prior_vars=(2.0, 1.0), reps=50_000))
        block = rep.extras["classical_block"]
        mean, se = block["mc"]
        assert abs(mean - block["closed_form"]) <= 4 * se
        assert len(rep.extras["modes"]) == 3

    def test_functional(self):
        rep = run(cfg(experiment="functional", d=3, r=2, mu=[0.6, 0.4], n=500, reps=20_000, seed=2,
                      observable=[[1, 0.5, 0], [0.5, 0, 0.2], [0, 0.2, -1]]))
        assert abs(rep.mc_estimate - rep.theory) <= 3 * rep.mc_stderr
        assert rep.extras["qform_times_variance"] == pytest.approx(1.0)

    def test_tomography(self):
        rep = run(cfg(experiment="tomo-concentration", d=2, r=1, mu=[1.0], n=2000, eps=0.1, reps=200))
        assert rep.extras["rank_success_rate"] == 1.0
        assert rep.mc_estimate <= rep.theory + 3 * max(rep.mc_stderr, 1 / 200)

    def test_two_stage_small(self):
        rep = run(cfg(experiment="two-stage", d=2, r=1, mu=[1.0], n=10_000, reps=100, eps=0.05,
                      seed=4, grid=True, n_grid=[2000]))
        assert rep.theory == 2.0
        assert np.isfinite(rep.mc_estimate)
        assert sum(rep.extras["status_counts"].values()) == 100
        assert len(rep.extras["theta_buckets"]) == 4
        assert rep.extras["n_grid"][0]["n"] == 2000

    def test_two_stage_workers_do_not_change_result(self):
        base = dict(experiment="two-stage", d=2, r=2, mu=[0.75, 0.25], n=5000, reps=40, eps=0.05, seed=6)
        serial = run(cfg(**base))
        threaded = run(cfg(workers=4, **base))
        assert serial.mc_estimate == threaded.mc_estimate

    def test_schurweyl(self):
        rep = run(cfg(experiment="schurweyl-verify", d=2, n_max=6))
        assert rep.passed

    def test_reproducible(self):
        c = cfg(experiment="bayes-risk", d=2, r=2, mu=[0.75, 0.25], reps=5000, seed=11)
        first, second = run(c).to_dict(), run(c).to_dict()
        first.pop("elapsed_ms"), second.pop("elapsed_ms")
        assert first == second


class TestCli:
    def write(self, tmp_path, **payload):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        return path

    def test_run_and_campaign(self, tmp_path):
        conf = self.write(tmp_path, experiment="gaussian-risk", d=2, r=2, mu=[0.75, 0.25], reps=2000)
        out = tmp_path / "res" / "a.json"
        assert main(["gaussian-risk", "--config", str(conf), "--seed", "5", "--out", str(out)]) == EXIT_OK
        data = json.loads(out.read_text())
        assert data["seed"] == 5 and data["reps"] == 2000
        with (out.parent / "campaign.csv").open() as handle:
            rows = list(csv.DictReader(handle))
        assert rows[0]["experiment"] == "gaussian-risk"
        assert set(rows[0]) >= {"experiment", "d", "r", "n", "reps", "seed", "mc_estimate",
                                "mc_stderr", "theory", "elapsed_ms"}

    def test_deterministic(self, tmp_path):
        conf = self.write(tmp_path, experiment="bayes-risk", d=2, r=2, mu=[0.75, 0.25], reps=3000)
        outs = []
        for name in ("x.json", "y.json"):
            path = tmp_path / name
            assert main(["bayes-risk", "--config", str(conf), "--out", str(path), "--seed", "9"]) == 0
            data = json.loads(path.read_text())
            data.pop("elapsed_ms")
            data["config"].pop("out")
            outs.append(data)
        assert outs[0] == outs[1]

    def test_stdout(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        conf = self.write(tmp_path, experiment="schurweyl-verify", d=2, n_max=3)
        assert main(["schurweyl-verify", "--config", str(conf)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["passed"] is True
        assert (tmp_path / "campaign.csv").exists()

    @pytest.mark.parametrize("payload", [
        {"experiment": "gaussian-risk", "bogus": 1},
        {"experiment": "bayes-risk"},
        {"experiment": "gaussian-risk", "d": 2, "r": 3},
    ])
    def test_config_errors(self, tmp_path, payload):
        conf = self.write(tmp_path, **payload)
        assert main(["gaussian-risk", "--config", str(conf), "--out", str(tmp_path / "o.json")]) == EXIT_CONFIG

    def test_missing_file(self, tmp_path):
        assert main(["gaussian-risk", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG
