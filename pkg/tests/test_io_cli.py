import json
import os

import numpy as np
import pytest

from epochbandit.cli import main
from epochbandit.instances import GeneratorSpec, example1, generate
from epochbandit.io import instance_from_dict, instance_to_dict, load_instance, save_instance


def test_round_trip(tmp_path):
    for inst in (example1(0.1, 0.9), generate(GeneratorSpec(seed=4))):
        p = tmp_path / "i.json"
        save_instance(inst, p)
        back = load_instance(p)
        for a, b in zip(inst.P, back.P):
            assert np.array_equal(a, b)
        assert np.array_equal(inst.beta1, back.beta1)
        assert back.kernels == inst.kernels and back.gamma == inst.gamma


def test_schema_errors():
    d = instance_to_dict(example1(0.1))
    with pytest.raises(ValueError):
        instance_from_dict({**d, "version": "9"})
    bad = json.loads(json.dumps(d))
    bad["arms"][0]["P"] = [[1.0]]
    with pytest.raises(ValueError):
        instance_from_dict(bad)


class TestCLI:
    def test_stats_json(self, capsys):
        assert main(["stats", "--builtin", "example1", "--epsilon", "0.1", "--json"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out  # parses

    def test_bounds_csv(self, tmp_path):
        p = tmp_path / "b.csv"
        assert main(["bounds", "--builtin", "example1", "--horizon", "50", "--out", str(p)]) == 0
        assert p.read_text().startswith("k,value,kind,arm")

    def test_missing_instance(self, capsys):
        assert main(["stats", "--instance", "/nonexistent.json"]) == 2

    def test_bad_flag(self, capsys):
        assert main(["simulate", "--policy", "nope"]) == 2

    def test_iteration_policy_needs_iters(self, tmp_path, capsys):
        assert main(["simulate", "--builtin", "example1", "--policy", "ucb1", "--horizon", "10",
                     "--out", str(tmp_path)]) == 2

    def test_generate_then_audit(self, tmp_path):
        p = tmp_path / "g.json"
        assert main(["generate", "--seed", "2", "--out", str(p)]) == 0
        assert main(["audit", "--instance", str(p), "--grid-tau", "1:10", "--T", "30",
                     "--out", str(tmp_path / "a.json")]) == 0
        assert json.loads((tmp_path / "a.json").read_text())["ok"]

    def test_audit_l1_violation_exit(self, tmp_path):
        rc = main(["audit", "--builtin", "example1", "--epsilon", "0.1", "--grid-tau", "1:5",
                   "--T", "20", "--fill-norm", "l1", "--out", str(tmp_path / "a.json")])
        assert rc == 1

    def test_simulate_byte_identical(self, tmp_path):
        args = ["simulate", "--builtin", "example1", "--policy", "epochucb", "--policy", "ucb1",
                "--iters", "2000", "--reps", "3", "--seed", "9", "--svg"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        for f in ("traces.csv", "aggregate_epochucb.csv", "aggregate_ucb1.csv", "summary.json"):
            assert (a / f).read_bytes() == (b / f).read_bytes()
        assert (a / "regret.svg").exists()

    def test_run_file(self, tmp_path):
        save_instance(example1(0.1), tmp_path / "inst.json")
        run = {"instance": "inst.json", "policies": [{"id": "epochucb"}],
               "schedule": {"tau0": 2, "zeta": 1}, "horizon": 30, "replications": 2,
               "master_seed": 1, "outputs": {"csv_dir": str(tmp_path / "out")}}
        (tmp_path / "run.json").write_text(json.dumps(run))
        assert main(["simulate", str(tmp_path / "run.json")]) == 0
        assert os.path.exists(tmp_path / "out" / "aggregate_epochucb.csv")

    def test_spectrum(self, tmp_path, capsys):
        assert main(["spectrum", "--samples", "10", "--states", "4", "--out", str(tmp_path / "s.csv")]) == 0
        assert len((tmp_path / "s.csv").read_text().splitlines()) == 11
