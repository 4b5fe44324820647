import json

import pytest

from sposs.cli import CSV_COLUMNS, CSV_VERSION, main
from sposs.matroids import Matroid
from sposs.objectives import Additive
from sposs.serialize import save_instance
from sposs.stochastic import SppInstance
from sposs.systems import IntersectionSystem, MatroidSystem, Rank1System


@pytest.fixture
def instance_file(tmp_path):
    inst = SppInstance(
        MatroidSystem(Matroid.uniform(6, 2)),
        Additive([6.0, 5.0, 4.0, 3.0, 2.0, 1.0]),
        0.5,
        3,
        name="u62",
    )
    path = tmp_path / "u62.json"
    save_instance(inst, str(path))
    return path


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_VERSION
    header = lines[1].split(",")
    assert header == CSV_COLUMNS
    return [dict(zip(header, line.split(","))) for line in lines[2:]]


class TestRun:
    def test_json_config(self, tmp_path, instance_file):
        cfg = {
            "seed": 5,
            "trials": 100,
            "experiment": [
                {"instance": "u62.json", "sparsifier": "identity"},
                {"instance": "u62.json", "sparsifier": "matroid_nss",
                 "params": {"eps": 0.25}},
            ],
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "out.csv"
        rc = main(["run", "--config", str(cfg_path), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert len(rows) == 2
        assert rows[0]["sparsifier"] == "identity"
        assert rows[0]["ratio_mean"] == "1"
        assert rows[1]["sparsifier"] == "matroid_nss"
        assert rows[1]["trials"] == "100"

    def test_toml_config_inline_instance(self, tmp_path):
        toml = """
seed = 9
trials = 50

[[experiment]]
sparsifier = "identity"

[experiment.instance]
name = "inline-r1"
p = 0.5
seed = 0

[experiment.instance.system]
kind = "rank1"
n = 4

[experiment.instance.objective]
objective = "additive"
w = [4.0, 3.0, 2.0, 1.0]
"""
        cfg_path = tmp_path / "cfg.toml"
        cfg_path.write_text(toml)
        out = tmp_path / "out.csv"
        rc = main(["run", "--config", str(cfg_path), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0]["instance"] == "inline-r1"
        assert rows[0]["ratio_mean"] == "1"

    def test_byte_identical_reruns(self, tmp_path, instance_file):
        cfg = {
            "seed": 7,
            "trials": 200,
            "experiment": [
                {"instance": "u62.json", "sparsifier": "crs"},
            ],
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["run", "--config", str(cfg_path), "--out", str(out1)]) == 0
        assert main(["run", "--config", str(cfg_path), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_trials_override(self, tmp_path, instance_file):
        cfg = {
            "seed": 7,
            "trials": 500,
            "experiment": [{"instance": "u62.json", "sparsifier": "identity"}],
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "out.csv"
        rc = main(["run", "--config", str(cfg_path), "--out", str(out),
                   "--trials-override", "25"])
        assert rc == 0
        assert read_csv(out)[0]["trials"] == "25"

    def test_skipped_size_row(self, tmp_path):
        # An intersection instance above the exact-solver cap becomes a
        # skipped:size row instead of crashing the run.
        n = 30
        inst = SppInstance(
            IntersectionSystem([Matroid.uniform(n, 3), Matroid.uniform(n, 4)]),
            Additive([1.0] * n),
            0.9,
            0,
            name="too-big",
        )
        path = tmp_path / "big.json"
        save_instance(inst, str(path))
        cfg = {
            "seed": 1,
            "trials": 10,
            "experiment": [{"instance": "big.json", "sparsifier": "identity"}],
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "out.csv"
        assert main(["run", "--config", str(cfg_path), "--out", str(out)]) == 0
        row = read_csv(out)[0]
        assert row["notes"].startswith("skipped:size")
        assert row["ratio_mean"] == ""

    def test_missing_seed_exit_2(self, tmp_path, instance_file):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "experiment": [{"instance": "u62.json", "sparsifier": "identity"}]
        }))
        assert main(["run", "--config", str(cfg_path)]) == 2

    def test_malformed_config_exit_2(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text("{not json")
        assert main(["run", "--config", str(cfg_path)]) == 2

    def test_no_experiments_exit_2(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"seed": 1}))
        assert main(["run", "--config", str(cfg_path)]) == 2

    def test_unknown_sparsifier_exit_2(self, tmp_path, instance_file):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "seed": 1,
            "experiment": [{"instance": "u62.json", "sparsifier": "magic"}],
        }))
        assert main(["run", "--config", str(cfg_path)]) == 2


class TestBalance:
    def test_csv_output(self, tmp_path, instance_file, capsys):
        out = tmp_path / "bal.csv"
        rc = main(["balance", "--instance", str(instance_file),
                   "--x", "p", "--trials", "500", "--seed", "4",
                   "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_VERSION
        assert lines[1] == "element,x,balance,stderr,active_count"
        assert len(lines) == 2 + 6
        assert "min balance:" in capsys.readouterr().err

    def test_rank1_uniform_scheme(self, tmp_path, capsys):
        inst = SppInstance(Rank1System(4), Additive([1.0] * 4), 0.5, 0,
                           name="r1")
        path = tmp_path / "r1.json"
        save_instance(inst, str(path))
        out = tmp_path / "bal.csv"
        rc = main(["balance", "--instance", str(path),
                   "--scheme", "rank1-uniform", "--x", "p",
                   "--trials", "400", "--seed", "2", "--out", str(out)])
        assert rc == 0


class TestCertify:
    def test_exchange_map_pass(self, tmp_path, instance_file, capsys):
        rc = main(["certify", "--instance", str(instance_file),
                   "--suite", "exchange-map", "--trials", "4000", "--seed", "3"])
        captured = capsys.readouterr()
        assert rc == 0
        assert "PASS" in captured.out

    def test_stitching_pass(self, tmp_path, capsys):
        m1 = Matroid.partition([[0, 1, 2], [3, 4, 5]], [1, 1])
        m2 = Matroid.partition([[0, 3], [1, 4], [2, 5]], [1, 1, 1])
        inst = SppInstance(IntersectionSystem([m1, m2]),
                           Additive([6.0, 5.0, 4.0, 3.0, 2.0, 1.0]),
                           0.5, 0, name="int6")
        path = tmp_path / "int6.json"
        save_instance(inst, str(path))
        rc = main(["certify", "--instance", str(path), "--suite", "stitching",
                   "--trials", "2000", "--seed", "3", "--eps", "0.25"])
        captured = capsys.readouterr()
        assert rc == 0
        assert "PASS" in captured.out


class TestLpCheck:
    def test_small_run(self, capsys):
        rc = main(["lpcheck", "--count", "25", "--seed", "6"])
        captured = capsys.readouterr()
        assert rc == 0
        assert "checked 25 LPs" in captured.out


class TestGen:
    def test_rank1(self, tmp_path, capsys):
        out = tmp_path / "gen.json"
        rc = main(["gen", "--family", "rank1", "--n", "12", "--out", str(out)])
        assert rc == 0
        meta = json.loads(capsys.readouterr().out)
        assert meta["n"] == 12
        data = json.loads(out.read_text())
        assert data["system"]["kind"] == "rank1"

    def test_blocks(self, tmp_path, capsys):
        out = tmp_path / "gen.json"
        rc = main(["gen", "--family", "blocks", "--m", "4", "--k", "3",
                   "--out", str(out)])
        assert rc == 0
        meta = json.loads(capsys.readouterr().out)
        assert meta["prescribed_m"] >= meta["m"]

    def test_equal_partition(self, tmp_path, capsys):
        out = tmp_path / "gen.json"
        rc = main(["gen", "--family", "equal_partition", "--n", "6", "--r",
                   "3", "--p", "0.3", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["objective"]["objective"] == "equal_partition"
