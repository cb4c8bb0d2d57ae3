import json

import numpy as np
import pytest

from tapmein.gateway.cli import main
from tapmein.gateway.documents import taps_to_obj
from tests.conftest import melody_samples


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    ds = root / "ds.json"
    pop = root / "pop.json"
    rc = main(["synth", "--users", "4", "--genuine-per-condition", "6", "--attackers", "2",
               "--seed", "5", "--out", str(ds), "--pop-out", str(pop)])
    assert rc == 0
    return root, ds, pop


def write_samples(path, count, seed=33, l=6):
    samples = melody_samples(np.random.default_rng(seed), l=l, count=count)
    path.write_text(json.dumps(
        {"schema_version": 1, "samples": [{"taps": taps_to_obj(s)} for s in samples]}
    ))
    return samples


class TestExitCodes:
    def test_usage_error_exits_1(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["synth", "--no-such-flag"])
        assert err.value.code == 1

    def test_unknown_command_exits_1(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 1

    def test_data_error_exits_2(self, workspace, tmp_path, capsys):
        root, ds, pop = workspace
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema_version": 1, "users": []}')
        rc = main(["stats", "fit", str(bad), "--out", str(tmp_path / "o.json")])
        assert rc == 2
        assert "tapmein:" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["stats", "fit", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o.json")]) == 2


class TestStatsFit:
    def test_fit_matches_synth_stats(self, workspace, tmp_path):
        root, ds, pop = workspace
        out = tmp_path / "pop2.json"
        assert main(["stats", "fit", str(ds), "--out", str(out)]) == 0
        a = json.loads(pop.read_text())
        b = json.loads(out.read_text())
        for channel in ("pressure", "size", "down", "up"):
            assert a[channel] == b[channel]
        assert a["sample_count"] == b["sample_count"]


class TestEnrollVerify:
    def test_enroll_verify_accept_and_reject(self, workspace, tmp_path, capsys):
        store = tmp_path / "store"
        samples_file = tmp_path / "enroll.json"
        samples = write_samples(samples_file, 5)
        _, _, pop = workspace

        assert main(["enroll", "--user", "u1", "--samples", str(samples_file),
                     "--store", str(store), "--pop", str(pop), "--seed", "4"]) == 0

        probe = tmp_path / "probe.json"
        extra = melody_samples(np.random.default_rng(33), l=6, count=6)[5]
        probe.write_text(json.dumps({"schema_version": 1, "taps": taps_to_obj(extra)}))
        rc = main(["verify", "--user", "u1", "--sample", str(probe), "--store", str(store)])
        out = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert rc == 0 and out["accepted"] is True

        short = tmp_path / "short.json"
        short.write_text(json.dumps({"schema_version": 1, "taps": taps_to_obj(extra)[:-1]}))
        rc = main(["verify", "--user", "u1", "--sample", str(short), "--store", str(store)])
        out = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert rc == 3 and out["accepted"] is False and out["reason"] == "length_mismatch"

    def test_verify_unknown_user_exits_2(self, workspace, tmp_path):
        probe = tmp_path / "probe.json"
        write_samples(probe, 1)
        assert main(["verify", "--user", "ghost", "--sample", str(probe),
                     "--store", str(tmp_path / "empty-store")]) == 2


class TestEval:
    def test_eval_runs_and_reports(self, workspace, tmp_path, capsys):
        root, ds, pop = workspace
        report = tmp_path / "report.json"
        csv = tmp_path / "report.csv"
        rc = main(["eval", str(ds), "--pop", str(pop), "--reps", "1", "--n", "3",
                   "--seed", "2", "--report", str(report), "--csv", str(csv)])
        assert rc == 0
        doc = json.loads(report.read_text())
        assert doc["schema_version"] == 1
        assert set(doc["aggregate"]["attack_eer"]) == {"random", "attack1", "attack2", "attack3"}
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "user_id,kind,eer,fpr,fnr,genuine,impostor"
        assert any(line.startswith("__aggregate__,overall") for line in lines)

    def test_same_seed_byte_identical_reports(self, workspace, tmp_path):
        root, ds, pop = workspace
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert main(["eval", str(ds), "--pop", str(pop), "--reps", "1", "--n", "3",
                         "--seed", "7", "--report", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seeds_differ(self, workspace, tmp_path):
        root, ds, pop = workspace
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["eval", str(ds), "--pop", str(pop), "--reps", "1", "--n", "3",
              "--seed", "7", "--report", str(a)])
        main(["eval", str(ds), "--pop", str(pop), "--reps", "1", "--n", "3",
              "--seed", "8", "--report", str(b)])
        assert a.read_bytes() != b.read_bytes()


class TestSweepAndRank:
    def test_sweep_writes_table(self, workspace, tmp_path):
        root, ds, pop = workspace
        report = tmp_path / "sweep.json"
        csv = tmp_path / "sweep.csv"
        rc = main(["sweep-n", str(ds), "--pop", str(pop), "--reps", "1",
                   "--n-values", "2,3", "--classifiers", "svm",
                   "--seed", "2", "--report", str(report), "--csv", str(csv)])
        assert rc == 0
        doc = json.loads(report.read_text())
        assert [(r["classifier"], r["n"]) for r in doc["rows"]] == [("svm", 2), ("svm", 3)]
        assert csv.read_text().splitlines()[0] == "classifier,n,mean_eer"

    def test_rank_features_writes_ranking(self, workspace, tmp_path):
        root, ds, pop = workspace
        report = tmp_path / "rank.json"
        rc = main(["rank-features", str(ds), "--pop", str(pop), "--reps", "1",
                   "--top-k", "5", "--n", "3", "--seed", "2", "--report", str(report)])
        assert rc == 0
        doc = json.loads(report.read_text())
        assert len(doc["features"]) == 5
        importances = [f["importance"] for f in doc["features"]]
        assert importances == sorted(importances, reverse=True)
