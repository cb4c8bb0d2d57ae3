import pytest

from tapmein.evalbench import SynthParams, synth_dataset
from tapmein.gateway.documents import (
    SchemaViolation,
    export_dataset,
    dump_population_stats,
    import_dataset,
    load_population_stats,
    parse_dataset,
    parse_population_stats,
    parse_sample_file,
    population_stats_to_obj,
)


@pytest.fixture(scope="module")
def corpus():
    return synth_dataset(SynthParams(users=3, genuine_per_condition=4, attackers=2, seed=44))


class TestDatasetRoundTrip:
    def test_file_round_trip_is_stable(self, corpus, tmp_path):
        ds, _ = corpus
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        export_dataset(ds, first)
        export_dataset(import_dataset(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_samples_and_labels_survive(self, corpus, tmp_path):
        ds, _ = corpus
        path = tmp_path / "ds.json"
        export_dataset(ds, path)
        again = import_dataset(path)
        for ua, ub in zip(ds.users, again.users):
            assert ua.user_id == ub.user_id
            assert len(ua.genuine) == len(ub.genuine)
            for sa, sb in zip(ua.genuine, ub.genuine):
                assert sa.taps == sb.taps
                assert sa.meta.condition == sb.meta.condition
            for kind in ua.attacks:
                for sa, sb in zip(ua.attacks[kind], ub.attacks[kind]):
                    assert sa.taps == sb.taps
                    assert sa.meta.attacker_id == sb.meta.attacker_id


def minimal_dataset_obj():
    taps = [
        {"down_ts": i * 200.0, "up_ts": i * 200.0 + 80.0, "pressure": 0.5, "size": 0.5}
        for i in range(5)
    ]
    return {
        "schema_version": 1,
        "users": [
            {
                "user_id": "alice",
                "samples": [
                    {"condition": "sitting", "kind": "genuine", "taps": taps},
                    {"condition": "walking", "kind": "genuine", "taps": taps},
                ],
            }
        ],
    }


class TestDatasetValidation:
    def test_minimal_document_parses(self):
        ds = parse_dataset(minimal_dataset_obj())
        assert ds.users[0].user_id == "alice"

    def test_missing_up_ts_names_the_field(self):
        obj = minimal_dataset_obj()
        del obj["users"][0]["samples"][0]["taps"][2]["up_ts"]
        with pytest.raises(SchemaViolation) as err:
            parse_dataset(obj)
        assert "up_ts" in str(err.value)
        assert "users[0].samples[0].taps[2]" in str(err.value)

    def test_unknown_condition_rejected(self):
        obj = minimal_dataset_obj()
        obj["users"][0]["samples"][0]["condition"] = "running"
        with pytest.raises(SchemaViolation) as err:
            parse_dataset(obj)
        assert "running" in str(err.value)

    def test_unknown_kind_rejected(self):
        obj = minimal_dataset_obj()
        obj["users"][0]["samples"][0]["kind"] = "replay"
        with pytest.raises(SchemaViolation):
            parse_dataset(obj)

    def test_unknown_key_rejected(self):
        obj = minimal_dataset_obj()
        obj["users"][0]["extra"] = 1
        with pytest.raises(SchemaViolation) as err:
            parse_dataset(obj)
        assert "extra" in str(err.value)

    def test_bad_user_id_rejected(self):
        obj = minimal_dataset_obj()
        obj["users"][0]["user_id"] = "Alice!"
        with pytest.raises(SchemaViolation):
            parse_dataset(obj)

    def test_wrong_schema_version_rejected(self):
        obj = minimal_dataset_obj()
        obj["schema_version"] = 2
        with pytest.raises(SchemaViolation):
            parse_dataset(obj)

    def test_non_numeric_tap_value_rejected(self):
        obj = minimal_dataset_obj()
        obj["users"][0]["samples"][0]["taps"][0]["pressure"] = "high"
        with pytest.raises(SchemaViolation):
            parse_dataset(obj)

    def test_invalid_sequence_rejected_with_locus(self):
        obj = minimal_dataset_obj()
        obj["users"][0]["samples"][0]["taps"][1]["down_ts"] = 10.0  # overlaps tap 0
        with pytest.raises(SchemaViolation) as err:
            parse_dataset(obj)
        assert "users" in str(err.value)

    def test_mixed_lengths_within_user_rejected(self):
        obj = minimal_dataset_obj()
        obj["users"][0]["samples"][1]["taps"] = obj["users"][0]["samples"][1]["taps"][:4]
        with pytest.raises(SchemaViolation):
            parse_dataset(obj)


class TestPopulationStatsDocument:
    def test_round_trip(self, corpus, tmp_path):
        _, stats = corpus
        path = tmp_path / "pop.json"
        dump_population_stats(stats, path)
        again = load_population_stats(path)
        assert again == stats

    def test_missing_channel_rejected(self, corpus):
        _, stats = corpus
        obj = population_stats_to_obj(stats)
        del obj["up"]
        with pytest.raises(SchemaViolation) as err:
            parse_population_stats(obj)
        assert "up" in str(err.value)

    def test_invalid_channel_bounds_rejected(self, corpus):
        _, stats = corpus
        obj = population_stats_to_obj(stats)
        obj["pressure"]["mean"] = 5.0
        with pytest.raises(SchemaViolation):
            parse_population_stats(obj)


class TestSampleFiles:
    def test_single_sample_form(self):
        taps = minimal_dataset_obj()["users"][0]["samples"][0]["taps"]
        seqs = parse_sample_file({"schema_version": 1, "taps": taps})
        assert len(seqs) == 1 and len(seqs[0]) == 5

    def test_multi_sample_form(self):
        taps = minimal_dataset_obj()["users"][0]["samples"][0]["taps"]
        seqs = parse_sample_file(
            {"schema_version": 1, "samples": [{"taps": taps}, {"taps": taps}]}
        )
        assert len(seqs) == 2

    def test_not_json_reported_with_path(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        from tapmein.gateway.documents import load_sample_file

        with pytest.raises(SchemaViolation):
            load_sample_file(bad)
