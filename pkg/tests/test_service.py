import json
import threading
import time
import urllib.error
import urllib.request

import numpy as np
import pytest

from tapmein.authflow import TrainingConfig, verify
from tapmein.gateway.documents import parse_taps, taps_to_obj
from tapmein.gateway.service import create_server
from tapmein.gateway.store import ProfileStore
from tapmein.negatives import fit_population_stats
from tapmein.tapcore import extract_durations
from tests.conftest import melody_samples, random_sequence


@pytest.fixture(scope="module")
def stats():
    rng = np.random.default_rng(6)
    return fit_population_stats(
        [extract_durations(random_sequence(rng, int(rng.integers(5, 10)))) for _ in range(30)]
    )


@pytest.fixture()
def service(stats, tmp_path):
    server = create_server(tmp_path, stats, TrainingConfig(master_seed=77), port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, f"http://127.0.0.1:{server.server_address[1]}", tmp_path
    server.shutdown()
    server.server_close()


def request(base, method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(
        base + path, data=data, method=method, headers={"Content-Type": "application/json"}
    )
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            raw = resp.read()
            return resp.status, json.loads(raw) if raw else None
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read() or b"null")


def genuine_taps(count, seed=9, l=6):
    return [taps_to_obj(s) for s in melody_samples(np.random.default_rng(seed), l=l, count=count)]


class TestEndpoints:
    def test_health(self, service):
        _, base, _ = service
        assert request(base, "GET", "/api/health") == (200, {"status": "ok"})

    def test_enroll_then_verify_happy_path(self, service):
        _, base, _ = service
        taps = genuine_taps(6)
        status, body = request(base, "POST", "/api/users/alice/enroll", {"samples": [{"taps": t} for t in taps[:5]]})
        assert status == 201
        assert body["user_id"] == "alice" and body["length"] == 6
        status, body = request(base, "POST", "/api/users/alice/verify", {"taps": taps[5]})
        assert status == 200
        assert body["reason"] == "ok"
        assert isinstance(body["accepted"], bool) and "score" in body

    def test_length_mismatch_reported_without_score(self, service):
        _, base, _ = service
        taps = genuine_taps(6)
        request(base, "POST", "/api/users/bob/enroll", {"samples": [{"taps": t} for t in taps[:5]]})
        status, body = request(base, "POST", "/api/users/bob/verify", {"taps": taps[5][:-1]})
        assert status == 200
        assert body == {"accepted": False, "reason": "length_mismatch", "threshold": body["threshold"]}

    def test_verify_unknown_user(self, service):
        _, base, _ = service
        status, body = request(base, "POST", "/api/users/ghost/verify", {"taps": genuine_taps(1)[0]})
        assert status == 404
        assert body["error"]["code"] == "not_found"

    def test_insufficient_enrollment(self, service):
        _, base, _ = service
        taps = genuine_taps(3)
        status, body = request(base, "POST", "/api/users/carol/enroll", {"samples": [{"taps": t} for t in taps]})
        assert status == 400
        assert body["error"]["code"] == "insufficient_enrollment"

    def test_malformed_sample_rejected(self, service):
        _, base, _ = service
        taps = genuine_taps(5)
        taps[0][0]["pressure"] = 3.0
        status, body = request(base, "POST", "/api/users/dan/enroll", {"samples": [{"taps": t} for t in taps]})
        assert status == 400
        assert body["error"]["code"] == "invalid_sample"

    def test_list_and_delete(self, service):
        _, base, _ = service
        taps = genuine_taps(5)
        request(base, "POST", "/api/users/erin/enroll", {"samples": [{"taps": t} for t in taps]})
        assert request(base, "GET", "/api/users") == (200, ["erin"])
        assert request(base, "DELETE", "/api/users/erin")[0] == 204
        assert request(base, "DELETE", "/api/users/erin")[0] == 404
        assert request(base, "GET", "/api/users") == (200, [])

    def test_unknown_route(self, service):
        _, base, _ = service
        assert request(base, "GET", "/api/nope")[0] == 404

    def test_bad_json_body(self, service):
        _, base, _ = service
        req = urllib.request.Request(
            base + "/api/users/alice/verify", data=b"{nope", method="POST",
            headers={"Content-Type": "application/json"},
        )
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(req, timeout=10)
        assert err.value.code == 400


class TestEngineEquivalence:
    def test_api_decision_matches_in_process_verify(self, service, stats):
        _, base, store_dir = service
        taps = genuine_taps(6, seed=15)
        request(base, "POST", "/api/users/frank/enroll", {"samples": [{"taps": t} for t in taps[:5]]})
        profile = ProfileStore(store_dir).load_profile("frank")

        probes = [taps[5], taps[5][:-1]]
        rng = np.random.default_rng(3)
        probes += [taps_to_obj(random_sequence(rng, 6)) for _ in range(5)]
        for probe in probes:
            _, body = request(base, "POST", "/api/users/frank/verify", {"taps": probe})
            local = verify(profile, parse_taps(probe, "taps"))
            assert body["accepted"] == local.accepted
            assert body["reason"] == local.reason
            assert body.get("score") == (local.score if local.score is not None else None)


class TestConcurrentEnrollment:
    def test_second_concurrent_enrollment_conflicts(self, service, stats, monkeypatch):
        server, base, store_dir = service
        taps = genuine_taps(5, seed=21)

        import tapmein.gateway.service as service_mod

        gate = threading.Event()
        original = service_mod.enroll

        def slow_enroll(*args, **kwargs):
            gate.wait(timeout=10)
            return original(*args, **kwargs)

        monkeypatch.setattr(service_mod, "enroll", slow_enroll)
        results = []

        def call():
            results.append(request(base, "POST", "/api/users/greg/enroll",
                                    {"samples": [{"taps": t} for t in taps]}))

        first = threading.Thread(target=call)
        second = threading.Thread(target=call)
        first.start()
        time.sleep(0.3)
        second.start()
        second.join(timeout=10)
        gate.set()
        first.join(timeout=15)

        statuses = sorted(code for code, _ in results)
        assert statuses == [201, 409]
        assert ProfileStore(store_dir).list_users() == ["greg"]
