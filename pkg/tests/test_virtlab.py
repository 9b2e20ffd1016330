import math

import httpx
import numpy as np
import pytest

from oracles.grid_optimum import g_of_u as oracle_g
from prim.space import NonIntegral, OutOfBounds
from prim.virtlab import (GRID_OPTIMUM, PEAK, LabClient, MalformedResponse, RemoteRejection,
                          SurrogateConfig, Unreachable, client_evaluate, evaluate_g_factor,
                          serve)
from prim.virtlab.server import BindFailure

# tests/oracles/grid_optimum.py formula evaluated at PEAK with n_turns=7
PEAK_VALUE = 1.0498199719305208


def peak_vector(space):
    vec = {d.name: d.lower + c * d.width for d, c in zip(space.dims, PEAK)}
    vec["n_turns"] = 7.0  # 6.5 rounded half-up
    return vec


def test_value_at_peak_center(space):
    assert evaluate_g_factor(peak_vector(space)) == pytest.approx(PEAK_VALUE, abs=1e-12)


def test_matches_independent_formula(space):
    rng = np.random.default_rng(0)
    for _ in range(200):
        vec = space.sample_uniform(rng)
        u = [d.normalize(vec[d.name]) for d in space.dims]
        assert evaluate_g_factor(vec) == pytest.approx(float(oracle_g(u)), abs=1e-12)


def test_bounded_and_deterministic(space):
    rng = np.random.default_rng(3)
    for _ in range(2000):
        vec = space.sample_uniform(rng)
        g = evaluate_g_factor(vec)
        assert 0 < g <= 1.1
        assert evaluate_g_factor(vec) == g


def test_surface_at_grid_argmax_equals_optimum(space):
    # grid argmax from the oracle run
    u = [0.375, 0.625, 0.25, 0.5, 0.25, 3 / 7, 0.75, 0.375, 0.5]
    vec = {d.name: d.lower + ui * d.width for d, ui in zip(space.dims, u)}
    vec["n_turns"] = 6.0
    assert evaluate_g_factor(vec) == pytest.approx(GRID_OPTIMUM, abs=1e-12)


def test_bump_decays_away_from_peak_along_height(space):
    # height carries no ripple term, so g is unimodal along it near the peak
    base = peak_vector(space)
    dim = space["height"]
    for ladder in (np.linspace(0.45, 0.95, 21), np.linspace(0.45, 0.0, 21)):
        values = [evaluate_g_factor({**base, "height": dim.lower + u * dim.width})
                  for u in ladder]
        assert all(a > b for a, b in zip(values, values[1:]))


def test_validation_errors(space):
    with pytest.raises(OutOfBounds):
        evaluate_g_factor({**space.midpoint(), "helix_radius": 150})
    with pytest.raises(NonIntegral):
        evaluate_g_factor({**space.midpoint(), "n_turns": 4.5})
    with pytest.raises(KeyError):
        evaluate_g_factor({"helix_radius": 50})


def test_noise_is_seeded(space):
    vec = space.midpoint()
    clean = evaluate_g_factor(vec)
    cfg = SurrogateConfig(noise_stddev=0.01, seed=7)
    a, b = evaluate_g_factor(vec, cfg), evaluate_g_factor(vec, cfg)
    assert a == b and a != clean
    assert evaluate_g_factor(vec, SurrogateConfig(0.01, seed=8)) != a
    with pytest.raises(ValueError):
        SurrogateConfig(noise_stddev=-1)


def test_http_health_and_experiment(lab_server, space):
    with httpx.Client() as http:
        r = http.get(f"{lab_server.url}/health")
        assert r.status_code == 200 and r.json() == {"status": "ok"}
        vec = space.midpoint()
        r = http.post(f"{lab_server.url}/experiment", json={"parameters": vec})
        assert r.status_code == 200
        assert r.json() == {"g_factor": evaluate_g_factor(vec)}


@pytest.mark.parametrize("params, code, dim", [
    ({"helix_radius": 150}, "out_of_bounds", "helix_radius"),
    ({"n_turns": 4.5}, "non_integral", "n_turns"),
    ({"radius": 1.0}, "unknown_dimension", "radius"),
])
def test_http_422(lab_server, space, params, code, dim):
    body = {"parameters": {**space.midpoint(), **params}}
    r = httpx.post(f"{lab_server.url}/experiment", json=body)
    assert r.status_code == 422
    assert r.json() == {"error": {"code": code, "dim": dim}}


@pytest.mark.parametrize("content", [b"{not json", b'{"params": {}}', b'{"parameters": [1]}',
                                     b'{"parameters": {"pitch": "x"}}'])
def test_http_400_malformed(lab_server, content):
    r = httpx.post(f"{lab_server.url}/experiment", content=content,
                   headers={"Content-Type": "application/json"})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "malformed_request"


def test_client_round_trip(lab_server, space):
    rng = np.random.default_rng(9)
    with LabClient(lab_server.url) as client:
        for _ in range(50):
            vec = space.sample_uniform(rng)
            assert client.evaluate(vec) == evaluate_g_factor(vec)
    assert client_evaluate(lab_server.url, space.midpoint()) == evaluate_g_factor(space.midpoint())


def test_client_rejection_carries_reason(lab_server, space):
    with LabClient(lab_server.url) as client:
        with pytest.raises(RemoteRejection) as err:
            client.evaluate({**space.midpoint(), "helix_radius": 150})
    assert err.value.status == 422
    assert err.value.reason == {"code": "out_of_bounds", "dim": "helix_radius"}


def test_client_unreachable_after_retries(space):
    calls = []

    def handler(request):
        calls.append(request)
        raise httpx.ConnectError("refused", request=request)

    client = LabClient("http://lab.invalid", retries=2, backoff=0.0,
                       transport=httpx.MockTransport(handler))
    with pytest.raises(Unreachable):
        client.evaluate(space.midpoint())
    assert len(calls) == 3


def test_client_recovers_from_transient_failure(space):
    calls = []

    def handler(request):
        calls.append(request)
        if len(calls) == 1:
            raise httpx.ConnectError("refused", request=request)
        return httpx.Response(200, json={"g_factor": 0.5})

    client = LabClient("http://lab", retries=2, backoff=0.0, transport=httpx.MockTransport(handler))
    assert client.evaluate(space.midpoint()) == 0.5


@pytest.mark.parametrize("response", [
    httpx.Response(200, text="<html>oops</html>"),
    httpx.Response(200, json={"value": 1}),
    httpx.Response(200, json={"g_factor": "high"}),
])
def test_client_malformed_response(space, response):
    client = LabClient("http://lab", transport=httpx.MockTransport(lambda r: response))
    with pytest.raises(MalformedResponse):
        client.evaluate(space.midpoint())


def test_bind_failure(lab_server):
    port = lab_server.server_address[1]
    with pytest.raises(BindFailure):
        serve("127.0.0.1", port)


def test_noisy_server_is_seed_reproducible(space):
    cfg = SurrogateConfig(noise_stddev=0.01, seed=7)
    with serve("127.0.0.1", 0, cfg) as server:
        vec = space.midpoint()
        a = client_evaluate(server.url, vec)
        b = client_evaluate(server.url, vec)
    assert a == b == evaluate_g_factor(vec, cfg)
    assert math.isfinite(a)
