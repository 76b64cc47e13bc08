"""
Tests for the HTTP and WebSocket surface
"""
import threading
from types import SimpleNamespace

import anyio
import numpy as np
import pytest
from fastapi.testclient import TestClient
from starlette.websockets import WebSocketDisconnect

from gpdmm.api import websocket as websocket_module
from gpdmm.config import settings
from gpdmm.main import app
from gpdmm.models.api import GenerateRequest


@pytest.fixture
def client(model_path, monkeypatch):
    monkeypatch.setattr(settings, "MODEL_PATH", str(model_path))
    monkeypatch.setattr(settings, "STREAM_INTERVAL", 0.0)
    with TestClient(app) as client:
        yield client


@pytest.fixture
def prefix(small_dataset, small_split):
    return small_dataset.sequences[small_split.test[0]].values[:10].tolist()


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["websocket_endpoint"] == "/ws/generate"


def test_health_reports_model_shape(client, trained_model):
    body = client.get("/health").json()
    assert body["status"] == "healthy"
    assert body["model"]["classes"] == list(trained_model.class_labels)
    assert body["model"]["D"] == 4
    assert body["model"]["Q"] == trained_model.Q
    assert body["model"]["sparse"] is False


def test_classify(client, prefix):
    response = client.post("/classify", json={"frames": prefix})
    assert response.status_code == 200
    body = response.json()
    assert abs(sum(body["posterior"]) - 1.0) < 1e-9
    assert body["prefix_length"] == 10
    assert body["predicted_label"] in ("motion_0", "motion_1")


def test_generate(client, prefix):
    response = client.post("/generate", json={"frames": prefix, "horizon": 5, "class_hint": "motion_1"})
    assert response.status_code == 200
    body = response.json()
    assert body["class_index"] == 1
    assert body["class_label"] == "motion_1"
    assert len(body["frames"]) == 5
    assert all(len(row) == 4 for row in body["frames"])


def test_generate_with_zero_horizon(client, prefix):
    body = client.post("/generate", json={"frames": prefix, "horizon": 0}).json()
    assert body["frames"] == []


def test_short_prefix_is_rejected(client, prefix):
    response = client.post("/classify", json={"frames": prefix[:1]})
    assert response.status_code == 422
    assert response.json()["error"] == "InsufficientPrefixError"


def test_wrong_width_is_rejected(client):
    response = client.post("/classify", json={"frames": [[0.0, 0.0, 0.0]] * 6})
    assert response.status_code == 422
    assert response.json()["error"] == "ShapeError"


def test_ragged_frames_fail_validation(client):
    response = client.post("/classify", json={"frames": [[0.0] * 4, [0.0] * 3]})
    assert response.status_code == 422


def test_unknown_class_hint_is_rejected(client, prefix):
    response = client.post("/generate", json={"frames": prefix, "horizon": 3, "class_hint": "nope"})
    assert response.status_code == 422
    assert response.json()["error"] == "UsageError"


def test_websocket_streams_frames(client, prefix):
    with client.websocket_connect("/ws/generate") as websocket:
        websocket.send_json({"frames": prefix, "horizon": 4, "class_hint": 0})
        frames = [websocket.receive_json() for _ in range(4)]
        with pytest.raises(WebSocketDisconnect):
            websocket.receive_json()
    assert [f["step"] for f in frames] == [0, 1, 2, 3]
    assert all(f["class_label"] == "motion_0" and len(f["values"]) == 4 for f in frames)


def test_websocket_rejects_bad_request(client):
    with client.websocket_connect("/ws/generate") as websocket:
        websocket.send_json({"frames": [[0.0] * 4] * 5})
        message = websocket.receive_json()
        assert message["error"] == "ValidationError"
        with pytest.raises(WebSocketDisconnect) as exc:
            websocket.receive_json()
    assert exc.value.code == 1003


def test_stream_generation_leaves_the_event_loop_free(trained_model, monkeypatch):
    started, released = threading.Event(), threading.Event()

    def slow_continue(model, frames, class_hint, horizon):
        started.set()
        # only the other task on the loop can release this
        assert released.wait(5)
        return 0, np.zeros((2, model.D))

    monkeypatch.setattr(websocket_module, "continue_prefix", slow_continue)
    monkeypatch.setattr(settings, "STREAM_INTERVAL", 0.0)
    sent = []

    async def send_text(text):
        sent.append(text)

    fake_socket = SimpleNamespace(app=SimpleNamespace(state=SimpleNamespace(model=trained_model)),
                                  send_text=send_text)
    request = GenerateRequest(frames=[[0.0] * 4] * 5, horizon=2)

    async def other_request():
        while not started.is_set():
            await anyio.sleep(0.001)
        released.set()

    async def run():
        async with anyio.create_task_group() as tg:
            tg.start_soon(other_request)
            await websocket_module.manager.stream(fake_socket, request)

    anyio.run(run)
    assert len(sent) == 2
