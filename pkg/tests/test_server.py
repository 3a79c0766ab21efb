"""Session service tests over the ASGI test client."""

import json

import pytest
from fastapi.testclient import TestClient

from jigrid.engine import GridConfig
from jigrid.server import create_app, port_is_free
from jigrid.session import load_log, replay_steps, snapshot_to_wire


def make_client(tmp_path, **kwargs):
    log_path = tmp_path / "live.limlog"
    app = create_app(log_path=log_path, **kwargs)
    return TestClient(app), log_path


def send_input(ws, at, kind, arg):
    ws.send_text(json.dumps({"type": "input", "at": at, "kind": kind, "arg": arg}))


def recv(ws):
    return json.loads(ws.receive_text())


class TestPerformer:
    def test_draw_shows_pending_cell(self, tmp_path):
        client, _ = make_client(tmp_path)
        with client.websocket_connect("/ws/performer") as ws:
            hello = recv(ws)
            assert hello["type"] == "snapshot"
            assert hello["pending"] == []
            send_input(ws, 0, "button", "draw")
            result = recv(ws)
            assert result == {"type": "result", "at": 0, "accepted": True, "reason": None}
            snap = recv(ws)
            assert snap["type"] == "snapshot"
            assert snap["pending"] == [[8, 8]]
            marquee = recv(ws)
            assert marquee == {
                "type": "effect",
                "name": "marquee",
                "payload": {"color_index": 0},
            }

    def test_malformed_message_leaves_state_alone(self, tmp_path):
        client, log_path = make_client(tmp_path)
        with client.websocket_connect("/ws/performer") as ws:
            recv(ws)
            ws.send_text("not json at all")
            err = recv(ws)
            assert err["type"] == "error"
            send_input(ws, 0, "hold", "draw")
            err = recv(ws)
            assert err["type"] == "error" and "hold" in err["message"]
            # a valid event still works and is the only logged one
            send_input(ws, 5, "button", "draw")
            assert recv(ws)["accepted"]
        log = load_log(log_path)
        assert len(log) == 1
        assert log[0].at == 5 and log[0].arg == "draw"

    def test_second_performer_rejected(self, tmp_path):
        client, _ = make_client(tmp_path)
        with client.websocket_connect("/ws/performer") as first:
            recv(first)
            with client.websocket_connect("/ws/performer") as second:
                msg = recv(second)
                assert msg["type"] == "error"

    def test_timestamps_clamped_monotonic(self, tmp_path):
        client, log_path = make_client(tmp_path)
        with client.websocket_connect("/ws/performer") as ws:
            recv(ws)
            send_input(ws, 100, "button", "draw")
            assert recv(ws)["at"] == 100
            recv(ws), recv(ws)  # snapshot + marquee
            send_input(ws, 40, "move", "up")  # client clock went backwards
            assert recv(ws)["at"] == 100
        log = load_log(log_path)
        assert [e.at for e in log] == [100, 100]


class TestObserver:
    def test_mid_session_join_gets_full_snapshot(self, tmp_path):
        client, _ = make_client(tmp_path)
        with client.websocket_connect("/ws/performer") as performer:
            recv(performer)
            send_input(performer, 0, "button", "draw")
            recv(performer), recv(performer), recv(performer)
            with client.websocket_connect("/ws/observer") as observer:
                snap = recv(observer)
                assert snap["type"] == "snapshot"
                assert snap["pending"] == [[8, 8]]

    def test_observer_sees_broadcasts(self, tmp_path):
        client, _ = make_client(tmp_path)
        with client.websocket_connect("/ws/observer") as observer:
            recv(observer)
            with client.websocket_connect("/ws/performer") as performer:
                recv(performer)
                send_input(performer, 0, "move", "up")
                recv(performer)  # result goes only to the performer
                snap = recv(observer)
                assert snap["type"] == "snapshot"
                assert snap["cursor"] == [7, 8]


class TestLiveReplayEquivalence:
    def test_live_stream_matches_headless_replay(self, tmp_path):
        client, log_path = make_client(
            tmp_path, config=GridConfig(width=12, height=12, origin_row=6, origin_col=6)
        )
        script = [
            (0, "button", "draw"),
            (80, "move", "up"),
            (160, "button", "draw"),
            (240, "move", "right"),
            (320, "button", "draw"),
            (400, "move", "down"),
            (480, "button", "draw"),
            (560, "button", "sonify"),
            (640, "button", "mirror"),
            (720, "button", "sonify"),
            (800, "button", "change_tuning"),
            (880, "button", "end_game"),
        ]
        live_snapshots = []
        with client.websocket_connect("/ws/performer") as ws:
            recv(ws)  # hello snapshot precedes all events
            for at, kind, arg in script:
                send_input(ws, at, kind, arg)
                while True:
                    msg = recv(ws)
                    if msg["type"] == "snapshot":
                        live_snapshots.append(msg)
                        break

        steps = replay_steps(
            load_log(log_path),
            GridConfig(width=12, height=12, origin_row=6, origin_col=6),
        )
        replayed = [snapshot_to_wire(s.snapshot) for s in steps]
        assert live_snapshots == replayed


def test_static_ui_mount(tmp_path):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<html><body>performer</body></html>")
    client = TestClient(create_app(ui_dir=ui))
    page = client.get("/")
    assert page.status_code == 200
    assert "performer" in page.text
    # websocket routes still take precedence over the static mount
    with client.websocket_connect("/ws/observer") as ws:
        assert json.loads(ws.receive_text())["type"] == "snapshot"


def test_port_probe():
    import socket as socket_mod

    sock = socket_mod.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    assert not port_is_free(port)
    sock.close()
    assert port_is_free(port)
