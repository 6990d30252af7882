import json
import sys
import threading
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"
FIXTURE_LOG = DATA / "fixture_6h.log"
FIXTURE_SEED = 20170601


def utx(tx_id, inputs, outputs, **extra):
    x = {
        "hash": tx_id,
        "time": 1496275200,
        "inputs": [{"prev_out": {"addr": a, "value": v}} for a, v in inputs],
        "out": [{"addr": a, "value": v} for a, v in outputs],
    }
    x.update(extra)
    return {"op": "utx", "x": x}


class FeedServer:
    """A local websocket endpoint replaying scripted frames after subscription."""

    def __init__(self, frames, interval=0.0, close_after=False):
        from websockets.sync.server import serve

        self.frames = frames
        self.interval = interval
        self.close_after = close_after
        self.subscriptions = []
        self._server = serve(self._handler, "127.0.0.1", 0)
        self.port = self._server.socket.getsockname()[1]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self):
        return f"ws://127.0.0.1:{self.port}"

    def _handler(self, ws):
        from websockets.exceptions import ConnectionClosed

        self.subscriptions.append(ws.recv())
        try:
            for frame in self.frames:
                ws.send(frame if isinstance(frame, str) else json.dumps(frame))
                if self.interval:
                    time.sleep(self.interval)
            if self.close_after:
                return
            for _ in ws:
                pass
        except ConnectionClosed:
            pass

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._thread.join(timeout=5)


@pytest.fixture
def feed_server():
    return FeedServer


@pytest.fixture(scope="session")
def fixture_log():
    assert FIXTURE_LOG.exists(), "run tests/make_goldens.py to create the bundled fixture"
    return FIXTURE_LOG


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
