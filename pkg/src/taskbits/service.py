"""Live session service: newline-delimited JSON over a local TCP socket.

One session per connection.  The client sends a ``declare`` record, then
timestamped ``sample`` records; the service answers every sample with a
``metric`` record computed from an incremental rolling window.  ``trial``
records mark trial boundaries; on ``end`` (or socket close) the service
replies with a ``summary`` holding per-trial consumed information and,
for pointing sessions, per-block throughput.

Record grammar (one JSON object per line, ``seq`` echoed in every reply):

  declare  {type, seq, schema, task_kind, window_s, capacity_a,
            capacity_b, s_level | amplitude+width, rate_hz?}
  sample   {type, seq, t, gap}          (car-following)
           {type, seq, t, x}            (pointing)
  trial    {type, seq, trial_id, kind, delta_s, mean_gap,
            response_onset, end_time, collided?}
  click    {type, seq, t, hit}          (pointing)
  end      {type, seq}

  metric   {type, seq, t, ns_ratio, surprise_bits, capacity_bits,
            remaining_bits, collision_flag, unbounded}
  error    {type, seq, message}
  summary  {type, seq, trials: [...], blocks: [...], n_samples}

Timestamps are seconds as decimals, gaps are meters.  Samples must
arrive in non-decreasing time order; an out-of-order sample gets an
``error`` reply and is discarded, the session continues.  At most
``QUEUE_BOUND`` parsed-but-unprocessed records may queue; beyond that
the session errors out explicitly.
"""

from __future__ import annotations

import json
import logging
import math
import socket
import socketserver
import threading
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .estimator import WINDOW_EDGE_EPS, WindowError, window_stats
from .surprise import avoidance_surprise, error_bits_from_rate

SCHEMA_VERSION = 1
QUEUE_BOUND = 10000
#: incremental sums are recomputed from the ring buffer this often
RECOMPUTE_EVERY = 4096

log = logging.getLogger("taskbits.service")


class RollingWindow:
    """Incremental mean/sigma over samples with t in (end - width, end].

    Constant time per sample via running sums over a ring buffer; the
    sums are recomputed from scratch every RECOMPUTE_EVERY updates so
    float drift stays below 1e-9 of the batch result.
    """

    def __init__(self, width: float):
        self.width = width
        self.buf: deque[tuple[float, float]] = deque()
        self.s1 = 0.0
        self.s2 = 0.0
        self._updates = 0

    def push(self, t: float, value: float) -> None:
        self.buf.append((t, value))
        self.s1 += value
        self.s2 += value * value
        cutoff = t - self.width - WINDOW_EDGE_EPS
        while self.buf and self.buf[0][0] < cutoff:
            _, old = self.buf.popleft()
            self.s1 -= old
            self.s2 -= old * old
        self._updates += 1
        if self._updates >= RECOMPUTE_EVERY:
            self._updates = 0
            self.s1 = math.fsum(v for _, v in self.buf)
            self.s2 = math.fsum(v * v for _, v in self.buf)

    def stats(self) -> tuple[float, float, int]:
        n = len(self.buf)
        if n == 0:
            return 0.0, 0.0, 0
        mean = self.s1 / n
        var = max(0.0, self.s2 / n - mean * mean)
        return mean, math.sqrt(var), n


@dataclass
class Session:
    """Protocol state machine for one connection."""

    window_s: float = 1.0
    declared: bool = False
    task_kind: str = ""
    capacity_a: float = 0.0
    capacity_b: float = 1.0
    s_level: float = 0.0
    amplitude: float = 0.0
    width: float = 0.0
    last_t: float = -math.inf
    rolling: RollingWindow | None = None
    t_hist: list[float] = field(default_factory=list)
    v_hist: list[float] = field(default_factory=list)
    trials: list[dict] = field(default_factory=list)
    clicks: list[dict] = field(default_factory=list)
    ended: bool = False

    def handle(self, rec: dict) -> list[dict]:
        seq = rec.get("seq")
        kind = rec.get("type")
        try:
            if kind == "declare":
                return [self._declare(rec)]
            if not self.declared:
                return [_err(seq, "session refused: no declaration")]
            if kind == "sample":
                return [self._sample(rec)]
            if kind == "trial":
                self.trials.append({k: rec.get(k) for k in (
                    "trial_id", "kind", "delta_s", "mean_gap",
                    "response_onset", "end_time", "collided")})
                return []
            if kind == "click":
                self.clicks.append({"t": float(rec["t"]),
                                    "hit": bool(rec.get("hit", True))})
                return []
            if kind == "end":
                self.ended = True
                return [self._summary(seq)]
            return [_err(seq, f"unknown record type {kind!r}")]
        except (KeyError, TypeError, ValueError) as exc:
            return [_err(seq, f"malformed {kind} record: {exc}")]

    def _declare(self, rec: dict) -> dict:
        if rec.get("schema") != SCHEMA_VERSION:
            return _err(rec.get("seq"),
                        f"unsupported schema {rec.get('schema')!r}")
        task = rec["task_kind"]
        if task not in ("car-following", "pointing"):
            return _err(rec.get("seq"), f"unknown task_kind {task!r}")
        window_s = float(rec.get("window_s", self.window_s))
        if window_s < 0.2:
            return _err(rec.get("seq"), f"window_s must be >= 0.2, got {window_s}")
        if task == "car-following":
            s_level = float(rec["s_level"])
            if s_level <= 0:
                return _err(rec.get("seq"), f"s_level must be > 0, got {s_level}")
            self.s_level = s_level
        else:
            amp, width = float(rec["amplitude"]), float(rec["width"])
            if amp <= 0 or width <= 0:
                return _err(rec.get("seq"), "amplitude and width must be > 0")
            self.amplitude, self.width = amp, width
        self.task_kind = task
        self.window_s = window_s
        self.capacity_a = float(rec.get("capacity_a", 0.0))
        self.capacity_b = float(rec.get("capacity_b", 1.0))
        self.rolling = RollingWindow(window_s)
        self.declared = True
        return {"type": "metric", "seq": rec.get("seq"), "t": None,
                "ns_ratio": None, "surprise_bits": None,
                "capacity_bits": None, "remaining_bits": None,
                "collision_flag": False, "unbounded": False}

    def _sample(self, rec: dict) -> dict:
        seq = rec.get("seq")
        t = float(rec["t"])
        if t < self.last_t:
            return _err(seq, f"out-of-order sample t={t!r} after {self.last_t!r}")
        self.last_t = t
        value = float(rec["gap"] if self.task_kind == "car-following"
                      else rec["x"])
        self.rolling.push(t, value)
        self.t_hist.append(t)
        self.v_hist.append(value)
        mean, sigma, n = self.rolling.stats()
        collision = self.task_kind == "car-following" and value <= 0.0
        unbounded = collision or mean <= 0.0
        out = {"type": "metric", "seq": seq, "t": t,
               "collision_flag": collision, "unbounded": unbounded}
        if unbounded or n < 2:
            out.update(ns_ratio=None, surprise_bits=None,
                       capacity_bits=None, remaining_bits=None,
                       unbounded=unbounded)
            return out
        ratio = sigma / mean
        cap = self.capacity_a + self.capacity_b * math.log2(ratio + 1.0)
        out.update(ns_ratio=ratio, surprise_bits=ratio * ratio,
                   capacity_bits=cap,
                   remaining_bits=self.capacity_b - cap)
        return out

    def _summary(self, seq) -> dict:
        t = np.array(self.t_hist)
        v = np.array(self.v_hist)
        trials_out = []
        for tr in self.trials:
            entry = {"trial_id": tr["trial_id"], "kind": tr["kind"]}
            measurable = (tr.get("kind") == "decel"
                          and not tr.get("collided")
                          and tr.get("response_onset") is not None
                          and tr.get("mean_gap", 0) and tr["mean_gap"] > 0)
            if measurable and t.size:
                try:
                    w1 = window_stats(t, v, float(tr["response_onset"]),
                                      self.window_s)
                    w2 = window_stats(t, v, float(tr["end_time"]),
                                      self.window_s)
                    stim = avoidance_surprise(w1.mean_gap, w1.sigma_gap)
                    rem = avoidance_surprise(w2.mean_gap, w2.sigma_gap)
                    entry.update(
                        ns_ratio=float(tr["delta_s"]) / float(tr["mean_gap"]),
                        stimulus_bits=stim, remaining_bits=rem,
                        consumed_bits=stim - rem)
                except (WindowError, ValueError) as exc:
                    entry["skipped"] = str(exc)
            else:
                entry["skipped"] = "not measurable"
            trials_out.append(entry)
        blocks = []
        if self.task_kind == "pointing" and len(self.clicks) >= 2:
            mts = [b["t"] - a["t"] for a, b in zip(self.clicks, self.clicks[1:])]
            mean_mt = sum(mts) / len(mts)
            id_bits = math.log2(self.amplitude / self.width + 1.0)
            misses = sum(1 for c in self.clicks if not c["hit"])
            p_err = misses / len(self.clicks)
            blocks.append({
                "id_bits": id_bits,
                "mean_mt_s": mean_mt,
                "throughput_bps": id_bits / mean_mt if mean_mt > 0 else None,
                "n_clicks": len(self.clicks),
                "error_rate": p_err,
                "error_bits": error_bits_from_rate(p_err) if p_err < 1.0 else None,
            })
        return {"type": "summary", "seq": seq, "trials": trials_out,
                "blocks": blocks, "n_samples": int(t.size)}


def _err(seq, message: str) -> dict:
    return {"type": "error", "seq": seq, "message": message}


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        session = Session(window_s=self.server.window_s)
        self.wfile = self.request.makefile("wb")
        pending: deque[bytes] = deque()
        tail = b""
        while not session.ended:
            if not pending:
                # one recv per drain; a client that outruns processing is
                # throttled by TCP flow control, not dropped
                try:
                    self.wfile.flush()
                    chunk = self.request.recv(65536)
                except (ConnectionResetError, OSError):
                    break
                if not chunk:
                    break
                lines = (tail + chunk).split(b"\n")
                tail = lines.pop()
                pending.extend(lines)
                if len(pending) > QUEUE_BOUND:
                    self._send(_err(None, f"queue bound {QUEUE_BOUND} exceeded"))
                    return
            line = pending.popleft().strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                self._send(_err(None, f"bad record: {exc}"))
                continue
            for reply in session.handle(rec):
                self._send(reply)
        try:
            self.wfile.flush()
        except OSError:
            pass

    def _send(self, doc: dict) -> None:
        try:
            self.wfile.write(json.dumps(doc).encode() + b"\n")
        except (BrokenPipeError, ConnectionResetError):
            pass


class SessionServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, port: int = 0, window_s: float = 1.0):
        super().__init__(("127.0.0.1", port), _Handler)
        self.window_s = window_s

    @property
    def port(self) -> int:
        return self.server_address[1]


def start_server(port: int = 0, window_s: float = 1.0) -> SessionServer:
    """Start the service on a background thread; returns the server."""
    server = SessionServer(port, window_s)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


def serve(port: int = 0, window_s: float = 1.0, ws_port: int | None = None):
    """Run the service in the foreground (blocks until interrupted)."""
    server = SessionServer(port, window_s)
    print(f"listening on 127.0.0.1:{server.port}", flush=True)
    if ws_port is not None:
        threading.Thread(target=_ws_bridge, args=(server.port, ws_port),
                         daemon=True).start()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def _ws_bridge(tcp_port: int, ws_port: int) -> None:
    """WebSocket-to-TCP shim so browser clients can reach the service.

    Text frames are forwarded verbatim as protocol lines and vice versa;
    requires the optional ``websockets`` dependency.
    """
    import asyncio

    import websockets

    async def relay(ws):
        reader, writer = await asyncio.open_connection("127.0.0.1", tcp_port)

        async def pump_up():
            async for msg in ws:
                writer.write(msg.encode() if isinstance(msg, str) else msg)
                if not msg.endswith("\n" if isinstance(msg, str) else b"\n"):
                    writer.write(b"\n")
                await writer.drain()

        async def pump_down():
            while True:
                line = await reader.readline()
                if not line:
                    break
                await ws.send(line.decode().rstrip("\n"))

        try:
            await asyncio.gather(pump_up(), pump_down())
        except websockets.ConnectionClosed:
            pass
        finally:
            writer.close()

    async def main():
        async with websockets.serve(relay, "127.0.0.1", ws_port):
            print(f"websocket bridge on 127.0.0.1:{ws_port}", flush=True)
            await asyncio.Future()

    asyncio.run(main())


class ServiceClient:
    """Line-oriented client with a background reader thread."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self.sock = socket.create_connection((host, port))
        self.rfile = self.sock.makefile("rb")
        self.replies: deque[dict] = deque()
        self._cv = threading.Condition()
        self._closed = False
        self._seq = 0
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self):
        for line in self.rfile:
            doc = json.loads(line)
            with self._cv:
                self.replies.append(doc)
                self._cv.notify_all()
        with self._cv:
            self._closed = True
            self._cv.notify_all()

    def send(self, rec: dict) -> int:
        self._seq += 1
        rec = {"seq": self._seq, **rec}
        self.sock.sendall(json.dumps(rec).encode() + b"\n")
        return self._seq

    def wait_for(self, predicate, timeout: float = 30.0) -> dict:
        deadline = time.monotonic() + timeout
        with self._cv:
            while True:
                for doc in list(self.replies):
                    if predicate(doc):
                        return doc
                if self._closed:
                    raise ConnectionError("service closed the connection")
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise TimeoutError("no matching reply from service")
                self._cv.wait(remaining)

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass


def replay_trace(run, host: str = "127.0.0.1", port: int = 0,
                 speed: float = 0.0, window_s: float = 1.0,
                 capacity_a: float = 0.0, capacity_b: float = 1.0) -> dict:
    """Feed a simulator run through a live session; returns the summary.

    ``speed`` is a realtime multiplier; 0 streams as fast as possible.
    """
    client = ServiceClient(host, port)
    try:
        client.send({"type": "declare", "schema": SCHEMA_VERSION,
                     "task_kind": "car-following",
                     "s_level": run.condition.s_level,
                     "window_s": window_s,
                     "capacity_a": capacity_a, "capacity_b": capacity_b,
                     "rate_hz": 1.0 / run.dt})
        gap = run.gap
        t0 = time.monotonic()
        for i in range(run.t.size):
            if speed > 0:
                due = t0 + float(run.t[i]) / speed
                lag = due - time.monotonic()
                if lag > 0:
                    time.sleep(lag)
            client.send({"type": "sample", "t": float(run.t[i]),
                         "gap": float(gap[i])})
        for tr in run.trials:
            client.send({"type": "trial", "trial_id": tr.trial_id,
                         "kind": tr.kind, "delta_s": tr.delta_s,
                         "mean_gap": tr.mean_gap,
                         "response_onset": tr.response_onset,
                         "end_time": tr.end_time, "collided": tr.collided})
        end_seq = client.send({"type": "end"})
        return client.wait_for(
            lambda d: d.get("type") == "summary" and d.get("seq") == end_seq,
            timeout=120.0)
    finally:
        client.close()
