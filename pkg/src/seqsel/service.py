"""HTTP advisory service: live stop/continue advice over solved policies.

A session solves one rank problem up front and then accepts observed
relative ranks one at a time, answering with the advice, the threshold
in force, and the value of declining.  Advice is a pure function of
(policy, t, r), so replaying a history always yields the same answers.
Stop advice never terminates a session by itself: acceptance is the
client's irrevocable act, signalled with an ``accept`` flag.  Rank 0 on
a random-horizon session reports the end of the observation process
(zero reward by convention).

Sessions live in memory with a TTL; an optional append-only JSONL
snapshot records lifecycle events for crash recovery.  Solves beyond a
time budget are refused (422) to keep the service responsive.
"""

from __future__ import annotations

import json
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import problems
from .engine import ThresholdPolicy

_SESSION_PATH = re.compile(r"^/sessions/([0-9a-f]+)(/observe|/region)?$")
_SOLVE_SIZE_CAP = 200_000


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class Session:
    id: str
    solution: problems.Solution
    t: int = 1
    history: list[int] = field(default_factory=list)
    state: str = "active"                 # active | stopped | exhausted
    stopped_at: int | None = None
    touched: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def policy(self) -> ThresholdPolicy:
        return self.solution.policy

    def summary(self) -> dict:
        out = {
            "id": self.id,
            "problem": self.solution.problem,
            "params": self.solution.params,
            "nu": self.policy.nu,
            "value": self.solution.value,
            "orientation": self.solution.orientation,
            "t": self.t,
            "history": list(self.history),
            "state": self.state,
        }
        if self.stopped_at is not None:
            out["stopped_at"] = self.stopped_at
        return out


class SessionStore:
    def __init__(self, ttl: float, budget: float, snapshot: str | None = None):
        self.ttl = ttl
        self.budget = budget
        self.snapshot = snapshot
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _log(self, event: dict) -> None:
        if not self.snapshot:
            return
        with open(self.snapshot, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event) + "\n")

    def sweep(self) -> None:
        now = time.monotonic()
        with self._lock:
            dead = [sid for sid, s in self._sessions.items()
                    if now - s.touched > self.ttl]
            for sid in dead:
                del self._sessions[sid]

    def create(self, doc: dict) -> Session:
        name = doc.get("problem")
        name = problems._BY_ID.get(name, name)
        if name not in problems.PROBLEMS:
            raise ApiError(400, f"unknown problem {doc.get('problem')!r}")
        if name not in problems.RANK_PROBLEMS:
            raise ApiError(400, "sessions advise on rank problems only")
        size = int(doc.get("n") or 0)
        hz = doc.get("horizon")
        if isinstance(hz, dict) and "n_max" in hz:
            size = max(size, int(hz["n_max"]))
        if isinstance(hz, dict) and "gamma" in hz:
            size = max(size, len(hz["gamma"]))
        if size > _SOLVE_SIZE_CAP:
            raise ApiError(422, f"instance size {size} beyond the service cap")
        spec = dict(doc)
        spec["problem"] = name
        started = time.monotonic()
        try:
            sol = problems.build_problem(spec)
        except (ValueError, KeyError) as exc:
            raise ApiError(400, str(exc))
        elapsed = time.monotonic() - started
        if elapsed > self.budget:
            raise ApiError(422, f"solve took {elapsed:.1f}s, over the "
                                f"{self.budget:.1f}s budget")
        if not isinstance(sol.policy, ThresholdPolicy) or (
                sol.policy.u_fn is None and sol.policy.table is None):
            raise ApiError(400, "problem has no rank-driven policy")
        sid = secrets.token_hex(8)
        session = Session(sid, sol)
        with self._lock:
            self._sessions[sid] = session
        self._log({"event": "create", "id": sid, "problem": name,
                   "params": sol.params, "value": sol.value})
        return session

    def get(self, sid: str) -> Session:
        self.sweep()
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise ApiError(404, f"no session {sid}")
        session.touched = time.monotonic()
        return session


def observe(session: Session, doc: dict) -> dict:
    r = doc.get("r")
    accept = bool(doc.get("accept", False))
    dry_run = bool(doc.get("dry_run", False))
    if not isinstance(r, int) or isinstance(r, bool):
        raise ApiError(400, "r must be an integer")
    with session.lock:
        if session.state != "active":
            raise ApiError(409, f"session is {session.state}")
        policy = session.policy
        t = session.t
        if r == 0:
            if not session.solution.horizon.is_random:
                raise ApiError(400, "rank 0 is only meaningful for random horizons")
            if not dry_run:
                session.state = "exhausted"
            return {
                "t": t, "r": 0, "advice": None, "state": session.state,
                "note": "observation process ended; unselected paths pay 0",
            }
        if not 1 <= r <= t:
            raise ApiError(400, f"rank must lie in 1..{t}")
        y = policy.rank_value(t, r)
        threshold = policy.threshold_at(t)
        stop = policy.decide(t, r)
        value_to_go = float(policy.b[policy.nu - t - 1]) if t < policy.nu else None
        if value_to_go is not None and not (value_to_go == value_to_go
                                            and abs(value_to_go) != float("inf")):
            value_to_go = None     # sentinel never crosses the wire
        out = {
            "t": t,
            "r": r,
            "y": y,
            "threshold": None if threshold == float("-inf") else threshold,
            "advice": "stop" if stop else "continue",
            "stop_value_estimate": y,
            "value_to_go_if_continue": value_to_go,
        }
        if not dry_run:
            if accept:
                session.state = "stopped"
                session.stopped_at = t
                session.history.append(r)
            else:
                session.history.append(r)
                if t + 1 > policy.nu:
                    session.state = "exhausted"
                else:
                    session.t = t + 1
        out["state"] = session.state
        out["history"] = list(session.history)
        return out


def _region(session: Session, max_rank: int | None) -> dict:
    try:
        return problems.region_payload(session.solution, max_rank)
    except ValueError as exc:
        raise ApiError(400, str(exc))


class _Handler(BaseHTTPRequestHandler):
    store: SessionStore = None  # installed by make_server
    protocol_version = "HTTP/1.1"        # keep-alive; lengths always sent

    def log_message(self, fmt, *args):   # quiet by default
        pass

    def _send(self, status: int, doc: dict) -> None:
        body = json.dumps(doc).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self) -> None:   # CORS preflight for the browser client
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def _error(self, exc: ApiError) -> None:
        self._send(exc.status, {"code": exc.status, "message": exc.message})

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError:
            raise ApiError(400, "request body is not valid JSON")
        if not isinstance(doc, dict):
            raise ApiError(400, "request body must be a JSON object")
        return doc

    def do_GET(self) -> None:
        try:
            if self.path == "/healthz":
                self._send(200, {"status": "ok"})
                return
            if self.path == "/problems":
                self._send(200, {"problems": problems.catalog()})
                return
            m = _SESSION_PATH.match(self.path.split("?")[0])
            if m and m.group(2) == "/region":
                session = self.store.get(m.group(1))
                max_rank = None
                if "?" in self.path:
                    query = self.path.split("?", 1)[1]
                    for part in query.split("&"):
                        if part.startswith("max_rank="):
                            max_rank = int(part.split("=", 1)[1])
                self._send(200, _region(session, max_rank))
                return
            if m and m.group(2) is None:
                self._send(200, self.store.get(m.group(1)).summary())
                return
            raise ApiError(404, f"no route {self.path}")
        except ApiError as exc:
            self._error(exc)
        except Exception as exc:                # noqa: BLE001
            self._error(ApiError(500, f"internal error: {exc}"))

    def do_POST(self) -> None:
        try:
            if self.path == "/sessions":
                session = self.store.create(self._body())
                doc = session.summary()
                doc["region"] = _region(session, None)
                self._send(200, doc)
                return
            m = _SESSION_PATH.match(self.path)
            if m and m.group(2) == "/observe":
                session = self.store.get(m.group(1))
                self._send(200, observe(session, self._body()))
                return
            raise ApiError(404, f"no route {self.path}")
        except ApiError as exc:
            self._error(exc)
        except Exception as exc:                # noqa: BLE001
            self._error(ApiError(500, f"internal error: {exc}"))


def make_server(port: int = 0, ttl: float = 3600.0, budget: float = 10.0,
                snapshot: str | None = None) -> ThreadingHTTPServer:
    """Build (but do not run) the HTTP server; port 0 picks a free port."""
    store = SessionStore(ttl, budget, snapshot)
    handler = type("Handler", (_Handler,), {"store": store})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.store = store
    return server


def run_server(port: int, ttl: float, budget: float,
               snapshot: str | None = None) -> None:
    server = make_server(port, ttl, budget, snapshot)
    host, bound = server.server_address[:2]
    print(f"advisory service on http://{host}:{bound}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.store._log({"event": "shutdown", "time": time.time()})
        server.server_close()
