"""HTTP hypermedia environment.

Workspaces contain artifact and agent profiles. Artifact profiles are served
through signifier exposure for the agent named in ``X-Agent-IRI``; without
that header the full profile is returned. The simulated arm lives under
``/leubot`` and republishes its situation after every action.
"""

from __future__ import annotations

import json
import logging
import re
import threading
import time
from dataclasses import dataclass, replace
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlsplit

from hypersig.arm import Arm, ArmError, state_from_situation, situation_from_state
from hypersig.model import (
    AgentProfile,
    ArtifactProfile,
    InteractionRecord,
    ModelError,
    Workspace,
    read_agent_profile,
    read_artifact_profile,
    write_agent_profile,
    write_artifact_profile,
)
from hypersig.rdf import IRI, Graph, Literal, Triple, TurtleSyntaxError, parse_turtle, serialize_turtle
from hypersig.sem import DEFAULT_THRESHOLD, ExposureRequest, expose
from hypersig.shapes import ShapeError
from hypersig.vocab import DEFAULT_PREFIXES, ENV, EX, HMAS, RDF_TYPE

log = logging.getLogger(__name__)

ARM_IRI = EX.leubot
ANONYMOUS = "urn:hypersig:anonymous"
TURTLE = "text/turtle"
_TYPE = IRI(RDF_TYPE)
_SLUG = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.\-]*$")


class HttpError(Exception):
    def __init__(self, status: int, message: str = ""):
        super().__init__(message or HTTPStatus(status).phrase)
        self.status = status
        self.message = message or HTTPStatus(status).phrase


@dataclass
class Response:
    status: int = 200
    body: bytes = b""
    content_type: Optional[str] = None
    headers: tuple = ()


class LockTable:
    """One lock per resource key. Callers take at most one at a time."""

    def __init__(self):
        self._locks: dict = {}
        self._meta = threading.Lock()

    def __call__(self, key) -> threading.Lock:
        with self._meta:
            return self._locks.setdefault(key, threading.Lock())


class Environment:
    """The resource store plus the arm; transport independent."""

    def __init__(self, base_url: str = "http://localhost:8080", threshold: float = DEFAULT_THRESHOLD):
        if not 0 <= threshold <= 1:
            raise ValueError("threshold must lie in [0, 1]")
        self.base_url = base_url.rstrip("/")
        self.threshold = threshold
        self.workspaces: dict[str, Workspace] = {}
        self.artifacts: dict[tuple, ArtifactProfile] = {}
        self.agents: dict[tuple, AgentProfile] = {}
        self.arm: Optional[Arm] = None
        self._arm_key: Optional[tuple] = None
        self._published_version = -1
        self._sequence = 0
        self.lock = LockTable()

    # -- IRIs --------------------------------------------------------------

    def workspace_iri(self, w: str) -> str:
        return f"{self.base_url}/workspaces/{w}"

    def artifact_url(self, w: str, a: str) -> str:
        return f"{self.workspace_iri(w)}/artifacts/{a}"

    def agent_url(self, w: str, g: str) -> str:
        return f"{self.workspace_iri(w)}/agents/{g}"

    def _workspace(self, w: str) -> Workspace:
        ws = self.workspaces.get(w)
        if ws is None:
            raise HttpError(404, f"no workspace {w!r}")
        return ws

    # -- workspaces --------------------------------------------------------------

    def create_workspace(self, body: str, slug: Optional[str] = None) -> str:
        with self.lock("store"):
            w = slug or f"ws{len(self.workspaces) + 1}"
            if not _SLUG.match(w):
                raise HttpError(400, f"invalid workspace id {w!r}")
            if w in self.workspaces:
                raise HttpError(409, f"workspace {w!r} exists")
            graph = _parse(body, self.workspace_iri(w))
            self.workspaces[w] = Workspace(id=self.workspace_iri(w), description=graph)
        return self.workspace_iri(w)

    def ensure_workspace(self, w: str, body: str = "") -> bool:
        """Create ``w`` unless it exists; True when created."""
        try:
            self.create_workspace(body, w)
            return True
        except HttpError as exc:
            if exc.status == 409:
                return False
            raise

    def workspace_graph(self, w: str) -> Graph:
        ws = self._workspace(w)
        node = IRI(ws.id)
        triples = set(ws.description.triples) | {Triple(node, _TYPE, IRI(HMAS.Workspace))}
        with self.lock(("workspace", w)):
            members = sorted(ws.contained_resources.items())
        for subject, (kind, url) in members:
            kind_iri = HMAS.ArtifactProfile if kind == "artifact" else HMAS.AgentProfile
            triples |= {
                Triple(node, IRI(HMAS.contains), IRI(url)),
                Triple(IRI(url), _TYPE, IRI(kind_iri)),
                Triple(IRI(url), IRI(HMAS.isProfileOf), IRI(subject)),
            }
        return Graph(triples, DEFAULT_PREFIXES)

    def contained_urls(self, w: str) -> list[str]:
        ws = self._workspace(w)
        with self.lock(("workspace", w)):
            return sorted(url for _, url in ws.contained_resources.values())

    # -- profiles ------------------------------------------------------------------

    def publish_artifact(self, w: str, a: str, body: str) -> bool:
        self._workspace(w)
        url = self.artifact_url(w, a)
        try:
            profile = read_artifact_profile(_parse(body, url))
        except (ModelError, ShapeError) as exc:
            raise HttpError(400, str(exc)) from None
        if profile.iri != url:
            raise HttpError(400, f"profile node must be <{url}>, found <{profile.iri}>")
        profile = replace(profile, workspace_iri=self.workspace_iri(w))
        with self.lock(("artifact", w, a)):
            created = (w, a) not in self.artifacts
            self.artifacts[(w, a)] = profile
            if profile.artifact_iri == ARM_IRI:
                self._bind_arm((w, a), profile)
        self._contain(w, profile.artifact_iri, "artifact", url)
        return created

    def _bind_arm(self, key: tuple, profile: ArtifactProfile) -> None:
        self.arm = Arm(state_from_situation(profile.situation, profile.artifact_iri))
        self._arm_key = key
        self._published_version = 0

    def publish_agent(self, w: str, g: str, body: str) -> bool:
        self._workspace(w)
        url = self.agent_url(w, g)
        try:
            profile = read_agent_profile(_parse(body, url))
        except ModelError as exc:
            raise HttpError(400, str(exc)) from None
        if profile.iri != url:
            raise HttpError(400, f"profile node must be <{url}>, found <{profile.iri}>")
        profile = replace(profile, workspace_iri=self.workspace_iri(w))
        with self.lock(("agent", w, g)):
            created = (w, g) not in self.agents
            self.agents[(w, g)] = profile
        self._contain(w, profile.agent_iri, "agent", url)
        return created

    def _contain(self, w: str, subject: str, kind: str, url: str) -> None:
        with self.lock(("workspace", w)):
            members = self.workspaces[w].contained_resources
            for old in [k for k, (_, u) in members.items() if u == url]:
                del members[old]
            members[subject] = (kind, url)

    def find_agent(self, iri: str, w: Optional[str] = None) -> Optional[AgentProfile]:
        """Resolve an agent or agent-profile IRI, preferring workspace ``w``."""
        matches = [(k, p) for k, p in list(self.agents.items()) if iri in (p.agent_iri, p.iri)]
        matches.sort(key=lambda kp: kp[0][0] != w)
        return matches[0][1] if matches else None

    def artifact(self, w: str, a: str) -> ArtifactProfile:
        self._workspace(w)
        profile = self.artifacts.get((w, a))
        if profile is None:
            raise HttpError(404, f"no artifact {a!r} in {w!r}")
        return profile

    def agent(self, w: str, g: str) -> AgentProfile:
        self._workspace(w)
        profile = self.agents.get((w, g))
        if profile is None:
            raise HttpError(404, f"no agent {g!r} in {w!r}")
        return profile

    def exposed_artifact(self, w: str, a: str, agent_iri: Optional[str], threshold: Optional[float]):
        profile = self.artifact(w, a)
        t = self.threshold if threshold is None else threshold
        if not 0 <= t <= 1:
            raise HttpError(400, f"threshold {t} outside [0, 1]")
        agent = self.find_agent(agent_iri, w) if agent_iri else None
        return expose(ExposureRequest(profile, agent, t))

    # -- arm ----------------------------------------------------------------------

    def _require_arm(self) -> Arm:
        if self.arm is None:
            raise HttpError(404, "no arm profile has been published")
        return self.arm

    def arm_action(self, action: str, agent_iri: Optional[str], token: Optional[str], body, target: str, method: str):
        arm = self._require_arm()
        key = self._arm_key
        status, payload, state = 200, None, None
        try:
            if action == "login":
                payload = {"token": arm.login()}
                status = 201
            elif action == "gripper":
                state = arm.set_gripper(token, body)
            elif action == "base":
                state = arm.move(token, body)
            else:
                raise HttpError(404, action)
        except ArmError as exc:
            status, payload = exc.status, {"error": exc.message}
        if state is not None:
            self._republish(key, state)
            payload = state.snapshot()
        self._record(key[0], agent_iri, target, method, status, arm.snapshot())
        return status, payload

    def _republish(self, key: tuple, state) -> None:
        with self.lock(("artifact",) + key):
            if state.version <= self._published_version or key != self._arm_key:
                return
            profile = self.artifacts[key]
            self.artifacts[key] = replace(profile, situation=situation_from_state(profile.situation, state))
            self._published_version = state.version

    def _record(self, w: str, agent_iri: Optional[str], target: str, method: str, status: int, snapshot: dict):
        with self.lock(("workspace", w)):
            self._sequence += 1
            self.workspaces[w].record(
                InteractionRecord(
                    agent_iri=agent_iri or ANONYMOUS,
                    target=target,
                    timestamp=time.monotonic(),
                    outcome="succeeded" if 200 <= status < 300 else "failed",
                    sequence=self._sequence,
                    method=method,
                    status=status,
                    arm_state=snapshot,
                )
            )

    def interactions(self, w: str) -> list[InteractionRecord]:
        ws = self._workspace(w)
        with self.lock(("workspace", w)):
            return list(ws.interactions)

    def interaction_graph(self, w: str) -> Graph:
        log_iri = f"{self.workspace_iri(w)}/interactions"
        triples = set()
        for rec in self.interactions(w):
            node = IRI(f"{log_iri}#i{rec.sequence}")
            triples |= {
                Triple(node, _TYPE, IRI(ENV.Interaction)),
                Triple(IRI(log_iri), IRI(ENV.hasInteraction), node),
                Triple(node, IRI(ENV.agent), IRI(rec.agent_iri)),
                Triple(node, IRI(ENV.target), IRI(rec.target)),
                Triple(node, IRI(ENV.sequence), Literal.of(rec.sequence)),
                Triple(node, IRI(ENV.timestamp), Literal.of(round(rec.timestamp, 6))),
                Triple(node, IRI(ENV.outcome), Literal(rec.outcome)),
                Triple(node, IRI(ENV.method), Literal(rec.method)),
                Triple(node, IRI(ENV.status), Literal.of(rec.status)),
            }
            if rec.arm_state is not None:
                triples.add(Triple(node, IRI(ENV.gripperAfter), Literal.of(rec.arm_state["gripper"])))
        return Graph(triples, DEFAULT_PREFIXES)


def _parse(body: str, base: str) -> Graph:
    try:
        return parse_turtle(body, base=base)
    except TurtleSyntaxError as exc:
        raise HttpError(400, str(exc)) from None


def record_to_json(rec: InteractionRecord) -> dict:
    return {
        "sequence": rec.sequence,
        "agent": rec.agent_iri,
        "target": rec.target,
        "method": rec.method,
        "status": rec.status,
        "outcome": rec.outcome,
        "timestamp": rec.timestamp,
        "arm_state": rec.arm_state,
    }


# -- HTTP ------------------------------------------------------------------------

_ROUTES = [
    (re.compile(r"^/$"), "root"),
    (re.compile(r"^/workspaces/?$"), "workspaces"),
    (re.compile(r"^/workspaces/(?P<w>[^/]+)/?$"), "workspace"),
    (re.compile(r"^/workspaces/(?P<w>[^/]+)/interactions$"), "interactions"),
    (re.compile(r"^/workspaces/(?P<w>[^/]+)/artifacts/(?P<a>[^/]+)$"), "artifact"),
    (re.compile(r"^/workspaces/(?P<w>[^/]+)/agents/(?P<g>[^/]+)$"), "agent"),
    (re.compile(r"^/leubot/(?P<action>operator|gripper|base|state)$"), "arm"),
]


def _link(url: str, rel: str) -> str:
    return f'<{url}>; rel="{rel}"'


def _turtle(graph: Graph, status: int = 200, links=()) -> Response:
    headers = (("Link", ", ".join(links)),) if links else ()
    return Response(status, serialize_turtle(graph).encode("utf-8"), TURTLE, headers)


def _json(payload, status: int = 200) -> Response:
    return Response(status, json.dumps(payload).encode("utf-8"), "application/json")


def dispatch(env: Environment, method: str, path: str, headers, body: bytes) -> Response:
    """Route one request; independent of the socket layer for testing."""
    split = urlsplit(path)
    for pattern, name in _ROUTES:
        m = pattern.match(split.path)
        if m:
            break
    else:
        raise HttpError(404, f"no route for {split.path}")
    args = m.groupdict()
    query = parse_qs(split.query)
    text = body.decode("utf-8") if body else ""
    agent_iri = headers.get("X-Agent-IRI")

    if name == "root" and method == "GET":
        links = [_link(env.workspace_iri(w), "contains") for w in sorted(env.workspaces)]
        triples = {Triple(IRI(env.base_url + "/"), IRI(HMAS.contains), IRI(env.workspace_iri(w))) for w in env.workspaces}
        return _turtle(Graph(triples, DEFAULT_PREFIXES), links=links)

    if name == "workspaces" and method == "POST":
        iri = env.create_workspace(text, headers.get("Slug"))
        return Response(201, b"", None, (("Location", iri),))

    if name == "workspace" and method == "GET":
        graph = env.workspace_graph(args["w"])
        return _turtle(graph, links=[_link(u, "contains") for u in env.contained_urls(args["w"])])

    if name == "interactions" and method == "GET":
        if "application/json" in headers.get("Accept", ""):
            return _json([record_to_json(r) for r in env.interactions(args["w"])])
        return _turtle(env.interaction_graph(args["w"]))

    if name == "artifact":
        w, a = args["w"], args["a"]
        if method == "PUT":
            return Response(201 if env.publish_artifact(w, a, text) else 204)
        if method == "GET":
            t = None
            if "t" in query:
                try:
                    t = float(query["t"][0])
                except ValueError:
                    raise HttpError(400, "t must be a number") from None
            result = env.exposed_artifact(w, a, agent_iri, t)
            links = [_link(env.workspace_iri(w), "up"), _link(result.profile.artifact_iri, "describes")]
            links += [_link(str(s.id), "contains") for s in result.profile.signifiers]
            return _turtle(write_artifact_profile(result.profile), links=links)

    if name == "agent":
        w, g = args["w"], args["g"]
        if method == "PUT":
            return Response(201 if env.publish_agent(w, g, text) else 204)
        if method == "GET":
            profile = env.agent(w, g)
            links = [_link(env.workspace_iri(w), "up"), _link(profile.agent_iri, "describes")]
            return _turtle(write_agent_profile(profile), links=links)

    if name == "arm":
        action = args["action"]
        if action == "state" and method == "GET":
            return _json(env._require_arm().snapshot())
        allowed = {"operator": ("POST",), "gripper": ("PUT", "POST"), "base": ("PUT", "POST")}.get(action, ())
        if method in allowed:
            try:
                payload = json.loads(text) if text.strip() else {}
            except json.JSONDecodeError:
                raise HttpError(400, "body is not JSON") from None
            target = f"{env.base_url}{split.path}"
            status, out = env.arm_action(
                "login" if action == "operator" else action,
                agent_iri,
                headers.get("X-Operator-Token"),
                payload,
                target,
                method,
            )
            return _json(out, status)

    raise HttpError(405, f"{method} not allowed on {split.path}")


class _Handler(BaseHTTPRequestHandler):
    server_version = "hypersig"
    protocol_version = "HTTP/1.1"

    def _handle(self) -> None:
        env: Environment = self.server.env  # type: ignore[attr-defined]
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        try:
            resp = dispatch(env, self.command, self.path, self.headers, body)
        except HttpError as exc:
            resp = Response(exc.status, exc.message.encode("utf-8"), "text/plain; charset=utf-8")
        except Exception:  # a handler bug must not kill the server thread
            log.exception("unhandled error on %s %s", self.command, self.path)
            resp = Response(500, b"internal error", "text/plain")
        self.send_response(resp.status)
        if resp.content_type:
            self.send_header("Content-Type", resp.content_type)
        for k, v in resp.headers:
            self.send_header(k, v)
        self.send_header("Content-Length", str(len(resp.body)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(resp.body)

    do_GET = do_PUT = do_POST = do_DELETE = do_HEAD = _handle

    def log_message(self, fmt, *args):
        log.debug("%s - %s", self.address_string(), fmt % args)


class EnvironmentServer:
    """Threaded HTTP server around an :class:`Environment`."""

    def __init__(self, host: str = "127.0.0.1", port: int = 8080, threshold: float = DEFAULT_THRESHOLD):
        self.httpd = ThreadingHTTPServer((host, port), _Handler)
        self.httpd.daemon_threads = True
        bound_host, bound_port = self.httpd.server_address[:2]
        public = "localhost" if bound_host in ("0.0.0.0", "") else bound_host
        self.url = f"http://{public}:{bound_port}"
        self.env = Environment(self.url, threshold)
        self.httpd.env = self.env  # type: ignore[attr-defined]
        self._thread: Optional[threading.Thread] = None

    def start(self) -> "EnvironmentServer":
        self._thread = threading.Thread(
            target=self.httpd.serve_forever, kwargs={"poll_interval": 0.05}, name="hypersig-server", daemon=True
        )
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self) -> "EnvironmentServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
