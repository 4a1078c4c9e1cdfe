"""HTTP plumbing shared by the agents: discovery, publication, form invocation."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import requests

from hypersig.model import ArtifactProfile, Form, Signifier, read_artifact_profile
from hypersig.rdf import IRI, Graph, parse_turtle
from hypersig.vocab import HMAS, MANU, RDF_TYPE

TOKEN_HEADER = "X-Operator-Token"
AGENT_HEADER = "X-Agent-IRI"


class AgentError(Exception):
    pass


class ExecutionFailed(AgentError):
    def __init__(self, step: str, status: int, detail: str = ""):
        super().__init__(f"{step} failed with HTTP {status}" + (f": {detail}" if detail else ""))
        self.step = step
        self.status = status


class NoApplicableSignifier(AgentError):
    def __init__(self, step: str, detail: str = ""):
        super().__init__(f"no exposed signifier binds step {step}" + (f" ({detail})" if detail else ""))
        self.step = step


@dataclass
class Trace:
    """Ordered event log; ``sink`` sees every event as it happens."""

    agent: str
    events: list = field(default_factory=list)
    sink: Optional[Callable[[dict], None]] = None

    def emit(self, event: str, **data) -> dict:
        record = {"agent": self.agent, "event": event, "t": round(time.monotonic(), 6), **data}
        self.events.append(record)
        if self.sink is not None:
            self.sink(record)
        return record

    def of(self, event: str) -> list[dict]:
        return [e for e in self.events if e["event"] == event]


@dataclass
class RunResult:
    agent: str
    agent_iri: str
    goal_achieved: bool
    action_count: int
    plan_length: int
    exposed_counts: list
    wall_time: float
    trace: Trace

    def report(self) -> dict:
        return {
            "agent": self.agent,
            "goal_achieved": self.goal_achieved,
            "action_count": self.action_count,
            "plan_length": self.plan_length,
            "exposed_signifiers": self.exposed_counts,
            "wall_time": round(self.wall_time, 4),
        }


class EnvClient:
    """A sequential client bound to one workspace."""

    def __init__(self, env_base: str, workspace: str, trace: Trace, timeout: float = 10.0):
        self.env_base = env_base.rstrip("/")
        self.workspace = workspace
        self.trace = trace
        self.timeout = timeout
        self.session = requests.Session()
        self.agent_iri: Optional[str] = None
        self.token: Optional[str] = None

    @property
    def workspace_url(self) -> str:
        return f"{self.env_base}/workspaces/{self.workspace}"

    def _request(self, method: str, url: str, **kwargs) -> requests.Response:
        headers = kwargs.pop("headers", {})
        if self.agent_iri:
            headers.setdefault(AGENT_HEADER, self.agent_iri)
        resp = self.session.request(method, url, headers=headers, timeout=self.timeout, **kwargs)
        self.trace.emit("http", method=method, url=url, status=resp.status_code)
        return resp

    def publish_profile(self, name: str, turtle: str) -> str:
        url = f"{self.workspace_url}/agents/{name}"
        resp = self._request("PUT", url, data=turtle.encode("utf-8"), headers={"Content-Type": "text/turtle"})
        if resp.status_code not in (201, 204):
            raise ExecutionFailed("publish profile", resp.status_code, resp.text)
        self.agent_iri = f"{url}#agent"
        return url

    def artifact_urls(self) -> list[str]:
        resp = self._request("GET", self.workspace_url)
        if resp.status_code != 200:
            raise ExecutionFailed("discover workspace", resp.status_code, resp.text)
        graph = parse_turtle(resp.text, base=self.workspace_url)
        return [str(n) for n in graph.subjects(IRI(RDF_TYPE), IRI(HMAS.ArtifactProfile))]

    def fetch_artifact(self, url: str, as_agent: bool = True) -> ArtifactProfile:
        headers = {} if as_agent else {AGENT_HEADER: ""}
        resp = self._request("GET", url, headers=headers)
        if resp.status_code != 200:
            raise ExecutionFailed("fetch artifact profile", resp.status_code, resp.text)
        profile = read_artifact_profile(parse_turtle(resp.text, base=url))
        self.trace.emit("discovered", url=url, signifiers=[str(s.id) for s in profile.signifiers])
        return profile

    def discover_arm(self, as_agent: bool = True) -> tuple[str, ArtifactProfile]:
        urls = self.artifact_urls()
        if not urls:
            raise ExecutionFailed("discover artifact", 404, "workspace contains no artifact profile")
        for url in urls:
            profile = self.fetch_artifact(url, as_agent)
            if IRI(MANU.RobotArm) in profile.situation.types(IRI(profile.artifact_iri)):
                return url, profile
        return urls[0], self.fetch_artifact(urls[0], as_agent)

    def invoke(self, step: str, form: Form, payload: dict) -> dict:
        headers = {"Content-Type": form.content_type}
        if self.token:
            headers[TOKEN_HEADER] = self.token
        resp = self._request(form.method or "POST", form.target, data=json.dumps(payload), headers=headers)
        self.trace.emit("action", step=step, target=form.target, input=payload, status=resp.status_code)
        if not 200 <= resp.status_code < 300:
            raise ExecutionFailed(step, resp.status_code, resp.text)
        try:
            return resp.json()
        except ValueError:
            return {}

    def login(self, profile: ArtifactProfile) -> None:
        """Use any exposed login signifier to obtain an operator token."""
        for sig in profile.signifiers:
            if MANU.LogIn in sig.behavior_spec.types:
                out = self.invoke("LogIn", sig.behavior_spec.forms[0], {})
                self.token = out.get("token")
                return
        raise NoApplicableSignifier("LogIn", "no login signifier exposed")


def situation_value(graph: Graph, subject: str, predicate: str) -> Optional[str]:
    value = graph.value(IRI(subject), IRI(predicate))
    return None if value is None else str(value)


def pick_form(sig: Signifier) -> Form:
    forms = sorted(sig.behavior_spec.forms, key=lambda f: (f.method is None, f.method or ""))
    return forms[0]
