"""Seeding and the two-agent pick-and-place scenario."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import requests

from hypersig import fixtures
from hypersig.agents import Desire, PrsAgent, StripsAgent
from hypersig.model import Atom
from hypersig.vocab import EX, MANU

WORKSPACE = "manufacturing"
ARM = "leubot"

PRS_DESIRE = Desire(MANU.PickAndPlace, (EX.item1, EX.loc2))
STRIPS_GOAL = frozenset({Atom("itemAt", (EX.item2, EX.loc1))})


class SeedError(Exception):
    pass


def seed(env_base: str, fixture_dir: Optional[Path] = None, timeout: float = 10.0) -> dict:
    """Publish the workspace and the arm profile; safe to repeat."""
    directory = Path(fixture_dir) if fixture_dir else fixtures.FIXTURE_DIR
    if not directory.is_dir():
        raise FileNotFoundError(directory)
    base = env_base.rstrip("/")
    resp = requests.post(
        f"{base}/workspaces",
        data=fixtures.read_text(fixtures.WORKSPACE, directory).encode("utf-8"),
        headers={"Slug": WORKSPACE, "Content-Type": "text/turtle"},
        timeout=timeout,
    )
    if resp.status_code not in (201, 409):
        raise SeedError(f"workspace creation returned {resp.status_code}: {resp.text}")
    url = f"{base}/workspaces/{WORKSPACE}/artifacts/{ARM}"
    resp2 = requests.put(
        url,
        data=fixtures.read_text(fixtures.ARM, directory).encode("utf-8"),
        headers={"Content-Type": "text/turtle"},
        timeout=timeout,
    )
    if resp2.status_code not in (201, 204):
        raise SeedError(f"arm publication returned {resp2.status_code}: {resp2.text}")
    return {"workspace": f"{base}/workspaces/{WORKSPACE}", "artifact": url}


@dataclass
class ScenarioReport:
    agents: list = field(default_factory=list)
    interactions: int = 0
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and bool(self.agents) and all(a["goal_achieved"] for a in self.agents)

    def to_json(self) -> dict:
        return {"ok": self.ok, "agents": self.agents, "interactions": self.interactions, "errors": self.errors}


def run_scenario(
    env_base: str,
    only: Optional[str] = None,
    sink: Optional[Callable[[dict], None]] = None,
    after_action: Optional[Callable[[dict], None]] = None,
) -> tuple[ScenarioReport, list]:
    """Run the PRS agent, then the STRIPS agent, against a seeded server."""
    report, results = ScenarioReport(), []
    runs = []
    if only in (None, "prs"):
        runs.append(lambda: PrsAgent(env_base, WORKSPACE, sink=sink, after_action=after_action).run(PRS_DESIRE))
    if only in (None, "strips"):
        runs.append(lambda: StripsAgent(env_base, WORKSPACE, sink=sink, after_action=after_action).run(STRIPS_GOAL))
    for run in runs:
        try:
            result = run()
        except requests.ConnectionError:
            raise
        except Exception as exc:  # reported, not raised: the report is the product
            report.errors.append(f"{type(exc).__name__}: {exc}")
            continue
        results.append(result)
        report.agents.append(result.report())
    resp = requests.get(
        f"{env_base.rstrip('/')}/workspaces/{WORKSPACE}/interactions",
        headers={"Accept": "application/json"},
        timeout=10,
    )
    if resp.status_code == 200:
        report.interactions = len(resp.json())
    return report, results
