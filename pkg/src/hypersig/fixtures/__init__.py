"""Bundled Turtle fixtures. See README.md in this directory for provenance."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from hypersig.rdf import Graph, parse_turtle

FIXTURE_DIR = Path(__file__).resolve().parent

LISTINGS = {
    "lst1": "lst1_generic_signifier.ttl",
    "lst2": "lst2_prs_agent_profile.ttl",
    "lst3": "lst3_prs_signifier.ttl",
    "lst4": "lst4_strips_signifier.ttl",
}
ARM = "arm_profile.ttl"
WORKSPACE = "workspace.ttl"
STRIPS_AGENT = "strips_agent_profile.ttl"
DEFAULT_BASE = "http://localhost:8080/workspaces/manufacturing/artifacts/leubot"


def all_fixtures(directory: Optional[Path] = None) -> list[Path]:
    return sorted((directory or FIXTURE_DIR).glob("*.ttl"))


def read_text(name: str, directory: Optional[Path] = None) -> str:
    return ((directory or FIXTURE_DIR) / name).read_text(encoding="utf-8")


def load(name: str, base: Optional[str] = DEFAULT_BASE, directory: Optional[Path] = None) -> Graph:
    return parse_turtle(read_text(name, directory), base=base)
