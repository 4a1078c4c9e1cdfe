"""Command line: serve, seed, scenario, report, agent.

Exit codes follow sysexits: 64 usage, 66 missing input, 2 bind failure,
1 unreachable server or failed scenario.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import requests

from hypersig import fixtures
from hypersig.agents import AgentError, Desire, DomainError, NoPlan, PrsAgent, StripsAgent
from hypersig.model import Atom
from hypersig.scenario import WORKSPACE, SeedError, run_scenario, seed
from hypersig.sem import DEFAULT_THRESHOLD
from hypersig.server import EnvironmentServer
from hypersig.vocab import DEFAULT_PREFIXES, MANU

EX_OK = 0
EX_FAIL = 1
EX_BIND = 2
EX_USAGE = 64
EX_NOINPUT = 66

log = logging.getLogger("hypersig")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _threshold(text: str) -> float:
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1]")
    return value


def expand(term: str) -> str:
    """Expand a CURIE such as ``ex:item1``; full IRIs pass through."""
    if "://" in term or term.startswith("urn:"):
        return term
    prefix, _, local = term.partition(":")
    if prefix in DEFAULT_PREFIXES and local:
        return DEFAULT_PREFIXES[prefix] + local
    raise ValueError(f"cannot expand {term!r}")


def parse_atom(text: str) -> Atom:
    """``itemAt(ex:item2, ex:loc1)`` -> Atom."""
    text = text.strip()
    name, _, rest = text.partition("(")
    if not rest.endswith(")"):
        raise ValueError(f"malformed atom {text!r}")
    args = [a.strip() for a in rest[:-1].split(",") if a.strip()]
    return Atom(name.strip(), tuple(int(a) if a.lstrip("-").isdigit() else expand(a) for a in args))


def build_parser() -> argparse.ArgumentParser:
    env_default = os.environ.get("HYPERSIG_ENV_BASE", "http://localhost:8080")
    parser = _Parser(prog="hypersig", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("serve", help="run the environment server")
    p.add_argument("--host", default=os.environ.get("HYPERSIG_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("HYPERSIG_PORT", "8080")))
    p.add_argument("--threshold", type=_threshold, default=float(os.environ.get("HYPERSIG_THRESHOLD", DEFAULT_THRESHOLD)))
    p.add_argument("--fixtures", type=Path, default=None, help="seed from this directory at startup")
    p.add_argument("--seed", action="store_true", help="seed the bundled fixtures at startup")

    p = sub.add_parser("seed", help="publish the workspace and arm profile into a running server")
    p.add_argument("--env-base", default=env_default)
    p.add_argument("--fixtures", type=Path, default=fixtures.FIXTURE_DIR)

    p = sub.add_parser("scenario", help="run both agents against a fresh seeded server")
    p.add_argument("--env-base", default=None, help="use this running server instead of a fresh one")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    p.add_argument("--fixtures", type=Path, default=fixtures.FIXTURE_DIR)
    p.add_argument("--only", choices=("prs", "strips"))
    p.add_argument("--out", type=Path, help="write the JSON report here as well")
    p.add_argument("--trace", action="store_true", help="stream agent events as JSON lines to stderr")

    p = sub.add_parser("report", help="summarise a workspace's interaction log")
    p.add_argument("--env-base", default=env_default)
    p.add_argument("--workspace", default=WORKSPACE)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("agent", help="run one agent against a running server")
    p.add_argument("kind", choices=("prs", "strips"))
    p.add_argument("--env-base", default=env_default)
    p.add_argument("--workspace", default=WORKSPACE)
    p.add_argument("--agent-iri", dest="name", default=None, help="agent resource name within the workspace")
    p.add_argument("--desire", default="ex:item1,ex:loc2", help="ITEM,TARGET for the PRS agent")
    p.add_argument("--goal", action="append", help="goal atom for the STRIPS agent; repeatable")
    return parser


def _emit(payload: dict, out: Optional[Path]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if out is not None:
        out.write_text(text + "\n", encoding="utf-8")


def cmd_serve(args) -> int:
    try:
        server = EnvironmentServer(args.host, args.port, args.threshold)
    except OSError as exc:
        print(f"hypersig: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EX_BIND
    if args.fixtures is not None and not args.fixtures.is_dir():
        print(f"hypersig: no fixture directory {args.fixtures}", file=sys.stderr)
        return EX_NOINPUT
    server.start()
    if args.seed or args.fixtures is not None:
        seed(server.url, args.fixtures)
    print(f"serving on {server.url} (t={args.threshold})", file=sys.stderr)
    try:
        server._thread.join()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return EX_OK


def cmd_seed(args) -> int:
    if not args.fixtures.is_dir():
        print(f"hypersig: no fixture directory {args.fixtures}", file=sys.stderr)
        return EX_NOINPUT
    try:
        out = seed(args.env_base, args.fixtures)
    except requests.ConnectionError:
        print(f"hypersig: server at {args.env_base} is not reachable", file=sys.stderr)
        return EX_FAIL
    except SeedError as exc:
        print(f"hypersig: {exc}", file=sys.stderr)
        return EX_FAIL
    print(json.dumps(out))
    return EX_OK


def cmd_scenario(args) -> int:
    if not args.fixtures.is_dir():
        print(f"hypersig: no fixture directory {args.fixtures}", file=sys.stderr)
        return EX_NOINPUT
    sink = (lambda e: print(json.dumps(e), file=sys.stderr)) if args.trace else None
    server = None
    try:
        if args.env_base is None:
            try:
                server = EnvironmentServer("127.0.0.1", args.port, args.threshold).start()
            except OSError as exc:
                print(f"hypersig: cannot bind port {args.port}: {exc}", file=sys.stderr)
                return EX_BIND
            env_base = server.url
        else:
            env_base = args.env_base
        seed(env_base, args.fixtures)
        report, _ = run_scenario(env_base, args.only, sink=sink)
    except requests.ConnectionError:
        print("hypersig: environment server is not reachable", file=sys.stderr)
        return EX_FAIL
    finally:
        if server is not None:
            server.stop()
    _emit(report.to_json(), args.out)
    return EX_OK if report.ok else EX_FAIL


def cmd_report(args) -> int:
    url = f"{args.env_base.rstrip('/')}/workspaces/{args.workspace}/interactions"
    try:
        resp = requests.get(url, headers={"Accept": "application/json"}, timeout=10)
    except requests.ConnectionError:
        print(f"hypersig: server at {args.env_base} is not reachable", file=sys.stderr)
        return EX_FAIL
    if resp.status_code != 200:
        print(f"hypersig: {url} returned {resp.status_code}", file=sys.stderr)
        return EX_FAIL
    records = resp.json()
    per_agent: dict = {}
    for rec in records:
        entry = per_agent.setdefault(rec["agent"], {"succeeded": 0, "failed": 0})
        entry[rec["outcome"]] += 1
    _emit({"workspace": args.workspace, "interactions": len(records), "agents": per_agent}, args.out)
    return EX_OK


def cmd_agent(args) -> int:
    sink = lambda e: print(json.dumps(e), flush=True)  # noqa: E731
    try:
        if args.kind == "prs":
            item, _, target = args.desire.partition(",")
            desire = Desire(MANU.PickAndPlace, (expand(item.strip()), expand(target.strip())))
            agent = PrsAgent(args.env_base, args.workspace, name=args.name or "prs-agent", sink=sink)
            result = agent.run(desire)
        else:
            goal = [parse_atom(g) for g in (args.goal or ["itemAt(ex:item2, ex:loc1)"])]
            agent = StripsAgent(args.env_base, args.workspace, name=args.name or "strips-agent", sink=sink)
            result = agent.run(goal)
    except ValueError as exc:
        print(f"hypersig: {exc}", file=sys.stderr)
        return EX_USAGE
    except requests.ConnectionError:
        print(f"hypersig: server at {args.env_base} is not reachable", file=sys.stderr)
        return EX_FAIL
    except (AgentError, DomainError, NoPlan) as exc:
        print(json.dumps({"agent": args.kind, "event": "error", "error": f"{type(exc).__name__}: {exc}"}))
        return EX_FAIL
    print(json.dumps({"agent": result.agent, "event": "report", **result.report()}))
    return EX_OK if result.goal_achieved else EX_FAIL


COMMANDS = {"serve": cmd_serve, "seed": cmd_seed, "scenario": cmd_scenario, "report": cmd_report, "agent": cmd_agent}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
