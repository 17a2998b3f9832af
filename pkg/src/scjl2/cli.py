"""Command line front end.

Commands run in-process by default; with ``--server URL`` the same request is
sent to a running ``scjl2 serve`` instance and the CLI only renders the result.
Exit codes: 0 pass, 1 property violated, 2 limits exceeded, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from pydantic import ValidationError

from . import __version__, service
from .models import (
    CheckRequest, CompareRequest, EmitRequest, Limits, OrderRequest, Outcome, QuerySpec, SimRequest,
)

INPUT_ERROR = service.INPUT_ERROR


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _csv(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _add_limits(p):
    p.add_argument("--max-states", type=int, help="state limit (default: $MK_MAX_STATES or 10000000)")
    p.add_argument("--max-depth", type=int)
    p.add_argument("--hide", type=_csv, default=[], help="comma-separated channels to hide")


def _add_output(p, default="json"):
    p.add_argument("--format", choices=("json", "text"), default=default)
    p.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="scjl2", description="SCJ Level 2 termination-protocol models and scheduling simulator")
    ap.add_argument("--version", action="version", version=f"scjl2 {__version__}")
    ap.add_argument("--server", metavar="URL", help="send the command to a running scjl2 service")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="explore a model for deadlock and divergence")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--topology", help="builtin name or .topo file")
    src.add_argument("--model", help=".cmodel file")
    p.add_argument("--protocol", choices=("current", "proposed"), default="current")
    _add_limits(p)
    _add_output(p)

    p = sub.add_parser("compare", help="state counts of the current and proposed protocols")
    p.add_argument("--topology", required=True)
    _add_limits(p)
    _add_output(p)

    p = sub.add_parser("order", help="check an event-ordering query")
    p.add_argument("--topology", required=True)
    p.add_argument("--protocol", choices=("current", "proposed"), default="current")
    p.add_argument("--first", type=_csv, help="event pattern(s) opening the query")
    p.add_argument("--second", type=_csv, help="ForallPrecedes: patterns that must not come first")
    p.add_argument("--group", type=_csv, action="append", default=[],
                   help="ExistsInterleaving: one subsystem's patterns (repeat per subsystem)")
    p.add_argument("--parallel-termination", nargs="?", const="", metavar="MISSION",
                   help="ExistsInterleaving over the nested subsystems' cleanup of MISSION")
    p.add_argument("--expect", choices=("pass", "fail"), default="pass",
                   help="exit 0 when the query holds/finds a witness (pass) or not (fail)")
    _add_limits(p)
    _add_output(p)

    p = sub.add_parser("sim", help="run a scheduling scenario")
    p.add_argument("--scenario", required=True, help="builtin name or scenario .json file")
    p.add_argument("--horizon", type=int)
    _add_output(p)

    p = sub.add_parser("emit-model", help="print the generated .cmodel of a topology")
    p.add_argument("--topology", required=True)
    p.add_argument("--protocol", choices=("current", "proposed"), default="current")
    _add_output(p, default="text")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return ap


def _limits(args) -> Limits:
    max_states = args.max_states
    if max_states is None and os.environ.get("MK_MAX_STATES"):
        try:
            max_states = int(os.environ["MK_MAX_STATES"])
        except ValueError:
            raise service.InputError("MK_MAX_STATES must be an integer") from None
    return Limits(maxStates=max_states, maxDepth=args.max_depth, hide=args.hide)


def build_request(args):
    """Translate parsed arguments into (endpoint, request model)."""
    cmd = args.command
    if cmd == "sim":
        return "sim", SimRequest(scenario=service.source_from_arg(args.scenario, service.scenario_names()),
                                 horizon=args.horizon)
    if cmd == "check" and args.model is not None:
        src = service.source_from_arg(args.model, ())
        return "check", CheckRequest(model=src, limits=_limits(args))
    topo = service.source_from_arg(args.topology)
    if cmd == "check":
        return "check", CheckRequest(topology=topo, protocol=args.protocol, limits=_limits(args))
    if cmd == "compare":
        return "compare", CompareRequest(topology=topo, limits=_limits(args))
    if cmd == "emit-model":
        return "emit-model", EmitRequest(topology=topo, protocol=args.protocol)
    if args.parallel_termination is not None:
        if args.first or args.second or args.group:
            raise service.InputError("--parallel-termination takes no --first/--second/--group")
        return "order", OrderRequest(topology=topo, protocol=args.protocol, expect=args.expect,
                                     parallelTermination=args.parallel_termination, limits=_limits(args))
    if not args.first:
        raise service.InputError("order needs --first (or --parallel-termination)")
    if args.group:
        if args.second:
            raise service.InputError("use either --second or --group, not both")
        q = QuerySpec(mode="ExistsInterleaving", first=args.first, groups=args.group)
    elif args.second:
        q = QuerySpec(mode="ForallPrecedes", first=args.first, second=args.second)
    else:
        raise service.InputError("order needs --second or at least two --group options")
    return "order", OrderRequest(topology=topo, protocol=args.protocol, query=q, expect=args.expect,
                                 limits=_limits(args))


_LOCAL = {"check": service.check, "compare": service.compare, "order": service.order,
          "sim": service.sim, "emit-model": service.emit_model}


def _remote(url: str, endpoint: str, req) -> Outcome:
    import httpx

    try:
        r = httpx.post(f"{url.rstrip('/')}/{endpoint}", json=req.model_dump(by_alias=True, exclude_none=True),
                       timeout=None)
    except httpx.HTTPError as e:
        raise service.InputError(f"cannot reach {url}: {e}") from None
    if r.status_code == 422:
        detail = r.json().get("detail")
        raise service.InputError(detail if isinstance(detail, str) else json.dumps(detail))
    if r.status_code != 200:
        raise service.InputError(f"{url} answered HTTP {r.status_code}")
    return Outcome.model_validate(r.json())


def _emit(args, out: Outcome):
    if args.format == "json":
        body = json.dumps(out.report, indent=2, sort_keys=True) + "\n"
    else:
        body = out.text
    if args.output:
        with open(args.output, "w") as f:
            f.write(body)
    else:
        sys.stdout.write(body)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn
        uvicorn.run("scjl2.api:app", host=args.host, port=args.port)
        return 0
    try:
        endpoint, req = build_request(args)
        out = _remote(args.server, endpoint, req) if args.server else _LOCAL[endpoint](req)
        _emit(args, out)
    except (service.InputError, ValidationError) as e:
        print(f"scjl2: error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except OSError as e:
        print(f"scjl2: error: {e}", file=sys.stderr)
        return INPUT_ERROR
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
