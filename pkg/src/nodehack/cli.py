"""Command line front end.

Runs puzzles in process and talks to the same engine the server exposes.
Exit codes: 0 the puzzle was solved, 1 it ran without being solved (or a
robot was destroyed), 2 the program produced error diagnostics on the first
evaluation, 3 bad input (unknown puzzle, malformed file, forbidden edit).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .evaluator import EvalContext, inspect
from .graph import GraphError
from .natives import builtin_registry
from .puzzles import (
    TICK_EVENT,
    Edit,
    ForbiddenEdit,
    apply_edits,
    list_puzzles,
    load_edits,
    load_puzzle,
    load_solution,
    run_session,
)
from .serialize import ParseError, canonical_dumps, value_to_doc
from .world import snapshot

EXIT_SOLVED = 0
EXIT_UNSOLVED = 1
EXIT_ERROR_DIAGNOSTICS = 2
EXIT_BAD_INPUT = 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_BAD_INPUT


def _print_diagnostics(result) -> None:
    for d in result.diagnostics:
        port = f" port={d.port}" if d.port else ""
        print(f"  [{d.severity.value}] {d.node}{port}: {d.code.value}: {d.message}")


def _write_trace(path: str, doc: dict) -> None:
    Path(path).write_text(canonical_dumps(doc))


def _run_outcome(puzzle_id: str, edits: Sequence[Edit], ticks: Optional[int],
                 trace_path: Optional[str]) -> int:
    spec = load_puzzle(puzzle_id)
    outcome = run_session(spec, edits, max_ticks=ticks, record_trace=trace_path is not None)
    if trace_path is not None:
        _write_trace(trace_path, outcome.trace_doc(spec.id))
    if outcome.status == "solved":
        print(f"{spec.id} {spec.title}: solved at tick {outcome.solved_at_tick}")
        return EXIT_SOLVED
    if outcome.status == "error":
        print(f"{spec.id} {spec.title}: error diagnostics on first evaluation")
        if outcome.last_result is not None:
            _print_diagnostics(outcome.last_result)
        return EXIT_ERROR_DIAGNOSTICS
    print(f"{spec.id} {spec.title}: {outcome.status}")
    return EXIT_UNSOLVED


def cmd_list(args: argparse.Namespace) -> int:
    for pid in list_puzzles():
        spec = load_puzzle(pid)
        print(f"{spec.id}  {spec.title}")
    return 0


def cmd_show(args: argparse.Namespace) -> int:
    spec = load_puzzle(args.puzzle)
    print(f"{spec.id}: {spec.title}")
    print(spec.brief)
    print(f"nodes: {len(spec.program.nodes)}  tubes: {len(spec.program.tubes)}"
          f"  max_ticks: {spec.max_ticks}")
    print(f"allowed edits: {', '.join(sorted(spec.allowed_ops)) or 'none'}")
    if spec.editable_constants:
        print(f"editable constants: {', '.join(sorted(spec.editable_constants))}")
    for node in spec.program.nodes:
        kind = type(node.kind).__name__
        lock = " [locked]" if node.locked else ""
        print(f"  {node.id}: {kind}{lock}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    edits: tuple[Edit, ...] = ()
    if args.edits is not None:
        edits = load_edits(Path(args.edits))
    return _run_outcome(args.puzzle, edits, args.ticks, args.trace)


def cmd_solve(args: argparse.Namespace) -> int:
    edits = load_solution(args.puzzle)
    return _run_outcome(args.puzzle, edits, args.ticks, args.trace)


def cmd_inspect(args: argparse.Namespace) -> int:
    spec = load_puzzle(args.puzzle)
    program = spec.program
    if args.edits is not None:
        program = apply_edits(spec, program, load_edits(Path(args.edits)))
    ctx = EvalContext(
        view=snapshot(spec.world),
        classes=spec.classes,
        instances=dict(spec.instances),
        functions=builtin_registry(),
        pending_events=tuple(spec.initial_events) + (TICK_EVENT,),
    )
    report = inspect(program, ctx, args.node)
    doc = {
        "node": report.node,
        "value": value_to_doc(report.value) if report.value is not None else None,
        "diagnostic": None,
    }
    if report.diagnostic is not None:
        d = report.diagnostic
        doc["diagnostic"] = {
            "code": d.code.value,
            "message": d.message,
            "port": d.port,
            "severity": d.severity.value,
        }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(
        ui_dir=args.ui,
        socket_host=args.host,
        socket_port=args.socket_port,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nodehack",
        description="Node graph puzzle engine: run, inspect, and serve puzzles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list bundled puzzles").set_defaults(fn=cmd_list)

    p = sub.add_parser("show", help="describe one puzzle")
    p.add_argument("puzzle")
    p.set_defaults(fn=cmd_show)

    p = sub.add_parser("run", help="run a puzzle with an edit script")
    p.add_argument("puzzle")
    p.add_argument("--edits", help="path to an edits JSON file")
    p.add_argument("--ticks", type=int, default=None, help="override the tick budget")
    p.add_argument("--trace", help="write a full run trace to this file")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("solve", help="run a puzzle with its bundled solution")
    p.add_argument("puzzle")
    p.add_argument("--ticks", type=int, default=None)
    p.add_argument("--trace", help="write a full run trace to this file")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("inspect", help="evaluate once and report one node's output")
    p.add_argument("puzzle")
    p.add_argument("--node", required=True, help="node id to inspect")
    p.add_argument("--edits", help="apply this edit script first")
    p.set_defaults(fn=cmd_inspect)

    p = sub.add_parser("serve", help="start the session server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8123)
    p.add_argument("--socket-port", type=int, default=None,
                   help="also listen for line protocol clients on this port")
    p.add_argument("--ui", default=None, help="serve a static editor from this directory")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        return _fail(str(exc))
    except ForbiddenEdit as exc:
        return _fail(exc.message)
    except GraphError as exc:
        return _fail(f"{exc.code}: {exc}")
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
