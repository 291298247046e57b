"""Stateful editing sessions and the message protocol they speak.

A session holds one loaded puzzle: its live program, world, classes, and
instances. Clients drive it with SessionMessage envelopes; every request gets
exactly one response. The same handler backs the HTTP server, the line
protocol socket, and the in-process CLI.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from .classes import ClassTable, Instance, set_class_default
from .evaluator import EvalContext, EvalResult, evaluate, inspect
from .graph import GraphError, Program
from .natives import builtin_registry
from .puzzles import (
    TICK_EVENT,
    ForbiddenEdit,
    PuzzleSpec,
    apply_edit,
    check_win,
    edit_from_doc,
    event_from_doc,
    event_to_doc,
    list_puzzles,
    load_puzzle,
    resolve_blueprints,
    any_robot_dead,
)
from .serialize import (
    ParseError,
    _int,
    _list,
    _obj,
    _str,
    classes_from_doc,
    classes_to_doc,
    instances_from_doc,
    instances_to_doc,
    program_from_doc,
    program_to_doc,
    value_to_doc,
    world_from_doc,
    world_to_doc,
)
from .world import World, WorldEvent, snapshot, step

FORMAT_VERSION = 1


class SessionError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass(frozen=True)
class SessionMessage:
    id: str
    type: str
    payload: Mapping[str, Any] = field(default_factory=dict)


def message_from_doc(doc: Any) -> SessionMessage:
    _obj(doc, {"id", "type", "payload"}, {"id", "type"}, "$")
    payload = doc.get("payload", {})
    if not isinstance(payload, dict):
        raise ParseError("expected an object", "$.payload")
    return SessionMessage(_str(doc, "id", "$"), _str(doc, "type", "$"), payload)


def _diag_doc(d) -> dict:
    return {
        "node": d.node,
        "code": d.code.value,
        "message": d.message,
        "port": d.port,
        "severity": d.severity.value,
    }


def _eval_doc(result: EvalResult) -> dict:
    return {
        "outputs": {
            f"{nid}.{port}": value_to_doc(v)
            for (nid, port), v in sorted(result.outputs.items())
        },
        "diagnostics": [_diag_doc(d) for d in result.diagnostics],
        "actions": [
            {"entity": a.entity, "prop": a.prop, "value": value_to_doc(a.value)}
            for a in result.actions
        ],
        "tube_states": {
            f"{k[2]}.{k[3]}->{k[0]}.{k[1]}": state.value
            for k, state in sorted(result.tube_states.items())
        },
        "fired_events": [event_to_doc(e) for e in result.fired_events],
    }


class Session:
    """One loaded puzzle being edited and ticked."""

    def __init__(self) -> None:
        self.spec: Optional[PuzzleSpec] = None
        self.program: Optional[Program] = None
        self.world: Optional[World] = None
        self.classes: ClassTable = ClassTable()
        self.instances: dict[str, Instance] = {}
        self.pending: tuple[WorldEvent, ...] = ()
        self.tick_count = 0
        self.solved = False

    # ---- lifecycle -------------------------------------------------------

    def load(self, spec: PuzzleSpec) -> None:
        self.spec = spec
        self.program = spec.program
        self.world = spec.world
        self.classes = spec.classes
        self.instances = dict(spec.instances)
        self.pending = tuple(spec.initial_events)
        self.tick_count = 0
        self.solved = False

    def reset(self) -> None:
        """Back to the initial world and tick zero; program edits survive."""
        if self.spec is None:
            raise SessionError("NoPuzzleLoaded", "load a puzzle first")
        self.world = self.spec.world
        self.classes = self.spec.classes
        self.instances = dict(self.spec.instances)
        self.pending = tuple(self.spec.initial_events)
        self.tick_count = 0
        self.solved = False

    def _require_loaded(self) -> PuzzleSpec:
        if self.spec is None or self.program is None or self.world is None:
            raise SessionError("NoPuzzleLoaded", "load a puzzle first")
        return self.spec

    # ---- evaluation ------------------------------------------------------

    def _context(self) -> EvalContext:
        return EvalContext(
            view=snapshot(self.world),
            classes=self.classes,
            instances=self.instances,
            functions=builtin_registry(),
            pending_events=self.pending + (TICK_EVENT,),
        )

    def preview(self) -> EvalResult:
        """Evaluate without consuming events or advancing the world."""
        self._require_loaded()
        return evaluate(self.program, self._context())

    def advance(self) -> EvalResult:
        spec = self._require_loaded()
        result = evaluate(self.program, self._context())
        for w in result.class_writes:
            self.classes = set_class_default(self.classes, w.class_id, w.field, w.value)
        for inst in result.instance_creates:
            self.instances[inst.id] = inst
        world, actions = resolve_blueprints(
            self.world, result.actions, self.classes, self.instances
        )
        step_result = step(world, actions)
        self.world = step_result.world
        self.pending = step_result.events
        self.tick_count += 1
        if check_win(spec, self.world, self.classes, self.instances):
            self.solved = True
        return result

    # ---- message handling --------------------------------------------------

    def handle(self, msg: SessionMessage) -> dict:
        """Process one message; returns the response document."""
        try:
            payload = self._dispatch(msg.type, msg.payload)
            return {"id": msg.id, "type": msg.type, "status": "ok", "payload": payload}
        except SessionError as exc:
            return self._error(msg, exc.code, exc.message)
        except ForbiddenEdit as exc:
            return self._error(msg, "ForbiddenEdit", exc.message)
        except GraphError as exc:
            return self._error(msg, exc.code, exc.message)
        except ParseError as exc:
            return self._error(msg, "SchemaError", str(exc))

    @staticmethod
    def _error(msg: SessionMessage, code: str, message: str) -> dict:
        return {
            "id": msg.id,
            "type": msg.type,
            "status": "error",
            "error": {"code": code, "message": message},
        }

    def _dispatch(self, kind: str, payload: Mapping[str, Any]) -> dict:
        handlers = {
            "list_puzzles": self._msg_list_puzzles,
            "load_puzzle": self._msg_load_puzzle,
            "get_state": self._msg_get_state,
            "apply_edit": self._msg_apply_edit,
            "tick": self._msg_tick,
            "run_until": self._msg_run_until,
            "inspect_node": self._msg_inspect_node,
            "reset": self._msg_reset,
            "save_state": self._msg_save_state,
            "load_state": self._msg_load_state,
        }
        handler = handlers.get(kind)
        if handler is None:
            raise SessionError("UnknownMessageType", f"no message type {kind!r}")
        return handler(dict(payload))

    def _msg_list_puzzles(self, payload: dict) -> dict:
        _obj(payload, set(), set(), "$.payload")
        out = []
        for pid in list_puzzles():
            spec = load_puzzle(pid)
            out.append({"id": spec.id, "title": spec.title, "brief": spec.brief})
        return {"puzzles": out}

    def _msg_load_puzzle(self, payload: dict) -> dict:
        _obj(payload, {"puzzle_id"}, {"puzzle_id"}, "$.payload")
        puzzle_id = _str(payload, "puzzle_id", "$.payload")
        if puzzle_id not in list_puzzles():
            raise SessionError("NoSuchPuzzle", f"no puzzle {puzzle_id!r}")
        spec = load_puzzle(puzzle_id)
        self.load(spec)
        return {
            "puzzle_id": spec.id,
            "title": spec.title,
            "brief": spec.brief,
            "program": program_to_doc(spec.program),
            "world": world_to_doc(spec.world),
            "classes": classes_to_doc(spec.classes),
            "instances": instances_to_doc(spec.instances),
            "allowed_edits": {
                "ops": sorted(spec.allowed_ops),
                "editable_constants": sorted(spec.editable_constants),
            },
            "max_ticks": spec.max_ticks,
        }

    def _msg_get_state(self, payload: dict) -> dict:
        _obj(payload, set(), set(), "$.payload")
        spec = self._require_loaded()
        result = self.preview()
        return {
            "puzzle_id": spec.id,
            "tick": self.tick_count,
            "solved": self.solved,
            "program": program_to_doc(self.program),
            "world": world_to_doc(self.world),
            "classes": classes_to_doc(self.classes),
            "instances": instances_to_doc(self.instances),
            "eval": _eval_doc(result),
        }

    def _msg_apply_edit(self, payload: dict) -> dict:
        _obj(payload, {"edit"}, {"edit"}, "$.payload")
        spec = self._require_loaded()
        edit = edit_from_doc(payload["edit"], "$.payload.edit")
        self.program = apply_edit(spec, self.program, edit)
        return {"program": program_to_doc(self.program)}

    def _msg_tick(self, payload: dict) -> dict:
        _obj(payload, set(), set(), "$.payload")
        self._require_loaded()
        result = self.advance()
        return {
            "tick": self.tick_count,
            "solved": self.solved,
            "world": world_to_doc(self.world),
            "eval": _eval_doc(result),
        }

    def _msg_run_until(self, payload: dict) -> dict:
        _obj(payload, {"max_ticks"}, set(), "$.payload")
        spec = self._require_loaded()
        budget = (
            _int(payload, "max_ticks", "$.payload")
            if "max_ticks" in payload
            else spec.max_ticks
        )
        status = "unsolved"
        solved_at = None
        for _ in range(budget):
            self.advance()
            if self.solved:
                status = "solved"
                solved_at = self.tick_count - 1
                break
            if any_robot_dead(self.world):
                status = "failed"
                break
        return {
            "status": "solved" if self.solved else status,
            "solved_at_tick": solved_at,
            "tick": self.tick_count,
            "world": world_to_doc(self.world),
        }

    def _msg_inspect_node(self, payload: dict) -> dict:
        _obj(payload, {"node"}, {"node"}, "$.payload")
        self._require_loaded()
        report = inspect(
            self.program, self._context(), _str(payload, "node", "$.payload")
        )
        return {
            "node": report.node,
            "value": value_to_doc(report.value) if report.value is not None else None,
            "diagnostic": _diag_doc(report.diagnostic) if report.diagnostic else None,
        }

    def _msg_reset(self, payload: dict) -> dict:
        _obj(payload, set(), set(), "$.payload")
        self.reset()
        return {"tick": self.tick_count, "world": world_to_doc(self.world)}

    def _msg_save_state(self, payload: dict) -> dict:
        _obj(payload, set(), set(), "$.payload")
        spec = self._require_loaded()
        return {
            "state": {
                "format_version": FORMAT_VERSION,
                "puzzle_id": spec.id,
                "tick": self.tick_count,
                "solved": self.solved,
                "program": program_to_doc(self.program),
                "world": world_to_doc(self.world),
                "classes": classes_to_doc(self.classes),
                "instances": instances_to_doc(self.instances),
                "pending_events": [event_to_doc(e) for e in self.pending],
            }
        }

    def _msg_load_state(self, payload: dict) -> dict:
        _obj(payload, {"state"}, {"state"}, "$.payload")
        doc = payload["state"]
        allowed = {
            "format_version", "puzzle_id", "tick", "solved", "program", "world",
            "classes", "instances", "pending_events",
        }
        _obj(doc, allowed, allowed, "$.payload.state")
        if doc["format_version"] != FORMAT_VERSION:
            raise ParseError("unsupported format_version", "$.payload.state.format_version")
        spec = load_puzzle(_str(doc, "puzzle_id", "$.payload.state"))
        self.spec = spec
        self.program = program_from_doc(doc["program"], "$.payload.state.program")
        self.world = world_from_doc(doc["world"], "$.payload.state.world")
        self.classes = classes_from_doc(doc["classes"], "$.payload.state.classes")
        self.instances = instances_from_doc(doc["instances"], "$.payload.state.instances")
        self.pending = tuple(
            event_from_doc(e, f"$.payload.state.pending_events[{i}]")
            for i, e in enumerate(_list(doc, "pending_events", "$.payload.state"))
        )
        self.tick_count = _int(doc, "tick", "$.payload.state")
        solved = doc["solved"]
        if not isinstance(solved, bool):
            raise ParseError("expected a boolean", "$.payload.state.solved")
        self.solved = solved
        return {"puzzle_id": spec.id, "tick": self.tick_count}


class SessionManager:
    """Sessions by id, for servers multiplexing several clients."""

    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._counter = itertools.count(1)

    def create(self) -> str:
        session_id = f"s{next(self._counter)}"
        self._sessions[session_id] = Session()
        return session_id

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise SessionError("NoSuchSession", f"no session {session_id!r}")
        return session

    def close(self, session_id: str) -> bool:
        return self._sessions.pop(session_id, None) is not None

    def ids(self) -> list[str]:
        return sorted(self._sessions)
