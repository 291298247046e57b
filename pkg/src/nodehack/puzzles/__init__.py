"""Puzzle pack: specs on disk, win conditions, edit scripts, headless runs.

A puzzle bundles an initial world, a program template, class definitions,
pre-made instances, the edits a player may perform, and a win condition.
`run_session` plays an edit script against a puzzle and reports how it went.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from ..classes import ClassTable, Instance, read_field, set_class_default
from ..evaluator import EvalContext, EvalResult, evaluate
from ..graph import Program, connect, disconnect, set_constant
from ..natives import builtin_registry
from ..serialize import (
    ParseError,
    _enum,
    _int,
    _list,
    _num,
    _obj,
    _opt_str,
    _str,
    _value,
    classes_from_doc,
    classes_to_doc,
    instances_from_doc,
    instances_to_doc,
    loads,
    program_from_doc,
    program_to_doc,
    value_to_doc,
    world_from_doc,
    world_to_doc,
)
from ..values import Color, DataType, Value
from ..world import (
    Avatar,
    Cube,
    EntityWrite,
    EventKind,
    Robot,
    StepResult,
    World,
    WorldEvent,
    configure_robot,
    snapshot,
    step,
)

FORMAT_VERSION = 1

# The pure-dataflow tick event; handlers watching for it fire every pass.
TICK_EVENT = WorldEvent(EventKind.ON_TICK, "world")


class ForbiddenEdit(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# ---- edits -----------------------------------------------------------------


@dataclass(frozen=True)
class Edit:
    op: str  # connect | disconnect | set_constant
    from_end: Optional[tuple[str, str]] = None
    to_end: Optional[tuple[str, str]] = None
    node: Optional[str] = None
    value: Optional[Value] = None


def _endpoint(doc: Any, path: str) -> tuple[str, str]:
    if not (
        isinstance(doc, list)
        and len(doc) == 2
        and all(isinstance(x, str) for x in doc)
    ):
        raise ParseError("expected a [node, port] pair", path)
    return (doc[0], doc[1])


def edit_from_doc(doc: Any, path: str) -> Edit:
    if not isinstance(doc, dict) or "op" not in doc:
        raise ParseError("expected an edit object with an 'op' tag", path)
    op = doc["op"]
    if op == "connect":
        _obj(doc, {"op", "from", "to"}, {"op", "from", "to"}, path)
        return Edit(op, from_end=_endpoint(doc["from"], f"{path}.from"),
                    to_end=_endpoint(doc["to"], f"{path}.to"))
    if op == "disconnect":
        _obj(doc, {"op", "to"}, {"op", "to"}, path)
        return Edit(op, to_end=_endpoint(doc["to"], f"{path}.to"))
    if op == "set_constant":
        _obj(doc, {"op", "node", "value"}, {"op", "node", "value"}, path)
        return Edit(op, node=_str(doc, "node", path),
                    value=_value(doc["value"], f"{path}.value"))
    raise ParseError(f"unknown edit op {op!r}", path)


def edit_to_doc(edit: Edit) -> dict:
    if edit.op == "connect":
        return {"op": "connect", "from": list(edit.from_end), "to": list(edit.to_end)}
    if edit.op == "disconnect":
        return {"op": "disconnect", "to": list(edit.to_end)}
    if edit.op == "set_constant":
        return {"op": "set_constant", "node": edit.node, "value": value_to_doc(edit.value)}
    raise ParseError(f"unknown edit op {edit.op!r}")


def edits_from_doc(doc: Any, path: str = "$") -> tuple[Edit, ...]:
    _obj(doc, {"format_version", "edits"}, {"format_version", "edits"}, path)
    if doc["format_version"] != FORMAT_VERSION:
        raise ParseError("unsupported format_version", f"{path}.format_version")
    return tuple(
        edit_from_doc(ed, f"{path}.edits[{i}]")
        for i, ed in enumerate(_list(doc, "edits", path))
    )


def edits_to_doc(edits: Sequence[Edit]) -> dict:
    return {"format_version": FORMAT_VERSION, "edits": [edit_to_doc(e) for e in edits]}


# ---- win conditions ---------------------------------------------------------


@dataclass(frozen=True)
class WinClause:
    kind: str
    entity: Optional[str] = None
    prop: Optional[str] = None
    value: Optional[Value] = None
    tolerance: Optional[float] = None
    number: Optional[int] = None
    instance: Optional[str] = None
    field_name: Optional[str] = None
    col: Optional[int] = None
    row: Optional[int] = None
    avatar: Optional[str] = None
    elevator: Optional[str] = None


def clause_to_doc(c: WinClause) -> dict:
    if c.kind == "entity_prop":
        out: dict = {
            "kind": c.kind,
            "entity": c.entity,
            "prop": c.prop,
            "value": value_to_doc(c.value),
        }
        if c.tolerance is not None:
            out["tolerance"] = c.tolerance
        return out
    if c.kind == "avatar_riding":
        return {"kind": c.kind, "avatar": c.avatar, "elevator": c.elevator}
    if c.kind in ("cube_on_marker", "no_cubes_on_other_markers"):
        return {"kind": c.kind, "number": c.number}
    if c.kind == "instance_field":
        return {
            "kind": c.kind,
            "instance": c.instance,
            "field": c.field_name,
            "value": value_to_doc(c.value),
        }
    if c.kind == "robot_at":
        return {"kind": c.kind, "entity": c.entity, "col": c.col, "row": c.row}
    raise ParseError(f"unknown win clause {c.kind!r}")


def clause_from_doc(doc: Any, path: str) -> WinClause:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("expected a win clause with a 'kind' tag", path)
    kind = doc["kind"]
    if kind == "entity_prop":
        _obj(doc, {"kind", "entity", "prop", "value", "tolerance"},
             {"kind", "entity", "prop", "value"}, path)
        return WinClause(
            kind,
            entity=_str(doc, "entity", path),
            prop=_str(doc, "prop", path),
            value=_value(doc["value"], f"{path}.value"),
            tolerance=_num(doc, "tolerance", path) if "tolerance" in doc else None,
        )
    if kind == "avatar_riding":
        _obj(doc, {"kind", "avatar", "elevator"}, {"kind", "avatar", "elevator"}, path)
        return WinClause(kind, avatar=_str(doc, "avatar", path),
                         elevator=_str(doc, "elevator", path))
    if kind in ("cube_on_marker", "no_cubes_on_other_markers"):
        _obj(doc, {"kind", "number"}, {"kind", "number"}, path)
        return WinClause(kind, number=_int(doc, "number", path))
    if kind == "instance_field":
        _obj(doc, {"kind", "instance", "field", "value"},
             {"kind", "instance", "field", "value"}, path)
        return WinClause(
            kind,
            instance=_str(doc, "instance", path),
            field_name=_str(doc, "field", path),
            value=_value(doc["value"], f"{path}.value"),
        )
    if kind == "robot_at":
        _obj(doc, {"kind", "entity", "col", "row"}, {"kind", "entity", "col", "row"}, path)
        return WinClause(kind, entity=_str(doc, "entity", path),
                         col=_int(doc, "col", path), row=_int(doc, "row", path))
    raise ParseError(f"unknown win clause {kind!r}", path)


NUMBER_TOLERANCE = 1e-9


def _clause_holds(
    clause: WinClause,
    world: World,
    classes: ClassTable,
    instances: Mapping[str, Instance],
) -> bool:
    if clause.kind == "entity_prop":
        view = snapshot(world)
        got = view.read(clause.entity, clause.prop)
        if got is None:
            return False
        if got.type is not clause.value.type:
            return False
        if got.type is DataType.NUMBER:
            tol = clause.tolerance if clause.tolerance is not None else NUMBER_TOLERANCE
            return abs(got.value - clause.value.value) <= tol
        return got == clause.value
    if clause.kind == "avatar_riding":
        av = world.entities.get(clause.avatar)
        return isinstance(av, Avatar) and av.riding == clause.elevator
    if clause.kind == "cube_on_marker":
        for ent in world.entities.values():
            if isinstance(ent, Cube) and ent.carried_by is None:
                marker = world.grid.cell(ent.col, ent.row).marker
                if marker is not None and marker.number == clause.number:
                    return True
        return False
    if clause.kind == "no_cubes_on_other_markers":
        for ent in world.entities.values():
            if isinstance(ent, Cube) and ent.carried_by is None:
                marker = world.grid.cell(ent.col, ent.row).marker
                if marker is not None and marker.number != clause.number:
                    return False
        return True
    if clause.kind == "instance_field":
        inst = instances.get(clause.instance)
        if inst is None:
            return False
        try:
            return read_field(classes, inst, clause.field_name) == clause.value
        except Exception:
            return False
    if clause.kind == "robot_at":
        bot = world.entities.get(clause.entity)
        return (
            isinstance(bot, Robot)
            and bot.alive
            and (bot.col, bot.row) == (clause.col, clause.row)
        )
    raise ParseError(f"unknown win clause {clause.kind!r}")


# ---- puzzle specs -----------------------------------------------------------


@dataclass(frozen=True)
class PuzzleSpec:
    id: str
    title: str
    brief: str
    world: World
    program: Program
    classes: ClassTable = field(default_factory=ClassTable)
    instances: Mapping[str, Instance] = field(default_factory=dict)
    allowed_ops: frozenset[str] = frozenset()
    editable_constants: tuple[str, ...] = ()
    initial_events: tuple[WorldEvent, ...] = ()
    max_ticks: int = 50
    win: tuple[WinClause, ...] = ()


def event_to_doc(ev: WorldEvent) -> dict:
    return {
        "kind": ev.kind.value,
        "entity": ev.entity,
        "column": ev.column,
        "color": ev.color.value if ev.color is not None else None,
    }


def event_from_doc(doc: Any, path: str) -> WorldEvent:
    _obj(doc, {"kind", "entity", "column", "color"}, {"kind", "entity"}, path)
    column = doc.get("column")
    if column is not None and (isinstance(column, bool) or not isinstance(column, int)):
        raise ParseError("expected an integer or null", f"{path}.column")
    color_raw = _opt_str(doc, "color", path)
    return WorldEvent(
        _enum(EventKind, _str(doc, "kind", path), f"{path}.kind"),
        _str(doc, "entity", path),
        column=column,
        color=_enum(Color, color_raw, f"{path}.color") if color_raw is not None else None,
    )


def puzzle_to_doc(spec: PuzzleSpec) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "id": spec.id,
        "title": spec.title,
        "brief": spec.brief,
        "world": world_to_doc(spec.world),
        "program": program_to_doc(spec.program),
        "classes": classes_to_doc(spec.classes),
        "instances": instances_to_doc(spec.instances),
        "allowed_edits": {
            "ops": sorted(spec.allowed_ops),
            "editable_constants": sorted(spec.editable_constants),
        },
        "initial_events": [event_to_doc(e) for e in spec.initial_events],
        "max_ticks": spec.max_ticks,
        "win": [clause_to_doc(c) for c in spec.win],
    }


def puzzle_from_doc(doc: Any, path: str = "$") -> PuzzleSpec:
    allowed = {
        "format_version", "id", "title", "brief", "world", "program", "classes",
        "instances", "allowed_edits", "initial_events", "max_ticks", "win",
    }
    _obj(doc, allowed, allowed, path)
    if doc["format_version"] != FORMAT_VERSION:
        raise ParseError("unsupported format_version", f"{path}.format_version")
    ae = _obj(doc["allowed_edits"], {"ops", "editable_constants"},
              {"ops", "editable_constants"}, f"{path}.allowed_edits")
    ops_raw = _list(ae, "ops", f"{path}.allowed_edits")
    for op in ops_raw:
        if op not in ("connect", "disconnect", "set_constant"):
            raise ParseError(f"unknown edit op {op!r}", f"{path}.allowed_edits.ops")
    ops = frozenset(ops_raw)
    editable = tuple(
        e for e in _list(ae, "editable_constants", f"{path}.allowed_edits")
        if isinstance(e, str)
    )
    if len(editable) != len(ae["editable_constants"]):
        raise ParseError("expected strings", f"{path}.allowed_edits.editable_constants")
    return PuzzleSpec(
        id=_str(doc, "id", path),
        title=_str(doc, "title", path),
        brief=_str(doc, "brief", path),
        world=world_from_doc(doc["world"], f"{path}.world"),
        program=program_from_doc(doc["program"], f"{path}.program"),
        classes=classes_from_doc(doc["classes"], f"{path}.classes"),
        instances=instances_from_doc(doc["instances"], f"{path}.instances"),
        allowed_ops=ops,
        editable_constants=editable,
        initial_events=tuple(
            event_from_doc(e, f"{path}.initial_events[{i}]")
            for i, e in enumerate(_list(doc, "initial_events", path))
        ),
        max_ticks=_int(doc, "max_ticks", path),
        win=tuple(
            clause_from_doc(c, f"{path}.win[{i}]")
            for i, c in enumerate(_list(doc, "win", path))
        ),
    )


# ---- loading ----------------------------------------------------------------

PUZZLE_DIR_ENV = "NODEHACK_PUZZLE_DIR"


def puzzle_dir() -> Path:
    override = os.environ.get(PUZZLE_DIR_ENV)
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def list_puzzles(directory: Optional[Path] = None) -> list[str]:
    d = directory if directory is not None else puzzle_dir()
    if not d.is_dir():
        return []
    return sorted(p.stem for p in d.glob("p*.json"))


def load_puzzle(puzzle_id: str, directory: Optional[Path] = None) -> PuzzleSpec:
    d = directory if directory is not None else puzzle_dir()
    path = d / f"{puzzle_id}.json"
    if not path.is_file():
        raise ParseError(f"no puzzle {puzzle_id!r} in {d}", "$")
    spec = puzzle_from_doc(loads(path.read_text()), "$")
    if spec.id != puzzle_id:
        raise ParseError(f"puzzle file {path.name} declares id {spec.id!r}", "$.id")
    return spec


def load_edits(path: Path) -> tuple[Edit, ...]:
    return edits_from_doc(loads(path.read_text()))


def load_solution(puzzle_id: str, directory: Optional[Path] = None) -> tuple[Edit, ...]:
    d = directory if directory is not None else puzzle_dir()
    return load_edits(d / "solutions" / f"{puzzle_id}.json")


# ---- edit application ---------------------------------------------------------


def apply_edit(spec: PuzzleSpec, program: Program, edit: Edit) -> Program:
    if edit.op not in spec.allowed_ops:
        raise ForbiddenEdit(f"this puzzle does not allow {edit.op!r} edits")
    if edit.op == "connect":
        return connect(program, edit.from_end, edit.to_end)
    if edit.op == "disconnect":
        return disconnect(program, edit.to_end)
    if edit.op == "set_constant":
        node = program.node(edit.node)
        if node is not None and node.locked:
            raise ForbiddenEdit(f"node {edit.node!r} is locked")
        if edit.node not in spec.editable_constants:
            raise ForbiddenEdit(f"constant {edit.node!r} is not editable in this puzzle")
        return set_constant(program, edit.node, edit.value)
    raise ForbiddenEdit(f"unknown edit op {edit.op!r}")


def apply_edits(spec: PuzzleSpec, program: Program, edits: Sequence[Edit]) -> Program:
    for edit in edits:
        program = apply_edit(spec, program, edit)
    return program


# ---- headless session run ------------------------------------------------------


@dataclass(frozen=True)
class TickRecord:
    tick: int
    result: EvalResult
    step_result: Optional[StepResult]

    def to_doc(self) -> dict:
        outputs = {
            f"{nid}.{port}": value_to_doc(v)
            for (nid, port), v in sorted(self.result.outputs.items())
        }
        return {
            "tick": self.tick,
            "outputs": outputs,
            "diagnostics": [
                {
                    "node": d.node,
                    "code": d.code.value,
                    "message": d.message,
                    "port": d.port,
                    "severity": d.severity.value,
                }
                for d in self.result.diagnostics
            ],
            "actions": [
                {"entity": a.entity, "prop": a.prop, "value": value_to_doc(a.value)}
                for a in self.result.actions
            ],
            "class_writes": [
                {"class_id": w.class_id, "field": w.field, "value": value_to_doc(w.value)}
                for w in self.result.class_writes
            ],
            "fired_events": [event_to_doc(e) for e in self.result.fired_events],
        }


@dataclass(frozen=True)
class SessionOutcome:
    status: str  # solved | unsolved | failed | error
    solved_at_tick: Optional[int]
    world: World
    program: Program
    last_result: Optional[EvalResult]
    trace: tuple[TickRecord, ...] = ()

    def trace_doc(self, puzzle_id: str) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "puzzle": puzzle_id,
            "status": self.status,
            "solved_at_tick": self.solved_at_tick,
            "ticks": [t.to_doc() for t in self.trace],
        }


def check_win(
    spec: PuzzleSpec,
    world: World,
    classes: ClassTable,
    instances: Mapping[str, Instance],
) -> bool:
    return all(_clause_holds(c, world, classes, instances) for c in spec.win)


def resolve_blueprints(
    world: World,
    actions: Sequence[EntityWrite],
    classes: ClassTable,
    instances: Mapping[str, Instance],
) -> tuple[World, list[EntityWrite]]:
    """Turn blueprint writes into robot configuration; pass the rest through."""
    remaining: list[EntityWrite] = []
    for action in actions:
        if action.prop != "blueprint":
            remaining.append(action)
            continue
        inst = instances.get(action.value.value)
        if inst is None:
            continue
        try:
            movement = read_field(classes, inst, "movement_type").value
            body = read_field(classes, inst, "body_type").value
            world = configure_robot(world, action.entity, movement, body, inst.id)
        except Exception:
            continue
    return world, remaining


def any_robot_dead(world: World) -> bool:
    return any(isinstance(e, Robot) and not e.alive for e in world.entities.values())


def run_session(
    spec: PuzzleSpec,
    edits: Sequence[Edit] = (),
    max_ticks: Optional[int] = None,
    record_trace: bool = False,
) -> SessionOutcome:
    """Apply edits, then tick until the puzzle is solved or the budget runs out.

    Raises ForbiddenEdit/GraphError for bad edit scripts; never raises for
    anything the program does while running.
    """
    program = apply_edits(spec, spec.program, edits)
    world = spec.world
    classes = spec.classes
    instances: dict[str, Instance] = dict(spec.instances)
    pending: tuple[WorldEvent, ...] = tuple(spec.initial_events)
    budget = max_ticks if max_ticks is not None else spec.max_ticks
    trace: list[TickRecord] = []
    last_result: Optional[EvalResult] = None

    for tick in range(budget):
        ctx = EvalContext(
            view=snapshot(world),
            classes=classes,
            instances=instances,
            functions=builtin_registry(),
            pending_events=pending + (TICK_EVENT,),
        )
        result = evaluate(program, ctx)
        last_result = result

        if tick == 0 and result.errors():
            if record_trace:
                trace.append(TickRecord(tick, result, None))
            return SessionOutcome("error", None, world, program, result, tuple(trace))

        for w in result.class_writes:
            classes = set_class_default(classes, w.class_id, w.field, w.value)
        for inst in result.instance_creates:
            instances[inst.id] = inst

        world, actions = resolve_blueprints(world, result.actions, classes, instances)
        step_result = step(world, actions)
        world = step_result.world
        pending = step_result.events

        if record_trace:
            trace.append(TickRecord(tick, result, step_result))

        if check_win(spec, world, classes, instances):
            return SessionOutcome("solved", tick, world, program, result, tuple(trace))
        if any_robot_dead(world):
            return SessionOutcome("failed", None, world, program, result, tuple(trace))

    return SessionOutcome("unsolved", None, world, program, last_result, tuple(trace))
