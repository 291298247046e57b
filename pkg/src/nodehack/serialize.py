"""Canonical JSON codecs for programs, worlds, classes, and instances.

Canonical form is byte-stable: sorted keys, compact separators, ASCII only,
one trailing newline. Parsers are strict — unknown or missing fields raise
ParseError with a path into the document, never a partial result.
"""

from __future__ import annotations

import json
from typing import Any, Callable, Mapping, Optional

from .classes import ClassDef, ClassTable, FieldDef, Instance, MethodDef
from .graph import (
    ArithOp,
    Arithmetic,
    ClassNode,
    Compare,
    CompareOp,
    Conditional,
    Constant,
    ConstructorCall,
    EntityNode,
    EventHandler,
    EventKind,
    FunctionCall,
    Logical,
    LogicOp,
    MethodCall,
    Node,
    NodeKind,
    Not,
    Program,
    Tube,
    make_node,
    validate_program,
)
from .values import Color, DataType, Value, value_from_doc, value_to_doc
from .world import (
    Avatar,
    Button,
    Cell,
    ColumnMarker,
    Command,
    Cube,
    Door,
    Elevator,
    Entity,
    Grid,
    Heading,
    PasswordConsole,
    Robot,
    Terrain,
    World,
    validate_world,
)

FORMAT_VERSION = 1


class ParseError(Exception):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.message = message
        self.path = path


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def loads(raw: str, path: str = "$") -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path)


# ---- strict field access -----------------------------------------------


def _obj(doc: Any, allowed: set[str], required: set[str], path: str) -> dict:
    if not isinstance(doc, dict):
        raise ParseError(f"expected an object, got {type(doc).__name__}", path)
    unknown = set(doc) - allowed
    if unknown:
        raise ParseError(f"unknown fields {sorted(unknown)}", path)
    missing = required - set(doc)
    if missing:
        raise ParseError(f"missing fields {sorted(missing)}", path)
    return doc


def _str(doc: dict, key: str, path: str) -> str:
    v = doc[key]
    if not isinstance(v, str):
        raise ParseError(f"expected a string", f"{path}.{key}")
    return v

def _opt_str(doc: dict, key: str, path: str) -> Optional[str]:
    v = doc.get(key)
    if v is None:
        return None
    if not isinstance(v, str):
        raise ParseError(f"expected a string or null", f"{path}.{key}")
    return v


def _num(doc: dict, key: str, path: str) -> float:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number", f"{path}.{key}")
    return float(v)


def _int(doc: dict, key: str, path: str) -> int:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer", f"{path}.{key}")
    return v


def _bool(doc: dict, key: str, path: str) -> bool:
    v = doc[key]
    if not isinstance(v, bool):
        raise ParseError(f"expected a boolean", f"{path}.{key}")
    return v


def _list(doc: dict, key: str, path: str) -> list:
    v = doc[key]
    if not isinstance(v, list):
        raise ParseError(f"expected an array", f"{path}.{key}")
    return v


def _enum(cls: Callable, raw: str, path: str):
    try:
        return cls(raw)
    except ValueError:
        raise ParseError(f"not a valid {cls.__name__}: {raw!r}", path)


def _value(doc: Any, path: str) -> Value:
    try:
        return value_from_doc(doc)
    except ValueError as exc:
        raise ParseError(str(exc), path)


def _signature_doc(sig) -> list:
    return [[name, dtype.value] for name, dtype in sig]


def _signature(doc: Any, path: str) -> tuple:
    if not isinstance(doc, list):
        raise ParseError("expected an array of [name, type] pairs", path)
    out = []
    for i, pair in enumerate(doc):
        if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
            raise ParseError("expected a [name, type] pair", f"{path}[{i}]")
        out.append((pair[0], _enum(DataType, pair[1], f"{path}[{i}]")))
    return tuple(out)


# ---- node kinds ----------------------------------------------------------


def kind_to_doc(kind: NodeKind) -> dict:
    if isinstance(kind, Constant):
        return {"type": "constant", "value": value_to_doc(kind.value)}
    if isinstance(kind, Arithmetic):
        return {"type": "arithmetic", "op": kind.op.value}
    if isinstance(kind, Logical):
        return {"type": "logical", "op": kind.op.value}
    if isinstance(kind, Not):
        return {"type": "not"}
    if isinstance(kind, Compare):
        return {"type": "compare", "op": kind.op.value}
    if isinstance(kind, Conditional):
        return {"type": "conditional"}
    if isinstance(kind, EventHandler):
        return {"type": "event_handler", "event": kind.event.value, "entity": kind.entity}
    if isinstance(kind, FunctionCall):
        return {
            "type": "function_call",
            "function": kind.function,
            "ins": _signature_doc(kind.ins),
            "outs": _signature_doc(kind.outs),
        }
    if isinstance(kind, MethodCall):
        return {
            "type": "method_call",
            "class_id": kind.class_id,
            "method": kind.method,
            "args": _signature_doc(kind.args),
            "outs": _signature_doc(kind.outs),
        }
    if isinstance(kind, ConstructorCall):
        return {
            "type": "constructor_call",
            "class_id": kind.class_id,
            "params": _signature_doc(kind.params),
        }
    if isinstance(kind, EntityNode):
        return {"type": "entity", "entity": kind.entity, "entity_kind": kind.entity_kind}
    if isinstance(kind, ClassNode):
        return {
            "type": "class",
            "class_id": kind.class_id,
            "fields": _signature_doc(kind.fields),
        }
    raise ParseError(f"unhandled node kind {type(kind).__name__}")


def kind_from_doc(doc: Any, path: str) -> NodeKind:
    if not isinstance(doc, dict) or "type" not in doc:
        raise ParseError("expected a kind object with a 'type' tag", path)
    tag = doc["type"]
    if tag == "constant":
        _obj(doc, {"type", "value"}, {"type", "value"}, path)
        return Constant(_value(doc["value"], f"{path}.value"))
    if tag == "arithmetic":
        _obj(doc, {"type", "op"}, {"type", "op"}, path)
        return Arithmetic(_enum(ArithOp, _str(doc, "op", path), f"{path}.op"))
    if tag == "logical":
        _obj(doc, {"type", "op"}, {"type", "op"}, path)
        return Logical(_enum(LogicOp, _str(doc, "op", path), f"{path}.op"))
    if tag == "not":
        _obj(doc, {"type"}, {"type"}, path)
        return Not()
    if tag == "compare":
        _obj(doc, {"type", "op"}, {"type", "op"}, path)
        return Compare(_enum(CompareOp, _str(doc, "op", path), f"{path}.op"))
    if tag == "conditional":
        _obj(doc, {"type"}, {"type"}, path)
        return Conditional()
    if tag == "event_handler":
        _obj(doc, {"type", "event", "entity"}, {"type", "event"}, path)
        return EventHandler(
            _enum(EventKind, _str(doc, "event", path), f"{path}.event"),
            _opt_str(doc, "entity", path),
        )
    if tag == "function_call":
        _obj(doc, {"type", "function", "ins", "outs"}, {"type", "function", "ins", "outs"}, path)
        return FunctionCall(
            _str(doc, "function", path),
            _signature(doc["ins"], f"{path}.ins"),
            _signature(doc["outs"], f"{path}.outs"),
        )
    if tag == "method_call":
        _obj(
            doc,
            {"type", "class_id", "method", "args", "outs"},
            {"type", "class_id", "method", "args", "outs"},
            path,
        )
        return MethodCall(
            _str(doc, "class_id", path),
            _str(doc, "method", path),
            _signature(doc["args"], f"{path}.args"),
            _signature(doc["outs"], f"{path}.outs"),
        )
    if tag == "constructor_call":
        _obj(doc, {"type", "class_id", "params"}, {"type", "class_id", "params"}, path)
        return ConstructorCall(
            _str(doc, "class_id", path),
            _signature(doc["params"], f"{path}.params"),
        )
    if tag == "entity":
        _obj(doc, {"type", "entity", "entity_kind"}, {"type", "entity", "entity_kind"}, path)
        return EntityNode(_str(doc, "entity", path), _str(doc, "entity_kind", path))
    if tag == "class":
        _obj(doc, {"type", "class_id", "fields"}, {"type", "class_id", "fields"}, path)
        return ClassNode(
            _str(doc, "class_id", path),
            _signature(doc["fields"], f"{path}.fields"),
        )
    raise ParseError(f"unknown kind tag {tag!r}", path)


# ---- programs -------------------------------------------------------------


def node_to_doc(node: Node) -> dict:
    return {
        "id": node.id,
        "kind": kind_to_doc(node.kind),
        "position": [float(node.position[0]), float(node.position[1])],
        "locked": node.locked,
    }


def node_from_doc(doc: Any, path: str) -> Node:
    _obj(doc, {"id", "kind", "position", "locked"}, {"id", "kind"}, path)
    kind = kind_from_doc(doc["kind"], f"{path}.kind")
    position = (0.0, 0.0)
    if "position" in doc:
        raw = _list(doc, "position", path)
        if len(raw) != 2 or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw):
            raise ParseError("expected [x, y]", f"{path}.position")
        position = (float(raw[0]), float(raw[1]))
    locked = _bool(doc, "locked", path) if "locked" in doc else False
    try:
        return make_node(_str(doc, "id", path), kind, position, locked)
    except Exception as exc:
        raise ParseError(str(exc), path)


def program_to_doc(program: Program) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "nodes": [node_to_doc(n) for n in program.nodes],
        "tubes": [
            {
                "from_node": t.from_node,
                "from_port": t.from_port,
                "to_node": t.to_node,
                "to_port": t.to_port,
            }
            for t in program.tubes
        ],
    }


def program_from_doc(doc: Any, path: str = "$") -> Program:
    _obj(doc, {"format_version", "nodes", "tubes"}, {"format_version", "nodes", "tubes"}, path)
    if doc["format_version"] != FORMAT_VERSION:
        raise ParseError(
            f"unsupported format_version {doc['format_version']!r}", f"{path}.format_version"
        )
    nodes = tuple(
        node_from_doc(nd, f"{path}.nodes[{i}]") for i, nd in enumerate(_list(doc, "nodes", path))
    )
    tubes = []
    for i, td in enumerate(_list(doc, "tubes", path)):
        tpath = f"{path}.tubes[{i}]"
        _obj(
            td,
            {"from_node", "from_port", "to_node", "to_port"},
            {"from_node", "from_port", "to_node", "to_port"},
            tpath,
        )
        tubes.append(
            Tube(
                _str(td, "from_node", tpath),
                _str(td, "from_port", tpath),
                _str(td, "to_node", tpath),
                _str(td, "to_port", tpath),
            )
        )
    program = Program(nodes, tuple(tubes))
    try:
        validate_program(program)
    except Exception as exc:
        raise ParseError(str(exc), path)
    return program


# ---- worlds ----------------------------------------------------------------


def world_to_doc(world: World) -> dict:
    cells = []
    for (col, row) in sorted(world.grid.cells, key=lambda cr: (cr[1], cr[0])):
        cell = world.grid.cells[(col, row)]
        if cell == Cell():
            continue
        cd: dict = {"col": col, "row": row, "terrain": cell.terrain.value}
        if cell.marker is not None:
            cd["marker"] = {"number": cell.marker.number, "color": cell.marker.color.value}
        cells.append(cd)
    entities = [
        _entity_to_doc(world.entities[eid]) for eid in sorted(world.entities)
    ]
    return {
        "grid": {"width": world.grid.width, "height": world.grid.height, "cells": cells},
        "entities": entities,
        "tick": world.tick,
    }


def _entity_to_doc(ent: Entity) -> dict:
    if isinstance(ent, Door):
        return {"kind": "door", "id": ent.id, "col": ent.col, "row": ent.row, "open": ent.open}
    if isinstance(ent, Elevator):
        return {
            "kind": "elevator",
            "id": ent.id,
            "col": ent.col,
            "row": ent.row,
            "height": ent.height,
            "min_height": ent.min_height,
            "max_height": ent.max_height,
            "target": ent.target,
            "speed": ent.speed,
        }
    if isinstance(ent, Robot):
        return {
            "kind": "robot",
            "id": ent.id,
            "col": ent.col,
            "row": ent.row,
            "heading": ent.heading.value,
            "movement_type": ent.movement_type,
            "body_type": ent.body_type,
            "carrying": ent.carrying,
            "alive": ent.alive,
            "command": ent.command.value if ent.command is not None else None,
            "bound_instance": ent.bound_instance,
        }
    if isinstance(ent, Button):
        return {
            "kind": "button",
            "id": ent.id,
            "col": ent.col,
            "row": ent.row,
            "pressed": ent.pressed,
        }
    if isinstance(ent, Cube):
        return {
            "kind": "cube",
            "id": ent.id,
            "col": ent.col,
            "row": ent.row,
            "carried_by": ent.carried_by,
        }
    if isinstance(ent, PasswordConsole):
        return {
            "kind": "console",
            "id": ent.id,
            "col": ent.col,
            "row": ent.row,
            "expected": ent.expected,
            "entered": ent.entered,
            "unlocked": ent.unlocked,
        }
    if isinstance(ent, Avatar):
        return {
            "kind": "avatar",
            "id": ent.id,
            "col": ent.col,
            "row": ent.row,
            "riding": ent.riding,
        }
    raise ParseError(f"unhandled entity variant {type(ent).__name__}")


def _entity_from_doc(doc: Any, path: str) -> Entity:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("expected an entity object with a 'kind' tag", path)
    kind = doc["kind"]
    if kind == "door":
        _obj(doc, {"kind", "id", "col", "row", "open"}, {"kind", "id", "col", "row"}, path)
        return Door(
            _str(doc, "id", path),
            _int(doc, "col", path),
            _int(doc, "row", path),
            _bool(doc, "open", path) if "open" in doc else False,
        )
    if kind == "elevator":
        allowed = {"kind", "id", "col", "row", "height", "min_height", "max_height", "target", "speed"}
        _obj(doc, allowed, {"kind", "id", "col", "row"}, path)
        return Elevator(
            _str(doc, "id", path),
            _int(doc, "col", path),
            _int(doc, "row", path),
            _num(doc, "height", path) if "height" in doc else 0.0,
            _num(doc, "min_height", path) if "min_height" in doc else 0.0,
            _num(doc, "max_height", path) if "max_height" in doc else 10.0,
            _num(doc, "target", path) if "target" in doc else 0.0,
            _num(doc, "speed", path) if "speed" in doc else 1.0,
        )
    if kind == "robot":
        allowed = {
            "kind",
            "id",
            "col",
            "row",
            "heading",
            "movement_type",
            "body_type",
            "carrying",
            "alive",
            "command",
            "bound_instance",
        }
        _obj(doc, allowed, {"kind", "id", "col", "row"}, path)
        command = _opt_str(doc, "command", path)
        return Robot(
            _str(doc, "id", path),
            _int(doc, "col", path),
            _int(doc, "row", path),
            _enum(Heading, doc["heading"], f"{path}.heading") if "heading" in doc else Heading.E,
            _str(doc, "movement_type", path) if "movement_type" in doc else "wheels",
            _str(doc, "body_type", path) if "body_type" in doc else "standard",
            _opt_str(doc, "carrying", path),
            _bool(doc, "alive", path) if "alive" in doc else True,
            _enum(Command, command, f"{path}.command") if command is not None else None,
            _opt_str(doc, "bound_instance", path),
        )
    if kind == "button":
        _obj(doc, {"kind", "id", "col", "row", "pressed"}, {"kind", "id", "col", "row"}, path)
        return Button(
            _str(doc, "id", path),
            _int(doc, "col", path),
            _int(doc, "row", path),
            _bool(doc, "pressed", path) if "pressed" in doc else False,
        )
    if kind == "cube":
        _obj(doc, {"kind", "id", "col", "row", "carried_by"}, {"kind", "id", "col", "row"}, path)
        return Cube(
            _str(doc, "id", path),
            _int(doc, "col", path),
            _int(doc, "row", path),
            _opt_str(doc, "carried_by", path),
        )
    if kind == "console":
        allowed = {"kind", "id", "col", "row", "expected", "entered", "unlocked"}
        _obj(doc, allowed, {"kind", "id", "col", "row", "expected"}, path)
        return PasswordConsole(
            _str(doc, "id", path),
            _int(doc, "col", path),
            _int(doc, "row", path),
            _str(doc, "expected", path),
            _str(doc, "entered", path) if "entered" in doc else "",
            _bool(doc, "unlocked", path) if "unlocked" in doc else False,
        )
    if kind == "avatar":
        _obj(doc, {"kind", "id", "col", "row", "riding"}, {"kind", "id", "col", "row"}, path)
        return Avatar(
            _str(doc, "id", path),
            _int(doc, "col", path),
            _int(doc, "row", path),
            _opt_str(doc, "riding", path),
        )
    raise ParseError(f"unknown entity kind {kind!r}", path)


def world_from_doc(doc: Any, path: str = "$") -> World:
    _obj(doc, {"grid", "entities", "tick"}, {"grid", "entities"}, path)
    gd = _obj(doc["grid"], {"width", "height", "cells"}, {"width", "height"}, f"{path}.grid")
    cells: dict[tuple[int, int], Cell] = {}
    for i, cd in enumerate(gd.get("cells", [])):
        cpath = f"{path}.grid.cells[{i}]"
        _obj(cd, {"col", "row", "terrain", "marker"}, {"col", "row"}, cpath)
        terrain = (
            _enum(Terrain, cd["terrain"], f"{cpath}.terrain") if "terrain" in cd else Terrain.FLOOR
        )
        marker = None
        if cd.get("marker") is not None:
            md = _obj(cd["marker"], {"number", "color"}, {"number", "color"}, f"{cpath}.marker")
            marker = ColumnMarker(
                _int(md, "number", f"{cpath}.marker"),
                _enum(Color, md["color"], f"{cpath}.marker.color"),
            )
        cells[(_int(cd, "col", cpath), _int(cd, "row", cpath))] = Cell(terrain, marker)
    grid = Grid(_int(gd, "width", f"{path}.grid"), _int(gd, "height", f"{path}.grid"), cells)
    entities: dict[str, Entity] = {}
    for i, ed in enumerate(_list(doc, "entities", path)):
        ent = _entity_from_doc(ed, f"{path}.entities[{i}]")
        if ent.id in entities:
            raise ParseError(f"duplicate entity id {ent.id!r}", f"{path}.entities[{i}]")
        entities[ent.id] = ent
    world = World(grid, entities, _int(doc, "tick", path) if "tick" in doc else 0)
    try:
        validate_world(world)
    except Exception as exc:
        raise ParseError(str(exc), path)
    return world


# ---- classes and instances --------------------------------------------------


def classes_to_doc(table: ClassTable) -> list:
    docs = []
    for cid in sorted(table.classes):
        cd = table.classes[cid]
        docs.append(
            {
                "id": cd.id,
                "name": cd.name,
                "parent": cd.parent,
                "fields": [
                    {"name": f.name, "dtype": f.dtype.value, "default": value_to_doc(f.default)}
                    for f in cd.fields
                ],
                "constructor_params": _signature_doc(cd.constructor_params),
                "methods": [
                    {
                        "name": m.name,
                        "args": _signature_doc(m.args),
                        "outs": _signature_doc(m.outs),
                        "impl": m.impl,
                    }
                    for m in cd.methods
                ],
            }
        )
    return docs


def classes_from_doc(doc: Any, path: str = "$") -> ClassTable:
    if not isinstance(doc, list):
        raise ParseError("expected an array of class definitions", path)
    classes: dict[str, ClassDef] = {}
    for i, cd in enumerate(doc):
        cpath = f"{path}[{i}]"
        allowed = {"id", "name", "parent", "fields", "constructor_params", "methods"}
        _obj(cd, allowed, {"id", "name"}, cpath)
        fields = []
        for j, fd in enumerate(cd.get("fields", [])):
            fpath = f"{cpath}.fields[{j}]"
            _obj(fd, {"name", "dtype", "default"}, {"name", "dtype", "default"}, fpath)
            fields.append(
                FieldDef(
                    _str(fd, "name", fpath),
                    _enum(DataType, fd["dtype"], f"{fpath}.dtype"),
                    _value(fd["default"], f"{fpath}.default"),
                )
            )
        methods = []
        for j, md in enumerate(cd.get("methods", [])):
            mpath = f"{cpath}.methods[{j}]"
            _obj(md, {"name", "args", "outs", "impl"}, {"name", "args", "outs", "impl"}, mpath)
            methods.append(
                MethodDef(
                    _str(md, "name", mpath),
                    _signature(md["args"], f"{mpath}.args"),
                    _signature(md["outs"], f"{mpath}.outs"),
                    _str(md, "impl", mpath),
                )
            )
        classdef = ClassDef(
            _str(cd, "id", cpath),
            _str(cd, "name", cpath),
            _opt_str(cd, "parent", cpath),
            tuple(fields),
            _signature(cd.get("constructor_params", []), f"{cpath}.constructor_params"),
            tuple(methods),
        )
        if classdef.id in classes:
            raise ParseError(f"duplicate class id {classdef.id!r}", cpath)
        classes[classdef.id] = classdef
    table = ClassTable(classes)
    for cid in classes:
        # Walk each chain so dangling parents and loops are rejected here.
        seen: set[str] = set()
        cur: Optional[str] = cid
        while cur is not None:
            if cur in seen:
                raise ParseError(f"inheritance cycle through {cur!r}", path)
            seen.add(cur)
            if cur not in classes:
                raise ParseError(f"unknown parent class {cur!r}", path)
            cur = classes[cur].parent
    return table


def instances_to_doc(instances: Mapping[str, Instance]) -> list:
    docs = []
    for iid in sorted(instances):
        inst = instances[iid]
        docs.append(
            {
                "id": inst.id,
                "class_id": inst.class_id,
                "local_fields": {
                    name: value_to_doc(inst.local_fields[name])
                    for name in sorted(inst.local_fields)
                },
                "bound_entity": inst.bound_entity,
            }
        )
    return docs


def instances_from_doc(doc: Any, path: str = "$") -> dict[str, Instance]:
    if not isinstance(doc, list):
        raise ParseError("expected an array of instances", path)
    out: dict[str, Instance] = {}
    for i, idoc in enumerate(doc):
        ipath = f"{path}[{i}]"
        _obj(idoc, {"id", "class_id", "local_fields", "bound_entity"}, {"id", "class_id"}, ipath)
        fields_doc = idoc.get("local_fields", {})
        if not isinstance(fields_doc, dict):
            raise ParseError("expected an object", f"{ipath}.local_fields")
        local = {
            name: _value(v, f"{ipath}.local_fields.{name}") for name, v in fields_doc.items()
        }
        inst = Instance(
            _str(idoc, "id", ipath),
            _str(idoc, "class_id", ipath),
            local,
            _opt_str(idoc, "bound_entity", ipath),
        )
        if inst.id in out:
            raise ParseError(f"duplicate instance id {inst.id!r}", ipath)
        out[inst.id] = inst
    return out
