"""Tick-stepped simulation of the puzzle world.

Worlds are immutable; `step` applies validated writes, runs the movement and
sensor rules, and returns the events the next evaluation pass will consume.
Invalid writes are dropped and reported without aborting the step.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

from .graph import ENTITY_READABLE, ENTITY_WRITABLE, EventKind
from .values import Color, DataType, Value, boolean, number, text


class WorldError(Exception):
    code = "WorldError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownEntity(WorldError):
    code = "UnknownEntity"


class InvalidWrite(WorldError):
    code = "InvalidWrite"


class Terrain(str, Enum):
    FLOOR = "floor"
    LAVA = "lava"          # kills any non-hover robot that enters
    NARROW = "narrow"      # passable only with a slim body
    RUBBLE = "rubble"      # passable only with legs movement
    BARRICADE = "barricade"  # passable only with a heavy body


class Heading(str, Enum):
    N = "N"
    E = "E"
    S = "S"
    W = "W"


_HEADING_VEC = {
    Heading.N: (0, -1),
    Heading.E: (1, 0),
    Heading.S: (0, 1),
    Heading.W: (-1, 0),
}
_TURN_RIGHT = {Heading.N: Heading.E, Heading.E: Heading.S, Heading.S: Heading.W, Heading.W: Heading.N}
_TURN_LEFT = {v: k for k, v in _TURN_RIGHT.items()}


class Command(str, Enum):
    FORWARD = "forward"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    DROP_CUBE = "drop_cube"
    IDLE = "idle"


@dataclass(frozen=True)
class ColumnMarker:
    number: int
    color: Color


@dataclass(frozen=True)
class Cell:
    terrain: Terrain = Terrain.FLOOR
    marker: Optional[ColumnMarker] = None


@dataclass(frozen=True)
class Grid:
    width: int
    height: int
    cells: Mapping[tuple[int, int], Cell] = field(default_factory=dict)

    def in_bounds(self, col: int, row: int) -> bool:
        return 0 <= col < self.width and 0 <= row < self.height

    def cell(self, col: int, row: int) -> Cell:
        return self.cells.get((col, row), Cell())


@dataclass(frozen=True)
class Door:
    id: str
    col: int
    row: int
    open: bool = False


@dataclass(frozen=True)
class Elevator:
    id: str
    col: int
    row: int
    height: float = 0.0
    min_height: float = 0.0
    max_height: float = 10.0
    target: float = 0.0
    speed: float = 1.0  # metres of travel per tick


@dataclass(frozen=True)
class Robot:
    id: str
    col: int
    row: int
    heading: Heading = Heading.E
    movement_type: str = "wheels"  # wheels | hover | legs
    body_type: str = "standard"    # standard | slim | heavy
    carrying: Optional[str] = None  # cube id
    alive: bool = True
    command: Optional[Command] = None  # pending, consumed by the next step
    bound_instance: Optional[str] = None


@dataclass(frozen=True)
class Button:
    id: str
    col: int
    row: int
    pressed: bool = False


@dataclass(frozen=True)
class Cube:
    id: str
    col: int
    row: int
    carried_by: Optional[str] = None


@dataclass(frozen=True)
class PasswordConsole:
    id: str
    col: int
    row: int
    expected: str
    entered: str = ""
    unlocked: bool = False


@dataclass(frozen=True)
class Avatar:
    id: str
    col: int
    row: int
    riding: Optional[str] = None  # elevator id


Entity = Union[Door, Elevator, Robot, Button, Cube, PasswordConsole, Avatar]

ENTITY_KIND = {
    Door: "door",
    Elevator: "elevator",
    Robot: "robot",
    Button: "button",
    Cube: "cube",
    PasswordConsole: "console",
    Avatar: "avatar",
}


@dataclass(frozen=True)
class WorldEvent:
    kind: EventKind
    entity: str
    column: Optional[int] = None
    color: Optional[Color] = None


@dataclass(frozen=True)
class World:
    grid: Grid
    entities: Mapping[str, Entity] = field(default_factory=dict)
    tick: int = 0

    def entity(self, entity_id: str) -> Entity:
        ent = self.entities.get(entity_id)
        if ent is None:
            raise UnknownEntity(f"no entity {entity_id!r}")
        return ent

    def by_kind(self, kind: str) -> list[Entity]:
        return [e for e in self._ordered() if ENTITY_KIND[type(e)] == kind]

    def _ordered(self) -> list[Entity]:
        return [self.entities[k] for k in sorted(self.entities)]


@dataclass(frozen=True)
class EntityWrite:
    entity: str
    prop: str
    value: Value


@dataclass(frozen=True)
class StepResult:
    world: World
    events: tuple[WorldEvent, ...]
    rejected: tuple[tuple[EntityWrite, str], ...] = ()


@dataclass(frozen=True)
class WorldView:
    """Read-only property snapshot handed to the evaluator."""

    props: Mapping[str, Mapping[str, Value]]
    kinds: Mapping[str, str]

    def read(self, entity_id: str, prop: str) -> Optional[Value]:
        table = self.props.get(entity_id)
        if table is None:
            return None
        return table.get(prop)


def _readable_props(ent: Entity) -> dict[str, Value]:
    if isinstance(ent, Door):
        return {"open": boolean(ent.open)}
    if isinstance(ent, Elevator):
        return {"height": number(ent.height)}
    if isinstance(ent, Robot):
        return {
            "col": number(ent.col),
            "row": number(ent.row),
            "heading": text(ent.heading.value),
            "movement_type": text(ent.movement_type),
            "body_type": text(ent.body_type),
            "carrying": boolean(ent.carrying is not None),
            "alive": boolean(ent.alive),
        }
    if isinstance(ent, Button):
        return {"pressed": boolean(ent.pressed)}
    if isinstance(ent, Cube):
        return {
            "col": number(ent.col),
            "row": number(ent.row),
            "carried": boolean(ent.carried_by is not None),
        }
    if isinstance(ent, PasswordConsole):
        return {"unlocked": boolean(ent.unlocked)}
    if isinstance(ent, Avatar):
        return {"col": number(ent.col), "row": number(ent.row)}
    raise WorldError(f"unknown entity variant {type(ent).__name__}")


def snapshot(world: World) -> WorldView:
    props = {}
    kinds = {}
    for eid in sorted(world.entities):
        ent = world.entities[eid]
        props[eid] = _readable_props(ent)
        kinds[eid] = ENTITY_KIND[type(ent)]
    return WorldView(props, kinds)


# Properties settable by step but not exposed as ports; the session resolves
# robot blueprint writes into these.
_INTERNAL_WRITABLE = {
    "robot": (("movement_type", DataType.TEXT), ("body_type", DataType.TEXT)),
}


def _writable_type(kind: str, prop: str) -> Optional[DataType]:
    for name, dtype in ENTITY_WRITABLE.get(kind, ()):
        if name == prop:
            return dtype
    for name, dtype in _INTERNAL_WRITABLE.get(kind, ()):
        if name == prop:
            return dtype
    return None


def _apply_write(ent: Entity, write: EntityWrite) -> Entity:
    if isinstance(ent, Door) and write.prop == "open":
        return replace(ent, open=write.value.value)
    if isinstance(ent, Elevator) and write.prop == "target":
        tgt = min(max(write.value.value, ent.min_height), ent.max_height)
        return replace(ent, target=tgt)
    if isinstance(ent, Robot) and write.prop == "command":
        cmd = Command(write.value.value)
        return replace(ent, command=cmd)
    if isinstance(ent, Robot) and write.prop == "movement_type":
        return replace(ent, movement_type=write.value.value)
    if isinstance(ent, Robot) and write.prop == "body_type":
        return replace(ent, body_type=write.value.value)
    if isinstance(ent, PasswordConsole) and write.prop == "entered":
        entered = write.value.value
        return replace(ent, entered=entered, unlocked=entered == ent.expected)
    raise InvalidWrite(f"property {write.prop!r} not writable here")


def _enterable(world: World, robot: Robot, col: int, row: int) -> bool:
    if not world.grid.in_bounds(col, row):
        return False
    cell = world.grid.cell(col, row)
    if cell.terrain is Terrain.NARROW and robot.body_type != "slim":
        return False
    if cell.terrain is Terrain.RUBBLE and robot.movement_type != "legs":
        return False
    if cell.terrain is Terrain.BARRICADE and robot.body_type != "heavy":
        return False
    for other in world._ordered():
        if isinstance(other, Door) and (other.col, other.row) == (col, row) and not other.open:
            return False
        if isinstance(other, Robot) and other.id != robot.id and (other.col, other.row) == (col, row):
            return False
    return True


def _marker_event(robot: Robot, cell: Cell) -> Optional[WorldEvent]:
    if cell.marker is None or not robot.alive:
        return None
    return WorldEvent(
        EventKind.ON_ENTER_COLUMN,
        robot.id,
        column=cell.marker.number,
        color=cell.marker.color,
    )


def step(world: World, actions: Sequence[EntityWrite]) -> StepResult:
    entities = dict(world.entities)
    rejected: list[tuple[EntityWrite, str]] = []
    events: list[WorldEvent] = []

    for write in actions:
        ent = entities.get(write.entity)
        if ent is None:
            rejected.append((write, f"no entity {write.entity!r}"))
            continue
        kind = ENTITY_KIND[type(ent)]
        declared = _writable_type(kind, write.prop)
        if declared is None:
            rejected.append((write, f"{kind} has no writable property {write.prop!r}"))
            continue
        if write.value.type is not declared:
            rejected.append(
                (write, f"{write.prop!r} expects {declared.value}, got {write.value.type.value}")
            )
            continue
        if write.prop == "blueprint":
            rejected.append((write, "blueprint writes must be resolved against the class table"))
            continue
        if write.prop == "command":
            try:
                Command(write.value.value)
            except ValueError:
                rejected.append((write, f"unknown robot command {write.value.value!r}"))
                continue
        entities[write.entity] = _apply_write(ent, write)

    # Movement and device physics, in sorted entity order for determinism.
    for eid in sorted(entities):
        ent = entities[eid]
        if isinstance(ent, Elevator):
            delta = ent.target - ent.height
            move = max(-ent.speed, min(ent.speed, delta))
            height = min(max(ent.height + move, ent.min_height), ent.max_height)
            entities[eid] = replace(ent, height=height)
        elif isinstance(ent, Robot):
            cmd = ent.command
            robot = replace(ent, command=None)
            if not robot.alive or cmd in (None, Command.IDLE):
                entities[eid] = robot
                continue
            if cmd in (Command.TURN_LEFT, Command.TURN_RIGHT):
                table = _TURN_LEFT if cmd is Command.TURN_LEFT else _TURN_RIGHT
                robot = replace(robot, heading=table[robot.heading])
                # Turning on a marker re-announces it so heading logic driven
                # by marker events can converge before the next move.
                evt = _marker_event(robot, world.grid.cell(robot.col, robot.row))
                if evt is not None:
                    events.append(evt)
            elif cmd is Command.DROP_CUBE:
                if robot.carrying is not None:
                    cube = entities[robot.carrying]
                    entities[robot.carrying] = replace(
                        cube, col=robot.col, row=robot.row, carried_by=None
                    )
                    robot = replace(robot, carrying=None)
            elif cmd is Command.FORWARD:
                dc, dr = _HEADING_VEC[robot.heading]
                col, row = robot.col + dc, robot.row + dr
                snapshot_world = replace(world, entities=entities)
                if _enterable(snapshot_world, robot, col, row):
                    robot = replace(robot, col=col, row=row)
                    cell = world.grid.cell(col, row)
                    if cell.terrain is Terrain.LAVA and robot.movement_type != "hover":
                        robot = replace(robot, alive=False)
                    if robot.carrying is not None:
                        cube = entities[robot.carrying]
                        entities[robot.carrying] = replace(cube, col=col, row=row)
                    evt = _marker_event(robot, cell)
                    if evt is not None:
                        events.append(evt)
            entities[eid] = robot

    # Buttons behave as pressure plates: pressed while anything rests on them.
    for eid in sorted(entities):
        ent = entities[eid]
        if not isinstance(ent, Button):
            continue
        occupied = False
        for other in entities.values():
            if other is ent:
                continue
            if isinstance(other, (Robot, Avatar)) and (other.col, other.row) == (ent.col, ent.row):
                occupied = True
            if isinstance(other, Cube) and other.carried_by is None and (
                other.col,
                other.row,
            ) == (ent.col, ent.row):
                occupied = True
        if occupied and not ent.pressed:
            events.append(WorldEvent(EventKind.ON_PRESSED, eid))
        entities[eid] = replace(ent, pressed=occupied)

    new_world = World(world.grid, entities, world.tick + 1)
    return StepResult(new_world, tuple(events), tuple(rejected))


def submit_password(world: World, console_id: str, entered: str) -> World:
    ent = world.entity(console_id)
    if not isinstance(ent, PasswordConsole):
        raise UnknownEntity(f"{console_id!r} is not a password console")
    updated = replace(ent, entered=entered, unlocked=entered == ent.expected)
    return replace(world, entities={**world.entities, console_id: updated})


def configure_robot(
    world: World,
    robot_id: str,
    movement_type: str,
    body_type: str,
    instance_id: Optional[str] = None,
) -> World:
    """Apply a resolved blueprint: retype the robot and remember its instance."""
    ent = world.entity(robot_id)
    if not isinstance(ent, Robot):
        raise UnknownEntity(f"{robot_id!r} is not a robot")
    updated = replace(
        ent,
        movement_type=movement_type,
        body_type=body_type,
        bound_instance=instance_id if instance_id is not None else ent.bound_instance,
    )
    return replace(world, entities={**world.entities, robot_id: updated})


def validate_world(world: World) -> None:
    for eid, ent in world.entities.items():
        if hasattr(ent, "col"):
            if not world.grid.in_bounds(ent.col, ent.row):
                raise WorldError(f"entity {eid!r} out of grid bounds")
        if isinstance(ent, Elevator):
            if not (ent.min_height <= ent.height <= ent.max_height):
                raise WorldError(f"elevator {eid!r} height outside [min, max]")
        if isinstance(ent, Robot) and ent.carrying is not None:
            cube = world.entities.get(ent.carrying)
            if not isinstance(cube, Cube) or cube.carried_by != eid:
                raise WorldError(f"robot {eid!r} carrying link is inconsistent")
        if isinstance(ent, Cube) and ent.carried_by is not None:
            robot = world.entities.get(ent.carried_by)
            if not isinstance(robot, Robot) or robot.carrying != eid:
                raise WorldError(f"cube {eid!r} carried link is inconsistent")
