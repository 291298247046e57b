"""Program representation: nodes, ports, tubes, and structural operations.

Programs are immutable values; every edit is a value-to-value transform that
either returns a new program or raises a typed GraphError. Feedback loops are
detected over tube edges only — loops closed through the world are legal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Union

from .values import ANY, DataType, PortType, Value

# (port name, data type) pairs declaring a call-style node's signature.
Signature = tuple[tuple[str, DataType], ...]


class GraphError(Exception):
    """Structural edit rejected; `code` names the specific failure."""

    code = "GraphError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DuplicateNodeId(GraphError):
    code = "DuplicateNodeId"


class MalformedPorts(GraphError):
    code = "MalformedPorts"


class UnknownEndpoint(GraphError):
    code = "UnknownEndpoint"


class DirectionMismatch(GraphError):
    code = "DirectionMismatch"


class InputOccupied(GraphError):
    code = "InputOccupied"


class NoSuchTube(GraphError):
    code = "NoSuchTube"


class SelfConnection(GraphError):
    code = "SelfConnection"


class NotAConstant(GraphError):
    code = "NotAConstant"


class Direction(str, Enum):
    IN = "in"
    OUT = "out"


@dataclass(frozen=True)
class PortSpec:
    name: str
    direction: Direction
    dtype: PortType
    required: bool = True


class ArithOp(str, Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"


class LogicOp(str, Enum):
    AND = "and"
    OR = "or"
    XOR = "xor"


class CompareOp(str, Enum):
    EQ = "eq"
    NEQ = "neq"
    LT = "lt"
    LEQ = "leq"
    GT = "gt"
    GEQ = "geq"


class EventKind(str, Enum):
    ON_TICK = "tick"
    ON_PRESSED = "pressed"
    ON_ENTER_COLUMN = "enter_column"


@dataclass(frozen=True)
class Constant:
    value: Value


@dataclass(frozen=True)
class Arithmetic:
    op: ArithOp


@dataclass(frozen=True)
class Logical:
    op: LogicOp


@dataclass(frozen=True)
class Not:
    pass


@dataclass(frozen=True)
class Compare:
    op: CompareOp


@dataclass(frozen=True)
class Conditional:
    pass


@dataclass(frozen=True)
class EventHandler:
    event: EventKind
    entity: Optional[str] = None  # watched entity; None for tick


@dataclass(frozen=True)
class FunctionCall:
    function: str
    ins: Signature
    outs: Signature


@dataclass(frozen=True)
class MethodCall:
    class_id: str
    method: str
    args: Signature
    outs: Signature


@dataclass(frozen=True)
class ConstructorCall:
    class_id: str
    params: Signature


@dataclass(frozen=True)
class EntityNode:
    entity: str
    entity_kind: str  # world entity variant; fixes the property port tables


@dataclass(frozen=True)
class ClassNode:
    class_id: str
    fields: Signature  # writable class-default fields exposed as In ports


NodeKind = Union[
    Constant,
    Arithmetic,
    Logical,
    Not,
    Compare,
    Conditional,
    EventHandler,
    FunctionCall,
    MethodCall,
    ConstructorCall,
    EntityNode,
    ClassNode,
]


# Readable (out) and writable (in) property tables per world entity variant.
# world.snapshot() produces values matching the readable table.
ENTITY_READABLE: dict[str, tuple[tuple[str, DataType], ...]] = {
    "door": (("open", DataType.BOOLEAN),),
    "elevator": (("height", DataType.NUMBER),),
    "robot": (
        ("col", DataType.NUMBER),
        ("row", DataType.NUMBER),
        ("heading", DataType.TEXT),
        ("movement_type", DataType.TEXT),
        ("body_type", DataType.TEXT),
        ("carrying", DataType.BOOLEAN),
        ("alive", DataType.BOOLEAN),
    ),
    "button": (("pressed", DataType.BOOLEAN),),
    "cube": (
        ("col", DataType.NUMBER),
        ("row", DataType.NUMBER),
        ("carried", DataType.BOOLEAN),
    ),
    "console": (("unlocked", DataType.BOOLEAN),),
    "avatar": (("col", DataType.NUMBER), ("row", DataType.NUMBER)),
}

ENTITY_WRITABLE: dict[str, tuple[tuple[str, DataType], ...]] = {
    "door": (("open", DataType.BOOLEAN),),
    "elevator": (("target", DataType.NUMBER),),
    "robot": (("command", DataType.TEXT), ("blueprint", DataType.INSTANCE_REF)),
    "button": (),
    "cube": (),
    "console": (("entered", DataType.TEXT),),
    "avatar": (),
}


def expected_ports(kind: NodeKind) -> tuple[PortSpec, ...]:
    """The fixed port signature for a node kind. Total: call-style kinds carry
    their declared signatures in the kind payload."""
    if isinstance(kind, Constant):
        return (PortSpec("out", Direction.OUT, kind.value.type),)
    if isinstance(kind, Arithmetic):
        return (
            PortSpec("a", Direction.IN, DataType.NUMBER),
            PortSpec("b", Direction.IN, DataType.NUMBER),
            PortSpec("out", Direction.OUT, DataType.NUMBER),
        )
    if isinstance(kind, Logical):
        return (
            PortSpec("a", Direction.IN, DataType.BOOLEAN),
            PortSpec("b", Direction.IN, DataType.BOOLEAN),
            PortSpec("out", Direction.OUT, DataType.BOOLEAN),
        )
    if isinstance(kind, Not):
        return (
            PortSpec("in", Direction.IN, DataType.BOOLEAN),
            PortSpec("out", Direction.OUT, DataType.BOOLEAN),
        )
    if isinstance(kind, Compare):
        # eq/neq also accept matching Color or Text operands; checked at runtime.
        generic = kind.op in (CompareOp.EQ, CompareOp.NEQ)
        operand: PortType = ANY if generic else DataType.NUMBER
        return (
            PortSpec("a", Direction.IN, operand),
            PortSpec("b", Direction.IN, operand),
            PortSpec("out", Direction.OUT, DataType.BOOLEAN),
        )
    if isinstance(kind, Conditional):
        return (
            PortSpec("cond", Direction.IN, DataType.BOOLEAN),
            PortSpec("then", Direction.IN, ANY),
            PortSpec("else", Direction.IN, ANY),
            PortSpec("out", Direction.OUT, ANY),
        )
    if isinstance(kind, EventHandler):
        ports = [PortSpec("fired", Direction.OUT, DataType.PULSE)]
        if kind.event is EventKind.ON_ENTER_COLUMN:
            ports.append(PortSpec("column", Direction.OUT, DataType.NUMBER))
            ports.append(PortSpec("color", Direction.OUT, DataType.COLOR))
        return tuple(ports)
    if isinstance(kind, FunctionCall):
        ins = tuple(PortSpec(n, Direction.IN, t) for n, t in kind.ins)
        outs = tuple(PortSpec(n, Direction.OUT, t) for n, t in kind.outs)
        return ins + outs
    if isinstance(kind, MethodCall):
        ins = (PortSpec("target", Direction.IN, ANY),) + tuple(
            PortSpec(n, Direction.IN, t) for n, t in kind.args
        )
        outs = tuple(PortSpec(n, Direction.OUT, t) for n, t in kind.outs)
        return ins + outs
    if isinstance(kind, ConstructorCall):
        ins = tuple(PortSpec(n, Direction.IN, t) for n, t in kind.params)
        return ins + (PortSpec("out", Direction.OUT, DataType.INSTANCE_REF),)
    if isinstance(kind, EntityNode):
        if kind.entity_kind not in ENTITY_READABLE:
            raise MalformedPorts(f"unknown entity kind {kind.entity_kind!r}")
        outs = tuple(
            PortSpec(n, Direction.OUT, t) for n, t in ENTITY_READABLE[kind.entity_kind]
        )
        ins = tuple(
            PortSpec(n, Direction.IN, t, required=False)
            for n, t in ENTITY_WRITABLE[kind.entity_kind]
        )
        return outs + ins
    if isinstance(kind, ClassNode):
        ins = tuple(
            PortSpec(n, Direction.IN, t, required=False) for n, t in kind.fields
        )
        return (PortSpec("class", Direction.OUT, DataType.CLASS_REF),) + ins
    raise MalformedPorts(f"unknown node kind {kind!r}")


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    ports: tuple[PortSpec, ...]
    position: tuple[float, float] = (0.0, 0.0)  # editor canvas units
    locked: bool = False

    def port(self, name: str, direction: Direction) -> Optional[PortSpec]:
        for p in self.ports:
            if p.name == name and p.direction == direction:
                return p
        return None

    def in_ports(self) -> tuple[PortSpec, ...]:
        return tuple(p for p in self.ports if p.direction is Direction.IN)

    def out_ports(self) -> tuple[PortSpec, ...]:
        return tuple(p for p in self.ports if p.direction is Direction.OUT)


def make_node(
    node_id: str,
    kind: NodeKind,
    position: tuple[float, float] = (0.0, 0.0),
    locked: bool = False,
) -> Node:
    """Build a node with the ports its kind prescribes."""
    return Node(node_id, kind, expected_ports(kind), position, locked)


class TubeState(str, Enum):
    NORMAL = "normal"
    ERROR = "error"


@dataclass(frozen=True)
class Tube:
    from_node: str
    from_port: str
    to_node: str
    to_port: str
    state: TubeState = TubeState.NORMAL

    def key(self) -> tuple[str, str, str, str]:
        return (self.to_node, self.to_port, self.from_node, self.from_port)


@dataclass(frozen=True)
class Program:
    """An immutable node graph. Nodes are kept sorted by id and tubes by their
    destination port so structurally equal programs compare equal."""

    nodes: tuple[Node, ...] = ()
    tubes: tuple[Tube, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id)))
        object.__setattr__(self, "tubes", tuple(sorted(self.tubes, key=Tube.key)))

    def node(self, node_id: str) -> Optional[Node]:
        for n in self.nodes:
            if n.id == node_id:
                return n
        return None

    def tube_into(self, node_id: str, port: str) -> Optional[Tube]:
        for t in self.tubes:
            if t.to_node == node_id and t.to_port == port:
                return t
        return None

    def tubes_from(self, node_id: str) -> tuple[Tube, ...]:
        return tuple(t for t in self.tubes if t.from_node == node_id)


def add_node(program: Program, node: Node) -> Program:
    if program.node(node.id) is not None:
        raise DuplicateNodeId(f"node id {node.id!r} already present")
    try:
        expected = expected_ports(node.kind)
    except MalformedPorts:
        raise
    if tuple(node.ports) != expected:
        raise MalformedPorts(
            f"node {node.id!r}: ports do not match the {type(node.kind).__name__} signature"
        )
    return replace(program, nodes=program.nodes + (node,))


def connect(
    program: Program, from_end: tuple[str, str], to_end: tuple[str, str]
) -> Program:
    from_id, from_port = from_end
    to_id, to_port = to_end
    src = program.node(from_id)
    dst = program.node(to_id)
    if src is None or dst is None:
        missing = from_id if src is None else to_id
        raise UnknownEndpoint(f"no node {missing!r}")
    out_spec = src.port(from_port, Direction.OUT)
    in_spec = dst.port(to_port, Direction.IN)
    if out_spec is None or in_spec is None:
        # Distinguish a wrong-direction hookup from a missing port.
        if src.port(from_port, Direction.IN) is not None or dst.port(
            to_port, Direction.OUT
        ) is not None:
            raise DirectionMismatch(
                f"{from_id}.{from_port} -> {to_id}.{to_port}: tubes run out-port to in-port"
            )
        missing = f"{from_id}.{from_port}" if out_spec is None else f"{to_id}.{to_port}"
        raise UnknownEndpoint(f"no port {missing}")
    if from_id == to_id:
        raise SelfConnection(f"{from_id} cannot feed itself")
    if program.tube_into(to_id, to_port) is not None:
        raise InputOccupied(
            f"{to_id}.{to_port} already has an incoming tube; disconnect it first"
        )
    tube = Tube(from_id, from_port, to_id, to_port)
    return replace(program, tubes=program.tubes + (tube,))


def disconnect(program: Program, to_end: tuple[str, str]) -> Program:
    to_id, to_port = to_end
    tube = program.tube_into(to_id, to_port)
    if tube is None:
        raise NoSuchTube(f"no tube terminates at {to_id}.{to_port}")
    return replace(program, tubes=tuple(t for t in program.tubes if t != tube))


def set_constant(program: Program, node_id: str, value: Value) -> Program:
    node = program.node(node_id)
    if node is None:
        raise UnknownEndpoint(f"no node {node_id!r}")
    if not isinstance(node.kind, Constant):
        raise NotAConstant(f"node {node_id!r} is not a constant")
    updated = make_node(node_id, Constant(value), node.position, node.locked)
    others = tuple(n for n in program.nodes if n.id != node_id)
    return replace(program, nodes=others + (updated,))


def dependency_tubes(program: Program) -> tuple[Tube, ...]:
    """Tubes carrying a same-pass value dependency.

    Entity and class nodes only accept writes on their in ports, and their
    outputs never depend on those writes (reads come from the world snapshot;
    the write lands next tick). A loop through such a port is closed by the
    world, not the graph, so it is not a feedback loop.
    """
    out = []
    for t in program.tubes:
        dst = program.node(t.to_node)
        if dst is not None and isinstance(dst.kind, (EntityNode, ClassNode)):
            continue
        out.append(t)
    return tuple(out)


def _adjacency(program: Program) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {n.id: set() for n in program.nodes}
    for t in dependency_tubes(program):
        if t.from_node in adj and t.to_node in adj:
            adj[t.from_node].add(t.to_node)
    return adj


def detect_cycles(program: Program) -> list[list[str]]:
    """Every elementary cycle in the tube graph, each rotated so its
    lexicographically smallest node comes first, sorted. Empty iff a DAG."""
    adj = _adjacency(program)
    order = sorted(adj)
    pos = {v: i for i, v in enumerate(order)}
    cycles: list[list[str]] = []

    def unblock(v: str, blocked: dict[str, bool], bmap: dict[str, set[str]]) -> None:
        stack = [v]
        while stack:
            u = stack.pop()
            if blocked[u]:
                blocked[u] = False
                stack.extend(bmap[u])
                bmap[u].clear()

    # Johnson-style enumeration: each start vertex s only explores the
    # subgraph of vertices ordered at or after s, so s is the smallest
    # member of every cycle reported for it.
    for s in order:
        sub = {
            v: sorted(w for w in adj[v] if pos[w] >= pos[s])
            for v in order
            if pos[v] >= pos[s]
        }
        if not sub[s]:
            continue
        blocked = {v: False for v in sub}
        bmap: dict[str, set[str]] = {v: set() for v in sub}
        path: list[str] = []

        def circuit(v: str) -> bool:
            found = False
            path.append(v)
            blocked[v] = True
            for w in sub[v]:
                if w == s:
                    cycles.append(list(path))
                    found = True
                elif not blocked[w]:
                    if circuit(w):
                        found = True
            if found:
                unblock(v, blocked, bmap)
            else:
                for w in sub[v]:
                    bmap[w].add(v)
            path.pop()
            return found

        circuit(s)

    return sorted(cycles)


def validate_program(program: Program) -> None:
    """Full structural validation for programs built from documents."""
    seen: set[str] = set()
    for n in program.nodes:
        if n.id in seen:
            raise DuplicateNodeId(f"node id {n.id!r} duplicated")
        seen.add(n.id)
        if tuple(n.ports) != expected_ports(n.kind):
            raise MalformedPorts(f"node {n.id!r}: ports inconsistent with kind")
    occupied: set[tuple[str, str]] = set()
    for t in program.tubes:
        src = program.node(t.from_node)
        dst = program.node(t.to_node)
        if src is None or dst is None:
            raise UnknownEndpoint(f"tube references missing node")
        if src.port(t.from_port, Direction.OUT) is None:
            raise UnknownEndpoint(f"no out port {t.from_node}.{t.from_port}")
        if dst.port(t.to_port, Direction.IN) is None:
            raise UnknownEndpoint(f"no in port {t.to_node}.{t.to_port}")
        if t.from_node == t.to_node:
            raise SelfConnection(f"{t.from_node} feeds itself")
        key = (t.to_node, t.to_port)
        if key in occupied:
            raise InputOccupied(f"{t.to_node}.{t.to_port} has two incoming tubes")
        occupied.add(key)


def iter_kinds(program: Program) -> Iterable[str]:
    for n in program.nodes:
        yield type(n.kind).__name__
