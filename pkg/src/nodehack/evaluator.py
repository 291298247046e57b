"""Single-pass program evaluation.

Every tick the whole graph is evaluated in dependency order. Faults never
raise: they become diagnostics pinned to the node that consumed the bad
value, and the tube that delivered it is marked. Nodes downstream of a fault
report an upstream error instead of repeating the root cause.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional

from .classes import (
    ClassError,
    ClassTable,
    FunctionRegistry,
    Instance,
    instantiate,
    read_field,
    resolve_method,
)
from .graph import (
    ArithOp,
    ClassNode,
    Compare,
    CompareOp,
    Conditional,
    Constant,
    ConstructorCall,
    Arithmetic,
    Direction,
    EntityNode,
    EventHandler,
    EventKind,
    FunctionCall,
    Logical,
    LogicOp,
    MethodCall,
    Node,
    Not,
    Program,
    Tube,
    TubeState,
    UnknownEndpoint,
    dependency_tubes,
    detect_cycles,
)
from .values import (
    ANY,
    Color,
    DataType,
    Value,
    boolean,
    color,
    instance_ref,
    number,
    text,
)
from .world import EntityWrite, WorldEvent, WorldView


class DiagnosticCode(str, Enum):
    FEEDBACK_LOOP = "FeedbackLoop"
    MISSING_INPUT = "MissingInput"
    INVALID_INPUT_TYPE = "InvalidInputType"
    DIVISION_BY_ZERO = "DivisionByZero"
    NON_FINITE_RESULT = "NonFiniteResult"
    UPSTREAM_ERROR = "UpstreamError"
    UNKNOWN_ENTITY = "UnknownEntity"
    UNKNOWN_CLASS = "UnknownClass"
    UNKNOWN_METHOD = "UnknownMethod"
    UNKNOWN_FUNCTION = "UnknownFunction"
    UNKNOWN_INSTANCE = "UnknownInstance"
    WRITE_CONFLICT = "WriteConflict"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    node: str
    code: DiagnosticCode
    message: str
    port: Optional[str] = None
    severity: Severity = Severity.ERROR


# How class-system failures surface when they happen inside a pass.
_CLASS_DIAG = {
    "UnknownClass": DiagnosticCode.UNKNOWN_CLASS,
    "UnknownMethod": DiagnosticCode.UNKNOWN_METHOD,
    "UnknownField": DiagnosticCode.UNKNOWN_CLASS,
    "UnknownInstance": DiagnosticCode.UNKNOWN_INSTANCE,
    "ConstructorArityMismatch": DiagnosticCode.INVALID_INPUT_TYPE,
    "InvalidInputType": DiagnosticCode.INVALID_INPUT_TYPE,
}


@dataclass(frozen=True)
class ClassWrite:
    class_id: str
    field: str
    value: Value


@dataclass(frozen=True)
class EvalContext:
    view: Optional[WorldView] = None
    classes: ClassTable = field(default_factory=ClassTable)
    instances: Mapping[str, Instance] = field(default_factory=dict)
    functions: FunctionRegistry = field(default_factory=FunctionRegistry)
    pending_events: tuple[WorldEvent, ...] = ()


@dataclass(frozen=True)
class EvalResult:
    outputs: Mapping[tuple[str, str], Value]
    diagnostics: tuple[Diagnostic, ...]
    actions: tuple[EntityWrite, ...]
    tube_states: Mapping[tuple[str, str, str, str], TubeState]
    fired_events: tuple[WorldEvent, ...] = ()
    class_writes: tuple[ClassWrite, ...] = ()
    instance_creates: tuple[Instance, ...] = ()

    def node_diagnostic(self, node_id: str) -> Optional[Diagnostic]:
        for diag in self.diagnostics:
            if diag.node == node_id:
                return diag
        return None

    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity is Severity.ERROR)


@dataclass(frozen=True)
class InspectReport:
    node: str
    value: Optional[Value] = None
    diagnostic: Optional[Diagnostic] = None


def _topo_order(program: Program, skip: set[str]) -> list[str]:
    """Kahn's algorithm over value dependencies, always releasing the
    smallest ready node id."""
    indegree = {n.id: 0 for n in program.nodes if n.id not in skip}
    consumers: dict[str, list[str]] = {nid: [] for nid in indegree}
    for tube in dependency_tubes(program):
        if tube.from_node in skip or tube.to_node in skip:
            continue
        indegree[tube.to_node] += 1
        consumers[tube.from_node].append(tube.to_node)
    ready = [nid for nid, deg in sorted(indegree.items()) if deg == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        nid = heapq.heappop(ready)
        order.append(nid)
        for nxt in consumers[nid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, nxt)
    return order


class _Pass:
    def __init__(self, program: Program, ctx: EvalContext):
        self.program = program
        self.ctx = ctx
        self.outputs: dict[tuple[str, str], Value] = {}
        self.diagnostics: list[Diagnostic] = []
        self.errored: set[str] = set()
        self.marked_tubes: set[Tube] = set()
        self.actions: list[tuple[str, EntityWrite]] = []
        self.class_writes: list[tuple[str, ClassWrite]] = []
        self.instances: dict[str, Instance] = dict(ctx.instances)
        self.creates: list[Instance] = []
        self.fired: list[WorldEvent] = []

    def fail(
        self,
        node: Node,
        code: DiagnosticCode,
        message: str,
        port: Optional[str] = None,
        tubes: tuple[Tube, ...] = (),
    ) -> None:
        self.diagnostics.append(Diagnostic(node.id, code, message, port))
        self.errored.add(node.id)
        self.marked_tubes.update(tubes)

    def warn(self, node_id: str, code: DiagnosticCode, message: str) -> None:
        self.diagnostics.append(
            Diagnostic(node_id, code, message, severity=Severity.WARNING)
        )

    def emit(self, node: Node, port: str, value: Value) -> None:
        self.outputs[(node.id, port)] = value

    # ---- input gathering -------------------------------------------------

    def gather(self, node: Node) -> Optional[dict[str, Value]]:
        """Collect this node's inputs, or record why it cannot run.

        Returns None when the node must not execute this pass: upstream
        error, structurally missing input, or an inert producer.
        """
        isolated = not any(
            t.from_node == node.id or t.to_node == node.id for t in self.program.tubes
        )
        values: dict[str, Value] = {}
        inert = False
        for port in node.in_ports():
            tube = self.program.tube_into(node.id, port.name)
            if tube is None:
                if port.required and not isolated:
                    self.fail(
                        node,
                        DiagnosticCode.MISSING_INPUT,
                        f"input {port.name!r} is not connected",
                        port=port.name,
                    )
                    return None
                if port.required and isolated:
                    # A disconnected spare sitting on the bench: no wiring,
                    # no complaint.
                    return None
                continue
            produced = self.outputs.get((tube.from_node, tube.from_port))
            if produced is None:
                if tube.from_node in self.errored:
                    self.fail(
                        node,
                        DiagnosticCode.UPSTREAM_ERROR,
                        f"input {port.name!r} depends on failed node "
                        f"{tube.from_node!r}",
                        port=port.name,
                    )
                    return None
                inert = True
                continue
            values[port.name] = produced
        if inert:
            return None
        # Runtime type check at the consuming side.
        bad: list[tuple[str, Tube, Value]] = []
        for port in node.in_ports():
            got = values.get(port.name)
            if got is None or port.dtype == ANY:
                continue
            if got.type is not port.dtype:
                tube = self.program.tube_into(node.id, port.name)
                assert tube is not None
                bad.append((port.name, tube, got))
        if bad:
            name, _, got = bad[0]
            self.fail(
                node,
                DiagnosticCode.INVALID_INPUT_TYPE,
                f"input {name!r} expects {node.port(name, Direction.IN).dtype}, "
                f"got {got.type.value}",
                port=name,
                tubes=tuple(t for _, t, _ in bad),
            )
            return None
        return values

    # ---- node execution --------------------------------------------------

    def run_node(self, node: Node) -> None:
        kind = node.kind
        # Entity and class nodes split in two: reads are served here from
        # standing state; their write ports are collected after every
        # producer has run (see collect_writes).
        if isinstance(kind, EntityNode):
            self.run_entity_reads(node, kind)
            return
        if isinstance(kind, ClassNode):
            self.run_class_out(node, kind)
            return
        ins = self.gather(node)
        if ins is None:
            return
        if isinstance(kind, Constant):
            self.emit(node, "out", kind.value)
        elif isinstance(kind, Arithmetic):
            self.run_arithmetic(node, kind, ins)
        elif isinstance(kind, Logical):
            a, b = ins["a"].value, ins["b"].value
            if kind.op is LogicOp.AND:
                out = a and b
            elif kind.op is LogicOp.OR:
                out = a or b
            else:
                out = a != b
            self.emit(node, "out", boolean(out))
        elif isinstance(kind, Not):
            self.emit(node, "out", boolean(not ins["in"].value))
        elif isinstance(kind, Compare):
            self.run_compare(node, kind, ins)
        elif isinstance(kind, Conditional):
            self.run_conditional(node, ins)
        elif isinstance(kind, EventHandler):
            self.run_event_handler(node, kind)
        elif isinstance(kind, FunctionCall):
            self.run_function(node, kind, ins)
        elif isinstance(kind, MethodCall):
            self.run_method(node, kind, ins)
        elif isinstance(kind, ConstructorCall):
            self.run_constructor(node, kind, ins)
        else:
            raise AssertionError(f"unhandled kind {type(kind).__name__}")

    def run_arithmetic(self, node: Node, kind: Arithmetic, ins: Mapping[str, Value]) -> None:
        a, b = ins["a"].value, ins["b"].value
        if kind.op is ArithOp.DIV and b == 0:
            tube = self.program.tube_into(node.id, "b")
            self.fail(
                node,
                DiagnosticCode.DIVISION_BY_ZERO,
                "divisor is zero",
                port="b",
                tubes=(tube,) if tube is not None else (),
            )
            return
        if kind.op is ArithOp.ADD:
            out = a + b
        elif kind.op is ArithOp.SUB:
            out = a - b
        elif kind.op is ArithOp.MUL:
            out = a * b
        else:
            out = a / b
        if not math.isfinite(out):
            self.fail(
                node,
                DiagnosticCode.NON_FINITE_RESULT,
                f"{kind.op.value} result is not a finite number",
            )
            return
        self.emit(node, "out", number(out))

    def run_compare(self, node: Node, kind: Compare, ins: Mapping[str, Value]) -> None:
        a, b = ins["a"], ins["b"]
        if kind.op is CompareOp.EQ:
            self.emit(node, "out", boolean(a == b))
        elif kind.op is CompareOp.NEQ:
            self.emit(node, "out", boolean(a != b))
        else:
            table = {
                CompareOp.LT: a.value < b.value,
                CompareOp.LEQ: a.value <= b.value,
                CompareOp.GT: a.value > b.value,
                CompareOp.GEQ: a.value >= b.value,
            }
            self.emit(node, "out", boolean(table[kind.op]))

    def run_conditional(self, node: Node, ins: Mapping[str, Value]) -> None:
        then_v, else_v = ins["then"], ins["else"]
        if then_v.type is not else_v.type:
            tubes = tuple(
                t
                for t in (
                    self.program.tube_into(node.id, "then"),
                    self.program.tube_into(node.id, "else"),
                )
                if t is not None
            )
            self.fail(
                node,
                DiagnosticCode.INVALID_INPUT_TYPE,
                f"branches disagree: then is {then_v.type.value}, "
                f"else is {else_v.type.value}",
                tubes=tubes,
            )
            return
        self.emit(node, "out", then_v if ins["cond"].value else else_v)

    def run_event_handler(self, node: Node, kind: EventHandler) -> None:
        for event in self.ctx.pending_events:
            if event.kind is not kind.event:
                continue
            if kind.entity is not None and event.entity != kind.entity:
                continue
            self.emit(node, "fired", Value(DataType.PULSE, None))
            if kind.event is EventKind.ON_ENTER_COLUMN:
                self.emit(node, "column", number(event.column))
                self.emit(node, "color", color(event.color))
            if event not in self.fired:
                self.fired.append(event)
            return
        # No matching event this tick: the handler simply does not fire.

    def run_function(self, node: Node, kind: FunctionCall, ins: Mapping[str, Value]) -> None:
        fn = self.ctx.functions.function(kind.function)
        if fn is None:
            self.fail(
                node,
                DiagnosticCode.UNKNOWN_FUNCTION,
                f"no function {kind.function!r} is registered",
            )
            return
        outs = fn.fn(ins)
        for name, dtype in kind.outs:
            self.emit(node, name, outs[name])

    def run_method(self, node: Node, kind: MethodCall, ins: Mapping[str, Value]) -> None:
        target = ins["target"]
        if target.type is not DataType.INSTANCE_REF:
            tube = self.program.tube_into(node.id, "target")
            self.fail(
                node,
                DiagnosticCode.INVALID_INPUT_TYPE,
                f"input 'target' expects instance_ref, got {target.type.value}",
                port="target",
                tubes=(tube,) if tube is not None else (),
            )
            return
        inst = self.instances.get(target.value)
        if inst is None:
            self.fail(
                node,
                DiagnosticCode.UNKNOWN_INSTANCE,
                f"no instance {target.value!r}",
                port="target",
            )
            return
        try:
            method = resolve_method(self.ctx.classes, inst.class_id, kind.method)
        except ClassError as exc:
            self.fail(node, _CLASS_DIAG[exc.code], exc.message)
            return
        impl = self.ctx.functions.method_impl(method.impl)
        if impl is None:
            self.fail(
                node,
                DiagnosticCode.UNKNOWN_FUNCTION,
                f"method implementation {method.impl!r} is not registered",
            )
            return
        args = {name: ins[name] for name, _ in kind.args if name in ins}

        def reader(fname: str) -> Value:
            return read_field(self.ctx.classes, inst, fname)

        try:
            outs = impl(reader, args)
        except ClassError as exc:
            self.fail(node, _CLASS_DIAG[exc.code], exc.message)
            return
        for name, dtype in kind.outs:
            self.emit(node, name, outs[name])

    def run_constructor(self, node: Node, kind: ConstructorCall, ins: Mapping[str, Value]) -> None:
        try:
            args = [ins[name] for name, _ in kind.params]
            inst = instantiate(self.ctx.classes, kind.class_id, args, f"inst:{node.id}")
        except ClassError as exc:
            self.fail(node, _CLASS_DIAG[exc.code], exc.message)
            return
        self.instances[inst.id] = inst
        self.creates.append(inst)
        self.emit(node, "out", instance_ref(inst.id))

    def run_entity_reads(self, node: Node, kind: EntityNode) -> None:
        view = self.ctx.view
        if view is None or kind.entity not in view.kinds:
            self.fail(
                node,
                DiagnosticCode.UNKNOWN_ENTITY,
                f"no entity {kind.entity!r} in the world",
            )
            return
        for port in node.out_ports():
            got = view.read(kind.entity, port.name)
            if got is not None:
                self.emit(node, port.name, got)

    def run_class_out(self, node: Node, kind: ClassNode) -> None:
        if kind.class_id not in self.ctx.classes.classes:
            self.fail(
                node,
                DiagnosticCode.UNKNOWN_CLASS,
                f"no class {kind.class_id!r}",
            )
            return
        self.emit(node, "class", Value(DataType.CLASS_REF, kind.class_id))

    def collect_writes(self) -> None:
        """Gather entity and class writes once every producer has run.

        An inert producer simply skips the write this tick; a failed producer
        pins an upstream error on the writer and drops all its writes.
        """
        for node in self.program.nodes:
            kind = node.kind
            if not isinstance(kind, (EntityNode, ClassNode)):
                continue
            if node.id in self.errored:
                continue
            writes: list[tuple[str, Value]] = []
            failed = False
            for port in node.in_ports():
                tube = self.program.tube_into(node.id, port.name)
                if tube is None:
                    continue
                produced = self.outputs.get((tube.from_node, tube.from_port))
                if produced is None:
                    if tube.from_node in self.errored:
                        self.fail(
                            node,
                            DiagnosticCode.UPSTREAM_ERROR,
                            f"input {port.name!r} depends on failed node "
                            f"{tube.from_node!r}",
                            port=port.name,
                        )
                        failed = True
                        break
                    continue
                if port.dtype != ANY and produced.type is not port.dtype:
                    self.fail(
                        node,
                        DiagnosticCode.INVALID_INPUT_TYPE,
                        f"input {port.name!r} expects {port.dtype}, "
                        f"got {produced.type.value}",
                        port=port.name,
                        tubes=(tube,),
                    )
                    failed = True
                    break
                writes.append((port.name, produced))
            if failed:
                continue
            for name, v in writes:
                if isinstance(kind, EntityNode):
                    self.actions.append((node.id, EntityWrite(kind.entity, name, v)))
                else:
                    self.class_writes.append((node.id, ClassWrite(kind.class_id, name, v)))

    # ---- conflict folding --------------------------------------------------

    def fold_writes(self) -> tuple[tuple[EntityWrite, ...], tuple[ClassWrite, ...]]:
        last_entity: dict[tuple[str, str], int] = {}
        for i, (node_id, w) in enumerate(self.actions):
            key = (w.entity, w.prop)
            if key in last_entity:
                self.warn(
                    node_id,
                    DiagnosticCode.WRITE_CONFLICT,
                    f"{w.entity}.{w.prop} was already written this tick; "
                    "this write wins",
                )
            last_entity[key] = i
        kept = sorted(last_entity.values())
        actions = tuple(self.actions[i][1] for i in kept)

        last_class: dict[tuple[str, str], int] = {}
        for i, (node_id, w) in enumerate(self.class_writes):
            key = (w.class_id, w.field)
            if key in last_class:
                self.warn(
                    node_id,
                    DiagnosticCode.WRITE_CONFLICT,
                    f"{w.class_id}.{w.field} was already written this tick; "
                    "this write wins",
                )
            last_class[key] = i
        kept = sorted(last_class.values())
        class_writes = tuple(self.class_writes[i][1] for i in kept)
        return actions, class_writes

    def tube_states(self) -> dict[tuple[str, str, str, str], TubeState]:
        states = {}
        for tube in self.program.tubes:
            # A tube turns red when its source failed to deliver, or when the
            # value it delivered is what tripped the consumer.
            suppressed = (
                tube.from_node in self.errored
                and (tube.from_node, tube.from_port) not in self.outputs
            )
            error = suppressed or tube in self.marked_tubes
            states[tube.key()] = TubeState.ERROR if error else TubeState.NORMAL
        return states


def evaluate(program: Program, ctx: EvalContext) -> EvalResult:
    ev = _Pass(program, ctx)

    cycles = detect_cycles(program)
    cycle_nodes = sorted({nid for cycle in cycles for nid in cycle})
    for nid in cycle_nodes:
        node = program.node(nid)
        ev.fail(
            node,
            DiagnosticCode.FEEDBACK_LOOP,
            "node is part of a feedback loop",
        )

    for nid in _topo_order(program, set(cycle_nodes)):
        ev.run_node(program.node(nid))

    ev.collect_writes()
    actions, class_writes = ev.fold_writes()
    return EvalResult(
        outputs=dict(ev.outputs),
        diagnostics=tuple(ev.diagnostics),
        actions=actions,
        tube_states=ev.tube_states(),
        fired_events=tuple(ev.fired),
        class_writes=class_writes,
        instance_creates=tuple(ev.creates),
    )


def inspect(program: Program, ctx: EvalContext, node_id: str) -> InspectReport:
    """Re-evaluate and report what one node is doing right now."""
    node = program.node(node_id)
    if node is None:
        raise UnknownEndpoint(f"no node {node_id!r}")
    result = evaluate(program, ctx)
    for diag in result.diagnostics:
        if diag.node == node_id and diag.severity is Severity.ERROR:
            return InspectReport(node_id, diagnostic=diag)
    for port in node.out_ports():
        got = result.outputs.get((node_id, port.name))
        if got is not None:
            return InspectReport(node_id, value=got)
    return InspectReport(node_id)


def dispatch_event(program: Program, ctx: EvalContext, event: WorldEvent) -> EvalResult:
    return evaluate(program, replace(ctx, pending_events=(event,)))
