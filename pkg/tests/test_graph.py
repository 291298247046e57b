from __future__ import annotations

import pytest

from nodehack import (
    Arithmetic,
    ArithOp,
    ClassNode,
    Compare,
    CompareOp,
    Conditional,
    Constant,
    ConstructorCall,
    DataType,
    Direction,
    EntityNode,
    EventHandler,
    EventKind,
    FunctionCall,
    Logical,
    LogicOp,
    MethodCall,
    Not,
    Program,
    add_node,
    boolean,
    connect,
    disconnect,
    expected_ports,
    make_node,
    number,
    set_constant,
    text,
    validate_program,
)
from nodehack.graph import (
    DirectionMismatch,
    DuplicateNodeId,
    InputOccupied,
    NoSuchTube,
    NotAConstant,
    SelfConnection,
    UnknownEndpoint,
    dependency_tubes,
    iter_kinds,
)


def build(*nodes):
    program = Program()
    for node in nodes:
        program = add_node(program, node)
    return program


def test_expected_ports_constant():
    ports = expected_ports(Constant(boolean(True)))
    assert [p.name for p in ports] == ["out"]
    assert ports[0].direction is Direction.OUT
    assert ports[0].dtype is DataType.BOOLEAN


def test_expected_ports_arithmetic_and_not():
    ports = {p.name: p for p in expected_ports(Arithmetic(ArithOp.ADD))}
    assert set(ports) == {"a", "b", "out"}
    assert ports["a"].dtype is DataType.NUMBER
    ports = {p.name: p for p in expected_ports(Not())}
    assert ports["in"].dtype is DataType.BOOLEAN
    assert ports["out"].dtype is DataType.BOOLEAN


def test_expected_ports_compare_eq_is_generic():
    ports = {p.name: p for p in expected_ports(Compare(CompareOp.EQ))}
    assert ports["a"].dtype == "any"
    assert ports["b"].dtype == "any"
    ports = {p.name: p for p in expected_ports(Compare(CompareOp.LT))}
    assert ports["a"].dtype is DataType.NUMBER


def test_expected_ports_conditional():
    ports = {p.name: p for p in expected_ports(Conditional())}
    assert ports["cond"].dtype is DataType.BOOLEAN
    assert ports["then"].dtype == "any"
    assert ports["out"].direction is Direction.OUT


def test_expected_ports_event_handlers():
    plain = {p.name for p in expected_ports(EventHandler(EventKind.ON_TICK))}
    assert plain == {"fired"}
    col = {p.name: p for p in expected_ports(EventHandler(EventKind.ON_ENTER_COLUMN))}
    assert set(col) == {"fired", "column", "color"}
    assert col["column"].dtype is DataType.NUMBER
    assert col["color"].dtype is DataType.COLOR


def test_expected_ports_entity_node_door():
    ports = {(p.name, p.direction) for p in expected_ports(EntityNode("d1", "door"))}
    assert ("open", Direction.OUT) in ports
    assert ("open", Direction.IN) in ports


def test_expected_ports_entity_node_robot():
    kind = EntityNode("r1", "robot")
    outs = {p.name for p in expected_ports(kind) if p.direction is Direction.OUT}
    ins = {p.name for p in expected_ports(kind) if p.direction is Direction.IN}
    assert {"col", "row", "heading", "carrying", "alive"} <= outs
    assert {"command", "blueprint"} <= ins


def test_entity_write_ports_are_optional():
    kind = EntityNode("d1", "door")
    in_port = next(
        p for p in expected_ports(kind) if p.name == "open" and p.direction is Direction.IN
    )
    assert in_port.required is False


def test_class_node_ports():
    kind = ClassNode("beacon", (("color", DataType.COLOR),))
    names = {(p.name, p.direction) for p in expected_ports(kind)}
    assert ("class", Direction.OUT) in names
    assert ("color", Direction.IN) in names


def test_function_and_method_and_constructor_ports():
    fn = FunctionCall("f", (("x", DataType.NUMBER),), (("out", DataType.TEXT),))
    names = {p.name: p.direction for p in expected_ports(fn)}
    assert names == {"x": Direction.IN, "out": Direction.OUT}

    mc = MethodCall("c", "m", (("a", DataType.NUMBER),), (("r", DataType.BOOLEAN),))
    names = {p.name for p in expected_ports(mc)}
    assert "target" in names and "a" in names and "r" in names

    ctor = ConstructorCall("c", (("p", DataType.TEXT),))
    names = {p.name: p.direction for p in expected_ports(ctor)}
    assert names == {"p": Direction.IN, "out": Direction.OUT}


def test_add_node_rejects_duplicate_id():
    program = build(make_node("a", Constant(boolean(True))))
    with pytest.raises(DuplicateNodeId):
        add_node(program, make_node("a", Not()))


def test_program_normalizes_order():
    p1 = build(make_node("b", Not()), make_node("a", Constant(boolean(True))))
    p2 = build(make_node("a", Constant(boolean(True))), make_node("b", Not()))
    assert [n.id for n in p1.nodes] == ["a", "b"]
    assert p1.nodes == p2.nodes


def test_connect_happy_path_and_lookup():
    program = build(make_node("c", Constant(boolean(True))), make_node("n", Not()))
    program = connect(program, ("c", "out"), ("n", "in"))
    assert len(program.tubes) == 1
    tube = program.tube_into("n", "in")
    assert tube is not None and tube.from_node == "c"
    assert [t.to_node for t in program.tubes_from("c")] == ["n"]


def test_connect_unknown_endpoints():
    program = build(make_node("c", Constant(boolean(True))), make_node("n", Not()))
    with pytest.raises(UnknownEndpoint):
        connect(program, ("zzz", "out"), ("n", "in"))
    with pytest.raises(UnknownEndpoint):
        connect(program, ("c", "nope"), ("n", "in"))
    with pytest.raises(UnknownEndpoint):
        connect(program, ("c", "out"), ("n", "nope"))


def test_connect_direction_mismatch():
    program = build(make_node("c", Constant(boolean(True))), make_node("n", Not()))
    with pytest.raises(DirectionMismatch):
        connect(program, ("n", "in"), ("c", "out"))


def test_connect_rejects_self_loop():
    program = build(make_node("g", Logical(LogicOp.AND)))
    with pytest.raises(SelfConnection):
        connect(program, ("g", "out"), ("g", "a"))


def test_input_accepts_single_tube_only():
    program = build(
        make_node("c1", Constant(boolean(True))),
        make_node("c2", Constant(boolean(False))),
        make_node("n", Not()),
    )
    program = connect(program, ("c1", "out"), ("n", "in"))
    with pytest.raises(InputOccupied):
        connect(program, ("c2", "out"), ("n", "in"))


def test_output_fans_out():
    program = build(
        make_node("c", Constant(boolean(True))),
        make_node("n1", Not()),
        make_node("n2", Not()),
    )
    program = connect(program, ("c", "out"), ("n1", "in"))
    program = connect(program, ("c", "out"), ("n2", "in"))
    assert len(program.tubes_from("c")) == 2


def test_disconnect():
    program = build(make_node("c", Constant(boolean(True))), make_node("n", Not()))
    program = connect(program, ("c", "out"), ("n", "in"))
    program = disconnect(program, ("n", "in"))
    assert program.tubes == ()
    with pytest.raises(NoSuchTube):
        disconnect(program, ("n", "in"))


def test_set_constant_replaces_value_and_ports():
    program = build(make_node("c", Constant(number(1))))
    program = set_constant(program, "c", number(42))
    node = program.node("c")
    assert node.kind.value == number(42)
    assert node.port("out", Direction.OUT).dtype is DataType.NUMBER


def test_set_constant_can_change_type_of_unwired_constant():
    program = build(make_node("c", Constant(number(1))))
    program = set_constant(program, "c", text("hi"))
    assert program.node("c").kind.value == text("hi")


def test_set_constant_rejects_non_constants():
    program = build(make_node("n", Not()))
    with pytest.raises(NotAConstant):
        set_constant(program, "n", boolean(True))
    with pytest.raises(UnknownEndpoint):
        set_constant(program, "zzz", boolean(True))


def test_dependency_tubes_exclude_entity_and_class_sinks():
    program = build(
        make_node("c", Constant(boolean(True))),
        make_node("d", EntityNode("d1", "door")),
        make_node("n", Not()),
        make_node("k", ClassNode("beacon", (("lit", DataType.BOOLEAN),))),
    )
    program = connect(program, ("c", "out"), ("d", "open"))
    program = connect(program, ("c", "out"), ("n", "in"))
    program = connect(program, ("c", "out"), ("k", "lit"))
    deps = dependency_tubes(program)
    assert [(t.from_node, t.to_node) for t in deps] == [("c", "n")]


def test_validate_program_accepts_well_formed():
    program = build(make_node("c", Constant(boolean(True))), make_node("n", Not()))
    program = connect(program, ("c", "out"), ("n", "in"))
    validate_program(program)


def test_iter_kinds_names():
    program = build(
        make_node("c", Constant(boolean(True))),
        make_node("g", Logical(LogicOp.OR)),
        make_node("e", EventHandler(EventKind.ON_PRESSED, "b1")),
    )
    assert set(iter_kinds(program)) == {"Constant", "Logical", "EventHandler"}


def test_node_positions_and_lock_flag():
    node = make_node("c", Constant(boolean(True)), position=(3, 4), locked=True)
    assert node.position == (3, 4)
    assert node.locked is True
