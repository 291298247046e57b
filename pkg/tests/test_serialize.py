from __future__ import annotations

import json

import pytest

from nodehack import (
    Arithmetic,
    ArithOp,
    Button,
    Cell,
    ClassDef,
    ClassNode,
    ClassTable,
    Color,
    ColumnMarker,
    Compare,
    CompareOp,
    Conditional,
    Constant,
    ConstructorCall,
    Cube,
    DataType,
    Door,
    Elevator,
    EntityNode,
    EventHandler,
    EventKind,
    FieldDef,
    FunctionCall,
    Grid,
    Heading,
    Instance,
    Logical,
    LogicOp,
    MethodCall,
    MethodDef,
    Not,
    PasswordConsole,
    Program,
    Robot,
    Terrain,
    World,
    add_node,
    boolean,
    color,
    connect,
    define_class,
    instance_ref,
    make_node,
    number,
    text,
)
from nodehack.serialize import (
    ParseError,
    canonical_dumps,
    classes_from_doc,
    classes_to_doc,
    instances_from_doc,
    instances_to_doc,
    kind_from_doc,
    kind_to_doc,
    loads,
    program_from_doc,
    program_to_doc,
    value_from_doc,
    value_to_doc,
    world_from_doc,
    world_to_doc,
)


def test_canonical_dumps_is_sorted_compact_ascii():
    raw = canonical_dumps({"b": 1, "a": [2, 3], "u": "café"})
    assert raw == '{"a":[2,3],"b":1,"u":"caf\\u00e9"}\n'
    assert raw.endswith("\n")


def test_loads_rejects_bad_json_with_path():
    with pytest.raises(ParseError) as err:
        loads("{nope", "$")
    assert "$" in str(err.value)


def test_value_roundtrip_every_type():
    for value in [
        boolean(True),
        number(2.5),
        number(-3),
        text("hi"),
        color(Color.YELLOW),
        instance_ref("i1"),
    ]:
        doc = value_to_doc(value)
        assert value_from_doc(doc) == value


def test_value_doc_rejects_unknown_fields():
    with pytest.raises(ValueError):
        value_from_doc({"type": "number", "value": 1, "extra": 2})
    with pytest.raises(ValueError):
        value_from_doc({"type": "number"})
    with pytest.raises(ValueError):
        value_from_doc({"type": "what", "value": 1})


def test_every_kind_roundtrips():
    kinds = [
        Constant(number(4)),
        Arithmetic(ArithOp.DIV),
        Logical(LogicOp.XOR),
        Not(),
        Compare(CompareOp.GEQ),
        Conditional(),
        EventHandler(EventKind.ON_ENTER_COLUMN, "r1"),
        EventHandler(EventKind.ON_TICK),
        FunctionCall(
            "digits_to_text",
            (("a", DataType.NUMBER),),
            (("text", DataType.TEXT),),
        ),
        MethodCall("ann", "announce", (), (("text", DataType.TEXT),)),
        ConstructorCall("rover", (("movement_type", DataType.TEXT),)),
        EntityNode("d1", "door"),
        ClassNode("beacon", (("hue", DataType.COLOR),)),
    ]
    for kind in kinds:
        doc = kind_to_doc(kind)
        assert kind_from_doc(doc, "$") == kind, kind


def test_kind_doc_rejects_unknown_tag():
    with pytest.raises(ParseError):
        kind_from_doc({"type": "teleport"}, "$")


def sample_program():
    program = Program()
    program = add_node(program, make_node("c", Constant(boolean(True)), position=(3, 7)))
    program = add_node(program, make_node("n", Not(), locked=True))
    program = connect(program, ("c", "out"), ("n", "in"))
    return program


def test_program_roundtrip_preserves_everything():
    program = sample_program()
    doc = program_to_doc(program)
    back = program_from_doc(doc)
    assert back == program
    assert back.node("c").position == (3, 7)
    assert back.node("n").locked is True


def test_program_doc_is_canonical_and_stable():
    doc = program_to_doc(sample_program())
    raw = canonical_dumps(doc)
    again = canonical_dumps(program_to_doc(program_from_doc(json.loads(raw))))
    assert raw == again


def test_program_doc_rejects_unknown_fields_and_bad_tubes():
    doc = program_to_doc(sample_program())
    doc["surprise"] = 1
    with pytest.raises(ParseError):
        program_from_doc(doc)
    doc = program_to_doc(sample_program())
    doc["tubes"][0]["from_node"] = "ghost"
    with pytest.raises(Exception):
        program_from_doc(doc)


def test_ports_are_derived_not_stored():
    doc = program_to_doc(sample_program())
    assert "ports" not in canonical_dumps(doc)


def sample_world():
    cells = {
        (1, 0): Cell(terrain=Terrain.LAVA),
        (2, 0): Cell(marker=ColumnMarker(3, Color.BLUE)),
    }
    return World(
        Grid(5, 2, cells),
        {
            "r1": Robot("r1", 0, 0, heading=Heading.S, carrying="c1"),
            "c1": Cube("c1", 0, 0, carried_by="r1"),
            "d1": Door("d1", 3, 0, open=True),
            "el": Elevator("el", 4, 0, height=1.5, target=4.0, max_height=6.0),
            "b1": Button("b1", 2, 1),
            "con": PasswordConsole("con", 3, 1, expected="99"),
        },
        tick=5,
    )


def test_world_roundtrip():
    world = sample_world()
    doc = world_to_doc(world)
    assert world_from_doc(doc) == world


def test_world_doc_canonical_stability():
    raw = canonical_dumps(world_to_doc(sample_world()))
    again = canonical_dumps(world_to_doc(world_from_doc(json.loads(raw))))
    assert raw == again


def test_world_doc_skips_default_cells():
    doc = world_to_doc(sample_world())
    assert len(doc["grid"]["cells"]) == 2  # only the two non-default cells


def test_world_doc_rejects_duplicate_entities():
    doc = world_to_doc(sample_world())
    doc["entities"].append(doc["entities"][0])
    with pytest.raises(ParseError):
        world_from_doc(doc)


def test_world_doc_rejects_unknown_entity_tag():
    doc = world_to_doc(sample_world())
    doc["entities"][0]["kind"] = "dragon"
    with pytest.raises(ParseError):
        world_from_doc(doc)


def sample_classes():
    table = ClassTable()
    table = define_class(
        table,
        ClassDef(
            id="ann",
            name="Announcer",
            fields=(FieldDef("phrase", DataType.TEXT, text("hello")),),
            constructor_params=(("phrase", DataType.TEXT),),
            methods=(MethodDef("announce", (), (("text", DataType.TEXT),), "announce_plain"),),
        ),
    )
    table = define_class(
        table, ClassDef(id="loud", name="Loud", parent="ann")
    )
    return table


def test_classes_roundtrip():
    table = sample_classes()
    doc = classes_to_doc(table)
    back = classes_from_doc(doc)
    assert back == table


def test_classes_doc_rejects_unknown_parent():
    doc = classes_to_doc(sample_classes())
    doc[1]["parent"] = "ghost"
    with pytest.raises(Exception):
        classes_from_doc(doc)


def test_instances_roundtrip():
    instances = {
        "i1": Instance("i1", "ann", local_fields={"phrase": text("yo")}),
        "i2": Instance("i2", "loud", bound_entity="r1"),
    }
    doc = instances_to_doc(instances)
    assert instances_from_doc(doc) == instances


def test_instances_doc_rejects_unknown_fields():
    doc = instances_to_doc({"i1": Instance("i1", "ann")})
    doc[0]["shadow"] = True
    with pytest.raises(ParseError):
        instances_from_doc(doc)
