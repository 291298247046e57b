from __future__ import annotations


import pytest

from _support import ClassModel, build_three_level_tree

from nodehack import (
    ClassDef,
    ClassTable,
    DataType,
    FieldDef,
    Instance,
    MethodDef,
    boolean,
    define_class,
    instantiate,
    number,
    read_field,
    resolve_method,
    set_class_default,
    text,
)
from nodehack.classes import (
    ConstructorArityMismatch,
    DuplicateClass,
    InheritanceCycle,
    InvalidInputType,
    UnknownClass,
    UnknownField,
    UnknownMethod,
    UnknownParent,
    default_value,
    field_names,
)


def base_table():
    table = ClassTable()
    table = define_class(
        table,
        ClassDef(
            id="machine",
            name="Machine",
            fields=(
                FieldDef("power", DataType.NUMBER, number(10)),
                FieldDef("on", DataType.BOOLEAN, boolean(False)),
            ),
            methods=(MethodDef("announce", (), (("text", DataType.TEXT),), "announce_plain"),),
        ),
    )
    table = define_class(
        table,
        ClassDef(
            id="drill",
            name="Drill",
            parent="machine",
            fields=(FieldDef("bit", DataType.TEXT, text("steel")),),
        ),
    )
    return table


def test_define_class_rejects_duplicates():
    table = base_table()
    with pytest.raises(DuplicateClass):
        define_class(table, ClassDef(id="machine", name="Again"))


def test_define_class_rejects_unknown_parent():
    with pytest.raises(UnknownParent):
        define_class(ClassTable(), ClassDef(id="x", name="X", parent="ghost"))


def test_inheritance_cycle_detected():
    # A cycle can only be assembled by resolving names lazily; the table
    # still has to refuse it at definition time.
    table = ClassTable(
        classes={
            "a": ClassDef(id="a", name="A", parent="b"),
        }
    )
    with pytest.raises((InheritanceCycle, UnknownParent)):
        define_class(table, ClassDef(id="b", name="B", parent="a"))


def test_chain_walks_to_the_root():
    table = base_table()
    assert [c.id for c in table.chain("drill")] == ["drill", "machine"]
    assert table.is_subclass("drill", "machine")
    assert not table.is_subclass("machine", "drill")


def test_unknown_class_raises():
    with pytest.raises(UnknownClass):
        ClassTable().get("ghost")


def test_field_names_include_inherited():
    table = base_table()
    assert set(field_names(table, "drill")) == {"power", "on", "bit"}


def test_default_value_falls_back_up_the_chain():
    table = base_table()
    assert default_value(table, "drill", "power") == number(10)
    with pytest.raises(UnknownField):
        default_value(table, "drill", "ghost")


def test_instance_read_prefers_local_fields():
    table = base_table()
    inst = Instance("i1", "drill", local_fields={"power": number(99)})
    assert read_field(table, inst, "power") == number(99)
    assert read_field(table, inst, "bit") == text("steel")


def test_instantiate_validates_arity_and_types():
    table = ClassTable()
    table = define_class(
        table,
        ClassDef(
            id="rover",
            name="Rover",
            fields=(FieldDef("movement_type", DataType.TEXT, text("wheels")),),
            constructor_params=(("movement_type", DataType.TEXT),),
        ),
    )
    inst = instantiate(table, "rover", (text("hover"),), "i1")
    assert inst.local_fields["movement_type"] == text("hover")
    with pytest.raises(ConstructorArityMismatch):
        instantiate(table, "rover", (), "i2")
    with pytest.raises(InvalidInputType):
        instantiate(table, "rover", (number(3),), "i3")
    with pytest.raises(UnknownClass):
        instantiate(table, "ghost", (), "i4")


def test_resolve_method_picks_lowest_override():
    table = base_table()
    table = define_class(
        table,
        ClassDef(
            id="loud_drill",
            name="LoudDrill",
            parent="drill",
            methods=(MethodDef("announce", (), (("text", DataType.TEXT),), "announce_loud"),),
        ),
    )
    assert resolve_method(table, "machine", "announce").impl == "announce_plain"
    assert resolve_method(table, "loud_drill", "announce").impl == "announce_loud"
    with pytest.raises(UnknownMethod):
        resolve_method(table, "machine", "ghost")


def test_set_class_default_changes_future_reads():
    table = base_table()
    inst = Instance("i1", "machine")
    table = set_class_default(table, "machine", "power", number(50))
    assert read_field(table, inst, "power") == number(50)


def test_set_class_default_on_subclass_shadows_parent():
    table = base_table()
    parent_inst = Instance("p", "machine")
    child_inst = Instance("c", "drill")
    table = set_class_default(table, "drill", "power", number(77))
    assert read_field(table, parent_inst, "power") == number(10)
    assert read_field(table, child_inst, "power") == number(77)


def test_set_class_default_does_not_touch_local_overrides():
    table = base_table()
    inst = Instance("i1", "machine", local_fields={"power": number(3)})
    table = set_class_default(table, "machine", "power", number(50))
    assert read_field(table, inst, "power") == number(3)


def test_class_default_propagation_matches_chain_walker():
    table, instances, model = build_three_level_tree()
    edits = [
        ("root", "speed", number(5), 5.0),
        ("left", "speed", number(9), 9.0),
        ("root", "label", text("renamed"), "renamed"),
        ("right", "label", text("gilded"), "gilded"),
        ("leaf", "speed", number(42), 42.0),
        ("root", "speed", number(6), 6.0),
    ]
    for cid, fname, value, raw in edits:
        before = {
            iid: read_field(table, inst, fname) for iid, inst in instances.items()
        }
        # The walker predicts exactly which instances resolve through the
        # edited class once it defines the field.
        will_define = fname in model.fields[cid]
        expected_changed = set()
        for iid in instances:
            resolved = model.resolves_at(iid, fname)
            if resolved is None:
                continue
            if will_define:
                reaches = resolved == cid
            else:
                chain = []
                cur = model.instances[iid][0]
                while cur is not None:
                    chain.append(cur)
                    cur = model.parents[cur]
                reaches = cid in chain and chain.index(cid) < chain.index(resolved)
            if reaches and before[iid].value != raw:
                expected_changed.add(iid)

        table = set_class_default(table, cid, fname, value)
        model.set_default(cid, fname, raw)

        changed = set()
        for iid, inst in instances.items():
            now = read_field(table, inst, fname)
            assert now.value == model.read(iid, fname)
            if now != before[iid]:
                changed.add(iid)
        assert changed == expected_changed, (cid, fname)

    # Full sweep: every instance, every field, engine equals walker.
    for iid, inst in instances.items():
        for fname in ("speed", "label"):
            assert read_field(table, inst, fname).value == model.read(iid, fname)
