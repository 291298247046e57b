"""The bundled seventeen-puzzle curriculum and its reference solutions.

Each builder returns the puzzle spec plus an edit script that solves it.
Run this module to regenerate the canonical JSON under puzzles/data/; a test
pins the generated bytes so the shipped files cannot drift from the builders.
"""

from __future__ import annotations

from pathlib import Path

from ..classes import ClassDef, ClassTable, FieldDef, Instance, MethodDef
from ..graph import (
    Arithmetic,
    ArithOp,
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
    Not,
    Program,
    Tube,
    make_node,
)
from ..serialize import canonical_dumps
from ..values import Color, DataType, boolean, color, instance_ref, number, text
from ..world import (
    Avatar,
    Button,
    Cell,
    ColumnMarker,
    Cube,
    Door,
    Elevator,
    Grid,
    Heading,
    PasswordConsole,
    Robot,
    Terrain,
    World,
    WorldEvent,
)
from . import Edit, PuzzleSpec, WinClause, edits_to_doc, puzzle_to_doc


def _n(node_id, kind, x, y, locked=False) -> Node:
    return make_node(node_id, kind, (float(x), float(y)), locked)


def _t(from_node, from_port, to_node, to_port) -> Tube:
    return Tube(from_node, from_port, to_node, to_port)


def _connect(a, ap, b, bp) -> Edit:
    return Edit("connect", from_end=(a, ap), to_end=(b, bp))


def _disconnect(b, bp) -> Edit:
    return Edit("disconnect", to_end=(b, bp))


def _set(node, value) -> Edit:
    return Edit("set_constant", node=node, value=value)


def _grid(width, height, cells=None) -> Grid:
    return Grid(width, height, cells or {})


def _marker(num, col_name) -> Cell:
    return Cell(marker=ColumnMarker(num, Color(col_name)))


TEXT = DataType.TEXT
NUMBER = DataType.NUMBER
COLOR = DataType.COLOR


# ---- p01 ---------------------------------------------------------------------


def p01():
    world = World(
        _grid(5, 3),
        {
            "d1": Door("d1", 2, 1),
            "av1": Avatar("av1", 0, 1),
        },
    )
    program = Program(
        (
            _n("c_true", Constant(boolean(True)), 0, 0),
            _n("e_door", EntityNode("d1", "door"), 2, 0, locked=True),
        )
    )
    spec = PuzzleSpec(
        id="p01",
        title="First Door",
        brief="The door listens to its open input. Feed it a true value.",
        world=world,
        program=program,
        allowed_ops=frozenset({"connect"}),
        max_ticks=10,
        win=(WinClause("entity_prop", entity="d1", prop="open", value=boolean(True)),),
    )
    solution = (_connect("c_true", "out", "e_door", "open"),)
    return spec, solution


# ---- p02 ---------------------------------------------------------------------


def p02():
    world = World(
        _grid(5, 3),
        {
            "elev1": Elevator("elev1", 2, 1, height=0.0, min_height=0.0, max_height=8.0),
            "av1": Avatar("av1", 2, 1, riding="elev1"),
        },
    )
    program = Program(
        (
            _n("c_h", Constant(number(0)), 0, 0),
            _n("e_elev", EntityNode("elev1", "elevator"), 2, 0, locked=True),
        )
    )
    spec = PuzzleSpec(
        id="p02",
        title="Lift Ride",
        brief="Send the platform to height four so the rider can reach the ledge.",
        world=world,
        program=program,
        allowed_ops=frozenset({"connect", "set_constant"}),
        editable_constants=("c_h",),
        max_ticks=20,
        win=(
            WinClause("entity_prop", entity="elev1", prop="height", value=number(4.0)),
            WinClause("avatar_riding", avatar="av1", elevator="elev1"),
        ),
    )
    solution = (
        _set("c_h", number(4)),
        _connect("c_h", "out", "e_elev", "target"),
    )
    return spec, solution


# ---- p03 ---------------------------------------------------------------------


def p03():
    world = World(
        _grid(4, 3),
        {
            "con1": PasswordConsole("con1", 2, 1, expected="7325"),
            "av1": Avatar("av1", 0, 1),
        },
    )
    nodes = (
        _n("c_a1", Constant(number(1)), 0, 0),
        _n("c_a2", Constant(number(1)), 0, 1),
        _n("c_s1", Constant(number(9)), 0, 2),
        _n("c_s2", Constant(number(1)), 0, 3),
        _n("c_m1", Constant(number(3)), 0, 4),
        _n("c_m2", Constant(number(3)), 0, 5),
        _n("c_d1", Constant(number(6)), 0, 6),
        _n("c_d2", Constant(number(2)), 0, 7),
        _n("add1", Arithmetic(ArithOp.ADD), 1, 0, locked=True),
        _n("sub1", Arithmetic(ArithOp.SUB), 1, 2, locked=True),
        _n("mul1", Arithmetic(ArithOp.MUL), 1, 4, locked=True),
        _n("div1", Arithmetic(ArithOp.DIV), 1, 6, locked=True),
        _n(
            "fmt",
            FunctionCall(
                "digits_to_text",
                ins=(("a", NUMBER), ("b", NUMBER), ("c", NUMBER), ("d", NUMBER)),
                outs=(("text", TEXT),),
            ),
            2,
            3,
            locked=True,
        ),
        _n("e_con", EntityNode("con1", "console"), 3, 3, locked=True),
    )
    tubes = (
        _t("c_a1", "out", "add1", "a"),
        _t("c_a2", "out", "add1", "b"),
        _t("c_s1", "out", "sub1", "a"),
        _t("c_s2", "out", "sub1", "b"),
        _t("c_m1", "out", "mul1", "a"),
        _t("c_m2", "out", "mul1", "b"),
        _t("c_d1", "out", "div1", "a"),
        _t("c_d2", "out", "div1", "b"),
        _t("add1", "out", "fmt", "a"),
        _t("sub1", "out", "fmt", "b"),
        _t("mul1", "out", "fmt", "c"),
        _t("div1", "out", "fmt", "d"),
        _t("fmt", "text", "e_con", "entered"),
    )
    spec = PuzzleSpec(
        id="p03",
        title="Door Code",
        brief=(
            "The console wants 7325. Retune the four calculations so their "
            "digits spell it out."
        ),
        world=world,
        program=Program(nodes, tubes),
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_a1", "c_a2", "c_s1", "c_s2", "c_m1", "c_m2", "c_d1", "c_d2"),
        max_ticks=10,
        win=(WinClause("entity_prop", entity="con1", prop="unlocked", value=boolean(True)),),
    )
    solution = (
        _set("c_a1", number(3)),
        _set("c_a2", number(4)),
        _set("c_s1", number(8)),
        _set("c_s2", number(5)),
        _set("c_m1", number(1)),
        _set("c_m2", number(2)),
        _set("c_d1", number(10)),
        _set("c_d2", number(2)),
    )
    return spec, solution


# ---- p04 ---------------------------------------------------------------------


def p04():
    world = World(
        _grid(5, 3),
        {
            "d1": Door("d1", 3, 1),
            "av1": Avatar("av1", 0, 1),
        },
    )
    nodes = (
        _n("c_x", Constant(boolean(False)), 0, 0),
        _n("c_y", Constant(boolean(False)), 0, 1),
        _n("and1", Logical(LogicOp.AND), 1, 0, locked=True),
        _n("e_door", EntityNode("d1", "door"), 2, 0, locked=True),
    )
    tubes = (
        _t("c_x", "out", "and1", "a"),
        _t("c_y", "out", "and1", "b"),
        _t("and1", "out", "e_door", "open"),
    )
    spec = PuzzleSpec(
        id="p04",
        title="Two Switches",
        brief="The door opens only when both of its switches agree. Flip them.",
        world=world,
        program=Program(nodes, tubes),
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_x", "c_y"),
        max_ticks=10,
        win=(WinClause("entity_prop", entity="d1", prop="open", value=boolean(True)),),
    )
    solution = (_set("c_x", boolean(True)), _set("c_y", boolean(True)))
    return spec, solution


# ---- p05 ---------------------------------------------------------------------


def p05():
    world = World(
        _grid(5, 3),
        {
            "b1": Button("b1", 2, 0, pressed=True),
            "b2": Button("b2", 2, 2),
            "cb1": Cube("cb1", 2, 0),
            "d1": Door("d1", 3, 1),
            "av1": Avatar("av1", 0, 1),
        },
    )
    nodes = (
        _n("c_f1", Constant(boolean(False)), 0, 0, locked=True),
        _n("c_f2", Constant(boolean(False)), 0, 1, locked=True),
        _n("or1", Logical(LogicOp.OR), 1, 0, locked=True),
        _n("e_door", EntityNode("d1", "door"), 2, 0, locked=True),
        _n("e_b1", EntityNode("b1", "button"), 0, 2, locked=True),
        _n("e_b2", EntityNode("b2", "button"), 0, 3, locked=True),
    )
    tubes = (
        _t("c_f1", "out", "or1", "a"),
        _t("c_f2", "out", "or1", "b"),
        _t("or1", "out", "e_door", "open"),
    )
    spec = PuzzleSpec(
        id="p05",
        title="Pressure Gate",
        brief=(
            "A crate already rests on one of the floor plates, but the door is "
            "wired to dead inputs. Route a plate signal in."
        ),
        world=world,
        program=Program(nodes, tubes),
        allowed_ops=frozenset({"connect", "disconnect"}),
        max_ticks=10,
        win=(WinClause("entity_prop", entity="d1", prop="open", value=boolean(True)),),
    )
    solution = (
        _disconnect("or1", "a"),
        _connect("e_b1", "pressed", "or1", "a"),
    )
    return spec, solution


# ---- p06 ---------------------------------------------------------------------


def p06():
    world = World(
        _grid(5, 3),
        {
            "d1": Door("d1", 3, 1),
            "av1": Avatar("av1", 0, 1),
        },
    )
    nodes = (
        _n("c_false", Constant(boolean(False)), 0, 0, locked=True),
        _n("not1", Not(), 1, 1),
        _n("e_door", EntityNode("d1", "door"), 2, 0, locked=True),
    )
    tubes = (_t("c_false", "out", "e_door", "open"),)
    spec = PuzzleSpec(
        id="p06",
        title="Inverter",
        brief=(
            "The only signal available is stuck at false. Put the inverter in "
            "its path."
        ),
        world=world,
        program=Program(nodes, tubes),
        allowed_ops=frozenset({"connect", "disconnect"}),
        max_ticks=10,
        win=(WinClause("entity_prop", entity="d1", prop="open", value=boolean(True)),),
    )
    solution = (
        _disconnect("e_door", "open"),
        _connect("c_false", "out", "not1", "in"),
        _connect("not1", "out", "e_door", "open"),
    )
    return spec, solution


# ---- p07 ---------------------------------------------------------------------


def p07():
    world = World(
        _grid(6, 3),
        {
            "b1": Button("b1", 1, 1, pressed=True),
            "cb1": Cube("cb1", 1, 1),
            "elev1": Elevator("elev1", 3, 1, height=0.0, min_height=0.0, max_height=8.0),
            "d1": Door("d1", 5, 1),
            "av1": Avatar("av1", 0, 1),
        },
    )
    nodes = (
        _n("e_b1", EntityNode("b1", "button"), 0, 0, locked=True),
        _n("e_elev", EntityNode("elev1", "elevator"), 0, 2, locked=True),
        _n("c_3", Constant(number(3)), 0, 3, locked=True),
        _n("cmp1", Compare(CompareOp.GEQ), 1, 2, locked=True),
        _n("and1", Logical(LogicOp.AND), 2, 0, locked=True),
        _n("e_door", EntityNode("d1", "door"), 3, 0, locked=True),
        _n("c_h", Constant(number(0)), 0, 4),
    )
    tubes = (
        _t("e_b1", "pressed", "and1", "a"),
        _t("e_elev", "height", "cmp1", "a"),
        _t("c_3", "out", "cmp1", "b"),
        _t("cmp1", "out", "and1", "b"),
        _t("and1", "out", "e_door", "open"),
    )
    spec = PuzzleSpec(
        id="p07",
        title="High Water",
        brief=(
            "The door needs the plate held down and the platform at height "
            "three or more. The plate is covered; the platform is not moving."
        ),
        world=world,
        program=Program(nodes, tubes),
        allowed_ops=frozenset({"connect", "set_constant"}),
        editable_constants=("c_h",),
        max_ticks=20,
        win=(WinClause("entity_prop", entity="d1", prop="open", value=boolean(True)),),
    )
    solution = (
        _set("c_h", number(5)),
        _connect("c_h", "out", "e_elev", "target"),
    )
    return spec, solution


# ---- p08 ---------------------------------------------------------------------


def p08():
    cells = {
        (0, 0): _marker(0, "red"),
        (1, 0): _marker(1, "green"),
        (2, 0): _marker(2, "blue"),
        (3, 0): _marker(3, "yellow"),
        (4, 0): _marker(4, "red"),
    }
    world = World(
        _grid(6, 1, cells),
        {
            "r1": Robot("r1", 0, 0, heading=Heading.E, carrying="cb1"),
            "cb1": Cube("cb1", 0, 0, carried_by="r1"),
        },
    )
    nodes = (
        _n("ev1", EventHandler(EventKind.ON_ENTER_COLUMN, "r1"), 0, 0, locked=True),
        _n("c_target", Constant(number(1)), 0, 2),
        _n("eq1", Compare(CompareOp.EQ), 1, 0, locked=True),
        _n("c_drop", Constant(text("drop_cube")), 1, 2, locked=True),
        _n("c_fwd", Constant(text("forward")), 1, 3, locked=True),
        _n("cond1", Conditional(), 2, 0, locked=True),
        _n("e_bot", EntityNode("r1", "robot"), 3, 0, locked=True),
    )
    tubes = (
        _t("ev1", "column", "eq1", "a"),
        _t("c_target", "out", "eq1", "b"),
        _t("eq1", "out", "cond1", "cond"),
        _t("c_drop", "out", "cond1", "then"),
        _t("c_fwd", "out", "cond1", "else"),
        _t("cond1", "out", "e_bot", "command"),
    )
    spec = PuzzleSpec(
        id="p08",
        title="Drop Zone",
        brief=(
            "The courier walks the numbered strip and drops its crate when the "
            "marker matches its target. The crate belongs on marker three."
        ),
        world=world,
        program=Program(nodes, tubes),
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_target",),
        initial_events=(
            WorldEvent(EventKind.ON_ENTER_COLUMN, "r1", column=0, color=Color.RED),
        ),
        max_ticks=30,
        win=(
            WinClause("cube_on_marker", number=3),
            WinClause("no_cubes_on_other_markers", number=3),
        ),
    )
    solution = (_set("c_target", number(3)),)
    return spec, solution


def _compass_nodes(shuffled: bool):
    """The color-to-heading decoder shared by the walking puzzles.

    Correct map: red goes north, green east, blue south, yellow west.
    `shuffled` swaps the branch wiring so the robot misreads every marker.
    """
    nodes = (
        _n("ev1", EventHandler(EventKind.ON_ENTER_COLUMN, "r1"), 0, 0, locked=True),
        _n("c_red", Constant(color(Color.RED)), 0, 2, locked=True),
        _n("c_green", Constant(color(Color.GREEN)), 0, 3, locked=True),
        _n("c_blue", Constant(color(Color.BLUE)), 0, 4, locked=True),
        _n("eq_r", Compare(CompareOp.EQ), 1, 2, locked=True),
        _n("eq_g", Compare(CompareOp.EQ), 1, 3, locked=True),
        _n("eq_b", Compare(CompareOp.EQ), 1, 4, locked=True),
        _n("c_n", Constant(text("N")), 2, 2, locked=True),
        _n("c_e", Constant(text("E")), 2, 3, locked=True),
        _n("c_s", Constant(text("S")), 2, 4, locked=True),
        _n("c_w", Constant(text("W")), 2, 5, locked=True),
        _n("cond3", Conditional(), 3, 4, locked=True),
        _n("cond2", Conditional(), 3, 3, locked=True),
        _n("cond1", Conditional(), 3, 2, locked=True),
        _n("e_bot", EntityNode("r1", "robot"), 4, 0, locked=True),
        _n("eq_h", Compare(CompareOp.EQ), 4, 2, locked=True),
        _n("c_fwd", Constant(text("forward")), 4, 3, locked=True),
        _n("c_tr", Constant(text("turn_right")), 4, 4, locked=True),
        _n("cond_m", Conditional(), 5, 2, locked=True),
    )
    branch = {
        True: (("cond1", "c_e"), ("cond2", "c_n"), ("cond3", "c_w"), ("cond3e", "c_s")),
        False: (("cond1", "c_n"), ("cond2", "c_e"), ("cond3", "c_s"), ("cond3e", "c_w")),
    }[shuffled]
    tubes = (
        _t("ev1", "color", "eq_r", "a"),
        _t("c_red", "out", "eq_r", "b"),
        _t("ev1", "color", "eq_g", "a"),
        _t("c_green", "out", "eq_g", "b"),
        _t("ev1", "color", "eq_b", "a"),
        _t("c_blue", "out", "eq_b", "b"),
        _t("eq_r", "out", "cond1", "cond"),
        _t("eq_g", "out", "cond2", "cond"),
        _t("eq_b", "out", "cond3", "cond"),
        _t(branch[0][1], "out", "cond1", "then"),
        _t(branch[1][1], "out", "cond2", "then"),
        _t(branch[2][1], "out", "cond3", "then"),
        _t(branch[3][1], "out", "cond3", "else"),
        _t("cond2", "out", "cond1", "else"),
        _t("cond3", "out", "cond2", "else"),
        _t("e_bot", "heading", "eq_h", "a"),
        _t("c_fwd", "out", "cond_m", "then"),
        _t("c_tr", "out", "cond_m", "else"),
        _t("eq_h", "out", "cond_m", "cond"),
        _t("cond_m", "out", "e_bot", "command"),
    )
    return nodes, tubes


def p09():
    cells = {
        (0, 1): _marker(0, "green"),
        (1, 1): _marker(1, "blue"),
        (1, 2): _marker(2, "green"),
        (2, 2): _marker(3, "green"),
        (3, 2): _marker(4, "blue"),
        (3, 3): _marker(5, "yellow"),
        (2, 3): _marker(6, "yellow"),
        (1, 3): _marker(7, "yellow"),
        (0, 3): _marker(8, "red"),
    }
    world = World(
        _grid(4, 4, cells),
        {"r1": Robot("r1", 0, 1, heading=Heading.E)},
    )
    nodes, tubes = _compass_nodes(shuffled=True)
    extra = (
        _t("cond1", "out", "eq_h", "b"),
    )
    spec = PuzzleSpec(
        id="p09",
        title="Color Compass",
        brief=(
            "Each floor marker's color names a compass direction, but the "
            "decoder's branches are scrambled. Red is north, green east, blue "
            "south, yellow west."
        ),
        world=world,
        program=Program(nodes, tubes + extra),
        allowed_ops=frozenset({"connect", "disconnect"}),
        initial_events=(
            WorldEvent(EventKind.ON_ENTER_COLUMN, "r1", column=0, color=Color.GREEN),
        ),
        max_ticks=60,
        win=(WinClause("robot_at", entity="r1", col=0, row=2),),
    )
    solution = (
        _disconnect("cond1", "then"),
        _connect("c_n", "out", "cond1", "then"),
        _disconnect("cond2", "then"),
        _connect("c_e", "out", "cond2", "then"),
        _disconnect("cond3", "then"),
        _connect("c_s", "out", "cond3", "then"),
        _disconnect("cond3", "else"),
        _connect("c_w", "out", "cond3", "else"),
    )
    return spec, solution


def p10():
    cells = {
        (0, 3): _marker(0, "green"),
        (1, 3): _marker(1, "green"),
        (2, 3): _marker(2, "blue"),
        (2, 2): _marker(3, "green"),
        (3, 2): _marker(4, "red"),
        (3, 1): _marker(5, "red"),
    }
    world = World(
        _grid(4, 4, cells),
        {"r1": Robot("r1", 0, 3, heading=Heading.E)},
    )
    nodes, tubes = _compass_nodes(shuffled=False)
    nodes = nodes + (
        _n("c_k", Constant(number(9)), 0, 6),
        _n("eq_k", Compare(CompareOp.EQ), 1, 6, locked=True),
        _n("cond0", Conditional(), 3, 6, locked=True),
    )
    tubes = tubes + (
        _t("ev1", "column", "eq_k", "a"),
        _t("c_k", "out", "eq_k", "b"),
        _t("eq_k", "out", "cond0", "cond"),
        _t("c_n", "out", "cond0", "then"),
        _t("cond1", "out", "cond0", "else"),
        _t("cond0", "out", "eq_h", "b"),
    )
    spec = PuzzleSpec(
        id="p10",
        title="Compass Override",
        brief=(
            "The decoder now reads colors correctly, but marker two points the "
            "walker off the map edge. Use the numeric override to force north "
            "there."
        ),
        world=world,
        program=Program(nodes, tubes),
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_k",),
        initial_events=(
            WorldEvent(EventKind.ON_ENTER_COLUMN, "r1", column=0, color=Color.GREEN),
        ),
        max_ticks=60,
        win=(WinClause("robot_at", entity="r1", col=3, row=0),),
    )
    solution = (_set("c_k", number(2)),)
    return spec, solution


# ---- p11..p13: blueprints ------------------------------------------------------


def _rover_class(two_params: bool) -> ClassTable:
    params = (("movement_type", TEXT), ("body_type", TEXT)) if two_params else (
        ("movement_type", TEXT),
    )
    return ClassTable(
        {
            "cls_rover": ClassDef(
                id="cls_rover",
                name="Rover",
                fields=(
                    FieldDef("movement_type", TEXT, text("wheels")),
                    FieldDef("body_type", TEXT, text("standard")),
                ),
                constructor_params=params,
            )
        }
    )


def p11():
    cells = {
        (2, 0): Cell(Terrain.LAVA),
        (3, 0): Cell(Terrain.LAVA),
        (4, 0): Cell(Terrain.LAVA),
    }
    world = World(_grid(7, 1, cells), {"r1": Robot("r1", 0, 0, heading=Heading.E)})
    nodes = (
        _n("c_fwd", Constant(text("forward")), 0, 0, locked=True),
        _n("e_bot", EntityNode("r1", "robot"), 1, 0, locked=True),
        _n("c_mvt", Constant(text("wheels")), 0, 2),
        _n(
            "ctor1",
            ConstructorCall("cls_rover", params=(("movement_type", TEXT),)),
            1,
            2,
            locked=True,
        ),
    )
    tubes = (
        _t("c_fwd", "out", "e_bot", "command"),
        _t("c_mvt", "out", "ctor1", "movement_type"),
    )
    spec = PuzzleSpec(
        id="p11",
        title="Lava Field",
        brief=(
            "Wheels melt in lava. Build a rover blueprint that hovers and hand "
            "it to the walker before it marches in."
        ),
        world=world,
        program=Program(nodes, tubes),
        classes=_rover_class(two_params=False),
        allowed_ops=frozenset({"connect", "set_constant"}),
        editable_constants=("c_mvt",),
        max_ticks=20,
        win=(WinClause("robot_at", entity="r1", col=6, row=0),),
    )
    solution = (
        _set("c_mvt", text("hover")),
        _connect("ctor1", "out", "e_bot", "blueprint"),
    )
    return spec, solution


def p12():
    cells = {
        (2, 0): Cell(Terrain.LAVA),
        (5, 0): Cell(Terrain.NARROW),
    }
    world = World(_grid(8, 1, cells), {"r1": Robot("r1", 0, 0, heading=Heading.E)})
    nodes = (
        _n("c_fwd", Constant(text("forward")), 0, 0, locked=True),
        _n("e_bot", EntityNode("r1", "robot"), 1, 0, locked=True),
        _n("c_mvt", Constant(text("wheels")), 0, 2),
        _n("c_body", Constant(text("standard")), 0, 3),
        _n(
            "ctor1",
            ConstructorCall(
                "cls_rover", params=(("movement_type", TEXT), ("body_type", TEXT))
            ),
            1,
            2,
            locked=True,
        ),
    )
    tubes = (
        _t("c_fwd", "out", "e_bot", "command"),
        _t("c_mvt", "out", "ctor1", "movement_type"),
        _t("c_body", "out", "ctor1", "body_type"),
        _t("ctor1", "out", "e_bot", "blueprint"),
    )
    spec = PuzzleSpec(
        id="p12",
        title="Lava and Squeeze",
        brief=(
            "Lava first, then a gap too tight for a standard chassis. Pick the "
            "blueprint parameters that survive both."
        ),
        world=world,
        program=Program(nodes, tubes),
        classes=_rover_class(two_params=True),
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_mvt", "c_body"),
        max_ticks=20,
        win=(WinClause("robot_at", entity="r1", col=7, row=0),),
    )
    solution = (_set("c_mvt", text("hover")), _set("c_body", text("slim")))
    return spec, solution


def p13():
    cells = {
        (3, 0): Cell(Terrain.LAVA),
        (5, 0): Cell(Terrain.NARROW),
        (3, 1): Cell(Terrain.RUBBLE),
        (5, 1): Cell(Terrain.BARRICADE),
        (3, 2): Cell(Terrain.LAVA),
        (5, 2): Cell(Terrain.BARRICADE),
    }
    world = World(
        _grid(8, 3, cells),
        {
            "r1": Robot("r1", 0, 0, heading=Heading.E),
            "r2": Robot("r2", 0, 1, heading=Heading.E),
            "r3": Robot("r3", 0, 2, heading=Heading.E),
        },
    )
    nodes = [_n("c_fwd", Constant(text("forward")), 0, 0, locked=True)]
    tubes = []
    for i, bot in enumerate(("r1", "r2", "r3")):
        nodes.extend(
            (
                _n(f"e_bot{i + 1}", EntityNode(bot, "robot"), 1, i * 2, locked=True),
                _n(f"c_mvt{i + 1}", Constant(text("wheels")), 2, i * 2),
                _n(f"c_body{i + 1}", Constant(text("standard")), 2, i * 2 + 1),
                _n(
                    f"ctor{i + 1}",
                    ConstructorCall(
                        "cls_rover", params=(("movement_type", TEXT), ("body_type", TEXT))
                    ),
                    3,
                    i * 2,
                    locked=True,
                ),
            )
        )
        tubes.extend(
            (
                _t("c_fwd", "out", f"e_bot{i + 1}", "command"),
                _t(f"c_mvt{i + 1}", "out", f"ctor{i + 1}", "movement_type"),
                _t(f"c_body{i + 1}", "out", f"ctor{i + 1}", "body_type"),
                _t(f"ctor{i + 1}", "out", f"e_bot{i + 1}", "blueprint"),
            )
        )
    spec = PuzzleSpec(
        id="p13",
        title="Three Lanes",
        brief=(
            "Three walkers, three obstacle courses: lava then a squeeze, rubble "
            "then a barricade, lava then a barricade. Outfit each one."
        ),
        world=world,
        program=Program(tuple(nodes), tuple(tubes)),
        classes=_rover_class(two_params=True),
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=(
            "c_mvt1", "c_body1", "c_mvt2", "c_body2", "c_mvt3", "c_body3",
        ),
        max_ticks=30,
        win=(
            WinClause("robot_at", entity="r1", col=7, row=0),
            WinClause("robot_at", entity="r2", col=7, row=1),
            WinClause("robot_at", entity="r3", col=7, row=2),
        ),
    )
    solution = (
        _set("c_mvt1", text("hover")),
        _set("c_body1", text("slim")),
        _set("c_mvt2", text("legs")),
        _set("c_body2", text("heavy")),
        _set("c_mvt3", text("hover")),
        _set("c_body3", text("heavy")),
    )
    return spec, solution


# ---- p14..p16: class defaults ---------------------------------------------------


def _beacon_world() -> World:
    return World(_grid(3, 3), {"av1": Avatar("av1", 1, 1)})


def _beacon_classes() -> ClassTable:
    return ClassTable(
        {
            "cls_beacon": ClassDef(
                id="cls_beacon",
                name="Beacon",
                fields=(FieldDef("color", COLOR, color(Color.BLUE)),),
            )
        }
    )


def p14():
    instances = {f"i{k}": Instance(f"i{k}", "cls_beacon") for k in range(1, 6)}
    nodes = (
        _n("c_col", Constant(color(Color.BLUE)), 0, 0),
        _n("cn", ClassNode("cls_beacon", fields=(("color", COLOR),)), 1, 0, locked=True),
    )
    tubes = (_t("c_col", "out", "cn", "color"),)
    spec = PuzzleSpec(
        id="p14",
        title="Beacon Row",
        brief=(
            "Five beacons share one class. Turn them all red with a single "
            "change to the class default."
        ),
        world=_beacon_world(),
        program=Program(nodes, tubes),
        classes=_beacon_classes(),
        instances=instances,
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_col",),
        max_ticks=5,
        win=tuple(
            WinClause("instance_field", instance=f"i{k}", field_name="color",
                      value=color(Color.RED))
            for k in range(1, 6)
        ),
    )
    solution = (_set("c_col", color(Color.RED)),)
    return spec, solution


def p15():
    instances = {f"i{k}": Instance(f"i{k}", "cls_beacon") for k in range(1, 5)}
    instances["i5"] = Instance("i5", "cls_beacon", {"color": color(Color.GREEN)})
    nodes = (
        _n("c_col", Constant(color(Color.BLUE)), 0, 0),
        _n("cn", ClassNode("cls_beacon", fields=(("color", COLOR),)), 1, 0, locked=True),
    )
    tubes = (_t("c_col", "out", "cn", "color"),)
    spec = PuzzleSpec(
        id="p15",
        title="One Holdout",
        brief=(
            "The fifth beacon carries its own green override. Make the other "
            "four red without touching it."
        ),
        world=_beacon_world(),
        program=Program(nodes, tubes),
        classes=_beacon_classes(),
        instances=instances,
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_col",),
        max_ticks=5,
        win=tuple(
            WinClause("instance_field", instance=f"i{k}", field_name="color",
                      value=color(Color.RED))
            for k in range(1, 5)
        )
        + (
            WinClause("instance_field", instance="i5", field_name="color",
                      value=color(Color.GREEN)),
        ),
    )
    solution = (_set("c_col", color(Color.RED)),)
    return spec, solution


def p16():
    classes = ClassTable(
        {
            "cls_lamp": ClassDef(
                id="cls_lamp",
                name="Lamp",
                fields=(FieldDef("color", COLOR, color(Color.BLUE)),),
            ),
            "cls_safety_lamp": ClassDef(
                id="cls_safety_lamp",
                name="SafetyLamp",
                parent="cls_lamp",
            ),
        }
    )
    instances = {
        "i1": Instance("i1", "cls_lamp"),
        "i2": Instance("i2", "cls_lamp"),
        "i3": Instance("i3", "cls_safety_lamp"),
        "i4": Instance("i4", "cls_safety_lamp"),
    }
    nodes = (
        _n("c_b", Constant(color(Color.BLUE)), 0, 0),
        _n("c_r", Constant(color(Color.BLUE)), 0, 1),
        _n("cn_base", ClassNode("cls_lamp", fields=(("color", COLOR),)), 1, 0, locked=True),
        _n(
            "cn_sub",
            ClassNode("cls_safety_lamp", fields=(("color", COLOR),)),
            1,
            1,
            locked=True,
        ),
    )
    tubes = (
        _t("c_b", "out", "cn_base", "color"),
        _t("c_r", "out", "cn_sub", "color"),
    )
    spec = PuzzleSpec(
        id="p16",
        title="Family Colors",
        brief=(
            "Plain lamps should glow green and safety lamps red. The safety "
            "model inherits from the plain one, so give it a default of its "
            "own."
        ),
        world=_beacon_world(),
        program=Program(nodes, tubes),
        classes=classes,
        instances=instances,
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_b", "c_r"),
        max_ticks=5,
        win=(
            WinClause("instance_field", instance="i1", field_name="color",
                      value=color(Color.GREEN)),
            WinClause("instance_field", instance="i2", field_name="color",
                      value=color(Color.GREEN)),
            WinClause("instance_field", instance="i3", field_name="color",
                      value=color(Color.RED)),
            WinClause("instance_field", instance="i4", field_name="color",
                      value=color(Color.RED)),
        ),
    )
    solution = (_set("c_b", color(Color.GREEN)), _set("c_r", color(Color.RED)))
    return spec, solution


# ---- p17: dynamic dispatch -------------------------------------------------------


def p17():
    classes = ClassTable(
        {
            "cls_ann": ClassDef(
                id="cls_ann",
                name="Announcer",
                fields=(FieldDef("phrase", TEXT, text("hello")),),
                methods=(
                    MethodDef("announce", args=(), outs=(("text", TEXT),),
                              impl="announce_plain"),
                ),
            ),
            "cls_loud": ClassDef(
                id="cls_loud",
                name="LoudAnnouncer",
                parent="cls_ann",
                methods=(
                    MethodDef("announce", args=(), outs=(("text", TEXT),),
                              impl="announce_loud"),
                ),
            ),
        }
    )
    instances = {
        "i1": Instance("i1", "cls_ann"),
        "i2": Instance("i2", "cls_loud"),
    }
    world = World(
        _grid(3, 3),
        {
            "con1": PasswordConsole("con1", 1, 1, expected="HELLO!"),
            "av1": Avatar("av1", 0, 1),
        },
    )
    nodes = (
        _n("c_inst", Constant(instance_ref("i1")), 0, 0),
        _n(
            "mc1",
            MethodCall("cls_ann", "announce", args=(), outs=(("text", TEXT),)),
            1,
            0,
            locked=True,
        ),
        _n("e_con", EntityNode("con1", "console"), 2, 0, locked=True),
    )
    tubes = (
        _t("c_inst", "out", "mc1", "target"),
        _t("mc1", "text", "e_con", "entered"),
    )
    spec = PuzzleSpec(
        id="p17",
        title="Say It Loud",
        brief=(
            "The console only accepts a shout. One of the two announcers "
            "overrides the family's announce method; point the call at it."
        ),
        world=world,
        program=Program(nodes, tubes),
        classes=classes,
        instances=instances,
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=("c_inst",),
        max_ticks=5,
        win=(WinClause("entity_prop", entity="con1", prop="unlocked", value=boolean(True)),),
    )
    solution = (_set("c_inst", instance_ref("i2")),)
    return spec, solution


BUILDERS = (
    p01, p02, p03, p04, p05, p06, p07, p08, p09,
    p10, p11, p12, p13, p14, p15, p16, p17,
)


def build_all() -> list[tuple[PuzzleSpec, tuple[Edit, ...]]]:
    return [builder() for builder in BUILDERS]


def write_all(data_dir: Path = None) -> list[Path]:
    d = data_dir if data_dir is not None else Path(__file__).parent / "data"
    (d / "solutions").mkdir(parents=True, exist_ok=True)
    written = []
    for spec, solution in build_all():
        p = d / f"{spec.id}.json"
        p.write_text(canonical_dumps(puzzle_to_doc(spec)))
        s = d / "solutions" / f"{spec.id}.json"
        s.write_text(canonical_dumps(edits_to_doc(solution)))
        written.extend([p, s])
    return written


if __name__ == "__main__":
    for path in write_all():
        print(path)
