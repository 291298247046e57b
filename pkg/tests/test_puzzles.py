from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from nodehack import (
    Avatar,
    Cell,
    ClassTable,
    Color,
    ColumnMarker,
    Constant,
    Cube,
    Grid,
    Robot,
    World,
    boolean,
    number,
    text,
    validate_program,
    validate_world,
)
from nodehack.graph import GraphError, iter_kinds
from nodehack.puzzles import (
    Edit,
    ForbiddenEdit,
    WinClause,
    apply_edit,
    apply_edits,
    check_win,
    edits_from_doc,
    edits_to_doc,
    list_puzzles,
    load_edits,
    load_puzzle,
    load_solution,
    puzzle_dir,
    puzzle_from_doc,
    puzzle_to_doc,
    run_session,
)
from nodehack.puzzles.content import BUILDERS, build_all
from nodehack.serialize import canonical_dumps, loads

ALL_IDS = [f"p{n:02d}" for n in range(1, 18)]


def test_seventeen_puzzles_ship():
    assert list_puzzles() == ALL_IDS


@pytest.mark.parametrize("puzzle_id", ALL_IDS)
def test_puzzle_loads_and_validates(puzzle_id):
    spec = load_puzzle(puzzle_id)
    assert spec.id == puzzle_id
    assert spec.title and spec.brief
    assert spec.win, "every puzzle needs a win condition"
    assert spec.max_ticks >= 1
    validate_program(spec.program)
    validate_world(spec.world)


@pytest.mark.parametrize("puzzle_id", ALL_IDS)
def test_puzzle_doc_roundtrip(puzzle_id):
    spec = load_puzzle(puzzle_id)
    doc = puzzle_to_doc(spec)
    assert puzzle_from_doc(doc) == spec
    assert canonical_dumps(puzzle_to_doc(puzzle_from_doc(doc))) == canonical_dumps(doc)


def test_shipped_files_match_builders_exactly():
    # Drift guard: the generator and the shipped bytes must agree.
    built = {spec.id: (spec, solution) for spec, solution in build_all()}
    for puzzle_id in ALL_IDS:
        spec, solution = built[puzzle_id]
        shipped = (puzzle_dir() / f"{puzzle_id}.json").read_text()
        assert canonical_dumps(puzzle_to_doc(spec)) == shipped, puzzle_id
        shipped_solution = (puzzle_dir() / "solutions" / f"{puzzle_id}.json").read_text()
        assert canonical_dumps(edits_to_doc(solution)) == shipped_solution, puzzle_id


def test_builder_count_matches_catalog():
    assert len(BUILDERS) == 17


@pytest.mark.parametrize("puzzle_id", ALL_IDS)
def test_unedited_puzzle_is_not_solved(puzzle_id):
    spec = load_puzzle(puzzle_id)
    outcome = run_session(spec)
    assert outcome.status in ("unsolved", "failed")


@pytest.mark.parametrize("puzzle_id", ALL_IDS)
def test_unedited_puzzle_has_no_error_diagnostics_at_start(puzzle_id):
    spec = load_puzzle(puzzle_id)
    outcome = run_session(spec, max_ticks=1)
    assert outcome.status != "error"


@pytest.mark.parametrize("puzzle_id", ALL_IDS)
def test_bundled_solution_solves(puzzle_id):
    spec = load_puzzle(puzzle_id)
    outcome = run_session(spec, load_solution(puzzle_id))
    assert outcome.status == "solved", puzzle_id
    assert outcome.solved_at_tick is not None
    assert outcome.solved_at_tick < spec.max_ticks


@pytest.mark.parametrize("puzzle_id", ALL_IDS)
def test_solutions_respect_the_edit_rules(puzzle_id):
    # apply_edits raises if a solution script steps outside allowed_ops or
    # touches a constant the puzzle keeps locked.
    spec = load_puzzle(puzzle_id)
    apply_edits(spec, spec.program, load_solution(puzzle_id))


def test_curriculum_introduces_at_most_two_kinds_per_puzzle():
    seen: set[str] = set()
    for puzzle_id in ALL_IDS:
        spec = load_puzzle(puzzle_id)
        kinds = set(iter_kinds(spec.program))
        new = kinds - seen
        assert len(new) <= 2, (puzzle_id, sorted(new))
        seen |= kinds


def test_run_session_trace_is_reproducible():
    spec = load_puzzle("p09")
    solution = load_solution("p09")
    a = run_session(spec, solution, record_trace=True)
    b = run_session(spec, solution, record_trace=True)
    assert canonical_dumps(a.trace_doc("p09")) == canonical_dumps(b.trace_doc("p09"))


def test_trace_doc_shape():
    outcome = run_session(load_puzzle("p01"), load_solution("p01"), record_trace=True)
    doc = outcome.trace_doc("p01")
    assert doc["puzzle"] == "p01"
    assert doc["status"] == "solved"
    assert doc["ticks"], "trace must contain tick records"
    record = doc["ticks"][0]
    assert set(record) == {
        "tick", "outputs", "diagnostics", "actions", "class_writes", "fired_events",
    }


# ---- edit rule enforcement ---------------------------------------------------


def test_forbidden_op_rejected():
    spec = load_puzzle("p01")  # allows connect only
    with pytest.raises(ForbiddenEdit):
        apply_edit(spec, spec.program, Edit("disconnect", to_end=("e_door", "open")))


def test_locked_constant_rejected_even_when_listed_editable():
    from nodehack import Program, add_node, make_node
    from nodehack.puzzles import PuzzleSpec

    program = add_node(Program(), make_node("c", Constant(number(1)), locked=True))
    spec = PuzzleSpec(
        id="t", title="t", brief="t",
        world=World(Grid(1, 1)), program=program,
        classes=ClassTable(), instances={},
        allowed_ops=frozenset({"set_constant"}),
        editable_constants=frozenset({"c"}),
        initial_events=(), max_ticks=1,
        win=(WinClause(kind="robot_at", entity="r", col=0, row=0),),
    )
    with pytest.raises(ForbiddenEdit):
        apply_edit(spec, spec.program, Edit("set_constant", node="c", value=number(2)))


def test_uneditable_constant_rejected():
    spec = load_puzzle("p08")
    with pytest.raises(ForbiddenEdit):
        apply_edit(spec, spec.program, Edit("set_constant", node="c_drop", value=text("x")))


def test_editable_constant_accepted():
    spec = load_puzzle("p08")
    program = apply_edit(
        spec, spec.program, Edit("set_constant", node="c_target", value=number(2))
    )
    assert program.node("c_target").kind.value == number(2)


def test_edits_doc_roundtrip():
    edits = load_solution("p09")
    doc = edits_to_doc(edits)
    assert edits_from_doc(doc) == edits


def test_load_edits_rejects_malformed_scripts(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version":1,"edits":[{"op":"repaint"}]}')
    with pytest.raises(Exception):
        load_edits(bad)


def test_random_edit_scripts_never_crash_the_runner():
    # Corrupted scripts must either be rejected loudly at apply time or run
    # to a normal outcome; nothing may escape as a stray exception.
    rng = random.Random(31)
    node_pool = ["c_true", "e_door", "not1", "ghost", "c_target", "or1"]
    port_pool = ["out", "in", "open", "a", "b", "ghost"]
    value_pool = [boolean(True), number(3), text("hover"), number(-1)]
    ops = ["connect", "disconnect", "set_constant"]
    for _ in range(300):
        puzzle_id = rng.choice(ALL_IDS)
        spec = load_puzzle(puzzle_id)
        edits = []
        for _ in range(rng.randint(1, 4)):
            op = rng.choice(ops)
            if op == "connect":
                edits.append(
                    Edit(
                        "connect",
                        from_end=(rng.choice(node_pool), rng.choice(port_pool)),
                        to_end=(rng.choice(node_pool), rng.choice(port_pool)),
                    )
                )
            elif op == "disconnect":
                edits.append(
                    Edit("disconnect", to_end=(rng.choice(node_pool), rng.choice(port_pool)))
                )
            else:
                edits.append(
                    Edit(
                        "set_constant",
                        node=rng.choice(node_pool),
                        value=rng.choice(value_pool),
                    )
                )
        try:
            outcome = run_session(spec, edits, max_ticks=5)
        except (ForbiddenEdit, GraphError):
            continue
        assert outcome.status in ("solved", "unsolved", "failed", "error")


# ---- win clauses --------------------------------------------------------------


def test_entity_prop_clause_uses_tolerance():
    world = World(Grid(1, 1), {"el": __import__("nodehack").Elevator("el", 0, 0, height=4.0000000001)})
    clause = WinClause(kind="entity_prop", entity="el", prop="height", value=number(4))
    assert check_win(_spec_with(clause, world), world, ClassTable(), {})
    far = World(Grid(1, 1), {"el": __import__("nodehack").Elevator("el", 0, 0, height=4.1)})
    assert not check_win(_spec_with(clause, far), far, ClassTable(), {})


def _spec_with(clause, world):
    from nodehack.puzzles import PuzzleSpec
    from nodehack import Program

    return PuzzleSpec(
        id="t", title="t", brief="t", world=world, program=Program(),
        classes=ClassTable(), instances={}, allowed_ops=frozenset(),
        editable_constants=frozenset(), initial_events=(), max_ticks=1,
        win=(clause,),
    )


def test_robot_at_clause_requires_life():
    clause = WinClause(kind="robot_at", entity="r1", col=1, row=0)
    alive = World(Grid(2, 1), {"r1": Robot("r1", 1, 0)})
    dead = World(Grid(2, 1), {"r1": Robot("r1", 1, 0, alive=False)})
    assert check_win(_spec_with(clause, alive), alive, ClassTable(), {})
    assert not check_win(_spec_with(clause, dead), dead, ClassTable(), {})


def test_cube_marker_clauses():
    grid = Grid(
        3, 1,
        {
            (0, 0): Cell(marker=ColumnMarker(0, Color.RED)),
            (1, 0): Cell(marker=ColumnMarker(1, Color.RED)),
        },
    )
    on_target = World(grid, {"c1": Cube("c1", 1, 0)})
    off_target = World(grid, {"c1": Cube("c1", 0, 0)})
    on_clause = WinClause(kind="cube_on_marker", number=1)
    none_clause = WinClause(kind="no_cubes_on_other_markers", number=1)
    assert check_win(_spec_with(on_clause, on_target), on_target, ClassTable(), {})
    assert not check_win(_spec_with(on_clause, off_target), off_target, ClassTable(), {})
    assert check_win(_spec_with(none_clause, on_target), on_target, ClassTable(), {})
    assert not check_win(_spec_with(none_clause, off_target), off_target, ClassTable(), {})


def test_avatar_riding_clause():
    clause = WinClause(kind="avatar_riding", avatar="av", elevator="el")
    riding = World(Grid(1, 1), {"av": Avatar("av", 0, 0, riding="el")})
    walking = World(Grid(1, 1), {"av": Avatar("av", 0, 0)})
    assert check_win(_spec_with(clause, riding), riding, ClassTable(), {})
    assert not check_win(_spec_with(clause, walking), walking, ClassTable(), {})


def test_shipped_data_parses_as_strict_json():
    for puzzle_id in ALL_IDS:
        raw = (puzzle_dir() / f"{puzzle_id}.json").read_text()
        doc = loads(raw)
        assert json.dumps(doc)  # parse as plain JSON too
