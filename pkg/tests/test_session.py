from __future__ import annotations

import pytest

from nodehack.serialize import ParseError
from nodehack.session import Session, SessionManager, SessionMessage, message_from_doc


def send(session, kind, payload=None, mid="m"):
    return session.handle(SessionMessage(mid, kind, payload or {}))


def ok(response):
    assert response["status"] == "ok", response
    return response["payload"]


def err(response):
    assert response["status"] == "error", response
    return response["error"]


def loaded(puzzle_id="p01"):
    session = Session()
    ok(send(session, "load_puzzle", {"puzzle_id": puzzle_id}))
    return session


def test_message_from_doc_validates_envelope():
    msg = message_from_doc({"id": "7", "type": "tick"})
    assert msg.payload == {}
    with pytest.raises(ParseError):
        message_from_doc({"type": "tick"})
    with pytest.raises(ParseError):
        message_from_doc({"id": "7", "type": "tick", "payload": []})
    with pytest.raises(ParseError):
        message_from_doc({"id": "7", "type": "tick", "junk": 1})


def test_response_echoes_id_and_type():
    session = Session()
    response = send(session, "list_puzzles", mid="q42")
    assert response["id"] == "q42"
    assert response["type"] == "list_puzzles"


def test_list_puzzles_names_all_seventeen():
    payload = ok(send(Session(), "list_puzzles"))
    assert [p["id"] for p in payload["puzzles"]] == [f"p{n:02d}" for n in range(1, 18)]
    assert all(p["title"] for p in payload["puzzles"])


def test_messages_before_load_are_rejected():
    session = Session()
    for kind in ("get_state", "tick", "run_until", "reset", "save_state"):
        assert err(send(session, kind))["code"] == "NoPuzzleLoaded"


def test_load_puzzle_returns_full_setup():
    payload = ok(send(Session(), "load_puzzle", {"puzzle_id": "p08"}))
    assert payload["puzzle_id"] == "p08"
    assert payload["allowed_edits"]["ops"] == ["set_constant"]
    assert payload["allowed_edits"]["editable_constants"] == ["c_target"]
    assert payload["program"]["nodes"]
    assert payload["world"]["entities"]


def test_unknown_puzzle_gets_its_own_code():
    assert err(send(Session(), "load_puzzle", {"puzzle_id": "p99"}))["code"] == "NoSuchPuzzle"


def test_get_state_includes_preview_eval():
    session = loaded("p01")
    payload = ok(send(session, "get_state"))
    assert payload["tick"] == 0
    assert payload["solved"] is False
    assert "outputs" in payload["eval"]
    assert "tube_states" in payload["eval"]


def test_preview_does_not_advance_time():
    session = loaded("p01")
    ok(send(session, "get_state"))
    ok(send(session, "get_state"))
    assert ok(send(session, "get_state"))["tick"] == 0


def test_apply_edit_and_tick_to_victory():
    session = loaded("p01")
    ok(
        send(
            session,
            "apply_edit",
            {"edit": {"op": "connect", "from": ["c_true", "out"], "to": ["e_door", "open"]}},
        )
    )
    payload = ok(send(session, "tick"))
    assert payload["tick"] == 1
    assert payload["solved"] is True


def test_forbidden_edit_maps_to_error_response():
    session = loaded("p01")
    error = err(
        send(session, "apply_edit", {"edit": {"op": "disconnect", "to": ["e_door", "open"]}})
    )
    assert error["code"] == "ForbiddenEdit"


def test_graph_errors_carry_their_code():
    session = loaded("p01")
    error = err(
        send(
            session,
            "apply_edit",
            {"edit": {"op": "connect", "from": ["ghost", "out"], "to": ["e_door", "open"]}},
        )
    )
    assert error["code"] == "UnknownEndpoint"


def test_malformed_edit_payload_is_a_schema_error():
    session = loaded("p01")
    error = err(send(session, "apply_edit", {"edit": {"op": "connect"}}))
    assert error["code"] == "SchemaError"


def test_run_until_solves_with_budget():
    session = loaded("p02")
    ok(
        send(
            session,
            "apply_edit",
            {"edit": {"op": "set_constant", "node": "c_h", "value": {"type": "number", "value": 4}}},
        )
    )
    ok(
        send(
            session,
            "apply_edit",
            {"edit": {"op": "connect", "from": ["c_h", "out"], "to": ["e_elev", "target"]}},
        )
    )
    payload = ok(send(session, "run_until", {"max_ticks": 20}))
    assert payload["status"] == "solved"
    assert payload["solved_at_tick"] is not None


def test_run_until_reports_failure_when_a_robot_dies():
    session = loaded("p11")
    payload = ok(send(session, "run_until", {}))
    assert payload["status"] == "failed"


def test_reset_restores_world_but_keeps_edits():
    session = loaded("p01")
    ok(
        send(
            session,
            "apply_edit",
            {"edit": {"op": "connect", "from": ["c_true", "out"], "to": ["e_door", "open"]}},
        )
    )
    ok(send(session, "tick"))
    assert ok(send(session, "get_state"))["solved"] is True
    ok(send(session, "reset"))
    state = ok(send(session, "get_state"))
    assert state["tick"] == 0
    assert state["solved"] is False
    tube_ends = [
        (t["from_node"], t["to_node"]) for t in state["program"]["tubes"]
    ]
    assert ("c_true", "e_door") in tube_ends


def test_inspect_node_reports_value_and_errors():
    session = loaded("p01")
    payload = ok(send(session, "inspect_node", {"node": "c_true"}))
    assert payload["value"] == {"type": "boolean", "value": True}
    assert payload["diagnostic"] is None
    error = err(send(session, "inspect_node", {"node": "ghost"}))
    assert error["code"] == "UnknownEndpoint"


def test_save_and_load_state_round_trip():
    session = loaded("p02")
    ok(
        send(
            session,
            "apply_edit",
            {"edit": {"op": "set_constant", "node": "c_h", "value": {"type": "number", "value": 4}}},
        )
    )
    ok(
        send(
            session,
            "apply_edit",
            {"edit": {"op": "connect", "from": ["c_h", "out"], "to": ["e_elev", "target"]}},
        )
    )
    ok(send(session, "tick"))
    ok(send(session, "tick"))
    state = ok(send(session, "save_state"))["state"]

    other = Session()
    payload = ok(send(other, "load_state", {"state": state}))
    assert payload["puzzle_id"] == "p02"
    assert payload["tick"] == 2
    # Both sessions proceed identically from the restored point.
    first = ok(send(session, "run_until", {"max_ticks": 10}))
    second = ok(send(other, "run_until", {"max_ticks": 10}))
    assert first == second


def test_load_state_rejects_wrong_version():
    session = loaded("p01")
    state = ok(send(session, "save_state"))["state"]
    state["format_version"] = 99
    error = err(send(Session(), "load_state", {"state": state}))
    assert error["code"] == "SchemaError"


def test_unknown_message_type():
    assert err(send(Session(), "frobnicate"))["code"] == "UnknownMessageType"


def test_unexpected_payload_fields_rejected():
    error = err(send(Session(), "list_puzzles", {"extra": 1}))
    assert error["code"] == "SchemaError"


def test_session_manager_lifecycle():
    manager = SessionManager()
    sid1 = manager.create()
    sid2 = manager.create()
    assert sid1 != sid2
    assert manager.ids() == sorted([sid1, sid2])
    assert manager.get(sid1) is not manager.get(sid2)
    assert manager.close(sid1) is True
    assert manager.close(sid1) is False
    with pytest.raises(Exception):
        manager.get(sid1)
