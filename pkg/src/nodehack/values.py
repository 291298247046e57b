"""Runtime values and the strict type lattice.

Every port declares exactly one concrete type (or the Any wildcard, which only
designer-declared generic ports such as conditional branches use). Boolean and
Number are distinct and never implicitly interconvertible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union


class DataType(str, Enum):
    BOOLEAN = "boolean"
    NUMBER = "number"
    TEXT = "text"
    COLOR = "color"
    ENTITY_REF = "entity_ref"
    INSTANCE_REF = "instance_ref"
    CLASS_REF = "class_ref"
    PULSE = "pulse"


#: Wildcard accepted on designer-declared generic ports; never the type of a value.
ANY = "any"

PortType = Union[DataType, str]


class Color(str, Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    YELLOW = "yellow"


@dataclass(frozen=True)
class Value:
    """A tagged runtime value. Numbers are always finite; the constructor
    rejects NaN/Inf so a non-finite number can never be stored."""

    type: DataType
    value: object

    def __post_init__(self) -> None:
        t, v = self.type, self.value
        if t is DataType.BOOLEAN:
            ok = isinstance(v, bool)
        elif t is DataType.NUMBER:
            ok = isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
            if ok:
                object.__setattr__(self, "value", float(v))
        elif t is DataType.TEXT:
            ok = isinstance(v, str)
        elif t is DataType.COLOR:
            if isinstance(v, str) and not isinstance(v, Color):
                v = Color(v)
                object.__setattr__(self, "value", v)
            ok = isinstance(v, Color)
        elif t in (DataType.ENTITY_REF, DataType.INSTANCE_REF, DataType.CLASS_REF):
            ok = isinstance(v, str) and bool(v)
        elif t is DataType.PULSE:
            ok = v is None
        else:  # pragma: no cover - closed enumeration
            ok = False
        if not ok:
            raise ValueError(f"invalid payload {v!r} for {t.value} value")


PULSE = Value(DataType.PULSE, None)


def boolean(v: bool) -> Value:
    return Value(DataType.BOOLEAN, v)


def number(v: float) -> Value:
    return Value(DataType.NUMBER, v)


def text(v: str) -> Value:
    return Value(DataType.TEXT, v)


def color(v: "Color | str") -> Value:
    return Value(DataType.COLOR, v)


def entity_ref(entity_id: str) -> Value:
    return Value(DataType.ENTITY_REF, entity_id)


def instance_ref(instance_id: str) -> Value:
    return Value(DataType.INSTANCE_REF, instance_id)


def class_ref(class_id: str) -> Value:
    return Value(DataType.CLASS_REF, class_id)


def type_of(v: Value) -> DataType:
    return v.type


def value_to_doc(v: Value) -> dict:
    """JSON-document form: {"type": ..., "value": ...}."""
    payload = v.value
    if v.type is DataType.COLOR:
        payload = v.value.value
    return {"type": v.type.value, "value": payload}


def value_from_doc(doc: object) -> Value:
    if not isinstance(doc, dict) or set(doc) != {"type", "value"}:
        raise ValueError(f"malformed value document: {doc!r}")
    try:
        dtype = DataType(doc["type"])
    except ValueError:
        raise ValueError(f"unknown value type {doc['type']!r}") from None
    return Value(dtype, doc["value"])
