"""Built-in extension functions and native method bodies.

The engine registry ships the handful of natives the bundled puzzles rely on.
Embedders can extend it: once a function is registered, a call node can
invoke it without the program ever seeing the body.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .classes import FunctionDef, FunctionRegistry, NativeMethod
from .values import DataType, Value, text


def _format_digit(v: Value) -> str:
    n = v.value
    if float(n).is_integer():
        return str(int(n))
    return repr(float(n))


def _digits_to_text(args: Mapping[str, Value]) -> Mapping[str, Value]:
    joined = "".join(_format_digit(args[k]) for k in ("a", "b", "c", "d"))
    return {"text": text(joined)}


def _number_to_text(args: Mapping[str, Value]) -> Mapping[str, Value]:
    return {"text": text(_format_digit(args["n"]))}


def _announce_plain(read: Callable[[str], Value], args: Mapping[str, Value]) -> Mapping[str, Value]:
    return {"text": text(read("phrase").value)}


def _announce_loud(read: Callable[[str], Value], args: Mapping[str, Value]) -> Mapping[str, Value]:
    return {"text": text(read("phrase").value.upper() + "!")}


def builtin_registry() -> FunctionRegistry:
    num = DataType.NUMBER
    functions = {
        "digits_to_text": FunctionDef(
            "digits_to_text",
            ins=(("a", num), ("b", num), ("c", num), ("d", num)),
            outs=(("text", DataType.TEXT),),
            fn=_digits_to_text,
        ),
        "number_to_text": FunctionDef(
            "number_to_text",
            ins=(("n", num),),
            outs=(("text", DataType.TEXT),),
            fn=_number_to_text,
        ),
    }
    method_impls: dict[str, NativeMethod] = {
        "announce_plain": _announce_plain,
        "announce_loud": _announce_loud,
    }
    return FunctionRegistry(functions, method_impls)
