"""Class definitions, instances, and method resolution.

Defaults live on classes and constructor arguments become local overrides, so
editing a class default instantly changes every instance that has not set its
own value. Method bodies are engine-native implementations registered by id;
programs only ever see their typed inputs and outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Sequence

from .values import DataType, Value


class ClassError(Exception):
    code = "ClassError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DuplicateClass(ClassError):
    code = "DuplicateClass"


class UnknownParent(ClassError):
    code = "UnknownParent"


class InheritanceCycle(ClassError):
    code = "InheritanceCycle"


class UnknownClass(ClassError):
    code = "UnknownClass"


class UnknownMethod(ClassError):
    code = "UnknownMethod"


class UnknownField(ClassError):
    code = "UnknownField"


class UnknownInstance(ClassError):
    code = "UnknownInstance"


class ConstructorArityMismatch(ClassError):
    code = "ConstructorArityMismatch"


class InvalidInputType(ClassError):
    code = "InvalidInputType"


@dataclass(frozen=True)
class FieldDef:
    name: str
    dtype: DataType
    default: Value


@dataclass(frozen=True)
class MethodDef:
    name: str
    args: tuple[tuple[str, DataType], ...]
    outs: tuple[tuple[str, DataType], ...]
    impl: str  # native implementation id; the body is opaque to programs


@dataclass(frozen=True)
class ClassDef:
    id: str
    name: str
    parent: Optional[str] = None
    fields: tuple[FieldDef, ...] = ()
    constructor_params: tuple[tuple[str, DataType], ...] = ()
    methods: tuple[MethodDef, ...] = ()


@dataclass(frozen=True)
class Instance:
    id: str
    class_id: str
    local_fields: Mapping[str, Value] = field(default_factory=dict)
    bound_entity: Optional[str] = None


@dataclass(frozen=True)
class ClassTable:
    classes: Mapping[str, ClassDef] = field(default_factory=dict)

    def get(self, class_id: str) -> ClassDef:
        cd = self.classes.get(class_id)
        if cd is None:
            raise UnknownClass(f"no class {class_id!r}")
        return cd

    def chain(self, class_id: str) -> list[ClassDef]:
        """Classes from `class_id` up to the root."""
        out = []
        cur: Optional[str] = class_id
        while cur is not None:
            cd = self.get(cur)
            out.append(cd)
            cur = cd.parent
        return out

    def is_subclass(self, class_id: str, ancestor: str) -> bool:
        return any(cd.id == ancestor for cd in self.chain(class_id))


def define_class(table: ClassTable, classdef: ClassDef) -> ClassTable:
    if classdef.id in table.classes:
        raise DuplicateClass(f"class {classdef.id!r} already defined")
    if classdef.parent == classdef.id:
        raise InheritanceCycle(f"class {classdef.id!r} cannot extend itself")
    if classdef.parent is not None and classdef.parent not in table.classes:
        raise UnknownParent(f"parent {classdef.parent!r} not defined")
    # Parents must already exist, so the inheritance graph stays a tree; the
    # walk below guards against corrupted tables all the same.
    seen = {classdef.id}
    cur = classdef.parent
    while cur is not None:
        if cur in seen:
            raise InheritanceCycle(f"class {classdef.id!r} closes an inheritance cycle")
        seen.add(cur)
        cur = table.classes[cur].parent
    _validate_constructor(table, classdef)
    return ClassTable({**table.classes, classdef.id: classdef})


def _validate_constructor(table: ClassTable, classdef: ClassDef) -> None:
    chain_fields = {f.name: f.dtype for f in classdef.fields}
    cur = classdef.parent
    while cur is not None:
        cd = table.classes[cur]
        for f in cd.fields:
            chain_fields.setdefault(f.name, f.dtype)
        cur = cd.parent
    for name, dtype in classdef.constructor_params:
        if name not in chain_fields:
            raise UnknownField(
                f"constructor param {name!r} has no matching field on {classdef.id!r}"
            )
        if chain_fields[name] is not dtype:
            raise InvalidInputType(
                f"constructor param {name!r} type differs from field type"
            )


def field_names(table: ClassTable, class_id: str) -> list[str]:
    """Union of field names along the chain, nearest definition first."""
    names: list[str] = []
    for cd in table.chain(class_id):
        for f in cd.fields:
            if f.name not in names:
                names.append(f.name)
    return names


def field_def(table: ClassTable, class_id: str, name: str) -> FieldDef:
    for cd in table.chain(class_id):
        for f in cd.fields:
            if f.name == name:
                return f
    raise UnknownField(f"class {class_id!r} has no field {name!r}")


def default_value(table: ClassTable, class_id: str, name: str) -> Value:
    """The nearest ancestor default for a field, starting at class_id."""
    return field_def(table, class_id, name).default


def read_field(table: ClassTable, instance: Instance, name: str) -> Value:
    if name in instance.local_fields:
        return instance.local_fields[name]
    return default_value(table, instance.class_id, name)


def instantiate(
    table: ClassTable,
    class_id: str,
    args: Sequence[Value],
    instance_id: str,
    bound_entity: Optional[str] = None,
) -> Instance:
    """Create an instance whose constructor arguments become local overrides.

    Callers supply the instance id; sessions allocate sequential ids while
    constructor nodes derive a stable id from the node so re-evaluation is
    idempotent.
    """
    cd = table.get(class_id)
    params = cd.constructor_params
    if len(args) != len(params):
        raise ConstructorArityMismatch(
            f"{class_id!r} takes {len(params)} constructor args, got {len(args)}"
        )
    local: dict[str, Value] = {}
    for (name, dtype), value in zip(params, args):
        if value.type is not dtype:
            raise InvalidInputType(
                f"constructor param {name!r} expects {dtype.value}, got {value.type.value}"
            )
        local[name] = value
    return Instance(instance_id, class_id, local, bound_entity)


def resolve_method(table: ClassTable, class_id: str, name: str) -> MethodDef:
    """The method defined lowest in the chain at or above class_id."""
    for cd in table.chain(class_id):
        for m in cd.methods:
            if m.name == name:
                return m
    raise UnknownMethod(f"no method {name!r} on class {class_id!r}")


def set_class_default(
    table: ClassTable, class_id: str, name: str, value: Value
) -> ClassTable:
    """Update (or introduce) a field default at class_id. Every instance of
    that class or its subclasses without a local override observes the new
    value; a subclass carrying its own default for the field shadows it."""
    fd = field_def(table, class_id, name)
    if value.type is not fd.dtype:
        raise InvalidInputType(
            f"field {name!r} expects {fd.dtype.value}, got {value.type.value}"
        )
    cd = table.get(class_id)
    own = {f.name: f for f in cd.fields}
    own[name] = FieldDef(name, fd.dtype, value)
    ordered = tuple(
        own[f.name] if f.name in own else f for f in cd.fields
    )
    if name not in {f.name for f in cd.fields}:
        ordered = ordered + (own[name],)
    updated = replace(cd, fields=ordered)
    return ClassTable({**table.classes, class_id: updated})


# --- native implementations -------------------------------------------------

# A native function maps named argument values to named output values.
NativeFn = Callable[[Mapping[str, Value]], Mapping[str, Value]]
# A native method additionally receives a field reader for the target instance.
NativeMethod = Callable[[Callable[[str], Value], Mapping[str, Value]], Mapping[str, Value]]


@dataclass(frozen=True)
class FunctionDef:
    id: str
    ins: tuple[tuple[str, DataType], ...]
    outs: tuple[tuple[str, DataType], ...]
    fn: NativeFn


@dataclass(frozen=True)
class FunctionRegistry:
    """Extension functions callable from programs plus the native bodies that
    back class methods. Signatures are fully typed; bodies are never exposed."""

    functions: Mapping[str, FunctionDef] = field(default_factory=dict)
    method_impls: Mapping[str, NativeMethod] = field(default_factory=dict)

    def function(self, function_id: str) -> Optional[FunctionDef]:
        return self.functions.get(function_id)

    def method_impl(self, impl_id: str) -> Optional[NativeMethod]:
        return self.method_impls.get(impl_id)
