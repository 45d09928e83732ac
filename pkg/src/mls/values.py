"""Runtime values for MLS.

Every datum the interpreter touches is a Value: a kind tag, a
kind-specific payload, and an ordered attribute map.  Vectors are the
basic data (a scalar is just a length-1 vector).  Environments and
reference-class instances are the only kinds with aliasing identity;
everything else behaves as if assignment copied it.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Any, Optional

# Value kinds.
NULL = "null"
LOGICAL = "logical"
INTEGER = "integer"
DOUBLE = "double"
STRING = "string"
LIST = "list"
CLOSURE = "closure"
BUILTIN = "builtin"
EXPRESSION = "expression"
ENVIRONMENT = "environment"
S4_INSTANCE = "s4instance"
REF_INSTANCE = "refinstance"

VECTOR_KINDS = (LOGICAL, INTEGER, DOUBLE, STRING)

# Kinds whose payload is shared, never duplicated: copying the Value
# copies the reference.
REFERENCE_KINDS = (ENVIRONMENT, REF_INSTANCE)

_BASE_CLASS_NAMES = {
    NULL: "NULL",
    LOGICAL: "logical",
    INTEGER: "integer",
    DOUBLE: "numeric",
    STRING: "character",
    LIST: "list",
    CLOSURE: "function",
    BUILTIN: "function",
    EXPRESSION: "expression",
    ENVIRONMENT: "environment",
}


class MlsError(Exception):
    """A runtime or analysis error surfaced to MLS programs."""

    def __init__(self, message: str, loc=None):
        super().__init__(message)
        self.message = message
        self.loc = loc

    def __str__(self):
        if self.loc is not None:
            return f"{self.message} (line {self.loc[0]}, column {self.loc[1]})"
        return self.message


@dataclass
class Value:
    kind: str
    payload: Any = None
    attributes: dict = field(default_factory=dict)

    def __repr__(self):  # debugging aid only; user printing lives in printer
        return f"Value({self.kind}, {self.payload!r})"


@dataclass
class Closure:
    """A function literal plus the environment it was evaluated in."""

    formals: list  # list of (name, default Expression or None)
    body: Any  # Expression
    enclosure: Any  # Environment

    @property
    def formal_names(self):
        return [name for name, _ in self.formals]


@dataclass
class S4Payload:
    class_name: str
    slot_values: dict  # name -> Value


def null_value() -> Value:
    return Value(NULL)


def logical_vec(items) -> Value:
    return Value(LOGICAL, [bool(x) for x in items])


def int_vec(items) -> Value:
    return Value(INTEGER, [int(x) for x in items])


def double_vec(items) -> Value:
    return Value(DOUBLE, [float(x) for x in items])


def string_vec(items) -> Value:
    return Value(STRING, [str(x) for x in items])


def list_value(items, names=None) -> Value:
    v = Value(LIST, list(items))
    if names is not None:
        v.attributes["names"] = string_vec(names)
    return v


def scalar_bool(x: bool) -> Value:
    return Value(LOGICAL, [bool(x)])


def scalar_int(x: int) -> Value:
    return Value(INTEGER, [int(x)])


def scalar_double(x: float) -> Value:
    return Value(DOUBLE, [float(x)])


def scalar_string(x: str) -> Value:
    return Value(STRING, [str(x)])


def is_null(v: Value) -> bool:
    return v.kind == NULL


def is_function(v: Value) -> bool:
    return v.kind in (CLOSURE, BUILTIN)


def implicit_class(v: Value) -> Value:
    """The class vector used for dispatch: the `class` attribute when
    present, otherwise a synthesized one-element vector naming the base
    kind."""
    cls = v.attributes.get("class")
    if cls is not None and cls.kind == STRING and len(cls.payload) > 0:
        return cls
    if v.kind == S4_INSTANCE:
        return string_vec([v.payload.class_name])
    if v.kind == REF_INSTANCE:
        return string_vec([v.payload.class_name])
    return string_vec([_BASE_CLASS_NAMES[v.kind]])


def get_attribute(v: Value, name: str) -> Value:
    attr = v.attributes.get(name)
    return attr if attr is not None else null_value()


def set_attribute(v: Value, name: str, attr: Value) -> Value:
    """Return a value identical to v except for the named attribute.

    Setting an attribute to NULL removes it.  The `class` attribute must
    be a nonempty string vector; `names` on a vector or list must be a
    string vector matching the element count.
    """
    if name == "class" and not is_null(attr):
        if attr.kind != STRING or len(attr.payload) == 0:
            raise MlsError("invalid class attribute")
    if name == "names" and not is_null(attr) and v.kind in VECTOR_KINDS + (LIST,):
        if attr.kind != STRING:
            raise MlsError("invalid names attribute: not a character vector")
        if len(attr.payload) != len(v.payload):
            raise MlsError(
                f"names attribute length {len(attr.payload)} differs from "
                f"element count {len(v.payload)}"
            )
    out = Value(v.kind, _copy_payload(v), dict(v.attributes))
    if is_null(attr):
        out.attributes.pop(name, None)
    else:
        out.attributes[name] = attr
    return out


def _copy_payload(v: Value):
    if v.kind in VECTOR_KINDS:
        return list(v.payload)
    if v.kind == LIST:
        return [deep_copy(item) for item in v.payload]
    if v.kind == S4_INSTANCE:
        return S4Payload(
            v.payload.class_name,
            {k: deep_copy(sv) for k, sv in v.payload.slot_values.items()},
        )
    # closures, builtins, expressions are immutable; environments and
    # ref instances keep their aliasing identity
    return v.payload


def deep_copy(v: Value) -> Value:
    """Structural copy with independent mutable state.

    Environment and reference-class payloads are not duplicated: the
    reference itself is copied, so aliasing is preserved.
    """
    return Value(v.kind, _copy_payload(v), {k: deep_copy(a) for k, a in v.attributes.items()})


def _double_eq(a: float, b: float) -> bool:
    # bitwise comparison, except NaN compares equal to NaN
    if math.isnan(a) and math.isnan(b):
        return True
    return struct.pack("<d", a) == struct.pack("<d", b)


def values_equal(a: Value, b: Value) -> bool:
    """Structural equality used by tests and state snapshots."""
    if a.kind != b.kind:
        return False
    if set(a.attributes) != set(b.attributes):
        return False
    for name in a.attributes:
        if not values_equal(a.attributes[name], b.attributes[name]):
            return False
    if a.kind == NULL:
        return True
    if a.kind == DOUBLE:
        return len(a.payload) == len(b.payload) and all(
            _double_eq(x, y) for x, y in zip(a.payload, b.payload)
        )
    if a.kind in (LOGICAL, INTEGER, STRING):
        return a.payload == b.payload
    if a.kind == LIST:
        return len(a.payload) == len(b.payload) and all(
            values_equal(x, y) for x, y in zip(a.payload, b.payload)
        )
    if a.kind == S4_INSTANCE:
        pa, pb = a.payload, b.payload
        return (
            pa.class_name == pb.class_name
            and set(pa.slot_values) == set(pb.slot_values)
            and all(values_equal(pa.slot_values[k], pb.slot_values[k]) for k in pa.slot_values)
        )
    if a.kind == EXPRESSION:
        from . import syntax

        return syntax.expr_equal(a.payload, b.payload)
    # closures, builtins, environments, ref instances: identity
    return a.payload is b.payload


def element_names(v: Value) -> Optional[list]:
    names = v.attributes.get("names")
    if names is not None and names.kind == STRING:
        return names.payload
    return None
