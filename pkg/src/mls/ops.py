"""Elementwise vector operations, concatenation, and indexing.

These implement value semantics directly: every operation builds a new
value and never mutates its inputs, which is what lets bindings share
structure safely.
"""

from __future__ import annotations

import math

from . import printer, values
from .values import MlsError, Value

_NUMERIC_RANK = {values.LOGICAL: 0, values.INTEGER: 1, values.DOUBLE: 2, values.STRING: 3}


def _as_number_list(v: Value, op: str, loc):
    if v.kind == values.LOGICAL:
        return [int(x) for x in v.payload], values.INTEGER
    if v.kind in (values.INTEGER, values.DOUBLE):
        return list(v.payload), v.kind
    raise MlsError(f"non-numeric argument to binary operator '{op}'", loc)


def _recycle(xs, ys, loc):
    m, n = len(xs), len(ys)
    if m == 0 or n == 0:
        return [], []
    if m == n:
        return xs, ys
    if m == 1:
        return xs * n, ys
    if n == 1:
        return xs, ys * m
    raise MlsError(f"operand lengths do not match ({m} vs {n})", loc)


def _result_names(result_len, a: Value, b: Value):
    for operand in (a, b):
        names = operand.attributes.get("names")
        if names is not None and len(names.payload) == result_len:
            return names
    return None


def _safe_div(x, y):
    x = float(x)
    y = float(y)
    if y != 0.0:
        return x / y
    if math.isnan(x) or x == 0.0:
        return float("nan")
    return math.copysign(1.0, x) * math.copysign(1.0, y) * math.inf


def arith_unary(op: str, v: Value, loc=None) -> Value:
    xs, kind = _as_number_list(v, op, loc)
    if op == "-":
        xs = [-x for x in xs]
    out = Value(kind, xs)
    names = v.attributes.get("names")
    if names is not None and len(names.payload) == len(xs):
        out.attributes["names"] = names
    return out


def arith_binary(op: str, a: Value, b: Value, loc=None) -> Value:
    xs, ka = _as_number_list(a, op, loc)
    ys, kb = _as_number_list(b, op, loc)
    xs, ys = _recycle(xs, ys, loc)
    if op == "/":
        kind = values.DOUBLE
        out = [_safe_div(x, y) for x, y in zip(xs, ys)]
    else:
        kind = values.DOUBLE if values.DOUBLE in (ka, kb) else values.INTEGER
        fn = {"+": lambda x, y: x + y, "-": lambda x, y: x - y, "*": lambda x, y: x * y}[op]
        out = [fn(x, y) for x, y in zip(xs, ys)]
        if kind == values.DOUBLE:
            out = [float(x) for x in out]
    result = Value(kind, out)
    names = _result_names(len(out), a, b)
    if names is not None:
        result.attributes["names"] = names
    return result


_COMPARE = {
    "<": lambda x, y: x < y,
    "<=": lambda x, y: x <= y,
    ">": lambda x, y: x > y,
    ">=": lambda x, y: x >= y,
    "==": lambda x, y: x == y,
    "!=": lambda x, y: x != y,
}


def compare_binary(op: str, a: Value, b: Value, loc=None) -> Value:
    if values.STRING in (a.kind, b.kind):
        if a.kind != values.STRING or b.kind != values.STRING:
            raise MlsError(f"comparison ({op}) requires compatible types", loc)
        xs, ys = list(a.payload), list(b.payload)
    else:
        xs, _ = _as_number_list(a, op, loc)
        ys, _ = _as_number_list(b, op, loc)
    xs, ys = _recycle(xs, ys, loc)
    fn = _COMPARE[op]
    result = Value(values.LOGICAL, [bool(fn(x, y)) for x, y in zip(xs, ys)])
    names = _result_names(len(result.payload), a, b)
    if names is not None:
        result.attributes["names"] = names
    return result


def logical_not(v: Value, loc=None) -> Value:
    if v.kind == values.LOGICAL:
        return Value(values.LOGICAL, [not x for x in v.payload])
    if v.kind in (values.INTEGER, values.DOUBLE):
        return Value(values.LOGICAL, [x == 0 for x in v.payload])
    raise MlsError("invalid argument type to '!'", loc)


def truthy(v: Value, loc=None) -> bool:
    if v.kind == values.NULL:
        raise MlsError("argument is of length zero", loc)
    if v.kind in (values.LOGICAL, values.INTEGER, values.DOUBLE):
        if len(v.payload) == 0:
            raise MlsError("argument is of length zero", loc)
        x = v.payload[0]
        if v.kind == values.DOUBLE and math.isnan(x):
            raise MlsError("missing value where TRUE/FALSE needed", loc)
        return bool(x)
    raise MlsError("argument is not interpretable as logical", loc)


def _coerce_vector_elements(items, from_kind, to_kind):
    if from_kind == to_kind:
        return list(items)
    if to_kind == values.STRING:
        return [printer.format_element(from_kind, x, quote_strings=False) for x in items]
    if to_kind == values.DOUBLE:
        return [float(x) for x in items]
    if to_kind == values.INTEGER:
        return [int(x) for x in items]
    return list(items)


def concat(args, loc=None) -> Value:
    """The c() builtin: args is a list of (name or None, Value)."""
    parts = [(n, v) for n, v in args if not values.is_null(v)]
    if not parts:
        return values.null_value()
    as_list = any(v.kind not in values.VECTOR_KINDS for _, v in parts)
    names = []
    have_names = False
    if as_list:
        items = []
        for name, v in parts:
            if v.kind == values.LIST:
                inner = values.element_names(v) or [""] * len(v.payload)
                for i, item in enumerate(v.payload):
                    items.append(item)
                    names.append(_spliced_name(name, inner[i], i, len(v.payload)))
            elif v.kind in values.VECTOR_KINDS:
                for i, x in enumerate(v.payload):
                    items.append(Value(v.kind, [x]))
                    names.append(_spliced_name(name, "", i, len(v.payload)))
            else:
                items.append(v)
                names.append(name or "")
        have_names = any(names)
        out = Value(values.LIST, items)
    else:
        kind = max((v.kind for _, v in parts), key=lambda k: _NUMERIC_RANK[k])
        items = []
        for name, v in parts:
            inner = values.element_names(v) or [""] * len(v.payload)
            coerced = _coerce_vector_elements(v.payload, v.kind, kind)
            for i, x in enumerate(coerced):
                items.append(x)
                names.append(_spliced_name(name, inner[i], i, len(coerced)))
        have_names = any(names)
        out = Value(kind, items)
    if have_names:
        out.attributes["names"] = values.string_vec(names)
    return out


def _spliced_name(outer, inner, i, n):
    if inner:
        return inner
    if outer:
        return outer if n == 1 else f"{outer}{i + 1}"
    return ""


def _positions(idx: Value, length: int, names, loc):
    """Resolve an index vector to 0-based positions."""
    if idx.kind in (values.INTEGER, values.DOUBLE):
        out = []
        for x in idx.payload:
            if idx.kind == values.DOUBLE:
                if math.isnan(x) or x != int(x):
                    raise MlsError(f"invalid index {printer.format_double(x)}", loc)
                x = int(x)
            if x < 1:
                raise MlsError(f"invalid index {x}", loc)
            if x > length:
                raise MlsError(f"index {x} out of bounds (length {length})", loc)
            out.append(x - 1)
        return out
    if idx.kind == values.LOGICAL:
        if len(idx.payload) != length:
            raise MlsError(
                f"logical index length {len(idx.payload)} does not match length {length}", loc
            )
        return [i for i, keep in enumerate(idx.payload) if keep]
    if idx.kind == values.STRING:
        if names is None:
            raise MlsError("cannot index by name: object has no names", loc)
        out = []
        for s in idx.payload:
            try:
                out.append(names.index(s))
            except ValueError:
                raise MlsError(f"undefined name '{s}' in index", loc) from None
        return out
    raise MlsError("invalid index type", loc)


def index_get(obj: Value, indices, loc=None) -> Value:
    if len(indices) != 1:
        raise MlsError("matrix indexing is not supported", loc)
    if obj.kind == values.NULL:
        raise MlsError("cannot index NULL", loc)
    if obj.kind not in values.VECTOR_KINDS and obj.kind != values.LIST:
        cls = values.implicit_class(obj).payload[0]
        raise MlsError(f"object of class '{cls}' is not subsettable", loc)
    names = values.element_names(obj)
    pos = _positions(indices[0], len(obj.payload), names, loc)
    if obj.kind == values.LIST:
        out = Value(values.LIST, [obj.payload[i] for i in pos])
    else:
        out = Value(obj.kind, [obj.payload[i] for i in pos])
    if names is not None:
        out.attributes["names"] = values.string_vec([names[i] for i in pos])
    return out


def index_assign(obj: Value, indices, v: Value, loc=None) -> Value:
    if len(indices) != 1:
        raise MlsError("matrix indexing is not supported", loc)
    if obj.kind == values.LIST:
        return _list_index_assign(obj, indices[0], v, loc)
    if obj.kind not in values.VECTOR_KINDS:
        cls = values.implicit_class(obj).payload[0]
        raise MlsError(f"object of class '{cls}' is not subsettable", loc)
    if v.kind not in values.VECTOR_KINDS:
        raise MlsError("replacement value must be a vector", loc)
    names = values.element_names(obj)
    pos = _positions(indices[0], len(obj.payload), names, loc)
    kind = max(obj.kind, v.kind, key=lambda k: _NUMERIC_RANK[k])
    payload = _coerce_vector_elements(obj.payload, obj.kind, kind)
    repl = _coerce_vector_elements(v.payload, v.kind, kind)
    if len(repl) == 1:
        repl = repl * len(pos)
    if len(repl) != len(pos):
        raise MlsError(
            f"replacement length {len(v.payload)} does not match {len(pos)} positions", loc
        )
    for p, x in zip(pos, repl):
        payload[p] = x
    out = Value(kind, payload, dict(obj.attributes))
    return out


def _list_index_assign(obj: Value, idx: Value, v: Value, loc):
    names = values.element_names(obj)
    if idx.kind == values.STRING and len(idx.payload) == 1:
        return field_assign_list(obj, idx.payload[0], v, loc)
    pos = _positions(idx, len(obj.payload), names, loc)
    if len(pos) != 1:
        raise MlsError("list assignment requires a single position", loc)
    payload = list(obj.payload)
    payload[pos[0]] = v
    return Value(values.LIST, payload, dict(obj.attributes))


def field_get_list(obj: Value, name: str) -> Value:
    names = values.element_names(obj)
    if names is not None and name in names:
        return obj.payload[names.index(name)]
    return values.null_value()


def field_assign_list(obj: Value, name: str, v: Value, loc=None) -> Value:
    if obj.kind == values.NULL:
        obj = Value(values.LIST, [])
    names = list(values.element_names(obj) or [""] * len(obj.payload))
    payload = list(obj.payload)
    if name in names:
        i = names.index(name)
        if values.is_null(v):
            del payload[i]
            del names[i]
        else:
            payload[i] = v
    elif not values.is_null(v):
        payload.append(v)
        names.append(name)
    out = Value(values.LIST, payload, dict(obj.attributes))
    if any(names):
        out.attributes["names"] = values.string_vec(names)
    else:
        out.attributes.pop("names", None)
    return out


def vector_sum(v: Value, loc=None) -> Value:
    if v.kind == values.LOGICAL:
        return values.scalar_int(sum(1 for x in v.payload if x))
    if v.kind == values.INTEGER:
        return values.scalar_int(sum(v.payload))
    if v.kind == values.DOUBLE:
        return values.scalar_double(math.fsum(v.payload))
    raise MlsError("invalid argument to sum()", loc)
