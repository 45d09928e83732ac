"""Formal functional OOP: explicit class definitions with typed slots,
reflective generics, and best-match multiple dispatch.

Dispatch ranks every admissible method by its per-argument inheritance
distances: smallest sum wins, ties break lexicographically left to
right, and an exact tie is an ambiguity error.  Distances are shortest
paths in the containment graph; the wildcard "ANY" sits strictly below
every real superclass."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from . import syntax, values
from .environment import Environment
from .values import MlsError, Value

ANY = "ANY"

BASE_CLASSES = {
    # name -> direct superclasses
    "numeric": [],
    "integer": ["numeric"],
    "logical": [],
    "character": [],
    "list": [],
    "function": [],
    "NULL": [],
    "environment": [],
    "expression": [],
}


@dataclass
class ClassDef:
    name: str
    own_slots: dict
    contains: list
    slots: dict = field(default_factory=dict)  # merged, subclass first
    linearization: list = field(default_factory=list)  # (class name, distance)
    distances: dict = field(default_factory=dict)
    virtual: bool = False
    basic: bool = False


@dataclass
class MethodDef:
    signature: tuple
    fn: Value  # closure


@dataclass
class GenericDef:
    name: str
    formals: list  # as Closure formals
    signature: tuple  # dispatch argument names
    methods: dict = field(default_factory=dict)  # signature tuple -> MethodDef
    def_env: Optional[Environment] = None


class Registry:
    def __init__(self):
        self.classes: dict = {}
        self.generics: dict = {}
        for name, contains in BASE_CLASSES.items():
            self._register(ClassDef(name, {}, list(contains), basic=True))

    # -- classes -------------------------------------------------------------

    def _register(self, cdef: ClassDef) -> ClassDef:
        cdef.linearization = self._linearize(cdef)
        cdef.distances = dict(cdef.linearization)
        cdef.slots = self._merge_slots(cdef)
        self.classes[cdef.name] = cdef
        return cdef

    def define_class(self, name, own_slots, contains, virtual=False, loc=None) -> ClassDef:
        for sup in contains:
            sdef = self.classes.get(sup)
            if sdef is None:
                raise MlsError(f"undefined superclass '{sup}' for class '{name}'", loc)
            if name == sup or name in sdef.distances:
                raise MlsError(f"inheritance cycle through class '{name}'", loc)
        cdef = ClassDef(name, dict(own_slots), list(contains), virtual=virtual)
        try:
            return self._register(cdef)
        except MlsError:
            self.classes.pop(name, None)
            raise

    def _linearize(self, cdef: ClassDef) -> list:
        # depth-first over contains, first occurrence wins the position;
        # the stored distance is the shortest path in the containment graph
        order = []
        seen = set()

        def visit(c):
            if c in seen:
                return
            seen.add(c)
            order.append(c)
            source = cdef if c == cdef.name else self.classes[c]
            for sup in source.contains:
                visit(sup)

        visit(cdef.name)
        dist = {cdef.name: 0}
        queue = deque([cdef.name])
        while queue:
            c = queue.popleft()
            source = cdef if c == cdef.name else self.classes[c]
            for sup in source.contains:
                if sup not in dist:
                    dist[sup] = dist[c] + 1
                    queue.append(sup)
        return [(c, dist[c]) for c in order]

    def _merge_slots(self, cdef: ClassDef) -> dict:
        merged = {}
        origin = {}
        for cls_name, _ in cdef.linearization:
            source = cdef if cls_name == cdef.name else self.classes[cls_name]
            for slot, declared in source.own_slots.items():
                if slot in merged:
                    raise MlsError(
                        f"slot '{slot}' in class '{cdef.name}' is already defined "
                        f"by '{origin[slot]}'"
                    )
                merged[slot] = declared
                origin[slot] = cls_name
        return merged

    def distance(self, frm: str, to: str) -> Optional[int]:
        cdef = self.classes.get(frm)
        if to == ANY:
            return len(cdef.linearization) if cdef is not None else 1
        if cdef is None:
            return None
        return cdef.distances.get(to)

    # -- generics ------------------------------------------------------------

    def define_generic(self, name, formals, signature=None, def_env=None, loc=None) -> GenericDef:
        formal_names = [n for n, _ in formals]
        if signature is None:
            signature = tuple(formal_names)
        else:
            for s in signature:
                if s not in formal_names:
                    raise MlsError(
                        f"dispatch argument '{s}' is not a formal argument of '{name}'", loc
                    )
            # keep formal-argument order regardless of how the caller spelled it
            signature = tuple(n for n in formal_names if n in set(signature))
        gdef = GenericDef(name, list(formals), signature, def_env=def_env)
        self.generics[name] = gdef
        return gdef

    def define_method(self, generic_name, signature, fn: Value, loc=None) -> MethodDef:
        gdef = self.generics.get(generic_name)
        if gdef is None:
            raise MlsError(f"no generic function '{generic_name}' is defined", loc)
        signature = tuple(signature)
        if len(signature) != len(gdef.signature):
            raise MlsError(
                f"method signature for '{generic_name}' must have "
                f"{len(gdef.signature)} classes, got {len(signature)}",
                loc,
            )
        for cls in signature:
            if cls != ANY and cls not in self.classes:
                raise MlsError(f"undefined class '{cls}' in method signature", loc)
        if fn.kind != values.CLOSURE:
            raise MlsError("method implementation must be a function", loc)
        method_names = [n for n, _ in fn.payload.formals]
        generic_names = [n for n, _ in gdef.formals]
        if method_names != generic_names:
            raise MlsError(
                f"method formals ({', '.join(method_names)}) must match the generic's "
                f"({', '.join(generic_names)})",
                loc,
            )
        mdef = MethodDef(signature, fn)
        gdef.methods[signature] = mdef
        return mdef

    def select_method(self, gdef: GenericDef, actual_classes, loc=None) -> MethodDef:
        actual_classes = tuple(actual_classes)
        admissible = []
        for mdef in gdef.methods.values():
            dists = []
            for actual, declared in zip(actual_classes, mdef.signature):
                d = self.distance(actual, declared)
                if d is None:
                    break
                dists.append(d)
            else:
                admissible.append((sum(dists), tuple(dists), mdef))
        if not admissible:
            raise MlsError(
                f"unable to find an inherited method for function '{gdef.name}' "
                f"for signature ({', '.join(actual_classes)})",
                loc,
            )
        best = min(key[:2] for key in admissible)
        winners = [m for s, t, m in admissible if (s, t) == best]
        if len(winners) > 1:
            sigs = sorted("(" + ", ".join(m.signature) + ")" for m in winners)
            raise MlsError(
                f"ambiguous method selection for '{gdef.name}': candidates {'; '.join(sigs)}",
                loc,
            )
        return winners[0]


# -- value/class relationships ----------------------------------------------

_BASE_KIND_CHECKS = {
    "numeric": (values.INTEGER, values.DOUBLE),
    "double": (values.DOUBLE,),
    "integer": (values.INTEGER,),
    "logical": (values.LOGICAL,),
    "character": (values.STRING,),
    "list": (values.LIST,),
    "function": (values.CLOSURE, values.BUILTIN),
    "NULL": (values.NULL,),
    "environment": (values.ENVIRONMENT,),
    "expression": (values.EXPRESSION,),
}


def dispatch_class_of(v: Value) -> str:
    if v.kind == values.S4_INSTANCE:
        return v.payload.class_name
    if v.kind == values.REF_INSTANCE:
        return v.payload.class_name
    return values.implicit_class(v).payload[0]


def value_matches_class(registry: Registry, v: Value, declared: str) -> bool:
    if declared == ANY:
        return True
    kinds = _BASE_KIND_CHECKS.get(declared)
    if kinds is not None:
        return v.kind in kinds
    return registry.distance(dispatch_class_of(v), declared) is not None


_ZERO_VALUES = {
    "numeric": lambda: values.double_vec([]),
    "double": lambda: values.double_vec([]),
    "integer": lambda: values.int_vec([]),
    "logical": lambda: values.logical_vec([]),
    "character": lambda: values.string_vec([]),
    "list": lambda: values.list_value([]),
    "NULL": values.null_value,
    ANY: values.null_value,
}


def zero_value(declared: str) -> Optional[Value]:
    maker = _ZERO_VALUES.get(declared)
    return maker() if maker is not None else None


def new_instance(interp, class_name: str, inits, loc=None) -> Value:
    """Construct and validate an instance; inits is (name, Value) pairs."""
    cdef = interp.s4.classes.get(class_name)
    if cdef is None:
        raise MlsError(f'undefined class "{class_name}"', loc)
    if cdef.virtual:
        raise MlsError(f'cannot allocate an object of a virtual class ("{class_name}")', loc)
    if cdef.basic:
        if inits:
            raise MlsError(f"cannot pass slot values to basic class '{class_name}'", loc)
        zero = zero_value(class_name)
        if zero is None:
            raise MlsError(f"cannot instantiate basic class '{class_name}'", loc)
        return zero
    slot_values = {}
    for name, v in inits:
        if not name:
            raise MlsError(f'unnamed argument in new("{class_name}")', loc)
        if name not in cdef.slots:
            raise MlsError(f"unknown slot '{name}' for class \"{class_name}\"", loc)
        if name in slot_values:
            raise MlsError(f"slot '{name}' initialized twice", loc)
        slot_values[name] = v
    out = {}
    for name, declared in cdef.slots.items():
        if name in slot_values:
            v = slot_values[name]
            if not value_matches_class(interp.s4, v, declared):
                raise MlsError(
                    f"invalid value for slot '{name}' of class \"{class_name}\": "
                    f"expected '{declared}', got '{dispatch_class_of(v)}'",
                    loc,
                )
            out[name] = v
        else:
            zero = zero_value(declared)
            if zero is None:
                raise MlsError(
                    f"slot '{name}' of class \"{class_name}\" requires an explicit value", loc
                )
            out[name] = zero
    return Value(values.S4_INSTANCE, values.S4Payload(class_name, out))


def slot_get(obj: Value, name: str, loc=None) -> Value:
    if obj.kind != values.S4_INSTANCE:
        raise MlsError("slot() requires a formally classed object", loc)
    if name not in obj.payload.slot_values:
        raise MlsError(f"no slot '{name}' in an object of class \"{obj.payload.class_name}\"", loc)
    return obj.payload.slot_values[name]


def slot_set(interp, obj: Value, name: str, v: Value, loc=None) -> Value:
    if obj.kind != values.S4_INSTANCE:
        raise MlsError("slot_set() requires a formally classed object", loc)
    cdef = interp.s4.classes.get(obj.payload.class_name)
    if cdef is None or name not in cdef.slots:
        raise MlsError(f"no slot '{name}' in an object of class \"{obj.payload.class_name}\"", loc)
    declared = cdef.slots[name]
    if not value_matches_class(interp.s4, v, declared):
        raise MlsError(
            f"invalid value for slot '{name}' of class \"{obj.payload.class_name}\": "
            f"expected '{declared}', got '{dispatch_class_of(v)}'",
            loc,
        )
    new_slots = dict(obj.payload.slot_values)
    new_slots[name] = v
    return Value(values.S4_INSTANCE, values.S4Payload(obj.payload.class_name, new_slots))


def call_generic(interp, gdef: GenericDef, args, caller_env, loc=None) -> Value:
    """Dispatch a generic call: force only the dispatch arguments, select
    the best method, and run it with the original promises."""
    shim = values.Closure(gdef.formals, None, gdef.def_env or interp.global_env)
    call_env = interp.match_arguments(shim, args, loc, gdef.name)
    actual_classes = []
    for name in gdef.signature:
        binding = call_env.frame[name]
        v = binding.resolve(interp, loc)
        actual_classes.append(dispatch_class_of(v))
    mdef = interp.s4.select_method(gdef, actual_classes, loc)
    method_env = Environment(mdef.fn.payload.enclosure, f"call:{gdef.name}")
    method_env.frame.update(call_env.frame)
    return interp.exec_closure(mdef.fn, method_env, caller_env, loc, args, gdef.name)


def is_standard_generic_body(body) -> bool:
    return (
        isinstance(body, syntax.Call)
        and isinstance(body.callee, syntax.Symbol)
        and body.callee.name == "standardGeneric"
    )
