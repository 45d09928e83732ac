"""Encapsulated OOP: mutable objects backed by environments.

Copying a reference instance copies the reference, never the backing
environment, so every alias observes every field mutation.  Methods are
closures re-enclosed over the instance environment: fields and sibling
methods are visible directly by name, and field assignment inside a
method uses `<<-`, which lands on the instance frame."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import s4, values
from .environment import Binding, Environment, FieldSpec
from .values import MlsError, Value


@dataclass
class RefField:
    name: str
    declared_class: str = s4.ANY
    read_only: bool = False
    active_get: Optional[Value] = None
    active_set: Optional[Value] = None

    @property
    def active(self):
        return self.active_get is not None


@dataclass
class RefClassDef:
    name: str
    fields: dict  # name -> RefField, merged (superclass first)
    methods: dict  # name -> closure Value, merged
    contains: Optional[str]
    def_env: Environment


@dataclass
class RefPayload:
    class_name: str
    backing: Environment


def _parse_field_spec(name, spec: Value, loc) -> RefField:
    if spec.kind == values.STRING and len(spec.payload) == 1:
        return RefField(name, spec.payload[0])
    if spec.kind == values.LIST:
        entries = dict(zip(values.element_names(spec) or [], spec.payload))
        if "get" in entries:
            getter = entries["get"]
            setter = entries.get("set")
            if getter.kind != values.CLOSURE or (
                setter is not None and setter.kind != values.CLOSURE
            ):
                raise MlsError(f"active field '{name}' requires function accessors", loc)
            return RefField(name, active_get=getter, active_set=setter)
        declared = entries.get("class")
        declared_name = s4.ANY
        if declared is not None:
            if declared.kind != values.STRING or len(declared.payload) != 1:
                raise MlsError(f"invalid class declaration for field '{name}'", loc)
            declared_name = declared.payload[0]
        read_only = False
        ro = entries.get("readonly")
        if ro is not None:
            read_only = bool(ro.payload and ro.payload[0])
        return RefField(name, declared_name, read_only)
    raise MlsError(f"invalid specification for field '{name}'", loc)


def set_ref_class(interp, name, fields_value, methods_value, contains_value, def_env, loc=None):
    """Register a reference class and return its generator."""
    contains = None
    if not values.is_null(contains_value):
        if contains_value.kind != values.STRING or len(contains_value.payload) != 1:
            raise MlsError("contains must be a single class name", loc)
        contains = contains_value.payload[0]
        if contains not in interp.ref_classes:
            raise MlsError(f"superclass '{contains}' is not a reference class", loc)

    fields: dict = {}
    methods: dict = {}
    inherited_fields = set()
    if contains is not None:
        parent = interp.ref_classes[contains]
        fields.update(parent.fields)
        methods.update(parent.methods)
        inherited_fields = set(parent.fields)

    if not values.is_null(fields_value):
        if fields_value.kind != values.LIST:
            raise MlsError("fields must be a named list", loc)
        names = values.element_names(fields_value) or []
        if len(names) != len(fields_value.payload) or not all(names):
            raise MlsError("every field must be named", loc)
        for fname, spec in zip(names, fields_value.payload):
            if fname in inherited_fields:
                raise MlsError(
                    f"field '{fname}' is already declared by superclass '{contains}'", loc
                )
            if fname in fields:
                raise MlsError(f"duplicate field '{fname}'", loc)
            fields[fname] = _parse_field_spec(fname, spec, loc)

    if not values.is_null(methods_value):
        if methods_value.kind != values.LIST:
            raise MlsError("methods must be a named list", loc)
        names = values.element_names(methods_value) or []
        if len(names) != len(methods_value.payload) or not all(names):
            raise MlsError("every method must be named", loc)
        for mname, fn in zip(names, methods_value.payload):
            if fn.kind != values.CLOSURE:
                raise MlsError(f"method '{mname}' must be a function", loc)
            methods[mname] = fn  # overriding an inherited method is allowed

    clash = set(fields) & set(methods)
    if clash:
        raise MlsError(
            f"names used for both a field and a method: {', '.join(sorted(clash))}", loc
        )

    cdef = RefClassDef(name, fields, methods, contains, def_env)
    interp.ref_classes[name] = cdef
    # participate in formal dispatch: the class exists in the S4 registry
    # as a slotless class under its reference superclass
    interp.s4.define_class(name, {}, [contains] if contains else [], loc=loc)
    return generator_value(interp, cdef)


def generator_value(interp, cdef: RefClassDef) -> Value:
    from .interpreter import BuiltinPayload

    payload = BuiltinPayload(name=cdef.name, fn=None, special="ref_generator", meta=cdef)
    return Value(values.BUILTIN, payload)


def _re_enclosed(fn: Value, env: Environment) -> Value:
    closure = fn.payload
    return Value(values.CLOSURE, values.Closure(closure.formals, closure.body, env))


def generator_new(interp, cdef: RefClassDef, args, loc=None) -> Value:
    """Construct an instance; args is (name, Value) pairs.  Read-only
    fields are writable here and nowhere else."""
    inits = {}
    for name, v in args:
        if not name:
            raise MlsError(f"unnamed argument in constructor for '{cdef.name}'", loc)
        if name not in cdef.fields:
            raise MlsError(f"'{name}' is not a field of class '{cdef.name}'", loc)
        if cdef.fields[name].active:
            raise MlsError(f"cannot initialize active field '{name}'", loc)
        if name in inits:
            raise MlsError(f"field '{name}' initialized twice", loc)
        inits[name] = v

    backing = Environment(cdef.def_env, f"ref:{cdef.name}")
    for fname, spec in cdef.fields.items():
        if spec.active:
            getter = _re_enclosed(spec.active_get, backing)
            setter = _re_enclosed(spec.active_set, backing) if spec.active_set else None
            backing.frame[fname] = Binding.active(getter, setter)
            continue
        if fname in inits:
            v = inits[fname]
            interp.check_field_class(v, spec.declared_class, fname, loc)
        else:
            v = s4.zero_value(spec.declared_class)
            if v is None:
                raise MlsError(
                    f"field '{fname}' of class '{cdef.name}' requires an explicit value", loc
                )
        backing.frame[fname] = Binding.immediate(
            v, field=FieldSpec(spec.declared_class, spec.read_only)
        )
    for mname, fn in cdef.methods.items():
        backing.frame[mname] = Binding.immediate(_re_enclosed(fn, backing))
    instance = Value(values.REF_INSTANCE, RefPayload(cdef.name, backing))
    backing.frame[".self"] = Binding.immediate(instance)
    return instance


def field_or_method(interp, obj: Value, name: str, loc=None) -> Value:
    backing = obj.payload.backing
    binding = backing.frame.get(name)
    if binding is None:
        raise MlsError(
            f"'{name}' is not a field or method of class '{obj.payload.class_name}'", loc
        )
    return binding.resolve(interp, loc)


def field_set(interp, obj: Value, name: str, v: Value, loc=None):
    backing = obj.payload.backing
    binding = backing.frame.get(name)
    if binding is None or name == ".self":
        raise MlsError(f"'{name}' is not a field of class '{obj.payload.class_name}'", loc)
    backing.set_value(name, v, interp, loc)


def copy_instance(interp, obj: Value, loc=None) -> Value:
    """Explicit escape from aliasing: fresh backing environment with
    deep-copied fields; nested reference instances are copied recursively."""
    cdef = interp.ref_classes.get(obj.payload.class_name)
    if cdef is None:
        raise MlsError(f"unknown reference class '{obj.payload.class_name}'", loc)
    old = obj.payload.backing
    backing = Environment(old.parent, f"ref:{cdef.name}")
    for fname, spec in cdef.fields.items():
        if spec.active:
            getter = _re_enclosed(spec.active_get, backing)
            setter = _re_enclosed(spec.active_set, backing) if spec.active_set else None
            backing.frame[fname] = Binding.active(getter, setter)
            continue
        binding = old.frame.get(fname)
        current = binding.value if binding is not None else values.null_value()
        if current.kind == values.REF_INSTANCE:
            copied = copy_instance(interp, current, loc)
        else:
            copied = values.deep_copy(current)
        backing.frame[fname] = Binding.immediate(
            copied, field=FieldSpec(spec.declared_class, spec.read_only)
        )
    for mname, fn in cdef.methods.items():
        backing.frame[mname] = Binding.immediate(_re_enclosed(fn, backing))
    instance = Value(values.REF_INSTANCE, RefPayload(cdef.name, backing))
    backing.frame[".self"] = Binding.immediate(instance)
    return instance


def generator_field(interp, cdef: RefClassDef, name: str, loc=None) -> Value:
    from .interpreter import BuiltinPayload

    if name == "new":
        def construct(ctx, args):
            return generator_new(ctx.interp, cdef, args, ctx.loc)

        return Value(values.BUILTIN, BuiltinPayload(name=f"{cdef.name}$new", fn=construct))
    if name == "className":
        return values.scalar_string(cdef.name)
    if name == "definition":
        field_names = values.string_vec(list(cdef.fields))
        method_names = values.string_vec(list(cdef.methods))
        contains = (
            values.scalar_string(cdef.contains) if cdef.contains else values.null_value()
        )
        out = values.list_value(
            [values.scalar_string(cdef.name), field_names, method_names, contains],
            names=["name", "fields", "methods", "contains"],
        )
        return values.set_attribute(out, "class", values.string_vec(["refClassDefinition"]))
    raise MlsError(f"unknown generator field '{name}'", loc)
