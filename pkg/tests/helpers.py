"""Shared test utilities: state snapshots, the differential purity
harness, and a generator of random pure programs."""

import random

from mls import purity, values
from mls.interpreter import Interpreter


def snapshot_frame(env):
    """Frozen copies of every immediate binding in one frame."""
    snap = {}
    for name, binding in env.frame.items():
        if binding.value is not None:
            snap[name] = values.deep_copy(binding.value)
        else:
            snap[name] = binding
    return snap


def frame_matches_snapshot(env, snap):
    if set(env.frame) != set(snap):
        return False
    for name, binding in env.frame.items():
        expected = snap[name]
        if isinstance(expected, values.Value):
            if binding.value is None or not values.values_equal(binding.value, expected):
                return False
        elif binding is not expected:
            return False
    return True


def interpreter_snapshot(interp):
    return {
        "global": snapshot_frame(interp.global_env),
        "base": dict(interp.base_env.frame),
        "classes": set(interp.s4.classes),
        "refclasses": set(interp.ref_classes),
    }


def snapshot_unchanged(interp, snap):
    if not frame_matches_snapshot(interp.global_env, snap["global"]):
        return False
    if dict(interp.base_env.frame) != snap["base"]:
        return False
    return (
        set(interp.s4.classes) == snap["classes"]
        and set(interp.ref_classes) == snap["refclasses"]
    )


def load_universe(modules):
    """Evaluate every module's definitions into one interpreter."""
    interp = Interpreter()
    for m in modules:
        for fname, literal in m.definitions.items():
            interp.global_env.bind_value(
                fname, interp.eval(literal, interp.global_env)
            )
    return interp


def differential_check(modules, call_source):
    """Evaluate a call twice against snapshotted interpreter state; the
    results must agree and nothing outside the call may change."""
    results = []
    for _ in range(2):
        interp = load_universe(modules)
        snap = interpreter_snapshot(interp)
        value = interp.eval_source(call_source)
        assert snapshot_unchanged(interp, snap), f"state changed by {call_source}"
        results.append(value)
    assert values.values_equal(results[0], results[1]), f"nondeterministic: {call_source}"
    return results[0]


class PureProgramGenerator:
    """Random programs in the pure subset: scalar arithmetic, locals,
    conditionals, bounded loops, vector rebuilds, and calls between the
    generated functions.  Nothing touches nonlocal state."""

    def __init__(self, seed):
        self.rnd = random.Random(seed)

    def literal(self):
        if self.rnd.random() < 0.5:
            return str(self.rnd.randint(0, 9))
        return repr(round(self.rnd.uniform(0.0, 4.0), 3))

    def scalar_expr(self, names, depth=0):
        choices = ["literal"]
        if names:
            choices += ["name", "name"]
        if depth < 2:
            choices += ["binary", "binary", "unary"]
        kind = self.rnd.choice(choices)
        if kind == "literal":
            return self.literal()
        if kind == "name":
            return self.rnd.choice(names)
        if kind == "unary":
            return f"-{self.scalar_expr(names, depth + 1)}"
        op = self.rnd.choice(["+", "-", "*"])
        return (
            f"({self.scalar_expr(names, depth + 1)} {op} "
            f"{self.scalar_expr(names, depth + 1)})"
        )

    def condition(self, names):
        op = self.rnd.choice(["<", "<=", ">", ">=", "==", "!="])
        return f"({self.scalar_expr(names)} {op} {self.scalar_expr(names)})"

    def function_body(self, globals_, callables):
        names = ["a", "b"] + [f"g{i + 1}[1]" for i in range(len(globals_))]
        stmts = []
        locals_ = []
        for i in range(self.rnd.randint(1, 3)):
            local = f"t{i + 1}"
            style = self.rnd.random()
            if style < 0.35 or not callables:
                stmts.append(f"{local} <- {self.scalar_expr(names)}")
            elif style < 0.5:
                stmts.append(
                    f"{local} <- if {self.condition(names)} "
                    f"{self.scalar_expr(names)} else {self.scalar_expr(names)}"
                )
            elif style < 0.65:
                callee = self.rnd.choice(callables)
                stmts.append(
                    f"{local} <- {callee}({self.scalar_expr(names)}, {self.scalar_expr(names)})"
                )
            elif style < 0.75:
                stmts.append(
                    f"rec{i} <- list(lo = {self.scalar_expr(names)}, "
                    f"hi = {self.scalar_expr(names)})"
                )
                stmts.append(f"rec{i}$mid <- {self.scalar_expr(names)}")
                stmts.append(f"{local} <- rec{i}$lo + rec{i}$mid")
            elif style < 0.85:
                stmts.append(f"inner{i} <- function(z) z + {self.scalar_expr(names)}")
                stmts.append(f"{local} <- inner{i}({self.scalar_expr(names)})")
            else:
                stmts.append(f"{local} <- 0")
                stmts.append(f"ctr{i} <- {self.rnd.randint(1, 3)}")
                stmts.append(f"while (ctr{i} > 0) {{")
                stmts.append(f"  {local} <- {local} + {self.scalar_expr(names)}")
                stmts.append(f"  ctr{i} <- ctr{i} - 1")
                stmts.append("}")
            locals_.append(local)
            names.append(local)
        if self.rnd.random() < 0.5 and locals_:
            vec = ", ".join([self.scalar_expr(names)] * self.rnd.randint(2, 3))
            stmts.append(f"v <- c({vec})")
            stmts.append(f"v[{self.rnd.randint(1, 2)}] <- {self.scalar_expr(names)}")
            stmts.append("v[1]")
        else:
            stmts.append(self.scalar_expr(names))
        return stmts

    def program(self):
        lines = []
        n_globals = self.rnd.randint(1, 3)
        for i in range(n_globals):
            items = ", ".join(self.literal() for _ in range(self.rnd.randint(1, 4)))
            lines.append(f"g{i + 1} <- c({items})")
        n_funcs = self.rnd.randint(1, 3)
        has_default = []
        for i in range(n_funcs):
            callables = [f"f{j + 1}" for j in range(i)]
            has_default.append(self.rnd.random() < 0.4)
            default = f" = {self.literal()}" if has_default[i] else ""
            body = self.function_body(range(n_globals), callables)
            lines.append(f"f{i + 1} <- function(a, b{default}) {{")
            lines.extend(f"  {s}" for s in body)
            lines.append("}")
        idx = self.rnd.randrange(n_funcs)
        globals_as_args = [f"g{i + 1}[1]" for i in range(n_globals)]
        args = [self.scalar_expr(globals_as_args)]
        if not (has_default[idx] and self.rnd.random() < 0.3):
            args.append(self.scalar_expr(globals_as_args))
        call = f"f{idx + 1}({', '.join(args)})"
        return "\n".join(lines), call
