"""Static certification of functional validity.

A function is certified functional when its result can only depend on
its arguments: no nonlocal assignment, no reads of mutable interpreter
state, no random draws, no references outside the module's namespace,
and no foreign or dynamically resolved code anywhere in its call graph.
Verification is bottom-up: the call graph is condensed into strongly
connected components and verdicts propagate from callees to callers,
with Uncertifiable dominating Nonfunctional dominating Functional.

The analysis is deliberately conservative: code that would be harmless
at run time may still be refused certification.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from . import reader, syntax, values
from .builtins import BUILTIN_NAMES
from .values import MlsError

NONLOCAL_ASSIGNMENT = "NonlocalAssignment"
STATE_READ = "StateRead"
RNG_DEPENDENCE = "RngDependence"
GLOBAL_REFERENCE = "GlobalReference"
FOREIGN_CODE = "ForeignCode"
DYNAMIC_CODE = "DynamicCode"

ALL_KINDS = (
    NONLOCAL_ASSIGNMENT,
    STATE_READ,
    RNG_DEPENDENCE,
    GLOBAL_REFERENCE,
    FOREIGN_CODE,
    DYNAMIC_CODE,
)

FUNCTIONAL = "functional"
NONFUNCTIONAL = "nonfunctional"
UNCERTIFIABLE = "uncertifiable"

_UNCERTIFIABLE_KINDS = {FOREIGN_CODE, DYNAMIC_CODE}


@dataclass(frozen=True)
class Violation:
    kind: str
    line: int
    column: int
    detail: str
    subject: Optional[str] = None  # e.g. the option name, for remediation


@dataclass
class CalleeUse:
    name: str
    loc: tuple
    first_string: Optional[str] = None  # first literal string argument
    has_envir: bool = False  # assign() given an explicit environment


@dataclass
class FunctionFacts:
    name: str
    violations: list = field(default_factory=list)
    callees: list = field(default_factory=list)  # CalleeUse
    name_uses: dict = field(default_factory=dict)  # free name -> first loc


@dataclass
class ModuleUnit:
    name: str
    definitions: dict  # name -> FunctionLiteral
    bindings: set  # every top-level assigned name
    imports: list  # (module name, [imported names])
    path: Optional[str] = None


@dataclass
class Verdict:
    status: str
    reasons: list  # merged own + inherited Violations
    via: list  # callee names that contributed reasons
    own_reasons: list


@dataclass
class FunctionReport:
    module: str
    name: str
    verdict: Verdict
    suggestions: list


@dataclass
class AnalysisReport:
    modules: list  # (module name, [FunctionReport])
    edges: list  # ((module, fn), (module, fn))
    summary: dict


# ---------------------------------------------------------------------------
# builtin classification policy


@dataclass
class BuiltinPolicy:
    """Which builtins are certified pure, and how the rest are classified.

    Shipped as plain data so tests can perturb it.
    """

    pure: set
    state_read: set
    rng: set
    foreign: set
    dynamic: set
    global_ref: set
    local_assign: set

    def known(self, name):
        return any(
            name in group
            for group in (
                self.pure,
                self.state_read,
                self.rng,
                self.foreign,
                self.dynamic,
                self.global_ref,
                self.local_assign,
            )
        )


def default_policy() -> BuiltinPolicy:
    return BuiltinPolicy(
        pure={
            "+", "-", "*", "/", "<", "<=", ">", ">=", "==", "!=", "!", "&&", "||",
            "c", "list", "length", "sum", "paste", "el", "names",
            "attr", "set_attr", "class", "inherits", "is_null", "identity",
            "invisible", "print", "print.default", "stop", "copy",
            "slot", "slot_set", "get_option_from", "environment",
        },
        state_read={"options", "get_option"},
        rng={"set_seed", "rng_draw"},
        foreign={"foreign"},
        dynamic={
            "UseMethod", "standardGeneric", "setClass", "setGeneric", "setMethod",
            "setRefClass", "new",
        },
        global_ref={"globalenv"},
        local_assign={"assign"},
    )


# ---------------------------------------------------------------------------
# module loading

_IMPORT_RE = re.compile(r"^\s*import\s+([A-Za-z_.][A-Za-z0-9_.]*)\s*\(([^)]*)\)\s*$")

# operator spellings are grammar, not user-resolvable callees
_OPERATOR_NAMES = set(syntax.BINARY_OPS) | set(syntax.UNARY_OPS)


def parse_module(name: str, source: str, path=None) -> ModuleUnit:
    """Parse one module: leading `import mod (a, b)` header lines declare
    imports; the rest is ordinary source whose top-level function
    assignments are the module's definitions."""
    lines = source.split("\n")
    imports = []
    body_start = 0
    for i, line in enumerate(lines):
        m = _IMPORT_RE.match(line)
        if m:
            names = [n.strip() for n in m.group(2).split(",") if n.strip()]
            imports.append((m.group(1), names))
            lines[i] = ""  # keep line numbers stable
            body_start = i + 1
            continue
        if line.strip() == "" or line.lstrip().startswith("#"):
            continue
        break
    exprs = reader.parse_program("\n".join(lines))
    definitions = {}
    bindings = set()
    for e in exprs:
        if isinstance(e, syntax.Assign):
            bindings.add(e.target.name)
            if isinstance(e.value, syntax.FunctionLiteral):
                definitions[e.target.name] = e.value
    return ModuleUnit(name, definitions, bindings, imports, path)


# ---------------------------------------------------------------------------
# scanning: per-function local facts


class _Scope:
    def __init__(self, parent=None):
        self.names = set()
        self.parent = parent

    def resolves(self, name):
        scope = self
        while scope is not None:
            if name in scope.names:
                return True
            scope = scope.parent
        return False


def _collect_locals(body, scope):
    """Names assigned with `<-` anywhere in this function body (not in
    nested function literals) are local to the function."""
    stack = [body]
    while stack:
        e = stack.pop()
        if isinstance(e, syntax.FunctionLiteral):
            continue
        if isinstance(e, syntax.Assign):
            scope.names.add(e.target.name)
        # a literal name given to assign() becomes a local binding
        if (
            isinstance(e, syntax.Call)
            and isinstance(e.callee, syntax.Symbol)
            and e.callee.name == "assign"
            and e.args
            and isinstance(e.args[0][1], syntax.Constant)
            and e.args[0][1].value.kind == values.STRING
        ):
            scope.names.add(e.args[0][1].value.payload[0])
        stack.extend(syntax.child_expressions(e))


def _first_string_arg(args) -> Optional[str]:
    for name, arg in args:
        if name not in (None, "name", "tag"):
            continue
        if isinstance(arg, syntax.Constant) and arg.value.kind == values.STRING:
            if len(arg.value.payload) == 1:
                return arg.value.payload[0]
        return None
    return None


def scan_function(name: str, literal: syntax.FunctionLiteral) -> FunctionFacts:
    """Collect superassignments, interesting callees, and free names,
    each with its source location."""
    facts = FunctionFacts(name)

    def use_name(sym: syntax.Symbol, scope):
        if not scope.resolves(sym.name):
            facts.name_uses.setdefault(sym.name, sym.loc)

    def walk_function(fl: syntax.FunctionLiteral, parent_scope):
        scope = _Scope(parent_scope)
        scope.names.update(n for n, _ in fl.formals)
        _collect_locals(fl.body, scope)
        for _, default in fl.formals:
            if default is not None:
                walk(default, scope)
        walk(fl.body, scope)

    def walk(e, scope):
        if isinstance(e, syntax.Symbol):
            use_name(e, scope)
            return
        if isinstance(e, syntax.Constant):
            return
        if isinstance(e, syntax.FunctionLiteral):
            walk_function(e, scope)
            return
        call = syntax.as_call(e)
        callee = call.callee
        if isinstance(callee, syntax.Symbol):
            cname = callee.name
            if cname == "<<-":
                target, value = call.args[0][1], call.args[1][1]
                facts.violations.append(
                    Violation(
                        NONLOCAL_ASSIGNMENT,
                        e.loc[0],
                        e.loc[1],
                        syntax.deparse(e),
                        subject=getattr(target, "name", None),
                    )
                )
                walk(value, scope)
                return
            if cname == "<-":
                # target is local by _collect_locals; only the value is a use
                walk(call.args[1][1], scope)
                return
            if cname in ("{", "if", "while", "[", "[<-", "$", "$<-") or (
                cname in _OPERATOR_NAMES
            ):
                for _, arg in call.args:
                    walk(arg, scope)
                return
            if cname == "function":
                walk_function(e, scope)
                return
            if not scope.resolves(cname):
                has_envir = any(n == "envir" for n, _ in call.args) or (
                    sum(1 for n, _ in call.args if n is None) >= 3
                )
                facts.callees.append(
                    CalleeUse(cname, e.loc, _first_string_arg(call.args), has_envir)
                )
            for _, arg in call.args:
                walk(arg, scope)
            return
        # computed callee: the target of the call cannot be resolved statically
        facts.violations.append(
            Violation(
                DYNAMIC_CODE,
                callee.loc[0],
                callee.loc[1],
                f"computed callee: {syntax.deparse(callee)}",
            )
        )
        walk(callee, scope)
        for _, arg in call.args:
            walk(arg, scope)

    walk_function(literal, None)
    return facts


# ---------------------------------------------------------------------------
# resolution: classify free names and build call edges


def _builtin_violation(use: CalleeUse, policy: BuiltinPolicy, called: bool) -> Optional[Violation]:
    line, col = use.loc
    name = use.name
    if name in policy.pure:
        return None
    if name in policy.local_assign:
        if called and not use.has_envir:
            return None
        if called:
            return Violation(
                NONLOCAL_ASSIGNMENT, line, col,
                "assign() with an explicit target environment",
            )
        return None
    if name in policy.state_read:
        opt = use.first_string
        verb = "writes" if name == "options" else "reads"
        if opt is not None:
            return Violation(STATE_READ, line, col, f"{verb} option '{opt}'", subject=opt)
        return Violation(STATE_READ, line, col, f"{verb} a dynamically named option")
    if name in policy.rng:
        return Violation(RNG_DEPENDENCE, line, col, f"calls {name}()")
    if name in policy.foreign:
        tag = use.first_string
        detail = f"calls foreign('{tag}')" if tag else "calls foreign code"
        return Violation(FOREIGN_CODE, line, col, detail)
    if name in policy.global_ref:
        return Violation(GLOBAL_REFERENCE, line, col, "obtains the global environment")
    if name in policy.dynamic:
        return Violation(
            DYNAMIC_CODE, line, col,
            f"calls {name}(), whose meaning depends on runtime definitions",
        )
    return Violation(DYNAMIC_CODE, line, col, f"builtin '{name}' is not certified")


def resolve_names(
    module: ModuleUnit,
    facts: FunctionFacts,
    universe: dict,
    policy: BuiltinPolicy,
    builtin_names: set,
):
    """Classify every free name; returns (violations, edges) where edges
    point at (module, function) definitions."""
    violations = []
    edges = []

    import_map = {}
    for imp_module, names in module.imports:
        for n in names:
            import_map[n] = imp_module

    def resolve(name, loc, use: Optional[CalleeUse]):
        line, col = loc
        called = use is not None
        if name in module.definitions:
            edges.append((module.name, name))
            return
        if name in module.bindings:
            if called:
                violations.append(
                    Violation(
                        DYNAMIC_CODE, line, col,
                        f"'{name}' is not a statically defined function",
                    )
                )
            return
        if name in import_map:
            target = universe[import_map[name]]
            if name in target.definitions:
                edges.append((target.name, name))
            elif name in target.bindings:
                if called:
                    violations.append(
                        Violation(
                            DYNAMIC_CODE, line, col,
                            f"'{name}' is not a statically defined function",
                        )
                    )
            else:
                violations.append(
                    Violation(
                        GLOBAL_REFERENCE, line, col,
                        f"'{name}' is not defined by module '{target.name}'",
                    )
                )
            return
        if name in builtin_names:
            v = _builtin_violation(
                use if use is not None else CalleeUse(name, loc), policy, called
            )
            if v is not None:
                violations.append(v)
            return
        violations.append(
            Violation(
                GLOBAL_REFERENCE, line, col,
                f"'{name}' resolves to no local, module definition, import, or builtin",
            )
        )

    for use in facts.callees:
        resolve(use.name, use.loc, use)
    for name, loc in facts.name_uses.items():
        resolve(name, loc, None)
    return violations, edges


# ---------------------------------------------------------------------------
# propagation: bottom-up over strongly connected components


def _tarjan(nodes, adjacency):
    """Tarjan's algorithm; emits components callees-first."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    components = []
    counter = [0]

    def strongconnect(v):
        work = [(v, 0)]
        while work:
            node, pi = work[-1]
            if pi == 0:
                index[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack.add(node)
            recurse = False
            neighbors = adjacency.get(node, ())
            for i in range(pi, len(neighbors)):
                w = neighbors[i]
                if w not in index:
                    work[-1] = (node, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if recurse:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                components.append(comp)
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    for v in nodes:
        if v not in index:
            strongconnect(v)
    return components


def propagate(own_violations: dict, edges: dict) -> dict:
    """own_violations: node -> [Violation]; edges: node -> [node].
    Returns node -> Verdict, processing components in reverse topological
    order so verdicts flow from callees to callers."""
    nodes = list(own_violations)
    adjacency = {n: [t for t in edges.get(n, []) if t in own_violations] for n in nodes}
    components = _tarjan(nodes, adjacency)
    merged: dict = {}
    via: dict = {}
    for comp in components:
        comp_set = set(comp)
        reasons = set()
        contributors = set()
        for node in comp:
            reasons.update(own_violations[node])
            for target in adjacency[node]:
                if target in comp_set:
                    continue
                if merged[target]:
                    contributors.add(target[1])
                    contributors.update(via[target])
                    reasons.update(merged[target])
        for node in comp:
            node_via = set(contributors)
            if len(comp) > 1:
                # members of a cycle share the merged reason set
                node_via.update(
                    peer[1] for peer in comp if peer is not node and own_violations[peer]
                )
            merged[node] = set(reasons)
            via[node] = node_via
    verdicts = {}
    for node in nodes:
        reasons = sorted(merged[node], key=lambda v: (v.line, v.column, v.kind, v.detail))
        kinds = {v.kind for v in reasons}
        if kinds & _UNCERTIFIABLE_KINDS:
            status = UNCERTIFIABLE
        elif kinds:
            status = NONFUNCTIONAL
        else:
            status = FUNCTIONAL
        own = sorted(
            set(own_violations[node]), key=lambda v: (v.line, v.column, v.kind, v.detail)
        )
        verdicts[node] = Verdict(status, reasons, sorted(via[node]), own)
    return verdicts


# ---------------------------------------------------------------------------
# remediation


def suggest_remediation(reasons) -> list:
    suggestions = []

    def add(text):
        if text not in suggestions:
            suggestions.append(text)

    for kind in ALL_KINDS:
        for v in reasons:
            if v.kind != kind:
                continue
            if kind == NONLOCAL_ASSIGNMENT:
                add("return the value instead of assigning nonlocally")
            elif kind == STATE_READ:
                if v.subject:
                    add(f"lift option '{v.subject}' to an explicit parameter")
                else:
                    add("lift the option read to an explicit parameter")
            elif kind == RNG_DEPENDENCE:
                add("accept the generator's initial state as an argument")
                add("require explicit set_seed in reproducible examples")
            elif kind == GLOBAL_REFERENCE:
                add("declare an import or define locally")
            else:
                add("no automatic remediation; manual audit required")
    return suggestions


# ---------------------------------------------------------------------------
# whole-module analysis


def analyze_modules(modules, policy: Optional[BuiltinPolicy] = None) -> AnalysisReport:
    policy = policy if policy is not None else default_policy()
    builtin_names = set(BUILTIN_NAMES)
    universe = {}
    for m in modules:
        if m.name in universe:
            raise MlsError(f"duplicate module name '{m.name}'")
        universe[m.name] = m
    for m in modules:
        for imp_module, _ in m.imports:
            if imp_module not in universe:
                raise MlsError(f"module '{m.name}' imports unknown module '{imp_module}'")

    own: dict = {}
    edges: dict = {}
    for m in modules:
        for fname, literal in m.definitions.items():
            node = (m.name, fname)
            facts = scan_function(fname, literal)
            resolved, node_edges = resolve_names(m, facts, universe, policy, builtin_names)
            own[node] = list(facts.violations) + resolved
            edges[node] = node_edges
    verdicts = propagate(own, edges)

    module_reports = []
    counts = {FUNCTIONAL: 0, NONFUNCTIONAL: 0, UNCERTIFIABLE: 0}
    for m in modules:
        reports = []
        for fname in m.definitions:
            verdict = verdicts[(m.name, fname)]
            counts[verdict.status] += 1
            reports.append(
                FunctionReport(m.name, fname, verdict, suggest_remediation(verdict.reasons))
            )
        module_reports.append((m.name, reports))
    edge_list = sorted(
        (src, dst) for src, targets in edges.items() for dst in targets
    )
    return AnalysisReport(module_reports, edge_list, dict(counts))


def analyze_module(module: ModuleUnit, others=(), policy=None) -> AnalysisReport:
    return analyze_modules([module, *others], policy)


# ---------------------------------------------------------------------------
# report rendering


def report_as_dict(report: AnalysisReport) -> dict:
    return {
        "modules": [
            {
                "name": mname,
                "functions": [
                    {
                        "function": fr.name,
                        "status": fr.verdict.status,
                        "reasons": [
                            {
                                "kind": v.kind,
                                "line": v.line,
                                "column": v.column,
                                "detail": v.detail,
                            }
                            for v in fr.verdict.reasons
                        ],
                        "via": list(fr.verdict.via),
                        "suggestions": list(fr.suggestions),
                    }
                    for fr in reports
                ],
            }
            for mname, reports in report.modules
        ],
        "summary": {
            "functional": report.summary[FUNCTIONAL],
            "nonfunctional": report.summary[NONFUNCTIONAL],
            "uncertifiable": report.summary[UNCERTIFIABLE],
        },
    }


def render_json(report: AnalysisReport) -> str:
    return json.dumps(report_as_dict(report), sort_keys=True, indent=2) + "\n"


def render_text(report: AnalysisReport) -> str:
    lines = []
    for mname, reports in report.modules:
        lines.append(f"module {mname}")
        for fr in reports:
            lines.append(f"  {fr.name}: {fr.verdict.status.upper()}")
            for v in fr.verdict.reasons:
                lines.append(f"    - {v.kind} at {v.line}:{v.column}: {v.detail}")
            if fr.verdict.via:
                lines.append(f"    via: {', '.join(fr.verdict.via)}")
            for s in fr.suggestions:
                lines.append(f"    suggest: {s}")
    s = report.summary
    lines.append(
        "summary: "
        f"functional={s[FUNCTIONAL]} "
        f"nonfunctional={s[NONFUNCTIONAL]} "
        f"uncertifiable={s[UNCERTIFIABLE]}"
    )
    return "\n".join(lines) + "\n"
