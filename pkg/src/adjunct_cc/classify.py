"""Static decidability classification of pointer variables.

A pointer can receive an offset companion only if the container it is bound
to is uniquely determined at every point where its value is consumed.
Binding roots are tracked flow-sensitively per function: allocation sites,
parameters, call results, and variable addresses. Joins at control-flow
merges make the root set grow; a consuming use that observes more than one
possible root (or a possibly-uninitialized binding) disqualifies the
variable.

Pointer movement (`p += x`, `p++`, `p = p + x`) never changes the binding
root: that is the property the offset rewrite exploits. Unconditional
rebinding (`p = a; ... p = b;`) keeps each use at a single root and stays
supported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cast.nodes import (
    AddrOf, AllocExpr, AssignStmt, BinOp, BlockStmt, Call, DeclStmt, Deref,
    Expr, ExprStmt, FloatLit, ForStmt, FuncDef, IfStmt, IncDecStmt, IntLit,
    Member, Name, PointerType, ReturnStmt, Span, Stmt, Subscript,
    TranslationUnit, WhileStmt,
)
from .effects import EffectDatabase, builtin_database

DECIDABLE = "decidable"
CONDITIONAL_REASSIGNMENT = "conditional-reassignment"
ADDRESS_TAKEN_ESCAPE = "address-taken-escape"
HIGHER_ORDER_ITERATED = "higher-order-iterated"
UNSUPPORTED_ARITHMETIC = "unsupported-arithmetic"

# most severe first; a variable keeps the worst verdict observed
_VERDICT_ORDER = (
    ADDRESS_TAKEN_ESCAPE,
    HIGHER_ORDER_ITERATED,
    UNSUPPORTED_ARITHMETIC,
    CONDITIONAL_REASSIGNMENT,
)

_UNINIT = ("uninit",)
_UNKNOWN = ("unknown",)

_CMP_OPS = {"<", "<=", ">", ">=", "==", "!="}


@dataclass
class PointerClass:
    function: str
    variable: str
    verdict: str
    evidence: list[Span] = field(default_factory=list)


@dataclass
class Classification:
    """classify() result plus site-level facts the rewriter needs."""

    classes: list[PointerClass] = field(default_factory=list)
    # id(Subscript/Deref node) -> pointer variable whose binding the base
    # holds (the recursive higher-order case: base loads the value of a
    # tracked variable, so that variable's adjunct applies to the index)
    pointee_var: dict[int, str] = field(default_factory=dict)
    # id(BinOp node) -> True for pointer comparisons/differences where both
    # operands provably bind the same root (rewritable onto the adjuncts)
    same_root_cmp: dict[int, bool] = field(default_factory=dict)

    def verdict(self, function: str, variable: str) -> str | None:
        for c in self.classes:
            if c.function == function and c.variable == variable:
                return c.verdict
        return None

    def decidable(self, function: str) -> set[str]:
        return {c.variable for c in self.classes
                if c.function == function and c.verdict == DECIDABLE}


class _FunctionClassifier:
    def __init__(self, fn: FuncDef, db: EffectDatabase, defined: set[str],
                 out: Classification):
        self.fn = fn
        self.db = db
        self.defined = defined
        self.out = out
        self.ptypes: dict[str, PointerType] = {}
        self.flags: dict[str, list[tuple[str, Span]]] = {}
        self.recording = False

    # -- bookkeeping ----------------------------------------------------------

    def is_tracked(self, name: str) -> bool:
        return name in self.ptypes

    def flag(self, var: str, verdict: str, span: Span) -> None:
        if not self.recording:
            return
        self.flags.setdefault(var, []).append((verdict, span))

    def run(self) -> None:
        state: dict[str, frozenset] = {}
        for pname, ptype in self.fn.params:
            if isinstance(ptype, PointerType):
                self.ptypes[pname] = ptype
                state[pname] = frozenset([("param", pname)])
        # pass 1: reach a fixpoint without recording evidence
        self.recording = False
        self.exec_body(self.fn.body, dict(state))
        # pass 2: record evidence under the stable entry state
        self.recording = True
        self.exec_body(self.fn.body, dict(state))
        for var in self.ptypes:
            worst = None
            spans: list[Span] = []
            events = self.flags.get(var, [])
            for verdict in _VERDICT_ORDER:
                matching = [sp for v, sp in events if v == verdict]
                if matching:
                    worst = verdict
                    spans = matching
                    break
            self.out.classes.append(PointerClass(
                self.fn.name, var, worst or DECIDABLE, spans))

    # -- abstract state -------------------------------------------------------

    def join(self, a: dict, b: dict) -> dict:
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, frozenset()) | v
        return out

    def exec_body(self, body: list[Stmt], state: dict) -> dict:
        for st in body:
            state = self.exec_stmt(st, state)
        return state

    def exec_stmt(self, st: Stmt, state: dict) -> dict:
        if isinstance(st, DeclStmt):
            if isinstance(st.ctype, PointerType):
                self.ptypes[st.name] = st.ctype
                if st.init is None:
                    state[st.name] = frozenset([_UNINIT])
                else:
                    state[st.name] = self.roots_of(st.init, state, binding=True)
            elif st.init is not None:
                self.visit_value(st.init, state)
            return state
        if isinstance(st, AssignStmt):
            return self.exec_assign(st, state)
        if isinstance(st, IncDecStmt):
            t = st.target
            if isinstance(t, Name) and self.is_tracked(t.ident):
                self.note_move(t.ident, st.span, state)
                return state
            self.visit_store_target(t, state, st.span)
            return state
        if isinstance(st, ExprStmt):
            self.visit_value(st.expr, state)
            return self.apply_call_effects(st.expr, state)
        if isinstance(st, ReturnStmt):
            if st.value is not None:
                self.visit_value(st.value, state)
            return state
        if isinstance(st, BlockStmt):
            return self.exec_body(st.body, dict(state))
        if isinstance(st, IfStmt):
            self.visit_value(st.cond, state)
            s1 = self.exec_body(st.then_body, dict(state))
            s2 = self.exec_body(st.else_body, dict(state))
            return self.join(s1, s2)
        if isinstance(st, (ForStmt, WhileStmt)):
            return self.exec_loop(st, state)
        raise AssertionError(f"unhandled statement {type(st).__name__}")

    def exec_loop(self, st: Stmt, state: dict) -> dict:
        def body_once(s: dict) -> dict:
            s = dict(s)
            if isinstance(st, ForStmt):
                if st.init is not None:
                    s = self.exec_stmt(st.init, s)
                self.visit_value(st.cond, s)
                s = self.exec_body(st.body, s)
                if st.step is not None:
                    s = self.exec_stmt(st.step, s)
            else:
                self.visit_value(st.cond, s)
                s = self.exec_body(st.body, s)
            return s

        # fixpoint over the loop back edge; evidence recording is suppressed
        # during iteration so only the stable state produces flags
        was_recording = self.recording
        self.recording = False
        merged = dict(state)
        for _ in range(16):
            after = body_once(merged)
            joined = self.join(merged, after)
            if joined == merged:
                break
            merged = joined
        self.recording = was_recording
        final = body_once(merged)
        return self.join(merged, final)

    # -- assignments ----------------------------------------------------------

    def exec_assign(self, st: AssignStmt, state: dict) -> dict:
        lhs, rhs = st.lhs, st.rhs
        if isinstance(lhs, Name) and self.is_tracked(lhs.ident):
            var = lhs.ident
            if st.op in ("+=", "-="):
                self.visit_value(rhs, state)
                self.note_move(var, st.span, state)
                return state
            move = _self_move_operand(rhs, var)
            if move is not None:
                self.visit_value(move, state)
                self.note_move(var, st.span, state)
                return state
            state = dict(state)
            state[var] = self.roots_of(rhs, state, binding=True)
            return self.apply_call_effects(rhs, state)
        # store through something else
        self.visit_value(rhs, state)
        self.visit_store_target(lhs, state, st.span)
        return self.apply_call_effects(rhs, state)

    def note_move(self, var: str, span: Span, state: dict) -> None:
        if self.ptypes[var].order >= 2:
            self.flag(var, HIGHER_ORDER_ITERATED, span)
        self.require_single(var, span, state, "moved")

    def visit_store_target(self, lhs: Expr, state: dict, span: Span) -> None:
        """A write through an lvalue that is not a tracked variable."""
        if isinstance(lhs, (Subscript, Deref)):
            base = lhs.base if isinstance(lhs, Subscript) else lhs.operand
            if isinstance(lhs, Subscript):
                self.visit_value(lhs.index, state)
            # writing through a higher-order pointer mutates whatever
            # variable it aliases: that variable's binding escapes
            if base.ctype is not None and base.ctype.order >= 2:
                self.visit_access(base, state)
                for root in self.expr_roots(base, state):
                    if root[0] == "addr" and self.is_tracked(root[1]):
                        self.flag(root[1], ADDRESS_TAKEN_ESCAPE, span)
            else:
                self.visit_access(base, state)
            return
        if isinstance(lhs, Member):
            if lhs.arrow:
                self.visit_access(lhs.base, state)
            else:
                self.visit_value(lhs.base, state)
            return
        if isinstance(lhs, Name):
            return  # untracked scalar
        self.visit_value(lhs, state)

    def apply_call_effects(self, e: Expr, state: dict) -> dict:
        """Rebind pointers whose address went to an allocation-delegation call."""
        for call in _calls_in(e):
            delegating = self.db.is_allocation_delegation(call.callee)
            for arg in call.args:
                if isinstance(arg, AddrOf) and isinstance(arg.operand, Name):
                    v = arg.operand.ident
                    if not self.is_tracked(v):
                        continue
                    if delegating:
                        state = dict(state)
                        state[v] = frozenset([("call", _key(call.span))])
                    # non-delegating escape is flagged in visit_value
        return state

    # -- expression walks ------------------------------------------------------

    def require_single(self, var: str, span: Span, state: dict, why: str) -> None:
        roots = state.get(var, frozenset([_UNINIT]))
        if len(roots) != 1 or _UNINIT in roots or _UNKNOWN in roots:
            self.flag(var, CONDITIONAL_REASSIGNMENT, span)

    def visit_access(self, e: Expr, state: dict) -> None:
        """Pointer consumed as an access base (subscript/deref/member)."""
        if isinstance(e, Name) and self.is_tracked(e.ident):
            self.require_single(e.ident, e.span, state, "accessed")
            return
        self.visit_value(e, state)

    def visit_value(self, e: Expr, state: dict) -> None:
        """Generic walk; flags every disqualifying consumption."""
        if e is None or isinstance(e, (IntLit, FloatLit)):
            return
        if isinstance(e, Name):
            if self.is_tracked(e.ident):
                self.require_single(e.ident, e.span, state, "used")
                # a leaked higher-order pointer lets its captured target be
                # read or moved behind our back: that target must stay raw
                if self.ptypes[e.ident].order >= 2:
                    for root in state.get(e.ident, frozenset()):
                        if root[0] == "addr" and self.is_tracked(root[1]):
                            self.flag(root[1], ADDRESS_TAKEN_ESCAPE, e.span)
            return
        if isinstance(e, Subscript):
            self.visit_access(e.base, state)
            self._resolve_pointee(e, e.base, state)
            self.visit_value(e.index, state)
            return
        if isinstance(e, Deref):
            self.visit_access(e.operand, state)
            self._resolve_pointee(e, e.operand, state)
            return
        if isinstance(e, Member):
            if e.arrow:
                self.visit_access(e.base, state)
            else:
                self.visit_value(e.base, state)
            return
        if isinstance(e, AddrOf):
            op = e.operand
            if isinstance(op, Name) and self.is_tracked(op.ident):
                # only a direct allocation-delegation argument keeps this
                # benign; that context is handled in visit_call_args
                self.flag(op.ident, ADDRESS_TAKEN_ESCAPE, e.span)
                return
            self.visit_value(op, state)
            return
        if isinstance(e, BinOp):
            self.visit_binop(e, state)
            return
        if isinstance(e, Call):
            self.visit_call_args(e, state)
            return
        if isinstance(e, AllocExpr):
            self.visit_value(e.count, state)
            return

    def visit_call_args(self, call: Call, state: dict) -> None:
        delegating = self.db.is_allocation_delegation(call.callee)
        for arg in call.args:
            if isinstance(arg, AddrOf) and isinstance(arg.operand, Name) \
                    and self.is_tracked(arg.operand.ident):
                v = arg.operand.ident
                if delegating:
                    continue  # callee only rebinds; binding stays tracked
                self.flag(v, ADDRESS_TAKEN_ESCAPE, arg.span)
                continue
            self.visit_value(arg, state)

    def visit_binop(self, e: BinOp, state: dict) -> None:
        lt, rt = e.lhs.ctype, e.rhs.ctype
        both_pointers = (lt is not None and lt.is_pointer()
                         and rt is not None and rt.is_pointer())
        if both_pointers and (e.op in _CMP_OPS or e.op == "-"):
            lroots = self.expr_roots(e.lhs, state)
            rroots = self.expr_roots(e.rhs, state)
            ok = (len(lroots) == 1 and lroots == rroots
                  and _UNINIT not in lroots and _UNKNOWN not in lroots
                  and _vars_of(e.lhs) is not None and _vars_of(e.rhs) is not None)
            if self.recording:
                self.out.same_root_cmp[id(e)] = ok
            if not ok:
                for side in (e.lhs, e.rhs):
                    for v in _vars_of(side) or self._tracked_names(side):
                        if self.is_tracked(v):
                            self.flag(v, UNSUPPORTED_ARITHMETIC, e.span)
            else:
                for side in (e.lhs, e.rhs):
                    for v in _vars_of(side):
                        if self.is_tracked(v):
                            self.require_single(v, e.span, state, "compared")
            return
        self.visit_value(e.lhs, state)
        self.visit_value(e.rhs, state)

    def _tracked_names(self, e: Expr) -> list[str]:
        out = []
        stack = [e]
        while stack:
            n = stack.pop()
            if isinstance(n, Name) and self.is_tracked(n.ident):
                out.append(n.ident)
            for attr in ("base", "index", "operand", "lhs", "rhs", "count"):
                v = getattr(n, attr, None)
                if isinstance(v, Expr):
                    stack.append(v)
            for a in getattr(n, "args", []) or []:
                stack.append(a)
        return out

    def _resolve_pointee(self, node: Expr, base: Expr, state: dict) -> None:
        """Record which tracked variable a higher-order load aliases.

        When the alias cannot be pinned to exactly one variable, any captured
        variable in the root set escapes: the rewriter could not apply its
        companion at this load, so the variable must keep raw movement.
        """
        if base.ctype is None or base.ctype.order < 2:
            return
        roots = self.expr_roots(base, state)
        addr_targets = [r[1] for r in roots
                        if r[0] == "addr" and self.is_tracked(r[1])]
        if len(roots) == 1 and len(addr_targets) == 1:
            if self.recording:
                self.out.pointee_var[id(node)] = addr_targets[0]
            return
        for v in addr_targets:
            self.flag(v, ADDRESS_TAKEN_ESCAPE, node.span)

    # -- roots -----------------------------------------------------------------

    def expr_roots(self, e: Expr, state: dict) -> frozenset:
        return self.roots_of(e, state, binding=False)

    def roots_of(self, e: Expr, state: dict, binding: bool) -> frozenset:
        """Abstract container roots of a pointer-valued expression.

        With binding=True the walk also flags consumption of tracked
        sub-expressions the way a use does.
        """
        if isinstance(e, Name):
            if self.is_tracked(e.ident):
                if binding:
                    self.require_single(e.ident, e.span, state, "copied")
                return state.get(e.ident, frozenset([_UNINIT]))
            return frozenset([_UNKNOWN])
        if isinstance(e, AllocExpr):
            if binding:
                self.visit_value(e.count, state)
            return frozenset([("alloc", _key(e.span))])
        if isinstance(e, Call):
            if binding:
                self.visit_call_args(e, state)
            return frozenset([("call", _key(e.span))])
        if isinstance(e, AddrOf):
            op = e.operand
            if isinstance(op, Name):
                return frozenset([("addr", op.ident)])
            if isinstance(op, Subscript):
                if binding:
                    self.visit_value(op.index, state)
                    self.visit_access(op.base, state)
                return self.expr_roots(op.base, state)
            if isinstance(op, Member):
                if binding:
                    self.visit_value(op, state)
                return frozenset([("member", _key(e.span))])
            return frozenset([_UNKNOWN])
        if isinstance(e, BinOp) and e.op in ("+", "-"):
            lt = e.lhs.ctype
            rt = e.rhs.ctype
            if lt is not None and lt.is_pointer():
                if binding:
                    self.visit_value(e.rhs, state)
                return self.roots_of(e.lhs, state, binding)
            if rt is not None and rt.is_pointer():
                if binding:
                    self.visit_value(e.lhs, state)
                return self.roots_of(e.rhs, state, binding)
        if isinstance(e, (Subscript, Deref)):
            base = e.base if isinstance(e, Subscript) else e.operand
            if binding:
                self.visit_value(e, state)
            if base.ctype is not None and base.ctype.order >= 2:
                roots = self.expr_roots(base, state)
                if len(roots) == 1:
                    (root,) = roots
                    if root[0] == "addr" and self.is_tracked(root[1]):
                        return state.get(root[1], frozenset([_UNINIT]))
            return frozenset([_UNKNOWN])
        if binding:
            self.visit_value(e, state)
        return frozenset([_UNKNOWN])


def _key(span: Span) -> tuple[int, int]:
    return (span.line, span.column)


def _self_move_operand(rhs: Expr, var: str):
    """For `p = p + x` / `p = x + p` / `p = p - x`, the integer operand."""
    if not isinstance(rhs, BinOp) or rhs.op not in ("+", "-"):
        return None
    if isinstance(rhs.lhs, Name) and rhs.lhs.ident == var:
        if rhs.rhs.ctype is not None and rhs.rhs.ctype.is_pointer():
            return None
        return rhs.rhs
    if rhs.op == "+" and isinstance(rhs.rhs, Name) and rhs.rhs.ident == var:
        return rhs.lhs
    return None


def _vars_of(e: Expr) -> list[str] | None:
    """Pointer variable names in a Name / Name±int chain, else None."""
    if isinstance(e, Name):
        return [e.ident]
    if isinstance(e, BinOp) and e.op in ("+", "-"):
        sub = _vars_of(e.lhs) if (
            e.lhs.ctype is not None and e.lhs.ctype.is_pointer()) else (
            _vars_of(e.rhs) if e.rhs.ctype is not None and e.rhs.ctype.is_pointer()
            else None)
        return sub
    return None


def _calls_in(e: Expr) -> list[Call]:
    out = []
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Call):
            out.append(n)
            stack.extend(n.args)
            continue
        for attr in ("base", "index", "operand", "lhs", "rhs", "count", "init"):
            v = getattr(n, attr, None)
            if isinstance(v, Expr):
                stack.append(v)
    return out


def classify(tu: TranslationUnit, db: EffectDatabase | None = None) -> Classification:
    """One verdict per pointer-typed local/parameter of every defined function.

    The effect database supplies the allocation-delegation whitelist; the
    built-in entries are used when none is given.
    """
    if db is None:
        db = builtin_database()
    defined = {f.name for f in tu.functions if f.body is not None}
    out = Classification()
    for fn in tu.functions:
        if fn.body is None:
            continue
        _FunctionClassifier(fn, db, defined, out).run()
    return out
