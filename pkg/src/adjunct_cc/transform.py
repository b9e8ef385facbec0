"""The pointer-disaggregation rewrite.

Every decidable pointer p gets a fresh signed 64-bit companion p_adj holding
its offset (in elements) from the container it is bound to. Movement goes to
the companion, accesses add it to the index, and any context that consumes
the pointer's raw value receives `p + p_adj` instead. Non-decidable pointers
and all their uses are left verbatim and reported.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .cast.nodes import (
    ADJUNCT_TYPE, AddrOf, AllocExpr, AssignStmt, BinOp, BlockStmt, Call,
    DeclStmt, Deref, Expr, ExprStmt, FloatLit, ForStmt, FuncDef, IfStmt,
    IncDecStmt, IntLit, Member, Name, PointerType, ReturnStmt, Span, Stmt,
    Subscript, TranslationUnit, WhileStmt, walk,
)
from .cast.parser import _Checker
from .classify import Classification, classify
from .effects import EffectDatabase, builtin_database
from .errors import CompileError

DEREF = "deref"
SUBSCRIPT = "subscript"
MOVE = "move"
POINTER_ASSIGN = "pointer-assign"
CALL_SITE = "call-site"

RULE_KINDS = (DEREF, SUBSCRIPT, MOVE, POINTER_ASSIGN, CALL_SITE)


class InternalInvariantError(Exception):
    """The rewriter produced an ill-formed unit; a bug, not a user error."""


@dataclass
class AdjunctPlan:
    # function name -> pointer variable -> companion variable
    mapping: dict[str, dict[str, str]] = field(default_factory=dict)
    adjunct_type = ADJUNCT_TYPE
    classes: list = field(default_factory=list)

    def adjunct_of(self, function: str, variable: str) -> str | None:
        return self.mapping.get(function, {}).get(variable)


@dataclass
class BackOff:
    function: str
    variable: str
    verdict: str
    span: Span


@dataclass
class TransformDiagnostics:
    backed_off: list[BackOff] = field(default_factory=list)
    rewritten_sites: dict[str, int] = field(
        default_factory=lambda: {k: 0 for k in RULE_KINDS})


def fresh_name(base: str, taken: set[str]) -> str:
    """base_adj, or the lowest-numbered base_adjN not yet taken."""
    name = base + "_adj"
    counter = 0
    while name in taken:
        counter += 1
        name = f"{base}_adj{counter}"
    taken.add(name)
    return name


def normalize_derefs(tu: TranslationUnit) -> TranslationUnit:
    """Rewrite every unary `*e` into `e[0]`; the input is left untouched."""
    tu = copy.deepcopy(tu)
    for fn in tu.functions:
        if fn.body is not None:
            fn.body = [_normalize_stmt(st) for st in fn.body]
    return tu


def _normalize_stmt(st: Stmt) -> Stmt:
    for name in ("init", "cond", "step", "expr", "value", "lhs", "rhs", "target"):
        v = getattr(st, name, None)
        if isinstance(v, Expr):
            setattr(st, name, _normalize_expr(v))
        elif isinstance(v, Stmt):
            setattr(st, name, _normalize_stmt(v))
    for name in ("body", "then_body", "else_body"):
        v = getattr(st, name, None)
        if v is not None:
            setattr(st, name, [_normalize_stmt(s) for s in v])
    return st


def _normalize_expr(e: Expr) -> Expr:
    if isinstance(e, Deref):
        inner = _normalize_expr(e.operand)
        return Subscript(inner, IntLit(0, span=e.span),
                         span=e.span, ctype=e.ctype)
    for name in ("base", "index", "operand", "lhs", "rhs", "count"):
        v = getattr(e, name, None)
        if isinstance(v, Expr):
            setattr(e, name, _normalize_expr(v))
    if isinstance(e, Call):
        e.args = [_normalize_expr(a) for a in e.args]
    return e


# ---------------------------------------------------------------------------


class _FunctionRewriter:
    def __init__(self, fn: FuncDef, mapping: dict[str, str],
                 cls: Classification, db: EffectDatabase,
                 diag: TransformDiagnostics):
        self.fn = fn
        self.mapping = mapping
        self.cls = cls
        self.db = db
        self.diag = diag
        self.pending_resets: list[AssignStmt] = []

    def count(self, kind: str, n: int = 1) -> None:
        self.diag.rewritten_sites[kind] += n

    def run(self) -> None:
        body = self.rewrite_body(self.fn.body)
        prelude: list[Stmt] = []
        for pname, ptype in self.fn.params:
            adj = self.mapping.get(pname)
            if adj is not None:
                prelude.append(self._adj_decl(adj, IntLit(0), self.fn.span))
        self.fn.body = prelude + body

    # -- statements -----------------------------------------------------------

    def rewrite_body(self, body: list[Stmt]) -> list[Stmt]:
        out: list[Stmt] = []
        for st in body:
            out.extend(self.rewrite_stmt(st))
        return out

    def rewrite_stmt(self, st: Stmt) -> list[Stmt]:
        self.pending_resets = []
        stmts = self._rewrite_stmt_inner(st)
        if self.pending_resets:
            stmts = stmts + self.pending_resets
            self.pending_resets = []
        return stmts

    def _rewrite_stmt_inner(self, st: Stmt) -> list[Stmt]:
        if isinstance(st, DeclStmt):
            return self.rewrite_decl(st)
        if isinstance(st, AssignStmt):
            return self.rewrite_assign(st)
        if isinstance(st, IncDecStmt):
            t = st.target
            if isinstance(t, Name) and t.ident in self.mapping:
                self.count(MOVE)
                adj = Name(self.mapping[t.ident], span=t.span, ctype=ADJUNCT_TYPE)
                return [IncDecStmt(adj, st.delta, span=st.span)]
            return [IncDecStmt(self.rewrite_value(t), st.delta, span=st.span)]
        if isinstance(st, ExprStmt):
            return [ExprStmt(self.rewrite_value(st.expr), span=st.span)]
        if isinstance(st, ReturnStmt):
            v = self.rewrite_value(st.value) if st.value is not None else None
            return [ReturnStmt(v, span=st.span)]
        if isinstance(st, BlockStmt):
            return [BlockStmt(self.rewrite_body(st.body), span=st.span)]
        if isinstance(st, IfStmt):
            cond = self.rewrite_value(st.cond)
            self._no_resets_in_condition(st)
            return [IfStmt(cond,
                           self.rewrite_body(st.then_body),
                           self.rewrite_body(st.else_body), span=st.span)]
        if isinstance(st, WhileStmt):
            cond = self.rewrite_value(st.cond)
            self._no_resets_in_condition(st)
            return [WhileStmt(cond, self.rewrite_body(st.body), span=st.span)]
        if isinstance(st, ForStmt):
            return self.rewrite_for(st)
        raise AssertionError(f"unhandled statement {type(st).__name__}")

    def _no_resets_in_condition(self, st: Stmt) -> None:
        if self.pending_resets:
            raise InternalInvariantError(
                f"{st.span}: allocation-delegation call inside a condition "
                "has no place for the companion reset")

    def rewrite_for(self, st: ForStmt) -> list[Stmt]:
        before: list[Stmt] = []
        init = None
        if st.init is not None:
            parts = self._rewrite_stmt_inner(st.init)
            if self.pending_resets:
                raise InternalInvariantError(
                    f"{st.span}: allocation-delegation call in a for "
                    "initializer has no place for the companion reset")
            # a pointer decl in the init slot keeps the slot; its companion
            # declaration is hoisted in front of the loop (pure, no events)
            if isinstance(st.init, DeclStmt) and len(parts) > 1:
                init = next(p for p in parts if isinstance(p, DeclStmt)
                            and p.name == st.init.name)
                before = [p for p in parts if p is not init]
            elif len(parts) == 1:
                init = parts[0]
            else:
                init = parts[0]
                before = parts[1:]
        cond = self.rewrite_value(st.cond)
        self._no_resets_in_condition(st)
        body = self.rewrite_body(st.body)
        step = None
        if st.step is not None:
            parts = self._rewrite_stmt_inner(st.step)
            step_resets = self.pending_resets
            self.pending_resets = []
            if len(parts) == 1 and not step_resets:
                step = parts[0]
            else:
                # multi-statement step (pointer rebinding): fold into the
                # body tail; the subset has no continue, so this is exact
                body = body + parts + step_resets
        return before + [ForStmt(init, cond, step, body, span=st.span)]

    def rewrite_decl(self, st: DeclStmt) -> list[Stmt]:
        adj = self.mapping.get(st.name)
        if adj is None:
            init = self.rewrite_value(st.init) if st.init is not None else None
            return [DeclStmt(st.name, st.ctype, init, span=st.span)]
        decl_init, adj_init = self.split_binding(st.init, st.span)
        if st.init is not None:
            self.count(POINTER_ASSIGN)
        return [DeclStmt(st.name, st.ctype, decl_init, span=st.span),
                self._adj_decl(adj, adj_init, st.span)]

    def rewrite_assign(self, st: AssignStmt) -> list[Stmt]:
        lhs, rhs = st.lhs, st.rhs
        if isinstance(lhs, Name) and lhs.ident in self.mapping:
            adj = self.mapping[lhs.ident]
            adj_name = lambda: Name(adj, span=lhs.span, ctype=ADJUNCT_TYPE)
            if st.op in ("+=", "-="):
                self.count(MOVE)
                return [AssignStmt(adj_name(), st.op,
                                   self.rewrite_value(rhs), span=st.span)]
            move = _self_move(rhs, lhs.ident)
            if move is not None:
                op, amount, swapped = move
                self.count(MOVE)
                amount = self.rewrite_value(amount)
                if swapped:
                    new_rhs = BinOp(op, amount, adj_name(),
                                    span=rhs.span, ctype=ADJUNCT_TYPE)
                else:
                    new_rhs = BinOp(op, adj_name(), amount,
                                    span=rhs.span, ctype=ADJUNCT_TYPE)
                return [AssignStmt(adj_name(), "=", new_rhs, span=st.span)]
            bind_init, adj_init = self.split_binding(rhs, st.span)
            self.count(POINTER_ASSIGN)
            return [AssignStmt(Name(lhs.ident, span=lhs.span, ctype=lhs.ctype),
                               "=", bind_init, span=st.span),
                    AssignStmt(adj_name(), "=", adj_init, span=st.span)]
        return [AssignStmt(self.rewrite_value(lhs), st.op,
                           self.rewrite_value(rhs), span=st.span)]

    def split_binding(self, rhs: Expr | None, span: Span) -> tuple[Expr | None, Expr]:
        """Binding of a mapped pointer: (container expression, companion value)."""
        zero = IntLit(0, span=span, ctype=ADJUNCT_TYPE)
        if rhs is None:
            return None, zero
        if isinstance(rhs, Name) and rhs.ident in self.mapping:
            q_adj = Name(self.mapping[rhs.ident], span=rhs.span, ctype=ADJUNCT_TYPE)
            return copy.deepcopy(rhs), q_adj
        offset = _offset_binding(rhs, self.mapping)
        if offset is not None:
            base, adj_expr = offset
            return copy.deepcopy(base), self.rewrite_value_with_adj(adj_expr)
        if isinstance(rhs, AddrOf) and isinstance(rhs.operand, Subscript):
            sub = rhs.operand
            if isinstance(sub.base, Name) and (sub.base.ctype is not None
                                               and sub.base.ctype.is_pointer()):
                index = self.rewrite_value(sub.index)
                base_adj = self.mapping.get(sub.base.ident)
                if base_adj is not None:
                    return (copy.deepcopy(sub.base),
                            _add_adj(index, base_adj, sub.span))
                return AddrOf(Subscript(copy.deepcopy(sub.base), index,
                                        span=sub.span, ctype=sub.ctype),
                              span=rhs.span, ctype=rhs.ctype), zero
        if isinstance(rhs, Subscript):
            # binding from a load through a higher-order pointer: the cell
            # holds the aliased variable's raw base, its companion is the
            # inherited offset
            pointee = self.cls.pointee_var.get(id(rhs))
            if pointee is not None and pointee in self.mapping:
                load = self.rewrite_subscript(rhs)
                return load, Name(self.mapping[pointee], span=rhs.span,
                                  ctype=ADJUNCT_TYPE)
        return self.rewrite_value(rhs), zero

    def rewrite_value_with_adj(self, pair) -> Expr:
        op, lhs_expr, rhs_expr = pair
        return BinOp(op, lhs_expr, self.rewrite_value(rhs_expr),
                     ctype=ADJUNCT_TYPE, span=lhs_expr.span)

    def _adj_decl(self, adj: str, init: Expr, span: Span) -> DeclStmt:
        return DeclStmt(adj, ADJUNCT_TYPE, init, span=span)

    # -- expressions -----------------------------------------------------------

    def rewrite_value(self, e: Expr) -> Expr:
        """Rewrite an expression in value position."""
        if e is None or isinstance(e, (IntLit, FloatLit)):
            return copy.deepcopy(e) if e is not None else None
        if isinstance(e, Name):
            adj = self.mapping.get(e.ident)
            if adj is not None:
                self.count(POINTER_ASSIGN)
                return BinOp("+", copy.deepcopy(e),
                             Name(adj, span=e.span, ctype=ADJUNCT_TYPE),
                             span=e.span, ctype=e.ctype)
            return copy.deepcopy(e)
        if isinstance(e, Subscript):
            new_e = self.rewrite_subscript(e)
            # the value read through a higher-order pointer is the raw base of
            # the aliased variable; its companion restores the true position
            pointee = self.cls.pointee_var.get(id(e))
            if pointee is not None and pointee in self.mapping:
                self.count(POINTER_ASSIGN)
                return BinOp("+", new_e,
                             Name(self.mapping[pointee], span=e.span,
                                  ctype=ADJUNCT_TYPE),
                             span=e.span, ctype=e.ctype)
            return new_e
        if isinstance(e, Deref):
            raise InternalInvariantError(
                f"{e.span}: dereference survived normalization")
        if isinstance(e, Member):
            if e.arrow and isinstance(e.base, Name) and e.base.ident in self.mapping:
                self.count(DEREF)
                adj = self.mapping[e.base.ident]
                cell = Subscript(copy.deepcopy(e.base),
                                 Name(adj, span=e.span, ctype=ADJUNCT_TYPE),
                                 span=e.span, ctype=e.base.ctype.pointee)
                return Member(cell, e.field_name, arrow=False,
                              span=e.span, ctype=e.ctype)
            return Member(self.rewrite_value(e.base), e.field_name,
                          arrow=e.arrow, span=e.span, ctype=e.ctype)
        if isinstance(e, AddrOf):
            op = e.operand
            if isinstance(op, Name):
                return copy.deepcopy(e)  # delegation args; escaped otherwise
            return AddrOf(self.rewrite_value(op), span=e.span, ctype=e.ctype)
        if isinstance(e, BinOp):
            return self.rewrite_binop(e)
        if isinstance(e, Call):
            return self.rewrite_call(e)
        if isinstance(e, AllocExpr):
            return AllocExpr(e.elem_type, self.rewrite_value(e.count),
                             span=e.span, ctype=e.ctype)
        raise AssertionError(f"unhandled expression {type(e).__name__}")

    def rewrite_subscript(self, e: Subscript) -> Expr:
        """The access itself; callers add load-materialization if needed."""
        index = self.rewrite_value(e.index)
        base = e.base
        if isinstance(base, Name):
            adj = self.mapping.get(base.ident)
            if adj is not None:
                self.count(SUBSCRIPT)
                return Subscript(copy.deepcopy(base), _add_adj(index, adj, e.span),
                                 span=e.span, ctype=e.ctype)
            new_base: Expr = copy.deepcopy(base)
        else:
            # base is itself a load; the index absorbs the companion of the
            # variable that load aliases (the recursive higher-order rule)
            if isinstance(base, Subscript):
                new_base = self.rewrite_subscript(base)
            else:
                new_base = self.rewrite_value(base)
            pointee = self.cls.pointee_var.get(id(base))
            if pointee is not None and pointee in self.mapping:
                self.count(SUBSCRIPT)
                index = _add_adj(index, self.mapping[pointee], e.span)
        return Subscript(new_base, index, span=e.span, ctype=e.ctype)

    def rewrite_binop(self, e: BinOp) -> Expr:
        if self.cls.same_root_cmp.get(id(e)):
            lhs = self._to_adjunct_expr(e.lhs)
            rhs = self._to_adjunct_expr(e.rhs)
            if lhs is not None and rhs is not None:
                self.count(POINTER_ASSIGN)
                return BinOp(e.op, lhs, rhs, span=e.span, ctype=e.ctype)
        return BinOp(e.op, self.rewrite_value(e.lhs),
                     self.rewrite_value(e.rhs), span=e.span, ctype=e.ctype)

    def _to_adjunct_expr(self, e: Expr) -> Expr | None:
        """p -> p_adj; p ± k -> p_adj ± k, for same-container comparisons."""
        if isinstance(e, Name):
            adj = self.mapping.get(e.ident)
            if adj is None:
                return None
            return Name(adj, span=e.span, ctype=ADJUNCT_TYPE)
        if isinstance(e, BinOp) and e.op in ("+", "-"):
            if e.lhs.ctype is not None and e.lhs.ctype.is_pointer():
                inner = self._to_adjunct_expr(e.lhs)
                if inner is None:
                    return None
                return BinOp(e.op, inner, self.rewrite_value(e.rhs),
                             span=e.span, ctype=ADJUNCT_TYPE)
            if e.op == "+" and e.rhs.ctype is not None and e.rhs.ctype.is_pointer():
                inner = self._to_adjunct_expr(e.rhs)
                if inner is None:
                    return None
                return BinOp(e.op, self.rewrite_value(e.lhs), inner,
                             span=e.span, ctype=ADJUNCT_TYPE)
        return None

    def rewrite_call(self, e: Call) -> Expr:
        delegating = self.db.is_allocation_delegation(e.callee)
        args: list[Expr] = []
        for arg in e.args:
            if isinstance(arg, AddrOf) and isinstance(arg.operand, Name):
                v = arg.operand.ident
                if v in self.mapping and delegating:
                    # callee rebinds the container; offset restarts at zero
                    args.append(copy.deepcopy(arg))
                    self.count(CALL_SITE)
                    self.pending_resets.append(AssignStmt(
                        Name(self.mapping[v], span=arg.span, ctype=ADJUNCT_TYPE),
                        "=", IntLit(0, span=arg.span, ctype=ADJUNCT_TYPE),
                        span=arg.span))
                    continue
                args.append(copy.deepcopy(arg))
                continue
            if isinstance(arg, Name) and arg.ident in self.mapping:
                self.count(CALL_SITE)
                adj = self.mapping[arg.ident]
                args.append(BinOp("+", copy.deepcopy(arg),
                                  Name(adj, span=arg.span, ctype=ADJUNCT_TYPE),
                                  span=arg.span, ctype=arg.ctype))
                continue
            args.append(self.rewrite_value(arg))
        return Call(e.callee, args, span=e.span, ctype=e.ctype)


def _add_adj(index: Expr, adj: str, span: Span) -> Expr:
    """index + adj, collapsing a literal-zero index to the bare companion."""
    adj_name = Name(adj, span=span, ctype=ADJUNCT_TYPE)
    if isinstance(index, IntLit) and index.value == 0:
        return adj_name
    return BinOp("+", index, adj_name, span=span, ctype=ADJUNCT_TYPE)


def _self_move(rhs: Expr, var: str):
    """`p = p ◇ x` forms: (op, amount expression, operands swapped?)."""
    if not isinstance(rhs, BinOp) or rhs.op not in ("+", "-"):
        return None
    if isinstance(rhs.lhs, Name) and rhs.lhs.ident == var:
        if rhs.rhs.ctype is not None and rhs.rhs.ctype.is_pointer():
            return None
        return (rhs.op, rhs.rhs, False)
    if rhs.op == "+" and isinstance(rhs.rhs, Name) and rhs.rhs.ident == var:
        return (rhs.op, rhs.lhs, True)
    return None


def _offset_binding(rhs: Expr, mapping: dict[str, str]):
    """`q ◇ x` with q mapped: the base name and the companion initializer."""
    if not isinstance(rhs, BinOp) or rhs.op not in ("+", "-"):
        return None
    if isinstance(rhs.lhs, Name) and rhs.lhs.ident in mapping \
            and rhs.lhs.ctype is not None and rhs.lhs.ctype.is_pointer() \
            and not (rhs.rhs.ctype is not None and rhs.rhs.ctype.is_pointer()):
        q_adj = Name(mapping[rhs.lhs.ident], span=rhs.lhs.span, ctype=ADJUNCT_TYPE)
        return rhs.lhs, (rhs.op, q_adj, rhs.rhs)
    if rhs.op == "+" and isinstance(rhs.rhs, Name) and rhs.rhs.ident in mapping \
            and rhs.rhs.ctype is not None and rhs.rhs.ctype.is_pointer():
        q_adj = Name(mapping[rhs.rhs.ident], span=rhs.rhs.span, ctype=ADJUNCT_TYPE)
        return rhs.rhs, (rhs.op, q_adj, rhs.lhs)
    return None


def _collect_identifiers(tu: TranslationUnit, fn: FuncDef) -> set[str]:
    taken = {f.name for f in tu.functions}
    taken.add("alloc")
    taken.update(r.name for r in tu.records)
    for r in tu.records:
        taken.update(fname for fname, _ in r.fields)
    taken.update(n for n, _ in fn.params)
    for node in [s for s in fn.body or []]:
        for sub in walk(node):
            if isinstance(sub, DeclStmt):
                taken.add(sub.name)
            elif isinstance(sub, Name):
                taken.add(sub.ident)
    return taken


def transform(
    tu: TranslationUnit,
    db: EffectDatabase | None = None,
) -> tuple[TranslationUnit, AdjunctPlan, TransformDiagnostics]:
    """Disaggregate every decidable pointer of every defined function.

    Accepts un-normalized input; `*e` is normalized to `e[0]` first and those
    sites are counted under the 'deref' rule kind.
    """
    if db is None:
        db = builtin_database()
    diag = TransformDiagnostics()
    deref_sites = sum(1 for n in _walk_all(tu) if isinstance(n, Deref))
    tu = normalize_derefs(tu)
    diag.rewritten_sites[DEREF] += deref_sites
    cls = classify(tu, db)
    plan = AdjunctPlan(classes=cls.classes)
    for c in cls.classes:
        if c.verdict != "decidable":
            span = c.evidence[0] if c.evidence else (
                tu.function(c.function).span if tu.function(c.function) else None)
            diag.backed_off.append(BackOff(c.function, c.variable, c.verdict, span))
    for fn in tu.functions:
        if fn.body is None:
            continue
        decidable = cls.decidable(fn.name)
        taken = _collect_identifiers(tu, fn)
        mapping: dict[str, str] = {}
        order: list[str] = [n for n, t in fn.params if n in decidable]
        for top in fn.body:
            for node in walk(top):
                if isinstance(node, DeclStmt) and node.name in decidable \
                        and node.name not in order:
                    order.append(node.name)
        for var in order:
            mapping[var] = fresh_name(var, taken)
        plan.mapping[fn.name] = mapping
        _FunctionRewriter(fn, mapping, cls, db, diag).run()
    _validate(tu)
    return tu, plan, diag


def _walk_all(tu: TranslationUnit):
    for fn in tu.functions:
        for st in fn.body or []:
            yield from walk(st)


def _validate(tu: TranslationUnit) -> None:
    """Re-run the type checker over the rewritten unit; exit-code-2 material."""
    try:
        _Checker(tu).run()
    except CompileError as exc:
        raise InternalInvariantError(
            f"transformed unit fails to type-check: {exc}") from exc
