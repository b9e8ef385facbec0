"""Loop dependence analyzer.

Issues one verdict per loop: `parallel` when every pair of accesses that can
touch the same container in distinct iterations is provably disjoint
(interval reasoning over indexes affine in the loop's induction variables),
`serial` when a concrete carried dependence is found, and `unknown` whenever
the proof is blocked: moved pointers, non-affine indexes, or calls without
effect annotations.

Distinct binding roots (parameters, distinct allocations) are assumed not to
alias; the permutation oracle in the test suite is the executable check on
that assumption and on the interval logic itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .affine import Form, NonAffine, ZERO
from .cast.nodes import (
    AddrOf, AllocExpr, AssignStmt, BinOp, BlockStmt, Call, DeclStmt, Deref,
    Expr, ExprStmt, FloatLit, ForStmt, FuncDef, IfStmt, IncDecStmt, IntLit, Member,
    Name, RecordType, ReturnStmt, Span, Stmt, Subscript, TranslationUnit,
    WhileStmt, walk,
)
from .effects import READ, READWRITE, WRITE, EffectDatabase, builtin_database, effect_of
from .loops import canonical_for, loops_in

PARALLEL = "parallel"
SERIAL = "serial"
UNKNOWN = "unknown"

_AMBIG = ("ambiguous",)
_UNKNOWN_KEY = ("unknown",)


@dataclass
class InductionVar:
    variable: str
    loop: Span
    start: Expr | None  # None: symbolic value at loop entry
    stride: Expr


@dataclass
class AccessSummary:
    container: tuple
    display: str
    kind: str                 # read | write | readwrite
    lo: Form | None           # None together with hi: whole container
    hi: Form | None           # exclusive bound
    site: Span
    whole: bool = False
    non_affine: bool = False
    definite: bool = True     # False: conservative default annotation
    row: Form | None = None   # for accesses through a row-pointer table

    def is_write(self) -> bool:
        return self.kind in (WRITE, READWRITE)

    def is_read(self) -> bool:
        return self.kind in (READ, READWRITE)

    def range_str(self) -> str:
        if self.non_affine:
            return "non-affine"
        if self.whole or self.lo is None:
            return "whole container"
        return f"[{self.lo.render()}, {self.hi.render()})"


@dataclass
class LoopVerdict:
    span: Span
    function: str
    verdict: str
    evidence: list[str] = field(default_factory=list)


@dataclass
class DependenceReport:
    loops: list[LoopVerdict] = field(default_factory=list)

    def verdict_at(self, line: int, function: str | None = None) -> str | None:
        for lv in self.loops:
            if lv.span.line == line and (function is None or lv.function == function):
                return lv.verdict
        return None


# ---------------------------------------------------------------------------
# induction variables
# ---------------------------------------------------------------------------


def _written_names(stmts: list[Stmt]) -> dict[str, int]:
    counts: dict[str, int] = {}

    def bump(name: str):
        counts[name] = counts.get(name, 0) + 1

    for top in stmts:
        for node in walk(top):
            if isinstance(node, AssignStmt) and isinstance(node.lhs, Name):
                bump(node.lhs.ident)
            elif isinstance(node, IncDecStmt) and isinstance(node.target, Name):
                bump(node.target.ident)
            elif isinstance(node, DeclStmt):
                bump(node.name)
    return counts


def _declared_names(stmts: list[Stmt]) -> set[str]:
    out = set()
    for top in stmts:
        for node in walk(top):
            if isinstance(node, DeclStmt):
                out.add(node.name)
    return out


def _update_stride(st: Stmt) -> tuple[str, Expr] | None:
    """`v += e` / `v++` / `v = v ± e`: (variable, signed stride expression)."""
    if isinstance(st, IncDecStmt) and isinstance(st.target, Name):
        return st.target.ident, IntLit(st.delta, span=st.span)
    if isinstance(st, AssignStmt) and isinstance(st.lhs, Name):
        v = st.lhs.ident
        if st.op == "+=":
            return v, st.rhs
        if st.op == "-=":
            return v, BinOp("-", IntLit(0, span=st.span), st.rhs, span=st.span)
        if st.op == "=" and isinstance(st.rhs, BinOp) and st.rhs.op in ("+", "-") \
                and isinstance(st.rhs.lhs, Name) and st.rhs.lhs.ident == v:
            if st.rhs.op == "+":
                return v, st.rhs.rhs
            return v, BinOp("-", IntLit(0, span=st.span), st.rhs.rhs, span=st.span)
    return None


def _expr_names(e: Expr) -> set[str]:
    return {n.ident for n in walk(e) if isinstance(n, Name)}


def find_induction(loop: Stmt) -> list[InductionVar]:
    """Integer variables updated exactly once per iteration by a
    loop-invariant stride: the counter of a canonical for plus top-level
    `v += c` shapes in the body (offset companions included)."""
    body = loop.body
    written = _written_names(body)
    out: list[InductionVar] = []
    info = canonical_for(loop)
    counter = None
    if info is not None:
        stride_vars = _expr_names(info.step)
        if written.get(info.var, 0) == 0 \
                and not any(written.get(v) for v in stride_vars) \
                and info.var not in stride_vars:
            counter = info.var
            out.append(InductionVar(info.var, loop.span, info.start, info.step))
    for st in body:
        upd = _update_stride(st)
        if upd is None:
            continue
        var, stride = upd
        if var == counter:
            continue
        target = st.lhs if isinstance(st, AssignStmt) else st.target
        if target.ctype is not None and not target.ctype.is_int():
            continue
        if written.get(var, 0) != 1:
            continue
        stride_vars = _expr_names(stride)
        if any(written.get(v) for v in stride_vars) or var in stride_vars:
            continue
        out.append(InductionVar(var, loop.span, None, stride))
    return out


# ---------------------------------------------------------------------------
# binding roots (straight-line, conservative)
# ---------------------------------------------------------------------------


def _binding_roots(fn: FuncDef) -> dict[str, tuple]:
    """Binding root per pointer variable at the end of straight-line flow;
    AMBIG when control flow or memory loads obscure it."""
    roots: dict[str, tuple] = {}
    for pname, ptype in fn.params:
        if ptype.is_pointer():
            roots[pname] = ("param", pname)

    def root_of(e: Expr) -> tuple:
        if isinstance(e, Name):
            return roots.get(e.ident, _AMBIG)
        if isinstance(e, AllocExpr):
            return ("alloc", e.span.line, e.span.column)
        if isinstance(e, Call):
            return ("ret", e.span.line, e.span.column)
        if isinstance(e, BinOp) and e.op in ("+", "-"):
            if e.lhs.ctype is not None and e.lhs.ctype.is_pointer():
                return root_of(e.lhs)
            if e.rhs.ctype is not None and e.rhs.ctype.is_pointer():
                return root_of(e.rhs)
        if isinstance(e, AddrOf):
            if isinstance(e.operand, Name):
                return ("addrvar", e.operand.ident)
            if isinstance(e.operand, Subscript):
                return root_of(e.operand.base)
        return _AMBIG

    def visit(stmts: list[Stmt], conditional: bool):
        for st in stmts:
            if isinstance(st, DeclStmt) and st.ctype.is_pointer():
                root = root_of(st.init) if st.init is not None else _AMBIG
                roots[st.name] = _AMBIG if conditional else root
            elif isinstance(st, AssignStmt) and isinstance(st.lhs, Name) \
                    and st.lhs.ctype is not None and st.lhs.ctype.is_pointer() \
                    and st.op == "=" and _update_stride(st) is None:
                roots[st.lhs.ident] = _AMBIG if conditional else root_of(st.rhs)
            elif isinstance(st, IfStmt):
                visit(st.then_body, True)
                visit(st.else_body, True)
            elif isinstance(st, (ForStmt, WhileStmt)):
                if isinstance(st, ForStmt) and st.init is not None:
                    visit([st.init], conditional)
                visit(st.body, True)
            elif isinstance(st, BlockStmt):
                visit(st.body, conditional)

    visit(fn.body or [], False)
    return roots


def _pointer_writes_in(body: list[Stmt]) -> tuple[set[str], set[str]]:
    """(moved, rebound) pointer variables inside the body."""
    moved, rebound = set(), set()
    for top in body:
        for node in walk(top):
            if isinstance(node, AssignStmt) and isinstance(node.lhs, Name) \
                    and node.lhs.ctype is not None and node.lhs.ctype.is_pointer():
                if node.op in ("+=", "-=") or _update_stride(node) is not None:
                    moved.add(node.lhs.ident)
                else:
                    rebound.add(node.lhs.ident)
            elif isinstance(node, IncDecStmt) and isinstance(node.target, Name) \
                    and node.target.ctype is not None \
                    and node.target.ctype.is_pointer():
                moved.add(node.target.ident)
            elif isinstance(node, DeclStmt) and node.ctype.is_pointer():
                rebound.add(node.name)
    return moved, rebound


# ---------------------------------------------------------------------------
# summarization context
# ---------------------------------------------------------------------------


class _LoopContext:
    def __init__(self, fn: FuncDef, loop: Stmt, db: EffectDatabase):
        self.fn = fn
        self.loop = loop
        self.db = db
        self.body = loop.body
        self.written = _written_names(self.body)
        self.declared = _declared_names(self.body)
        self.info = canonical_for(loop)
        self.ivs = find_induction(loop)
        self.roots = _binding_roots(fn)
        self.moved, self.rebound = _pointer_writes_in(self.body)
        # pointers declared in the body over a fresh per-iteration allocation
        self.body_fresh: dict[str, tuple] = {}
        for top in self.body:
            for node in walk(top):
                if isinstance(node, DeclStmt) and node.ctype.is_pointer() \
                        and isinstance(node.init, AllocExpr):
                    self.body_fresh[node.name] = (
                        "fresh", node.span.line, node.span.column)
        self.iv_forms: dict[str, Form] = {}
        self.summaries: list[AccessSummary] = []
        self.dirty_row_families: set[tuple] = set()
        for iv in self.ivs:
            try:
                stride_form = self.build_invariant(iv.stride)
                start_form = (self.build_invariant(iv.start)
                              if iv.start is not None
                              else Form.sym(("entry", iv.variable)))
                self.iv_forms[iv.variable] = start_form + stride_form.times_tau()
            except NonAffine:
                pass

    # -- affine -----------------------------------------------------------------

    def build_invariant(self, e: Expr) -> Form:
        return self._build(e, ranges={}, allow_iv=False)

    def build(self, e: Expr, ranges: dict) -> Form:
        return self._build(e, ranges, allow_iv=True)

    def _build(self, e: Expr, ranges: dict, allow_iv: bool) -> Form:
        if isinstance(e, IntLit):
            return Form.of(e.value)
        if isinstance(e, Name):
            v = e.ident
            if allow_iv and v in self.iv_forms:
                return self.iv_forms[v]
            if v in ranges:
                return Form.sym(("ctr", v))
            if self.written.get(v):
                raise NonAffine()
            return Form.sym(("inv", v))
        if isinstance(e, BinOp):
            if e.op == "+":
                return self._build(e.lhs, ranges, allow_iv) + \
                    self._build(e.rhs, ranges, allow_iv)
            if e.op == "-":
                return self._build(e.lhs, ranges, allow_iv) - \
                    self._build(e.rhs, ranges, allow_iv)
            if e.op == "*":
                return self._build(e.lhs, ranges, allow_iv).mul(
                    self._build(e.rhs, ranges, allow_iv))
        raise NonAffine()

    def _interval(self, key, display, kind, lo: Form, hi: Form, span,
                  ranges: dict) -> AccessSummary:
        try:
            lo2 = lo.substitute_range(True, ranges)
            hi2 = hi.substitute_range(False, ranges)
        except KeyError:
            return AccessSummary(key, display, kind, None, None, span,
                                 whole=True, non_affine=True)
        return AccessSummary(key, display, kind, lo2, hi2, span)

    # -- containers --------------------------------------------------------------

    def resolve_value(self, e: Expr, ranges: dict) -> tuple:
        """Container key of a pointer-valued expression; emits read summaries
        for the loads the resolution itself performs."""
        if isinstance(e, Name):
            v = e.ident
            if v in self.body_fresh:
                return self.body_fresh[v]
            if v in self.rebound:
                return _UNKNOWN_KEY
            root = self.roots.get(v, _AMBIG)
            if root == _AMBIG:
                return _UNKNOWN_KEY
            return ("root", root)
        if isinstance(e, BinOp) and e.op in ("+", "-"):
            if e.lhs.ctype is not None and e.lhs.ctype.is_pointer():
                return self.resolve_value(e.lhs, ranges)
            if e.rhs.ctype is not None and e.rhs.ctype.is_pointer():
                return self.resolve_value(e.rhs, ranges)
            return _UNKNOWN_KEY
        if isinstance(e, AddrOf):
            if isinstance(e.operand, Name):
                return ("addrvar", e.operand.ident)
            if isinstance(e.operand, Subscript):
                return self.resolve_value(e.operand.base, ranges)
            return _UNKNOWN_KEY
        if isinstance(e, Member):
            cell = self.member_cell_access(e, ranges, READ)
            if cell is None:
                return _UNKNOWN_KEY
            base_key, fname = cell
            return ("mload", base_key, fname)
        if isinstance(e, Subscript):
            base_key = self.resolve_value(e.base, ranges)
            if base_key == _UNKNOWN_KEY:
                self.access(e, READ, ranges)
                return _UNKNOWN_KEY
            row = self.access(e, READ, ranges)
            if row is None:
                return _UNKNOWN_KEY
            return ("sload", base_key, row)
        if isinstance(e, Deref):
            inner = Subscript(e.operand, IntLit(0, span=e.span),
                              span=e.span, ctype=e.ctype)
            return self.resolve_value(inner, ranges)
        if isinstance(e, AllocExpr):
            return ("fresh", e.span.line, e.span.column)
        return _UNKNOWN_KEY

    def member_cell_access(self, e: Member, ranges: dict, kind: str):
        """Summarize the record-cell access; returns (record key, field)."""
        if e.arrow:
            base_key = self.resolve_value(e.base, ranges)
            rec = e.base.ctype.pointee if (
                e.base.ctype is not None and e.base.ctype.is_pointer()) else None
            elem_form: Form | None = Form.of(0)
            if isinstance(e.base, Name) and (
                    e.base.ident in self.moved or e.base.ident in self.rebound):
                elem_form = None
        elif isinstance(e.base, Subscript):
            base_key = self.resolve_value(e.base.base, ranges)
            rec = e.base.ctype
            try:
                elem_form = self.build(e.base.index, ranges)
            except NonAffine:
                elem_form = None
        elif isinstance(e.base, Name):
            base_key = ("addrvar", e.base.ident)
            rec = e.base.ctype
            elem_form = Form.of(0)
        else:
            base_key = _UNKNOWN_KEY
            rec = None
            elem_form = None
        if base_key == _UNKNOWN_KEY or not isinstance(rec, RecordType):
            self.summaries.append(AccessSummary(
                _UNKNOWN_KEY, _render(e), kind, None, None, e.span,
                whole=True, non_affine=True))
            return None
        nfields = max(1, len(rec.fields))
        fidx = rec.field_index(e.field_name)
        if elem_form is None:
            self.summaries.append(AccessSummary(
                base_key, _render(e), kind, None, None, e.span,
                whole=True, non_affine=True))
        else:
            cell = elem_form.scale(nfields) + Form.of(fidx)
            self.summaries.append(self._interval(
                base_key, _render(e), kind, cell, cell + Form.of(1),
                e.span, ranges))
        return base_key, e.field_name

    def access(self, e: Subscript, kind: str, ranges: dict) -> Form | None:
        """Summarize a subscript access; returns the affine index, if any."""
        base = e.base
        display = _render(e)
        if isinstance(base, Name) and (base.ident in self.moved):
            key = ("root", self.roots.get(base.ident, _AMBIG)) \
                if self.roots.get(base.ident, _AMBIG) != _AMBIG else _UNKNOWN_KEY
            self.summaries.append(AccessSummary(
                key, display, kind, None, None, e.span,
                whole=True, non_affine=True))
            return None
        key = self.resolve_value(base, ranges)
        row = None
        if key[0] == "sload":
            row = key[2]
            key = ("sfam", key[1])
        try:
            idx = self.build(e.index, ranges)
        except NonAffine:
            idx = None
        if key == _UNKNOWN_KEY or idx is None:
            self.summaries.append(AccessSummary(
                key, display, kind, None, None, e.span,
                whole=True, non_affine=(key == _UNKNOWN_KEY) or (
                    idx is None and key[0] != "sfam"), row=row))
            return None if idx is None else idx
        summary = self._interval(key, display, kind, idx, idx + Form.of(1),
                                 e.span, ranges)
        summary.row = row
        self.summaries.append(summary)
        return idx


def _render(e: Expr) -> str:
    from .cast.printer import expr_to_str
    try:
        return expr_to_str(e)
    except Exception:
        return "<expr>"


# ---------------------------------------------------------------------------
# body walk
# ---------------------------------------------------------------------------


def _walk_stmts(ctx: _LoopContext, stmts: list, ranges: dict) -> None:
    for st in stmts:
        _walk_stmt(ctx, st, ranges)


def _walk_stmt(ctx: _LoopContext, st: Stmt, ranges: dict) -> None:
    if isinstance(st, DeclStmt):
        if st.init is not None:
            _walk_value(ctx, st.init, ranges)
        return
    if isinstance(st, AssignStmt):
        kind = WRITE if st.op == "=" else READWRITE
        _walk_lvalue(ctx, st.lhs, kind, ranges, rhs=st.rhs)
        _walk_value(ctx, st.rhs, ranges)
        return
    if isinstance(st, IncDecStmt):
        _walk_lvalue(ctx, st.target, READWRITE, ranges, rhs=None)
        return
    if isinstance(st, ExprStmt):
        _walk_value(ctx, st.expr, ranges)
        return
    if isinstance(st, ReturnStmt):
        if st.value is not None:
            _walk_value(ctx, st.value, ranges)
        return
    if isinstance(st, BlockStmt):
        _walk_stmts(ctx, st.body, ranges)
        return
    if isinstance(st, IfStmt):
        _walk_value(ctx, st.cond, ranges)
        _walk_stmts(ctx, st.then_body, ranges)
        _walk_stmts(ctx, st.else_body, ranges)
        return
    if isinstance(st, (ForStmt, WhileStmt)):
        _walk_nested(ctx, st, ranges)
        return
    raise AssertionError(f"unhandled statement {type(st).__name__}")


def _walk_nested(ctx: _LoopContext, st: Stmt, ranges: dict) -> None:
    """A loop nested inside the analyzed one: expand its counter to a range."""
    new_ranges = dict(ranges)
    info = canonical_for(st) if isinstance(st, ForStmt) else None
    if info is not None:
        try:
            start = ctx.build(info.start, ranges)
            bound = ctx.build(info.bound, ranges)
            step = ctx.build_invariant(info.step)
            if step.is_const() and step.const > 0 and info.rel in ("<", "<="):
                hi_incl = bound if info.rel == "<=" else bound - Form.of(1)
                new_ranges[info.var] = (start, hi_incl)
            elif step.is_const() and step.const < 0 and info.rel in (">", ">="):
                lo = bound if info.rel == ">=" else bound + Form.of(1)
                new_ranges[info.var] = (lo, start)
        except NonAffine:
            pass
    if isinstance(st, ForStmt):
        if isinstance(st.init, AssignStmt):
            _walk_value(ctx, st.init.rhs, ranges)
        elif isinstance(st.init, DeclStmt) and st.init.init is not None:
            _walk_value(ctx, st.init.init, ranges)
        _walk_value(ctx, st.cond, new_ranges)
        if st.step is not None:
            _walk_stmt(ctx, st.step, new_ranges)
    else:
        _walk_value(ctx, st.cond, new_ranges)
    _walk_stmts(ctx, st.body, new_ranges)


def _walk_lvalue(ctx: _LoopContext, lhs: Expr, kind: str, ranges: dict,
                 rhs: Expr | None) -> None:
    if isinstance(lhs, Name):
        return  # variable writes are covered by the scalar/pointer rules
    if isinstance(lhs, Deref):
        lhs = Subscript(lhs.operand, IntLit(0, span=lhs.span),
                        span=lhs.span, ctype=lhs.ctype)
    if isinstance(lhs, Subscript):
        before = len(ctx.summaries)
        ctx.access(lhs, kind, ranges)
        _walk_value(ctx, lhs.index, ranges)
        # storing anything but a fresh allocation into a cell of a
        # row-pointer table invalidates the distinct-rows assumption
        if lhs.ctype is not None and lhs.ctype.is_pointer() \
                and not isinstance(rhs, AllocExpr):
            for s in ctx.summaries[before:]:
                if s.is_write() and s.container[0] == "mload":
                    ctx.dirty_row_families.add(s.container)
        return
    if isinstance(lhs, Member):
        ctx.member_cell_access(lhs, ranges, kind)
        return
    _walk_value(ctx, lhs, ranges)


def _walk_value(ctx: _LoopContext, e: Expr, ranges: dict) -> None:
    if e is None or isinstance(e, (IntLit, FloatLit, Name)):
        return
    if isinstance(e, Subscript):
        ctx.access(e, READ, ranges)
        _walk_value(ctx, e.index, ranges)
        return
    if isinstance(e, Deref):
        ctx.access(Subscript(e.operand, IntLit(0, span=e.span),
                             span=e.span, ctype=e.ctype), READ, ranges)
        return
    if isinstance(e, Member):
        ctx.member_cell_access(e, ranges, READ)
        return
    if isinstance(e, AddrOf):
        return  # address formation accesses nothing
    if isinstance(e, BinOp):
        _walk_value(ctx, e.lhs, ranges)
        _walk_value(ctx, e.rhs, ranges)
        return
    if isinstance(e, AllocExpr):
        _walk_value(ctx, e.count, ranges)
        return
    if isinstance(e, Call):
        _walk_call(ctx, e, ranges)
        return
    raise AssertionError(f"unhandled expression {type(e).__name__}")


def _walk_call(ctx: _LoopContext, call: Call, ranges: dict) -> None:
    ann = ctx.db.lookup(call.callee)
    for i, arg in enumerate(call.args):
        _walk_value(ctx, arg, ranges)
        if arg.ctype is None or not arg.ctype.is_pointer():
            continue
        key = ctx.resolve_value(arg, ranges)
        eff = effect_of(ctx.db, call.callee, i)
        definite = ann is not None and ann.effect_for(i) is not None
        ctx.summaries.append(AccessSummary(
            key, f"{call.callee}(arg {i})", eff, None, None, arg.span,
            whole=True, definite=definite))


# ---------------------------------------------------------------------------
# conflict relations
# ---------------------------------------------------------------------------

_DISJOINT = "disjoint"
_OVERLAP = "overlap"
_MAYBE = "maybe"


def _carried_relation(a: AccessSummary, b: AccessSummary) -> str:
    """Relation between a's cells in iteration t1 and b's in t2 != t1."""
    if a.non_affine or b.non_affine:
        return _MAYBE
    if a.whole or b.whole or a.lo is None or b.lo is None:
        return _OVERLAP if (a.definite and b.definite) else _MAYBE
    sa = a.lo.tau_stride()
    sb = b.lo.tau_stride()
    if sa != sb:
        return _MAYBE
    if (a.hi - a.lo).tau_stride() != ZERO or (b.hi - b.lo).tau_stride() != ZERO:
        return _MAYBE
    lo_a, hi_a = a.lo.drop_tau(), a.hi.drop_tau()
    lo_b, hi_b = b.lo.drop_tau(), b.hi.drop_tau()
    wa = hi_a - lo_a
    wb = hi_b - lo_b
    d = lo_b - lo_a
    if d.is_const() and wa.is_const() and wb.is_const() and sa.is_const():
        s = abs(sa.const)
        lo_open, hi_open = d.const - wa.const, d.const + wb.const
        if s == 0:
            return _OVERLAP if lo_open < 0 < hi_open else _DISJOINT
        # conflict iff a nonzero multiple of s lies inside the open window
        m_min = lo_open // s + 1
        m_max = -((-hi_open) // s) - 1
        if m_min <= m_max and not (m_min == 0 and m_max == 0):
            return _OVERLAP
        return _DISJOINT
    # symbolic: identical windows tiled by exactly their width
    if d == ZERO and wa == wb and (sa == wa or sa == wa.scale(-1)):
        return _DISJOINT
    return _MAYBE



# ---------------------------------------------------------------------------
# liveness after the loop
# ---------------------------------------------------------------------------


def _statements_after(body: list[Stmt], loop: Stmt) -> tuple[bool, list[Stmt]]:
    for i, st in enumerate(body):
        if st is loop:
            return True, list(body[i + 1:])
        subs: list[tuple[list[Stmt], bool]] = []
        if isinstance(st, IfStmt):
            subs = [(st.then_body, False), (st.else_body, False)]
        elif isinstance(st, (ForStmt, WhileStmt)):
            subs = [(st.body, True)]
        elif isinstance(st, BlockStmt):
            subs = [(st.body, False)]
        for sub, is_loop in subs:
            found, after = _statements_after(sub, loop)
            if found:
                if is_loop:
                    after = after + [s for s in sub if s is not loop]
                return True, after + body[i + 1:]
    return False, []


def _content_read_after(ctx: _LoopContext, vars_of_key: set[str]) -> bool:
    """Is any content of the containers bound to these variables read after
    the loop? Rebinding writes and definite write-only call arguments are the
    only uses that do not count as reads."""
    _, after = _statements_after(ctx.fn.body or [], ctx.loop)
    hot = vars_of_key

    def expr_reads(e: Expr | None) -> bool:
        if e is None:
            return False
        if isinstance(e, Name):
            return e.ident in hot
        if isinstance(e, Call):
            ann = ctx.db.lookup(e.callee)
            for i, arg in enumerate(e.args):
                if isinstance(arg, Name) and arg.ident in hot:
                    if ann is not None and ann.effect_for(i) == WRITE:
                        continue  # e.g. a free: the contents are not read
                    return True
                if expr_reads(arg):
                    return True
            return False
        for attr in ("base", "index", "operand", "lhs", "rhs", "count"):
            v = getattr(e, attr, None)
            if isinstance(v, Expr) and expr_reads(v):
                return True
        return False

    def stmt_reads(st: Stmt) -> bool:
        if isinstance(st, AssignStmt):
            if isinstance(st.lhs, Name):
                lhs_reads = st.op != "=" and st.lhs.ident in hot
            else:
                lhs_reads = expr_reads(st.lhs)
            return lhs_reads or expr_reads(st.rhs)
        if isinstance(st, DeclStmt):
            return expr_reads(st.init)
        if isinstance(st, IncDecStmt):
            if isinstance(st.target, Name):
                return st.target.ident in hot
            return expr_reads(st.target)
        if isinstance(st, ReturnStmt):
            return expr_reads(st.value)
        if isinstance(st, ExprStmt):
            return expr_reads(st.expr)
        cond = getattr(st, "cond", None)
        if isinstance(cond, Expr) and expr_reads(cond):
            return True
        for attr in ("init", "step"):
            v = getattr(st, attr, None)
            if isinstance(v, Stmt) and stmt_reads(v):
                return True
        for attr in ("body", "then_body", "else_body"):
            sub = getattr(st, attr, None)
            if isinstance(sub, list) and any(stmt_reads(s) for s in sub):
                return True
        return False

    return any(stmt_reads(st) for st in after)


# ---------------------------------------------------------------------------
# verdict
# ---------------------------------------------------------------------------


def summarize_accesses(loop: Stmt, db: EffectDatabase | None = None,
                       function: FuncDef | None = None) -> list[AccessSummary]:
    """One summary per access in the loop (nested loops expanded to ranges),
    plus one whole-container summary per pointer argument of each call."""
    if db is None:
        db = builtin_database()
    fn = function or FuncDef("<loop>", [], body=[loop])
    ctx = _LoopContext(fn, loop, db)
    _walk_stmts(ctx, ctx.body, {})
    return ctx.summaries


def _key_str(key: tuple) -> str:
    if key == _UNKNOWN_KEY:
        return "<unknown>"
    if key[0] == "root":
        r = key[1]
        if r[0] == "param":
            return r[1]
        if r[0] in ("alloc", "ret"):
            return f"{r[0]}@{r[1]}:{r[2]}"
        return str(r)
    if key[0] == "addrvar":
        return f"&{key[1]}"
    if key[0] == "fresh":
        return f"alloc@{key[1]}:{key[2]}(per-iteration)"
    if key[0] == "mload":
        return f"{_key_str(key[1])}.{key[2]}"
    if key[0] == "sload":
        return f"{_key_str(key[1])}[{key[2].render()}]"
    if key[0] == "sfam":
        return f"{_key_str(key[1])}[rows]"
    return str(key)


def _loop_verdict(fn: FuncDef, loop: Stmt, db: EffectDatabase) -> LoopVerdict:
    ctx = _LoopContext(fn, loop, db)
    serial_ev: list[str] = []
    unknown_ev: list[str] = []
    notes: list[str] = []

    if ctx.info is None:
        return LoopVerdict(loop.span, fn.name, UNKNOWN,
                           ["loop is not in canonical counted form"])

    _walk_stmts(ctx, ctx.body, {})

    # (d) scalar carried dependences
    iv_names = {iv.variable for iv in ctx.ivs}
    reduction_ok = _reduction_vars(ctx)
    for var, count in ctx.written.items():
        target_types = [n.ctype for top in ctx.body for n in walk(top)
                        if isinstance(n, Name) and n.ident == var]
        is_pointer = any(t is not None and t.is_pointer() for t in target_types)
        if is_pointer or var in ctx.declared or var in iv_names:
            continue
        if var in reduction_ok:
            notes.append(f"reduction on '{var}'")
            continue
        if not _content_read_after(ctx, {var}):
            notes.append(f"'{var}' is dead after the loop (privatizable)")
            continue
        serial_ev.append(f"scalar '{var}' carries a value across iterations")

    # moved pointers block affine reasoning; their access summaries are
    # already non-affine, reported through the pair scan below

    by_key: dict[tuple, list[AccessSummary]] = {}
    for s in ctx.summaries:
        by_key.setdefault(s.container, []).append(s)

    private = _private_keys(ctx, by_key)

    for key, group in by_key.items():
        if key in private:
            continue
        writes = [s for s in group if s.is_write()]
        if not writes and key != _UNKNOWN_KEY:
            continue
        if key == _UNKNOWN_KEY:
            if writes:
                unknown_ev.append(
                    "access to an unresolved container: " +
                    ", ".join(sorted({s.display for s in writes})))
            # unknown reads conflict with any write elsewhere
            if any(s.is_write() for k, g in by_key.items() if k != _UNKNOWN_KEY
                   and k not in private for s in g) and group:
                reads = [s for s in group if not s.is_write()]
                if reads:
                    unknown_ev.append(
                        "read through an unresolved container: " +
                        ", ".join(sorted({s.display for s in reads})))
            continue
        _scan_pairs(ctx, key, writes, group, serial_ev, unknown_ev)

    # rows families with non-fresh stores cannot rely on row separation
    for fam in ctx.dirty_row_families:
        unknown_ev.append(
            f"row table {_key_str(fam)} is overwritten with a non-fresh "
            "pointer; rows may alias")

    if serial_ev:
        return LoopVerdict(loop.span, fn.name, SERIAL, serial_ev + notes)
    if unknown_ev:
        return LoopVerdict(loop.span, fn.name, UNKNOWN, unknown_ev + notes)
    ev = notes + [f"{s.kind} {_key_str(s.container)} {s.range_str()}"
                  for s in ctx.summaries if s.is_write()]
    if not ev:
        ev = ["no writes inside the loop"]
    return LoopVerdict(loop.span, fn.name, PARALLEL, ev)


def _scan_pairs(ctx: _LoopContext, key: tuple, writes, group,
                serial_ev: list[str], unknown_ev: list[str]) -> None:
    if key[0] == "sfam":
        rows = [s.row for s in group]
        if any(r is None for r in rows):
            unknown_ev.append(f"unresolved row of {_key_str(key)}")
            return
        first = rows[0]
        if any(r != first for r in rows[1:]):
            unknown_ev.append(
                f"rows of {_key_str(key)} indexed by differing expressions")
            return
        if key[1] in ctx.dirty_row_families:
            unknown_ev.append(
                f"row table {_key_str(key[1])} holds non-fresh pointers; "
                "rows may alias")
            return
        stride = first.tau_stride()
        if stride.is_const() and stride.const != 0:
            return  # distinct iterations reach distinct row containers
        if not stride.is_const():
            unknown_ev.append(
                f"row stride of {_key_str(key)} is symbolic; cannot prove "
                "iterations use distinct rows")
            return
        # constant row: fall through to the column interval test
    for w in writes:
        for x in group:
            rel = _carried_relation(w, x)
            if rel == _OVERLAP:
                serial_ev.append(
                    f"carried dependence on {_key_str(key)}: "
                    f"{w.kind} {w.range_str()} vs {x.kind} {x.range_str()}")
                return
            if rel == _MAYBE:
                unknown_ev.append(
                    f"cannot separate iterations on {_key_str(key)}: "
                    f"{w.kind} {w.range_str()} vs {x.kind} {x.range_str()}")
                return


def _private_keys(ctx: _LoopContext, by_key: dict) -> set[tuple]:
    private: set[tuple] = set()
    for key, group in by_key.items():
        if key[0] == "fresh":
            private.add(key)
            continue
        if key[0] == "addrvar" and key[1] in ctx.declared:
            private.add(key)
            continue
        first = group[0]
        if first.whole and first.definite and not first.non_affine \
                and first.kind == WRITE:
            vars_of_key = _vars_bound_to(ctx, key)
            if vars_of_key and not _content_read_after(ctx, vars_of_key):
                private.add(key)
    return private


def _vars_bound_to(ctx: _LoopContext, key: tuple) -> set[str]:
    if key[0] == "addrvar":
        return {key[1]}
    if key[0] == "root":
        return {v for v, r in ctx.roots.items() if r == key[1]}
    return set()


def _reduction_vars(ctx: _LoopContext) -> set[str]:
    """Scalars updated only by a single top-level `s += e` whose value is
    never otherwise read in the body: safe to privatize and combine."""
    out = set()
    for st in ctx.body:
        upd = _update_stride(st)
        if upd is None:
            continue
        var, stride = upd
        target = st.lhs if isinstance(st, AssignStmt) else st.target
        if target.ctype is None or not target.ctype.is_scalar():
            continue
        if ctx.written.get(var, 0) != 1:
            continue
        if var in _expr_names(stride):
            continue
        uses = 0
        for top in ctx.body:
            for node in walk(top):
                if isinstance(node, Name) and node.ident == var:
                    uses += 1
        own = 1 + (1 if isinstance(st, AssignStmt) and st.op == "="
                   else 0)
        if uses <= own:
            out.add(var)
    return out


def analyze(tu: TranslationUnit, db: EffectDatabase | None = None) -> DependenceReport:
    """Verdict every loop of every defined function."""
    if db is None:
        db = builtin_database()
    report = DependenceReport()
    for fn in tu.functions:
        if fn.body is None:
            continue
        for loop in loops_in(fn.body):
            report.loops.append(_loop_verdict(fn, loop, db))
    return report
