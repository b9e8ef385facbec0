"""Contiguous-buffer list-of-lists restructuring.

Recognizes sparse-row initialization that carves one `rows * row_len` buffer
into per-row slices through cursor pointers stored in a struct, and rewrites
it to allocate each row separately with a zero-based row offset. The result
is a regular two-level structure the dependence analyzer can reason about
row by row.

The match is deliberately strict: a cursor that is used in any way other
than being bound to one struct member per row, dereferenced/subscripted, or
advanced with ++/+= aborts the match. Equivalence for this rewrite is
value-level: allocation layout changes by design.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .cast.nodes import (
    ADJUNCT_TYPE, AllocExpr, AssignStmt, BinOp, DeclStmt, Deref, Expr,
    ForStmt, FuncDef, IncDecStmt, IntLit, Member, Name, PointerType, Span,
    Stmt, Subscript, TranslationUnit, walk,
)
from .loops import canonical_for, loops_in
from .transform import fresh_name, _collect_identifiers


class LilRewriteError(Exception):
    pass


@dataclass
class RowBinding:
    field_name: str
    index_var: str        # row index variable used in the binding
    cursor: str
    binding_span: Span


@dataclass
class LilMatch:
    function: str
    scope: Span                       # the row loop
    cursors: list[str] = field(default_factory=list)
    row_bindings: list[RowBinding] = field(default_factory=list)
    row_length_src: str = ""          # textual form of the row length factor
    buffer_decl_spans: list[Span] = field(default_factory=list)
    struct_var: str = ""

    def describe(self) -> str:
        return (f"{self.function}: rows over '{self.struct_var}' with cursors "
                f"{', '.join(self.cursors)}, row length {self.row_length_src}")


def _product_factors(e: Expr) -> tuple[Expr, Expr] | None:
    if isinstance(e, BinOp) and e.op == "*":
        return e.lhs, e.rhs
    return None


def _names_equal(a: Expr, b: Expr) -> bool:
    return isinstance(a, Name) and isinstance(b, Name) and a.ident == b.ident


def _deref_target(e: Expr) -> tuple[str, Expr] | None:
    """`*c` or `c[i]` with c a plain name: (cursor, index expr or 0)."""
    if isinstance(e, Deref) and isinstance(e.operand, Name):
        return e.operand.ident, IntLit(0, span=e.span)
    if isinstance(e, Subscript) and isinstance(e.base, Name):
        return e.base.ident, e.index
    return None


def _row_binding_of(st: Stmt, counter: str) -> tuple[str, str, str, Span] | None:
    """`base->field[idx] = cursor;` shape: (base var, field, cursor, span)."""
    if not isinstance(st, AssignStmt) or st.op != "=":
        return None
    if not isinstance(st.rhs, Name):
        return None
    lhs = st.lhs
    if not (isinstance(lhs, Subscript) and isinstance(lhs.base, Member)
            and lhs.base.arrow and isinstance(lhs.base.base, Name)):
        return None
    if not isinstance(lhs.index, Name):
        return None
    return (lhs.base.base.ident, lhs.base.field_name, st.rhs.ident,
            st.span)


def _cursor_uses_ok(fn: FuncDef, loop: ForStmt, cursors: set[str],
                    bindings: dict[str, Span]) -> bool:
    """Every occurrence of a cursor name must be one of: the RHS of its one
    recorded row binding, the target of a ++/+= advance inside the loop, or
    the base of a dereference/subscript inside the loop. Anything else means
    the cursor escapes the matched scope and the rewrite must not fire."""
    allowed: set[int] = set()
    must_be_inside: list[int] = []

    for top in fn.body or []:
        for node in walk(top):
            if isinstance(node, AssignStmt):
                rb = _row_binding_of(node, "")
                if rb is not None and rb[2] in cursors \
                        and node.span == bindings.get(rb[2]):
                    allowed.add(id(node.rhs))
                    continue
                if isinstance(node.lhs, Name) and node.lhs.ident in cursors \
                        and node.op == "+=":
                    allowed.add(id(node.lhs))
                    must_be_inside.append(id(node.lhs))
            elif isinstance(node, IncDecStmt):
                if isinstance(node.target, Name) and node.target.ident in cursors:
                    allowed.add(id(node.target))
                    must_be_inside.append(id(node.target))
            elif isinstance(node, Deref):
                if isinstance(node.operand, Name) and node.operand.ident in cursors:
                    allowed.add(id(node.operand))
                    must_be_inside.append(id(node.operand))
            elif isinstance(node, Subscript):
                if isinstance(node.base, Name) and node.base.ident in cursors:
                    allowed.add(id(node.base))
                    must_be_inside.append(id(node.base))

    loop_ids = {id(n) for top in loop.body for n in walk(top)}
    for top in fn.body or []:
        for node in walk(top):
            if isinstance(node, Name) and node.ident in cursors \
                    and id(node) not in allowed:
                return False
    return all(nid in loop_ids for nid in must_be_inside)


def find_lil(tu: TranslationUnit) -> list[LilMatch]:
    """Every scope matching: product-sized buffer allocations, a row loop
    binding each cursor to one struct member, and cursor advances inside."""
    matches: list[LilMatch] = []
    for fn in tu.functions:
        if fn.body is None:
            continue
        buffers: dict[str, tuple[DeclStmt, Expr, Expr]] = {}
        for st in fn.body:
            if isinstance(st, DeclStmt) and isinstance(st.ctype, PointerType) \
                    and isinstance(st.init, AllocExpr):
                factors = _product_factors(st.init.count)
                if factors is not None:
                    buffers[st.name] = (st, factors[0], factors[1])
        if not buffers:
            continue
        for loop in loops_in(fn.body):
            if not isinstance(loop, ForStmt):
                continue
            info = canonical_for(loop)
            if info is None:
                continue
            bindings: list[RowBinding] = []
            struct_vars = set()
            spans: dict[str, Span] = {}
            for st in loop.body:
                rb = _row_binding_of(st, info.var)
                if rb is None:
                    continue
                base_var, fname, cursor, span = rb
                if cursor not in buffers:
                    continue
                bindings.append(RowBinding(fname, "", cursor, span))
                bindings[-1].index_var = st.lhs.index.ident
                struct_vars.add(base_var)
                spans[cursor] = span
            if not bindings or len(struct_vars) != 1:
                continue
            cursors = {b.cursor for b in bindings}
            if len(cursors) != len(bindings):
                continue  # a cursor bound to two members
            # the buffer size must be row-count x row-length, with the row
            # count matching the loop bound
            row_lengths = {}
            ok = True
            for c in cursors:
                _, f1, f2 = buffers[c]
                if _names_equal(f1, info.bound):
                    row_lengths[c] = f2
                elif _names_equal(f2, info.bound):
                    row_lengths[c] = f1
                else:
                    ok = False
            if not ok:
                continue
            # all cursors must agree on the row length expression
            rl = [row_lengths[c] for c in sorted(cursors)]
            if any(x != rl[0] for x in rl[1:]):
                continue
            if not _cursor_uses_ok(fn, loop, cursors, spans):
                continue
            # row index variables must be stable within an iteration
            body_written = _written_in(loop.body)
            idx_ok = all(b.index_var == info.var or
                         b.index_var not in body_written
                         for b in bindings)
            if not idx_ok:
                continue
            from .cast.printer import expr_to_str
            matches.append(LilMatch(
                function=fn.name,
                scope=loop.span,
                cursors=sorted(cursors),
                row_bindings=bindings,
                row_length_src=expr_to_str(rl[0]),
                buffer_decl_spans=[buffers[c][0].span for c in sorted(cursors)],
                struct_var=struct_vars.pop(),
            ))
    return matches


def _written_in(body: list[Stmt]) -> set[str]:
    out = set()
    for top in body:
        for node in walk(top):
            if isinstance(node, AssignStmt) and isinstance(node.lhs, Name):
                out.add(node.lhs.ident)
            elif isinstance(node, IncDecStmt) and isinstance(node.target, Name):
                out.add(node.target.ident)
            elif isinstance(node, DeclStmt):
                out.add(node.name)
    return out


def rewrite_lil(tu: TranslationUnit, m: LilMatch) -> TranslationUnit:
    """Apply one match: per-row allocations with zero-based row offsets."""
    tu = copy.deepcopy(tu)
    fn = tu.function(m.function)
    if fn is None or fn.body is None:
        raise LilRewriteError(f"function '{m.function}' not found")
    cursors = set(m.cursors)
    binding_by_cursor = {b.cursor: b for b in m.row_bindings}

    # cursor -> (element type, row length expr) from the buffer declarations
    buffer_info: dict[str, tuple] = {}
    new_top: list[Stmt] = []
    decl_spans = set((s.line, s.column) for s in m.buffer_decl_spans)
    for st in fn.body:
        if isinstance(st, DeclStmt) and (st.span.line, st.span.column) in decl_spans:
            factors = _product_factors(st.init.count)
            if factors is None:
                raise LilRewriteError("buffer allocation no longer matches")
            f1, f2 = factors
            from .cast.printer import expr_to_str
            row_len = f2 if expr_to_str(f1) != m.row_length_src else f1
            if expr_to_str(row_len) != m.row_length_src:
                row_len = f1 if expr_to_str(f1) == m.row_length_src else f2
            buffer_info[st.name] = (st.init.elem_type, row_len)
            continue  # the contiguous buffer is gone
        new_top.append(st)
    if set(buffer_info) != cursors:
        raise LilRewriteError("match does not correspond to this unit")

    taken = _collect_identifiers(tu, fn)
    adj_names = {c: fresh_name(c, taken) for c in m.cursors}

    loop = None
    for st in new_top:
        for node in walk(st):
            if isinstance(node, ForStmt) and (node.span.line, node.span.column) \
                    == (m.scope.line, m.scope.column):
                loop = node
    if loop is None:
        raise LilRewriteError("row loop not found")

    member_of: dict[str, Expr] = {}

    def rewrite_body(body: list[Stmt]) -> list[Stmt]:
        out: list[Stmt] = []
        for st in body:
            rb = _row_binding_of(st, "")
            if rb is not None and rb[2] in cursors:
                cursor = rb[2]
                elem, row_len = buffer_info[cursor]
                member_of[cursor] = st.lhs
                out.append(AssignStmt(
                    st.lhs, "=",
                    AllocExpr(elem, copy.deepcopy(row_len),
                              span=st.span, ctype=st.lhs.ctype),
                    span=st.span))
                out.append(DeclStmt(adj_names[cursor], ADJUNCT_TYPE,
                                    IntLit(0, span=st.span), span=st.span))
                continue
            if isinstance(st, IncDecStmt) and isinstance(st.target, Name) \
                    and st.target.ident in cursors:
                out.append(IncDecStmt(
                    Name(adj_names[st.target.ident], span=st.span,
                         ctype=ADJUNCT_TYPE),
                    st.delta, span=st.span))
                continue
            if isinstance(st, AssignStmt) and isinstance(st.lhs, Name) \
                    and st.lhs.ident in cursors and st.op == "+=":
                out.append(AssignStmt(
                    Name(adj_names[st.lhs.ident], span=st.span,
                         ctype=ADJUNCT_TYPE),
                    "+=", rewrite_expr(st.rhs), span=st.span))
                continue
            if isinstance(st, AssignStmt):
                out.append(AssignStmt(rewrite_expr(st.lhs), st.op,
                                      rewrite_expr(st.rhs), span=st.span))
                continue
            for attr in ("body", "then_body", "else_body"):
                sub = getattr(st, attr, None)
                if isinstance(sub, list):
                    setattr(st, attr, rewrite_body(sub))
            for attr in ("init", "step"):
                sub = getattr(st, attr, None)
                if sub is not None:
                    replaced = rewrite_body([sub])
                    if len(replaced) != 1:
                        raise LilRewriteError("cursor form in a loop slot")
                    setattr(st, attr, replaced[0])
            for attr in ("cond", "expr", "value", "init"):
                sub = getattr(st, attr, None)
                if isinstance(sub, Expr):
                    setattr(st, attr, rewrite_expr(sub))
            out.append(st)
        return out

    def rewrite_expr(e: Expr) -> Expr:
        if e is None:
            return None
        tgt = _deref_target(e)
        if tgt is not None and tgt[0] in cursors:
            cursor, index = tgt
            member = member_of.get(cursor)
            if member is None:
                raise LilRewriteError(
                    f"cursor '{cursor}' dereferenced before its row binding")
            adj = Name(adj_names[cursor], span=e.span, ctype=ADJUNCT_TYPE)
            if isinstance(index, IntLit) and index.value == 0:
                idx: Expr = adj
            else:
                idx = BinOp("+", rewrite_expr(index), adj,
                            span=e.span, ctype=ADJUNCT_TYPE)
            return Subscript(copy.deepcopy(member), idx, span=e.span,
                             ctype=e.ctype)
        for attr in ("base", "index", "operand", "lhs", "rhs", "count"):
            v = getattr(e, attr, None)
            if isinstance(v, Expr):
                setattr(e, attr, rewrite_expr(v))
        if hasattr(e, "args"):
            e.args = [rewrite_expr(a) for a in e.args]
        return e

    loop.body = rewrite_body(loop.body)
    fn.body = new_top
    from .cast.parser import _Checker
    from .errors import CompileError
    try:
        _Checker(tu).run()
    except CompileError as exc:
        raise LilRewriteError(f"rewritten unit fails to type-check: {exc}") from exc
    return tu


def rewrite_all_lil(tu: TranslationUnit) -> tuple[TranslationUnit, list[LilMatch]]:
    """Apply matches until none remain; returns the final unit and the
    matches that were rewritten."""
    applied: list[LilMatch] = []
    guard = 0
    while True:
        found = find_lil(tu)
        if not found:
            return tu, applied
        tu = rewrite_lil(tu, found[0])
        applied.append(found[0])
        guard += 1
        if guard > 32:
            raise LilRewriteError("rewrite did not converge")
