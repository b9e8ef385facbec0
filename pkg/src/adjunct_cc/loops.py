"""Canonical loop shape helpers shared by the analyzer and the scheduler."""

from __future__ import annotations

from dataclasses import dataclass

from .cast.nodes import (
    AssignStmt, BinOp, DeclStmt, Expr, ForStmt, IncDecStmt, IntLit, Name,
    Stmt, WhileStmt,
)


@dataclass(frozen=True)
class CanonicalFor:
    """`for (iv = start; iv REL bound; iv += step)` with an integer counter."""
    var: str
    start: Expr          # initializer expression
    rel: str             # <, <=, >, >=
    bound: Expr
    step: Expr           # signed amount added once per iteration
    declared_in_init: bool


def loop_key(st: Stmt) -> tuple[str, int, int]:
    return (st.span.file, st.span.line, st.span.column)


def _step_of(step: Stmt, var: str) -> Expr | None:
    """The per-iteration signed increment of `var`, if the step updates it."""
    if isinstance(step, IncDecStmt) and isinstance(step.target, Name) \
            and step.target.ident == var:
        return IntLit(step.delta, span=step.span)
    if isinstance(step, AssignStmt) and isinstance(step.lhs, Name) \
            and step.lhs.ident == var:
        if step.op == "+=":
            return step.rhs
        if step.op == "-=":
            return BinOp("-", IntLit(0, span=step.span), step.rhs, span=step.span)
        if step.op == "=" and isinstance(step.rhs, BinOp) \
                and step.rhs.op in ("+", "-") \
                and isinstance(step.rhs.lhs, Name) and step.rhs.lhs.ident == var:
            if step.rhs.op == "+":
                return step.rhs.rhs
            return BinOp("-", IntLit(0, span=step.span), step.rhs.rhs,
                         span=step.span)
    return None


def canonical_for(st: Stmt) -> CanonicalFor | None:
    """Recognize the countable-for shape; None for anything else."""
    if not isinstance(st, ForStmt) or st.init is None or st.step is None:
        return None
    if isinstance(st.init, DeclStmt):
        var = st.init.name
        start = st.init.init
        declared = True
        if start is None or not st.init.ctype.is_int():
            return None
    elif isinstance(st.init, AssignStmt) and st.init.op == "=" \
            and isinstance(st.init.lhs, Name):
        var = st.init.lhs.ident
        start = st.init.rhs
        declared = False
    else:
        return None
    cond = st.cond
    if not isinstance(cond, BinOp) or cond.op not in ("<", "<=", ">", ">="):
        return None
    if not (isinstance(cond.lhs, Name) and cond.lhs.ident == var):
        return None
    step = _step_of(st.step, var)
    if step is None:
        return None
    return CanonicalFor(var, start, cond.op, cond.rhs, step, declared)


def loops_in(body: list[Stmt]):
    """All for/while statements in a body, outer before inner, source order."""
    out = []

    def visit(stmts: list[Stmt]):
        for st in stmts:
            if isinstance(st, (ForStmt, WhileStmt)):
                out.append(st)
                visit(st.body)
                continue
            for attr in ("then_body", "else_body", "body"):
                sub = getattr(st, attr, None)
                if isinstance(sub, list):
                    visit(sub)

    visit(body)
    return out
