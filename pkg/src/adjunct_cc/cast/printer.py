"""Canonical source emitter: fixed two-space indent, one statement per line,
always-braced bodies, minimal parentheses. parse(print_source(tu)) is
structurally equal to tu.
"""

from __future__ import annotations

from .nodes import (
    AddrOf, AllocExpr, AssignStmt, BinOp, BlockStmt, Call, CType, DeclStmt,
    Deref, Expr, ExprStmt, FloatLit, FloatType, ForStmt, IfStmt, IncDecStmt,
    IntLit, IntType, Member, Name, PointerType, RecordType, ReturnStmt, Stmt,
    Subscript, TranslationUnit, VoidType, WhileStmt,
)

_INT_NAMES = {
    (8, True): "char", (8, False): "unsigned char",
    (32, True): "int", (32, False): "unsigned int",
    (64, True): "long", (64, False): "unsigned long",
}

_BIN_PREC = {
    "*": 80, "/": 80, "%": 80,
    "+": 70, "-": 70,
    "<": 60, "<=": 60, ">": 60, ">=": 60,
    "==": 50, "!=": 50,
    "&": 40, "^": 30, "|": 20,
    "&&": 10, "||": 5,
}
_UNARY_PREC = 90
_POSTFIX_PREC = 100


def type_to_str(t: CType) -> str:
    if isinstance(t, VoidType):
        return "void"
    if isinstance(t, IntType):
        return _INT_NAMES[(t.width, t.signed)]
    if isinstance(t, FloatType):
        return "double"
    if isinstance(t, RecordType):
        return f"struct {t.name}"
    if isinstance(t, PointerType):
        return type_to_str(t.pointee) + "*"
    raise AssertionError(f"unknown type {t!r}")


def expr_to_str(e: Expr, prec: int = 0) -> str:
    if isinstance(e, IntLit):
        text = str(e.value)
        return f"({text})" if e.value < 0 and prec > _UNARY_PREC else text
    if isinstance(e, FloatLit):
        text = repr(e.value)
        if "." not in text and "e" not in text and "inf" not in text:
            text += ".0"
        return f"({text})" if e.value < 0 and prec > _UNARY_PREC else text
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, Subscript):
        return f"{expr_to_str(e.base, _POSTFIX_PREC)}[{expr_to_str(e.index)}]"
    if isinstance(e, Member):
        sep = "->" if e.arrow else "."
        return f"{expr_to_str(e.base, _POSTFIX_PREC)}{sep}{e.field_name}"
    if isinstance(e, Call):
        args = ", ".join(expr_to_str(a) for a in e.args)
        return f"{e.callee}({args})"
    if isinstance(e, AllocExpr):
        return f"alloc({type_to_str(e.elem_type)}, {expr_to_str(e.count)})"
    if isinstance(e, Deref):
        text = f"*{expr_to_str(e.operand, _UNARY_PREC)}"
        return f"({text})" if prec > _UNARY_PREC else text
    if isinstance(e, AddrOf):
        text = f"&{expr_to_str(e.operand, _UNARY_PREC)}"
        return f"({text})" if prec > _UNARY_PREC else text
    if isinstance(e, BinOp):
        p = _BIN_PREC[e.op]
        text = f"{expr_to_str(e.lhs, p)} {e.op} {expr_to_str(e.rhs, p + 1)}"
        return f"({text})" if prec > p else text
    raise AssertionError(f"unknown expression {type(e).__name__}")


def _simple_stmt_to_str(st: Stmt) -> str:
    """Statement text without the trailing semicolon (for for-slots)."""
    if isinstance(st, DeclStmt):
        text = f"{type_to_str(st.ctype)} {st.name}"
        if st.init is not None:
            text += f" = {expr_to_str(st.init)}"
        return text
    if isinstance(st, AssignStmt):
        return f"{expr_to_str(st.lhs)} {st.op} {expr_to_str(st.rhs)}"
    if isinstance(st, IncDecStmt):
        op = "++" if st.delta > 0 else "--"
        return f"{expr_to_str(st.target, _POSTFIX_PREC)}{op}"
    if isinstance(st, ExprStmt):
        return expr_to_str(st.expr)
    raise AssertionError(f"{type(st).__name__} is not a simple statement")


class _Emitter:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.depth = 0

    def line(self, text: str) -> None:
        self.lines.append("  " * self.depth + text)

    def body(self, stmts: list[Stmt]) -> None:
        self.depth += 1
        for st in stmts:
            self.stmt(st)
        self.depth -= 1

    def stmt(self, st: Stmt) -> None:
        if isinstance(st, (DeclStmt, AssignStmt, IncDecStmt, ExprStmt)):
            self.line(_simple_stmt_to_str(st) + ";")
        elif isinstance(st, ReturnStmt):
            if st.value is None:
                self.line("return;")
            else:
                self.line(f"return {expr_to_str(st.value)};")
        elif isinstance(st, IfStmt):
            self.line(f"if ({expr_to_str(st.cond)}) {{")
            self.body(st.then_body)
            if st.else_body:
                self.line("} else {")
                self.body(st.else_body)
            self.line("}")
        elif isinstance(st, WhileStmt):
            self.line(f"while ({expr_to_str(st.cond)}) {{")
            self.body(st.body)
            self.line("}")
        elif isinstance(st, ForStmt):
            init = _simple_stmt_to_str(st.init) if st.init is not None else ""
            step = _simple_stmt_to_str(st.step) if st.step is not None else ""
            self.line(f"for ({init}; {expr_to_str(st.cond)}; {step}) {{")
            self.body(st.body)
            self.line("}")
        elif isinstance(st, BlockStmt):
            self.line("{")
            self.body(st.body)
            self.line("}")
        else:
            raise AssertionError(f"unknown statement {type(st).__name__}")


def print_source(tu: TranslationUnit) -> str:
    """Emit the unit as compilable subset text in the canonical layout."""
    em = _Emitter()
    for rec in tu.records:
        em.line(f"struct {rec.name} {{")
        for fname, ftype in rec.fields:
            em.line(f"  {type_to_str(ftype)} {fname};")
        em.line("};")
        em.line("")
    for fn in tu.functions:
        params = ", ".join(f"{type_to_str(t)} {n}" for n, t in fn.params)
        head = f"{type_to_str(fn.return_type)} {fn.name}({params})"
        if fn.body is None:
            em.line(head + ";")
            em.line("")
            continue
        em.line(head + " {")
        em.body(fn.body)
        em.line("}")
        em.line("")
    while em.lines and em.lines[-1] == "":
        em.lines.pop()
    return "\n".join(em.lines) + ("\n" if em.lines else "")
