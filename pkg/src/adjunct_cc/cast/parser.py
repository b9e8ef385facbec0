"""Recursive-descent parser and type checker for the C subset.

The accepted grammar is documented in the README. Anything outside it is a
hard error with a span, never a silent skip: the rewrite passes assume full
visibility of every pointer operation.

Increment/decrement never appears inside expressions; `x = p++;` is desugared
at parse time into the assignment followed by the increment statement (the
prefix form desugars the other way around).
"""

from __future__ import annotations

import copy

from ..errors import SyntaxErr, TypeErr, UnsupportedConstructError
from .lexer import Token, tokenize
from .nodes import (
    CHAR, DOUBLE, INT, LONG, UCHAR, UINT, ULONG, VOID,
    AddrOf, AllocExpr, AssignStmt, BinOp, BlockStmt, Call, CType, DeclStmt,
    Deref, Expr, ExprStmt, FloatLit, FloatType, ForStmt, FuncDef, IfStmt,
    IncDecStmt, IntLit, IntType, Member, Name, PointerType, RecordDef,
    RecordType, ReturnStmt, Span, Stmt, Subscript, TranslationUnit, VoidType,
    WhileStmt,
)

MAX_POINTER_ORDER = 2

_TYPE_START = {"void", "char", "int", "long", "unsigned", "double", "struct"}

_CMP_OPS = {"<", "<=", ">", ">=", "==", "!="}
_ARITH_OPS = {"+", "-", "*", "/", "%"}
_BIT_OPS = {"^", "&", "|"}
_LOGIC_OPS = {"&&", "||"}

# binary operators by descending binding strength; each level is left-assoc
_PRECEDENCE: list[tuple[str, ...]] = [
    ("*", "/", "%"),
    ("+", "-"),
    ("<", "<=", ">", ">="),
    ("==", "!="),
    ("&",),
    ("^",),
    ("|",),
    ("&&",),
    ("||",),
]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "punct" and t.text == text

    def at_kw(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text == text

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            raise SyntaxErr(t.span, f"unexpected '{t.text or '<eof>'}'", (f"'{text}'",))
        return self.next()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise SyntaxErr(t.span, f"unexpected '{t.text or '<eof>'}'", ("identifier",))
        return self.next()

    def at_type_start(self) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text in _TYPE_START

    # -- types ---------------------------------------------------------------

    def parse_type(self) -> CType:
        t = self.peek()
        if not self.at_type_start():
            raise SyntaxErr(t.span, f"unexpected '{t.text}'", ("type name",))
        self.next()
        if t.text == "void":
            base: CType = VOID
        elif t.text == "char":
            base = CHAR
        elif t.text == "int":
            base = INT
        elif t.text == "long":
            base = LONG
        elif t.text == "double":
            base = DOUBLE
        elif t.text == "unsigned":
            nxt = self.peek()
            if nxt.kind == "kw" and nxt.text in ("char", "int", "long"):
                self.next()
                base = {"char": UCHAR, "int": UINT, "long": ULONG}[nxt.text]
            else:
                base = UINT
        elif t.text == "struct":
            name = self.expect_ident()
            base = RecordType(name.text)
        else:  # pragma: no cover - keyword set is closed
            raise SyntaxErr(t.span, f"unexpected '{t.text}'")
        order = 0
        while self.at_punct("*"):
            sp = self.next().span
            order += 1
            if order > MAX_POINTER_ORDER:
                raise UnsupportedConstructError(
                    sp, f"pointers beyond order {MAX_POINTER_ORDER} are unsupported")
            base = PointerType(base)
        if isinstance(base, VoidType) and t.text == "void" and order == 0:
            return VOID
        if isinstance(base, PointerType) and isinstance(base.pointee, VoidType):
            raise UnsupportedConstructError(t.span, "void pointers are unsupported")
        return base

    # -- expressions (no ++/-- inside) ---------------------------------------

    def parse_expr(self) -> Expr:
        return self._parse_binary(len(_PRECEDENCE) - 1)

    def _parse_binary(self, level: int) -> Expr:
        if level < 0:
            return self.parse_unary()
        lhs = self._parse_binary(level - 1)
        while self.peek().kind == "punct" and self.peek().text in _PRECEDENCE[level]:
            op = self.next()
            rhs = self._parse_binary(level - 1)
            lhs = BinOp(op.text, lhs, rhs, span=op.span)
        return lhs

    def parse_unary(self) -> Expr:
        t = self.peek()
        if self.at_punct("*"):
            self.next()
            return Deref(self.parse_unary(), span=t.span)
        if self.at_punct("&"):
            self.next()
            return AddrOf(self.parse_unary(), span=t.span)
        if self.at_punct("-"):
            num = self.peek(1)
            if num.kind == "int":
                self.next()
                self.next()
                return IntLit(-int(num.text), span=t.span)
            if num.kind == "float":
                self.next()
                self.next()
                return FloatLit(-float(num.text), span=t.span)
            raise UnsupportedConstructError(
                t.span, "unary minus is only supported on numeric literals")
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        e = self.parse_primary()
        while True:
            t = self.peek()
            if self.at_punct("["):
                self.next()
                idx = self.parse_expr()
                self.expect("]")
                e = Subscript(e, idx, span=t.span)
            elif self.at_punct("."):
                self.next()
                f = self.expect_ident()
                e = Member(e, f.text, arrow=False, span=t.span)
            elif self.at_punct("->"):
                self.next()
                f = self.expect_ident()
                e = Member(e, f.text, arrow=True, span=t.span)
            elif self.at_punct("("):
                if not isinstance(e, Name):
                    raise UnsupportedConstructError(
                        t.span, "calls through expressions (function pointers) are unsupported")
                self.next()
                args = []
                if not self.at_punct(")"):
                    args.append(self.parse_expr())
                    while self.at_punct(","):
                        self.next()
                        args.append(self.parse_expr())
                self.expect(")")
                e = Call(e.ident, args, span=e.span)
            else:
                return e

    def parse_primary(self) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return IntLit(int(t.text), span=t.span)
        if t.kind == "float":
            self.next()
            return FloatLit(float(t.text), span=t.span)
        if self.at_kw("alloc"):
            self.next()
            self.expect("(")
            elem = self.parse_type()
            self.expect(",")
            count = self.parse_expr()
            self.expect(")")
            return AllocExpr(elem, count, span=t.span)
        if t.kind == "ident":
            self.next()
            return Name(t.text, span=t.span)
        if self.at_punct("("):
            self.next()
            if self.at_type_start():
                raise UnsupportedConstructError(t.span, "casts are unsupported")
            e = self.parse_expr()
            self.expect(")")
            return e
        raise SyntaxErr(t.span, f"unexpected '{t.text or '<eof>'}'", ("expression",))

    # -- statements ----------------------------------------------------------

    def parse_block_body(self) -> list[Stmt]:
        self.expect("{")
        body: list[Stmt] = []
        while not self.at_punct("}"):
            if self.peek().kind == "eof":
                raise SyntaxErr(self.peek().span, "unexpected end of input", ("'}'",))
            body.extend(self.parse_statement())
        self.expect("}")
        return body

    def parse_statement(self) -> list[Stmt]:
        t = self.peek()
        if self.at_punct("{"):
            return [BlockStmt(self.parse_block_body(), span=t.span)]
        if self.at_kw("if"):
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then_body = self.parse_branch_body()
            else_body: list[Stmt] = []
            if self.at_kw("else"):
                self.next()
                else_body = self.parse_branch_body()
            return [IfStmt(cond, then_body, else_body, span=t.span)]
        if self.at_kw("while"):
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_branch_body()
            return [WhileStmt(cond, body, span=t.span)]
        if self.at_kw("for"):
            self.next()
            self.expect("(")
            init = None
            if not self.at_punct(";"):
                init = self.parse_single_stmt("for initializer")
            self.expect(";")
            cond = self.parse_expr()
            self.expect(";")
            step = None
            if not self.at_punct(")"):
                step = self.parse_single_stmt("for step")
            self.expect(")")
            body = self.parse_branch_body()
            return [ForStmt(init, cond, step, body, span=t.span)]
        if self.at_kw("return"):
            self.next()
            value = None
            if not self.at_punct(";"):
                value = self.parse_expr()
            self.expect(";")
            return [ReturnStmt(value, span=t.span)]
        if self.at_type_start():
            stmts = self.parse_decl()
            self.expect(";")
            return stmts
        stmts = self.parse_simple()
        self.expect(";")
        return stmts

    def parse_branch_body(self) -> list[Stmt]:
        if self.at_punct("{"):
            return self.parse_block_body()
        return self.parse_statement()

    def parse_single_stmt(self, where: str) -> Stmt:
        """A for-loop init/step slot: exactly one statement, no desugaring."""
        if self.at_type_start():
            stmts = self.parse_decl()
        else:
            stmts = self.parse_simple()
        if len(stmts) != 1:
            raise UnsupportedConstructError(
                stmts[0].span, f"increment assignments are unsupported in a {where}")
        return stmts[0]

    def parse_decl(self) -> list[Stmt]:
        t = self.peek()
        ctype = self.parse_type()
        name = self.expect_ident()
        if self.at_punct(","):
            raise UnsupportedConstructError(
                self.peek().span, "multiple declarators per declaration are unsupported")
        if not self.at_punct("="):
            return [DeclStmt(name.text, ctype, None, span=t.span)]
        self.next()
        init, extra = self.parse_rhs()
        decl = DeclStmt(name.text, ctype, init, span=t.span)
        return extra["before"] + [decl] + extra["after"]

    def parse_simple(self) -> list[Stmt]:
        t = self.peek()
        if self.at_punct("++") or self.at_punct("--"):
            delta = 1 if self.next().text == "++" else -1
            target = self.parse_unary()
            return [IncDecStmt(target, delta, span=t.span)]
        e = self.parse_unary()
        if self.at_punct("++") or self.at_punct("--"):
            if isinstance(e, Deref):
                raise UnsupportedConstructError(
                    self.peek().span,
                    "'*p++' is ambiguous; write '(*p)++' or a separate 'p++;'")
            delta = 1 if self.next().text == "++" else -1
            return [IncDecStmt(e, delta, span=t.span)]
        if self.peek().kind == "punct" and self.peek().text in ("=", "+=", "-="):
            op = self.next()
            rhs, extra = self.parse_rhs()
            if op.text != "=" and (extra["before"] or extra["after"]):
                raise SyntaxErr(op.span, "increment RHS requires plain '='")
            assign = AssignStmt(e, op.text, rhs, span=t.span)
            return extra["before"] + [assign] + extra["after"]
        if self.peek().kind == "punct" and self.peek().text in (
                "*=", "/=", "%=", "^=", "&=", "|="):
            raise UnsupportedConstructError(
                self.peek().span, f"compound operator '{self.peek().text}' is unsupported")
        # a bare expression statement; re-parse trailing binary operators
        e = self.continue_binary(e)
        return [ExprStmt(e, span=t.span)]

    def continue_binary(self, lhs: Expr) -> Expr:
        """Extend an already-parsed postfix expression with binary operators."""
        for level in range(len(_PRECEDENCE)):
            while (self.peek().kind == "punct"
                   and self.peek().text in _PRECEDENCE[level]):
                op = self.next()
                rhs = self._parse_binary(level - 1)
                lhs = BinOp(op.text, lhs, rhs, span=op.span)
        return lhs

    def parse_rhs(self) -> tuple[Expr, dict]:
        """RHS of '=' in a statement; `p++`/`++p` as the whole RHS desugars.

        Returns (value expression, {'before': stmts, 'after': stmts}).
        """
        extra = {"before": [], "after": []}
        t = self.peek()
        if self.at_punct("++") or self.at_punct("--"):
            delta = 1 if self.next().text == "++" else -1
            target = self.parse_postfix()
            extra["before"].append(IncDecStmt(target, delta, span=t.span))
            return copy.deepcopy(target), extra
        e = self.parse_expr()
        if self.at_punct("++") or self.at_punct("--"):
            if not isinstance(e, (Name, Subscript, Member, Deref)):
                raise SyntaxErr(self.peek().span, "'++' needs an lvalue operand")
            delta = 1 if self.next().text == "++" else -1
            extra["after"].append(IncDecStmt(copy.deepcopy(e), delta, span=t.span))
            return e, extra
        return e, extra

    # -- top level -----------------------------------------------------------

    def parse_unit(self) -> TranslationUnit:
        tu = TranslationUnit()
        while self.peek().kind != "eof":
            t = self.peek()
            if self.at_kw("struct") and self.peek(2).text == "{":
                tu.records.append(self.parse_record())
                continue
            if not self.at_type_start():
                raise SyntaxErr(
                    t.span, f"unexpected '{t.text}'", ("type name", "'struct'"))
            rtype = self.parse_type()
            name = self.expect_ident()
            self.expect("(")
            params: list[tuple[str, CType]] = []
            if not self.at_punct(")"):
                while True:
                    ptype = self.parse_type()
                    pname = self.expect_ident()
                    params.append((pname.text, ptype))
                    if self.at_punct(","):
                        self.next()
                        continue
                    break
            self.expect(")")
            if self.at_punct(";"):
                self.next()
                tu.functions.append(
                    FuncDef(name.text, params, rtype, None, span=t.span))
            else:
                body = self.parse_block_body()
                tu.functions.append(
                    FuncDef(name.text, params, rtype, body, span=t.span))
        return tu

    def parse_record(self) -> RecordDef:
        t = self.expect("struct")
        name = self.expect_ident()
        self.expect("{")
        fields: list[tuple[str, CType]] = []
        while not self.at_punct("}"):
            ftype = self.parse_type()
            fname = self.expect_ident()
            self.expect(";")
            fields.append((fname.text, ftype))
        self.expect("}")
        self.expect(";")
        return RecordDef(name.text, fields, span=t.span)


# ---------------------------------------------------------------------------
# Type checking
# ---------------------------------------------------------------------------

def _assignable(dst: CType, src: CType) -> bool:
    if dst.is_int() and src.is_int():
        return True
    if dst.is_float() and src.is_scalar():
        return True
    if dst.is_pointer() and src.is_pointer():
        return dst == src
    return False


class _Checker:
    def __init__(self, tu: TranslationUnit):
        self.tu = tu
        self.records: dict[str, RecordType] = {}
        self.signatures: dict[str, FuncDef] = {}

    def run(self) -> None:
        for rec in self.tu.records:
            if rec.name in self.records:
                raise TypeErr(rec.span, f"duplicate record '{rec.name}'")
            resolved = []
            for fname, ftype in rec.fields:
                ftype = self.resolve(ftype, rec.span)
                if isinstance(ftype, RecordType):
                    raise UnsupportedConstructError(
                        rec.span, "record-valued fields are unsupported (use a pointer)")
                if any(f == fname for f, _ in resolved):
                    raise TypeErr(rec.span, f"duplicate field '{fname}' in '{rec.name}'")
                resolved.append((fname, ftype))
            rec.fields = resolved
            self.records[rec.name] = RecordType(rec.name, tuple(resolved))
        for fn in self.tu.functions:
            if fn.name in self.signatures:
                raise TypeErr(fn.span, f"duplicate function '{fn.name}'")
            if fn.name == "alloc":
                raise TypeErr(fn.span, "'alloc' is the allocation intrinsic")
            fn.return_type = self.resolve(fn.return_type, fn.span)
            fn.params = [(n, self.resolve(t, fn.span)) for n, t in fn.params]
            for _, ptype in fn.params:
                if isinstance(ptype, (VoidType, RecordType)):
                    raise UnsupportedConstructError(
                        fn.span, "parameters must be scalars or pointers")
            self.signatures[fn.name] = fn
        for fn in self.tu.functions:
            if fn.body is not None:
                self.check_function(fn)

    def resolve(self, t: CType, span: Span) -> CType:
        if isinstance(t, RecordType):
            if t.name not in self.records:
                raise TypeErr(span, f"unknown record 'struct {t.name}'")
            return self.records[t.name]
        if isinstance(t, PointerType):
            return PointerType(self.resolve(t.pointee, span))
        return t

    # -- per function ---------------------------------------------------------

    def check_function(self, fn: FuncDef) -> None:
        self.fn = fn
        self.scope: dict[str, CType] = {}
        self.declared: set[str] = set()
        for pname, ptype in fn.params:
            if pname in self.scope:
                raise TypeErr(fn.span, f"duplicate parameter '{pname}'")
            self.scope[pname] = ptype
            self.declared.add(pname)
        self.check_body(fn.body)

    def check_body(self, body: list[Stmt]) -> None:
        added: list[str] = []
        for st in body:
            added.extend(self.check_stmt(st))
        for name in added:
            del self.scope[name]

    def check_stmt(self, st: Stmt) -> list[str]:
        """Check one statement; returns names it added to the current scope."""
        if isinstance(st, DeclStmt):
            st.ctype = self.resolve(st.ctype, st.span)
            if isinstance(st.ctype, VoidType):
                raise TypeErr(st.span, f"'{st.name}' declared void")
            if st.name in self.declared:
                raise UnsupportedConstructError(
                    st.span, f"redeclaration of '{st.name}' (shadowing is unsupported)")
            if st.name in self.signatures:
                raise TypeErr(st.span, f"'{st.name}' is already a function name")
            if st.init is not None:
                it = self.check_expr(st.init)
                if not _assignable(st.ctype, it):
                    raise TypeErr(st.span, f"cannot initialize '{st.name}' from {_tyname(it)}")
            elif isinstance(st.ctype, RecordType):
                pass  # record locals start uninitialized
            self.scope[st.name] = st.ctype
            self.declared.add(st.name)
            return [st.name]
        if isinstance(st, AssignStmt):
            lt = self.check_expr(st.lhs)
            self.require_lvalue(st.lhs)
            rt = self.check_expr(st.rhs)
            if st.op == "=":
                if not _assignable(lt, rt):
                    raise TypeErr(st.span, f"cannot assign {_tyname(rt)} to {_tyname(lt)}")
            else:
                if lt.is_pointer():
                    if not rt.is_int():
                        raise TypeErr(st.span, "pointer moves take an integer amount")
                elif lt.is_int():
                    if not rt.is_int():
                        raise TypeErr(st.span, f"'{st.op}' needs integer operands")
                elif lt.is_float():
                    if not rt.is_scalar():
                        raise TypeErr(st.span, f"'{st.op}' needs scalar operands")
                else:
                    raise TypeErr(st.span, f"'{st.op}' target must be scalar or pointer")
            return []
        if isinstance(st, ExprStmt):
            self.check_expr(st.expr)
            return []
        if isinstance(st, IncDecStmt):
            tt = self.check_expr(st.target)
            self.require_lvalue(st.target)
            if not (tt.is_int() or tt.is_pointer()):
                raise TypeErr(st.span, "'++'/'--' target must be integer or pointer")
            return []
        if isinstance(st, ForStmt):
            added: list[str] = []
            if st.init is not None:
                added.extend(self.check_stmt(st.init))
            self.require_int(st.cond, "for condition")
            if st.step is not None:
                added.extend(self.check_stmt(st.step))
            self.check_body(st.body)
            for name in added:
                del self.scope[name]
            return []
        if isinstance(st, WhileStmt):
            self.require_int(st.cond, "while condition")
            self.check_body(st.body)
            return []
        if isinstance(st, IfStmt):
            self.require_int(st.cond, "if condition")
            self.check_body(st.then_body)
            self.check_body(st.else_body)
            return []
        if isinstance(st, ReturnStmt):
            want = self.fn.return_type
            if st.value is None:
                if not isinstance(want, VoidType):
                    raise TypeErr(st.span, f"'{self.fn.name}' must return a value")
            else:
                got = self.check_expr(st.value)
                if isinstance(want, VoidType):
                    raise TypeErr(st.span, f"void '{self.fn.name}' cannot return a value")
                if not _assignable(want, got):
                    raise TypeErr(st.span, f"cannot return {_tyname(got)} from '{self.fn.name}'")
            return []
        if isinstance(st, BlockStmt):
            self.check_body(st.body)
            return []
        raise AssertionError(f"unhandled statement {type(st).__name__}")

    def require_int(self, e: Expr, what: str) -> None:
        t = self.check_expr(e)
        if not t.is_int():
            raise TypeErr(e.span, f"{what} must be integer, got {_tyname(t)}")

    def require_lvalue(self, e: Expr) -> None:
        if not isinstance(e, (Name, Subscript, Member, Deref)):
            raise TypeErr(e.span, "not an assignable location")

    # -- expressions ----------------------------------------------------------

    def check_expr(self, e: Expr) -> CType:
        t = self._expr_type(e)
        e.ctype = t
        return t

    def _expr_type(self, e: Expr) -> CType:
        if isinstance(e, IntLit):
            return LONG
        if isinstance(e, FloatLit):
            return DOUBLE
        if isinstance(e, Name):
            if e.ident not in self.scope:
                raise TypeErr(e.span, f"undeclared identifier '{e.ident}'")
            return self.scope[e.ident]
        if isinstance(e, Subscript):
            bt = self.check_expr(e.base)
            if not bt.is_pointer():
                raise TypeErr(e.span, f"subscript base must be a pointer, got {_tyname(bt)}")
            self.require_int(e.index, "subscript index")
            return bt.pointee
        if isinstance(e, Deref):
            ot = self.check_expr(e.operand)
            if not ot.is_pointer():
                raise TypeErr(e.span, f"cannot dereference {_tyname(ot)}")
            return ot.pointee
        if isinstance(e, AddrOf):
            ot = self.check_expr(e.operand)
            self.require_lvalue(e.operand)
            pt = PointerType(ot)
            if pt.order > MAX_POINTER_ORDER:
                raise UnsupportedConstructError(
                    e.span, f"pointers beyond order {MAX_POINTER_ORDER} are unsupported")
            return pt
        if isinstance(e, Member):
            bt = self.check_expr(e.base)
            if e.arrow:
                if not (bt.is_pointer() and isinstance(bt.pointee, RecordType)):
                    raise TypeErr(e.span, f"'->' base must be a record pointer, got {_tyname(bt)}")
                rec = bt.pointee
            else:
                if not isinstance(bt, RecordType):
                    raise TypeErr(e.span, f"'.' base must be a record, got {_tyname(bt)}")
                rec = bt
            ft = rec.field_type(e.field_name)
            if ft is None:
                raise TypeErr(e.span, f"'struct {rec.name}' has no field '{e.field_name}'")
            return ft
        if isinstance(e, BinOp):
            return self._binop_type(e)
        if isinstance(e, Call):
            sig = self.signatures.get(e.callee)
            if sig is None:
                raise TypeErr(e.span, f"call to undeclared function '{e.callee}'")
            if len(e.args) != len(sig.params):
                raise TypeErr(
                    e.span,
                    f"'{e.callee}' takes {len(sig.params)} arguments, got {len(e.args)}")
            for arg, (pname, ptype) in zip(e.args, sig.params):
                at = self.check_expr(arg)
                if not _assignable(ptype, at):
                    raise TypeErr(
                        arg.span, f"argument '{pname}' of '{e.callee}' "
                        f"expects {_tyname(ptype)}, got {_tyname(at)}")
            return sig.return_type
        if isinstance(e, AllocExpr):
            e.elem_type = self.resolve(e.elem_type, e.span)
            if isinstance(e.elem_type, VoidType):
                raise TypeErr(e.span, "cannot allocate void elements")
            self.require_int(e.count, "allocation count")
            pt = PointerType(e.elem_type)
            if pt.order > MAX_POINTER_ORDER:
                raise UnsupportedConstructError(
                    e.span, f"pointers beyond order {MAX_POINTER_ORDER} are unsupported")
            return pt
        raise AssertionError(f"unhandled expression {type(e).__name__}")

    def _binop_type(self, e: BinOp) -> CType:
        lt = self.check_expr(e.lhs)
        rt = self.check_expr(e.rhs)
        op = e.op
        if op in _CMP_OPS:
            if lt.is_pointer() and rt.is_pointer():
                if lt != rt:
                    raise TypeErr(e.span, "comparison of unrelated pointer types")
                return INT
            if lt.is_scalar() and rt.is_scalar():
                return INT
            raise TypeErr(e.span, f"'{op}' cannot compare {_tyname(lt)} and {_tyname(rt)}")
        if op in _LOGIC_OPS:
            if lt.is_int() and rt.is_int():
                return INT
            raise TypeErr(e.span, f"'{op}' needs integer operands")
        if op in _BIT_OPS:
            if lt.is_int() and rt.is_int():
                return LONG
            raise TypeErr(e.span, f"'{op}' needs integer operands")
        assert op in _ARITH_OPS
        if lt.is_pointer() or rt.is_pointer():
            if op == "+" and lt.is_pointer() and rt.is_int():
                return lt
            if op == "+" and rt.is_pointer() and lt.is_int():
                return rt
            if op == "-" and lt.is_pointer() and rt.is_int():
                return lt
            if op == "-" and lt.is_pointer() and rt.is_pointer():
                if lt != rt:
                    raise TypeErr(e.span, "subtraction of unrelated pointer types")
                return LONG
            raise TypeErr(e.span, f"'{op}' is not defined on {_tyname(lt)} and {_tyname(rt)}")
        if lt.is_float() or rt.is_float():
            if op == "%":
                raise TypeErr(e.span, "'%' needs integer operands")
            return DOUBLE
        return LONG


def _tyname(t: CType) -> str:
    from .printer import type_to_str
    return type_to_str(t)


def parse(source: str, filename: str = "<input>") -> TranslationUnit:
    """Parse and type-check a source text in the supported subset."""
    tokens = tokenize(source, filename)
    tu = _Parser(tokens).parse_unit()
    _Checker(tu).run()
    return tu
