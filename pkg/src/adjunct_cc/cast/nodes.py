"""Typed AST for the supported C subset.

Every node carries a source span; spans and inferred types are excluded from
equality so `==` on nodes is structural comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional, Union


@dataclass(frozen=True, slots=True)
class Span:
    file: str
    line: int  # 1-based
    column: int  # 1-based
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


SYNTH = Span("<synthesized>", 1, 1, 0)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class CType:
    @property
    def order(self) -> int:
        """Pointer depth: 0 for non-pointers."""
        return 0

    def is_int(self) -> bool:
        return isinstance(self, IntType)

    def is_float(self) -> bool:
        return isinstance(self, FloatType)

    def is_pointer(self) -> bool:
        return isinstance(self, PointerType)

    def is_scalar(self) -> bool:
        return self.is_int() or self.is_float()


@dataclass(frozen=True, slots=True)
class IntType(CType):
    width: int  # bits: 8, 32, 64
    signed: bool = True


@dataclass(frozen=True, slots=True)
class FloatType(CType):
    width: int = 64


@dataclass(frozen=True, slots=True)
class PointerType(CType):
    pointee: CType

    @property
    def order(self) -> int:
        return 1 + self.pointee.order


@dataclass(frozen=True, slots=True)
class RecordType(CType):
    name: str
    # resolved field layout; identity is by name, the layout is a cache
    fields: tuple[tuple[str, CType], ...] = field(default=(), compare=False)

    def field_type(self, name: str) -> Optional[CType]:
        for fname, ftype in self.fields:
            if fname == name:
                return ftype
        return None

    def field_index(self, name: str) -> int:
        for i, (fname, _) in enumerate(self.fields):
            if fname == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True, slots=True)
class VoidType(CType):
    pass


CHAR = IntType(8, True)
UCHAR = IntType(8, False)
INT = IntType(32, True)
UINT = IntType(32, False)
LONG = IntType(64, True)
ULONG = IntType(64, False)
DOUBLE = FloatType(64)
VOID = VoidType()

# the type every adjunct variable receives
ADJUNCT_TYPE = LONG


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class Expr:
    span: Span = field(compare=False, kw_only=True, default=SYNTH)
    # filled in by the type checker; a derived attribute, not structure
    ctype: Optional[CType] = field(
        default=None, compare=False, repr=False, kw_only=True
    )


@dataclass(slots=True)
class IntLit(Expr):
    value: int = 0


@dataclass(slots=True)
class FloatLit(Expr):
    value: float = 0.0


@dataclass(slots=True)
class Name(Expr):
    ident: str = ""


@dataclass(slots=True)
class Subscript(Expr):
    base: Expr = None
    index: Expr = None


@dataclass(slots=True)
class Deref(Expr):
    operand: Expr = None


@dataclass(slots=True)
class AddrOf(Expr):
    operand: Expr = None


@dataclass(slots=True)
class Member(Expr):
    base: Expr = None
    field_name: str = ""
    arrow: bool = False  # True for ->, False for .


@dataclass(slots=True)
class BinOp(Expr):
    op: str = ""
    lhs: Expr = None
    rhs: Expr = None


@dataclass(slots=True)
class Call(Expr):
    callee: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass(slots=True)
class AllocExpr(Expr):
    """Allocation intrinsic: a fresh container of `count` elements."""
    elem_type: CType = None
    count: Expr = None


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class Stmt:
    span: Span = field(compare=False, kw_only=True, default=SYNTH)


@dataclass(slots=True)
class DeclStmt(Stmt):
    name: str = ""
    ctype: CType = None
    init: Optional[Expr] = None


@dataclass(slots=True)
class AssignStmt(Stmt):
    lhs: Expr = None
    op: str = "="  # one of =, +=, -=
    rhs: Expr = None


@dataclass(slots=True)
class ExprStmt(Stmt):
    expr: Expr = None


@dataclass(slots=True)
class IncDecStmt(Stmt):
    target: Expr = None
    delta: int = 1  # +1 or -1


@dataclass(slots=True)
class ForStmt(Stmt):
    init: Optional[Stmt] = None
    cond: Optional[Expr] = None
    step: Optional[Stmt] = None
    body: list[Stmt] = field(default_factory=list)


@dataclass(slots=True)
class WhileStmt(Stmt):
    cond: Expr = None
    body: list[Stmt] = field(default_factory=list)


@dataclass(slots=True)
class IfStmt(Stmt):
    cond: Expr = None
    then_body: list[Stmt] = field(default_factory=list)
    else_body: list[Stmt] = field(default_factory=list)


@dataclass(slots=True)
class ReturnStmt(Stmt):
    value: Optional[Expr] = None


@dataclass(slots=True)
class BlockStmt(Stmt):
    body: list[Stmt] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Top level
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class RecordDef:
    name: str
    fields: list[tuple[str, CType]] = field(default_factory=list)
    span: Span = field(compare=False, kw_only=True, default=SYNTH)


@dataclass(slots=True)
class FuncDef:
    name: str
    params: list[tuple[str, CType]] = field(default_factory=list)
    return_type: CType = VOID
    body: Optional[list[Stmt]] = None  # None for a prototype
    span: Span = field(compare=False, kw_only=True, default=SYNTH)


@dataclass(slots=True)
class TranslationUnit:
    records: list[RecordDef] = field(default_factory=list)
    functions: list[FuncDef] = field(default_factory=list)

    def function(self, name: str) -> Optional[FuncDef]:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def record(self, name: str) -> Optional[RecordDef]:
        for r in self.records:
            if r.name == name:
                return r
        return None


Node = Union[Expr, Stmt, RecordDef, FuncDef, TranslationUnit]


def structural_equal(a: TranslationUnit, b: TranslationUnit) -> bool:
    """True iff the two ASTs are identical ignoring spans and inferred types."""
    return a == b


def children(node) -> list:
    """Child nodes (Expr/Stmt) of an AST node, in source order."""
    out = []
    for f in fields(node):
        if f.name in ("span", "ctype"):
            continue
        v = getattr(node, f.name)
        if isinstance(v, (Expr, Stmt)):
            out.append(v)
        elif isinstance(v, list):
            out.extend(x for x in v if isinstance(x, (Expr, Stmt)))
    return out


def walk(node):
    """Yield node and all Expr/Stmt descendants, pre-order."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def walk_tu(tu: TranslationUnit):
    for fn in tu.functions:
        for st in fn.body or []:
            yield from walk(st)
