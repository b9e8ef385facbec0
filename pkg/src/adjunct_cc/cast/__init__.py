"""Parser, typed AST, and canonical printer for the supported C subset."""

from .nodes import (
    ADJUNCT_TYPE, CHAR, DOUBLE, INT, LONG, SYNTH, UCHAR, UINT, ULONG, VOID,
    AddrOf, AllocExpr, AssignStmt, BinOp, BlockStmt, Call, CType, DeclStmt,
    Deref, Expr, ExprStmt, FloatLit, FloatType, ForStmt, FuncDef, IfStmt,
    IncDecStmt, IntLit, IntType, Member, Name, PointerType, RecordDef,
    RecordType, ReturnStmt, Span, Stmt, Subscript, TranslationUnit, VoidType,
    WhileStmt, children, structural_equal, walk, walk_tu,
)
from .parser import parse
from .printer import expr_to_str, print_source, type_to_str

__all__ = [
    "ADJUNCT_TYPE", "CHAR", "DOUBLE", "INT", "LONG", "SYNTH", "UCHAR", "UINT",
    "ULONG", "VOID", "AddrOf", "AllocExpr", "AssignStmt", "BinOp", "BlockStmt",
    "Call", "CType", "DeclStmt", "Deref", "Expr", "ExprStmt", "FloatLit",
    "FloatType", "ForStmt", "FuncDef", "IfStmt", "IncDecStmt", "IntLit",
    "IntType", "Member", "Name", "PointerType", "RecordDef", "RecordType",
    "ReturnStmt", "Span", "Stmt", "Subscript", "TranslationUnit", "VoidType",
    "WhileStmt", "children", "expr_to_str", "parse", "print_source",
    "structural_equal", "type_to_str", "walk", "walk_tu",
]
