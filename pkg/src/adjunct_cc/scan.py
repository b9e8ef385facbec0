"""Applicability statistics over source trees.

Counts, per file and in total, how many pointer variables are candidates for
arithmetic-offset rewriting (`applicable`), how many are ruled out because a
higher-order pointer is itself iterated (`non-applicable`), and how many are
exempt: double pointers used solely to hand allocation duty to a callee, and
the `argv` parameter of main.

An instance is a pointer variable declaration (parameter or local) of a
defined function; its uses decide the category. LoC counts lines that are
neither blank nor comment-only. Files that fail to parse keep their line
count and are flagged, never silently dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cast.nodes import (
    AllocExpr, AssignStmt, Call, DeclStmt, Deref, Expr, FuncDef, IncDecStmt,
    IntLit, Name, PointerType, Subscript, TranslationUnit, walk,
)
from .cast.parser import parse
from .errors import CompileError

APPLICABLE = "applicable"
NON_APPLICABLE = "non-applicable"
EXEMPT_DELEGATION = "allocation-delegation"
EXEMPT_ARGV = "argv"


@dataclass
class FileStats:
    path: str
    loc: int = 0
    applicable: int = 0
    non_applicable: int = 0
    exemptions: dict[str, int] = field(
        default_factory=lambda: {EXEMPT_DELEGATION: 0, EXEMPT_ARGV: 0})
    parse_failed: bool = False
    error: str | None = None

    def add(self, other: "FileStats") -> None:
        self.loc += other.loc
        self.applicable += other.applicable
        self.non_applicable += other.non_applicable
        for k, v in other.exemptions.items():
            self.exemptions[k] = self.exemptions.get(k, 0) + v


@dataclass
class ApplicabilityReport:
    files: list[FileStats] = field(default_factory=list)

    @property
    def total(self) -> FileStats:
        t = FileStats("<total>")
        for f in self.files:
            t.add(f)
        return t

    def to_obj(self) -> dict:
        t = self.total
        return {
            "files": [{
                "path": f.path,
                "loc": f.loc,
                "applicable": f.applicable,
                "non_applicable": f.non_applicable,
                "exemptions": dict(f.exemptions),
                "parse_failed": f.parse_failed,
                **({"error": f.error} if f.error else {}),
            } for f in self.files],
            "total": {
                "loc": t.loc,
                "applicable": t.applicable,
                "non_applicable": t.non_applicable,
                "exemptions": dict(t.exemptions),
            },
        }


_BLOCK_COMMENT = re.compile(r"/\*.*?\*/", re.S)
_LINE_COMMENT = re.compile(r"//[^\n]*")


def count_loc(text: str) -> int:
    """Non-blank, non-comment-only lines."""
    stripped = _LINE_COMMENT.sub("", _BLOCK_COMMENT.sub(
        lambda m: "\n" * m.group(0).count("\n"), text))
    return sum(1 for line in stripped.splitlines() if line.strip())


def _is_deref0(e: Expr) -> tuple[bool, Expr | None]:
    """`*p` or `p[0]`: (matches, base expr)."""
    if isinstance(e, Deref):
        return True, e.operand
    if isinstance(e, Subscript) and isinstance(e.index, IntLit) \
            and e.index.value == 0:
        return True, e.base
    return False, None


def _is_allocation_delegation_param(fn: FuncDef, pname: str) -> bool:
    """Order-2 parameter whose only uses are stores/loads through `*p`,
    with at least one store of a fresh allocation or call result."""
    saw_alloc_store = False
    deref_base_ids: set[int] = set()
    for top in fn.body or []:
        for node in walk(top):
            if isinstance(node, (Deref, Subscript)):
                d, base = _is_deref0(node)
                if d and isinstance(base, Name) and base.ident == pname:
                    deref_base_ids.add(id(base))
            if isinstance(node, AssignStmt):
                d, base = _is_deref0(node.lhs)
                if d and isinstance(base, Name) and base.ident == pname \
                        and isinstance(node.rhs, (AllocExpr, Call)):
                    saw_alloc_store = True
    for top in fn.body or []:
        for node in walk(top):
            if isinstance(node, Name) and node.ident == pname \
                    and id(node) not in deref_base_ids:
                return False
    return saw_alloc_store


def _moved_pointers(fn: FuncDef) -> set[str]:
    moved = set()
    for top in fn.body or []:
        for node in walk(top):
            if isinstance(node, IncDecStmt) and isinstance(node.target, Name) \
                    and node.target.ctype is not None \
                    and node.target.ctype.is_pointer():
                moved.add(node.target.ident)
            elif isinstance(node, AssignStmt) and isinstance(node.lhs, Name) \
                    and node.lhs.ctype is not None \
                    and node.lhs.ctype.is_pointer():
                if node.op in ("+=", "-="):
                    moved.add(node.lhs.ident)
                elif node.op == "=" and _self_arith(node.rhs, node.lhs.ident):
                    moved.add(node.lhs.ident)
    return moved


def _self_arith(rhs: Expr, var: str) -> bool:
    from .cast.nodes import BinOp
    if not isinstance(rhs, BinOp) or rhs.op not in ("+", "-"):
        return False
    if isinstance(rhs.lhs, Name) and rhs.lhs.ident == var:
        return True
    if rhs.op == "+" and isinstance(rhs.rhs, Name) and rhs.rhs.ident == var:
        return True
    return False


def scan_unit(tu: TranslationUnit, stats: FileStats) -> None:
    """Categorize every pointer variable declaration of defined functions."""
    for fn in tu.functions:
        if fn.body is None:
            continue
        moved = _moved_pointers(fn)
        decls: list[tuple[str, PointerType, bool]] = []
        for pname, ptype in fn.params:
            if isinstance(ptype, PointerType):
                decls.append((pname, ptype, True))
        for top in fn.body:
            for node in walk(top):
                if isinstance(node, DeclStmt) and isinstance(node.ctype, PointerType):
                    decls.append((node.name, node.ctype, False))
        for name, ptype, is_param in decls:
            if fn.name == "main" and is_param and name == "argv" \
                    and ptype.order == 2:
                stats.exemptions[EXEMPT_ARGV] += 1
                continue
            if ptype.order >= 2 and is_param \
                    and _is_allocation_delegation_param(fn, name):
                stats.exemptions[EXEMPT_DELEGATION] += 1
                continue
            if ptype.order >= 2 and name in moved:
                stats.non_applicable += 1
                continue
            stats.applicable += 1


def scan(paths: list[str]) -> ApplicabilityReport:
    """Scan files independently; the report is sorted by path, so the result
    does not depend on argument order."""
    report = ApplicabilityReport()
    for path in sorted(paths):
        stats = FileStats(str(path))
        report.files.append(stats)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            stats.parse_failed = True
            stats.error = f"io: {exc}"
            continue
        stats.loc = count_loc(text)
        try:
            tu = parse(text, str(path))
        except CompileError as exc:
            stats.parse_failed = True
            stats.error = exc.format()
            continue
        scan_unit(tu, stats)
    return report
