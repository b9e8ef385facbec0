"""Deterministic interpreter over a (container, offset) memory model.

Memory is a set of containers created by the allocation intrinsic (traced)
and by address-taken locals (untraced cells). A pointer value is a container
id plus a signed element offset; forming any offset is legal, dereferencing
requires it to be inside the container. Reads of never-written cells trap,
which keeps every run a pure function of its inputs.

The trace is the ordered sequence of (kind, container, offset, value) events
on traced containers; it is the executable form of "the transformed program
accesses the same memory locations".
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cast.nodes import (
    AddrOf, AllocExpr, AssignStmt, BinOp, BlockStmt, Call, CType, DeclStmt,
    Deref, Expr, ExprStmt, FloatLit, FloatType, ForStmt, FuncDef, IfStmt,
    IncDecStmt, IntLit, IntType, LONG, Member, Name, PointerType, RecordType,
    ReturnStmt, Span, Stmt, Subscript, TranslationUnit, WhileStmt, walk,
)
from .errors import TrapError
from .loops import canonical_for, loop_key

I64_MIN = -(1 << 63)
I64_MAX = (1 << 63) - 1

READ = "read"
WRITE = "write"
ALLOC = "alloc"
FREE = "free"


@dataclass(frozen=True, slots=True)
class Ptr:
    cid: int
    off: int  # cells from container start; element-scaled on arithmetic

    def __repr__(self) -> str:
        return f"ptr({self.cid}, {self.off})"


@dataclass(frozen=True, slots=True)
class TraceEvent:
    seq: int
    container: int
    offset: int
    kind: str
    value: object

    def __str__(self) -> str:
        return f"#{self.seq} {self.kind} ({self.container}, {self.offset}) = {self.value!r}"


class Container:
    __slots__ = ("cid", "elem_type", "elem_size", "length", "cells", "init",
                 "traced", "freed", "label")

    def __init__(self, cid: int, elem_type: CType, length: int,
                 traced: bool, label: str):
        self.cid = cid
        self.elem_type = elem_type
        self.elem_size = _elem_size(elem_type)
        self.length = length  # elements
        ncells = length * self.elem_size
        self.cells = [None] * ncells
        self.init = [False] * ncells
        self.traced = traced
        self.freed = False
        self.label = label


def _elem_size(t: CType) -> int:
    if isinstance(t, RecordType):
        return max(1, len(t.fields))
    return 1


def _cell_type(t: CType, cell_in_elem: int) -> CType:
    if isinstance(t, RecordType):
        return t.fields[cell_in_elem][1]
    return t


def wrap_int(value: int, t: CType) -> int:
    if isinstance(t, IntType) and t.width < 64:
        m = value & ((1 << t.width) - 1)
        if t.signed and m >= (1 << (t.width - 1)):
            m -= 1 << t.width
        return m
    if isinstance(t, IntType) and not t.signed:
        return value & ((1 << 64) - 1)
    return value


@dataclass
class FinalState:
    containers: dict[int, Container] = field(default_factory=dict)
    result: object = None


class Trace:
    def __init__(self) -> None:
        self.events: list[tuple] = []  # (kind, cid, offset, value)
        self.final: FinalState | None = None
        self.result: object = None

    def event(self, i: int) -> TraceEvent:
        kind, cid, off, value = self.events[i]
        return TraceEvent(i, cid, off, kind, value)

    def __len__(self) -> int:
        return len(self.events)


@dataclass
class LoopSchedule:
    """Iteration-order override for one canonical for-loop.

    `order` is 'reverse', 'random', or an explicit list of iteration numbers.
    `ivs` lists every induction variable of the loop (the counter included);
    their strides are evaluated at loop entry and each scheduled iteration t
    starts from entry_value + stride * t, which is exactly the privatization
    a parallel execution would perform.
    """
    order: object = "reverse"
    seed: int = 0
    ivs: list[tuple[str, Expr]] = field(default_factory=list)


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class Interp:
    def __init__(self, tu: TranslationUnit, fuel: int = 1_000_000,
                 schedule: dict | None = None):
        self.tu = tu
        self.fuel = fuel
        self.schedule = schedule or {}
        self.memory: dict[int, Container] = {}
        self.next_cid = 0
        self.trace = Trace()
        self.functions = {f.name: f for f in tu.functions if f.body is not None}
        self.records = {r.name: r for r in tu.records}
        self._addressable: dict[str, set[str]] = {}
        self._schedule_instances = 0
        for f in tu.functions:
            taken = set()
            for st in f.body or []:
                for node in walk(st):
                    if isinstance(node, AddrOf) and isinstance(node.operand, Name):
                        taken.add(node.operand.ident)
            self._addressable[f.name] = taken

    # -- memory ----------------------------------------------------------------

    def allocate(self, elem_type: CType, length: int, traced: bool,
                 label: str, span: Span) -> Ptr:
        if length < 0:
            raise TrapError("out-of-bounds", span, f"negative allocation ({length})")
        c = Container(self.next_cid, elem_type, length, traced, label)
        self.next_cid += 1
        self.memory[c.cid] = c
        if traced:
            self.trace.events.append((ALLOC, c.cid, 0, len(c.cells)))
        return Ptr(c.cid, 0)

    def container(self, ptr: Ptr, span: Span) -> Container:
        c = self.memory.get(ptr.cid)
        if c is None:
            raise TrapError("out-of-bounds", span, "dangling container id")
        if c.freed:
            raise TrapError("out-of-bounds", span, f"use of freed container {c.label}")
        return c

    def load_cell(self, ptr: Ptr, span: Span):
        c = self.container(ptr, span)
        off = ptr.off
        if not 0 <= off < len(c.cells):
            raise TrapError(
                "out-of-bounds", span,
                f"read at offset {off} of {c.label} (length {c.length})")
        if not c.init[off]:
            raise TrapError(
                "uninitialized-read", span,
                f"read of uninitialized offset {off} of {c.label}")
        v = c.cells[off]
        if c.traced:
            self.trace.events.append((READ, c.cid, off, v))
        return v

    def store_cell(self, ptr: Ptr, value, span: Span) -> None:
        c = self.container(ptr, span)
        off = ptr.off
        if not 0 <= off < len(c.cells):
            raise TrapError(
                "out-of-bounds", span,
                f"write at offset {off} of {c.label} (length {c.length})")
        cell_t = _cell_type(c.elem_type, off % c.elem_size)
        value = self.coerce(value, cell_t, span)
        c.cells[off] = value
        c.init[off] = True
        if c.traced:
            self.trace.events.append((WRITE, c.cid, off, value))

    def coerce(self, value, t: CType, span: Span):
        if isinstance(t, IntType):
            if isinstance(value, float):
                raise TrapError("type", span, "float stored into integer cell")
            return wrap_int(value, t)
        if isinstance(t, FloatType):
            if isinstance(value, Ptr):
                raise TrapError("type", span, "pointer stored into float cell")
            return float(value)
        return value

    # -- entry -------------------------------------------------------------------

    def run(self, entry: str, inputs: list) -> Trace:
        fn = self.functions.get(entry)
        if fn is None:
            raise TrapError("unknown-function", Span("<entry>", 1, 1),
                            f"no function '{entry}'")
        if len(inputs) != len(fn.params):
            raise TrapError(
                "bad-inputs", fn.span,
                f"'{entry}' takes {len(fn.params)} inputs, got {len(inputs)}")
        args = []
        for value, (pname, ptype) in zip(inputs, fn.params):
            if ptype.is_pointer():
                raise TrapError("bad-inputs", fn.span,
                                f"entry parameter '{pname}' is a pointer")
            args.append(self.coerce(value, ptype, fn.span))
        result = self.call_function(fn, args)
        self.trace.result = result
        self.trace.final = FinalState(self.memory, result)
        return self.trace

    # -- execution -----------------------------------------------------------------

    def call_function(self, fn: FuncDef, args: list):
        frame: dict[str, object] = {}
        addressable = self._addressable.get(fn.name, set())
        for (pname, ptype), value in zip(fn.params, args):
            self.bind_var(frame, fn.name, pname, ptype, value, fn.span)
        try:
            self.exec_body(fn.body, frame, fn.name)
        except _Return as r:
            return r.value
        return None

    def bind_var(self, frame: dict, fname: str, name: str, ctype: CType,
                 value, span: Span) -> None:
        if name in self._addressable.get(fname, set()) or isinstance(ctype, RecordType):
            ptr = self.allocate(ctype, 1, traced=False, label=f"&{name}", span=span)
            frame[name] = ("cell", ptr)
            if value is not None and not isinstance(ctype, RecordType):
                self.store_cell(ptr, value, span)
        else:
            frame[name] = ("val", self.coerce(value, ctype, span)
                           if value is not None else None, ctype)

    def exec_body(self, body: list[Stmt], frame: dict, fname: str) -> None:
        for st in body:
            self.exec_stmt(st, frame, fname)

    def exec_stmt(self, st: Stmt, frame: dict, fname: str) -> None:
        self.fuel -= 1
        if self.fuel <= 0:
            raise TrapError("fuel-exhausted", st.span, "statement budget exceeded")
        if isinstance(st, DeclStmt):
            value = self.eval(st.init, frame, fname) if st.init is not None else None
            self.bind_var(frame, fname, st.name, st.ctype, value, st.span)
            return
        if isinstance(st, AssignStmt):
            if st.op == "=":
                value = self.eval(st.rhs, frame, fname)
                self.assign(st.lhs, value, frame, fname)
                return
            current = self.eval(st.lhs, frame, fname)
            amount = self.eval(st.rhs, frame, fname)
            op = "+" if st.op == "+=" else "-"
            value = self.binop_values(op, current, amount, st.span, st.lhs.ctype)
            self.assign(st.lhs, value, frame, fname)
            return
        if isinstance(st, IncDecStmt):
            current = self.eval(st.target, frame, fname)
            value = self.binop_values(
                "+" if st.delta > 0 else "-", current, 1, st.span, st.target.ctype)
            self.assign(st.target, value, frame, fname)
            return
        if isinstance(st, ExprStmt):
            self.eval(st.expr, frame, fname)
            return
        if isinstance(st, ReturnStmt):
            raise _Return(self.eval(st.value, frame, fname)
                          if st.value is not None else None)
        if isinstance(st, IfStmt):
            if self.truthy(st.cond, frame, fname):
                self.exec_body(st.then_body, frame, fname)
            else:
                self.exec_body(st.else_body, frame, fname)
            return
        if isinstance(st, WhileStmt):
            while self.truthy(st.cond, frame, fname):
                self.fuel -= 1
                if self.fuel <= 0:
                    raise TrapError("fuel-exhausted", st.span, "loop budget exceeded")
                self.exec_body(st.body, frame, fname)
            return
        if isinstance(st, ForStmt):
            sched = self.schedule.get(loop_key(st))
            if sched is not None:
                self.exec_scheduled_for(st, sched, frame, fname)
                return
            if st.init is not None:
                self.exec_stmt(st.init, frame, fname)
            while self.truthy(st.cond, frame, fname):
                self.fuel -= 1
                if self.fuel <= 0:
                    raise TrapError("fuel-exhausted", st.span, "loop budget exceeded")
                self.exec_body(st.body, frame, fname)
                if st.step is not None:
                    self.exec_stmt(st.step, frame, fname)
            return
        if isinstance(st, BlockStmt):
            self.exec_body(st.body, frame, fname)
            return
        raise AssertionError(f"unhandled statement {type(st).__name__}")

    def exec_scheduled_for(self, st: ForStmt, sched: LoopSchedule,
                           frame: dict, fname: str) -> None:
        """Run the loop's iterations in a permuted order.

        Legal only for canonical counted loops whose per-iteration state is
        fully described by induction variables: each iteration t begins with
        every induction variable set to entry + stride * t.
        """
        info = canonical_for(st)
        if info is None:
            raise TrapError("schedule", st.span, "loop is not in canonical form")
        if st.init is not None:
            self.exec_stmt(st.init, frame, fname)
        entry_vals: dict[str, int] = {}
        strides: dict[str, int] = {}
        for var, stride_expr in sched.ivs:
            entry_vals[var] = self.read_var(var, frame, st.span)
            strides[var] = self.eval(stride_expr, frame, fname)
        if info.var not in entry_vals:
            entry_vals[info.var] = self.read_var(info.var, frame, st.span)
            strides[info.var] = self.eval(info.step, frame, fname)
        bound = self.eval(info.bound, frame, fname)
        start = entry_vals[info.var]
        step = strides[info.var]
        trips = _trip_count(start, info.rel, bound, step, st.span)
        order = list(range(trips))
        if sched.order == "reverse":
            order.reverse()
        elif sched.order == "random":
            rng = random.Random((sched.seed, self._schedule_instances))
            self._schedule_instances += 1
            rng.shuffle(order)
        elif isinstance(sched.order, list):
            order = list(sched.order)
        for t in order:
            for var in entry_vals:
                self.write_var(var, entry_vals[var] + strides[var] * t,
                               frame, st.span)
            self.fuel -= 1
            if self.fuel <= 0:
                raise TrapError("fuel-exhausted", st.span, "loop budget exceeded")
            self.exec_body(st.body, frame, fname)
        for var in entry_vals:
            self.write_var(var, entry_vals[var] + strides[var] * trips,
                           frame, st.span)

    # -- variables ----------------------------------------------------------------

    def read_var(self, name: str, frame: dict, span: Span):
        slot = frame.get(name)
        if slot is None:
            raise TrapError("unbound", span, f"variable '{name}' not bound")
        if slot[0] == "cell":
            return self.load_cell(slot[1], span)
        value = slot[1]
        if value is None:
            raise TrapError("uninitialized-read", span,
                            f"read of uninitialized variable '{name}'")
        return value

    def write_var(self, name: str, value, frame: dict, span: Span) -> None:
        slot = frame.get(name)
        if slot is None:
            raise TrapError("unbound", span, f"variable '{name}' not bound")
        if slot[0] == "cell":
            self.store_cell(slot[1], value, span)
        else:
            frame[name] = ("val", self.coerce(value, slot[2], span), slot[2])

    def assign(self, lhs: Expr, value, frame: dict, fname: str) -> None:
        if isinstance(lhs, Name):
            self.write_var(lhs.ident, value, frame, lhs.span)
            return
        ptr = self.lvalue_cell(lhs, frame, fname)
        self.store_cell(ptr, value, lhs.span)

    def lvalue_cell(self, lhs: Expr, frame: dict, fname: str) -> Ptr:
        if isinstance(lhs, Subscript):
            base = self.eval(lhs.base, frame, fname)
            index = self.eval(lhs.index, frame, fname)
            return self.element_ptr(base, index, lhs.span)
        if isinstance(lhs, Deref):
            base = self.eval(lhs.operand, frame, fname)
            return self.element_ptr(base, 0, lhs.span)
        if isinstance(lhs, Member):
            return self.member_cell(lhs, frame, fname)
        if isinstance(lhs, Name):
            slot = frame.get(lhs.ident)
            if slot is None or slot[0] != "cell":
                raise TrapError("unbound", lhs.span,
                                f"'{lhs.ident}' has no addressable cell")
            return slot[1]
        raise TrapError("type", lhs.span, "not an assignable location")

    def member_cell(self, e: Member, frame: dict, fname: str) -> Ptr:
        rec_t, elem_ptr = self.record_element(e, frame, fname)
        idx = rec_t.field_index(e.field_name)
        return Ptr(elem_ptr.cid, elem_ptr.off + idx)

    def record_element(self, e: Member, frame: dict, fname: str):
        """Resolve the record element a member access touches."""
        if e.arrow:
            base = self.eval(e.base, frame, fname)
            if not isinstance(base, Ptr):
                raise TrapError("type", e.span, "'->' on a non-pointer value")
            c = self.container(base, e.span)
            rec_t = c.elem_type
            if not isinstance(rec_t, RecordType):
                raise TrapError("type", e.span, "'->' on a non-record container")
            if not 0 <= base.off <= len(c.cells) - c.elem_size:
                raise TrapError("out-of-bounds", e.span,
                                f"record access at offset {base.off} of {c.label}")
            return rec_t, base
        if isinstance(e.base, Name):
            slot = frame.get(e.base.ident)
            if slot is None or slot[0] != "cell":
                raise TrapError("unbound", e.span,
                                f"record variable '{e.base.ident}' has no storage")
            rec_t = e.base.ctype
            return rec_t, slot[1]
        if isinstance(e.base, (Subscript, Deref)):
            ptr = self.lvalue_cell(e.base, frame, fname)
            rec_t = e.base.ctype
            if not isinstance(rec_t, RecordType):
                raise TrapError("type", e.span, "member access on non-record")
            return rec_t, ptr
        raise TrapError("type", e.span, "unsupported member base")

    def element_ptr(self, base, index: int, span: Span) -> Ptr:
        if not isinstance(base, Ptr):
            raise TrapError("type", span, "subscript on a non-pointer value")
        if isinstance(index, float):
            raise TrapError("type", span, "non-integer index")
        c = self.container(base, span)
        off = base.off + index * c.elem_size
        _check_i64(off, span)
        return Ptr(base.cid, off)

    # -- expressions ----------------------------------------------------------------

    def truthy(self, e: Expr, frame: dict, fname: str) -> bool:
        v = self.eval(e, frame, fname)
        if isinstance(v, Ptr):
            raise TrapError("type", e.span, "pointer used as condition")
        return v != 0

    def eval(self, e: Expr, frame: dict, fname: str):
        if isinstance(e, Name):
            return self.read_var(e.ident, frame, e.span)
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, FloatLit):
            return e.value
        if isinstance(e, BinOp):
            return self.eval_binop(e, frame, fname)
        if isinstance(e, Subscript):
            base = self.eval(e.base, frame, fname)
            index = self.eval(e.index, frame, fname)
            if isinstance(base, Ptr):
                c = self.container(base, e.span)
                if isinstance(c.elem_type, RecordType):
                    raise TrapError("type", e.span,
                                    "record element is not a loadable value")
            return self.load_cell(self.element_ptr(base, index, e.span), e.span)
        if isinstance(e, Deref):
            base = self.eval(e.operand, frame, fname)
            return self.load_cell(self.element_ptr(base, 0, e.span), e.span)
        if isinstance(e, Member):
            return self.load_cell(self.member_cell(e, frame, fname), e.span)
        if isinstance(e, AddrOf):
            return self.addr_of(e.operand, frame, fname)
        if isinstance(e, Call):
            return self.eval_call(e, frame, fname)
        if isinstance(e, AllocExpr):
            count = self.eval(e.count, frame, fname)
            if isinstance(count, float):
                raise TrapError("type", e.span, "non-integer allocation count")
            return self.allocate(e.elem_type, count, traced=True,
                                 label=f"alloc@{e.span.line}:{e.span.column}",
                                 span=e.span)
        raise AssertionError(f"unhandled expression {type(e).__name__}")

    def addr_of(self, op: Expr, frame: dict, fname: str) -> Ptr:
        if isinstance(op, Name):
            slot = frame.get(op.ident)
            if slot is None or slot[0] != "cell":
                raise TrapError("unbound", op.span,
                                f"'{op.ident}' has no addressable cell")
            return slot[1]
        if isinstance(op, (Subscript, Deref, Member)):
            return self.lvalue_cell(op, frame, fname)
        raise TrapError("type", op.span, "cannot take this address")

    def eval_binop(self, e: BinOp, frame: dict, fname: str):
        op = e.op
        if op == "&&":
            if not self.truthy(e.lhs, frame, fname):
                return 0
            return 1 if self.truthy(e.rhs, frame, fname) else 0
        if op == "||":
            if self.truthy(e.lhs, frame, fname):
                return 1
            return 1 if self.truthy(e.rhs, frame, fname) else 0
        lhs = self.eval(e.lhs, frame, fname)
        rhs = self.eval(e.rhs, frame, fname)
        return self.binop_values(op, lhs, rhs, e.span, e.ctype)

    def binop_values(self, op: str, lhs, rhs, span: Span, result_t):
        lp, rp = isinstance(lhs, Ptr), isinstance(rhs, Ptr)
        if lp or rp:
            return self.pointer_binop(op, lhs, rhs, span)
        if op in ("<", "<=", ">", ">=", "==", "!="):
            return 1 if _compare(op, lhs, rhs) else 0
        if isinstance(lhs, float) or isinstance(rhs, float):
            if op == "+":
                return lhs + rhs
            if op == "-":
                return lhs - rhs
            if op == "*":
                return lhs * rhs
            if op == "/":
                if rhs == 0:
                    raise TrapError("division-by-zero", span, "float division by zero")
                return lhs / rhs
            raise TrapError("type", span, f"'{op}' on float operands")
        if op == "+":
            return _check_i64(lhs + rhs, span)
        if op == "-":
            return _check_i64(lhs - rhs, span)
        if op == "*":
            return _check_i64(lhs * rhs, span)
        if op == "/":
            if rhs == 0:
                raise TrapError("division-by-zero", span, "integer division by zero")
            q = abs(lhs) // abs(rhs)
            if (lhs < 0) != (rhs < 0):
                q = -q
            return q
        if op == "%":
            if rhs == 0:
                raise TrapError("division-by-zero", span, "integer modulo by zero")
            q = abs(lhs) // abs(rhs)
            if (lhs < 0) != (rhs < 0):
                q = -q
            return lhs - q * rhs
        if op == "^":
            return lhs ^ rhs
        if op == "&":
            return lhs & rhs
        if op == "|":
            return lhs | rhs
        raise AssertionError(f"unhandled operator {op}")

    def pointer_binop(self, op: str, lhs, rhs, span: Span):
        lp, rp = isinstance(lhs, Ptr), isinstance(rhs, Ptr)
        if lp and rp:
            if lhs.cid != rhs.cid:
                raise TrapError("cross-container", span,
                                f"'{op}' on pointers into different containers")
            if op == "-":
                c = self.memory[lhs.cid]
                diff = lhs.off - rhs.off
                if diff % c.elem_size:
                    raise TrapError("type", span, "misaligned pointer difference")
                return diff // c.elem_size
            if op in ("<", "<=", ">", ">=", "==", "!="):
                return 1 if _compare(op, lhs.off, rhs.off) else 0
            raise TrapError("type", span, f"'{op}' on two pointers")
        ptr, amount, swapped = (lhs, rhs, False) if lp else (rhs, lhs, True)
        if isinstance(amount, float):
            raise TrapError("type", span, "non-integer pointer offset")
        if op == "+" or (op == "-" and not swapped):
            c = self.container(ptr, span)
            delta = amount * c.elem_size
            if op == "-":
                delta = -delta
            return Ptr(ptr.cid, _check_i64(ptr.off + delta, span))
        raise TrapError("type", span, f"'{op}' between pointer and integer")

    # -- calls -----------------------------------------------------------------------

    def eval_call(self, e: Call, frame: dict, fname: str):
        args = [self.eval(a, frame, fname) for a in e.args]
        fn = self.functions.get(e.callee)
        if fn is not None:
            return self.call_function(fn, args)
        return self.call_builtin(e, args)

    def call_builtin(self, e: Call, args: list):
        name = e.callee
        span = e.span
        if name == "memcpy":
            dst, src, n = args
            self._spend(n, span)
            for i in range(n):
                v = self.load_cell(Ptr(src.cid, src.off + i), span)
                self.store_cell(Ptr(dst.cid, dst.off + i), v, span)
            return dst
        if name == "memset":
            dst, value, n = args
            self._spend(n, span)
            for i in range(n):
                self.store_cell(Ptr(dst.cid, dst.off + i), value, span)
            return dst
        if name == "HMAC_CTX_new":
            rec = self.records.get("HMAC_CTX")
            elem: CType = RecordType("HMAC_CTX", tuple(rec.fields)) if rec else LONG
            ptr = self.allocate(elem, 1, traced=True,
                                label=f"hmac@{span.line}:{span.column}", span=span)
            c = self.memory[ptr.cid]
            for i in range(len(c.cells)):
                self.store_cell(Ptr(ptr.cid, i), wrap_int(0x9E3779B9 + 0x61C88647 * i,
                                                          LONG), span)
            return ptr
        if name == "HMAC_CTX_copy":
            dst, src = args
            csrc = self.container(src, span)
            cdst = self.container(dst, span)
            for i in range(min(len(csrc.cells), len(cdst.cells))):
                v = self.load_cell(Ptr(src.cid, i), span)
                self.store_cell(Ptr(dst.cid, i), v, span)
            return 1
        if name == "HMAC_CTX_free":
            (ptr,) = args
            c = self.container(ptr, span)
            c.freed = True
            if c.traced:
                self.trace.events.append((FREE, c.cid, 0, 0))
            return None
        raise TrapError("unknown-extern", span,
                        f"no model for external function '{name}'")

    def _spend(self, n: int, span: Span) -> None:
        self.fuel -= max(0, n)
        if self.fuel <= 0:
            raise TrapError("fuel-exhausted", span, "statement budget exceeded")


def _compare(op: str, a, b) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    return a != b


def _check_i64(v: int, span: Span) -> int:
    if not I64_MIN <= v <= I64_MAX:
        raise TrapError("overflow", span, f"64-bit signed overflow ({v})")
    return v


def _trip_count(start: int, rel: str, bound: int, step: int, span: Span) -> int:
    if step == 0:
        raise TrapError("schedule", span, "zero loop stride")
    if rel in ("<", "<="):
        if step < 0:
            raise TrapError("schedule", span, "negative stride with upper bound")
        limit = bound - start + (1 if rel == "<=" else 0)
        return max(0, -(-limit // step))
    if step > 0:
        raise TrapError("schedule", span, "positive stride with lower bound")
    limit = start - bound + (1 if rel == ">=" else 0)
    return max(0, -(-limit // (-step)))


# -----------------------------------------------------------------------------


def run(tu: TranslationUnit, entry: str, inputs: list, fuel: int = 1_000_000,
        schedule: dict | None = None) -> tuple[Trace, FinalState]:
    """Execute `entry(*inputs)`; deterministic in all arguments."""
    interp = Interp(tu, fuel=fuel, schedule=schedule)
    trace = interp.run(entry, inputs)
    return trace, trace.final


STRICT = "strict"
VALUE_LEVEL = "value-level"


def trace_equal(a: Trace, b: Trace, mode: str = STRICT) -> bool:
    """strict: identical event sequences. value-level: identical scalar
    read/write values plus equal final data reachable from the results
    (container identity and allocation structure are layout, not data)."""
    if mode == STRICT:
        return a.events == b.events
    if mode != VALUE_LEVEL:
        raise ValueError(f"unknown mode {mode!r}")
    if _scalar_values(a) != _scalar_values(b):
        return False
    return _reachable_equal(a, b)


def first_divergence(a: Trace, b: Trace) -> tuple[int, TraceEvent | None, TraceEvent | None] | None:
    n = min(len(a.events), len(b.events))
    for i in range(n):
        if a.events[i] != b.events[i]:
            return i, a.event(i), b.event(i)
    if len(a.events) != len(b.events):
        longer = a if len(a.events) > n else b
        return n, (a.event(n) if len(a.events) > n else None), \
            (b.event(n) if len(b.events) > n else None)
    return None


def _scalar_values(t: Trace) -> list:
    return [(kind, value) for kind, _, _, value in t.events
            if kind in (READ, WRITE) and not isinstance(value, Ptr)]


def _reachable_equal(a: Trace, b: Trace) -> bool:
    """Paired walk from both results: every scalar reachable by the same
    access path must match. Where the two layouts give a pointer views of
    different extents, the overlap is compared; the excess is layout."""
    return _pair_equal(a.result, b.result, a.final, b.final, set())


def _pair_equal(va, vb, sa: FinalState, sb: FinalState, seen: set) -> bool:
    pa, pb = isinstance(va, Ptr), isinstance(vb, Ptr)
    if pa != pb:
        return False
    if not pa:
        return va == vb
    ca = sa.containers.get(va.cid)
    cb = sb.containers.get(vb.cid)
    if ca is None or cb is None:
        return ca is cb
    if ca.freed or cb.freed:
        return ca.freed == cb.freed
    key = (va.cid, va.off, vb.cid, vb.off)
    if key in seen:
        return True
    seen.add(key)
    span_a = len(ca.cells) - va.off
    span_b = len(cb.cells) - vb.off
    for i in range(max(0, min(span_a, span_b))):
        ia, ib = va.off + i, vb.off + i
        if ca.init[ia] != cb.init[ib]:
            return False
        if not ca.init[ia]:
            continue
        if not _pair_equal(ca.cells[ia], cb.cells[ib], sa, sb, seen):
            return False
    return True


def _canon_value(v, state: FinalState, seen: dict):
    if not isinstance(v, Ptr):
        return ("s", v)
    c = state.containers.get(v.cid)
    if c is None:
        return ("dangling",)
    if c.freed:
        return ("freed",)
    if v.cid in seen:
        return ("ref", seen[v.cid], v.off)
    seen[v.cid] = len(seen)
    cells = []
    # data beyond the shorter of two views is layout, not data: compare the
    # reachable slice from the pointed-at position
    for i in range(v.off, len(c.cells)):
        if not c.init[i]:
            cells.append(("u",))
        else:
            cells.append(_canon_value(c.cells[i], state, seen))
    return ("c", seen[v.cid], v.off, tuple(cells))


def canonical_state(t: Trace):
    """Position-independent snapshot of everything reachable from the result."""
    return _canon_value(t.result, t.final, {})


def memory_events_in_bounds(t: Trace) -> bool:
    """Model safety: every read/write lands inside its container."""
    capacity: dict[int, int] = {}
    for kind, cid, off, value in t.events:
        if kind == ALLOC:
            capacity[cid] = value
        elif kind in (READ, WRITE):
            total = capacity.get(cid)
            if total is None or off < 0 or off >= total:
                return False
    return True
