"""Seeded random program generator for the differential equivalence corpus.

Programs follow the proof-sketch shapes: allocations, pointer movements with
random strides, unconditional pointer (re)assignments including `q = p` and
`p = q + k` mid-sequence, subscripted reads and writes, and interleaved
if/for control flow.

Generation co-simulates the program: tracked scalar values and every pointer
offset are modeled concretely, and a candidate loop is accepted only after
all of its iterations simulate without tripping a bound. Values read from
memory flow only into "opaque" scalars that never feed an index, condition,
or stride, so the model stays exact without tracking cell contents.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cast.nodes import (
    LONG, AddrOf, AllocExpr, AssignStmt, BinOp, DeclStmt, Expr, ForStmt,
    FuncDef, IfStmt, IncDecStmt, IntLit, Name, PointerType, ReturnStmt, Span,
    Stmt, Subscript, TranslationUnit,
)

ENTRY = "gen_entry"

_PTR_LONG = PointerType(LONG)


class _Abort(Exception):
    """Candidate fragment would trap or is not modelable; drop it."""


@dataclass
class _Sim:
    """Concrete model: tracked scalar values and pointer bindings."""
    scalars: dict[str, int] = field(default_factory=dict)
    pointers: dict[str, tuple[int, int]] = field(default_factory=dict)
    lengths: dict[int, int] = field(default_factory=dict)
    opaque: set[str] = field(default_factory=set)

    def copy(self) -> "_Sim":
        return _Sim(dict(self.scalars), dict(self.pointers),
                    dict(self.lengths), set(self.opaque))

    def drop_out_of_scope(self, outer: "_Sim") -> None:
        self.scalars = {k: v for k, v in self.scalars.items()
                        if k in outer.scalars}
        self.pointers = {k: v for k, v in self.pointers.items()
                         if k in outer.pointers}
        self.opaque = {k for k in self.opaque if k in outer.opaque}


class _Gen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.counter = 0
        self.next_container = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def span(self) -> Span:
        self.counter += 1
        return Span("<generated>", self.counter, 1)

    def lit(self, v: int) -> IntLit:
        return IntLit(v, span=self.span(), ctype=LONG)

    def name(self, ident: str, ctype=LONG) -> Name:
        return Name(ident, span=self.span(), ctype=ctype)


# ---------------------------------------------------------------------------
# model evaluation
# ---------------------------------------------------------------------------


def _eval(e: Expr, sim: _Sim, env: dict[str, int]) -> int:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Name):
        if e.ident in env:
            return env[e.ident]
        if e.ident in sim.scalars:
            return sim.scalars[e.ident]
        raise _Abort()
    if isinstance(e, BinOp):
        l = _eval(e.lhs, sim, env)
        r = _eval(e.rhs, sim, env)
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        if e.op == "*":
            return l * r
        if e.op == "%":
            if r == 0:
                raise _Abort()
            q = abs(l) // abs(r)
            if (l < 0) != (r < 0):
                q = -q
            return l - q * r
        if e.op == "==":
            return 1 if l == r else 0
        if e.op == "!=":
            return 1 if l != r else 0
        if e.op == "<":
            return 1 if l < r else 0
        if e.op == ">":
            return 1 if l > r else 0
    raise _Abort()


def _pointer_value(e: Expr, sim: _Sim, env: dict) -> tuple[int, int]:
    if isinstance(e, Name):
        if e.ident not in sim.pointers:
            raise _Abort()
        return sim.pointers[e.ident]
    if isinstance(e, BinOp) and e.op in ("+", "-"):
        lhs_ptr = e.lhs.ctype is not None and e.lhs.ctype.is_pointer()
        ptr_side = e.lhs if lhs_ptr else e.rhs
        amt_side = e.rhs if lhs_ptr else e.lhs
        cont, off = _pointer_value(ptr_side, sim, env)
        amount = _eval(amt_side, sim, env)
        return (cont, off + (amount if e.op == "+" else -amount))
    if isinstance(e, AddrOf) and isinstance(e.operand, Subscript):
        cont, off = _pointer_value(e.operand.base, sim, env)
        return (cont, off + _eval(e.operand.index, sim, env))
    raise _Abort()


def _check_access(e: Subscript, sim: _Sim, env: dict) -> None:
    cont, off = _pointer_value(e.base, sim, env)
    cell = off + _eval(e.index, sim, env)
    if not 0 <= cell < sim.lengths[cont]:
        raise _Abort()


def _check_reads(e: Expr, sim: _Sim, env: dict) -> None:
    if e is None:
        return
    if isinstance(e, Subscript):
        _check_access(e, sim, env)
        _check_reads(e.index, sim, env)
        return
    if isinstance(e, AddrOf):
        return  # address formation never accesses memory
    for attr in ("lhs", "rhs", "operand", "count"):
        v = getattr(e, attr, None)
        if isinstance(v, Expr):
            _check_reads(v, sim, env)


def _simulate(st: Stmt, sim: _Sim, env: dict) -> None:
    """Apply one generated statement to the model, validating every access."""
    if isinstance(st, DeclStmt):
        if st.ctype.is_pointer():
            sim.pointers[st.name] = _pointer_value(st.init, sim, env)
            return
        _check_reads(st.init, sim, env)
        try:
            sim.scalars[st.name] = _eval(st.init, sim, env)
        except _Abort:
            sim.opaque.add(st.name)
        return
    if isinstance(st, AssignStmt):
        if isinstance(st.lhs, Name) and st.lhs.ident in sim.pointers:
            if st.op == "=":
                sim.pointers[st.lhs.ident] = _pointer_value(st.rhs, sim, env)
            else:
                amount = _eval(st.rhs, sim, env)
                cont, off = sim.pointers[st.lhs.ident]
                sim.pointers[st.lhs.ident] = (
                    cont, off + (amount if st.op == "+=" else -amount))
            return
        _check_reads(st.rhs, sim, env)
        if isinstance(st.lhs, Subscript):
            _check_access(st.lhs, sim, env)
            _check_reads(st.lhs.index, sim, env)
            return
        if isinstance(st.lhs, Name):
            name = st.lhs.ident
            if name in sim.scalars:
                try:
                    value = _eval(st.rhs, sim, env)
                    if st.op == "+=":
                        value += sim.scalars[name]
                    elif st.op == "-=":
                        value = sim.scalars[name] - value
                    sim.scalars[name] = value
                except _Abort:
                    del sim.scalars[name]
                    sim.opaque.add(name)
            return
        raise _Abort()
    if isinstance(st, IncDecStmt):
        t = st.target
        if isinstance(t, Name) and t.ident in sim.pointers:
            cont, off = sim.pointers[t.ident]
            sim.pointers[t.ident] = (cont, off + st.delta)
            return
        if isinstance(t, Name) and t.ident in sim.scalars:
            sim.scalars[t.ident] += st.delta
            return
        raise _Abort()
    if isinstance(st, IfStmt):
        taken_branch = _eval(st.cond, sim, env) != 0
        chosen = sim.copy()
        for s in (st.then_body if taken_branch else st.else_body):
            _simulate(s, chosen, env)
        shadow = sim.copy()
        for s in (st.else_body if taken_branch else st.then_body):
            _simulate(s, shadow, env)  # the untaken side must be safe too
        chosen.drop_out_of_scope(sim)
        chosen.lengths = sim.lengths
        sim.scalars, sim.pointers, sim.opaque = (
            chosen.scalars, chosen.pointers, chosen.opaque)
        return
    if isinstance(st, ForStmt):
        outer = sim.copy()
        counter = st.init.name
        trips = st.cond.rhs.value
        for t in range(trips):
            inner = dict(env)
            inner[counter] = t
            for s in st.body:
                _simulate(s, sim, inner)
        sim.drop_out_of_scope(outer)  # body-local declarations expire
        return
    if isinstance(st, ReturnStmt):
        return
    raise _Abort()


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _scalar_expr(g: _Gen, sim: _Sim, env: dict, depth: int = 1) -> Expr:
    usable = list(sim.scalars) + list(env)
    choices = ["lit"] + (["var", "var"] if usable else [])
    if depth > 0:
        choices.append("bin")
    kind = g.rng.choice(choices)
    if kind == "lit":
        return g.lit(g.rng.randint(-4, 6))
    if kind == "var":
        return g.name(g.rng.choice(usable))
    op = g.rng.choice(["+", "-", "*"])
    return BinOp(op, _scalar_expr(g, sim, env, depth - 1),
                 _scalar_expr(g, sim, env, 0), span=g.span(), ctype=LONG)


def _index_expr(g: _Gen, need: int, sim: _Sim, env: dict) -> Expr:
    """An index expression whose current model value is `need`."""
    usable = list(env) + list(sim.scalars)
    if not usable or g.rng.random() < 0.4:
        return g.lit(need)
    var = g.rng.choice(usable)
    value = env.get(var, sim.scalars.get(var))
    coeff = g.rng.randint(1, 2)
    c = need - coeff * value
    term: Expr = g.name(var)
    if coeff != 1:
        term = BinOp("*", term, g.lit(coeff), span=g.span(), ctype=LONG)
    if g.rng.random() < 0.5:
        return BinOp("+", term, g.lit(c), span=g.span(), ctype=LONG)
    return BinOp("+", g.lit(c), term, span=g.span(), ctype=LONG)


def _access(g: _Gen, sim: _Sim, env: dict) -> Subscript | None:
    """In-bounds subscript of a live pointer, aimed at a random cell."""
    if not sim.pointers:
        return None
    var = g.rng.choice(sorted(sim.pointers))
    cont, off = sim.pointers[var]
    cell = g.rng.randrange(sim.lengths[cont])
    idx = _index_expr(g, cell - off, sim, env)
    return Subscript(g.name(var, _PTR_LONG), idx, span=g.span(), ctype=LONG)


def _value_expr(g: _Gen, sim: _Sim, env: dict, depth: int = 1) -> Expr:
    kinds = ["scalar"]
    if sim.opaque:
        kinds.append("opaque")
    if sim.pointers and depth > 0:
        kinds += ["load", "load"]
    if depth > 0:
        kinds.append("mix")
    kind = g.rng.choice(kinds)
    if kind == "opaque":
        return g.name(g.rng.choice(sorted(sim.opaque)))
    if kind == "load":
        acc = _access(g, sim, env)
        if acc is not None:
            return acc
        kind = "scalar"
    if kind == "scalar":
        return _scalar_expr(g, sim, env)
    op = g.rng.choice(["+", "-", "^", "*"])
    return BinOp(op, _value_expr(g, sim, env, depth - 1),
                 _value_expr(g, sim, env, 0), span=g.span(), ctype=LONG)


def _emit_alloc(g: _Gen, sim: _Sim, out: list[Stmt]) -> None:
    length = g.rng.randint(4, 9)
    cont = g.next_container
    g.next_container += 1
    var = g.fresh("a")
    out.append(DeclStmt(var, _PTR_LONG,
                        AllocExpr(LONG, g.lit(length), span=g.span(),
                                  ctype=_PTR_LONG), span=g.span()))
    j = g.fresh("j")
    out.append(ForStmt(
        DeclStmt(j, LONG, g.lit(0), span=g.span()),
        BinOp("<", g.name(j), g.lit(length), span=g.span(), ctype=LONG),
        IncDecStmt(g.name(j), 1, span=g.span()),
        [AssignStmt(
            Subscript(g.name(var, _PTR_LONG), g.name(j), span=g.span(), ctype=LONG),
            "=",
            BinOp("+", BinOp("*", g.name(j), g.lit(g.rng.randint(2, 5)),
                             span=g.span(), ctype=LONG),
                  g.lit(g.rng.randint(0, 50)), span=g.span(), ctype=LONG),
            span=g.span())],
        span=g.span()))
    sim.pointers[var] = (cont, 0)
    sim.lengths[cont] = length


def _emit_move(g: _Gen, sim: _Sim, env: dict) -> Stmt | None:
    if not sim.pointers:
        return None
    var = g.rng.choice(sorted(sim.pointers))
    cont, off = sim.pointers[var]
    length = sim.lengths[cont]
    form = g.rng.choice(["inc", "dec", "compound", "self"])
    if form == "inc":
        return IncDecStmt(g.name(var, _PTR_LONG), 1, span=g.span())
    if form == "dec":
        return IncDecStmt(g.name(var, _PTR_LONG), -1, span=g.span())
    amount_expr = _scalar_expr(g, sim, env, depth=0)
    try:
        amount = _eval(amount_expr, sim, env)
    except _Abort:
        return None
    if abs(off + amount) > 3 * length:
        amount_expr = g.lit(g.rng.randint(-2, 2))
    if form == "compound":
        return AssignStmt(g.name(var, _PTR_LONG), g.rng.choice(["+=", "-="]),
                          amount_expr, span=g.span())
    op = g.rng.choice(["+", "-"])
    return AssignStmt(g.name(var, _PTR_LONG), "=",
                      BinOp(op, g.name(var, _PTR_LONG), amount_expr,
                            span=g.span(), ctype=_PTR_LONG), span=g.span())


def _emit_write(g: _Gen, sim: _Sim, env: dict) -> Stmt | None:
    target = _access(g, sim, env)
    if target is None:
        return None
    return AssignStmt(target, g.rng.choice(["=", "=", "+=", "-="]),
                      _value_expr(g, sim, env), span=g.span())


def _emit_read(g: _Gen, sim: _Sim, env: dict) -> Stmt | None:
    source = _access(g, sim, env)
    if source is None:
        return None
    if g.rng.random() < 0.55:
        value: Expr = source
        if g.rng.random() < 0.4:
            value = BinOp("^", source, _value_expr(g, sim, env, 0),
                          span=g.span(), ctype=LONG)
        return AssignStmt(g.name("acc"), "+=", value, span=g.span())
    return DeclStmt(g.fresh("x"), LONG, source, span=g.span())


def _emit_bind(g: _Gen, sim: _Sim, env: dict) -> Stmt | None:
    if not sim.pointers:
        return None
    src = g.rng.choice(sorted(sim.pointers))
    cont, off = sim.pointers[src]
    length = sim.lengths[cont]
    form = g.rng.choice(["plain", "offset", "offset", "addr_elem"])
    if form == "plain":
        rhs: Expr = g.name(src, _PTR_LONG)
    elif form == "offset":
        k = g.rng.randint(0, 3)
        op = g.rng.choice(["+", "-"])
        rhs = BinOp(op, g.name(src, _PTR_LONG), g.lit(k),
                    span=g.span(), ctype=_PTR_LONG)
    else:
        cell = g.rng.randrange(length)
        rhs = AddrOf(Subscript(g.name(src, _PTR_LONG),
                               _index_expr(g, cell - off, sim, env),
                               span=g.span(), ctype=LONG),
                     span=g.span(), ctype=_PTR_LONG)
    rebindable = sorted(sim.pointers)
    if len(rebindable) > 1 and g.rng.random() < 0.45:
        var = g.rng.choice(rebindable)
        return AssignStmt(g.name(var, _PTR_LONG), "=", rhs, span=g.span())
    return DeclStmt(g.fresh("p"), _PTR_LONG, rhs, span=g.span())


def _emit_scalar(g: _Gen, sim: _Sim, env: dict) -> Stmt:
    return DeclStmt(g.fresh("s"), LONG, _scalar_expr(g, sim, env), span=g.span())


def _leaf_statement(g: _Gen, sim: _Sim, env: dict) -> Stmt | None:
    kind = g.rng.choice(["move", "write", "read", "write", "read", "move"])
    if kind == "move":
        return _emit_move(g, sim, env)
    if kind == "write":
        return _emit_write(g, sim, env)
    return _emit_read(g, sim, env)


def _emit_if(g: _Gen, sim: _Sim, env: dict) -> Stmt | None:
    scalars = sorted(sim.scalars) + sorted(env)
    if scalars:
        var = g.rng.choice(scalars)
        if g.rng.random() < 0.5:
            cond = BinOp("==", BinOp("%", g.name(var), g.lit(2),
                                     span=g.span(), ctype=LONG),
                         g.lit(0), span=g.span(), ctype=LONG)
        else:
            value = env.get(var, sim.scalars.get(var))
            cond = BinOp("<", g.name(var), g.lit(g.rng.randint(value - 2, value + 2)),
                         span=g.span(), ctype=LONG)
    else:
        cond = BinOp("==", g.lit(g.rng.randint(0, 1)), g.lit(1),
                     span=g.span(), ctype=LONG)
    branch_sim = sim.copy()
    then_body = _leaf_body(g, branch_sim, env, g.rng.randint(1, 2))
    branch_sim = sim.copy()
    else_body = _leaf_body(g, branch_sim, env, g.rng.randint(0, 2))
    if not then_body:
        return None
    return IfStmt(cond, then_body, else_body, span=g.span())


def _leaf_body(g: _Gen, sim: _Sim, env: dict, n: int) -> list[Stmt]:
    """Branch bodies: emitted против a copy; real validation happens later."""
    out: list[Stmt] = []
    fake_env = dict(env)
    for _ in range(n):
        st = _leaf_statement(g, sim, fake_env)
        if st is None:
            continue
        try:
            _simulate(st, sim, fake_env)
        except _Abort:
            continue
        out.append(st)
    return out


def _emit_for(g: _Gen, sim: _Sim, env: dict, depth: int) -> Stmt | None:
    counter = g.fresh("i")
    trips = g.rng.randint(1, 5)
    plan = sim.copy()
    plan_env = dict(env)
    plan_env[counter] = 0
    body: list[Stmt] = []
    for _ in range(g.rng.randint(1, 3)):
        roll = g.rng.random()
        if depth == 0 and roll < 0.18:
            st = _emit_for(g, plan, plan_env, depth + 1)
        elif roll < 0.30:
            st = _emit_if(g, plan, plan_env)
        else:
            st = _leaf_statement(g, plan, plan_env)
        if st is None:
            continue
        try:
            _simulate(st, plan, plan_env)
        except _Abort:
            continue
        body.append(st)
    if not body:
        return None
    return ForStmt(
        DeclStmt(counter, LONG, g.lit(0), span=g.span()),
        BinOp("<", g.name(counter), g.lit(trips), span=g.span(), ctype=LONG),
        IncDecStmt(g.name(counter), 1, span=g.span()),
        body, span=g.span())


def generate_program(seed: int, size: int = 12) -> TranslationUnit:
    """Deterministic-from-seed unit: one entry `gen_entry()`, trap-free."""
    g = _Gen(seed)
    sim = _Sim()
    body: list[Stmt] = []
    body.append(DeclStmt("acc", LONG, g.lit(0), span=g.span()))
    sim.opaque.add("acc")
    _emit_alloc(g, sim, body)
    budget = max(4, size)
    while budget > 0:
        budget -= _emit_top(g, sim, body)
    body.append(ReturnStmt(g.name("acc"), span=g.span()))
    fn = FuncDef(ENTRY, [], LONG, body, span=Span("<generated>", 1, 1))
    return TranslationUnit(functions=[fn])


def _emit_top(g: _Gen, sim: _Sim, body: list[Stmt]) -> int:
    roll = g.rng.random()
    if roll < 0.08 and g.next_container < 3:
        _emit_alloc(g, sim, body)
        return 2
    candidate: Stmt | None
    cost = 1
    if roll < 0.18:
        candidate = _emit_scalar(g, sim, {})
    elif roll < 0.38:
        candidate = _emit_bind(g, sim, {})
    elif roll < 0.52:
        candidate = _emit_if(g, sim, {})
        cost = 2
    elif roll < 0.70:
        candidate = _emit_for(g, sim, {}, depth=0)
        cost = 3
    else:
        candidate = _leaf_statement(g, sim, {})
    if candidate is None:
        return 1
    # final authority: the model must accept the statement end to end
    trial = sim.copy()
    try:
        _simulate(candidate, trial, {})
    except _Abort:
        return 1
    sim.scalars, sim.pointers, sim.opaque = (
        trial.scalars, trial.pointers, trial.opaque)
    sim.lengths = trial.lengths
    body.append(candidate)
    return cost
