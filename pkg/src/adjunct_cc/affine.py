"""Symbolic affine forms for per-iteration access intervals.

A form is a linear combination of symbols plus an integer constant. Symbols:

    ("inv", name)    loop-invariant variable
    ("entry", name)  value of an induction variable at loop entry
    ("tau",)         the iteration number, unit stride
    ("tau*", sym)    iteration number times a symbolic stride
    ("ctr", name)    an inner-loop counter, expanded to its range later
    ("prod", syms)   opaque product of invariant symbols

Anything that cannot be written this way raises NonAffine; the analyzer
treats such accesses as unprovable rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class NonAffine(Exception):
    pass


@dataclass(frozen=True)
class Form:
    terms: tuple[tuple[tuple, int], ...] = ()
    const: int = 0

    @staticmethod
    def of(const: int = 0, terms: dict | None = None) -> "Form":
        items = tuple(sorted((s, c) for s, c in (terms or {}).items() if c != 0))
        return Form(items, const)

    @staticmethod
    def sym(symbol: tuple, coeff: int = 1) -> "Form":
        return Form.of(0, {symbol: coeff})

    def tdict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "Form") -> "Form":
        t = self.tdict()
        for s, c in other.terms:
            t[s] = t.get(s, 0) + c
        return Form.of(self.const + other.const, t)

    def __sub__(self, other: "Form") -> "Form":
        return self + other.scale(-1)

    def scale(self, k: int) -> "Form":
        if k == 0:
            return Form.of(0)
        return Form.of(self.const * k, {s: c * k for s, c in self.terms})

    def mul(self, other: "Form") -> "Form":
        if not other.terms:
            return self.scale(other.const)
        if not self.terms:
            return other.scale(self.const)
        if self.invariant_pure() and other.invariant_pure():
            sa = _flatten(self)
            sb = _flatten(other)
            if sa is not None and sb is not None:
                return Form.sym(("prod", tuple(sorted(sa + sb))))
        raise NonAffine()

    def invariant_pure(self) -> bool:
        return all(s[0] in ("inv", "prod") for s, _ in self.terms)

    def is_const(self) -> bool:
        return not self.terms

    def tau_stride(self) -> "Form":
        """Per-iteration displacement: coefficient of the iteration number."""
        const = 0
        terms: dict = {}
        for s, c in self.terms:
            if s == ("tau",):
                const += c
            elif s[0] == "tau*":
                terms[s[1]] = terms.get(s[1], 0) + c
        return Form.of(const, terms)

    def drop_tau(self) -> "Form":
        return Form.of(self.const, {s: c for s, c in self.terms
                                    if s != ("tau",) and s[0] != "tau*"})

    def has_ctr(self) -> bool:
        return any(s[0] == "ctr" for s, _ in self.terms)

    def substitute_range(self, minimize: bool, ranges: dict) -> "Form":
        """Replace every inner counter by the extreme of its range."""
        out = Form.of(self.const)
        for s, c in self.terms:
            if s[0] != "ctr":
                out = out + Form.of(0, {s: c})
                continue
            lo, hi_incl = ranges[s[1]]
            pick = lo if (minimize == (c > 0)) else hi_incl
            out = out + pick.scale(c)
        return out

    def times_tau(self) -> "Form":
        """This form (a stride) multiplied by the iteration number."""
        terms: dict = {}
        if self.const:
            terms[("tau",)] = self.const
        for s, c in self.terms:
            if s[0] in ("inv", "prod", "entry"):
                terms[("tau*", s)] = terms.get(("tau*", s), 0) + c
            else:
                raise NonAffine()
        return Form.of(0, terms)

    def render(self, names: dict | None = None) -> str:
        parts = []
        for s, c in self.terms:
            label = _sym_label(s)
            if c == 1:
                parts.append(label)
            else:
                parts.append(f"{c}*{label}")
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts).replace("+ -", "- ")


def _flatten(f: Form):
    """Invariant-pure single-term forms as a symbol list, else None."""
    if f.const != 0 or len(f.terms) != 1:
        return None
    (s, c), = f.terms
    if c != 1:
        return None
    if s[0] == "inv":
        return [s]
    if s[0] == "prod":
        return list(s[1])
    return None


def _sym_label(s: tuple) -> str:
    if s == ("tau",):
        return "t"
    if s[0] == "tau*":
        return f"t*{_sym_label(s[1])}"
    if s[0] in ("inv", "ctr"):
        return s[1]
    if s[0] == "entry":
        return s[1]
    if s[0] == "prod":
        return "*".join(_sym_label(x) for x in s[1])
    return str(s)


ZERO = Form.of(0)
ONE = Form.of(1)
