"""Model files: a small line-oriented language for uncertain GPs.

Grammar (one statement per line, ``#`` starts a comment)::

    var <name> [design]
    param <name> = <float> pm <float>%
    min <expr>
    st <expr> <= <expr>        (or >=)

    expr    := product ('+' product)*
    product := power (('*' | '/') power)*
    power   := atom ('^' ['-'] <float>)?
    atom    := <float> | <name> | '(' expr ')'

After expansion every expression is a posynomial.  In ``st a <= b`` the
right side must be a monomial (it becomes the divisor); ``st a >= b`` needs a
monomial on the left.  Division is only by monomials, a parenthesized sum may
only be raised to a non-negative integer power, and literals must be positive.
Identifiers must be declared before use.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal
from dataclasses import dataclass, field

from ..model import Expr, Parameter, SymbolicModel, Term


class ModelSyntaxError(ValueError):
    """Parse failure with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Constraint:
    lhs: Expr
    op: str
    rhs: Expr

    def as_posynomial(self) -> Expr:
        """The ``posynomial <= 1`` form (the monomial side divides the other)."""
        big, small = (self.lhs, self.rhs) if self.op == "<=" else (self.rhs, self.lhs)
        inv = small[0].inverse()
        return tuple(t * inv for t in big)


@dataclass
class ModelFile:
    variables: list[str] = field(default_factory=list)
    design: list[str] = field(default_factory=list)
    parameters: list[Parameter] = field(default_factory=list)
    objective: Expr | None = None
    constraints: list[Constraint] = field(default_factory=list)

    def to_model(self) -> SymbolicModel:
        if self.objective is None:
            raise ValueError("model has no objective")
        return SymbolicModel(
            variables=list(self.variables),
            parameters=list(self.parameters),
            objective=self.objective,
            constraints=[c.as_posynomial() for c in self.constraints],
            design=list(self.design),
        )


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|[-+*/^()=%])
""", re.VERBOSE)

KEYWORDS = {"var", "param", "min", "st", "design", "pm"}


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise ModelSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        if m.lastgroup != "ws":
            out.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    out.append(_Tok("end", "", len(line) + 1))
    return out


def canonical_expr(terms) -> Expr:
    """Merge like terms and order them deterministically."""
    merged: dict[tuple, float] = {}
    for t in terms:
        merged[t.powers] = merged.get(t.powers, 0.0) + t.coeff
    return tuple(Term(c, p) for p, c in sorted(merged.items()))


class _LineParser:
    def __init__(self, toks: list[_Tok], lineno: int, known: set[str]):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.known = known

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        raise ModelSyntaxError(msg, self.lineno, (tok or self.tok).col)

    def take(self, kind: str | None = None, text: str | None = None) -> _Tok:
        t = self.tok
        if (kind and t.kind != kind) or (text and t.text != text):
            want = text or {"num": "a number", "name": "a name", "end": "end of line"}.get(kind, kind)
            got = t.text or "end of line"
            self.error(f"expected {want}, found {got!r}")
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def number(self) -> float:
        neg = False
        if self.at("-"):
            self.i += 1
            neg = True
        v = float(self.take("num").text)
        return -v if neg else v

    def expr(self) -> Expr:
        start = self.tok
        if start.kind == "end" or (start.kind == "op" and start.text in ("<=", ">=", ")")):
            self.error("expected an expression")
        terms = list(self.product())
        while True:
            if self.at("+"):
                self.i += 1
                terms.extend(self.product())
            elif self.at("-"):
                self.error("subtraction makes the expression non-posynomial")
            else:
                return canonical_expr(terms)

    def product(self) -> Expr:
        acc = self.power()
        while self.at("*") or self.at("/"):
            op = self.take().text
            at = self.tok
            rhs = self.power()
            if op == "*":
                acc = tuple(a * b for a in acc for b in rhs)
            else:
                if len(rhs) != 1:
                    self.error("division by a sum is not posynomial", at)
                inv = rhs[0].inverse()
                acc = tuple(a * inv for a in acc)
        return canonical_expr(acc)

    def power(self) -> Expr:
        at = self.tok
        base = self.atom()
        if not self.at("^"):
            return base
        self.i += 1
        e = self.number()
        if len(base) == 1:
            return (base[0] ** e,)
        if e < 0 or e != int(e):
            self.error("a sum can only be raised to a non-negative integer power", at)
        out: Expr = (Term(1.0),)
        for _ in range(int(e)):
            out = canonical_expr(a * b for a in out for b in base)
        return out

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            v = float(t.text)
            if not v > 0:
                self.error("literal coefficients must be positive", t)
            return (Term(v),)
        if t.kind == "name":
            self.i += 1
            if t.text in KEYWORDS:
                self.error(f"keyword {t.text!r} used as an identifier", t)
            if t.text not in self.known:
                self.error(f"undeclared identifier {t.text!r}", t)
            return (Term(1.0, ((t.text, 1.0),)),)
        if self.at("("):
            self.i += 1
            inner = self.expr()
            self.take("op", ")")
            return inner
        if self.at("-"):
            self.error("negative coefficients are not posynomial")
        self.error(f"unexpected {t.text or 'end of line'!r}")


def parse_model(text: str) -> ModelFile:
    """Parse model-file text; raises :class:`ModelSyntaxError` with line and column."""
    mf = ModelFile()
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        toks = _tokenize(line, lineno)
        p = _LineParser(toks, lineno, declared)
        head = p.take("name")
        kw = head.text
        if kw == "var":
            name = p.take("name")
            _check_new(name, declared, lineno)
            is_design = False
            if p.tok.kind == "name" and p.tok.text == "design":
                p.i += 1
                is_design = True
            p.take("end")
            declared.add(name.text)
            mf.variables.append(name.text)
            if is_design:
                mf.design.append(name.text)
        elif kw == "param":
            name = p.take("name")
            _check_new(name, declared, lineno)
            p.take("op", "=")
            at = p.tok
            nominal = p.number()
            if not nominal > 0:
                p.error("parameter nominal must be positive", at)
            p.take("name", "pm")
            at = p.tok
            if p.at("-"):
                p.error("half-width must be non-negative", at)
            pct = Decimal(p.take("num").text)
            if pct < 0:
                p.error("half-width must be non-negative", at)
            p.take("op", "%")
            p.take("end")
            declared.add(name.text)
            mf.parameters.append(Parameter(name.text, nominal, float(pct / 100)))
        elif kw == "min":
            if mf.objective is not None:
                p.error("objective declared twice", head)
            mf.objective = p.expr()
            p.take("end")
        elif kw == "st":
            lhs = p.expr()
            op_tok = p.tok
            if not (p.at("<=") or p.at(">=")):
                p.error("expected '<=' or '>='")
            p.i += 1
            rhs_tok = p.tok
            rhs = p.expr()
            p.take("end")
            small, tok = (rhs, rhs_tok) if op_tok.text == "<=" else (lhs, toks[1])
            if len(small) != 1:
                p.error("the smaller side of a constraint must be a monomial", tok)
            mf.constraints.append(Constraint(lhs, op_tok.text, rhs))
        else:
            p.error(f"unknown statement {kw!r}", head)
    if mf.objective is None:
        raise ModelSyntaxError("model has no 'min' statement", max(1, len(text.splitlines())), 1)
    return mf


def _check_new(tok: _Tok, declared: set[str], lineno: int) -> None:
    if tok.text in KEYWORDS:
        raise ModelSyntaxError(f"keyword {tok.text!r} used as a name", lineno, tok.col)
    if tok.text in declared:
        raise ModelSyntaxError(f"{tok.text!r} declared twice", lineno, tok.col)


def _num(v: float) -> str:
    return repr(float(v))


def _pct(rel: float) -> str:
    # decimal shift of the shortest repr, so parsing divides back exactly
    text = format(Decimal(repr(float(rel))).scaleb(2).normalize(), "f")
    return text if "." in text else text + ".0"


def format_term(t: Term) -> str:
    parts = [] if t.coeff == 1.0 and t.powers else [_num(t.coeff)]
    for name, e in t.powers:
        parts.append(name if e == 1.0 else f"{name}^{_num(e)}")
    return "*".join(parts)


def format_expr(e: Expr) -> str:
    return " + ".join(format_term(t) for t in e)


def format_model(mf: ModelFile) -> str:
    """Pretty-print; ``parse_model(format_model(m))`` reproduces ``m``."""
    lines = []
    for v in mf.variables:
        lines.append(f"var {v} design" if v in mf.design else f"var {v}")
    for p in mf.parameters:
        lines.append(f"param {p.name} = {_num(p.nominal)} pm {_pct(p.rel)}%")
    if mf.objective is not None:
        lines.append(f"min {format_expr(mf.objective)}")
    for c in mf.constraints:
        lines.append(f"st {format_expr(c.lhs)} {c.op} {format_expr(c.rhs)}")
    return "\n".join(lines) + "\n"


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def model_to_file(model: SymbolicModel) -> ModelFile:
    """Express a symbolic model as a model file (constraints as ``posynomial <= 1``)."""
    return ModelFile(
        variables=list(model.variables), design=list(model.design), parameters=list(model.parameters),
        objective=canonical_expr(model.objective),
        constraints=[Constraint(canonical_expr(c), "<=", (Term(1.0),)) for c in model.constraints],
    )


def same_structure(a: ModelFile, b: ModelFile, rel: float = 0.0) -> bool:
    """Structural equality with an optional relative tolerance on numbers."""
    def close(x, y):
        return x == y or math.isclose(x, y, rel_tol=rel, abs_tol=0.0)

    def eq_expr(x: Expr, y: Expr):
        return len(x) == len(y) and all(
            s.powers == t.powers and close(s.coeff, t.coeff) for s, t in zip(x, y))

    return (a.variables == b.variables and a.design == b.design
            and len(a.parameters) == len(b.parameters)
            and all(p.name == q.name and close(p.nominal, q.nominal) and close(p.rel, q.rel)
                    for p, q in zip(a.parameters, b.parameters))
            and (a.objective is None) == (b.objective is None)
            and (a.objective is None or eq_expr(a.objective, b.objective))
            and len(a.constraints) == len(b.constraints)
            and all(c.op == d.op and eq_expr(c.lhs, d.lhs) and eq_expr(c.rhs, d.rhs)
                    for c, d in zip(a.constraints, b.constraints)))
