"""A small expression language for real maps and the auxiliary functions.

Grammar (``^`` binds tightest, then ``* /``, then ``+ -``; all left
associative)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | base ("^" ["-"] INT)?
    base   := NUMBER | VAR | "(" expr ")"
            | FNAME "(" expr ("," expr)* ")"
            | "piecewise" "(" (cond ":" expr ";")* expr ")"
    cond   := expr ("<" | "<=" | ">" | ">=" | "==") expr

Functions are ``abs``, ``sqrt``, ``min`` and ``max``.  Piecewise guards are
tried in order and the trailing expression is the mandatory default.

Literals are kept as exact rationals in the tree.  Evaluation is exact when
every argument is an ``int`` or ``Fraction`` and float otherwise.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

MAP_VARS = ("x",)
UNARY_VARS = ("t",)
TERNARY_VARS = ("u", "v", "w")

FUNCTIONS = {"abs": (1, 1), "sqrt": (1, 1), "min": (1, None), "max": (1, None)}
RELOPS = ("<=", ">=", "==", "<", ">")


class ParseError(ValueError):
    def __init__(self, offset: int, message: str):
        self.offset = offset
        self.message = message
        super().__init__(f"offset {offset}: {message}")


class EvalError(ArithmeticError):
    pass


# ---- syntax tree -----------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Cond:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Piecewise:
    branches: tuple  # of (Cond, Node)
    default: "Node"


Node = Union[Num, Var, Neg, Bin, Pow, Call, Piecewise]


# ---- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|==|[-+*/^(),:;<>]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | name | op | end
    text: str
    pos: int


def _tokenize(src: str) -> list:
    toks = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(pos, f"unexpected character {src[pos]!r}")
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


# ---- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, src: str, variables: tuple):
        self.toks = _tokenize(src)
        self.i = 0
        self.variables = variables

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _is(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def _expect(self, text: str):
        if not self._is(text):
            self._fail(f"expected {text!r}")
        self.i += 1

    def _fail(self, message: str):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(t.pos, f"{message}, found {found}")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail("unexpected trailing input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is("+") or self._is("-"):
            op = self.tok.text
            self.i += 1
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self._is("*") or self._is("/"):
            op = self.tok.text
            self.i += 1
            node = Bin(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self._is("-"):
            self.i += 1
            return Neg(self.factor())
        node = self.base()
        if self._is("^"):
            self.i += 1
            sign = 1
            if self._is("-"):
                sign = -1
                self.i += 1
            t = self.tok
            if t.kind != "num" or "." in t.text:
                self._fail("integer exponent expected")
            self.i += 1
            node = Pow(node, sign * int(t.text))
        return node

    def base(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(Fraction(t.text))
        if self._is("("):
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        if t.kind == "name":
            if t.text == "piecewise":
                self.i += 1
                return self.piecewise()
            if t.text in FUNCTIONS:
                self.i += 1
                return self.call(t)
            if t.text in self.variables:
                self.i += 1
                return Var(t.text)
            raise ParseError(t.pos, f"unknown identifier {t.text!r}")
        self._fail("expected a number, variable, function or '('")

    def call(self, t: _Tok) -> Node:
        self._expect("(")
        args = [self.expr()]
        while self._is(","):
            self.i += 1
            args.append(self.expr())
        self._expect(")")
        lo, hi = FUNCTIONS[t.text]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ParseError(t.pos, f"{t.text} takes {lo if hi == lo else f'at least {lo}'} argument(s)")
        return Call(t.text, tuple(args))

    def piecewise(self) -> Node:
        self._expect("(")
        branches = []
        while True:
            value = self.expr()
            if self.tok.kind == "op" and self.tok.text in RELOPS:
                op = self.tok.text
                self.i += 1
                cond = Cond(op, value, self.expr())
                self._expect(":")
                branches.append((cond, self.expr()))
                self._expect(";")
                continue
            self._expect(")")
            return Piecewise(tuple(branches), value)


@dataclass(frozen=True)
class Expr:
    """Parsed expression over a fixed tuple of variable names."""

    root: Node
    variables: tuple
    source: str = ""

    @property
    def arity(self) -> int:
        return len(self.variables)

    def evaluate(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"expression takes {self.arity} argument(s), got {len(args)}")
        exact = all(isinstance(a, (int, Fraction)) and not isinstance(a, bool) for a in args)
        env = {k: (Fraction(a) if exact else float(a)) for k, a in zip(self.variables, args)}
        return _eval(self.root, env, exact)

    __call__ = evaluate

    def __str__(self) -> str:
        return to_source(self.root)


MapExpr = FuncExpr = Expr


def parse_map(src: str) -> Expr:
    """Parse a map T on the reals written in the variable ``x``."""
    return Expr(_Parser(src, MAP_VARS).parse(), MAP_VARS, src)


def parse_func(src: str, arity: int) -> Expr:
    """Parse a function in ``t`` (arity 1) or in ``u, v, w`` (arity 3)."""
    if arity == 1:
        variables = UNARY_VARS
    elif arity == 3:
        variables = TERNARY_VARS
    else:
        raise ValueError(f"arity must be 1 or 3, not {arity}")
    return Expr(_Parser(src, variables).parse(), variables, src)


def eval_map(expr: Expr, x):
    return expr.evaluate(x)


# ---- evaluation --------------------------------------------------------------

def _eval(node: Node, env: dict, exact: bool):
    if isinstance(node, Num):
        return node.value if exact else float(node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, env, exact)
    if isinstance(node, Bin):
        a = _eval(node.left, env, exact)
        b = _eval(node.right, env, exact)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0:
            raise EvalError("division by zero")
        return a / b
    if isinstance(node, Pow):
        b = _eval(node.base, env, exact)
        if b == 0 and node.exp < 0:
            raise EvalError("zero raised to a negative power")
        try:
            return b ** node.exp
        except OverflowError as e:
            raise EvalError(f"overflow in power: {e}") from None
    if isinstance(node, Call):
        vals = [_eval(a, env, exact) for a in node.args]
        if node.name == "abs":
            return abs(vals[0])
        if node.name == "min":
            return min(vals)
        if node.name == "max":
            return max(vals)
        v = vals[0]
        if v < 0:
            raise EvalError("square root of a negative value")
        if exact:
            from .numeric import sqrt_exact

            r = sqrt_exact(v)
            if r is None:
                raise EvalError(f"square root of {v} is irrational; evaluate in float mode")
            return r
        return math.sqrt(v)
    if isinstance(node, Piecewise):
        for cond, value in node.branches:
            if _holds(cond, env, exact):
                return _eval(value, env, exact)
        return _eval(node.default, env, exact)
    raise TypeError(f"not an expression node: {node!r}")


def _holds(cond: Cond, env: dict, exact: bool) -> bool:
    a = _eval(cond.left, env, exact)
    b = _eval(cond.right, env, exact)
    return {
        "<": a < b,
        "<=": a <= b,
        ">": a > b,
        ">=": a >= b,
        "==": a == b,
    }[cond.op]


# ---- printing ----------------------------------------------------------------

def _decimal(q: Fraction) -> str:
    n, d = q.numerator, q.denominator
    k = 0
    while d % 2 == 0:
        d //= 2
        k += 1
    j = 0
    while d % 5 == 0:
        d //= 5
        j += 1
    if d != 1:
        raise ValueError(f"{q} has no finite decimal expansion")
    places = max(k, j)
    digits = str(n * 10**places // q.denominator)
    if places == 0:
        return digits
    digits = digits.rjust(places + 1, "0")
    return f"{digits[:-places]}.{digits[-places:]}"


def to_source(node: Node) -> str:
    """Fully parenthesised source text that parses back to ``node``."""
    if isinstance(node, Num):
        return _decimal(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, Bin):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Pow):
        return f"({to_source(node.base)}^{node.exp})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Piecewise):
        parts = [
            f"{to_source(c.left)} {c.op} {to_source(c.right)} : {to_source(v)} ; "
            for c, v in node.branches
        ]
        return f"piecewise({''.join(parts)}{to_source(node.default)})"
    raise TypeError(f"not an expression node: {node!r}")


# ---- advisory class spot checks ------------------------------------------------

@dataclass(frozen=True)
class SpotReport:
    kind: str
    passed: bool
    checks: tuple  # of (name, passed, detail)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "checks": [{"name": n, "passed": p, "detail": d} for n, p, d in self.checks],
            "advisory": True,
        }


PROBE_K = range(1, 41)
TAIL_LIMIT = 1e-3


def spotcheck_f_class(F: Expr) -> SpotReport:
    """Sample the two F-class conditions: F(0,0,0) = 0 and F -> 0 at the origin.

    Continuity is probed along ``(2^-k, 2^-k, 2^-k)`` for k = 1..40; the
    tail (k >= 35) must stay within 1e-3 of zero.  Passing is evidence,
    not proof.
    """
    if F.arity != 3:
        raise ValueError("F must take three arguments (u, v, w)")
    at_zero = F.evaluate(0.0, 0.0, 0.0)
    zero_ok = abs(at_zero) <= 1e-12
    probes = [(k, F.evaluate(2.0**-k, 2.0**-k, 2.0**-k)) for k in PROBE_K]
    tail = max(abs(v) for k, v in probes if k >= 35)
    cont_ok = math.isfinite(tail) and tail <= TAIL_LIMIT
    checks = (
        ("F(0,0,0)=0", zero_ok, f"F(0,0,0) = {at_zero!r}"),
        ("continuous at origin", cont_ok, f"max |F| on probes k>=35: {tail!r}"),
    )
    return SpotReport("F", zero_ok and cont_ok, checks)


def spotcheck_scalar_class(f: Expr, kind: str) -> SpotReport:
    """Sample the beta-class (bounded near 0) or phi-class (phi(t) < t) condition."""
    if f.arity != 1:
        raise ValueError(f"{kind} must take one argument t")
    if kind == "beta":
        vals = {k: f.evaluate(2.0**-k) for k in PROBE_K}
        head = max(1.0, max(abs(vals[k]) for k in PROBE_K if k <= 20))
        tail = max(abs(vals[k]) for k in PROBE_K if k >= 30)
        ok = all(math.isfinite(v) for v in vals.values()) and tail <= 2 * head
        detail = f"max |beta| for k<=20: {head!r}; for k>=30: {tail!r}"
        return SpotReport("beta", ok, (("limsup at 0 finite", ok, detail),))
    if kind == "phi":
        failures = []
        negatives = []
        for e in range(-20, 11):
            t = 2.0**e
            v = f.evaluate(t)
            if not v < t:
                failures.append(t)
            if v < 0:
                negatives.append(t)
        checks = (
            ("phi(t) < t", not failures, f"fails at {len(failures)} of 31 grid points" + (f", first t={failures[0]!r}" if failures else "")),
            ("phi(t) >= 0", not negatives, f"negative at {len(negatives)} grid points"),
        )
        return SpotReport("phi", not failures and not negatives, checks)
    raise ValueError(f"kind must be 'beta' or 'phi', not {kind!r}")
