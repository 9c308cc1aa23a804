"""Concrete syntax for types, terms and formulas.

Terms::

    \\x:Nat. t          abstraction (the body extends as far as possible)
    f a b              application
    <t, u>  p0 t  p1 t pairs and projections
    if[T] rec[T] S min get mkupd cup true false
    phi{3}  upd{(0,5,7);(1,2,3)}  42
    a + b  a - b  a * b  a = b  a < b  a <= b
    ~a  a && b  a || b  a ==> b

Library names (``add``, ``eq``, ``cpair`` ...) may also be used as ordinary
functions.  A pair given as a function argument must be parenthesized, since
``<`` after a term reads as "less than".

Formulas::

    all x:Nat. F   ex y:Nat. F   F -> G   F | G   F & G   F \\ G   (F)

with ``->`` binding loosest (and to the right), then ``|``, ``&`` and ``\\``.
Every other formula is an atom, written as a Bool term.

Types: ``Nat``, ``Bool``, ``Update``, ``A * B`` and ``A -> B`` (right
associative, ``*`` binding tighter).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import library as lib
from .kernel import (
    BOOL, FALSE, NAT, SUCC, TRUE, UPDATE, App, Arrow, BVar, Const, Def, Lam, Num,
    Pair, Prod, Proj, SimpleType, Term, Var, abstract, free_vars, skolem,
    upconst, CUP, GET, MIN, MKUPD, if_, rec,
)
from .logic import And, Atomic, Exists, Forall, Formula, Implies, Minus, Or
from .updates import Update


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message, self.line, self.column = message, line, column


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>==>|->|<=|&&|\|\||[\\.:,;()<>\[\]{}+\-*=~|&])
""", re.VERBOSE)

CONSTANT_WORDS = {"S": SUCC, "true": TRUE, "false": FALSE, "min": MIN, "get": GET,
                  "mkupd": MKUPD, "cup": CUP}
KEYWORDS = set(CONSTANT_WORDS) | {"if", "rec", "phi", "upd", "p0", "p1", "all", "ex",
                                  "Nat", "Bool", "Update"} | set(lib.BODIES)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        for k, ch in enumerate(m.group()):
            if ch == "\n":
                line, line_start = line + 1, pos + k + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ----------------------------------------------------------------------------
# Parser

_INFIX_DEFS = {"+": "add", "-": "sub", "*": "mul", "=": "eq", "<": "lt", "<=": "leq",
               "&&": "and", "||": "or", "==>": "imp"}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- helpers -----------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text in texts

    def error(self, message, tok: Optional[Token] = None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected a variable name, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def number(self) -> int:
        t = self.tok
        if t.kind != "num":
            raise self.error(f"expected a number, found {t.text or 'end of input'!r}")
        self.i += 1
        return int(t.text)

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- types -------------------------------------------------------------

    def type_(self) -> SimpleType:
        left = self.prod_type()
        if self.at("->"):
            self.advance()
            return Arrow(left, self.type_())
        return left

    def prod_type(self) -> SimpleType:
        ty = self.base_type()
        while self.at("*"):
            self.advance()
            ty = Prod(ty, self.base_type())
        return ty

    def base_type(self) -> SimpleType:
        for name, ty in (("Nat", NAT), ("Bool", BOOL), ("Update", UPDATE)):
            if self.at(name):
                self.advance()
                return ty
        if self.at("("):
            self.advance()
            ty = self.type_()
            self.expect(")")
            return ty
        raise self.error(f"expected a type, found {self.tok.text or 'end of input'!r}")

    # -- terms -------------------------------------------------------------

    def term(self) -> Term:
        if self.at("\\"):
            self.advance()
            name = self.ident()
            self.expect(":")
            ty = self.type_()
            self.expect(".")
            body = self.term()
            return Lam(ty, abstract(name, body), name)
        return self.imp_term()

    def _binop(self, name, left, right):
        return App(App(Def(name), left), right)

    def imp_term(self) -> Term:
        left = self.or_term()
        if self.at("==>"):
            self.advance()
            return self._binop("imp", left, self.imp_term())
        return left

    def or_term(self) -> Term:
        t = self.and_term()
        while self.at("||"):
            self.advance()
            t = self._binop("or", t, self.and_term())
        return t

    def and_term(self) -> Term:
        t = self.cmp_term()
        while self.at("&&"):
            self.advance()
            t = self._binop("and", t, self.cmp_term())
        return t

    def cmp_term(self) -> Term:
        t = self.add_term()
        if self.at("=", "<", "<="):
            op = self.advance().text
            t = self._binop(_INFIX_DEFS[op], t, self.add_term())
        return t

    def add_term(self) -> Term:
        t = self.mul_term()
        while self.at("+", "-"):
            op = self.advance().text
            t = self._binop(_INFIX_DEFS[op], t, self.mul_term())
        return t

    def mul_term(self) -> Term:
        t = self.unary_term()
        while self.at("*"):
            self.advance()
            t = self._binop("mul", t, self.unary_term())
        return t

    def unary_term(self) -> Term:
        if self.at("~"):
            self.advance()
            return App(Def("not"), self.unary_term())
        return self.app_term()

    def app_term(self) -> Term:
        if self.at("p0", "p1"):
            side = int(self.advance().text[1])
            # "<" right after p0/p1 can only open a pair.
            t = Proj(side, self.atom(allow_pair=True))
        else:
            t = self.atom(allow_pair=True)
        while self.starts_arg():
            t = App(t, self.atom(allow_pair=False))
        return t

    def starts_arg(self) -> bool:
        tok = self.tok
        if tok.kind == "num":
            return True
        if tok.kind == "ident":
            return tok.text not in ("all", "ex", "p0", "p1", "Nat", "Bool", "Update")
        return tok.text == "("

    def atom(self, allow_pair: bool) -> Term:
        tok = self.tok
        if tok.kind == "num":
            return Num(self.number())
        if self.at("("):
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        if allow_pair and self.at("<"):
            self.advance()
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(">")
            return Pair(left, right)
        if tok.kind != "ident":
            raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")
        word = tok.text
        if word in CONSTANT_WORDS:
            self.advance()
            return CONSTANT_WORDS[word]
        if word in ("if", "rec"):
            self.advance()
            self.expect("[")
            ty = self.type_()
            self.expect("]")
            return if_(ty) if word == "if" else rec(ty)
        if word == "phi":
            self.advance()
            self.expect("{")
            i = self.number()
            self.expect("}")
            return skolem(i)
        if word == "upd":
            self.advance()
            return upconst(self.update_body())
        if word in lib.BODIES:
            self.advance()
            return Def(word)
        return Var(self.ident())

    def update_body(self) -> Update:
        start = self.expect("{")
        triples = []
        if not self.at("}"):
            while True:
                self.expect("(")
                a = self.number()
                self.expect(",")
                n = self.number()
                self.expect(",")
                m = self.number()
                self.expect(")")
                triples.append((a, n, m))
                if not self.at(";"):
                    break
                self.advance()
        self.expect("}")
        try:
            return Update(triples)
        except ValueError as err:
            raise self.error(str(err), start) from None

    # -- formulas ----------------------------------------------------------

    def formula(self) -> Formula:
        left = self.or_formula()
        if self.at("->"):
            self.advance()
            return Implies(left, self.formula())
        return left

    def or_formula(self) -> Formula:
        f = self.and_formula()
        while self.at("|"):
            self.advance()
            f = Or(f, self.and_formula())
        return f

    def and_formula(self) -> Formula:
        f = self.minus_formula()
        while self.at("&"):
            self.advance()
            f = And(f, self.minus_formula())
        return f

    def minus_formula(self) -> Formula:
        f = self.unary_formula()
        while self.at("\\"):
            self.advance()
            f = Minus(f, self.unary_formula())
        return f

    def unary_formula(self) -> Formula:
        if self.at("all", "ex"):
            kind = Forall if self.advance().text == "all" else Exists
            name = self.ident()
            self.expect(":")
            ty = self.type_()
            self.expect(".")
            return kind(name, ty, self.formula())
        if self.at("("):
            # Either a parenthesized term starting an atom, or a grouped formula.
            start = self.i
            try:
                t = self.imp_term()
                if self.tok.kind == "eof" or self.at("->", "|", "&", "\\", ")"):
                    return Atomic(t)
            except ParseError:
                pass
            self.i = start
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        return Atomic(self.imp_term())


def parse_type(text: str) -> SimpleType:
    p = _Parser(text)
    ty = p.type_()
    p.finish()
    return ty


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.finish()
    return t


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.finish()
    return f


def parse_update(text: str) -> Update:
    p = _Parser(text)
    p.expect("upd")
    u = p.update_body()
    p.finish()
    return u


# ----------------------------------------------------------------------------
# Printer

def print_type(ty: SimpleType, level: int = 0) -> str:
    if isinstance(ty, Arrow):
        s = f"{print_type(ty.dom, 1)} -> {print_type(ty.cod, 0)}"
        return f"({s})" if level > 0 else s
    if isinstance(ty, Prod):
        s = f"{print_type(ty.left, 1)} * {print_type(ty.right, 2)}"
        return f"({s})" if level > 1 else s
    return ty.name


# (level of the operator, level for the left operand, level for the right one)
_INFIX = {
    "imp": ("==>", 1, 2, 1), "or": ("||", 2, 2, 3), "and": ("&&", 3, 3, 4),
    "eq": ("=", 4, 5, 5), "lt": ("<", 4, 5, 5), "leq": ("<=", 4, 5, 5),
    "add": ("+", 5, 5, 6), "sub": ("-", 5, 5, 6), "mul": ("*", 6, 6, 7),
}
_APP, _ATOM = 8, 9


def _name_for(hint: str, avoid: set[str]) -> str:
    base = hint if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", hint or "") else "x"
    if base in KEYWORDS:
        base = base + "_"
    name, k = base, 0
    while name in avoid or name in KEYWORDS:
        k += 1
        name = f"{base}{k}"
    return name


def print_term(t: Term) -> str:
    return _Printer(set(free_vars(t))).show(t, 0, [])


class _Printer:
    def __init__(self, free: set[str]):
        self.free = free

    def show(self, t: Term, level: int, names: list[str]) -> str:
        text, own = self.render(t, names)
        return f"({text})" if own < level else text

    def render(self, t: Term, names: list[str]) -> tuple[str, int]:
        if isinstance(t, Var):
            return t.name, _ATOM
        if isinstance(t, BVar):
            if t.index >= len(names):
                raise ValueError("cannot print a term with dangling bound variables")
            return names[-1 - t.index], _ATOM
        if isinstance(t, Num):
            return str(t.value), _ATOM
        if isinstance(t, Const):
            return self.const(t), _ATOM
        if isinstance(t, Def):
            return t.name, _ATOM
        if isinstance(t, Lam):
            name = _name_for(t.hint, self.free | set(names))
            body = self.show(t.body, 0, names + [name])
            return f"\\{name}:{print_type(t.ty)}. {body}", 0
        if isinstance(t, Pair):
            return f"<{self.show(t.left, 0, names)}, {self.show(t.right, 0, names)}>", _APP
        if isinstance(t, Proj):
            return f"p{t.side} {self.show(t.arg, _ATOM, names)}", _APP
        # Application: infix forms for fully applied library operators.
        if isinstance(t.fun, Def) and t.fun.name == "not":
            return f"~{self.show(t.arg, 7, names)}", 7
        if isinstance(t.fun, App) and isinstance(t.fun.fun, Def) and t.fun.fun.name in _INFIX:
            op, own, lhs, rhs = _INFIX[t.fun.fun.name]
            left = self.show(t.fun.arg, lhs, names)
            right = self.show(t.arg, rhs, names)
            return f"{left} {op} {right}", own
        return f"{self.show(t.fun, _APP, names)} {self.show(t.arg, _ATOM, names)}", _APP

    @staticmethod
    def const(c: Const) -> str:
        if c.tag in ("if", "rec"):
            return f"{c.tag}[{print_type(c.arg)}]"
        if c.tag == "phi":
            return f"phi{{{c.arg}}}"
        if c.tag == "upd":
            return "upd{" + ";".join(f"({a},{n},{m})" for a, n, m in c.arg) + "}"
        return c.tag


_F_LEVEL = {Implies: 1, Or: 2, And: 3, Minus: 4}
_F_OP = {Implies: "->", Or: "|", And: "&", Minus: "\\"}


def print_formula(f: Formula) -> str:
    return _show_formula(f, 0)


def _show_formula(f: Formula, level: int) -> str:
    if isinstance(f, Atomic):
        text = print_term(f.term)
        # An atom must not swallow a following connective or start a binder.
        if isinstance(f.term, Lam):
            text = f"({text})"
        return text
    if isinstance(f, (Forall, Exists)):
        word = "all" if isinstance(f, Forall) else "ex"
        text = f"{word} {f.var}:{print_type(f.ty)}. {_show_formula(f.body, 0)}"
        return f"({text})" if level > 0 else text
    own = _F_LEVEL[type(f)]
    if isinstance(f, Implies):
        left, right = _show_formula(f.left, own + 1), _show_formula(f.right, own)
    else:
        left, right = _show_formula(f.left, own), _show_formula(f.right, own + 1)
    text = f"{left} {_F_OP[type(f)]} {right}"
    return f"({text})" if own < level else text
