"""Text format for knowledge bases (``.shiq``) and conjunctive queries (``.cq``).

Concepts are fully parenthesized s-expressions::

    trans R.
    role R <= S.
    distinguished B.
    axiom A <= (some R (and B (not C))).
    assert A(a).
    assert (inv R)(a, b).
    assert a != b.

Queries are comma separated atoms; terms starting with ``?`` are variables::

    R(a, ?y), B(?y)
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .kb import (
    All, And, AtLeast, AtMost, Atom, Concept, ConceptAssertion, Inclusion, Inequality,
    InvalidKnowledgeBase, KnowledgeBase, Not, Or, Role, RoleAssertion, RoleBox, Some,
    nnf, validate_kb,
)
from .query import ConceptAtom, Query, RoleAtom


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    """Lexical, syntax or validation error located in the source text."""

    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<le><=)
  | (?P<ne>!=)
  | (?P<num>\d+(?![A-Za-z_]))
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<punct>[().,])
    """,
    re.VERBOSE,
)

_CONSTRUCTORS = {"and", "or", "not", "all", "some", "atleast", "atmost"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    start: int
    end: int


class _Stream:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[_Tok] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", self.span(pos, pos + 1))
            if m.lastgroup != "ws":
                self.toks.append(_Tok(m.lastgroup, m.group(), m.start(), m.end()))
            pos = m.end()
        self.i = 0

    def span(self, start: int, end: int) -> SourceSpan:
        line = self.text.count("\n", 0, start) + 1
        column = start - (self.text.rfind("\n", 0, start) + 1) + 1
        return SourceSpan(line, column, start, max(start, end))

    def peek(self, k: int = 0) -> _Tok | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, message: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        if tok is None:
            end = len(self.text)
            return ParseError(message + " (at end of input)", self.span(end, end))
        return ParseError(message, self.span(tok.start, tok.end))

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.text != text:
            found = "end of input" if tok is None else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        return self.next()

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.text == text

    def name(self, what: str = "name") -> str:
        tok = self.peek()
        if tok is None or tok.kind != "name":
            raise self.error(f"expected {what}")
        return self.next().text

    def number(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "num":
            raise self.error("expected a number")
        return int(self.next().text)


def _role(s: _Stream) -> Role:
    if s.at("("):
        s.expect("(")
        if not s.at("inv"):
            raise s.error("expected 'inv'")
        s.next()
        name = s.name("role name")
        s.expect(")")
        return Role(name, True)
    return Role(s.name("role name"))


def _concept(s: _Stream) -> Concept:
    if not s.at("("):
        return Atom(s.name("concept"))
    s.expect("(")
    tok = s.peek()
    if tok is None or tok.text not in _CONSTRUCTORS:
        raise s.error("expected a concept constructor")
    op = s.next().text
    if op == "not":
        c: Concept = Not(_concept(s))
    elif op in ("and", "or"):
        left = _concept(s)
        right = _concept(s)
        c = And(left, right) if op == "and" else Or(left, right)
    elif op in ("all", "some"):
        role = _role(s)
        filler = _concept(s)
        c = All(role, filler) if op == "all" else Some(role, filler)
    else:
        count = s.number()
        role = _role(s)
        filler = _concept(s)
        c = AtLeast(count, role, filler) if op == "atleast" else AtMost(count, role, filler)
    s.expect(")")
    return c


def parse_concept(text: str) -> Concept:
    s = _Stream(text)
    c = _concept(s)
    if s.peek() is not None:
        raise s.error("trailing input after concept")
    return c


def _assertion(s: _Stream):
    if s.peek() is not None and s.peek().kind == "name" and s.at("!=", 1):
        left = s.next().text
        s.expect("!=")
        return Inequality(left, s.name("individual"))
    if s.at("(") and s.at("inv", 1):
        subject_role = _role(s)
        head: Concept | Role = subject_role
    else:
        head = _concept(s)
    s.expect("(")
    args = [s.name("individual")]
    while s.at(","):
        s.next()
        args.append(s.name("individual"))
    s.expect(")")
    if len(args) == 1:
        if isinstance(head, Role):
            raise s.error("role used as a concept")
        return ConceptAssertion(head, args[0])
    if len(args) == 2:
        if isinstance(head, Atom):
            head = Role(head.name)
        if not isinstance(head, Role):
            raise s.error("complex concept used as a role")
        return RoleAssertion(head, args[0], args[1])
    raise s.error("assertions take one or two individuals")


@dataclass
class _Sections:
    abox: dict
    tbox: dict
    incl: dict
    trans: dict
    dist: dict


def _parse_statements(text: str):
    s = _Stream(text)
    sec = _Sections({}, {}, {}, {}, {})
    while s.peek() is not None:
        first = s.peek()
        keyword = s.name("statement keyword")
        if keyword == "trans":
            item, target = _role(s), sec.trans
            if item.inverted:
                raise s.error("transitivity is declared on role names", first)
            item = item.name
        elif keyword == "role":
            sub = _role(s)
            s.expect("<=")
            item, target = (sub, _role(s)), sec.incl
        elif keyword == "axiom":
            sub = _concept(s)
            s.expect("<=")
            item, target = Inclusion(nnf(sub), nnf(_concept(s))), sec.tbox
        elif keyword == "distinguished":
            item, target = s.name("concept name"), sec.dist
        elif keyword == "assert":
            item, target = _assertion(s), sec.abox
            if isinstance(item, ConceptAssertion):
                item = ConceptAssertion(nnf(item.concept), item.individual)
        else:
            raise s.error(f"unknown statement {keyword!r}", first)
        end = s.expect(".")
        target.setdefault(item, s.span(first.start, end.end))
    return s, sec


def parse_kb(text: str, validate: bool = True) -> KnowledgeBase:
    """Parse and NNF-normalize a knowledge base.

    With ``validate`` the result is checked by :func:`validate_kb` and the first
    problem is raised as a :class:`ParseError` pointing at the offending statement.
    """
    s, sec = _parse_statements(text)
    kb = KnowledgeBase(
        abox=tuple(sec.abox),
        rbox=RoleBox(tuple(sec.incl), tuple(sec.trans)),
        tbox=tuple(sec.tbox),
        distinguished=tuple(sec.dist),
    )
    if validate:
        issues = validate_kb(kb)
        if issues:
            spans = {
                "abox": list(sec.abox.values()),
                "tbox": list(sec.tbox.values()),
                "rbox": list(sec.incl.values()),
            }
            where, index = issues[0].where
            located = spans.get(where, [])
            span = located[index] if index < len(located) else s.span(0, len(text))
            err = ParseError(issues[0].message, span)
            err.__cause__ = InvalidKnowledgeBase(issues)
            raise err
    return kb


def parse_query(text: str, kb: KnowledgeBase | None = None) -> Query:
    """Parse a Boolean conjunctive query.

    Unary atoms are concept atoms and binary atoms are role atoms. With ``kb``
    role names must be used binary and binary names must be roles of ``kb``.
    """
    s = _Stream(text)
    atoms: dict = {}
    arity: dict[str, int] = {}
    roles = kb.role_names if kb is not None else None
    while True:
        tok = s.peek()
        name = s.name("predicate")
        s.expect("(")
        terms = [_term(s)]
        while s.at(","):
            s.next()
            terms.append(_term(s))
        close = s.expect(")")
        span = s.span(tok.start, close.end)
        if len(terms) > 2:
            raise ParseError(f"{name} has arity {len(terms)}; atoms are unary or binary", span)
        if arity.setdefault(name, len(terms)) != len(terms):
            raise ParseError(f"{name} used with arity {len(terms)} and {arity[name]}", span)
        if roles is not None:
            if len(terms) == 1 and name in roles:
                raise ParseError(f"role {name} needs two arguments", span)
            if len(terms) == 2 and name not in roles:
                raise ParseError(f"unknown role {name}", span)
        if len(terms) == 1:
            atoms.setdefault(ConceptAtom(name, terms[0]))
        else:
            atoms.setdefault(RoleAtom(Role(name), terms[0], terms[1]))
        if s.at(","):
            s.next()
            continue
        if s.at("."):
            s.next()
        break
    if s.peek() is not None:
        raise s.error("expected ',' between atoms")
    return Query(tuple(atoms))


def _term(s: _Stream) -> str:
    tok = s.peek()
    if tok is None or tok.kind not in ("var", "name"):
        raise s.error("expected a variable or constant")
    return s.next().text


def render_role(r: Role) -> str:
    return str(r)


def render_concept(c: Concept) -> str:
    return c.sexpr


def render_assertion(a) -> str:
    if isinstance(a, ConceptAssertion):
        return f"assert {a.concept.sexpr}({a.individual})."
    if isinstance(a, RoleAssertion):
        return f"assert {a.role}({a.subject}, {a.object})."
    return f"assert {a.left} != {a.right}."


def render_atom(atom) -> str:
    if isinstance(atom, ConceptAtom):
        return f"{atom.name}({atom.term})"
    return f"{atom.role}({atom.subject}, {atom.object})"


def render(x: KnowledgeBase | Query) -> str:
    if isinstance(x, Query):
        return ", ".join(render_atom(a) for a in x.atoms) + "\n"
    lines = [f"trans {name}." for name in x.rbox.transitive]
    lines += [f"role {sub} <= {sup}." for sub, sup in x.rbox.inclusions]
    lines += [f"distinguished {name}." for name in x.distinguished]
    lines += [f"axiom {g.sub.sexpr} <= {g.sup.sexpr}." for g in x.tbox]
    lines += [render_assertion(a) for a in x.abox]
    return "\n".join(lines) + "\n"
