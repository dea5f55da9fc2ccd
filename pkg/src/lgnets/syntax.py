"""Formula, structure and sequent syntax: AST types, parser, printers.

The term language has two layers.  *Formulas* are built from atoms with
twenty logical connectives.  *Structures* are built from formulas (and,
in rule patterns, structure variables) with ten structural connectives;
the same structural token is read antecedent- or succedent-wise depending
on which side of the turnstile it occurs.

Binary connectives have no precedence: every nested binary application
must be parenthesised explicitly, so ``a * b * c`` is a syntax error
while ``(a * b) * c`` is fine.  Unary connectives use call syntax, as in
``dia(box(a))``.  Parse errors report the byte offset of the offending
token.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Formula", "Atom", "Nullary", "Unary", "Binary",
    "Structure", "SFormula", "SEmpty", "SUnary", "SBinary", "SVar",
    "Sequent", "ParseError",
    "parse_formula", "parse_structure", "parse_sequent", "parse_rule_line",
    "print_formula", "print_structure", "print_sequent",
    "LOGICAL_BINARY", "LOGICAL_UNARY", "LOGICAL_NULLARY", "LOGICAL_CONNS",
    "STRUCT_BINARY", "STRUCT_UNARY", "STRUCT_NULLARY", "STRUCTURAL_CONNS",
]

# ---------------------------------------------------------------------------
# Connective inventory (ASCII tokens are the canonical connective ids).

LOGICAL_BINARY = (
    "*", "-o", "o-",        # product and its two residuals
    "@", "-@", "@-",        # coproduct and its two coresiduals
    "^", "-^", "^-",        # downward Galois arrows (succedent-sided)
    "v", "-v", "v-",        # upward Galois arrows (antecedent-sided)
)
LOGICAL_UNARY = ("dia", "box", "rgal", "lgal", "rdgal", "ldgal")
LOGICAL_NULLARY = ("one", "bot")
LOGICAL_CONNS = LOGICAL_BINARY + LOGICAL_UNARY + LOGICAL_NULLARY

STRUCT_BINARY = ("o", "<", ">", "<>", "<|", "|>")
STRUCT_UNARY = ("z", "fl", "ce")
STRUCT_NULLARY = ("e",)
STRUCTURAL_CONNS = STRUCT_BINARY + STRUCT_UNARY + STRUCT_NULLARY

_BINARY_TOKENS = frozenset(LOGICAL_BINARY) | frozenset(STRUCT_BINARY)
_UNARY_TOKENS = frozenset(LOGICAL_UNARY) | frozenset(STRUCT_UNARY)
_KEYWORDS = frozenset(LOGICAL_UNARY) | frozenset(LOGICAL_NULLARY) | \
    frozenset(STRUCT_UNARY) | frozenset(STRUCT_NULLARY) | frozenset({"o", "v"})

_LOGICAL = frozenset(LOGICAL_CONNS)
_STRUCTURAL = frozenset(STRUCTURAL_CONNS)


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True)
class Nullary:
    conn: str


@dataclass(frozen=True)
class Unary:
    conn: str
    arg: "Formula"


@dataclass(frozen=True)
class Binary:
    conn: str
    left: "Formula"
    right: "Formula"


Formula = Atom | Nullary | Unary | Binary


@dataclass(frozen=True)
class SFormula:
    formula: Formula


@dataclass(frozen=True)
class SEmpty:
    pass


@dataclass(frozen=True)
class SUnary:
    conn: str
    arg: "Structure"


@dataclass(frozen=True)
class SBinary:
    conn: str
    left: "Structure"
    right: "Structure"


@dataclass(frozen=True)
class SVar:
    name: str


Structure = SFormula | SEmpty | SUnary | SBinary | SVar


@dataclass(frozen=True)
class Sequent:
    ante: Structure
    succ: Structure

    def __str__(self) -> str:
        return print_sequent(self)


class ParseError(ValueError):
    """Syntax error carrying the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


# ---------------------------------------------------------------------------
# Tokenizer

_SYMBOLS = (
    "<=>", "|-", "=>", "<>", "<|", "|>",
    "-o", "-@", "-^", "-v", "@-", "^-",
    "@", "*", "^", "<", ">", "(", ")", ":",
)


@dataclass(frozen=True)
class _Token:
    kind: str           # "sym" | "atom" | "svar" | "end"
    text: str
    pos: int


def _tokenize(src: str) -> list[_Token]:
    toks: list[_Token] = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        for sym in _SYMBOLS:
            if src.startswith(sym, i):
                toks.append(_Token("sym", sym, i))
                i += len(sym)
                break
        else:
            if ch.isalpha():
                j = i + 1
                while j < n and (src[j].isalnum() or src[j] == "_"):
                    j += 1
                word = src[i:j]
                if word in ("o", "v") and j < n and src[j] == "-":
                    toks.append(_Token("sym", word + "-", i))
                    i = j + 1
                elif word in _KEYWORDS:
                    toks.append(_Token("sym", word, i))
                    i = j
                elif word[0].isupper():
                    toks.append(_Token("svar", word, i))
                    i = j
                else:
                    toks.append(_Token("atom", word, i))
                    i = j
            else:
                raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(_Token("end", "", n))
    return toks


# ---------------------------------------------------------------------------
# Parser.  An untyped node tree is built first, then resolved to the
# formula/structure layers so that mixing errors point at the right token.

@dataclass(frozen=True)
class _Node:
    conn: str | None    # None for leaves
    kids: tuple
    pos: int
    leaf: str = ""      # atom or svar name
    kind: str = ""      # "atom" | "svar" for leaves


class _Parser:
    def __init__(self, src: str, svars: bool):
        self.toks = _tokenize(src)
        self.i = 0
        self.svars = svars

    def peek(self) -> _Token:
        return self.toks[self.i]

    def take(self) -> _Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.take()
        if tok.kind == "end" or tok.text != text:
            raise ParseError(f"expected {text!r}", tok.pos)
        return tok

    def node(self) -> _Node:
        left = self.term()
        tok = self.peek()
        if tok.kind == "sym" and tok.text in _BINARY_TOKENS:
            self.take()
            right = self.term()
            nxt = self.peek()
            if nxt.kind == "sym" and nxt.text in _BINARY_TOKENS:
                raise ParseError(
                    "binary connectives have no precedence; parenthesise",
                    nxt.pos)
            return _Node(tok.text, (left, right), tok.pos)
        return left

    def term(self) -> _Node:
        tok = self.take()
        if tok.kind == "sym" and tok.text == "(":
            inner = self.node()
            self.expect(")")
            return inner
        if tok.kind == "sym" and tok.text in _UNARY_TOKENS:
            self.expect("(")
            arg = self.node()
            self.expect(")")
            return _Node(tok.text, (arg,), tok.pos)
        if tok.kind == "sym" and (tok.text in LOGICAL_NULLARY
                                  or tok.text in STRUCT_NULLARY):
            return _Node(tok.text, (), tok.pos)
        if tok.kind == "atom":
            return _Node(None, (), tok.pos, leaf=tok.text, kind="atom")
        if tok.kind == "svar":
            if not self.svars:
                raise ParseError(
                    f"structure variable {tok.text!r} outside a rule pattern",
                    tok.pos)
            return _Node(None, (), tok.pos, leaf=tok.text, kind="svar")
        raise ParseError("expected a term", tok.pos)


def _resolve(node: _Node):
    """Return ("f", Formula) or ("s", Structure) for an untyped node."""
    if node.conn is None:
        if node.kind == "atom":
            return "f", Atom(node.leaf)
        return "s", SVar(node.leaf)
    conn = node.conn
    kids = [_resolve(k) for k in node.kids]
    if conn in _LOGICAL:
        for (tag, _), kid_node in zip(kids, node.kids):
            if tag == "s":
                raise ParseError(
                    "structural material inside a formula", kid_node.pos)
        args = [val for _, val in kids]
        if not args:
            return "f", Nullary(conn)
        if len(args) == 1:
            return "f", Unary(conn, args[0])
        return "f", Binary(conn, args[0], args[1])
    args = [val if tag == "s" else SFormula(val) for tag, val in kids]
    if not args:
        return "s", SEmpty()
    if len(args) == 1:
        return "s", SUnary(conn, args[0])
    return "s", SBinary(conn, args[0], args[1])


def _parse_one_structure(p: _Parser) -> Structure:
    tag, val = _resolve(p.node())
    return SFormula(val) if tag == "f" else val


def parse_formula(src: str) -> Formula:
    """Parse a pure formula; structural material is a parse error."""
    p = _Parser(src, svars=False)
    node = p.node()
    end = p.peek()
    if end.kind != "end":
        raise ParseError("trailing input", end.pos)
    tag, val = _resolve(node)
    if tag != "f":
        raise ParseError("expected a formula, found structural material",
                         node.pos)
    return val


def parse_structure(src: str, svars: bool = False) -> Structure:
    p = _Parser(src, svars=svars)
    node = p.node()
    end = p.peek()
    if end.kind != "end":
        raise ParseError("trailing input", end.pos)
    tag, val = _resolve(node)
    return SFormula(val) if tag == "f" else val


def _parse_sequent_at(p: _Parser) -> Sequent:
    ante = _parse_one_structure(p)
    p.expect("|-")
    succ = _parse_one_structure(p)
    return Sequent(ante, succ)


def parse_sequent(src: str, svars: bool = False) -> Sequent:
    """Parse ``structure |- structure``.

    Structure variables (uppercase identifiers) are only admitted when
    ``svars`` is true, as in structural-rule patterns.
    """
    p = _Parser(src, svars=svars)
    seq = _parse_sequent_at(p)
    end = p.peek()
    if end.kind != "end":
        raise ParseError("trailing input", end.pos)
    return seq


def parse_rule_line(line: str) -> tuple[str, Sequent, Sequent, bool] | None:
    """Parse one structural-rule declaration.

    The format is ``name : lhs-sequent => rhs-sequent`` with ``<=>`` in
    place of ``=>`` for a reversible rule.  Returns ``(name, lhs, rhs,
    reversible)``, or None for blank/comment lines.
    """
    p = _Parser(line, svars=True)
    if p.peek().kind == "end":
        return None
    name_tok = p.take()
    if name_tok.kind not in ("atom", "svar"):
        raise ParseError("expected a rule name", name_tok.pos)
    p.expect(":")
    lhs = _parse_sequent_at(p)
    arrow = p.take()
    if arrow.kind != "sym" or arrow.text not in ("=>", "<=>"):
        raise ParseError("expected => or <=>", arrow.pos)
    rhs = _parse_sequent_at(p)
    end = p.peek()
    if end.kind != "end":
        raise ParseError("trailing input", end.pos)
    return name_tok.text, lhs, rhs, arrow.text == "<=>"


# ---------------------------------------------------------------------------
# Printers.  "here" notation round-trips through the parser; "dl" and
# "tlg" render the display-logic and type-logical conventions, falling
# back to "?" plus the ASCII token for connectives those notations lack.

_DL = {
    "*": ("infix", "⊗"), "-o": ("infix", "→"), "o-": ("infix", "←"),
    "@": ("infix", "⊕"), "-@": ("infix", ">-"), "@-": ("infix", "-<"),
    "dia": ("prefix", "◇"), "box": ("prefix", "□"),
    "rgal": ("postcirc", "^0"), "lgal": ("precirc", "^0"),
    "rdgal": ("postcirc", "^1"), "ldgal": ("precirc", "^1"),
    "one": ("atom", "1"), "bot": ("atom", "0"),
    "o": ("infix", ";"), "<": ("infix", "<"), ">": ("infix", ">"),
    "z": ("prefix", "∘"), "fl": ("prefix", "♭"), "ce": ("prefix", "♯"),
    "e": ("atom", "Φ"),
}

_TLG = {
    "*": ("infix", "•"), "-o": ("infix", "\\"), "o-": ("infix", "/"),
    "dia": ("prefix", "◇"), "box": ("prefix", "□↓"),
    "rgal": ("postcirc", "^0"), "lgal": ("precirc", "^0"),
    "rdgal": ("postcirc", "^1"), "ldgal": ("precirc", "^1"),
    "o": ("infix", "∘"),
    "z": ("circumfix", "⟨", "⟩"), "fl": ("prefix", "♭"),
    "ce": ("prefix", "♯"),
}

_NOTATIONS = {"dl": _DL, "tlg": _TLG}


def _style(conn: str, arity: int, notation: str):
    table = _NOTATIONS[notation]
    if conn in table:
        return table[conn]
    fallback = "?" + conn
    if arity == 2:
        return ("infix", fallback)
    if arity == 1:
        return ("prefix", fallback + " ")
    return ("atom", fallback)


def _pieces(x) -> tuple[str | None, list, str]:
    """Uniform (conn, args, leaf-text) view over formulas and structures."""
    match x:
        case Atom(name):
            return None, [], name
        case SVar(name):
            return None, [], name
        case Nullary(conn):
            return conn, [], ""
        case SEmpty():
            return "e", [], ""
        case Unary(conn, arg):
            return conn, [arg], ""
        case SUnary(conn, arg):
            return conn, [arg], ""
        case Binary(conn, left, right):
            return conn, [left, right], ""
        case SBinary(conn, left, right):
            return conn, [left, right], ""
        case SFormula(f):
            return _pieces(f)
    raise TypeError(f"not a formula or structure: {x!r}")


def _fmt_here(x, top: bool) -> str:
    conn, args, leaf = _pieces(x)
    if conn is None:
        return leaf
    if not args:
        return conn
    if len(args) == 1:
        return f"{conn}({_fmt_here(args[0], True)})"
    body = f"{_fmt_here(args[0], False)} {conn} {_fmt_here(args[1], False)}"
    return body if top else f"({body})"


def _fmt_pretty(x, top: bool, notation: str) -> str:
    conn, args, leaf = _pieces(x)
    if conn is None:
        return leaf
    style = _style(conn, len(args), notation)
    if not args:
        return style[1]
    if len(args) == 1:
        inner = _fmt_pretty(args[0], False, notation)
        if style[0] == "postcirc":
            return f"({inner}){style[1]}"
        if style[0] == "precirc":
            return f"{style[1]}({inner})"
        if style[0] == "circumfix":
            return f"{style[1]}{inner}{style[2]}"
        return f"{style[1]}{inner}"
    body = (f"{_fmt_pretty(args[0], False, notation)} {style[1]} "
            f"{_fmt_pretty(args[1], False, notation)}")
    return body if top else f"({body})"


def _fmt(x, top: bool, notation: str) -> str:
    if notation == "here":
        return _fmt_here(x, top)
    if notation in _NOTATIONS:
        return _fmt_pretty(x, top, notation)
    raise ValueError(f"unknown notation {notation!r}")


def print_formula(f: Formula, notation: str = "here") -> str:
    return _fmt(f, True, notation)


def print_structure(s: Structure, notation: str = "here") -> str:
    return _fmt(s, True, notation)


def print_sequent(seq: Sequent, notation: str = "here") -> str:
    stile = "|-" if notation == "here" else "⊢"
    return (f"{_fmt(seq.ante, True, notation)} {stile} "
            f"{_fmt(seq.succ, True, notation)}")
