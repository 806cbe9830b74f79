"""Parser for the model-definition language (.smf files).

The expression tree preserves the written factor order; all sign handling
happens later during canonicalization.  Grammar::

    model <name>
    even <name>[N] ...          # coordinates, optional index families
    odd <name>[N] ...
    param <name>: even|odd
    tensor <name>[N,M] = [[...], ...]
    lagrangian: <expr>

    expr   := term (('+'|'-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | atom
    atom   := NUMBER | 'i' | ref | 'dot' '(' ref ')' indexes?
            | 'sum' '(' NAME 'in' INT '..' INT ',' expr ')' | '(' expr ')'
    ref    := NAME indexes?
    indexes:= '[' (INT|NAME) (',' (INT|NAME))* ']'
    NUMBER := INT ('/' INT)?

'#' starts a comment running to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ModelSyntaxError

KEYWORDS = {"model", "even", "odd", "param", "tensor", "lagrangian",
            "sum", "dot", "in", "i"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<dots>\.\.)
  | (?P<sym>[][(),:*+=/-])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "int" | "name" | "sym" | "eof"
    text: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(chunk)
        elif kind == "dots":
            tokens.append(Token("sym", "..", line, col))
            col += 2
        else:
            tokens.append(Token(kind if kind != "sym" else "sym", chunk, line, col))
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------- AST nodes

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Ref:
    name: str
    indices: tuple = ()


@dataclass(frozen=True)
class Dot:
    name: str
    indices: tuple = ()


@dataclass(frozen=True)
class SumExpr:
    var: str
    lo: int
    hi: int
    body: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    item: object


@dataclass(frozen=True)
class CoordDecl:
    name: str
    parity: str  # "even" | "odd"
    size: int | None


@dataclass(frozen=True)
class ParamDecl:
    name: str
    parity: str


@dataclass(frozen=True)
class TensorDecl:
    name: str
    rows: int
    cols: int
    entries: tuple  # tuple of tuples of expression ASTs (constant)


@dataclass(frozen=True)
class ModelDocument:
    name: str
    declarations: tuple  # CoordDecl, in file order
    params: tuple  # ParamDecl
    tensors: tuple  # TensorDecl
    lagrangian: object


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def error(self, message):
        tok = self.current
        if tok.kind == "eof" and self.pos > 0:
            prev = self.tokens[self.pos - 1]
            return ModelSyntaxError(f"{message}, found end of input after "
                                    f"{prev.text!r}", prev.line, prev.col)
        return ModelSyntaxError(f"{message}, found {tok.text!r}", tok.line, tok.col)

    def accept(self, kind=None, text=None):
        tok = self.current
        if tok.kind == "eof":
            return None
        if kind is not None and tok.kind != kind:
            return None
        if text is not None and tok.text != text:
            return None
        self.pos += 1
        return tok

    def expect(self, kind=None, text=None, what=""):
        tok = self.accept(kind, text)
        if tok is None:
            raise self.error(f"expected {what or text or kind}")
        return tok

    # ------------------------------------------------------------- document

    def parse_document(self):
        self.expect("name", "model")
        name = self.expect("name", what="model name").text
        declarations = []
        params = []
        tensors = []
        lagrangian = None
        while self.current.kind != "eof":
            tok = self.current
            if tok.kind != "name":
                raise self.error("expected a declaration keyword")
            if tok.text in ("even", "odd"):
                self.pos += 1
                items = self.parse_decl_items(tok.text)
                if not items:
                    raise self.error("expected at least one name")
                declarations.extend(items)
            elif tok.text == "param":
                self.pos += 1
                pname = self.expect("name", what="parameter name").text
                self.expect("sym", ":")
                parity = self.expect("name", what="even or odd").text
                if parity not in ("even", "odd"):
                    raise self.error("parameter parity must be even or odd")
                params.append(ParamDecl(pname, parity))
            elif tok.text == "tensor":
                self.pos += 1
                tensors.append(self.parse_tensor())
            elif tok.text == "lagrangian":
                self.pos += 1
                self.expect("sym", ":")
                lagrangian = self.parse_expr()
            else:
                raise self.error("unknown declaration")
        if lagrangian is None:
            raise ModelSyntaxError("model has no lagrangian", 1, 1)
        return ModelDocument(name, tuple(declarations), tuple(params),
                             tuple(tensors), lagrangian)

    def parse_decl_items(self, parity):
        items = []
        while True:
            tok = self.current
            if tok.kind != "name" or tok.text in (
                    "even", "odd", "param", "tensor", "lagrangian"):
                break
            self.pos += 1
            size = None
            if self.accept("sym", "["):
                size = int(self.expect("int", what="family size").text)
                self.expect("sym", "]")
            items.append(CoordDecl(tok.text, parity, size))
        return items

    def parse_tensor(self):
        name = self.expect("name", what="tensor name").text
        self.expect("sym", "[")
        rows = int(self.expect("int", what="row count").text)
        self.expect("sym", ",")
        cols = int(self.expect("int", what="column count").text)
        self.expect("sym", "]")
        self.expect("sym", "=")
        self.expect("sym", "[")
        entries = []
        while True:
            self.expect("sym", "[")
            row = []
            while True:
                row.append(self.parse_expr())
                if not self.accept("sym", ","):
                    break
            self.expect("sym", "]")
            entries.append(tuple(row))
            if not self.accept("sym", ","):
                break
        self.expect("sym", "]")
        decl = TensorDecl(name, rows, cols, tuple(entries))
        if len(decl.entries) != rows or any(len(r) != cols for r in decl.entries):
            raise self.error(f"tensor {name} shape does not match [{rows},{cols}]")
        return decl

    # ---------------------------------------------------------- expressions

    def parse_expr(self):
        node = self.parse_term()
        while True:
            if self.accept("sym", "+"):
                node = Add(node, self.parse_term())
            elif self.accept("sym", "-"):
                node = Sub(node, self.parse_term())
            else:
                return node

    def parse_term(self):
        node = self.parse_unary()
        while self.accept("sym", "*"):
            node = Mul(node, self.parse_unary())
        return node

    def parse_unary(self):
        if self.accept("sym", "-"):
            return Neg(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self):
        tok = self.current
        if tok.kind == "int":
            self.pos += 1
            value = Fraction(int(tok.text))
            if self.accept("sym", "/"):
                den = self.expect("int", what="denominator").text
                value = value / int(den)
            return Num(value)
        if self.accept("sym", "("):
            node = self.parse_expr()
            self.expect("sym", ")")
            return node
        if tok.kind != "name":
            raise self.error("expected an expression")
        if tok.text == "i":
            self.pos += 1
            return Imag()
        if tok.text == "sum":
            self.pos += 1
            self.expect("sym", "(")
            var = self.expect("name", what="index variable").text
            self.expect("name", "in")
            lo = int(self.expect("int", what="range start").text)
            self.expect("sym", "..")
            hi = int(self.expect("int", what="range end").text)
            self.expect("sym", ",")
            body = self.parse_expr()
            self.expect("sym", ")")
            return SumExpr(var, lo, hi, body)
        if tok.text == "dot":
            self.pos += 1
            self.expect("sym", "(")
            name = self.expect("name", what="coordinate name").text
            inner = self.parse_indices()
            self.expect("sym", ")")
            outer = self.parse_indices()
            if inner and outer:
                raise self.error("dot() indexed both inside and outside")
            return Dot(name, inner or outer)
        self.pos += 1
        return Ref(tok.text, self.parse_indices())

    def parse_indices(self):
        if not self.accept("sym", "["):
            return ()
        indices = []
        while True:
            tok = self.current
            if tok.kind == "int":
                indices.append(int(tok.text))
                self.pos += 1
            elif tok.kind == "name":
                indices.append(tok.text)
                self.pos += 1
            else:
                raise self.error("expected an index")
            if not self.accept("sym", ","):
                break
        self.expect("sym", "]")
        return tuple(indices)


def parse_model(text):
    """Parse model source into a ModelDocument; errors carry line/column."""
    return _Parser(tokenize(text)).parse_document()


def parse_expression(text):
    """Parse a single expression (used by tests and config files)."""
    parser = _Parser(tokenize(text))
    node = parser.parse_expr()
    if parser.current.kind != "eof":
        raise parser.error("trailing input after expression")
    return node


# ------------------------------------------------------------ pretty print

def _index_str(indices):
    if not indices:
        return ""
    return "[" + ",".join(str(ix) for ix in indices) + "]"


def expr_source(node, prec=0):
    """Deterministic source form; parse(expr_source(x)) == x."""
    if isinstance(node, Num):
        value = node.value
        text = str(value)
        return text if prec < 3 or value.denominator == 1 else f"({text})"
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Ref):
        return node.name + _index_str(node.indices)
    if isinstance(node, Dot):
        return f"dot({node.name})" + _index_str(node.indices)
    if isinstance(node, SumExpr):
        return f"sum({node.var} in {node.lo}..{node.hi}, {expr_source(node.body)})"
    if isinstance(node, Add):
        text = f"{expr_source(node.left, 1)} + {expr_source(node.right, 2)}"
        return f"({text})" if prec >= 2 else text
    if isinstance(node, Sub):
        text = f"{expr_source(node.left, 1)} - {expr_source(node.right, 2)}"
        return f"({text})" if prec >= 2 else text
    if isinstance(node, Mul):
        text = f"{expr_source(node.left, 2)}*{expr_source(node.right, 3)}"
        return f"({text})" if prec >= 3 else text
    if isinstance(node, Neg):
        return f"-{expr_source(node.item, 3)}"
    raise TypeError(f"not an expression node: {node!r}")


def to_source(doc):
    """Regenerate model source; parsing it yields an equal document."""
    lines = [f"model {doc.name}"]
    for decl in doc.declarations:
        suffix = f"[{decl.size}]" if decl.size is not None else ""
        lines.append(f"{decl.parity} {decl.name}{suffix}")
    for param in doc.params:
        lines.append(f"param {param.name}: {param.parity}")
    for tensor in doc.tensors:
        rows = ",".join(
            "[" + ",".join(expr_source(entry) for entry in row) + "]"
            for row in tensor.entries)
        lines.append(f"tensor {tensor.name}[{tensor.rows},{tensor.cols}] = [{rows}]")
    lines.append(f"lagrangian: {expr_source(doc.lagrangian)}")
    return "\n".join(lines) + "\n"
