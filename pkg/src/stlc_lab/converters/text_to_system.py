"""
Parser for the ``.ctrl`` text format.

A document is a block of ``key value`` lines::

    system brockett
    dim 3
    controls 2
    X0 = [0, 0, 0]
    X1 = [1, 0, -x2]
    X2 = [0, 1, x1]

with an optional ``x0 = [...]`` basepoint line. Expressions use rational
literals (``3``, ``3/2``, ``0.25``), the variables ``x1 .. xn``, ``+ - * ^``
with non-negative integer exponents, and parentheses. ``#`` starts a
comment. Every error is a ``ParseError`` carrying a 1-based line and column.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from ..core.errors import InputError, ParseError
from ..core.poly import Poly, PolyVectorField
from ..core.system import ControlSystem, validate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class Lexer:
    """Splits one expression into tokens; columns are absolute within the line."""

    grammar = [
        ("NUMBER", r"\d+\.\d+|\d+/\d+|\d+"),
        ("NAME", r"[A-Za-z_][A-Za-z_0-9]*"),
        ("PLUS", r"\+"),
        ("MINUS", r"-"),
        ("STAR", r"\*"),
        ("CARET", r"\^"),
        ("LPAREN", r"\("),
        ("RPAREN", r"\)"),
    ]
    regex = re.compile("|".join(f"(?P<{kind}>{pattern})" for kind, pattern in grammar))

    def __init__(self, text: str, line: int = 1, column: int = 1):
        self.text = text
        self.line = line
        self.column = column

    def tokenize(self) -> Iterator[Token]:
        index = 0
        while index < len(self.text):
            char = self.text[index]
            if char == "#":
                break
            if char.isspace():
                index += 1
                continue
            match = self.regex.match(self.text, index)
            if not match:
                raise ParseError(f"unexpected character {char!r}", self.line, self.column + index)
            yield Token(match.lastgroup, match.group(), self.line, self.column + index)
            index = match.end()
        yield Token("END", "", self.line, self.column + len(self.text))


class ExpressionParser:
    """
    Recursive descent over

        expr  = term (('+' | '-') term)*
        term  = unary ('*' unary)*
        unary = ('-' | '+') unary | power
        power = atom ('^' INTEGER)?
        atom  = NUMBER | VARIABLE | '(' expr ')'
    """

    def __init__(self, tokens: Iterator[Token], dim: int):
        self.tokens = tokens
        self.dim = dim
        self.current = next(tokens)

    def advance(self) -> Token:
        token = self.current
        self.current = next(self.tokens)
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.line, token.column)

    def parse(self) -> Poly:
        result = self.expr()
        if self.current.kind != "END":
            if self.current.kind == "RPAREN":
                raise self.error("unbalanced ')'")
            raise self.error(f"unexpected {self.current.text!r}")
        return result

    def expr(self) -> Poly:
        result = self.term()
        while self.current.kind in ("PLUS", "MINUS"):
            op = self.advance()
            right = self.term()
            result = result + right if op.kind == "PLUS" else result - right
        return result

    def term(self) -> Poly:
        result = self.unary()
        while self.current.kind == "STAR":
            self.advance()
            result = result * self.unary()
        return result

    def unary(self) -> Poly:
        if self.current.kind == "MINUS":
            self.advance()
            return -self.unary()
        if self.current.kind == "PLUS":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.current.kind != "CARET":
            return base
        self.advance()
        token = self.current
        if token.kind == "MINUS":
            raise self.error("negative exponents are not allowed")
        if token.kind != "NUMBER" or not token.text.isdigit():
            raise self.error("exponent must be a non-negative integer")
        self.advance()
        return base ** int(token.text)

    def atom(self) -> Poly:
        token = self.current
        if token.kind == "NUMBER":
            self.advance()
            try:
                value = Fraction(token.text)
            except ZeroDivisionError:
                raise self.error(f"division by zero in {token.text!r}", token) from None
            return Poly.constant(value, self.dim)
        if token.kind == "NAME":
            self.advance()
            match = re.fullmatch(r"x([1-9]\d*)", token.text)
            if not match or int(match.group(1)) > self.dim:
                if re.fullmatch(r"x\d+", token.text):
                    raise self.error(f"unknown variable {token.text}", token)
                raise self.error(f"unknown identifier {token.text!r}", token)
            return Poly.variable(int(match.group(1)) - 1, self.dim)
        if token.kind == "LPAREN":
            self.advance()
            inner = self.expr()
            if self.current.kind != "RPAREN":
                raise self.error("unbalanced '(': expected ')'", token)
            self.advance()
            return inner
        if token.kind == "END":
            raise self.error("unexpected end of expression")
        if token.kind == "RPAREN":
            raise self.error("unbalanced ')'")
        raise self.error(f"unexpected {token.text!r}")


def parse_poly(text: str, dim: int, line: int = 1, column: int = 1) -> Poly:
    """Parse one polynomial expression in the variables x1..x{dim}."""
    if dim < 1:
        raise ParseError(f"dimension must be positive, got {dim}", line, column)
    return ExpressionParser(Lexer(text, line, column).tokenize(), dim).parse()


_KEY_RE = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*)")


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    column: int


def _strip_comment(line: str) -> str:
    index = line.find("#")
    return line if index < 0 else line[:index]


def _split_list(entry: _Entry) -> List[Tuple[str, int]]:
    """Split ``[a, b, ...]`` at top-level commas into (text, column) pairs."""
    text = entry.value
    stripped = text.lstrip()
    offset = entry.column + len(text) - len(stripped)
    if not stripped.startswith("="):
        raise ParseError(f"expected '=' after {entry.key}", entry.line, offset)
    body = stripped[1:]
    offset += 1 + len(body) - len(body.lstrip())
    body = body.strip()
    if not body.startswith("["):
        raise ParseError(f"expected '[' after '{entry.key} ='", entry.line, offset)
    if not body.endswith("]"):
        raise ParseError("unterminated list: expected ']'", entry.line, offset + len(body))
    pieces: List[Tuple[int, int]] = []
    depth = 0
    start = 1
    for index, char in enumerate(body[1:-1], start=1):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char == "," and depth == 0:
            pieces.append((start, index))
            start = index + 1
    pieces.append((start, len(body) - 1))
    items: List[Tuple[str, int]] = []
    for begin, end in pieces:
        piece = body[begin:end]
        # columns point at the first character of the item, not its padding
        lead = len(piece) - len(piece.lstrip())
        items.append((piece[lead:], offset + begin + lead))
    if len(items) == 1 and not items[0][0].strip():
        return []
    return items


def _parse_int(entry: _Entry, minimum: int) -> int:
    text = entry.value.strip()
    column = entry.column + len(entry.value) - len(entry.value.lstrip())
    if not text.isdigit():
        raise ParseError(f"{entry.key} expects an integer, got {text!r}", entry.line, column)
    value = int(text)
    if value < minimum:
        raise ParseError(f"{entry.key} must be at least {minimum}, got {value}", entry.line, column)
    return value


def _entries(text: str) -> Dict[str, _Entry]:
    entries: Dict[str, _Entry] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        match = _KEY_RE.match(line)
        if not match:
            column = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected a key", number, column)
        key = match.group(1)
        if key in entries:
            raise ParseError(
                f"duplicate key '{key}' (first given at line {entries[key].line})",
                number,
                match.start(1) + 1,
            )
        entries[key] = _Entry(key, line[match.end(1):], number, match.end(1) + 1)
    return entries


def parse_system(text: str) -> ControlSystem:
    """Parse a ``.ctrl`` document into a validated ``ControlSystem``."""
    entries = _entries(text)
    last_line = max(len(text.splitlines()), 1)
    for key in ("system", "dim", "controls"):
        if key not in entries:
            raise ParseError(f"missing '{key}'", last_line, 1)

    head = entries.pop("system")
    name = head.value.strip()
    if not name:
        raise ParseError("missing system name", head.line, head.column)
    dim = _parse_int(entries.pop("dim"), 1)
    m = _parse_int(entries.pop("controls"), 0)

    basepoint = None
    if "x0" in entries:
        entry = entries.pop("x0")
        values = []
        items = _split_list(entry)
        if len(items) != dim:
            raise ParseError(
                f"x0 has {len(items)} coordinates, expected {dim}", entry.line, entry.column
            )
        for item, column in items:
            poly = parse_poly(item, dim, entry.line, column)
            if not poly.is_constant():
                raise ParseError("x0 coordinates must be numbers", entry.line, column)
            values.append(poly.constant_term())
        basepoint = tuple(values)

    fields: List[PolyVectorField] = []
    for index in range(m + 1):
        key = f"X{index}"
        if key not in entries:
            raise ParseError(f"missing field {key}", last_line, 1)
        entry = entries.pop(key)
        items = _split_list(entry)
        if len(items) != dim:
            raise ParseError(
                f"{key} has {len(items)} components, expected {dim}", entry.line, entry.column
            )
        fields.append(
            PolyVectorField(
                tuple(parse_poly(item, dim, entry.line, column) for item, column in items)
            )
        )

    for key, entry in sorted(entries.items(), key=lambda kv: kv[1].line):
        if re.fullmatch(r"X\d+", key):
            raise ParseError(
                f"unexpected field {key}: controls {m} declares X0..X{m}",
                entry.line,
                entry.column - len(key),
            )
        raise ParseError(f"unknown key '{key}'", entry.line, entry.column - len(key))

    sys = ControlSystem(name=name, dim=dim, m=m, fields=tuple(fields), basepoint=basepoint)
    result = validate(sys)
    if not result.passed:
        raise ParseError(f"invalid system: {result.summary}", head.line, 1)
    return sys


class TextToSystemConverter:
    """Reads ``.ctrl`` files."""

    def convert(self, path: Path) -> ControlSystem:
        if not path.exists():
            raise FileNotFoundError(f"System file not found: {path}")
        try:
            data = path.read_bytes()
        except OSError as e:
            raise InputError(f"Cannot read system file {path}: {e.strerror or e}") from e
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            line = data.count(b"\n", 0, e.start) + 1
            column = e.start - (data.rfind(b"\n", 0, e.start) + 1) + 1
            raise ParseError(f"invalid UTF-8 byte 0x{data[e.start]:02x}", line, column) from e
        sys = parse_system(text)
        logger.debug("Parsed %s from %s (n=%d, m=%d)", sys.name, path, sys.dim, sys.m)
        return sys
