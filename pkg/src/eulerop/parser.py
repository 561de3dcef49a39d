"""Recursive-descent parser for the operator expression grammar.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' ['-'] uint)?
    atom   := 'x' | 'd' | 'D' | uint ('/' uint)? | ident | '(' expr ')'

Precedence: ^ over * over +/-.  No implicit multiplication.  '*' is
operator composition when a side is operator-valued and scalar
multiplication otherwise (the two agree inside the algebra).  D expands
to x*d.  A negative exponent is accepted on x only; 'd^-1' is a syntax
error.  Every canonical string printed by DiffOp/LaurentPoly parses
back to the same object.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeff import Field
from .errors import OperatorSyntaxError, UnknownParameter
from .opalg import DiffOp

_SINGLE = {"+": "plus", "-": "minus", "*": "star", "^": "caret",
           "(": "lparen", ")": "rparen", "/": "slash"}


@dataclass(frozen=True)
class Token:
    kind: str      # one of: x, d, D, uint, ident, plus, minus, star, caret, lparen, rparen, slash, end
    text: str
    line: int
    column: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    line = 1
    col = 1
    i = 0
    while i < len(src):
        ch = src[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, line, col))
            col += 1
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            tokens.append(Token("uint", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            kind = word if word in ("x", "d", "D") else "ident"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise OperatorSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], field: Field, var: str = "x"):
        self.tokens = tokens
        self.pos = 0
        self.field = field
        self.var = var

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise OperatorSyntaxError(
                f"unexpected {tok.kind or 'end of input'} {tok.text!r}",
                tok.line, tok.column, expected,
            )
        return self.advance()

    # expr := ['-'] term (('+'|'-') term)*
    def expr(self) -> DiffOp:
        if self.peek().kind == "minus":
            self.advance()
            value = -self.term()
        else:
            value = self.term()
        while self.peek().kind in ("plus", "minus"):
            op = self.advance()
            rhs = self.term()
            value = value + rhs if op.kind == "plus" else value - rhs
        return value

    # term := factor ('*' factor)*
    def term(self) -> DiffOp:
        value = self.factor()
        while self.peek().kind == "star":
            self.advance()
            value = value * self.factor()
        return value

    # factor := atom ('^' ['-'] uint)?
    def factor(self) -> DiffOp:
        base, is_x = self.atom()
        if self.peek().kind != "caret":
            return base
        self.advance()
        negative = False
        if self.peek().kind == "minus":
            neg_tok = self.advance()
            negative = True
        exp_tok = self.expect("uint", ("unsigned integer",))
        power = int(exp_tok.text)
        if negative:
            if not is_x:
                raise OperatorSyntaxError(
                    "negative exponent is only allowed on x",
                    neg_tok.line, neg_tok.column, ("unsigned integer",),
                )
            return DiffOp.x_power(self.field, -power, self.var)
        if is_x:
            return DiffOp.x_power(self.field, power, self.var)
        return base ** power

    # atom := 'x' | 'd' | 'D' | uint ('/' uint)? | ident | '(' expr ')'
    def atom(self) -> tuple[DiffOp, bool]:
        tok = self.peek()
        if tok.kind == "x":
            self.advance()
            return DiffOp.x_power(self.field, 1, self.var), True
        if tok.kind == "d":
            self.advance()
            return DiffOp.deriv(self.field, 1, self.var), False
        if tok.kind == "D":
            self.advance()
            return DiffOp.euler(self.field, self.var), False
        if tok.kind == "uint":
            self.advance()
            num = int(tok.text)
            if self.peek().kind == "slash":
                self.advance()
                den_tok = self.expect("uint", ("unsigned integer",))
                den = int(den_tok.text)
                if den == 0:
                    raise OperatorSyntaxError(
                        "zero denominator in rational literal",
                        den_tok.line, den_tok.column,
                    )
                return DiffOp.scalar(self.field, Fraction(num, den), self.var), False
            return DiffOp.scalar(self.field, num, self.var), False
        if tok.kind == "ident":
            self.advance()
            try:
                value = self.field.param(tok.text)
            except UnknownParameter:
                raise UnknownParameter(tok.text, tok.line, tok.column) from None
            return DiffOp.scalar(self.field, value, self.var), False
        if tok.kind == "lparen":
            self.advance()
            inner = self.expr()
            self.expect("rparen", (")",))
            return inner, False
        raise OperatorSyntaxError(
            f"unexpected {tok.kind or 'end of input'} {tok.text!r}",
            tok.line, tok.column,
            ("x", "d", "D", "unsigned integer", "identifier", "("),
        )


def parse_operator(src: str, field: Field, var: str = "x") -> DiffOp:
    """Parse an operator expression into normal-ordered form.

    Raises OperatorSyntaxError with line/column and the expected token
    set on malformed input, UnknownParameter for undeclared names.
    """
    parser = _Parser(tokenize(src), field, var)
    value = parser.expr()
    parser.expect("end", ("end of input",))
    return value
