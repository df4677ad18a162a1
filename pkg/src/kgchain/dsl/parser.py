"""Hand-rolled tokenizer and recursive-descent parser for KGQL.

Grammar, bit-exact:

    program   := statement+ EOF
    statement := OPCODE arglist? ";"
    arglist   := "(" STRING ("," STRING)* ")"

Opcode names are uppercase identifiers; argument count must match the
opcode arity (zero-arity opcodes take no parentheses).  Strings are
double-quoted with exactly two escapes, ``\\"`` and ``\\\\``; a raw
newline inside a string is an error.  Whitespace and newlines between
tokens are free; there are no comments.  Structural rules (program
starts with START, ends with its single RETURN, at most 32
instructions) are enforced here as parse-level errors.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DslParseError
from .program import ARITY, MAX_PROGRAM_LENGTH, DslProgram, Instruction


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT | STRING | LPAREN | RPAREN | COMMA | SEMI | EOF
    value: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        start_line, start_col = line, col
        if ch == "(":
            tokens.append(_Token("LPAREN", "(", line, col))
            i += 1
            col += 1
        elif ch == ")":
            tokens.append(_Token("RPAREN", ")", line, col))
            i += 1
            col += 1
        elif ch == ",":
            tokens.append(_Token("COMMA", ",", line, col))
            i += 1
            col += 1
        elif ch == ";":
            tokens.append(_Token("SEMI", ";", line, col))
            i += 1
            col += 1
        elif ch == '"':
            i += 1
            col += 1
            buf: list[str] = []
            closed = False
            while i < n:
                c = source[i]
                if c == "\n":
                    raise DslParseError("unterminated string literal", start_line, start_col, expected='closing `"`')
                if c == "\\":
                    if i + 1 >= n:
                        raise DslParseError("dangling escape at end of input", line, col, expected='`\\"` or `\\\\`')
                    nxt = source[i + 1]
                    if nxt not in ('"', "\\"):
                        raise DslParseError(f"invalid escape sequence \\{nxt}", line, col, expected='`\\"` or `\\\\`')
                    buf.append(nxt)
                    i += 2
                    col += 2
                    continue
                if c == '"':
                    closed = True
                    i += 1
                    col += 1
                    break
                buf.append(c)
                i += 1
                col += 1
            if not closed:
                raise DslParseError("unterminated string literal", start_line, start_col, expected='closing `"`')
            tokens.append(_Token("STRING", "".join(buf), start_line, start_col))
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            tokens.append(_Token("IDENT", word, line, col))
            col += j - i
            i = j
        else:
            raise DslParseError(f"unexpected character {ch!r}", line, col, expected="an opcode")
    tokens.append(_Token("EOF", "", line, col))
    return tokens


_OPCODE_LIST = ", ".join(ARITY)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _expect(self, kind: str, expected: str) -> _Token:
        tok = self._peek()
        if tok.kind != kind:
            got = tok.value or tok.kind
            raise DslParseError(f"unexpected {got!r}", tok.line, tok.col, expected=expected)
        return self._advance()

    def parse_statement(self) -> Instruction:
        tok = self._expect("IDENT", f"one of {_OPCODE_LIST}")
        opcode = tok.value
        if opcode not in ARITY:
            if opcode.upper() in ARITY:
                raise DslParseError(
                    f"unknown opcode {opcode!r} (opcodes are uppercase)", tok.line, tok.col, expected=opcode.upper()
                )
            raise DslParseError(f"unknown opcode {opcode!r}", tok.line, tok.col, expected=f"one of {_OPCODE_LIST}")
        arity = ARITY[opcode]
        args: list[str] = []
        if arity == 0:
            self._expect("SEMI", "`;`")
            return Instruction(opcode)
        self._expect("LPAREN", "`(`")
        args.append(self._expect("STRING", "a double-quoted string").value)
        while self._peek().kind == "COMMA":
            self._advance()
            args.append(self._expect("STRING", "a double-quoted string").value)
        close = self._expect("RPAREN", "`)`")
        if len(args) != arity:
            raise DslParseError(
                f"{opcode} takes {arity} argument(s), got {len(args)}", close.line, close.col,
                expected=f"{arity} argument(s)",
            )
        self._expect("SEMI", "`;`")
        return Instruction(opcode, tuple(args))


def parse(source: str) -> DslProgram:
    """Parse program text; structural violations are parse errors."""
    tokens = _tokenize(source)
    parser = _Parser(tokens)
    instructions: list[Instruction] = []
    positions: list[_Token] = []
    while parser._peek().kind != "EOF":
        positions.append(parser._peek())
        instructions.append(parser.parse_statement())
        if len(instructions) > MAX_PROGRAM_LENGTH:
            tok = positions[-1]
            raise DslParseError(
                f"program exceeds the {MAX_PROGRAM_LENGTH}-instruction budget", tok.line, tok.col,
                expected="RETURN",
            )

    eof = parser._peek()
    if not instructions:
        raise DslParseError("empty program", eof.line, eof.col, expected="START")
    if instructions[0].opcode != "START":
        tok = positions[0]
        raise DslParseError("program must begin with START", tok.line, tok.col, expected="START")
    returns = [i for i, ins in enumerate(instructions) if ins.opcode == "RETURN"]
    if not returns:
        raise DslParseError("program must end with RETURN", eof.line, eof.col, expected="RETURN")
    if len(returns) > 1:
        tok = positions[returns[1]]
        raise DslParseError("program must contain exactly one RETURN", tok.line, tok.col, expected="end of program")
    if returns[0] != len(instructions) - 1:
        tok = positions[returns[0] + 1]
        raise DslParseError("RETURN must be the last instruction", tok.line, tok.col, expected="end of program")
    return DslProgram(tuple(instructions), source)
