"""Tokenizer for the C subset. Comments and whitespace are skipped."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SyntaxErr, UnsupportedConstructError
from .nodes import Span

KEYWORDS = {
    "void", "char", "int", "long", "unsigned", "double", "struct",
    "if", "else", "for", "while", "return", "alloc",
}

# recognized so we can reject them with a named diagnostic
UNSUPPORTED_KEYWORDS = {
    "goto", "switch", "case", "default", "break", "continue", "do",
    "union", "enum", "typedef", "static", "const", "extern", "sizeof",
    "float", "short", "signed", "volatile", "register", "auto", "inline",
}

PUNCT = (
    "->", "++", "--", "+=", "-=", "*=", "/=", "%=", "^=", "&=", "|=",
    "==", "!=", "<=", ">=", "&&", "||",
    "+", "-", "*", "/", "%", "^", "&", "|", "<", ">", "=",
    "(", ")", "[", "]", "{", "}", ";", ",", ".",
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # 'ident', 'kw', 'int', 'float', 'punct', 'eof'
    text: str
    span: Span


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def span(length: int) -> Span:
        return Span(filename, line, col, length)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            if j == -1:
                break
            col += j - i
            i = j
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j == -1:
                raise SyntaxErr(span(2), "unterminated block comment")
            for k in range(i, j + 2):
                if source[k] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
            i = j + 2
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            is_float = False
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                is_float = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            if j < n and (source[j].isalpha() or source[j] == "_"):
                raise SyntaxErr(span(j - i + 1), f"malformed number '{source[i:j+1]}'")
            tokens.append(Token("float" if is_float else "int", text, span(j - i)))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            sp = span(j - i)
            if text in UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstructError(sp, f"unsupported construct '{text}'")
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, sp))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                tokens.append(Token("punct", p, span(len(p))))
                col += len(p)
                i += len(p)
                break
        else:
            raise SyntaxErr(span(1), f"unexpected character {ch!r}")

    tokens.append(Token("eof", "", Span(filename, line, col, 0)))
    return tokens
