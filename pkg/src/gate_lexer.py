from sly import Lexer
from sly.lex import Token

_REAL = r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?"


class GateLexer(Lexer):
    """Tokens of gate files ("dims: 2 2" plus rows of re+imj entries) and
    builtin gate specs such as ``deutsch:pi/4``."""
    keywords = {DIMS, PI}
    operators = {PLUS, MINUS, TIMES, DIVIDE}
    numbers = {COMPLEX, IMAG, FLOAT, INTEGER}

    tokens = {NAME, NEWLINE, *keywords, *operators, *numbers}

    literals = {":", "(", ")"}

    ignore = " \t\r"
    ignore_comment = r"\#.*"

    # Numbers go first so "1+2j" is one token and not INTEGER PLUS IMAG
    @_(rf"[-+]?{_REAL}[-+]{_REAL}j")
    def COMPLEX(self, token: Token) -> Token:
        token.value = complex(token.value)
        return token

    @_(rf"{_REAL}j")
    def IMAG(self, token: Token) -> Token:
        token.value = complex(token.value)
        return token

    @_(r"(\d+\.\d*|\.\d+)([eE][-+]?\d+)?", r"\d+[eE][-+]?\d+")
    def FLOAT(self, token: Token) -> Token:
        token.value = float(token.value)
        return token

    @_(r"\d+")
    def INTEGER(self, token: Token) -> Token:
        token.value = int(token.value)
        return token

    NAME = r"[a-zA-Z_][a-zA-Z0-9_]*"
    NAME["dims"] = DIMS
    NAME["pi"] = PI

    PLUS = r"\+"
    MINUS = r"-"
    TIMES = r"\*"
    DIVIDE = r"/"

    # rows are line based; blank and comment-only lines fold into one NEWLINE
    @_(r"\n(?:[ \t\r]*(?:\#[^\n]*)?\n)*[ \t\r]*")
    def NEWLINE(self, token: Token) -> Token:
        self.lineno += token.value.count("\n")
        return token

    def __init__(self):
        self.errors: list[str] = []

    def error(self, token: Token):
        self.errors.append(f"line {self.lineno}: illegal character {token.value[0]!r}")
        self.index += 1
