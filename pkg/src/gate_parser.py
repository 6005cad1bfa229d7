from sly import Parser
from sly.lex import Token
from sly.yacc import YaccProduction as Production

from errors import GateParseError
from gate_ast import GateAst
from gate_lexer import GateLexer


class GateParser(Parser):
    tokens = GateLexer.tokens

    precedence = (
        ('left', PLUS, MINUS),
        ('left', TIMES, DIVIDE),
        ('right', UNARY_MINUS),
    )

    start = 'document'

    def __init__(self):
        self.errors: list[str] = []

    @_('gate_file', 'gate_spec')
    def document(self, p: Production):
        return p[0]

    # ====== Gate file ======

    @_('header NEWLINE rows')
    def gate_file(self, p: Production) -> GateAst.GateFile:
        return GateAst.GateFile(header=p.header, rows=p.rows)

    # leading comment or blank lines fold into one NEWLINE in front of the header
    @_('NEWLINE header NEWLINE rows')
    def gate_file(self, p: Production) -> GateAst.GateFile:
        return GateAst.GateFile(header=p.header, rows=p.rows)

    @_('DIMS ":" dims_list')
    def header(self, p: Production) -> GateAst.Header:
        return GateAst.Header(dims=p.dims_list, lineno=p.lineno)

    @_('INTEGER')
    def dims_list(self, p: Production) -> list[int]:
        return [p[0]]

    @_('dims_list INTEGER')
    def dims_list(self, p: Production) -> list[int]:
        return p[0] + [p[1]]

    @_('row')
    def rows(self, p: Production) -> list[GateAst.Row]:
        return [p[0]]

    @_('rows row')
    def rows(self, p: Production) -> list[GateAst.Row]:
        return p[0] + [p[1]]

    @_('entries NEWLINE')
    def row(self, p: Production) -> GateAst.Row:
        return GateAst.Row(entries=p.entries, lineno=p.lineno)

    @_('entry')
    def entries(self, p: Production) -> list[GateAst.Expression]:
        return [p[0]]

    @_('entries entry')
    def entries(self, p: Production) -> list[GateAst.Expression]:
        return p[0] + [p[1]]

    @_('number')
    def entry(self, p: Production) -> GateAst.Expression:
        return p[0]

    @_('MINUS number', 'PLUS number')
    def entry(self, p: Production) -> GateAst.Expression:
        return GateAst.UnaryOp(operand=p[1], operator=p[0])

    @_('INTEGER', 'FLOAT', 'IMAG', 'COMPLEX')
    def number(self, p: Production) -> GateAst.Number:
        return GateAst.Number(value=p[0])

    # ====== Builtin spec: name(:argument)* ======

    @_('NAME')
    def gate_spec(self, p: Production) -> GateAst.GateSpec:
        return GateAst.GateSpec(name=p[0], arguments=[])

    @_('gate_spec ":" expression')
    def gate_spec(self, p: Production) -> GateAst.GateSpec:
        return GateAst.GateSpec(name=p[0].name, arguments=p[0].arguments + [p[2]])

    # ====== Expressions ======

    @_(
        'expression PLUS   expression',
        'expression MINUS  expression',
        'expression TIMES  expression',
        'expression DIVIDE expression',
    )
    def expression(self, p: Production) -> GateAst.Expression:
        return GateAst.BinOp(left=p[0], right=p[2], operator=p[1])

    @_('MINUS expression %prec UNARY_MINUS')
    def expression(self, p: Production) -> GateAst.Expression:
        return GateAst.UnaryOp(operand=p[1], operator=p[0])

    @_('"(" expression ")"')
    def expression(self, p: Production) -> GateAst.Expression:
        return p[1]

    @_('INTEGER', 'FLOAT', 'IMAG', 'COMPLEX')
    def expression(self, p: Production) -> GateAst.Expression:
        return GateAst.Number(value=p[0])

    @_('PI')
    def expression(self, p: Production) -> GateAst.Expression:
        return GateAst.Constant(name=p[0])

    @_('NAME')
    def expression(self, p: Production) -> GateAst.Expression:
        return GateAst.Identifier(name=p[0])

    def error(self, token: Token) -> None:
        if not token:
            self.errors.append("unexpected end of input")
            return
        self.errors.append(f"line {token.lineno}: unexpected {token.type} {token.value!r}")


def parse_gate_text(text: str) -> GateAst.Node:
    """Lex and parse a gate file or gate spec; raises GateParseError with every
    lexical and syntax message found."""
    lexer, parser = GateLexer(), GateParser()
    tree = parser.parse(lexer.tokenize(text))
    messages = lexer.errors + parser.errors
    if tree is None and not messages:
        messages.append("empty gate description")
    if messages:
        raise GateParseError(messages)
    return tree
