from dataclasses import dataclass
from typing import Literal

Operator = Literal["+", "-", "*", "/"]


class GateAst:

    @dataclass
    class Node:
        pass

    @dataclass
    class Expression(Node):
        pass

    @dataclass
    class Number(Expression):
        value: int | float | complex

    @dataclass
    class Constant(Expression):
        name: str

    @dataclass
    class Identifier(Expression):
        name: str

    @dataclass
    class BinOp(Expression):
        left: 'GateAst.Expression'
        right: 'GateAst.Expression'
        operator: Operator

    @dataclass
    class UnaryOp(Expression):
        operand: 'GateAst.Expression'
        operator: Operator

    @dataclass
    class Header(Node):
        dims: list[int]
        lineno: int

    @dataclass
    class Row(Node):
        entries: list['GateAst.Expression']
        lineno: int

    @dataclass
    class GateFile(Node):
        header: 'GateAst.Header'
        rows: list['GateAst.Row']

    @dataclass
    class GateSpec(Node):
        name: str
        arguments: list['GateAst.Expression']
