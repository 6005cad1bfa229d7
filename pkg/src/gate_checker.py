from math import prod
from typing import Literal

from errors import GateParseError
from gate_ast import GateAst
from visitor import NodeVisitor

Kind = Literal["int", "real", "complex"]

# name -> (min, max) argument count; None means unbounded
ARITY: dict[str, tuple[int, int | None]] = {
    "identity": (0, None),
    "swap": (0, 1),
    "fredkin": (0, 0),
    "toffoli": (0, 0),
    "deutsch": (1, 1),
    "gn": (2, 2),
    "h_d8": (0, 0),
    "h_u8": (0, 0),
    "diag": (8, 8),
}

# which arguments must be integers
INTEGER_ARGUMENTS = {"identity": None, "swap": {0}, "gn": {0}}

_RANK = {"int": 0, "real": 1, "complex": 2}


class GateChecker(NodeVisitor):
    """Semantic checks over a parsed gate description.

    Every problem is recorded; ``check`` raises one GateParseError listing all
    of them. Expression visits return the numeric kind of the value, or None
    when it is unknown.
    """

    def __init__(self):
        self.errors: list[str] = []

    def error(self, message: str) -> None:
        self.errors.append(message)

    def check(self, root: GateAst.Node) -> None:
        self.errors = []
        self.visit(root)
        if self.errors:
            raise GateParseError(self.errors)

    def visit_Header(self, node: GateAst.Header) -> bool:
        if not node.dims:
            self.error(f"line {node.lineno}: dims header lists no parties")
            return False
        bad = [d for d in node.dims if d < 1]
        if bad:
            self.error(f"line {node.lineno}: local dimensions must be positive, got {bad}")
            return False
        return True

    def visit_GateFile(self, node: GateAst.GateFile) -> None:
        if not self.visit(node.header):
            return

        dims = node.header.dims
        total = prod(dims)
        if len(node.rows) != total:
            self.error(f"expected {total} rows for dims {dims}, got {len(node.rows)}")
        for row in node.rows:
            if len(row.entries) != total:
                self.error(f"line {row.lineno}: expected {total} entries, got {len(row.entries)}")
            # rows have no visitor of their own; entries are checked one by one
            self.visit(row)

    def visit_GateSpec(self, node: GateAst.GateSpec) -> None:
        if node.name not in ARITY:
            self.error(f"unknown gate {node.name!r}; known gates: {', '.join(sorted(ARITY))}")
            return

        low, high = ARITY[node.name]
        count = len(node.arguments)
        if count < low or (high is not None and count > high):
            expected = str(low) if low == high else f"{low}..{'' if high is None else high}"
            self.error(f"{node.name} takes {expected} arguments, got {count}")

        integer_positions = INTEGER_ARGUMENTS.get(node.name, set())
        for position, argument in enumerate(node.arguments):
            kind = self.visit(argument)
            if kind is None:
                continue
            if kind == "complex":
                self.error(f"{node.name}: argument {position + 1} must be real")
            elif kind != "int" and (integer_positions is None or position in integer_positions):
                self.error(f"{node.name}: argument {position + 1} must be an integer")

    def visit_Number(self, node: GateAst.Number) -> Kind:
        if isinstance(node.value, complex):
            return "complex"
        return "int" if isinstance(node.value, int) else "real"

    def visit_Constant(self, node: GateAst.Constant) -> Kind:
        return "real"

    def visit_Identifier(self, node: GateAst.Identifier) -> None:
        self.error(f"unknown constant {node.name!r}")
        return None

    def visit_UnaryOp(self, node: GateAst.UnaryOp) -> Kind | None:
        return self.visit(node.operand)

    def visit_BinOp(self, node: GateAst.BinOp) -> Kind | None:
        left, right = self.visit(node.left), self.visit(node.right)
        if left is None or right is None:
            return None
        kind = left if _RANK[left] >= _RANK[right] else right
        if node.operator == "/" and kind == "int":
            return "real"
        return kind
