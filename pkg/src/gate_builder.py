import logging

import numpy as np

import gate_catalog
from errors import ArgumentError
from gate_ast import GateAst
from settings import SETTINGS
from tensor_core import GateMatrix, SubsystemDims
from visitor import NodeVisitor

logger = logging.getLogger(__name__)


class GateBuilder(NodeVisitor):
    """Evaluates a checked gate description into a GateMatrix.

    ``default_dims`` is used by a bare ``identity``; unitarity is validated
    with ``tol`` when the matrix is wrapped.
    """

    def __init__(self, default_dims=None, tol: float | None = None):
        self.default_dims = default_dims
        self.tol = SETTINGS.unitary_tol if tol is None else tol

    def build(self, root: GateAst.Node) -> GateMatrix:
        return self.visit(root)

    def visit_GateFile(self, node: GateAst.GateFile) -> GateMatrix:
        dims = SubsystemDims(tuple(node.header.dims))
        matrix = np.array([[self.visit(entry) for entry in row.entries] for row in node.rows], dtype=np.complex128)
        logger.debug("gate file: dims %s, %d rows", dims.dims, len(node.rows))
        return GateMatrix(matrix, dims, self.tol)

    def visit_GateSpec(self, node: GateAst.GateSpec) -> GateMatrix:
        args = [self.visit(argument) for argument in node.arguments]
        logger.debug("builtin gate %s%s", node.name, args)
        match node.name:
            case "identity":
                dims = args or self.default_dims or gate_catalog.QUBITS3
                return gate_catalog.identity(dims)
            case "swap":
                return gate_catalog.swap(*args)
            case "fredkin":
                return gate_catalog.fredkin()
            case "toffoli":
                return gate_catalog.toffoli()
            case "deutsch":
                return gate_catalog.deutsch(*args)
            case "gn":
                return gate_catalog.g_n(*args)
            case "h_d8":
                return gate_catalog.h_d8()
            case "h_u8":
                return gate_catalog.h_u8()
            case "diag":
                return gate_catalog.diagonal_gate(gate_catalog.DiagonalParams(phis=tuple(args)))
            case _:
                raise ArgumentError(f"unknown gate {node.name!r}")

    def visit_Number(self, node: GateAst.Number):
        return node.value

    def visit_Constant(self, node: GateAst.Constant) -> float:
        return float(np.pi)

    def visit_UnaryOp(self, node: GateAst.UnaryOp):
        value = self.visit(node.operand)
        return -value if node.operator == "-" else value

    def visit_BinOp(self, node: GateAst.BinOp):
        left, right = self.visit(node.left), self.visit(node.right)
        match node.operator:
            case "+":
                return left + right
            case "-":
                return left - right
            case "*":
                return left * right
            case "/":
                if right == 0:
                    raise ArgumentError("division by zero in gate argument")
                return left / right
