from dataclasses import fields

from gate_ast import GateAst


class NodeVisitor(object):

    def visit(self, node):
        method = "visit_" + node.__class__.__name__
        visitor = getattr(self, method, self.generic_visit)
        return visitor(node)

    def generic_visit(self, node):
        if isinstance(node, list):
            for elem in node:
                self.visit(elem)
            return
        for field in fields(node):
            child = getattr(node, field.name)
            if isinstance(child, list):
                for item in child:
                    if isinstance(item, GateAst.Node):
                        self.visit(item)
            elif isinstance(child, GateAst.Node):
                self.visit(child)
