"""Reading and writing gates.

A gate file is UTF-8 text: a ``dims: d1 d2 ... dn`` header followed by
``total_dim`` rows of ``total_dim`` whitespace-separated ``re+imj`` entries.
``#`` starts a comment. A builtin gate is referenced by a spec string such as
``toffoli``, ``deutsch:pi/4``, ``gn:3:pi`` or ``diag:0:0:0:pi:0:pi:pi:pi``.
"""
import logging
import os
import tempfile
from pathlib import Path

from errors import GateParseError
from gate_ast import GateAst
from gate_builder import GateBuilder
from gate_checker import GateChecker
from gate_parser import parse_gate_text
from tensor_core import GateMatrix

logger = logging.getLogger(__name__)


def _build(tree: GateAst.Node, default_dims=None, tol: float | None = None) -> GateMatrix:
    GateChecker().check(tree)
    return GateBuilder(default_dims, tol).build(tree)


def parse_gate_spec(spec: str, default_dims=None, tol: float | None = None) -> GateMatrix:
    tree = parse_gate_text(spec.strip())
    if not isinstance(tree, GateAst.GateSpec):
        raise GateParseError([f"{spec!r} is not a builtin gate spec"])
    return _build(tree, default_dims, tol)


def loads_gate(text: str, tol: float | None = None) -> GateMatrix:
    if not text.endswith("\n"):
        text += "\n"
    tree = parse_gate_text(text)
    if not isinstance(tree, GateAst.GateFile):
        raise GateParseError(["gate file must start with a 'dims:' header"])
    return _build(tree, tol=tol)


def load_gate_file(path: str | os.PathLike, tol: float | None = None) -> GateMatrix:
    path = Path(path)
    logger.debug("loading gate file %s", path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise GateParseError([f"{path}: not valid UTF-8 (byte {e.start})"]) from e
    return loads_gate(text, tol)


def resolve_gate(reference: str, default_dims=None, tol: float | None = None) -> GateMatrix:
    """A path to an existing gate file, otherwise a builtin spec."""
    if Path(reference).is_file():
        return load_gate_file(reference, tol)
    return parse_gate_spec(reference, default_dims, tol)


def _format_entry(value: complex) -> str:
    return f"{value.real:.17g}{value.imag:+.17g}j"


def dumps_gate(gate: GateMatrix) -> str:
    lines = ["dims: " + " ".join(str(d) for d in gate.dims)]
    lines += [" ".join(_format_entry(complex(z)) for z in row) for row in gate.matrix]
    return "\n".join(lines) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Writes ``text`` to a sibling temporary file, then renames it over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def dump_gate_file(gate: GateMatrix, path: str | os.PathLike) -> None:
    write_atomic(path, dumps_gate(gate))
