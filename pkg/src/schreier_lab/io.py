"""JSON persistence for graphs, decorations and hierarchies."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from . import verify
from .decorators.common import Decoration, decoration_from_dict
from .errors import SchreierLabError
from .lattice import LatticeGraph, graph_from_dict


class MalformedInput(SchreierLabError):
    """A file that cannot be read back as a decoration."""


def write_atomic(path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
    return path


def save_decoration(path, g: LatticeGraph, dec: Decoration) -> Path:
    return write_atomic(path, dec.dumps(g) + "\n")


def load_decoration(path) -> tuple[LatticeGraph, Decoration]:
    try:
        doc = json.loads(Path(path).read_text())
        if doc.get("schema") != 1:
            raise MalformedInput(f"unsupported schema {doc.get('schema')!r}")
        g = graph_from_dict(doc["graph"])
        return g, decoration_from_dict(doc, g)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def check(g: LatticeGraph, dec: Decoration) -> verify.Report:
    """The checker matching a decoration's pipeline."""
    if dec.pipeline == "planar":
        return verify.check_balanced(g, dec.orientation)
    return verify.check_schreier(g, dec)
