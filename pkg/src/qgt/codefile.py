"""QGTCODE v1: a text container for built codes.

::

    QGTCODE v1 <basic|scqgt|combined>
    n 16
    d0 1
    ...
    BEGIN inner
    SCHEME identity
    QGTMAT v1 ...
    END inner
    BEGIN graph
    QGTEXP v1 ...
    END graph

Parameters come first as ``key value`` lines, then the embedded blocks.
Loading rebuilds each code from its parts and re-verifies the graph.
"""

from __future__ import annotations

import hashlib
from dataclasses import replace
from pathlib import Path

from .basic import BasicCode
from .combined import CombinedCode
from .expander import format_graph, parse_graph
from .linalg import FormatError
from .noiseless import format_code as format_inner
from .noiseless import parse_code as parse_inner
from .params import CodeParams
from .scqgt import build_scqgt

_PARAM_KEYS = ("n", "d0", "e", "k", "kappa", "delta", "lam")
_INT_KEYS = {"n", "d0", "k", "hadamard_log2"}


def _block(name: str, text: str) -> list[str]:
    return [f"BEGIN {name}", *text.rstrip("\n").splitlines(), f"END {name}"]


def format_codefile(code) -> str:
    if isinstance(code, BasicCode):
        kind, basic, graph = "basic", code, None
    elif isinstance(code, CombinedCode):
        kind, basic, graph = "combined", code.part_m, code.part_q.graph
    elif hasattr(code, "graph"):
        kind, basic, graph = "scqgt", None, code.graph
    else:
        raise TypeError(f"cannot serialize {type(code).__name__}")
    p = code.params
    lines = [f"QGTCODE v1 {kind}"]
    lines += [f"{key} {getattr(p, key)!r}" for key in _PARAM_KEYS]
    if basic is not None:
        lines.append(f"hadamard_log2 {basic.hadamard_log2}")
        lines += _block("inner", format_inner(basic.inner))
    if graph is not None:
        lines += _block("graph", format_graph(graph))
    return "\n".join(lines) + "\n"


def parse_codefile(text: str):
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) != 3 or head[:2] != ["QGTCODE", "v1"] or head[2] not in ("basic", "scqgt", "combined"):
        raise FormatError(f"bad QGTCODE header: {' '.join(head)!r}")
    kind = head[2]
    fields, blocks, current = {}, {}, None
    for ln in lines[1:]:
        if current is not None:
            if ln.strip() == f"END {current}":
                current = None
            else:
                blocks[current].append(ln)
        elif ln.startswith("BEGIN "):
            current = ln.split(maxsplit=1)[1].strip()
            blocks[current] = []
        elif ln.strip():
            key, _, value = ln.partition(" ")
            fields[key] = int(value) if key in _INT_KEYS else float(value)
    if current is not None:
        raise FormatError(f"unterminated block {current!r}")
    missing = [k for k in _PARAM_KEYS if k not in fields]
    if missing:
        raise FormatError(f"missing parameters: {missing}")
    params = CodeParams(**{k: fields[k] for k in _PARAM_KEYS})

    def need(name):
        if name not in blocks:
            raise FormatError(f"{kind} code needs a {name!r} block")
        return blocks[name]

    if kind in ("basic", "combined"):
        inner = parse_inner(need("inner"))
        m_params = params if kind == "basic" else replace(params, d0=params.k, kappa=params.lam)
        basic = BasicCode(m_params, inner, fields["hadamard_log2"])
    if kind == "basic":
        return basic
    part_q = build_scqgt(params, graph=parse_graph(need("graph")))
    return part_q if kind == "scqgt" else CombinedCode(params, basic, part_q)


def save_code(code, path) -> str:
    """Write the code file and return its SHA-256."""
    text = format_codefile(code)
    Path(path).write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def load_code(path):
    """Returns ``(code, sha256 of the file bytes)``."""
    data = Path(path).read_bytes()
    return parse_codefile(data.decode()), hashlib.sha256(data).hexdigest()
