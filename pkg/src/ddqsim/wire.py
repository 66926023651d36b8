"""Bit-exact wire encoding of vector decision diagrams.

Layout (little-endian throughout):

    magic   "DDQW" (4 bytes)
    version u16
    qubits  u16
    nodes   u32
    node records, bottom-up topological order, each:
        level u16
        per child (2): target u32 (earlier node ordinal, 0xFFFFFFFF = terminal)
                       weight re f64, weight im f64
    root edge: target u32, weight re f64, weight im f64

Weights travel at full double precision and are re-interned on receipt;
decoding rebuilds every node through canonical construction, so a decoded
diagram is canonically equal to the source within the value tolerance.
"""

from __future__ import annotations

import struct

from .dd import DDContext, Edge, edge_qubits

MAGIC = b"DDQW"
VERSION = 1
TERMINAL_ORDINAL = 0xFFFFFFFF

_HEADER = struct.Struct("<4sHHI")
_NODE = struct.Struct("<HIddIdd")
_ROOT = struct.Struct("<Idd")


class WireCapacityError(ValueError):
    """Node or qubit counts exceed the format's field widths."""


class WireDecodeError(ValueError):
    """Malformed wire bytes; the message names the failing byte offset."""


def serialize_dd(v: Edge) -> bytes:
    """Encode a vector diagram deterministically."""
    n_qubits = edge_qubits(v)
    if n_qubits > 0xFFFF:
        raise WireCapacityError(f"{n_qubits} qubits exceed the u16 width field")

    # Bottom-up topological order via iterative post-order DFS from the root.
    order: list = []
    ordinal: dict[int, int] = {}
    if v.node is not None:
        stack = [(v.node, False)]
        seen: set[int] = set()
        while stack:
            node, expanded = stack.pop()
            if expanded:
                ordinal[id(node)] = len(order)
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for child in reversed(node.children):
                if child.node is not None and id(child.node) not in seen:
                    stack.append((child.node, False))
    if len(order) >= TERMINAL_ORDINAL:
        raise WireCapacityError(f"{len(order)} nodes exceed the u32 ordinal field")

    out = [_HEADER.pack(MAGIC, VERSION, n_qubits, len(order))]
    for node in order:
        c0, c1 = node.children
        out.append(
            _NODE.pack(
                node.level,
                TERMINAL_ORDINAL if c0.node is None else ordinal[id(c0.node)],
                c0.w.real,
                c0.w.imag,
                TERMINAL_ORDINAL if c1.node is None else ordinal[id(c1.node)],
                c1.w.real,
                c1.w.imag,
            )
        )
    root_ord = TERMINAL_ORDINAL if v.node is None else ordinal[id(v.node)]
    out.append(_ROOT.pack(root_ord, v.w.real, v.w.imag))
    return b"".join(out)


def deserialize_dd(data: bytes, ctx: DDContext) -> Edge:
    """Rebuild a diagram into the receiving rank's tables."""
    if len(data) < _HEADER.size:
        raise WireDecodeError(f"truncated header at offset {len(data)}")
    magic, version, n_qubits, n_nodes = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise WireDecodeError(f"bad magic {magic!r} at offset 0")
    if version != VERSION:
        raise WireDecodeError(f"unsupported format version {version} at offset 4")
    offset = _HEADER.size
    expected = offset + n_nodes * _NODE.size + _ROOT.size
    if len(data) != expected:
        raise WireDecodeError(
            f"length {len(data)} does not match declared content ({expected}) at offset {offset}"
        )

    nodes: list[Edge] = []

    def child_edge(target: int, re: float, im: float, at: int) -> Edge:
        if target == TERMINAL_ORDINAL:
            return ctx.edge(complex(re, im), None)
        if target >= len(nodes):
            raise WireDecodeError(f"forward reference to node {target} at offset {at}")
        sub = nodes[target]
        return ctx.edge(complex(re, im) * sub.w, sub.node)

    for i in range(n_nodes):
        level, t0, re0, im0, t1, re1, im1 = _NODE.unpack_from(data, offset)
        e = ctx.make_vec_node(
            level,
            [child_edge(t0, re0, im0, offset + 2), child_edge(t1, re1, im1, offset + 22)],
        )
        nodes.append(e)
        offset += _NODE.size

    root_t, root_re, root_im = _ROOT.unpack_from(data, offset)
    root = child_edge(root_t, root_re, root_im, offset)
    if not root.is_zero and edge_qubits(root) != n_qubits:
        raise WireDecodeError(
            f"root spans {edge_qubits(root)} qubits but header declares {n_qubits} at offset {offset}"
        )
    return root
