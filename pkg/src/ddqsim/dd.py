"""Canonical QMDD vector and matrix decision diagrams.

A diagram is a DAG of Node objects reached through weighted Edges.  Vector
nodes have two children (index bit 0 / bit 1), matrix nodes have four
(child index = 2*row_bit + col_bit).  Qubit 0 is the least significant
index bit and sits at the bottom level; the root carries the most
significant bit.  All construction goes through a DDContext, which owns
the unique table, the compute cache and the value table for one rank.
Nodes and edges must never be mixed between contexts except through the
wire format.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Optional

import numpy as np

from .numerics import ValueTable


class StructureError(ValueError):
    """Raised for level/arity-inconsistent diagram construction."""


class Node:
    """One graph node of a decision diagram.

    ``children`` is a tuple of 2 Edges (vector) or 4 Edges (matrix).
    ``serial`` is a per-context creation counter used for deterministic
    cache keys; ``rc`` counts incoming references from stored nodes and is
    maintained by the unique table for reclamation.
    """

    __slots__ = ("level", "children", "serial", "rc")

    def __init__(self, level: int, children: tuple, serial: int):
        self.level = level
        self.children = children
        self.serial = serial
        self.rc = 0

    def __repr__(self):
        return f"Node(level={self.level}, arity={len(self.children)}, serial={self.serial})"


class Edge(NamedTuple):
    """Weighted reference to a node; ``node is None`` means the terminal."""

    w: complex
    node: Optional[Node]

    @property
    def is_zero(self) -> bool:
        return self.node is None and self.w == 0


def edge_qubits(e: Edge) -> int:
    """Number of qubits an edge spans (0 for terminal/zero edges)."""
    return 0 if e.node is None else e.node.level + 1


# Compute-cache operation tags.
_OP_ADD = 0
_OP_MUL = 1
_OP_KRON = 2


class ComputeCache:
    """Fixed-size memo table with overwrite-on-collision.

    Keys are tuples of small ints and canonical weights, so slot indices
    are deterministic across runs.  A hit always returns an edge whose
    expansion equals recomputation; losing entries to collisions is
    harmless.
    """

    __slots__ = ("size", "slots", "hits", "misses")

    def __init__(self, size: int = 1 << 16):
        self.size = size
        self.slots: list = [None] * size
        self.hits = 0
        self.misses = 0

    def get(self, key):
        entry = self.slots[hash(key) % self.size]
        if entry is not None and entry[0] == key:
            self.hits += 1
            return entry[1]
        self.misses += 1
        return None

    def put(self, key, value) -> None:
        self.slots[hash(key) % self.size] = (key, value)

    def clear(self) -> None:
        self.slots = [None] * self.size


class DDContext:
    """Owner of one rank's unique table, compute cache and value table."""

    def __init__(self, tol: float = 1e-12, cache_size: int = 1 << 16):
        self.values = ValueTable(tol)
        self.unique: dict = {}
        self.cache = ComputeCache(cache_size)
        self._serial = 0
        self.zero_edge = Edge(self.values.zero, None)
        self.one_terminal = Edge(self.values.one, None)

    # -- construction -----------------------------------------------------

    def edge(self, w: complex, node: Optional[Node]) -> Edge:
        """Build an edge with an interned weight; near-zero collapses."""
        z = complex(w)
        wc = self.values.intern(z.real, z.imag)
        if wc == 0:
            return self.zero_edge
        return Edge(wc, node)

    def _check_child(self, level: int, e: Edge) -> None:
        if e.node is None:
            if e.w != 0 and level != 0:
                raise StructureError(
                    f"non-zero terminal child under level {level}; diagrams must cover every level"
                )
        elif e.node.level != level - 1:
            raise StructureError(
                f"child level {e.node.level} under node level {level} (expected {level - 1})"
            )

    def _make_node(self, level: int, children: list[Edge]) -> Edge:
        """Normalize, intern and hash-cons a node; returns its edge."""
        interned: list[Edge] = []
        all_zero = True
        for c in children:
            ce = self.edge(c.w, c.node)
            if not ce.is_zero:
                all_zero = False
                self._check_child(level, ce)
            interned.append(ce)
        if all_zero:
            return self.zero_edge

        # Divide every child weight by the largest-magnitude child weight
        # (ties toward the lowest index); the divisor moves onto the edge.
        best = 0
        best_mag = -1.0
        for i, ce in enumerate(interned):
            mag = abs(ce.w)
            if mag > best_mag:
                best_mag = mag
                best = i
        divisor = interned[best].w
        stored: list[Edge] = []
        for i, ce in enumerate(interned):
            if ce.is_zero:
                stored.append(self.zero_edge)
            elif i == best:
                stored.append(Edge(self.values.one, ce.node))
            else:
                q = ce.w / divisor
                stored.append(self.edge(q, ce.node))

        key = (level,) + tuple((c.w, id(c.node)) for c in stored)
        node = self.unique.get(key)
        if node is None:
            self._serial += 1
            node = Node(level, tuple(stored), self._serial)
            for c in stored:
                if c.node is not None:
                    c.node.rc += 1
            self.unique[key] = node
        return self.edge(divisor, node)

    def make_vec_node(self, level: int, children: Iterable[Edge]) -> Edge:
        children = list(children)
        if len(children) != 2:
            raise StructureError(f"vector node needs 2 children, got {len(children)}")
        return self._make_node(level, children)

    def make_mat_node(self, level: int, children: Iterable[Edge]) -> Edge:
        children = list(children)
        if len(children) != 4:
            raise StructureError(f"matrix node needs 4 children, got {len(children)}")
        return self._make_node(level, children)

    # -- stock diagrams ----------------------------------------------------

    def zero_state(self, n_qubits: int) -> Edge:
        """The |0...0> state on n_qubits (scalar 1 for zero qubits)."""
        e = self.one_terminal
        for level in range(n_qubits):
            e = self.make_vec_node(level, [e, self.zero_edge])
        return e

    def identity_dd(self, n_qubits: int) -> Edge:
        e = self.one_terminal
        for level in range(n_qubits):
            e = self.make_mat_node(level, [e, self.zero_edge, self.zero_edge, e])
        return e

    # -- arithmetic ---------------------------------------------------------

    def add(self, a: Edge, b: Edge) -> Edge:
        """Pointwise sum of two diagrams of the same kind and level."""
        if not a.is_zero and not b.is_zero:
            an, bn = a.node, b.node
            if (an is None) != (bn is None):
                raise StructureError("add of terminal and non-terminal edges")
            if an is not None and (an.level != bn.level or len(an.children) != len(bn.children)):
                raise StructureError(
                    f"add level/arity mismatch: {an.level}/{len(an.children)} vs {bn.level}/{len(bn.children)}"
                )
        return self._add(a, b)

    def _add(self, a: Edge, b: Edge) -> Edge:
        wa, na = a
        wb, nb = b
        if wa == 0:
            return self.edge(wb, nb)
        if wb == 0:
            return self.edge(wa, na)
        if na is None and nb is None:
            return self.edge(wa + wb, None)
        if na is nb:
            return self.edge(wa + wb, na)
        if na is None or nb is None:
            raise StructureError("add of terminal and non-terminal edges")
        q = self.values.intern_complex(wb / wa)
        key = (_OP_ADD, na.serial, nb.serial, q)
        res = self.cache.get(key)
        if res is None:
            out = []
            for ca, cb in zip(na.children, nb.children):
                out.append(self._add(ca, Edge(q * cb.w, cb.node)))
            res = self._make_node(na.level, out)
            self.cache.put(key, res)
        return self.edge(wa * res.w, res.node)

    def multiply(self, m: Edge, v: Edge) -> Edge:
        """Matrix-vector product of a matrix diagram and a vector diagram."""
        if m.is_zero or v.is_zero:
            return self.zero_edge
        if edge_qubits(m) != edge_qubits(v):
            raise StructureError(
                f"multiply dimension mismatch: matrix covers {edge_qubits(m)} qubits, vector {edge_qubits(v)}"
            )
        return self._mul(m, v)

    def _mul(self, m: Edge, v: Edge) -> Edge:
        wm, mn = m
        wv, vn = v
        if wm == 0 or wv == 0:
            return self.zero_edge
        w = wm * wv
        if mn is None and vn is None:
            return self.edge(w, None)
        if mn is None or vn is None or mn.level != vn.level:
            raise StructureError("multiply level mismatch")
        key = (_OP_MUL, mn.serial, vn.serial)
        res = self.cache.get(key)
        if res is None:
            m0, m1, m2, m3 = mn.children
            v0, v1 = vn.children
            left = self._add(self._mul(m0, v0), self._mul(m1, v1))
            right = self._add(self._mul(m2, v0), self._mul(m3, v1))
            res = self.make_vec_node(mn.level, [left, right])
            self.cache.put(key, res)
        return self.edge(w * res.w, res.node)

    def kron(self, hi: Edge, lo: Edge) -> Edge:
        """Kronecker product with ``hi`` on the more significant qubits.

        Implemented by re-rooting hi's terminal-adjacent edges onto lo.
        """
        if hi.is_zero or lo.is_zero:
            return self.zero_edge
        if hi.node is None:
            return self.edge(hi.w * lo.w, lo.node)
        shift = edge_qubits(lo)
        lo_key = -1 if lo.node is None else lo.node.serial

        def rebuild(node: Node) -> Edge:
            key = (_OP_KRON, node.serial, lo_key, lo.w)
            res = self.cache.get(key)
            if res is not None:
                return res
            out = []
            for c in node.children:
                if c.w == 0:
                    out.append(self.zero_edge)
                elif c.node is None:
                    out.append(Edge(c.w * lo.w, lo.node))
                else:
                    sub = rebuild(c.node)
                    out.append(Edge(c.w * sub.w, sub.node))
            res = self._make_node(node.level + shift, out)
            self.cache.put(key, res)
            return res

        top = rebuild(hi.node)
        return self.edge(hi.w * top.w, top.node)

    # -- reclamation ---------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.unique)

    def reclaim(self, roots: Iterable[Edge]) -> int:
        """Free every stored node unreachable from ``roots``.

        Reference counts track incoming edges from stored nodes; roots get a
        temporary external reference.  Diagrams are acyclic, so iterated
        zero-count removal frees exactly the unreachable nodes.  The compute
        cache is cleared because it may reference freed nodes.
        """
        root_nodes = [r.node for r in roots if r.node is not None]
        for n in root_nodes:
            n.rc += 1
        dead = [node for node in self.unique.values() if node.rc == 0]
        freed = 0
        by_identity = {id(node): key for key, node in self.unique.items()}
        while dead:
            node = dead.pop()
            del self.unique[by_identity[id(node)]]
            freed += 1
            for c in node.children:
                if c.node is not None:
                    c.node.rc -= 1
                    if c.node.rc == 0:
                        dead.append(c.node)
        for n in root_nodes:
            n.rc -= 1
        self.cache.clear()
        return freed


# -- queries (context-free walks) ---------------------------------------------


def amplitude(v: Edge, index: str) -> complex:
    """Amplitude at a bitstring index, most significant bit first.

    Traces edges by index bits and multiplies the edge weights; a zero
    edge short-circuits to 0.
    """
    if len(index) != edge_qubits(v):
        raise ValueError(
            f"index length {len(index)} does not match state width {edge_qubits(v)}"
        )
    w = v.w
    node = v.node
    for bit in index:
        if w == 0:
            return complex(0.0)
        if bit not in "01":
            raise ValueError(f"index must be binary, got {index!r}")
        child = node.children[1 if bit == "1" else 0]
        w = w * child.w
        node = child.node
    return complex(0.0) if w == 0 else w


def squared_norm(v: Edge, memo: Optional[dict] = None) -> float:
    """Sum of |amplitude|^2 over all indices, by recursion with memoization."""
    if memo is None:
        memo = {}

    def node_norm(node: Optional[Node]) -> float:
        if node is None:
            return 1.0
        got = memo.get(node.serial)
        if got is not None:
            return got
        total = 0.0
        for c in node.children:
            if c.w != 0:
                total += (c.w.real * c.w.real + c.w.imag * c.w.imag) * node_norm(c.node)
        memo[node.serial] = total
        return total

    if v.is_zero:
        return 0.0
    return (v.w.real * v.w.real + v.w.imag * v.w.imag) * node_norm(v.node)


def reachable_nodes(roots: Iterable[Edge]) -> int:
    """Count distinct nodes reachable from the given edges."""
    seen: set[int] = set()
    stack = [r.node for r in roots if r.node is not None]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        for c in node.children:
            if c.node is not None and id(c.node) not in seen:
                stack.append(c.node)
    return len(seen)


def vec_to_dense(v: Edge, n_qubits: int) -> np.ndarray:
    """Expand a vector diagram to a dense complex vector of length 2**n."""
    if not v.is_zero and edge_qubits(v) != n_qubits:
        raise ValueError(f"edge spans {edge_qubits(v)} qubits, expected {n_qubits}")
    memo: dict[int, np.ndarray] = {}

    def expand(node: Optional[Node], levels: int) -> np.ndarray:
        if node is None:
            return np.ones(1, dtype=np.complex128)
        got = memo.get(node.serial)
        if got is None:
            half = 1 << (levels - 1)
            got = np.zeros(2 * half, dtype=np.complex128)
            for i, c in enumerate(node.children):
                if c.w != 0:
                    got[i * half:(i + 1) * half] = c.w * expand(c.node, levels - 1)
            memo[node.serial] = got
        return got

    if v.is_zero:
        return np.zeros(1 << n_qubits, dtype=np.complex128)
    return v.w * expand(v.node, n_qubits)


def mat_to_dense(m: Edge, n_qubits: int) -> np.ndarray:
    """Expand a matrix diagram to a dense 2**n by 2**n complex matrix."""
    if not m.is_zero and edge_qubits(m) != n_qubits:
        raise ValueError(f"edge spans {edge_qubits(m)} qubits, expected {n_qubits}")
    memo: dict[int, np.ndarray] = {}

    def expand(node: Optional[Node], levels: int) -> np.ndarray:
        if node is None:
            return np.ones((1, 1), dtype=np.complex128)
        got = memo.get(node.serial)
        if got is None:
            half = 1 << (levels - 1)
            got = np.zeros((2 * half, 2 * half), dtype=np.complex128)
            for i, c in enumerate(node.children):
                if c.w != 0:
                    r, col = divmod(i, 2)
                    got[r * half:(r + 1) * half, col * half:(col + 1) * half] = c.w * expand(
                        c.node, levels - 1
                    )
            memo[node.serial] = got
        return got

    size = 1 << n_qubits
    if m.is_zero:
        return np.zeros((size, size), dtype=np.complex128)
    return m.w * expand(m.node, n_qubits)


def vec_from_dense(ctx: DDContext, vec: np.ndarray) -> Edge:
    """Build a canonical vector diagram from a dense array (length 2**n)."""
    length = len(vec)
    n = length.bit_length() - 1
    if 1 << n != length:
        raise ValueError(f"dense vector length {length} is not a power of two")

    def build(offset: int, levels: int) -> Edge:
        if levels == 0:
            val = complex(vec[offset])
            return ctx.edge(val, None)
        half = 1 << (levels - 1)
        lo = build(offset, levels - 1)
        hi = build(offset + half, levels - 1)
        return ctx.make_vec_node(levels - 1, [lo, hi])

    return build(0, n)


def mat_from_dense(ctx: DDContext, mat: np.ndarray) -> Edge:
    """Build a canonical matrix diagram from a dense 2**n by 2**n array."""
    size = mat.shape[0]
    n = size.bit_length() - 1
    if 1 << n != size or mat.shape != (size, size):
        raise ValueError(f"dense matrix shape {mat.shape} is not square power-of-two")

    def build(r0: int, c0: int, levels: int) -> Edge:
        if levels == 0:
            return ctx.edge(complex(mat[r0, c0]), None)
        half = 1 << (levels - 1)
        children = [
            build(r0, c0, levels - 1),
            build(r0, c0 + half, levels - 1),
            build(r0 + half, c0, levels - 1),
            build(r0 + half, c0 + half, levels - 1),
        ]
        return ctx.make_mat_node(levels - 1, children)

    return build(0, 0, n)
