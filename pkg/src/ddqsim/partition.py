"""Rank decomposition of states and gates.

With P = 2**M ranks, the statevector is cut into P equal slices: rank r
holds the sub-diagram reached by descending the top M levels along the
bits of r (most significant first).  The top M physical positions are the
global area (gates there need communication), the rest are local.
Gate unitaries decompose the same way into P x P block submatrices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Gate
from .dd import DDContext, Edge, StructureError, edge_qubits

LOCAL = "LOCAL"
GLOBAL = "GLOBAL"


@dataclass(frozen=True)
class PartitionPlan:
    """N qubits split into N-M local positions and M global positions."""

    n_qubits: int
    m_global: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("plan needs at least one qubit")
        if not 0 <= self.m_global <= self.n_qubits:
            raise ValueError(
                f"rank count 2**{self.m_global} must be between 1 and 2**{self.n_qubits}"
            )

    @property
    def ranks(self) -> int:
        return 1 << self.m_global

    @property
    def n_local(self) -> int:
        return self.n_qubits - self.m_global

    @staticmethod
    def for_ranks(n_qubits: int, ranks: int) -> "PartitionPlan":
        m = ranks.bit_length() - 1
        if ranks < 1 or (1 << m) != ranks:
            raise ValueError(f"rank count must be a power of two, got {ranks}")
        return PartitionPlan(n_qubits, m)


def split_state(ctx: DDContext, v: Edge, plan: PartitionPlan) -> list[Edge]:
    """Slice an N-qubit state into P sub-states of n_local qubits each."""
    if not v.is_zero and edge_qubits(v) != plan.n_qubits:
        raise StructureError(
            f"state covers {edge_qubits(v)} qubits, plan expects {plan.n_qubits}"
        )
    parts: list[Edge] = []
    for r in range(plan.ranks):
        w = v.w
        node = v.node
        for bitpos in range(plan.m_global - 1, -1, -1):
            if w == 0:
                break
            child = node.children[(r >> bitpos) & 1]
            w = w * child.w
            node = child.node
        parts.append(ctx.zero_edge if w == 0 else ctx.edge(w, node))
    return parts


def merge_state(ctx: DDContext, parts: list[Edge], plan: PartitionPlan) -> Edge:
    """Exact inverse of split_state: rebuild the top M levels over parts."""
    if len(parts) != plan.ranks:
        raise StructureError(f"expected {plan.ranks} parts, got {len(parts)}")
    for p in parts:
        if not p.is_zero and edge_qubits(p) != plan.n_local:
            raise StructureError(
                f"part covers {edge_qubits(p)} qubits, expected {plan.n_local}"
            )
    level = plan.n_local
    current = list(parts)
    while len(current) > 1:
        current = [
            ctx.make_vec_node(level, [current[i], current[i + 1]])
            for i in range(0, len(current), 2)
        ]
        level += 1
    return current[0]


def extract_block(ctx: DDContext, m: Edge, r: int, c: int, plan: PartitionPlan) -> Edge:
    """Block submatrix coupling source rank c to destination rank r.

    Descends M matrix levels choosing child 2*r_bit + c_bit, row bits from
    r and column bits from c, most significant first; all-zero blocks come
    back as the canonical zero edge.
    """
    if not 0 <= r < plan.ranks or not 0 <= c < plan.ranks:
        raise ValueError(f"block index ({r}, {c}) out of range for {plan.ranks} ranks")
    if not m.is_zero and edge_qubits(m) != plan.n_qubits:
        raise StructureError(
            f"matrix covers {edge_qubits(m)} qubits, plan expects {plan.n_qubits}"
        )
    w = m.w
    node = m.node
    for bitpos in range(plan.m_global - 1, -1, -1):
        if w == 0:
            break
        child = node.children[2 * ((r >> bitpos) & 1) + ((c >> bitpos) & 1)]
        w = w * child.w
        node = child.node
    return ctx.zero_edge if w == 0 else ctx.edge(w, node)


def classify_positions(positions: tuple[int, ...], plan: PartitionPlan) -> str:
    """LOCAL/GLOBAL for a gate already mapped to physical positions."""
    return GLOBAL if any(p >= plan.n_local for p in positions) else LOCAL


def classify_gate(g: Gate, plan: PartitionPlan, layout) -> str:
    """GLOBAL iff any layout-mapped target/control sits in the global area."""
    return classify_positions(tuple(layout.phys(q) for q in g.qubits), plan)
