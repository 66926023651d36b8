"""Qubit layout tracking and automatic SWAP planning.

When a gate lands in the global area, the engine looks ahead for the
qubits the circuit will touch soonest (they should stay local), derives
the set that can be parked in the global area, and plans SWAPs under one
of two strategies: v1 restores the original qubit order inside both areas
(more swaps, order-preserving), v2 exchanges exactly the qubits entering
and leaving the global area (minimum swaps, order-scrambling).
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate
from .partition import PartitionPlan


class QubitLayout:
    """Mutable bijection between logical qubits and physical positions."""

    __slots__ = ("perm", "inv")

    def __init__(self, n_qubits: int):
        self.perm = list(range(n_qubits))  # logical -> physical
        self.inv = list(range(n_qubits))   # physical -> logical

    @property
    def n_qubits(self) -> int:
        return len(self.perm)

    def phys(self, logical: int) -> int:
        return self.perm[logical]

    def logical(self, physical: int) -> int:
        return self.inv[physical]

    def swap_physical(self, p: int, q: int) -> None:
        """Exchange the logical qubits sitting at positions p and q."""
        a, b = self.inv[p], self.inv[q]
        self.inv[p], self.inv[q] = b, a
        self.perm[a], self.perm[b] = q, p

    def copy(self) -> "QubitLayout":
        out = QubitLayout.__new__(QubitLayout)
        out.perm = list(self.perm)
        out.inv = list(self.inv)
        return out

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    def __eq__(self, other) -> bool:
        return isinstance(other, QubitLayout) and self.perm == other.perm

    def __repr__(self) -> str:
        return f"QubitLayout(inv={self.inv})"


@dataclass(frozen=True)
class SwapPlan:
    """Ordered physical-position transpositions and the layout they reach."""

    swaps: tuple[tuple[int, int], ...]
    result: QubitLayout

    def __len__(self) -> int:
        return len(self.swaps)


def remap_gate(g: Gate, layout: QubitLayout) -> Gate:
    """Translate a gate's logical indices to physical positions."""
    return g.remapped(layout.perm)


def lookahead_globals(
    circuit: Circuit, from_gate: int, plan: PartitionPlan, layout: QubitLayout
) -> set[int]:
    """Choose the M logical qubits to park in the global area.

    Scans gates forward from ``from_gate`` (inclusive), collecting touched
    qubits in first-use order (targets before controls) until the local
    set is full.  If the circuit ends short, the set is padded with
    currently-local qubits in ascending physical position.  Returns the
    complement: the qubits the upcoming gates need last.
    """
    n_local = plan.n_local
    next_local: dict[int, None] = {}
    for g in circuit.gates[from_gate:]:
        for q in g.qubits:
            if q not in next_local:
                next_local[q] = None
                if len(next_local) == n_local:
                    break
        if len(next_local) == n_local:
            break
    if len(next_local) < n_local:
        for p in range(plan.n_qubits):
            q = layout.logical(p)
            if q not in next_local:
                next_local[q] = None
                if len(next_local) == n_local:
                    break
    return set(range(circuit.n_qubits)) - set(next_local)


def plan_swaps_v1(layout: QubitLayout, next_global: set[int], plan: PartitionPlan) -> SwapPlan:
    """Order-preserving plan: both areas end up sorted by original index.

    The target order is all non-global qubits ascending, then the global
    set ascending.  Positions are scanned front to back; wherever the
    current qubit differs from the target, the target qubit is swapped in
    from wherever it currently sits.
    """
    if len(next_global) != plan.m_global:
        raise ValueError(f"need exactly {plan.m_global} global qubits, got {len(next_global)}")
    n = layout.n_qubits
    target = sorted(q for q in range(n) if q not in next_global) + sorted(next_global)
    work = layout.copy()
    swaps: list[tuple[int, int]] = []
    for p in range(n):
        want = target[p]
        if work.logical(p) != want:
            src = work.phys(want)
            swaps.append((p, src))
            work.swap_physical(p, src)
    return SwapPlan(tuple(swaps), work)


def plan_swaps_v2(layout: QubitLayout, next_global: set[int], plan: PartitionPlan) -> SwapPlan:
    """Minimum plan: swap each incoming global qubit with an outgoing one.

    Outgoing = currently global but no longer wanted there; incoming =
    wanted global but currently local.  Both sides are sorted by original
    index and paired positionally, one SWAP per pair.
    """
    if len(next_global) != plan.m_global:
        raise ValueError(f"need exactly {plan.m_global} global qubits, got {len(next_global)}")
    n_local = plan.n_local
    current_global = {layout.logical(p) for p in range(n_local, layout.n_qubits)}
    outgoing = sorted(current_global - next_global)
    incoming = sorted(next_global - current_global)
    work = layout.copy()
    swaps: list[tuple[int, int]] = []
    for q_in, q_out in zip(incoming, outgoing):
        pair = (work.phys(q_in), work.phys(q_out))
        swaps.append(pair)
        work.swap_physical(*pair)
    return SwapPlan(tuple(swaps), work)
