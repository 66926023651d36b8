"""Distributed simulation driver.

Each rank runs the same gate loop over its slice of the statevector:
local gates are a single diagram multiply, global gates go through the
block decomposition v'_r = sum_c w_rc * v_c under either the ring
(bucket-relay) or the broadcast schedule.  When swap insertion is on, a
global gate first triggers lookahead and a SWAP plan; the planned swaps
execute as ordinary gates and update the replicated layout, after which
the original gate is reclassified (usually local).

Collectives are the only synchronization between ranks; the coordinator
touches rank state only before the run (setup) and after it (queries,
sampling, merging).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuit import Circuit, Gate
from .dd import DDContext, Edge, amplitude, reachable_nodes, squared_norm, vec_to_dense
from .gates import _GateDDCache
from .partition import GLOBAL, PartitionPlan, classify_positions, extract_block
from .swaps import QubitLayout, lookahead_globals, plan_swaps_v1, plan_swaps_v2, remap_gate
from .transport import CommMetrics, InProcessFabric, RankEndpoint, SocketFabric
from .wire import deserialize_dd, serialize_dd

RING = "ring"
BCAST = "bcast"
SWAP_NONE = "none"
SWAP_V1 = "v1"
SWAP_V2 = "v2"


class RunError(RuntimeError):
    """A simulation run could not complete."""


@dataclass
class RunConfig:
    plan: PartitionPlan
    comm: str = RING
    swap_mode: str = SWAP_NONE
    seed: int = 0
    transport: str = "inproc"
    sequential: bool = False
    tol: float = 1e-12
    reclaim_watermark: int = 1 << 20
    skip_zero_blocks: bool = True
    track_history: bool = True
    materialize_identity_layout: bool = False
    timeout: Optional[float] = None

    def __post_init__(self):
        if self.comm not in (RING, BCAST):
            raise ValueError(f"comm must be {RING!r} or {BCAST!r}, got {self.comm!r}")
        if self.swap_mode not in (SWAP_NONE, SWAP_V1, SWAP_V2):
            raise ValueError(f"unknown swap mode {self.swap_mode!r}")
        if self.transport not in ("inproc", "socket"):
            raise ValueError(f"unknown transport {self.transport!r}")


@dataclass
class RankState:
    """One rank's slice: its tables, its sub-diagram, the shared layout."""

    rank: int
    ctx: DDContext
    state: Edge
    layout: QubitLayout
    metrics: CommMetrics


@dataclass
class RunResult:
    states: list[RankState]
    layout: QubitLayout
    metrics: list[CommMetrics]
    plan: PartitionPlan
    swaps_inserted: int = 0

    @property
    def global_applies(self) -> int:
        return self.metrics[0].global_applies

    @property
    def local_applies(self) -> int:
        return self.metrics[0].local_applies


class _RankWorker:
    """Per-rank execution of the gate loop; owns all rank-local state."""

    def __init__(self, endpoint: RankEndpoint, circuit: Circuit, cfg: RunConfig):
        self.ep = endpoint
        self.rank = endpoint.rank
        self.circuit = circuit
        self.cfg = cfg
        self.plan = cfg.plan
        self.ctx = DDContext(tol=cfg.tol)
        self.gate_dds = _GateDDCache(self.ctx)
        self.layout = QubitLayout(circuit.n_qubits)
        self.metrics = endpoint.metrics
        n_local = self.plan.n_local
        if self.rank == 0:
            self.state = self.ctx.zero_state(n_local)
        else:
            self.state = self.ctx.zero_edge

    # -- gate application --------------------------------------------------

    def apply_local(self, g: Gate) -> None:
        """Apply a gate whose physical positions are all in the local area."""
        m = self.gate_dds.get(g, self.plan.n_local)
        self.state = self.ctx.multiply(m, self.state)
        self.metrics.local_applies += 1

    def apply_global_ring(self, g: Gate) -> None:
        """Block multiply with bucket-relay payload rotation."""
        ctx = self.ctx
        plan = self.plan
        m = self.gate_dds.get(g, plan.n_qubits)
        block = extract_block(ctx, m, self.rank, self.rank, plan)
        acc = ctx.zero_edge
        if not (self.cfg.skip_zero_blocks and block.is_zero):
            acc = ctx.multiply(block, self.state)
        payload = serialize_dd(self.state)
        for t in range(1, plan.ranks):
            payload = self.ep.ring_shift(payload)
            src = (self.rank - t) % plan.ranks
            block = extract_block(ctx, m, self.rank, src, plan)
            if self.cfg.skip_zero_blocks and block.is_zero:
                continue
            incoming = deserialize_dd(payload, ctx)
            acc = ctx.add(acc, ctx.multiply(block, incoming))
        self.state = acc
        self.metrics.global_applies += 1

    def apply_global_bcast(self, g: Gate) -> None:
        """Block multiply with each rank broadcasting its slice in turn."""
        ctx = self.ctx
        plan = self.plan
        m = self.gate_dds.get(g, plan.n_qubits)
        before = self.state
        own_payload = serialize_dd(before)
        acc = ctx.zero_edge
        for k in range(plan.ranks):
            data = self.ep.broadcast_from(k, own_payload if k == self.rank else None)
            block = extract_block(ctx, m, self.rank, k, plan)
            if self.cfg.skip_zero_blocks and block.is_zero:
                continue
            part = before if k == self.rank else deserialize_dd(data, ctx)
            acc = ctx.add(acc, ctx.multiply(block, part))
        self.state = acc
        self.metrics.global_applies += 1

    def apply_physical(self, g: Gate) -> None:
        if classify_positions(g.qubits, self.plan) == GLOBAL:
            if self.cfg.comm == RING:
                self.apply_global_ring(g)
            else:
                self.apply_global_bcast(g)
        else:
            self.apply_local(g)

    # -- main loop -----------------------------------------------------------

    def run(self) -> RankState:
        cfg = self.cfg
        plan = self.plan
        planner = plan_swaps_v1 if cfg.swap_mode == SWAP_V1 else plan_swaps_v2
        for idx, g in enumerate(self.circuit.gates):
            phys = remap_gate(g, self.layout)
            if (
                cfg.swap_mode != SWAP_NONE
                and classify_positions(phys.qubits, plan) == GLOBAL
            ):
                next_global = lookahead_globals(self.circuit, idx, plan, self.layout)
                splan = planner(self.layout, next_global, plan)
                for p, q in splan.swaps:
                    self.apply_physical(Gate("swap", (p, q)))
                    self.layout.swap_physical(p, q)
                    self.metrics.swaps_inserted += 1
                phys = remap_gate(g, self.layout)
            self.apply_physical(phys)
            self._after_gate()
        if cfg.materialize_identity_layout and not self.layout.is_identity():
            self._restore_identity_layout()
        return RankState(self.rank, self.ctx, self.state, self.layout, self.metrics)

    def _restore_identity_layout(self) -> None:
        """Debug aid: execute the swaps that sort the layout back to identity."""
        for p in range(self.layout.n_qubits):
            if self.layout.logical(p) != p:
                src = self.layout.phys(p)
                self.apply_physical(Gate("swap", (p, src)))
                self.layout.swap_physical(p, src)

    def _after_gate(self) -> None:
        if self.cfg.track_history:
            self.metrics.norm_history.append(squared_norm(self.state))
            nodes = reachable_nodes([self.state])
            if nodes > self.metrics.peak_state_nodes:
                self.metrics.peak_state_nodes = nodes
        table = self.ctx.node_count
        if table > self.metrics.peak_table_nodes:
            self.metrics.peak_table_nodes = table
        if table > self.cfg.reclaim_watermark:
            self.ctx.reclaim([self.state])
            self.gate_dds.clear()


def run_circuit(circuit: Circuit, cfg: RunConfig) -> RunResult:
    """Simulate a circuit across cfg.plan.ranks simulated ranks."""
    plan = cfg.plan
    if circuit.n_qubits != plan.n_qubits:
        raise ValueError(
            f"circuit has {circuit.n_qubits} qubits but the plan expects {plan.n_qubits}"
        )
    if cfg.transport == "socket":
        if cfg.sequential:
            raise ValueError("the socket transport has no sequential mode")
        fabric = SocketFabric(plan.ranks)
    else:
        fabric = InProcessFabric(plan.ranks, sequential=cfg.sequential)
    metrics = [CommMetrics(rank=r) for r in range(plan.ranks)]
    workers = [
        _RankWorker(fabric.endpoint(r, metrics[r]), circuit, cfg)
        for r in range(plan.ranks)
    ]
    try:
        states = fabric.run(lambda r: workers[r].run(), timeout=cfg.timeout)
    finally:
        if cfg.transport == "socket":
            fabric.close()
    result = RunResult(
        states=states,
        layout=states[0].layout,
        metrics=metrics,
        plan=plan,
        swaps_inserted=metrics[0].swaps_inserted,
    )
    return result


# -- coordinator-side queries ---------------------------------------------------


def query_amplitude(result: RunResult, logical_index: str) -> complex:
    """Amplitude of a logical basis state, routed to the owning rank."""
    plan = result.plan
    n = plan.n_qubits
    if len(logical_index) != n:
        raise ValueError(f"index length {len(logical_index)} != {n} qubits")
    layout = result.layout
    phys_bits = ["0"] * n
    for q, bit in enumerate(reversed(logical_index)):  # logical_index is MSB-first
        phys_bits[layout.phys(q)] = bit
    rank = 0
    for p in range(n - 1, plan.n_local - 1, -1):
        rank = (rank << 1) | (phys_bits[p] == "1")
    local = "".join(phys_bits[p] for p in range(plan.n_local - 1, -1, -1))
    part = result.states[rank].state
    if part.is_zero:
        return complex(0.0)
    return amplitude(part, local)


def merged_dense(result: RunResult) -> np.ndarray:
    """Dense statevector in logical index order (through the layout)."""
    plan = result.plan
    slices = [
        vec_to_dense(rs.state, plan.n_local) if not rs.state.is_zero
        else np.zeros(1 << plan.n_local, dtype=np.complex128)
        for rs in result.states
    ]
    phys = np.concatenate(slices)
    perm = result.layout.perm
    idx = np.arange(1 << plan.n_qubits, dtype=np.int64)
    phys_index = np.zeros_like(idx)
    for q in range(plan.n_qubits):
        phys_index |= ((idx >> q) & 1) << perm[q]
    return phys[phys_index]


def total_norm(result: RunResult) -> float:
    return float(sum(squared_norm(rs.state) for rs in result.states))


def sample(result: RunResult, shots: int, seed: int) -> dict[str, int]:
    """Draw logical bitstring samples by probabilistic diagram descent.

    Rank is chosen from the per-slice norms gathered once; within a rank
    the walk descends by conditional per-node squared norms.  Output
    strings are logical, most significant qubit first.
    """
    plan = result.plan
    norms = [squared_norm(rs.state) for rs in result.states]
    total = sum(norms)
    if abs(total - 1.0) > 1e-6:
        raise RunError(f"state is not normalized (norm^2 = {total:.9f})")
    rng = np.random.default_rng(seed)
    probs = np.asarray(norms) / total
    memos = [dict() for _ in result.states]
    layout = result.layout
    n = plan.n_qubits
    counts: dict[str, int] = {}
    rank_draws = rng.choice(plan.ranks, size=shots, p=probs)
    for shot in range(shots):
        rank = int(rank_draws[shot])
        phys_bits = ["0"] * n
        for bitpos in range(plan.m_global):
            phys_bits[plan.n_qubits - 1 - bitpos] = "1" if (rank >> (plan.m_global - 1 - bitpos)) & 1 else "0"
        node = result.states[rank].state.node
        memo = memos[rank]
        for p in range(plan.n_local - 1, -1, -1):
            c0, c1 = node.children
            w0 = (c0.w.real ** 2 + c0.w.imag ** 2) * _node_norm(c0.node, memo)
            w1 = (c1.w.real ** 2 + c1.w.imag ** 2) * _node_norm(c1.node, memo)
            take_one = rng.random() * (w0 + w1) >= w0
            phys_bits[p] = "1" if take_one else "0"
            node = (c1 if take_one else c0).node
        logical = "".join(phys_bits[layout.phys(q)] for q in range(n - 1, -1, -1))
        counts[logical] = counts.get(logical, 0) + 1
    return counts


def _node_norm(node, memo) -> float:
    if node is None:
        return 1.0
    got = memo.get(node.serial)
    if got is not None:
        return got
    total = 0.0
    for c in node.children:
        if c.w != 0:
            total += (c.w.real ** 2 + c.w.imag ** 2) * _node_norm(c.node, memo)
    memo[node.serial] = total
    return total
