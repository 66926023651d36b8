"""Dense statevector reference simulator and fidelity checks.

This is the independent second route for every correctness claim: a
straightforward gate-by-gate dense simulation with no decision diagrams
involved.  Guarded at 24 qubits; beyond that the distributed engine runs
without verification.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate
from .gates import base_matrix

ORACLE_QUBIT_GUARD = 24

_DIAGONAL_KINDS = ("z", "s", "t", "rz", "u1")


class OracleCapacityError(ValueError):
    """Circuit exceeds the dense oracle's memory guard."""


class _BitMasks:
    """Cached per-qubit boolean masks over the index space."""

    def __init__(self, n: int):
        self.n = n
        self.idx = np.arange(1 << n, dtype=np.int64)
        self._bits: dict[int, np.ndarray] = {}

    def bit(self, q: int) -> np.ndarray:
        got = self._bits.get(q)
        if got is None:
            got = (self.idx >> q) & 1 == 1
            self._bits[q] = got
        return got

    def controls(self, controls: tuple[int, ...]) -> np.ndarray | None:
        if not controls:
            return None
        mask = self.bit(controls[0])
        for c in controls[1:]:
            mask = mask & self.bit(c)
        return mask


def apply_gate_dense(state: np.ndarray, g: Gate, n: int,
                     masks: _BitMasks | None = None) -> np.ndarray:
    """Apply one gate to a dense statevector (may modify in place)."""
    if masks is None:
        masks = _BitMasks(n)
    if g.kind in _DIAGONAL_KINDS:
        u = base_matrix(g.kind, g.params)
        d0, d1 = complex(u[0, 0]), complex(u[1, 1])
        t = g.targets[0]
        ctrl = masks.controls(g.controls)
        tbit = masks.bit(t)
        sel1 = tbit if ctrl is None else tbit & ctrl
        if d1 != 1.0:
            np.multiply(state, d1, out=state, where=sel1)
        if d0 != 1.0:
            sel0 = ~tbit if ctrl is None else ~tbit & ctrl
            np.multiply(state, d0, out=state, where=sel0)
        return state
    idx = masks.idx
    if g.kind == "x":
        t = g.targets[0]
        ctrl = masks.controls(g.controls)
        if ctrl is None:
            return state[idx ^ (1 << t)]
        sel = np.nonzero(ctrl)[0]
        out = state.copy()
        out[sel] = state[sel ^ (1 << t)]
        return out
    if g.kind == "swap":
        p, q = g.targets
        differ = masks.bit(p) ^ masks.bit(q)
        ctrl = masks.controls(g.controls)
        sel = np.nonzero(differ if ctrl is None else differ & ctrl)[0]
        out = state.copy()
        out[sel] = state[sel ^ ((1 << p) | (1 << q))]
        return out
    # generic single-target 2x2 (h, y, rx, and any controlled form)
    u = base_matrix(g.kind, g.params)
    t = g.targets[0]
    sel0 = ~masks.bit(t)
    ctrl = masks.controls(g.controls)
    if ctrl is not None:
        sel0 = sel0 & ctrl
    i0 = np.nonzero(sel0)[0]
    i1 = i0 | (1 << t)
    a, b = state[i0], state[i1]
    out = state if ctrl is None else state.copy()
    out[i0] = u[0, 0] * a + u[0, 1] * b
    out[i1] = u[1, 0] * a + u[1, 1] * b
    return out


def dense_oracle(circuit: Circuit, max_qubits: int = ORACLE_QUBIT_GUARD) -> np.ndarray:
    """Reference statevector after the whole circuit, |0...0> input."""
    n = circuit.n_qubits
    if n > max_qubits:
        raise OracleCapacityError(
            f"{n} qubits exceed the dense oracle guard of {max_qubits}"
        )
    state = np.zeros(1 << n, dtype=np.complex128)
    state[0] = 1.0
    masks = _BitMasks(n)
    for g in circuit.gates:
        state = apply_gate_dense(state, g, n, masks)
    return state


def fidelity_vec(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2 for two dense statevectors."""
    if a.shape != b.shape:
        raise ValueError(f"statevector shapes differ: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


def fidelity(result, oracle_vec: np.ndarray) -> float:
    """|<oracle|dd>|^2 via the merged logical amplitudes of a run result."""
    from .engine import merged_dense

    return fidelity_vec(oracle_vec, merged_dense(result))
