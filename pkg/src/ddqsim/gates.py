"""Gate unitaries and their decision-diagram construction.

A gate on an N-qubit register is expressed as a short sum of product
operators (one 2x2 factor per touched position, identity elsewhere).
Each product term is a chain diagram of N nodes, and the terms are added
together, so even multi-controlled gates stay small: the controlled form
is identity + P1-on-controls (x) (U - I)-on-target.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Gate
from .dd import DDContext, Edge

_I2 = np.eye(2, dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def base_matrix(kind: str, params: tuple[float, ...]) -> np.ndarray:
    """2x2 unitary for a single-target gate kind."""
    if kind == "h":
        return np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)
    if kind == "x":
        return _X
    if kind == "y":
        return _Y
    if kind == "z":
        return _Z
    if kind == "s":
        return np.array([[1, 0], [0, 1j]], dtype=np.complex128)
    if kind == "t":
        return np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=np.complex128)
    if kind == "rx":
        th = params[0] / 2.0
        return np.array(
            [[math.cos(th), -1j * math.sin(th)], [-1j * math.sin(th), math.cos(th)]],
            dtype=np.complex128,
        )
    if kind == "rz":
        th = params[0] / 2.0
        return np.array([[np.exp(-1j * th), 0], [0, np.exp(1j * th)]], dtype=np.complex128)
    if kind == "u1":
        return np.array([[1, 0], [0, np.exp(1j * params[0])]], dtype=np.complex128)
    raise ValueError(f"no 2x2 matrix for gate kind {kind!r}")


def gate_terms(g: Gate) -> list[tuple[complex, dict[int, np.ndarray]]]:
    """Product-operator expansion of a gate over its touched positions.

    Returns (coefficient, {position: 2x2 factor}) terms; positions not
    listed carry the identity.  Summing the terms reproduces the gate's
    full unitary.
    """
    ctrl = {c: _P1 for c in g.controls}
    if g.kind == "swap":
        p, q = g.targets
        pairs = [(_I2, _I2), (_X, _X), (_Y, _Y), (_Z, _Z)]
        if not g.controls:
            return [(0.5, {p: a, q: b}) for a, b in pairs]
        terms: list[tuple[complex, dict[int, np.ndarray]]] = [(1.0, {})]
        terms.append((-0.5, dict(ctrl)))
        for a, b in pairs[1:]:
            terms.append((0.5, {**ctrl, p: a, q: b}))
        return terms
    u = base_matrix(g.kind, g.params)
    t = g.targets[0]
    if not g.controls:
        return [(1.0, {t: u})]
    return [(1.0, {}), (1.0, {**ctrl, t: u - _I2})]


def _chain(ctx: DDContext, n_qubits: int, factors: dict[int, np.ndarray], coeff: complex) -> Edge:
    """Chain diagram for coeff * (factor at each level, identity elsewhere)."""
    below = ctx.one_terminal
    for level in range(n_qubits):
        b = factors.get(level)
        if b is None:
            children = [below, ctx.zero_edge, ctx.zero_edge, below]
        else:
            children = [
                ctx.edge(complex(b[0, 0]) * below.w, below.node),
                ctx.edge(complex(b[0, 1]) * below.w, below.node),
                ctx.edge(complex(b[1, 0]) * below.w, below.node),
                ctx.edge(complex(b[1, 1]) * below.w, below.node),
            ]
        below = ctx.make_mat_node(level, children)
    return ctx.edge(coeff * below.w, below.node)


def gate_matrix_dd(ctx: DDContext, g: Gate, n_qubits: int) -> Edge:
    """Full-width matrix diagram for a gate at physical positions.

    The gate's targets/controls must already be physical positions below
    ``n_qubits``; every untouched level carries the identity.
    """
    if any(q >= n_qubits for q in g.qubits):
        raise ValueError(f"gate {g} does not fit in {n_qubits} qubits")
    acc: Edge | None = None
    for coeff, factors in gate_terms(g):
        term = _chain(ctx, n_qubits, factors, coeff)
        acc = term if acc is None else ctx.add(acc, term)
    return acc


class _GateDDCache:
    """Per-context memo of gate diagrams keyed by gate signature and width."""

    def __init__(self, ctx: DDContext):
        self.ctx = ctx
        self.memo: dict = {}

    def get(self, g: Gate, n_qubits: int) -> Edge:
        key = (g.kind, g.targets, g.controls, g.params, n_qubits)
        got = self.memo.get(key)
        if got is None:
            got = gate_matrix_dd(self.ctx, g, n_qubits)
            self.memo[key] = got
        return got

    def clear(self) -> None:
        self.memo.clear()
