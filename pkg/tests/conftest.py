"""Shared fixtures: the hand-built reference diagram and random circuits."""

from __future__ import annotations

import numpy as np
import pytest

from ddqsim.circuit import Circuit, Gate, cx
from ddqsim.dd import DDContext


def build_reference_vector(ctx: DDContext):
    """Hand-built 3-qubit diagram with shared nodes and a zero branch.

    Root edge weight 1/2 over children (1, A), (-1, B); A shares C twice,
    B has a zero branch; C = (1, 1) over terminals.  Dense form:
    (1/2) * [1, 1, 1, 1, -1, -1, 0, 0].
    """
    c = ctx.make_vec_node(0, [ctx.one_terminal, ctx.one_terminal])
    a = ctx.make_vec_node(1, [c, c])
    b = ctx.make_vec_node(1, [c, ctx.zero_edge])
    root = ctx.make_vec_node(2, [a, ctx.edge(-1.0, b.node)])
    return ctx.edge(0.5 * root.w, root.node)


ONE_QUBIT_KINDS = ("h", "x", "y", "z", "s", "t", "rx", "rz")


def random_circuit(n_qubits: int, n_gates: int, rng: np.random.Generator) -> Circuit:
    """Random circuit over the supported gate set."""
    gates = []
    for _ in range(n_gates):
        roll = rng.random()
        if roll < 0.55:
            kind = ONE_QUBIT_KINDS[rng.integers(len(ONE_QUBIT_KINDS))]
            params = (float(rng.uniform(0, 2 * np.pi)),) if kind in ("rx", "rz") else ()
            gates.append(Gate(kind, (int(rng.integers(n_qubits)),), (), params))
        elif roll < 0.8:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            gates.append(cx(int(a), int(b)))
        elif roll < 0.9:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            gates.append(Gate("swap", (int(a), int(b))))
        else:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            gates.append(Gate("u1", (int(a),), (int(b),), (float(rng.uniform(0, 2 * np.pi)),)))
    return Circuit(n_qubits, tuple(gates))


def random_state(ctx: DDContext, n_qubits: int, rng: np.random.Generator):
    """Random normalized dense vector and its diagram."""
    from ddqsim.dd import vec_from_dense

    vec = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    vec /= np.linalg.norm(vec)
    return vec, vec_from_dense(ctx, vec)


@pytest.fixture
def ctx() -> DDContext:
    return DDContext()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
