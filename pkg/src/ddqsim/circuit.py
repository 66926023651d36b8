"""Circuit intermediate representation.

Gates name a base operation plus an explicit control list, so ``cx`` is X
with one control and ``ccu1`` is U1 with two.  Indices are logical qubits;
the engine remaps them to physical positions through the live layout.
Circuits are immutable: transformations build new ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# kind -> (number of parameters, number of target qubits)
GATE_KINDS = {
    "h": (0, 1),
    "x": (0, 1),
    "y": (0, 1),
    "z": (0, 1),
    "s": (0, 1),
    "t": (0, 1),
    "rx": (1, 1),
    "rz": (1, 1),
    "u1": (1, 1),
    "swap": (0, 2),
}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_params, n_targets = GATE_KINDS[self.kind]
        if len(self.params) != n_params:
            raise ValueError(f"{self.kind} takes {n_params} parameter(s), got {len(self.params)}")
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} takes {n_targets} target(s), got {len(self.targets)}")
        touched = self.targets + self.controls
        if len(set(touched)) != len(touched):
            raise ValueError(f"targets/controls overlap in {self}")
        if any(q < 0 for q in touched):
            raise ValueError(f"negative qubit index in {self}")

    @property
    def qubits(self) -> tuple[int, ...]:
        """Touched qubits, targets first then controls (declaration order)."""
        return self.targets + self.controls

    def remapped(self, positions: dict[int, int] | list[int]) -> "Gate":
        return Gate(
            self.kind,
            tuple(positions[q] for q in self.targets),
            tuple(positions[q] for q in self.controls),
            self.params,
        )

    def inverse(self) -> "Gate":
        """Inverse gate, for the self-inverse and rotation kinds."""
        if self.kind in ("h", "x", "y", "z", "swap"):
            return self
        if self.kind in ("rx", "rz", "u1"):
            return Gate(self.kind, self.targets, self.controls, (-self.params[0],))
        if self.kind == "s":
            return Gate("u1", self.targets, self.controls, (-1.5707963267948966,))
        if self.kind == "t":
            return Gate("u1", self.targets, self.controls, (-0.7853981633974483,))
        raise ValueError(f"no inverse rule for {self.kind}")


def gate(kind: str, *targets: int, controls: tuple[int, ...] = (), params: tuple[float, ...] = ()) -> Gate:
    return Gate(kind, tuple(targets), tuple(controls), tuple(params))


def cx(control: int, target: int) -> Gate:
    return Gate("x", (target,), (control,))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for g in self.gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise ValueError(f"gate {g} out of range for {self.n_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)
