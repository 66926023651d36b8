"""Benchmark circuit generators: layered random circuits and order finding.

The order-finding circuit uses 4n+2 qubits for an n-bit modulus: a 2n
counting register on top, an n-qubit multiplication register, and n+2
ancillas (an n+1 wide Fourier-space accumulator plus one comparison
ancilla).  Controlled modular multiplication is built from constant
adders in Fourier space, so phase gates with up to two controls carry
almost all of the work.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Gate, cx


def gen_qcbm(n_qubits: int, layers: int, seed: int) -> Circuit:
    """Layered random circuit: RZ/RX/RZ columns then a wrap-around CX ring.

    Every rotation draws a fresh angle uniform in [0, 2*pi) from the
    seeded generator, so identical arguments give identical circuits.
    """
    if n_qubits < 2:
        raise ValueError("qcbm needs at least 2 qubits")
    if layers < 1:
        raise ValueError("qcbm needs at least 1 layer")
    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for _ in range(layers):
        for kind in ("rz", "rx", "rz"):
            for q in range(n_qubits):
                gates.append(Gate(kind, (q,), (), (float(rng.uniform(0.0, 2.0 * math.pi)),)))
        for q in range(n_qubits):
            gates.append(cx(q, (q + 1) % n_qubits))
    return Circuit(n_qubits, tuple(gates))


# -- order finding ---------------------------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _is_prime_power(n: int) -> bool:
    for k in range(2, n.bit_length() + 1):
        root = round(n ** (1.0 / k))
        for cand in (root - 1, root, root + 1):
            if cand >= 2 and cand ** k == n:
                return True
    return False


def validate_shor_inputs(number: int, base: int) -> None:
    if number < 9:
        raise ValueError(f"{number} is too small to factor quantumly")
    if number % 2 == 0:
        raise ValueError(f"{number} is even; factor out 2 classically")
    if _is_prime(number):
        raise ValueError(f"{number} is prime")
    if _is_prime_power(number):
        raise ValueError(f"{number} is a prime power; use classical root extraction")
    if not 1 < base < number:
        raise ValueError(f"base {base} out of range for modulus {number}")
    if math.gcd(base, number) != 1:
        raise ValueError(f"gcd({base}, {number}) > 1; already a factor")


def default_shor_base(number: int) -> int:
    """Smallest coprime base >= 2."""
    if number < 3:
        raise ValueError(f"no valid base for modulus {number}")
    base = 2
    while math.gcd(base, number) != 1:
        base += 1
    return base


class _Builder:
    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.gates: list[Gate] = []

    def add(self, g: Gate) -> None:
        self.gates.append(g)

    def u1(self, angle: float, target: int, controls: tuple[int, ...] = ()) -> None:
        angle = math.remainder(angle, 2.0 * math.pi)
        if angle != 0.0:
            self.add(Gate("u1", (target,), controls, (angle,)))

    def qft(self, qubits: list[int], swaps: bool = False) -> None:
        """QFT over ``qubits`` (LSB first), optionally with reversal swaps."""
        m = len(qubits)
        for i in range(m - 1, -1, -1):
            self.add(Gate("h", (qubits[i],)))
            for j in range(i - 1, -1, -1):
                self.u1(math.pi / (1 << (i - j)), qubits[i], (qubits[j],))
        if swaps:
            for i in range(m // 2):
                self.add(Gate("swap", (qubits[i], qubits[m - 1 - i])))

    def iqft(self, qubits: list[int], swaps: bool = False) -> None:
        """Inverse of qft() built by reversing and negating it."""
        if swaps:
            for i in reversed(range(len(qubits) // 2)):
                self.add(Gate("swap", (qubits[i], qubits[len(qubits) - 1 - i])))
        m = len(qubits)
        for i in range(m):
            for j in range(i):
                self.u1(-math.pi / (1 << (i - j)), qubits[i], (qubits[j],))
            self.add(Gate("h", (qubits[i],)))

    def phi_add(self, value: int, qubits: list[int], controls: tuple[int, ...] = (),
                sign: int = 1) -> None:
        """Add a classical constant to a Fourier-space register.

        One phase rotation per register qubit; ``sign=-1`` subtracts.  The
        angle indexing matches qft() without reversal swaps.
        """
        for k, q in enumerate(qubits):
            self.u1(sign * 2.0 * math.pi * value / (1 << (k + 1)), q, controls)


def _cc_phi_add_mod(b: _Builder, value: int, modulus: int, reg: list[int],
                    anc: int, controls: tuple[int, int]) -> None:
    """Doubly-controlled modular constant adder on a Fourier-space register.

    reg holds n+1 qubits in Fourier space; anc is a clean ancilla used to
    detect underflow, restored to |0> at the end.
    """
    msb = reg[-1]
    b.phi_add(value, reg, controls)
    b.phi_add(modulus, reg, (), sign=-1)
    b.iqft(reg)
    b.add(cx(msb, anc))
    b.qft(reg)
    b.phi_add(modulus, reg, (anc,))
    b.phi_add(value, reg, controls, sign=-1)
    b.iqft(reg)
    b.add(Gate("x", (msb,)))
    b.add(cx(msb, anc))
    b.add(Gate("x", (msb,)))
    b.qft(reg)
    b.phi_add(value, reg, controls)


def _c_mult_mod(b: _Builder, factor: int, modulus: int, control: int,
                xreg: list[int], breg: list[int], anc: int) -> None:
    """Controlled b += factor * x (mod modulus), b entering and leaving |0..0>-based."""
    b.qft(breg)
    for j, xq in enumerate(xreg):
        _cc_phi_add_mod(b, (factor << j) % modulus, modulus, breg, anc, (control, xq))
    b.iqft(breg)


def _controlled_modular_multiplier(b: _Builder, factor: int, modulus: int,
                                   control: int, xreg: list[int], breg: list[int],
                                   anc: int) -> None:
    """Controlled in-place x -> factor * x mod modulus.

    Standard construction: multiply into the clean accumulator, swap the
    registers under the control, then un-compute with the inverse factor.
    """
    _c_mult_mod(b, factor, modulus, control, xreg, breg, anc)
    for j, xq in enumerate(xreg):
        b.add(Gate("swap", (xq, breg[j]), (control,)))
    inv = pow(factor, -1, modulus)
    sub = _Builder(b.n_qubits)
    _c_mult_mod(sub, inv, modulus, control, xreg, breg, anc)
    for g in reversed(sub.gates):
        b.add(g.inverse())


def gen_shor(number: int, base: int | None = None) -> Circuit:
    """Order-finding circuit for ``base`` modulo ``number`` on 4n+2 qubits.

    Register layout (LSB-first physical indices):
        0 .. n-1        multiplication register, initialized to |1>
        n .. 2n         Fourier-space accumulator (n+1 qubits)
        2n+1            comparison ancilla
        2n+2 .. 4n+1    counting register (2n qubits, most significant area)
    """
    if base is None:
        base = default_shor_base(number)
    validate_shor_inputs(number, base)
    n = number.bit_length()
    total = 4 * n + 2
    xreg = list(range(n))
    breg = list(range(n, 2 * n + 1))
    anc = 2 * n + 1
    counting = list(range(2 * n + 2, 4 * n + 2))

    b = _Builder(total)
    b.add(Gate("x", (xreg[0],)))
    for c in counting:
        b.add(Gate("h", (c,)))
    for i, c in enumerate(counting):
        factor = pow(base, 1 << i, number)
        _controlled_modular_multiplier(b, factor, number, c, xreg, breg, anc)
    b.iqft(counting, swaps=True)
    return Circuit(total, tuple(b.gates))


def shor_counting_bits(number: int) -> int:
    """Width of the counting register for a modulus."""
    return 2 * number.bit_length()
