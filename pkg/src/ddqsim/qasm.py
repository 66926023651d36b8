"""OpenQASM 2.0 subset parser and printer.

Accepted: the version header, one qreg, an optional qelib1 include,
barrier (ignored) and the supported gate set (h x y z s t rx rz u1/p cx
swap plus the controlled forms cu1/cp, ccu1, ccx, cswap).  Anything else
is a hard parse error naming the line; silently dropping statements would
corrupt benchmarks.
"""

from __future__ import annotations

import math
import re

from .circuit import Circuit, Gate


class QasmError(ValueError):
    """Parse failure; the message carries the 1-based line number."""


# QASM name -> (gate kind, n_params, n_controls, n_targets)
_GATES = {
    "h": ("h", 0, 0, 1),
    "x": ("x", 0, 0, 1),
    "y": ("y", 0, 0, 1),
    "z": ("z", 0, 0, 1),
    "s": ("s", 0, 0, 1),
    "t": ("t", 0, 0, 1),
    "rx": ("rx", 1, 0, 1),
    "rz": ("rz", 1, 0, 1),
    "u1": ("u1", 1, 0, 1),
    "p": ("u1", 1, 0, 1),
    "cx": ("x", 0, 1, 1),
    "ccx": ("x", 0, 2, 1),
    "cu1": ("u1", 1, 1, 1),
    "cp": ("u1", 1, 1, 1),
    "ccu1": ("u1", 1, 2, 1),
    "swap": ("swap", 0, 0, 2),
    "cswap": ("swap", 0, 1, 2),
}

_UNSUPPORTED = ("measure", "reset", "creg", "if", "gate", "opaque")

_QUBIT_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\[(\d+)\]$")

_NUM_RE = re.compile(r"\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?")


def _eval_param(expr: str, line: int) -> float:
    """Evaluate a parameter expression of numbers, pi and + - * / ( )."""
    tokens: list[str] = []
    i = 0
    s = expr.strip()
    while i < len(s):
        ch = s[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/()":
            tokens.append(ch)
            i += 1
            continue
        if s[i:i + 2] == "pi":
            tokens.append("pi")
            i += 2
            continue
        m = _NUM_RE.match(s, i)
        if m:
            tokens.append(m.group(0))
            i = m.end()
            continue
        raise QasmError(f"line {line}: bad parameter expression {expr!r}")

    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def atom() -> float:
        tok = peek()
        if tok == "-":
            take()
            return -atom()
        if tok == "+":
            take()
            return atom()
        if tok == "(":
            take()
            val = expr_sum()
            if peek() != ")":
                raise QasmError(f"line {line}: unbalanced parentheses in {expr!r}")
            take()
            return val
        if tok == "pi":
            take()
            return math.pi
        if tok is None:
            raise QasmError(f"line {line}: truncated parameter expression {expr!r}")
        take()
        try:
            return float(tok)
        except ValueError:
            raise QasmError(f"line {line}: bad number {tok!r} in {expr!r}") from None

    def expr_prod() -> float:
        val = atom()
        while peek() in ("*", "/"):
            if take() == "*":
                val *= atom()
            else:
                val /= atom()
        return val

    def expr_sum() -> float:
        val = expr_prod()
        while peek() in ("+", "-"):
            if take() == "+":
                val += expr_prod()
            else:
                val -= expr_prod()
        return val

    out = expr_sum()
    if pos != len(tokens):
        raise QasmError(f"line {line}: trailing tokens in parameter {expr!r}")
    return out


def _statements(text: str):
    """Yield (line_number, statement) with comments stripped."""
    pending = ""
    start_line = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for ch in line:
            if ch == ";":
                stmt = pending.strip()
                if stmt:
                    yield start_line, stmt
                pending = ""
                start_line = lineno
            else:
                if not pending.strip():
                    start_line = lineno
                pending += ch
        pending += " "
    tail = pending.strip()
    if tail:
        raise QasmError(f"line {start_line}: statement missing terminating ';': {tail!r}")


def parse_qasm(text: str) -> Circuit:
    """Parse an OpenQASM 2.0 subset program into a Circuit."""
    qreg_name: str | None = None
    n_qubits = 0
    gates: list[Gate] = []
    saw_header = False

    for line, stmt in _statements(text):
        head = stmt.split(None, 1)[0]
        if head == "OPENQASM":
            if stmt.replace(" ", "") != "OPENQASM2.0":
                raise QasmError(f"line {line}: only OPENQASM 2.0 is supported")
            saw_header = True
            continue
        if head == "include":
            continue
        if head in _UNSUPPORTED or stmt.find("->") >= 0:
            raise QasmError(f"line {line}: unsupported statement {head!r}")
        if head == "barrier":
            continue
        if head == "qreg":
            m = _QUBIT_RE.match(stmt[len("qreg"):].strip())
            if not m:
                raise QasmError(f"line {line}: malformed qreg declaration {stmt!r}")
            if qreg_name is not None:
                raise QasmError(f"line {line}: only one qreg is supported")
            qreg_name = m.group(1)
            n_qubits = int(m.group(2))
            if n_qubits < 1:
                raise QasmError(f"line {line}: qreg must have at least one qubit")
            continue

        # gate application: NAME [*(params)] args
        m = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(\(([^)]*)\))?\s*(.*)$", stmt)
        if not m:
            raise QasmError(f"line {line}: malformed statement {stmt!r}")
        name = m.group(1)
        spec = _GATES.get(name)
        if spec is None:
            raise QasmError(f"line {line}: unsupported statement {name!r}")
        if not saw_header:
            raise QasmError(f"line {line}: missing OPENQASM 2.0 header")
        if qreg_name is None:
            raise QasmError(f"line {line}: gate before qreg declaration")
        kind, n_params, n_controls, n_targets = spec
        params: tuple[float, ...] = ()
        if n_params:
            if m.group(3) is None:
                raise QasmError(f"line {line}: {name} needs {n_params} parameter(s)")
            raw_params = [p for p in m.group(3).split(",") if p.strip()]
            if len(raw_params) != n_params:
                raise QasmError(
                    f"line {line}: {name} takes {n_params} parameter(s), got {len(raw_params)}"
                )
            params = tuple(_eval_param(p, line) for p in raw_params)
        elif m.group(3) is not None:
            raise QasmError(f"line {line}: {name} takes no parameters")

        args = [a.strip() for a in m.group(4).split(",") if a.strip()]
        if len(args) != n_controls + n_targets:
            raise QasmError(
                f"line {line}: {name} takes {n_controls + n_targets} qubit(s), got {len(args)}"
            )
        indices = []
        for a in args:
            qm = _QUBIT_RE.match(a)
            if not qm or qm.group(1) != qreg_name:
                raise QasmError(f"line {line}: bad qubit reference {a!r}")
            qi = int(qm.group(2))
            if qi >= n_qubits:
                raise QasmError(f"line {line}: qubit {qi} out of range (qreg has {n_qubits})")
            indices.append(qi)
        controls = tuple(indices[:n_controls])
        targets = tuple(indices[n_controls:])
        try:
            gates.append(Gate(kind, targets, controls, params))
        except ValueError as ex:
            raise QasmError(f"line {line}: {ex}") from None

    if not saw_header:
        raise QasmError("line 1: missing OPENQASM 2.0 header")
    if qreg_name is None:
        raise QasmError("line 1: missing qreg declaration")
    return Circuit(n_qubits, tuple(gates))


_PRINT_NAMES = {
    ("h", 0): "h", ("x", 0): "x", ("y", 0): "y", ("z", 0): "z",
    ("s", 0): "s", ("t", 0): "t", ("rx", 0): "rx", ("rz", 0): "rz",
    ("u1", 0): "u1", ("x", 1): "cx", ("x", 2): "ccx",
    ("u1", 1): "cu1", ("u1", 2): "ccu1",
    ("swap", 0): "swap", ("swap", 1): "cswap",
}


def print_qasm(circuit: Circuit, qreg_name: str = "q") -> str:
    """Emit a parseable QASM program; round-trips through parse_qasm."""
    out = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg {qreg_name}[{circuit.n_qubits}];"]
    for g in circuit.gates:
        name = _PRINT_NAMES.get((g.kind, len(g.controls)))
        if name is None:
            raise ValueError(f"gate {g} has no QASM spelling in the supported subset")
        params = f"({','.join(repr(p) for p in g.params)})" if g.params else ""
        args = ",".join(f"{qreg_name}[{q}]" for q in g.controls + g.targets)
        out.append(f"{name}{params} {args};")
    return "\n".join(out) + "\n"
