"""Pydantic models shared by the service, the CLI and report files."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = 1


class RunRequest(BaseModel):
    """One simulation: a circuit source plus the run configuration."""

    circuit: Optional[str] = Field(
        default=None,
        description="generator spec, e.g. 'shor:n=15,a=7' or 'qcbm:q=12,layers=8'",
    )
    qasm: Optional[str] = Field(default=None, description="OpenQASM 2.0 program text")
    ranks: int = 1
    comm: Literal["ring", "bcast"] = "ring"
    swap: Literal["none", "v1", "v2"] = "none"
    seed: int = 0
    shots: int = 0
    transport: Literal["inproc", "socket"] = "inproc"
    sequential: bool = False
    max_retries: int = 10


class BenchRequest(BaseModel):
    """Sweep ranks (powers of two up to `ranks`) x comm x swap."""

    circuit: Optional[str] = None
    qasm: Optional[str] = None
    ranks: int = 4
    seed: int = 0
    transport: Literal["inproc", "socket"] = "inproc"


class GenRequest(BaseModel):
    circuit: str
    seed: int = 0


class GenResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    qasm: str
    n_qubits: int
    n_gates: int


class ConfigEcho(BaseModel):
    circuit: str
    n_qubits: int
    n_gates: int
    ranks: int
    comm: str
    swap: str
    seed: int
    shots: int
    transport: str
    sequential: bool


class RankMetricsReport(BaseModel):
    rank: int
    messages_sent: int
    bytes_sent: int
    rounds: int
    max_sends_in_round: int
    local_applies: int
    global_applies: int
    peak_state_nodes: int
    peak_table_nodes: int


class Totals(BaseModel):
    messages_sent: int
    bytes_sent: int
    local_applies: int
    global_applies: int
    max_sends_per_round: int
    swaps_inserted: int


class WallTimes(BaseModel):
    """Measured, never asserted; excluded from reproducibility comparisons."""

    build_s: float
    run_s: float
    analyze_s: float


class RunReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    mode: Literal["run", "verify"]
    ok: bool
    config: ConfigEcho
    totals: Totals
    per_rank: list[RankMetricsReport]
    final_norm: float
    layout: list[int]
    wall_times: WallTimes
    fidelity: Optional[float] = None
    factors: Optional[list[int]] = None
    retries_used: Optional[int] = None
    histogram: Optional[dict[str, int]] = None


class BenchReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    entries: list[RunReport]
