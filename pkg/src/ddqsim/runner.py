"""Orchestration behind the service endpoints: run, verify, bench, gen."""

from __future__ import annotations

import time

from .circuit import Circuit
from .engine import RunConfig, RunResult, run_circuit, sample, total_norm
from .factoring import RETRY, shor_postprocess
from .generators import default_shor_base, gen_qcbm, gen_shor
from .oracle import ORACLE_QUBIT_GUARD, dense_oracle, fidelity
from .partition import PartitionPlan
from .qasm import parse_qasm, print_qasm
from .report import (
    BenchReport,
    BenchRequest,
    ConfigEcho,
    GenRequest,
    GenResponse,
    RankMetricsReport,
    RunReport,
    RunRequest,
    Totals,
    WallTimes,
)

FIDELITY_THRESHOLD = 1.0 - 1e-9


class UsageError(ValueError):
    """Invalid request contents (maps to exit code 2 / HTTP 400)."""


def parse_circuit_spec(spec: str, seed: int) -> tuple[Circuit, dict]:
    """Build a circuit from a generator spec string.

    Forms: ``shor:n=NUMBER[,a=BASE]`` and ``qcbm:q=QUBITS,layers=LAYERS``.
    """
    name, _, argstr = spec.partition(":")
    args: dict[str, int] = {}
    if argstr:
        for item in argstr.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise UsageError(f"malformed circuit argument {item!r} in {spec!r}")
            try:
                args[key.strip()] = int(val)
            except ValueError:
                raise UsageError(f"circuit argument {item!r} is not an integer") from None
    if name == "shor":
        if "n" not in args:
            raise UsageError("shor spec needs n=NUMBER, e.g. shor:n=15")
        number = args.pop("n")
        base = args.pop("a", None)
        if args:
            raise UsageError(f"unknown shor argument(s): {sorted(args)}")
        try:
            if base is None:
                base = default_shor_base(number)
            circuit = gen_shor(number, base)
        except ValueError as ex:
            raise UsageError(str(ex)) from None
        return circuit, {"kind": "shor", "number": number, "base": base}
    if name == "qcbm":
        if "q" not in args or "layers" not in args:
            raise UsageError("qcbm spec needs q=QUBITS,layers=LAYERS")
        q = args.pop("q")
        layers = args.pop("layers")
        if args:
            raise UsageError(f"unknown qcbm argument(s): {sorted(args)}")
        try:
            circuit = gen_qcbm(q, layers, seed)
        except ValueError as ex:
            raise UsageError(str(ex)) from None
        return circuit, {"kind": "qcbm"}
    raise UsageError(f"unknown circuit family {name!r} (expected shor: or qcbm:)")


def load_circuit(req: "RunRequest | BenchRequest") -> tuple[Circuit, str, dict]:
    if (req.circuit is None) == (req.qasm is None):
        raise UsageError("provide exactly one of 'circuit' or 'qasm'")
    if req.circuit is not None:
        circuit, meta = parse_circuit_spec(req.circuit, req.seed)
        return circuit, req.circuit, meta
    try:
        circuit = parse_qasm(req.qasm)
    except ValueError as ex:
        raise UsageError(f"qasm: {ex}") from None
    return circuit, "qasm", {"kind": "qasm"}


def _make_config(circuit: Circuit, req: RunRequest | BenchRequest, ranks: int,
                 comm: str, swap: str, sequential: bool = False) -> RunConfig:
    if ranks < 1 or ranks & (ranks - 1):
        raise UsageError(f"rank count must be a power of two, got {ranks}")
    if ranks > (1 << circuit.n_qubits):
        raise UsageError(
            f"rank count {ranks} exceeds 2**{circuit.n_qubits} for this circuit"
        )
    return RunConfig(
        plan=PartitionPlan.for_ranks(circuit.n_qubits, ranks),
        comm=comm,
        swap_mode=swap,
        seed=req.seed,
        transport=req.transport,
        sequential=sequential,
    )


def _report_from_result(req: RunRequest, circuit: Circuit, label: str,
                        result: RunResult, walls: WallTimes, mode: str) -> RunReport:
    per_rank = [
        RankMetricsReport(
            rank=m.rank,
            messages_sent=m.messages_sent,
            bytes_sent=m.bytes_sent,
            rounds=m.rounds,
            max_sends_in_round=m.max_sends_in_round,
            local_applies=m.local_applies,
            global_applies=m.global_applies,
            peak_state_nodes=m.peak_state_nodes,
            peak_table_nodes=m.peak_table_nodes,
        )
        for m in result.metrics
    ]
    totals = Totals(
        messages_sent=sum(m.messages_sent for m in result.metrics),
        bytes_sent=sum(m.bytes_sent for m in result.metrics),
        local_applies=result.local_applies,
        global_applies=result.global_applies,
        max_sends_per_round=max(m.max_sends_in_round for m in result.metrics),
        swaps_inserted=result.swaps_inserted,
    )
    return RunReport(
        mode=mode,
        ok=True,
        config=ConfigEcho(
            circuit=label,
            n_qubits=circuit.n_qubits,
            n_gates=len(circuit),
            ranks=result.plan.ranks,
            comm=req.comm if isinstance(req, RunRequest) else "ring",
            swap=req.swap if isinstance(req, RunRequest) else "none",
            seed=req.seed,
            shots=req.shots if isinstance(req, RunRequest) else 0,
            transport=req.transport,
            sequential=getattr(req, "sequential", False),
        ),
        totals=totals,
        per_rank=per_rank,
        final_norm=total_norm(result),
        layout=list(result.layout.perm),
        wall_times=walls,
    )


def do_run(req: RunRequest, mode: str = "run") -> RunReport:
    t0 = time.perf_counter()
    circuit, label, meta = load_circuit(req)
    cfg = _make_config(circuit, req, req.ranks, req.comm, req.swap, req.sequential)
    if mode == "verify" and circuit.n_qubits > ORACLE_QUBIT_GUARD:
        raise UsageError(
            f"verify needs the dense oracle; {circuit.n_qubits} qubits exceed "
            f"its {ORACLE_QUBIT_GUARD}-qubit guard"
        )
    t1 = time.perf_counter()
    result = run_circuit(circuit, cfg)
    t2 = time.perf_counter()

    fidelity_value = None
    factors = None
    retries_used = None
    histogram = None
    ok = True

    if mode == "verify":
        oracle_vec = dense_oracle(circuit)
        fidelity_value = fidelity(result, oracle_vec)
        ok = fidelity_value >= FIDELITY_THRESHOLD

    if req.shots > 0:
        histogram = sample(result, req.shots, req.seed)
        if mode == "verify" and meta["kind"] == "shor":
            retries_used = 0
            outcome = shor_postprocess(histogram, meta["number"], meta["base"])
            while outcome is RETRY and retries_used < req.max_retries:
                retries_used += 1
                outcome = shor_postprocess(
                    sample(result, req.shots, req.seed + retries_used),
                    meta["number"],
                    meta["base"],
                )
            if outcome is RETRY:
                ok = False
            else:
                factors = list(outcome)

    t3 = time.perf_counter()
    walls = WallTimes(build_s=t1 - t0, run_s=t2 - t1, analyze_s=t3 - t2)
    report = _report_from_result(req, circuit, label, result, walls, mode)
    report.ok = ok
    report.fidelity = fidelity_value
    report.factors = factors
    report.retries_used = retries_used
    report.histogram = histogram
    return report


def do_verify(req: RunRequest) -> RunReport:
    return do_run(req, mode="verify")


def do_bench(req: BenchRequest) -> BenchReport:
    if req.ranks < 1 or req.ranks & (req.ranks - 1):
        raise UsageError(f"rank count must be a power of two, got {req.ranks}")
    entries: list[RunReport] = []
    ranks = 1
    while ranks <= req.ranks:
        for comm in ("ring", "bcast"):
            for swap in ("none", "v1", "v2"):
                sub = RunRequest(
                    circuit=req.circuit,
                    qasm=req.qasm,
                    ranks=ranks,
                    comm=comm,
                    swap=swap,
                    seed=req.seed,
                    transport=req.transport,
                )
                entries.append(do_run(sub))
        ranks *= 2
    return BenchReport(entries=entries)


def do_gen(req: GenRequest) -> GenResponse:
    circuit, _meta = parse_circuit_spec(req.circuit, req.seed)
    return GenResponse(qasm=print_qasm(circuit), n_qubits=circuit.n_qubits, n_gates=len(circuit))
