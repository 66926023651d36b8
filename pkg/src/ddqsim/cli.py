"""Command-line client for the simulator service.

The CLI is a thin client: it translates flags into service requests and
POSTs them either to an in-process app instance (default) or to a remote
server given with --server.  Exit codes: 0 success, 1 run/verification
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

USAGE_EXIT = 2
RUN_EXIT = 1


class _InProcessClient:
    """httpx client bound to the ASGI app, no network involved."""

    def __init__(self):
        import warnings

        with warnings.catch_warnings():
            # this starlette wants httpx2, which the index does not carry yet
            warnings.simplefilter("ignore")
            from starlette.testclient import TestClient

            from .service import app

            self._client = TestClient(app, raise_server_exceptions=False)

    def post(self, path: str, payload: dict) -> httpx.Response:
        return self._client.post(path, json=payload)


class _RemoteClient:
    def __init__(self, base_url: str):
        self._client = httpx.Client(base_url=base_url, timeout=None)

    def post(self, path: str, payload: dict) -> httpx.Response:
        return self._client.post(path, json=payload)


def _make_client(server: str | None):
    return _RemoteClient(server) if server else _InProcessClient()


def _add_circuit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qasm", metavar="FILE", help="OpenQASM 2.0 circuit file")
    p.add_argument(
        "--circuit",
        metavar="SPEC",
        help="generator spec: shor:n=15[,a=7] or qcbm:q=12,layers=8",
    )
    p.add_argument("--seed", type=int, default=0)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    _add_circuit_flags(p)
    p.add_argument("--ranks", type=int, default=1, help="simulated rank count (power of two)")
    p.add_argument("--comm", choices=["ring", "bcast"], default="ring")
    p.add_argument("--swap", choices=["none", "v1", "v2"], default="none")
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--transport", choices=["inproc", "socket"], default="inproc")
    p.add_argument("--sequential", action="store_true", help="lockstep debug scheduling")
    p.add_argument("--report", metavar="FILE.json", help="write the report as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddqsim",
        description="Distributed decision-diagram quantum circuit simulator",
    )
    parser.add_argument("--server", metavar="URL", help="use a running service instead of in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a circuit")
    _add_run_flags(p_run)

    p_verify = sub.add_parser("verify", help="run, check against the dense oracle")
    _add_run_flags(p_verify)

    p_bench = sub.add_parser("bench", help="sweep ranks x comm x swap, emit reports")
    _add_circuit_flags(p_bench)
    p_bench.add_argument("--ranks", type=int, default=4, help="largest rank count in the sweep")
    p_bench.add_argument("--transport", choices=["inproc", "socket"], default="inproc")
    p_bench.add_argument("--report", metavar="FILE.json", help="write the sweep report as JSON")

    p_gen = sub.add_parser("gen", help="write a generated circuit as QASM")
    p_gen.add_argument("--circuit", metavar="SPEC", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", metavar="FILE", help="output path (default stdout)")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8234)

    return parser


def _circuit_payload(args) -> dict:
    if (args.qasm is None) == (args.circuit is None):
        raise _Usage("provide exactly one of --qasm or --circuit")
    if args.qasm is not None:
        path = Path(args.qasm)
        if not path.exists():
            raise _Usage(f"no such file: {args.qasm}")
        return {"qasm": path.read_text()}
    return {"circuit": args.circuit}


class _Usage(Exception):
    pass


def _write_report(args, body: str) -> None:
    if getattr(args, "report", None):
        Path(args.report).write_text(body + "\n")


def _pretty_summary(report: dict) -> str:
    cfg = report["config"]
    lines = [
        f"circuit {cfg['circuit']}: {cfg['n_qubits']} qubits, {cfg['n_gates']} gates",
        f"ranks={cfg['ranks']} comm={cfg['comm']} swap={cfg['swap']} "
        f"transport={cfg['transport']} seed={cfg['seed']}",
        f"applies: {report['totals']['local_applies']} local, "
        f"{report['totals']['global_applies']} global; "
        f"swaps inserted: {report['totals']['swaps_inserted']}",
        f"messages: {report['totals']['messages_sent']} "
        f"({report['totals']['bytes_sent']} bytes), "
        f"max sends/rank/round: {report['totals']['max_sends_per_round']}",
        f"final norm^2: {report['final_norm']:.9f}",
    ]
    if report.get("fidelity") is not None:
        lines.append(f"fidelity vs dense oracle: {report['fidelity']:.12f}")
    if report.get("factors"):
        lines.append(
            f"factors: {report['factors'][0]} x {report['factors'][1]} "
            f"(retries: {report.get('retries_used', 0)})"
        )
    lines.append("ok" if report["ok"] else "FAILED")
    return "\n".join(lines)


def _run_like(client, args, path: str) -> int:
    payload = _circuit_payload(args)
    payload.update(
        ranks=args.ranks,
        comm=args.comm,
        swap=args.swap,
        seed=args.seed,
        shots=args.shots,
        transport=args.transport,
        sequential=args.sequential,
    )
    resp = client.post(path, payload)
    if resp.status_code in (400, 422):
        print(f"usage error: {_detail(resp)}", file=sys.stderr)
        return USAGE_EXIT
    if resp.status_code != 200:
        print(f"run failed: {_detail(resp)}", file=sys.stderr)
        return RUN_EXIT
    report = resp.json()
    _write_report(args, json.dumps(report, indent=2))
    print(_pretty_summary(report))
    return 0 if report["ok"] else RUN_EXIT


def _detail(resp: httpx.Response) -> str:
    try:
        return str(resp.json().get("detail", resp.text))
    except Exception:
        return resp.text


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return USAGE_EXIT if ex.code not in (0, None) else 0

    if args.command == "serve":
        try:
            import uvicorn
        except ImportError:
            print("serve needs uvicorn: pip install ddqsim[serve]", file=sys.stderr)
            return USAGE_EXIT

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        client = _make_client(args.server)
        if args.command in ("run", "verify"):
            return _run_like(client, args, f"/{args.command}")
        if args.command == "bench":
            payload = _circuit_payload(args)
            payload.update(ranks=args.ranks, seed=args.seed, transport=args.transport)
            resp = client.post("/bench", payload)
            if resp.status_code in (400, 422):
                print(f"usage error: {_detail(resp)}", file=sys.stderr)
                return USAGE_EXIT
            if resp.status_code != 200:
                print(f"bench failed: {_detail(resp)}", file=sys.stderr)
                return RUN_EXIT
            body = resp.json()
            _write_report(args, json.dumps(body, indent=2))
            for entry in body["entries"]:
                cfg = entry["config"]
                print(
                    f"ranks={cfg['ranks']:3d} comm={cfg['comm']:5s} swap={cfg['swap']:4s} "
                    f"messages={entry['totals']['messages_sent']:8d} "
                    f"global={entry['totals']['global_applies']:6d} "
                    f"swaps={entry['totals']['swaps_inserted']:5d} "
                    f"run_s={entry['wall_times']['run_s']:.3f}"
                )
            return 0
        if args.command == "gen":
            resp = client.post("/gen", {"circuit": args.circuit, "seed": args.seed})
            if resp.status_code in (400, 422):
                print(f"usage error: {_detail(resp)}", file=sys.stderr)
                return USAGE_EXIT
            if resp.status_code != 200:
                print(f"gen failed: {_detail(resp)}", file=sys.stderr)
                return RUN_EXIT
            body = resp.json()
            if args.out:
                Path(args.out).write_text(body["qasm"])
                print(f"wrote {body['n_qubits']}-qubit, {body['n_gates']}-gate circuit to {args.out}")
            else:
                sys.stdout.write(body["qasm"])
            return 0
    except _Usage as ex:
        print(f"usage error: {ex}", file=sys.stderr)
        return USAGE_EXIT
    except httpx.HTTPError as ex:
        print(f"transport error: {ex}", file=sys.stderr)
        return RUN_EXIT
    print(f"unknown command {args.command!r}", file=sys.stderr)
    return USAGE_EXIT


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
