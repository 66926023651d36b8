"""Rank-to-rank messaging: in-process harness, socket fabric, collectives.

Ranks interact only through the collectives here; there is no shared
mutable state between rank workers.  The in-process fabric delivers
messages through per-ordered-pair FIFO queues and runs one worker thread
per rank.  In sequential (lockstep) mode a turn scheduler admits exactly
one runnable thread at a time, in rank order, yielding identical results
to the concurrent mode for deterministic workers.

The socket fabric is feature-equivalent (frames each payload with a u32
length prefix over a local socket pair per rank pair) but is excluded
from the determinism guarantees of the in-process harness.
"""

from __future__ import annotations

import socket
import struct
import threading
from collections import deque
from dataclasses import dataclass, field


class TransportError(RuntimeError):
    """A rank dropped out or a collective could not complete."""


DEFAULT_TIMEOUT = 300.0


@dataclass
class CommMetrics:
    """Per-rank data-plane counters; monotone within a run."""

    rank: int = 0
    messages_sent: int = 0
    bytes_sent: int = 0
    rounds: int = 0
    max_sends_in_round: int = 0
    local_applies: int = 0
    global_applies: int = 0
    swaps_inserted: int = 0
    peak_state_nodes: int = 0
    peak_table_nodes: int = 0
    norm_history: list[float] = field(default_factory=list)

    def record_round(self, sends: int) -> None:
        self.rounds += 1
        if sends > self.max_sends_in_round:
            self.max_sends_in_round = sends


class _TurnScheduler:
    """Admits one rank thread at a time, passing the turn in rank order.

    A thread yields only when it must block (its receive predicate is
    false) or when it finishes; the next runnable rank in cyclic order
    takes over.  All state is guarded by the fabric's condition variable.
    """

    def __init__(self, fabric: "InProcessFabric"):
        self.fabric = fabric
        self.size = fabric.size
        self.cond = fabric.cond
        self.turn = 0
        self.blocked: dict[int, object] = {}
        self.finished: set[int] = set()

    def _advance(self) -> None:
        for step in range(1, self.size + 1):
            cand = (self.turn + step) % self.size
            if cand in self.finished:
                continue
            pred = self.blocked.get(cand)
            if pred is None or pred():
                self.blocked.pop(cand, None)
                self.turn = cand
                self.cond.notify_all()
                return
        if len(self.finished) < self.size and self.fabric.failed is None:
            self.fabric.failed = TransportError(
                "lockstep deadlock: every live rank is blocked"
            )
        self.cond.notify_all()

    def wait_turn(self, rank: int) -> None:
        while self.turn != rank and self.fabric.failed is None:
            self.cond.wait(DEFAULT_TIMEOUT)

    def block_until(self, rank: int, pred) -> None:
        """Yield the turn until pred() holds and the turn comes back."""
        self.blocked[rank] = pred
        self._advance()
        while self.turn != rank and self.fabric.failed is None:
            if not self.cond.wait(DEFAULT_TIMEOUT):
                raise TransportError(f"rank {rank} timed out waiting for a message")

    def finish(self, rank: int) -> None:
        self.finished.add(rank)
        self.blocked.pop(rank, None)
        if len(self.finished) < self.size:
            self._advance()
        else:
            self.cond.notify_all()


class InProcessFabric:
    """Deterministic in-process cluster of P ranks (default harness)."""

    def __init__(self, size: int, sequential: bool = False):
        self.size = size
        self.sequential = sequential
        self.cond = threading.Condition()
        self.queues: dict[tuple[int, int], deque] = {
            (s, d): deque() for s in range(size) for d in range(size) if s != d
        }
        self.failed: BaseException | None = None
        self.scheduler = _TurnScheduler(self) if sequential else None

    def endpoint(self, rank: int, metrics: CommMetrics) -> "RankEndpoint":
        return RankEndpoint(self, rank, metrics)

    def _send(self, src: int, dst: int, payload: bytes) -> None:
        with self.cond:
            if self.failed is not None:
                raise TransportError("run already failed") from self.failed
            self.queues[(src, dst)].append(payload)
            self.cond.notify_all()

    def _recv(self, src: int, dst: int) -> bytes:
        q = self.queues[(src, dst)]
        with self.cond:
            if self.scheduler is not None:
                if not q:
                    self.scheduler.block_until(
                        dst, lambda: len(q) > 0 or self.failed is not None
                    )
            else:
                while not q and self.failed is None:
                    if not self.cond.wait(DEFAULT_TIMEOUT):
                        raise TransportError(
                            f"rank {dst} timed out waiting on rank {src}"
                        )
            if self.failed is not None:
                raise TransportError("run aborted by another rank") from self.failed
            return q.popleft()

    def run(self, worker, timeout: float | None = None) -> list:
        """Run worker(endpoint-less rank id) on every rank; returns results.

        ``worker`` is called as worker(rank) in a thread per rank; the
        caller typically closes over endpoints created via endpoint().
        The first raised exception aborts the whole run.
        """
        results: list = [None] * self.size
        errors: list = [None] * self.size

        def body(rank: int) -> None:
            try:
                if self.scheduler is not None:
                    with self.cond:
                        self.scheduler.wait_turn(rank)
                results[rank] = worker(rank)
            except BaseException as ex:  # propagate to the coordinator
                errors[rank] = ex
                with self.cond:
                    if self.failed is None:
                        self.failed = ex
                    self.cond.notify_all()
            finally:
                if self.scheduler is not None:
                    with self.cond:
                        self.scheduler.finish(rank)

        threads = [
            threading.Thread(target=body, args=(r,), name=f"rank-{r}", daemon=True)
            for r in range(self.size)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout)
            if t.is_alive():
                with self.cond:
                    self.failed = TransportError("run timed out")
                    self.cond.notify_all()
                raise TransportError(f"worker {t.name} did not finish in time")
        for ex in errors:
            if ex is not None:
                raise ex
        return results


_FRAME = struct.Struct("<I")


class SocketFabric:
    """Socket-pair transport between rank threads, u32-length framed."""

    def __init__(self, size: int):
        self.size = size
        self.sequential = False
        self._socks: dict[tuple[int, int], socket.socket] = {}
        for a in range(size):
            for b in range(a + 1, size):
                sa, sb = socket.socketpair()
                for s in (sa, sb):
                    s.settimeout(DEFAULT_TIMEOUT)
                    # generous buffers so symmetric sendall phases cannot jam
                    s.setsockopt(socket.SOL_SOCKET, socket.SO_SNDBUF, 1 << 22)
                    s.setsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF, 1 << 22)
                self._socks[(a, b)] = sa
                self._socks[(b, a)] = sb
        self.failed: BaseException | None = None

    def endpoint(self, rank: int, metrics: CommMetrics) -> "RankEndpoint":
        return RankEndpoint(self, rank, metrics)

    def _send(self, src: int, dst: int, payload: bytes) -> None:
        try:
            self._socks[(src, dst)].sendall(_FRAME.pack(len(payload)) + payload)
        except OSError as ex:
            raise TransportError(f"send {src}->{dst} failed") from ex

    def _recv(self, src: int, dst: int) -> bytes:
        sock = self._socks[(dst, src)]
        try:
            need = _FRAME.size
            header = b""
            while len(header) < need:
                chunk = sock.recv(need - len(header))
                if not chunk:
                    raise TransportError(f"rank {src} dropped out")
                header += chunk
            (length,) = _FRAME.unpack(header)
            body = bytearray()
            while len(body) < length:
                chunk = sock.recv(length - len(body))
                if not chunk:
                    raise TransportError(f"rank {src} dropped out mid-frame")
                body.extend(chunk)
            return bytes(body)
        except socket.timeout as ex:
            raise TransportError(f"receive {src}->{dst} timed out") from ex

    def run(self, worker, timeout: float | None = None) -> list:
        results: list = [None] * self.size
        errors: list = [None] * self.size

        def body(rank: int) -> None:
            try:
                results[rank] = worker(rank)
            except BaseException as ex:
                errors[rank] = ex
                self.failed = ex
                self.close()

        threads = [
            threading.Thread(target=body, args=(r,), name=f"rank-{r}", daemon=True)
            for r in range(self.size)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout)
            if t.is_alive():
                self.close()
                raise TransportError(f"worker {t.name} did not finish in time")
        for ex in errors:
            if ex is not None:
                raise ex
        return results

    def close(self) -> None:
        for s in self._socks.values():
            try:
                s.close()
            except OSError:
                pass


class RankEndpoint:
    """One rank's handle on the fabric, with its data-plane metrics."""

    def __init__(self, fabric, rank: int, metrics: CommMetrics):
        self.fabric = fabric
        self.rank = rank
        self.size = fabric.size
        self.metrics = metrics

    def send(self, dst: int, payload: bytes) -> None:
        self.fabric._send(self.rank, dst, payload)
        self.metrics.messages_sent += 1
        self.metrics.bytes_sent += len(payload)

    def recv(self, src: int) -> bytes:
        return self.fabric._recv(src, self.rank)

    def ring_shift(self, payload: bytes) -> bytes:
        """Collective: pass payload to rank+1, return the one from rank-1.

        Exactly one send and one receive per rank per round; the ring
        direction is fixed (toward (rank + 1) mod P).
        """
        if self.size == 1:
            self.metrics.record_round(0)
            return payload
        self.send((self.rank + 1) % self.size, payload)
        got = self.recv((self.rank - 1) % self.size)
        self.metrics.record_round(1)
        return got

    def broadcast_from(self, root: int, payload: bytes | None = None) -> bytes:
        """Collective: flat fan-out of the root's payload to every rank."""
        if self.rank == root:
            if payload is None:
                raise ValueError("broadcast root must supply a payload")
            for dst in range(self.size):
                if dst != root:
                    self.send(dst, payload)
            self.metrics.record_round(self.size - 1)
            return payload
        got = self.recv(root)
        self.metrics.record_round(0)
        return got
