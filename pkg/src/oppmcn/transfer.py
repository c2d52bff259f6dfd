"""Per-hop client/server file transfer with selective acknowledgement reports.

Each hop runs an independent client (sender) and server (receiver).  Servers
periodically report the sequence numbers received since the previous report;
unacknowledged packets older than the retransmit timeout re-enter a priority
queue.  On the relayed path the cellular client may only send sequence numbers
the relay has already received over the device-to-device hop.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

HOP_D2D = "d2d"
HOP_CELL = "cell"


@dataclass(frozen=True)
class TransferParams:
    file_bytes: int = 50_000_000
    packet_payload: int = 1470  # bytes per packet
    report_period: float = 0.1  # seconds
    retransmit_timeout: float = 0.2  # seconds

    def __post_init__(self):
        if self.file_bytes <= 0 or self.packet_payload <= 0:
            raise ValueError("file_bytes and packet_payload must be > 0")
        if self.report_period <= 0 or self.retransmit_timeout <= 0:
            raise ValueError("report periods must be > 0")


@dataclass(frozen=True)
class Report:
    t: float
    hop: str
    acked: tuple[int, ...]


class _HopState:
    __slots__ = ("unacked", "retx_queue", "retx_set", "received", "newly_received",
                 "duplicates", "lost_blocks", "next_fresh", "fresh_sent_bytes",
                 "delivered_distinct_bytes", "delivered_bits_total", "last_report_t")

    def __init__(self):
        self.unacked: dict[int, float] = {}
        self.retx_queue: deque[int] = deque()
        self.retx_set: set[int] = set()
        self.received: set[int] = set()
        self.newly_received: list[int] = []
        self.duplicates = 0
        self.lost_blocks = 0
        self.next_fresh = 0
        self.fresh_sent_bytes = 0
        self.delivered_distinct_bytes = 0
        self.delivered_bits_total = 0
        self.last_report_t = 0.0


class TransferState:
    """Packet bookkeeping for one run; mutated only by the owning engine loop."""

    def __init__(self, params: TransferParams, relayed: bool):
        self.params = params
        self.relayed = relayed
        self.n_packets = -(-params.file_bytes // params.packet_payload)
        self._last_size = params.file_bytes - (self.n_packets - 1) * params.packet_payload
        self.hops: dict[str, _HopState] = {HOP_CELL: _HopState()}
        if relayed:
            self.hops[HOP_D2D] = _HopState()
        self.relay_buffer: deque[int] = deque()
        self.completed_at: float | None = None

    def payload_bytes(self, seq: int) -> int:
        return self._last_size if seq == self.n_packets - 1 else self.params.packet_payload

    def payload_bits(self, seq: int) -> int:
        return 8 * self.payload_bytes(seq)

    def has_pending(self, hop: str) -> bool:
        h = self.hops[hop]
        if h.retx_queue:
            return True
        if hop == HOP_CELL and self.relayed:
            return bool(self.relay_buffer)
        return h.next_fresh < self.n_packets

    def next_payload(self, hop: str, now: float) -> int | None:
        """Pop the next sequence number to transmit and mark it sent at `now`."""
        h = self.hops[hop]
        while h.retx_queue:
            seq = h.retx_queue.popleft()
            h.retx_set.discard(seq)
            if seq in h.unacked:
                h.unacked[seq] = now
                return seq
        if hop == HOP_CELL and self.relayed:
            if not self.relay_buffer:
                return None
            seq = self.relay_buffer.popleft()
        else:
            if h.next_fresh >= self.n_packets:
                return None
            seq = h.next_fresh
            h.next_fresh += 1
        h.unacked[seq] = now
        h.fresh_sent_bytes += self.payload_bytes(seq)
        return seq

    def on_receive(self, hop: str, seq: int, error_flag: bool) -> None:
        h = self.hops[hop]
        if error_flag:
            h.lost_blocks += 1
            return
        h.delivered_bits_total += self.payload_bits(seq)
        if seq in h.received:
            h.duplicates += 1
            return
        h.received.add(seq)
        h.newly_received.append(seq)
        h.delivered_distinct_bytes += self.payload_bytes(seq)
        if hop == HOP_D2D:
            self.relay_buffer.append(seq)

    def make_report(self, hop: str, now: float) -> Report:
        h = self.hops[hop]
        report = Report(now, hop, tuple(h.newly_received))
        h.newly_received = []
        h.last_report_t = now
        return report

    def apply_report(self, hop: str, report: Report, now: float) -> None:
        h = self.hops[hop]
        for seq in report.acked:
            h.unacked.pop(seq, None)
        timeout = self.params.retransmit_timeout
        retx_set = h.retx_set
        for seq, sent_t in h.unacked.items():
            if now - sent_t > timeout and seq not in retx_set:
                retx_set.add(seq)
                h.retx_queue.append(seq)

    def relay_conservation_ok(self) -> bool:
        """Distinct bytes sent on the cellular hop never exceed those received over D2D."""
        if not self.relayed:
            return True
        return self.hops[HOP_CELL].fresh_sent_bytes <= self.hops[HOP_D2D].delivered_distinct_bytes

    def end_server_bytes(self) -> int:
        return self.hops[HOP_CELL].delivered_distinct_bytes

    def is_complete(self) -> bool:
        return len(self.hops[HOP_CELL].received) == self.n_packets
