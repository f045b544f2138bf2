"""Bounded FIFO packet queues with drop-on-full accounting."""

from collections import deque
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class Packet:
    ue: int
    seq: int
    arrival_time: float


class EnqueueResult(Enum):
    ENQUEUED = "enqueued"
    DROPPED = "dropped"


class UeQueue:
    """FIFO queue with a hard length limit.

    Counter identities, maintained by every operation:
        generated == enqueued + dropped
        enqueued  == delivered + len(items)
    """

    def __init__(self, ue: int, limit: int):
        if limit < 1:
            raise ValueError(f"queue limit must be >= 1, got {limit}")
        self.ue = ue
        self.limit = limit
        self.items = deque()
        self.generated = 0
        self.enqueued = 0
        self.dropped = 0
        self.delivered = 0

    def __len__(self):
        return len(self.items)

    def enqueue(self, pkt: Packet) -> EnqueueResult:
        """Append pkt if there is room, otherwise count a drop."""
        if pkt.ue != self.ue:
            raise ValueError(f"packet for UE {pkt.ue} offered to queue {self.ue}")
        self.generated += 1
        if len(self.items) < self.limit:
            self.items.append(pkt)
            self.enqueued += 1
            return EnqueueResult.ENQUEUED
        self.dropped += 1
        return EnqueueResult.DROPPED

    def dequeue(self):
        """Remove and return the head packet (a delivery), or None if empty."""
        if not self.items:
            return None
        self.delivered += 1
        return self.items.popleft()

    def counters_consistent(self) -> bool:
        return (
            self.generated == self.enqueued + self.dropped
            and self.enqueued == self.delivered + len(self.items)
        )

    def __repr__(self):
        return (
            f"UeQueue(ue={self.ue}, len={len(self.items)}/{self.limit}, "
            f"gen={self.generated}, drop={self.dropped}, done={self.delivered})"
        )
