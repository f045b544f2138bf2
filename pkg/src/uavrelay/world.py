"""Discrete-event engine: packet arrivals, queue service, per-event loop.

Each event is one service opportunity: arrivals up to the current clock are
enqueued, the policy picks a user, the relay moves at most one sector toward
it, one packet is served (or the idle time is burned if that queue is
empty), energy is deducted, and the users take a mobility step.
"""

import math
from collections import deque, namedtuple
from dataclasses import dataclass

import numpy as np

from .config import SimConfig
from .errors import BatteryExhausted
from .geometry import (
    EnergyLedger,
    Movement,
    SectorRing,
    angular_distance,
    apply_movement,
    consume_energy,
    init_mobility,
    movement_action,
    scale_alpha,
    ue_mobility_step,
)
from .policy import PolicyContext
from .queues import Packet, UeQueue
from .rng import RngStreams

# State the policy saw and the action it took, captured mid-event for
# trajectory recording.
StateActionView = namedtuple("StateActionView", "qlens active_ue uav_sector t a1 a2")


@dataclass
class EventOutcome:
    served_ue: int
    movement: Movement
    service_time: float  # seconds spent transmitting; 0.0 for an idle event
    delivered: int  # 0 or 1
    drops_this_event: list  # per-UE drop counts from this event's arrivals
    energy_spent: float


def sample_frame_arrivals(
    rng: np.random.Generator,
    lam: float,
    frame_packets: int,
    frame_start: float,
    model: str = "poisson-gap",
) -> np.ndarray:
    """Arrival timestamps for one user for one frame.

    poisson-gap draws integer inter-arrival gaps with mean lam (larger lam
    means slower traffic); exponential-rate treats lam as a rate, with mean
    gap 1/lam.  Timestamps are non-decreasing and start at or after
    frame_start.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise ValueError(f"arrival parameter must be finite and > 0, got {lam}")
    if frame_packets == 0:
        return np.empty(0, dtype=np.float64)
    if model == "poisson-gap":
        gaps = rng.poisson(lam=lam, size=frame_packets).astype(np.float64)
    elif model == "exponential-rate":
        gaps = rng.exponential(scale=1.0 / lam, size=frame_packets)
    else:
        raise ValueError(f"unknown arrival model {model!r}")
    return frame_start + np.cumsum(gaps)


def sample_service(rng: np.random.Generator, mu_s: float) -> float:
    """One exponential service draw with mean mu_s, strictly positive."""
    if not (math.isfinite(mu_s) and mu_s > 0):
        raise ValueError(f"mu_s must be finite and > 0, got {mu_s}")
    t = rng.exponential(mu_s)
    while t <= 0.0:  # inverse transform can return exactly 0.0
        t = rng.exponential(mu_s)
    return t


class WorldState:
    """Mutable state of one run: queues, relay, users, battery, clock."""

    def __init__(self, cfg: SimConfig, run_index: int = 0):
        cfg.validate()
        self.cfg = cfg
        self.run_index = run_index
        self.rng = RngStreams(cfg.seed, run_index)
        self.ring = SectorRing(cfg.sectors)

        self.clock = 0.0
        self.frame = -1  # begin_frame() makes this 0
        self.event = 0  # event index within the current frame

        self.queues = [UeQueue(i, cfg.queue_limit) for i in range(cfg.n_ues)]
        self.pending = [deque() for _ in range(cfg.n_ues)]  # this frame's future arrivals
        self.never_arrived = [0] * cfg.n_ues  # sampled but truncated at a frame boundary
        self.total_sampled = [0] * cfg.n_ues

        # Placement comes from the mobility stream: distinct sectors, at most
        # one user per sector, plus a random starting sector for the relay.
        drawn = self.rng.mobility.choice(cfg.sectors, size=cfg.n_ues, replace=False)
        self.ue_sectors = [int(s) + 1 for s in drawn]
        self.mobility = init_mobility(self.ring, self.ue_sectors, self.rng.mobility)
        self.uav_sector = int(self.rng.mobility.integers(1, cfg.sectors + 1))

        self.battery_initial = float(self.rng.battery.uniform(*cfg.battery_init_range))
        self.battery = self.battery_initial
        self.ledger = EnergyLedger()
        self.active_ue = 0

    # -- frame management ---------------------------------------------------

    def begin_frame(self):
        """Discard the old frame's unarrived tail and sample a fresh frame."""
        cfg = self.cfg
        for ue in range(cfg.n_ues):
            self.never_arrived[ue] += len(self.pending[ue])
            times = sample_frame_arrivals(
                self.rng.arrivals,
                cfg.lambdas[ue],
                cfg.frame_packets_per_ue,
                self.clock,
                cfg.arrival_model,
            )
            self.pending[ue] = deque(times.tolist())
            self.total_sampled[ue] += cfg.frame_packets_per_ue
        self.ledger.begin_frame()
        self.frame += 1
        self.event = 0

    # -- observation helpers -------------------------------------------------

    def queue_lengths(self) -> list:
        return [len(q) for q in self.queues]

    def drops_cumulative(self) -> list:
        return [q.dropped for q in self.queues]

    def conservation_ok(self) -> bool:
        """Per-user packet accounting closes exactly at any event boundary."""
        for ue, q in enumerate(self.queues):
            if not q.counters_consistent():
                return False
            accounted = q.generated + self.never_arrived[ue] + len(self.pending[ue])
            if accounted != self.total_sampled[ue]:
                return False
        return True


def advance_arrivals(world: WorldState, t_now: float):
    """Enqueue every pending packet with timestamp <= t_now.

    Returns (enqueued, dropped) per-UE counts for this sweep.
    """
    n = world.cfg.n_ues
    enqueued = [0] * n
    dropped = [0] * n
    for ue in range(n):
        pend = world.pending[ue]
        q = world.queues[ue]
        while pend and pend[0] <= t_now:
            ts = pend.popleft()
            pkt = Packet(ue=ue, seq=q.generated, arrival_time=ts)
            if q.enqueue(pkt).value == "enqueued":
                enqueued[ue] += 1
            else:
                dropped[ue] += 1
    return enqueued, dropped


def _euclidean_alpha(world: WorldState, ue: int) -> float:
    """Metric-distance variant of the service stretch (drawing-realistic)."""
    uav = world.ring.uav_position(world.uav_sector)
    d = float(np.linalg.norm(uav - world.mobility.positions[ue]))
    return scale_alpha(min(d, 2.0 * world.ring.radius_uav), 2.0 * world.ring.radius_uav)


def step_event(world: WorldState, policy, observer=None) -> EventOutcome:
    """Run one event of the loop; see the module docstring for the order.

    The battery check happens before any state is touched, so a raised
    BatteryExhausted leaves the world unmodified for that event.  When
    observer is given it receives a StateActionView of the decision.
    """
    cfg = world.cfg
    if world.battery <= 0.0:
        raise BatteryExhausted(f"battery at {world.battery:.3f} J before event")
    if world.frame < 0:
        raise RuntimeError("begin_frame() must run before step_event()")

    _, drops = advance_arrivals(world, world.clock)
    qlens = world.queue_lengths()

    ctx = PolicyContext(
        active_ue=world.active_ue,
        uav_sector=world.uav_sector,
        ue_sectors=tuple(world.ue_sectors),
        sectors=cfg.sectors,
        queue_limit=cfg.queue_limit,
    )
    a1, a2 = policy.decide(qlens, ctx)
    if not 0 <= a1 < cfg.n_ues:
        raise ValueError(f"policy chose UE {a1} outside 0..{cfg.n_ues - 1}")
    expected = movement_action(world.uav_sector, world.ue_sectors[a1], cfg.sectors)
    if Movement(a2) != expected:
        raise ValueError(
            f"policy movement {a2} inconsistent with geometry (expected {expected})"
        )

    new_sector = apply_movement(world.uav_sector, Movement(a2), cfg.sectors)
    will_deliver = 1 if world.queues[a1].items else 0

    # Deduct energy before mutating anything else so exhaustion is atomic.
    battery_after = consume_energy(world.battery, world.ledger, Movement(a2), will_deliver, cfg)
    energy_spent = world.battery - battery_after

    if observer is not None:
        observer(
            StateActionView(
                qlens=qlens,
                active_ue=world.active_ue,
                uav_sector=world.uav_sector,
                t=world.clock,
                a1=a1,
                a2=int(a2),
            )
        )

    world.uav_sector = new_sector
    world.battery = battery_after
    if will_deliver:
        if cfg.euclidean_alpha:
            alpha = _euclidean_alpha(world, a1)
        else:
            dist = angular_distance(world.uav_sector, world.ue_sectors[a1], cfg.sectors)
            alpha = scale_alpha(dist, world.ring.max_distance)
        service_time = sample_service(world.rng.service, cfg.mu_s) * alpha
        world.queues[a1].dequeue()
        world.clock += service_time
    else:
        service_time = 0.0
        world.clock += cfg.idle_time

    ue_mobility_step(world.mobility, world.ue_sectors, world.ring, world.rng.mobility)
    world.active_ue = a1
    world.event += 1

    return EventOutcome(
        served_ue=a1,
        movement=Movement(a2),
        service_time=service_time,
        delivered=will_deliver,
        drops_this_event=drops,
        energy_spent=energy_spent,
    )
