"""Sector-ring geometry, user mobility inside wedges, and energy accounting.

Sectors are indexed 1..S around a disc.  Clockwise travel DECREASES the
sector index (with wraparound), so moving clockwise from sector 17 reaches
16, and from sector 1 reaches S.
"""

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import BatteryExhausted


class Movement(IntEnum):
    CLOCKWISE = 0
    COUNTERCLOCKWISE = 1
    HOVER = 2


@dataclass(frozen=True)
class SectorRing:
    """Disc cut into equal angular sectors.

    radius_uav is the flight circle of the relay; radius_ue_band bounds the
    annulus users wander in.  Both only matter for metric-distance scaling
    and for drawing -- scheduling itself works on sector indices.
    """

    sectors: int = 36
    radius_uav: float = 150.0
    radius_ue_band: tuple = (60.0, 140.0)

    @property
    def sector_width(self) -> float:
        """Angular width of one sector, radians."""
        return 2.0 * math.pi / self.sectors

    @property
    def max_distance(self) -> int:
        return self.sectors // 2

    def wedge_bounds(self, sector: int) -> tuple:
        """(theta_lo, theta_hi) of the sector's angular span, radians."""
        _check_sector(sector, self.sectors)
        lo = (sector - 1) * self.sector_width
        return lo, lo + self.sector_width

    def sector_center_angle(self, sector: int) -> float:
        lo, hi = self.wedge_bounds(sector)
        return 0.5 * (lo + hi)

    def uav_position(self, sector: int) -> np.ndarray:
        """Cartesian point of the relay when parked over a sector."""
        theta = self.sector_center_angle(sector)
        return np.array([self.radius_uav * math.cos(theta), self.radius_uav * math.sin(theta)])


def _check_sector(s: int, sectors: int):
    if not 1 <= s <= sectors:
        raise ValueError(f"sector {s} outside 1..{sectors}")


def angular_distance(s1: int, s2: int, sectors: int) -> int:
    """Sector steps along the shorter way around the ring."""
    _check_sector(s1, sectors)
    _check_sector(s2, sectors)
    d = abs(s1 - s2)
    return min(d, sectors - d)


def scale_alpha(dist: float, max_dist: float) -> float:
    """Service-time stretch factor in [1, 2]: 1 overhead, 2 diametrically far."""
    if max_dist <= 0:
        raise ValueError(f"max_dist must be > 0, got {max_dist}")
    if not 0 <= dist <= max_dist:
        raise ValueError(f"distance {dist} outside [0, {max_dist}]")
    return dist / max_dist + 1.0


def movement_action(uav_sector: int, target_sector: int, sectors: int) -> Movement:
    """Single-step action that closes the gap fastest; hover when aligned.

    An exact half-ring tie breaks clockwise.
    """
    _check_sector(uav_sector, sectors)
    _check_sector(target_sector, sectors)
    if uav_sector == target_sector:
        return Movement.HOVER
    cw_steps = (uav_sector - target_sector) % sectors
    ccw_steps = (target_sector - uav_sector) % sectors
    return Movement.CLOCKWISE if cw_steps <= ccw_steps else Movement.COUNTERCLOCKWISE


def apply_movement(sector: int, action: Movement, sectors: int) -> int:
    """Advance one sector in the given direction, wrapping 1..sectors."""
    _check_sector(sector, sectors)
    if action == Movement.CLOCKWISE:
        return (sector - 2) % sectors + 1
    if action == Movement.COUNTERCLOCKWISE:
        return sector % sectors + 1
    if action == Movement.HOVER:
        return sector
    raise ValueError(f"unknown movement action {action!r}")


# ---------------------------------------------------------------------------
# User mobility: Brownian heading, constant speed, reflected at wedge walls.
# ---------------------------------------------------------------------------

HEADING_SIGMA = 0.3  # radians of heading noise per event
UE_SPEED = 0.5  # meters per event


@dataclass
class MobilityState:
    positions: np.ndarray  # (n, 2) meters
    headings: np.ndarray  # (n,) radians
    speed: float = UE_SPEED


def _fold(x: float, lo: float, hi: float) -> float:
    """Reflect x into [lo, hi] (triangle-wave fold)."""
    width = hi - lo
    if width <= 0:
        return lo
    y = (x - lo) % (2.0 * width)
    if y > width:
        y = 2.0 * width - y
    return lo + y


def random_position_in_wedge(ring: SectorRing, sector: int, rng: np.random.Generator) -> np.ndarray:
    """Area-uniform point inside the sector's annular wedge."""
    r_lo, r_hi = ring.radius_ue_band
    r = math.sqrt(rng.uniform(r_lo * r_lo, r_hi * r_hi))
    theta = rng.uniform(*ring.wedge_bounds(sector))
    return np.array([r * math.cos(theta), r * math.sin(theta)])


def init_mobility(ring: SectorRing, ue_sectors, rng: np.random.Generator) -> MobilityState:
    positions = np.stack([random_position_in_wedge(ring, s, rng) for s in ue_sectors])
    headings = rng.uniform(0.0, 2.0 * math.pi, size=len(ue_sectors))
    return MobilityState(positions=positions, headings=headings)


def ue_mobility_step(mob: MobilityState, ue_sectors, ring: SectorRing, rng: np.random.Generator):
    """One Brownian step for every user, reflected to stay in its own wedge."""
    n = len(ue_sectors)
    mob.headings += rng.normal(0.0, HEADING_SIGMA, size=n)
    if mob.speed == 0.0:
        return
    mob.positions[:, 0] += mob.speed * np.cos(mob.headings)
    mob.positions[:, 1] += mob.speed * np.sin(mob.headings)
    r_lo, r_hi = ring.radius_ue_band
    for i in range(n):
        x, y = mob.positions[i]
        r = math.hypot(x, y)
        theta = math.atan2(y, x)
        lo, hi = ring.wedge_bounds(ue_sectors[i])
        # Work with the offset from the wedge start so the wrap at +-pi
        # never lands inside the folding interval.
        dtheta = (theta - lo) % (2.0 * math.pi)
        if dtheta > math.pi:
            dtheta -= 2.0 * math.pi
        r = _fold(r, r_lo, r_hi)
        dtheta = _fold(dtheta, 0.0, hi - lo)
        theta = lo + dtheta
        mob.positions[i, 0] = r * math.cos(theta)
        mob.positions[i, 1] = r * math.sin(theta)


# ---------------------------------------------------------------------------
# Energy bookkeeping.
# ---------------------------------------------------------------------------


@dataclass
class EnergyLedger:
    """Running totals of where the battery went, with per-frame rows."""

    move_total: float = 0.0
    hover_total: float = 0.0
    tx_total: float = 0.0
    frames: list = field(default_factory=list)  # [move, hover, tx] per frame

    def begin_frame(self):
        self.frames.append([0.0, 0.0, 0.0])

    def add(self, move: float, hover: float, tx: float):
        self.move_total += move
        self.hover_total += hover
        self.tx_total += tx
        if not self.frames:
            self.begin_frame()
        row = self.frames[-1]
        row[0] += move
        row[1] += hover
        row[2] += tx

    @property
    def total(self) -> float:
        return self.move_total + self.hover_total + self.tx_total

    def frame_total(self, index: int = -1) -> float:
        return sum(self.frames[index])


def consume_energy(battery: float, ledger: EnergyLedger, movement: Movement, delivered: int, cfg) -> float:
    """Deduct the event's cost and return the new battery level.

    Cost is e_move for a step, e_hover otherwise, plus e_tx per delivery.
    Raises BatteryExhausted (before touching the ledger) if the deduction
    would push the battery below zero.
    """
    if movement in (Movement.CLOCKWISE, Movement.COUNTERCLOCKWISE):
        move, hover = cfg.e_move, 0.0
    else:
        move, hover = 0.0, cfg.e_hover
    tx = cfg.e_tx * delivered
    cost = move + hover + tx
    remaining = battery - cost
    if remaining < 0:
        raise BatteryExhausted(
            f"need {cost:.3f} J but only {battery:.3f} J left"
        )
    ledger.add(move, hover, tx)
    return remaining
