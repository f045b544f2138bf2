"""Scheduling policies: the scripted demonstrator and learned or manual stand-ins.

A policy maps (queue lengths, context) to a pair (a1, a2): the user to
serve and the movement action.  a2 is always the geometric single-step
action toward the chosen user's sector, so policies only really choose a1.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import movement_action


@dataclass(frozen=True)
class PolicyContext:
    """Read-only view of the world a policy may condition on."""

    active_ue: int
    uav_sector: int
    ue_sectors: tuple
    sectors: int
    queue_limit: int


@dataclass(frozen=True)
class ExpertConfig:
    hysteresis_delta: int = 10


def scripted_select(qlens, current: int, delta: int) -> int:
    """Longest-queue selection with a switching margin.

    Picks the lowest-index longest queue, but keeps the current user unless
    the winner leads it by more than delta packets.  The margin suppresses
    flapping between near-equal queues.
    """
    if not qlens:
        raise ValueError("qlens is empty")
    if not 0 <= current < len(qlens):
        raise ValueError(f"current UE {current} outside 0..{len(qlens) - 1}")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    m = 0
    for i in range(1, len(qlens)):
        if qlens[i] > qlens[m]:
            m = i
    if qlens[m] - qlens[current] <= delta:
        return current
    return m


class ScriptedExpert:
    """The demonstrator: longest queue with hysteresis, geometric movement."""

    name = "expert"

    def __init__(self, cfg: ExpertConfig = ExpertConfig()):
        self.cfg = cfg

    def decide(self, qlens, ctx: PolicyContext):
        a1 = scripted_select(qlens, ctx.active_ue, self.cfg.hysteresis_delta)
        a2 = movement_action(ctx.uav_sector, ctx.ue_sectors[a1], ctx.sectors)
        return a1, int(a2)


class ModelPolicy:
    """Serves whichever user the trained network scores highest."""

    name = "model"

    def __init__(self, model):
        self.model = model

    def decide(self, qlens, ctx: PolicyContext):
        from .nn import forward
        from .trajectory import encode_features

        x = encode_features(qlens, ctx.active_ue, self.model.feature_spec)
        probs = forward(self.model, x)
        a1 = int(np.argmax(probs))
        a2 = movement_action(ctx.uav_sector, ctx.ue_sectors[a1], ctx.sectors)
        return a1, int(a2)


class StickySelectionPolicy:
    """Wraps a base policy; a manual selection overrides it until replaced.

    The demo session feeds human picks through this: once a user is chosen
    it stays chosen across events (movement is still recomputed from
    geometry every event) until the next pick arrives.
    """

    name = "human"

    def __init__(self, base):
        self.base = base
        self.selection = None

    def select(self, ue: int):
        self.selection = ue

    def decide(self, qlens, ctx: PolicyContext):
        if self.selection is not None:
            a1 = self.selection
            if not 0 <= a1 < len(qlens):
                raise ValueError(f"selection {a1} outside 0..{len(qlens) - 1}")
        else:
            a1, _ = self.base.decide(qlens, ctx)
        a2 = movement_action(ctx.uav_sector, ctx.ue_sectors[a1], ctx.sectors)
        return a1, int(a2)
