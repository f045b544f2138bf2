"""Run orchestration: whole seeded runs, trajectory capture, frame metrics."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .config import SimConfig
from .errors import BatteryExhausted
from .metrics import FrameMetrics, aggregate_frame
from .trajectory import TrajectoryRecord
from .world import WorldState, step_event


@dataclass
class RunResult:
    run_index: int
    records: list
    frames: list  # FrameMetrics per completed (possibly partial) frame
    truncated: bool = False
    truncated_at: tuple = None  # (frame, event) where the battery gave out
    battery_initial: float = 0.0
    battery_final: float = 0.0
    sim_seconds: float = 0.0
    delivered: int = 0
    drops: int = 0

    @property
    def energy_used(self) -> float:
        return self.battery_initial - self.battery_final


def simulate_run(
    cfg: SimConfig,
    run_index: int,
    policy,
    source: str = "scripted",
    record: bool = True,
) -> RunResult:
    """One run of cfg.frames frames; stops early only on battery exhaustion."""
    world = WorldState(cfg, run_index)
    records = []
    frame_rows = []
    truncated = False
    truncated_at = None

    for f in range(cfg.frames):
        world.begin_frame()
        outcomes = []
        for e in range(cfg.events_per_frame):
            view_box = []
            observer = view_box.append if record else None
            try:
                outcome = step_event(world, policy, observer=observer)
            except BatteryExhausted:
                truncated = True
                truncated_at = (f, e)
                break
            outcomes.append(outcome)
            if record:
                view = view_box[0]
                records.append(
                    TrajectoryRecord(
                        run=run_index,
                        frame=f,
                        event=e,
                        q=list(view.qlens),
                        active_ue=view.active_ue,
                        uav_sector=view.uav_sector,
                        ue_sectors=list(world.ue_sectors),
                        a1=view.a1,
                        a2=view.a2,
                        t=view.t,
                        source=source,
                    )
                )
        if outcomes:
            frame_rows.append(aggregate_frame(f, outcomes, cfg.packet_size_bits))
        if truncated:
            break

    assert world.conservation_ok(), "packet accounting failed to close"
    return RunResult(
        run_index=run_index,
        records=records,
        frames=frame_rows,
        truncated=truncated,
        truncated_at=truncated_at,
        battery_initial=world.battery_initial,
        battery_final=world.battery,
        sim_seconds=world.clock,
        delivered=sum(fm.delivered for fm in frame_rows),
        drops=sum(fm.drops for fm in frame_rows),
    )


def simulate_many(
    cfg: SimConfig,
    policy_factory,
    source: str = "scripted",
    record: bool = True,
    workers: int = 1,
) -> list:
    """All cfg.runs runs, optionally across threads.

    Runs never share generator state (streams are keyed by run index), so
    scheduling order cannot change results; output is ordered by run index
    either way.
    """
    indices = list(range(cfg.runs))
    if workers <= 1 or cfg.runs == 1:
        return [simulate_run(cfg, i, policy_factory(i), source, record) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(simulate_run, cfg, i, policy_factory(i), source, record)
            for i in indices
        ]
        return [f.result() for f in futures]


def report_rows(policy_name: str, results) -> list:
    """Flatten run results into emit_report input rows."""
    rows = []
    for res in results:
        for fm in res.frames:
            rows.append((policy_name, res.run_index, fm))
    return rows
