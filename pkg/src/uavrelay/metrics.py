"""Frame-level performance metrics and the comparison report CSV."""

import csv
from dataclasses import dataclass

from .errors import DataError

REPORT_COLUMNS = (
    "policy",
    "run",
    "frame",
    "edt",
    "drops",
    "energy",
    "longest_session",
    "delivered",
)


@dataclass(frozen=True)
class FrameMetrics:
    frame: int
    delivered: int
    service_time_total: float  # seconds spent transmitting
    drops: int
    energy: float  # joules drawn this frame
    edt: float
    longest_session: int


def edt_frame(
    l_bits: float,
    delivered: int,
    service_time_total: float,
    drops: int,
    energy: float,
) -> float:
    """Delivered bits per service-second, discounted by drops and energy.

    edt = l_bits * delivered / (service_time_total * (1 + drops) * energy)
    """
    if delivered < 0 or drops < 0:
        raise ValueError("delivered and drops must be >= 0")
    if service_time_total <= 0:
        raise ValueError(f"service_time_total must be > 0, got {service_time_total}")
    if energy <= 0:
        raise ValueError(f"energy must be > 0, got {energy}")
    return l_bits * delivered / (service_time_total * (1 + drops) * energy)


def longest_session(served) -> int:
    """Length of the longest constant run in a served-user sequence."""
    best = 0
    current = 0
    previous = object()
    for ue in served:
        current = current + 1 if ue == previous else 1
        previous = ue
        if current > best:
            best = current
    return best


def aggregate_frame(frame_index: int, outcomes, l_bits: float) -> FrameMetrics:
    """Fold one frame's event outcomes into a metrics row.

    A frame that delivered nothing scores edt 0 without touching the
    degenerate-denominator checks.
    """
    if not outcomes:
        raise ValueError(f"frame {frame_index} has no events")
    delivered = sum(o.delivered for o in outcomes)
    service_time_total = sum(o.service_time for o in outcomes)
    drops = sum(sum(o.drops_this_event) for o in outcomes)
    energy = sum(o.energy_spent for o in outcomes)
    if delivered == 0:
        edt = 0.0
    else:
        edt = edt_frame(l_bits, delivered, service_time_total, drops, energy)
    return FrameMetrics(
        frame=frame_index,
        delivered=delivered,
        service_time_total=service_time_total,
        drops=drops,
        energy=energy,
        edt=edt,
        longest_session=longest_session(o.served_ue for o in outcomes),
    )


def emit_report(rows, path) -> int:
    """Write (policy, run, FrameMetrics) rows as CSV; returns the row count.

    Frames must be contiguous from 0 within each (policy, run) group --
    a gap means an aggregation bug upstream, so it is rejected loudly.
    """
    rows = list(rows)
    seen = {}
    for policy, run, fm in rows:
        key = (policy, run)
        frames = seen.setdefault(key, set())
        if fm.frame in frames:
            raise DataError(f"duplicate frame {fm.frame} for policy={policy} run={run}")
        frames.add(fm.frame)
    for (policy, run), frames in seen.items():
        for k in range(max(frames) + 1):
            if k not in frames:
                raise DataError(f"missing frame {k} for policy={policy} run={run}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for policy, run, fm in rows:
            writer.writerow(
                [
                    policy,
                    run,
                    fm.frame,
                    repr(fm.edt),
                    fm.drops,
                    repr(fm.energy),
                    fm.longest_session,
                    fm.delivered,
                ]
            )
    return len(rows)


def read_report(path):
    """Load an emit_report CSV back into (policy, run, FrameMetrics) rows.

    service_time_total is not serialized, so it reads back as nan-free 0.0;
    the report consumers only use the listed columns.
    """
    out = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
                raise DataError(f"{path}: unexpected report header {reader.fieldnames}")
            for row in reader:
                fm = FrameMetrics(
                    frame=int(row["frame"]),
                    delivered=int(row["delivered"]),
                    service_time_total=0.0,
                    drops=int(row["drops"]),
                    energy=float(row["energy"]),
                    edt=float(row["edt"]),
                    longest_session=int(row["longest_session"]),
                )
                out.append((row["policy"], int(row["run"]), fm))
    except OSError as exc:
        raise DataError(f"cannot read report {path}: {exc}") from None
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: malformed report row: {exc}") from None
    return out
