"""Demonstration records: JSONL persistence, feature encoding, splits.

One record per event: the queue state the policy saw and the action it
took.  Files are JSON Lines with a fixed field set so recordings from the
simulator, from a live demo session, and from a replayed model all train
through the same path.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError

FIELD_NAMES = (
    "run",
    "frame",
    "event",
    "q",
    "active_ue",
    "uav_sector",
    "ue_sectors",
    "a1",
    "a2",
    "t",
    "source",
)

SOURCES = ("scripted", "human", "clone")


@dataclass
class TrajectoryRecord:
    run: int
    frame: int
    event: int
    q: list
    active_ue: int
    uav_sector: int
    ue_sectors: list
    a1: int
    a2: int
    t: float
    source: str = "scripted"

    def to_json(self) -> str:
        # Fixed key order keeps seeded recordings byte-identical.
        obj = {name: getattr(self, name) for name in FIELD_NAMES}
        return json.dumps(obj, separators=(", ", ": "))


def _require(cond: bool, where: str, msg: str):
    if not cond:
        raise DataError(f"{where}: {msg}")


def record_from_obj(obj: dict, where: str = "<record>") -> TrajectoryRecord:
    """Validate one parsed JSON object against the record schema."""
    _require(isinstance(obj, dict), where, f"expected an object, got {type(obj).__name__}")
    missing = [k for k in FIELD_NAMES if k not in obj]
    _require(not missing, where, f"missing field(s) {missing}")
    extra = [k for k in obj if k not in FIELD_NAMES]
    _require(not extra, where, f"unknown field(s) {extra}")
    for name in ("run", "frame", "event", "active_ue", "uav_sector", "a1", "a2"):
        _require(
            isinstance(obj[name], int) and not isinstance(obj[name], bool),
            where,
            f"field {name!r} must be an integer, got {obj[name]!r}",
        )
    for name in ("q", "ue_sectors"):
        value = obj[name]
        ok = isinstance(value, list) and all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        )
        _require(ok, where, f"field {name!r} must be a list of integers")
    _require(
        isinstance(obj["t"], (int, float)) and not isinstance(obj["t"], bool),
        where,
        f"field 't' must be a number, got {obj['t']!r}",
    )
    _require(obj["source"] in SOURCES, where, f"field 'source' must be one of {SOURCES}")
    _require(len(obj["q"]) == len(obj["ue_sectors"]), where, "q and ue_sectors length mismatch")
    _require(0 <= obj["a1"] < len(obj["q"]), where, f"a1 {obj['a1']} outside the UE range")
    return TrajectoryRecord(
        run=obj["run"],
        frame=obj["frame"],
        event=obj["event"],
        q=list(obj["q"]),
        active_ue=obj["active_ue"],
        uav_sector=obj["uav_sector"],
        ue_sectors=list(obj["ue_sectors"]),
        a1=obj["a1"],
        a2=obj["a2"],
        t=float(obj["t"]),
        source=obj["source"],
    )


def write_jsonl(records, path) -> int:
    """Write records one JSON object per line; returns the count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json())
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path, strict: bool = True):
    """Load a trajectory file.

    strict=True raises DataError naming the first bad line; strict=False
    returns every record before the first bad line (a salvage mode for
    truncated recordings).
    """
    records = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read trajectories {path}: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
                records.append(record_from_obj(obj, where))
            except (json.JSONDecodeError, DataError) as exc:
                if strict:
                    if isinstance(exc, DataError):
                        raise
                    raise DataError(f"{where}: invalid JSON: {exc}") from None
                return records
    return records


class TrajectoryWriter:
    """Append-only incremental writer, flushed per record.

    Used by live sessions so a crash still leaves a loadable prefix.
    """

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8")
        self.count = 0

    def append(self, rec: TrajectoryRecord):
        self._fh.write(rec.to_json())
        self._fh.write("\n")
        self._fh.flush()
        self.count += 1

    def close(self):
        if not self._fh.closed:
            self._fh.close()


# ---------------------------------------------------------------------------
# Feature encoding and dataset splitting.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureSpec:
    """How a queue state becomes a network input vector.

    Queue lengths are scaled by normalize_by (the queue limit) into [0, 1].
    The one-hot of the currently served user is on by default: the
    demonstrator's switching margin is relative to that user, so identical
    queue snapshots demand different actions depending on who is being
    served.  Without the one-hot no learner can exceed roughly 0.91
    agreement on default traffic (measured as the majority-vote ceiling
    over exact repeated states).
    """

    n_ues: int
    normalize_by: int = 200
    include_active_ue_onehot: bool = True

    @property
    def feature_dim(self) -> int:
        return 2 * self.n_ues if self.include_active_ue_onehot else self.n_ues

    def to_obj(self) -> dict:
        return {
            "n_ues": self.n_ues,
            "normalize_by": self.normalize_by,
            "include_active_ue_onehot": self.include_active_ue_onehot,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "FeatureSpec":
        try:
            return cls(
                n_ues=int(obj["n_ues"]),
                normalize_by=int(obj["normalize_by"]),
                include_active_ue_onehot=bool(obj["include_active_ue_onehot"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"bad feature spec {obj!r}: {exc}") from None


def encode_features(qlens, active_ue: int, spec: FeatureSpec) -> np.ndarray:
    """Normalized feature vector for one state."""
    if len(qlens) != spec.n_ues:
        raise DataError(f"state has {len(qlens)} queues, spec expects {spec.n_ues}")
    x = np.empty(spec.feature_dim, dtype=np.float64)
    for i, qlen in enumerate(qlens):
        if not 0 <= qlen <= spec.normalize_by:
            raise DataError(f"queue length {qlen} outside [0, {spec.normalize_by}]")
        x[i] = qlen / spec.normalize_by
    if spec.include_active_ue_onehot:
        if not 0 <= active_ue < spec.n_ues:
            raise DataError(f"active_ue {active_ue} outside 0..{spec.n_ues - 1}")
        x[spec.n_ues :] = 0.0
        x[spec.n_ues + active_ue] = 1.0
    return x


def encode_state(record: TrajectoryRecord, spec: FeatureSpec) -> np.ndarray:
    return encode_features(record.q, record.active_ue, spec)


def to_arrays(records, spec: FeatureSpec):
    """Stack records into (X, y) training arrays; labels are a1."""
    if not records:
        raise DataError("no records to encode")
    x = np.empty((len(records), spec.feature_dim), dtype=np.float64)
    y = np.empty(len(records), dtype=np.int64)
    for i, rec in enumerate(records):
        x[i] = encode_state(rec, spec)
        y[i] = rec.a1
    return x, y


def split_dataset(records, ratio: float = 0.8, seed: int = 0):
    """Deterministic shuffled split into (train, held_out).

    The train side gets round(ratio * N) records; together the two sides
    are a permutation of the input.
    """
    if not records:
        raise DataError("cannot split an empty dataset")
    if not 0.0 <= ratio <= 1.0:
        raise DataError(f"split ratio must be in [0, 1], got {ratio}")
    order = np.random.default_rng(seed).permutation(len(records))
    n_train = int(round(ratio * len(records)))
    train = [records[i] for i in order[:n_train]]
    held = [records[i] for i in order[n_train:]]
    return train, held
