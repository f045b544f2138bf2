"""Live demonstration bridge: paced simulation over a WebSocket.

One session per process.  The simulator advances at a human speed
(events per second), every event's state is broadcast to all connected
clients, and UE selections arrive through a FIFO mailbox that is drained
only between events, so a command can never mutate mid-event state.

Wire protocol (one JSON object per message, discriminated by "kind"):
  server -> client:  hello, state, error
  client -> server:  select {ue}, pause, resume, speed {value}
"""

import asyncio
import contextlib
import json

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import SimConfig
from .errors import BatteryExhausted
from .policy import ScriptedExpert, StickySelectionPolicy
from .trajectory import TrajectoryRecord, TrajectoryWriter
from .world import WorldState, step_event


def snapshot(world: WorldState) -> dict:
    """Project the mutable world onto the wire-facing state payload."""
    return {
        "kind": "state",
        "frame": world.frame,
        "event": world.event,
        "q": world.queue_lengths(),
        "queue_limit": world.cfg.queue_limit,
        "active_ue": world.active_ue,
        "uav_sector": world.uav_sector,
        "ue_sectors": list(world.ue_sectors),
        "ue_positions": [[float(x), float(y)] for x, y in world.mobility.positions],
        "battery": world.battery,
        "drops_cumulative": world.drops_cumulative(),
        "clock": world.clock,
    }


class Session:
    """Single shared simulation stepped by a background task."""

    def __init__(self, cfg: SimConfig, speed: float = 2.0, trajectory_out=None):
        cfg.validate()
        self.cfg = cfg
        self.world = WorldState(cfg, run_index=0)
        self.world.begin_frame()
        self.policy = StickySelectionPolicy(ScriptedExpert())
        self.running = True
        self.speed = float(speed)
        self.clients: set = set()
        self.mailbox: asyncio.Queue = asyncio.Queue()
        self.writer = TrajectoryWriter(trajectory_out) if trajectory_out else None
        self.events_stepped = 0
        self._task = None

    # -- commands ----------------------------------------------------------

    def apply_command(self, cmd: dict):
        kind = cmd.get("kind")
        if kind == "select":
            self.policy.select(int(cmd["ue"]))
        elif kind == "pause":
            self.running = False
        elif kind == "resume":
            self.running = True
        elif kind == "speed":
            # clamp rather than error: slider input is easy to overdrive
            self.speed = min(max(float(cmd["value"]), 0.1), 200.0)

    def validate_command(self, cmd) -> str:
        """Returns an error string for bad client input, empty when fine."""
        if not isinstance(cmd, dict) or "kind" not in cmd:
            return "message must be an object with a 'kind' field"
        kind = cmd["kind"]
        if kind == "select":
            ue = cmd.get("ue")
            if not isinstance(ue, int) or isinstance(ue, bool):
                return "select needs an integer 'ue'"
            if not 0 <= ue < self.cfg.n_ues:
                return f"ue {ue} outside 0..{self.cfg.n_ues - 1}"
        elif kind == "speed":
            v = cmd.get("value")
            if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
                return "speed needs a positive number 'value'"
        elif kind not in ("pause", "resume"):
            return f"unknown kind {kind!r}"
        return ""

    # -- stepping ----------------------------------------------------------

    def step_once(self) -> dict:
        """One event plus frame bookkeeping; returns the broadcast payload."""
        if self.world.event >= self.cfg.events_per_frame:
            self.world.begin_frame()
        frame, event = self.world.frame, self.world.event
        view_box = []
        try:
            step_event(self.world, self.policy, observer=view_box.append)
        except BatteryExhausted:
            self.running = False
            return {"kind": "error", "message": "battery exhausted, session paused"}
        if self.writer is not None:
            view = view_box[0]
            # field semantics identical to the scripted recorder: ue_sectors
            # read after the event's mobility step
            self.writer.append(TrajectoryRecord(
                run=0,
                frame=frame,
                event=event,
                q=list(view.qlens),
                active_ue=view.active_ue,
                uav_sector=view.uav_sector,
                ue_sectors=list(self.world.ue_sectors),
                a1=view.a1,
                a2=view.a2,
                t=view.t,
                source="human",
            ))
        self.events_stepped += 1
        return snapshot(self.world)

    async def broadcast(self, payload: dict):
        text = json.dumps(payload)
        dead = []
        for ws in self.clients:
            try:
                await ws.send_text(text)
            except Exception:
                dead.append(ws)
        for ws in dead:
            self.clients.discard(ws)

    async def run_loop(self):
        while True:
            while not self.mailbox.empty():
                self.apply_command(self.mailbox.get_nowait())
            if self.running:
                payload = self.step_once()
                await self.broadcast(payload)
            await asyncio.sleep(1.0 / self.speed)

    def close(self):
        if self.writer is not None:
            self.writer.close()


def create_app(cfg: SimConfig = None, speed: float = 2.0, trajectory_out=None,
               static_dir=None) -> FastAPI:
    session = Session(cfg or SimConfig(), speed=speed, trajectory_out=trajectory_out)

    @contextlib.asynccontextmanager
    async def lifespan(app):
        session._task = asyncio.create_task(session.run_loop())
        try:
            yield
        finally:
            session._task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await session._task
            session.close()

    app = FastAPI(title="uavrelay demo bridge", lifespan=lifespan)
    app.state.session = session

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session.clients.add(ws)
        await ws.send_text(json.dumps({
            "kind": "hello",
            "n_ues": session.cfg.n_ues,
            "sectors": session.cfg.sectors,
            "queue_limit": session.cfg.queue_limit,
        }))
        await ws.send_text(json.dumps(snapshot(session.world)))
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    cmd = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(
                        {"kind": "error", "message": "invalid JSON"}))
                    continue
                problem = session.validate_command(cmd)
                if problem:
                    await ws.send_text(json.dumps({"kind": "error", "message": problem}))
                    continue
                await session.mailbox.put(cmd)
        except WebSocketDisconnect:
            pass
        finally:
            session.clients.discard(ws)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def run_server(cfg: SimConfig, host: str = "127.0.0.1", port: int = 8000,
               speed: float = 2.0, trajectory_out=None, static_dir=None):
    import uvicorn

    app = create_app(cfg, speed=speed, trajectory_out=trajectory_out,
                     static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
