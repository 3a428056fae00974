"""Local game service: play, record, and mirror sessions over JSON/HTTP.

The engine stays the single legality authority; the service translates
requests, streams engine events per game, and writes demo/metric files when
sessions close. Training never happens here.

Endpoints (payload schemas in docs/api.md):
    POST /games                    create a game (standard or mirror)
    GET  /games/{id}               current state
    GET  /games/{id}/legal?unit=k  branch masks, moves, attacks + forecasts
    POST /games/{id}/actions       submit one blue unit action
    POST /games/{id}/end-phase     run the enemy phase
    GET  /games/{id}/events        event stream (SSE; ?since=N, ?follow=0)
    GET  /demos/{session}          download a recorded demo file
    GET  /models                   list available checkpoints
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse, JSONResponse, StreamingResponse

from . import standard_ai
from .demos import DemoSession
from .encoding import action_masks
from .engine import (
    ActionTriple,
    CombatForecast,
    EngineError,
    GameConfig,
    GameState,
    IllegalAction,
    Outcome,
    PhaseError,
    Team,
    UnitSpec,
    advance_phase,
    apply_action,
    attackable_targets,
    combat_forecast,
    default_config,
    new_game,
    phase_complete,
    reachable_tiles,
)
from .metrics import EpisodeMetrics, MetricsWriter
from .mirror_runtime import MirrorPolicy


def state_to_json(state: GameState, config: GameConfig, game_id: str, mode: str) -> dict:
    return {
        "game_id": game_id,
        "mode": mode,
        "phase": state.phase.value,
        "outcome": state.outcome.value,
        "learner_action_count": state.learner_action_count,
        "max_learner_actions": config.max_learner_actions,
        "terrain": state.tile_map.to_rows(),
        "units": [
            {
                "team": u.team.value,
                "slot": u.slot,
                "move_type": u.spec.move_type.value,
                "weapon": u.spec.weapon.value,
                "stats": u.spec.to_json(),
                "attack_range": u.spec.attack_range,
                "position": u.position,
                "current_hp": u.current_hp,
                "acted": u.acted,
                "alive": u.alive,
            }
            for u in state.units
        ],
    }


def forecast_to_json(fc: CombatForecast) -> dict:
    return {
        "per_hit_damage_attacker": fc.per_hit_damage_attacker,
        "per_hit_damage_defender": fc.per_hit_damage_defender,
        "attacker_followup": fc.attacker_followup,
        "defender_followup": fc.defender_followup,
        "defender_can_counter": fc.defender_can_counter,
        "projected_attacker_hp": fc.projected_attacker_hp,
        "projected_defender_hp": fc.projected_defender_hp,
    }


@dataclass
class GameSession:
    game_id: str
    mode: str
    state: GameState
    session_id: str
    demo: DemoSession | None
    mirror: MirrorPolicy | None
    metrics: EpisodeMetrics = field(default_factory=EpisodeMetrics)
    events: list[dict] = field(default_factory=list)
    episode: int = 0
    closed: bool = False

    def push_events(self, events) -> None:
        for e in events:
            payload = e.to_json()
            payload["seq"] = len(self.events)
            self.events.append(payload)
            self.metrics.observe(e)


class Service:
    def __init__(self, config: GameConfig, data_dir: str | Path = "service_data", models_dir: str | Path | None = None):
        self.config = config
        self.data_dir = Path(data_dir)
        self.demos_dir = self.data_dir / "demos"
        self.metrics_dir = self.data_dir / "metrics"
        self.models_dir = Path(models_dir) if models_dir else self.data_dir / "models"
        for d in (self.demos_dir, self.metrics_dir, self.models_dir):
            d.mkdir(parents=True, exist_ok=True)
        self.games: dict[str, GameSession] = {}
        self.demo_sessions: dict[str, DemoSession] = {}
        self.metric_writers: dict[str, MetricsWriter] = {}
        self._counter = 0

    # -- game lifecycle -----------------------------------------------------

    def create_game(self, body: dict) -> GameSession:
        mode = body.get("mode", "standard")
        if mode not in ("standard", "mirror"):
            raise HTTPException(400, f"unknown mode {mode!r}")
        seed = int(body.get("seed", int(time.time_ns()) % (2**31)))
        session_id = str(body.get("session_id") or f"session-{seed}")
        record = bool(body.get("record", mode == "standard"))

        team_specs = None
        if body.get("team"):
            try:
                team_specs = [UnitSpec.from_json(u) for u in body["team"]]
            except (KeyError, ValueError, TypeError) as exc:
                raise HTTPException(400, f"malformed team: {exc}")

        mirror = None
        if mode == "mirror":
            model = body.get("model")
            if not model:
                raise HTTPException(400, "mirror mode requires a model name")
            path = self.models_dir / model
            if not path.exists():
                raise HTTPException(404, f"model {model!r} not found")
            try:
                mirror = MirrorPolicy.from_checkpoint(
                    path, self.config, rng=np.random.default_rng(seed ^ 0x5EED)
                )
            except Exception as exc:
                raise HTTPException(409, f"cannot load model: {exc}")

        if mode == "standard":
            state = new_game(self.config, mode="standard", mirror_team_specs=team_specs, seed=seed)
        else:
            state = new_game(self.config, mode="mirror", mirror_team_specs=team_specs, seed=seed)

        demo = None
        if mode == "standard" and record:
            demo = self.demo_sessions.get(session_id)
            if demo is None:
                demo = DemoSession(session_id, self.config)
                self.demo_sessions[session_id] = demo
            else:
                demo.next_episode()

        self._counter += 1
        game = GameSession(
            game_id=f"g{self._counter}",
            mode=mode,
            state=state,
            session_id=session_id,
            demo=demo,
            mirror=mirror,
        )
        self.games[game.game_id] = game
        return game

    def get_game(self, game_id: str) -> GameSession:
        game = self.games.get(game_id)
        if game is None:
            raise HTTPException(404, f"no game {game_id!r}")
        return game

    def finalize(self, game: GameSession) -> None:
        if game.closed:
            return
        game.closed = True
        if game.demo is not None:
            game.demo.flush(self.demos_dir / f"{game.session_id}.jsonl")
        writer = self.metric_writers.get(game.session_id)
        if writer is None:
            label = "standard" if game.mode == "standard" else "mirror"
            writer = MetricsWriter({Team.BLUE: label, Team.RED: "player"})
            self.metric_writers[game.session_id] = writer
        writer.add_episode(game.episode, game.metrics)
        writer.save(self.metrics_dir / f"{game.session_id}.csv")

    # -- actions --------------------------------------------------------------

    def submit_action(self, game: GameSession, body: dict) -> list[dict]:
        if game.state.outcome is not Outcome.ONGOING:
            raise HTTPException(409, "game is over")
        if game.state.phase is not Team.BLUE:
            raise HTTPException(409, "not the player phase")
        try:
            slot = int(body["unit"])
            action = ActionTriple(int(body["action_type"]), int(body["tile"]), int(body.get("target", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(400, f"malformed action: {exc}")
        before = len(game.events)
        state = game.state
        try:
            if game.demo is not None:
                game.demo.record(state, Team.BLUE, slot, action)
            new_state, events = apply_action(state, Team.BLUE, slot, action, self.config)
        except IllegalAction as exc:
            raise HTTPException(422, f"illegal action: {exc.reason}")
        game.state = new_state
        game.push_events(events)
        if new_state.outcome is not Outcome.ONGOING:
            self.finalize(game)
        return game.events[before:]

    def end_phase(self, game: GameSession) -> list[dict]:
        if game.state.outcome is not Outcome.ONGOING:
            raise HTTPException(409, "game is over")
        if game.state.phase is not Team.BLUE:
            raise HTTPException(409, "not the player phase")
        if not phase_complete(game.state):
            raise HTTPException(409, "living player units still have turns")
        before = len(game.events)
        state, events = advance_phase(game.state)
        game.state = state
        game.push_events(events)
        if game.mode == "standard":
            state, red_events = standard_ai.play_phase(state, self.config, Team.RED)
        else:
            state, red_events = game.mirror.play_phase(state, Team.RED)
        game.state = state
        game.push_events(red_events)
        if state.outcome is Outcome.ONGOING:
            state, back = advance_phase(state)
            game.state = state
            game.push_events(back)
        else:
            self.finalize(game)
        return game.events[before:]

    def legal(self, game: GameSession, slot: int) -> dict:
        state = game.state
        if state.phase is not Team.BLUE:
            raise HTTPException(409, "not the player phase")
        unit = state.unit(Team.BLUE, slot)
        if not unit.alive or unit.acted:
            raise HTTPException(422, "unit cannot act")
        masks = action_masks(state, Team.BLUE, slot, self.config)
        reach = sorted(reachable_tiles(state, unit, self.config))
        pairs = attackable_targets(state, unit, self.config)
        attacks = []
        for target in sorted({s for s, _ in pairs}):
            defender = state.unit(Team.RED, target)
            attacks.append(
                {
                    "target": target,
                    "launch_tiles": [t for s, t in pairs if s == target],
                    "forecast": forecast_to_json(combat_forecast(state, unit, defender)),
                }
            )
        return {
            "unit": slot,
            "masks": masks.to_json(),
            "moves": reach,
            "attacks": attacks,
        }


def create_app(
    config: GameConfig | None = None,
    data_dir: str | Path = "service_data",
    models_dir: str | Path | None = None,
) -> FastAPI:
    service = Service(config or default_config(), data_dir=data_dir, models_dir=models_dir)
    app = FastAPI(title="mirrortactics service")
    app.state.service = service

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        code = 422 if isinstance(exc, (IllegalAction, PhaseError)) else 400
        return JSONResponse(status_code=code, content={"error": str(exc)})

    @app.post("/games")
    async def create_game(body: dict):
        game = service.create_game(body)
        return {
            "game_id": game.game_id,
            "session_id": game.session_id,
            "state": state_to_json(game.state, service.config, game.game_id, game.mode),
        }

    @app.get("/games/{game_id}")
    async def get_game(game_id: str):
        game = service.get_game(game_id)
        return {"state": state_to_json(game.state, service.config, game.game_id, game.mode)}

    @app.get("/games/{game_id}/legal")
    async def legal(game_id: str, unit: int = Query(...)):
        game = service.get_game(game_id)
        return service.legal(game, unit)

    @app.post("/games/{game_id}/actions")
    async def actions(game_id: str, body: dict):
        game = service.get_game(game_id)
        events = service.submit_action(game, body)
        return {
            "events": events,
            "state": state_to_json(game.state, service.config, game.game_id, game.mode),
        }

    @app.post("/games/{game_id}/end-phase")
    async def end_phase(game_id: str):
        game = service.get_game(game_id)
        events = service.end_phase(game)
        return {
            "events": events,
            "state": state_to_json(game.state, service.config, game.game_id, game.mode),
        }

    @app.get("/games/{game_id}/events")
    async def events(game_id: str, since: int = -1, follow: int = 0):
        game = service.get_game(game_id)

        def stream():
            cursor = since
            idle = 0.0
            while True:
                while cursor + 1 < len(game.events):
                    cursor += 1
                    e = game.events[cursor]
                    yield f"id: {e['seq']}\ndata: {json.dumps(e)}\n\n"
                    idle = 0.0
                if not follow or game.closed or idle > 60:
                    break
                time.sleep(0.05)
                idle += 0.05

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/demos/{session_id}")
    async def download_demo(session_id: str):
        demo = service.demo_sessions.get(session_id)
        path = service.demos_dir / f"{session_id}.jsonl"
        if demo is not None:
            demo.flush(path)  # serve the live session's current content
        if not path.exists():
            raise HTTPException(404, f"no demos for session {session_id!r}")
        return FileResponse(path, media_type="application/x-ndjson", filename=path.name)

    @app.get("/models")
    async def models():
        entries = []
        for p in sorted(service.models_dir.glob("*.ckpt")):
            entries.append({"name": p.name, "bytes": p.stat().st_size})
        return {"models": entries}

    return app


def serve(port: int, config: GameConfig | None = None, data_dir="service_data", models_dir=None) -> None:
    import uvicorn

    app = create_app(config, data_dir=data_dir, models_dir=models_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
