"""Live match service: hosts human-vs-agent (or client-vs-agent) sessions
over a WebSocket JSON protocol.

One session owns one battle at a time and runs a fixed number of consecutive
games with a running score.  The served agent's choice for a turn is computed
server-side and a turn's events are revealed only after the client's choice
for that turn has been committed, so the client can never condition on them.
The full message schema is documented in docs/protocol.md.
"""
import json
import secrets
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agents.base import Policy
from .engine import (
    JointAction, PHASE_TERMINAL, BattleState, GameOptions, TeamConfig,
    encode_observation, start_battle, step)
from .errors import IllegalActionError
from .replay import LogHeader, _event_to_line, write_log
from .gamedata import get_data

PROTO_VERSION = 1
DEFAULT_SESSION_GAMES = 5


# --- player-view snapshot ----------------------------------------------------

def _mon_view(state: BattleState, player: int, viewer: int,
              team_index: int) -> dict:
    """One team member as seen by ``viewer``; hidden fields are absent."""
    side = state.side(player)
    mon = side.mons[team_index]
    cfg = side.team.members[team_index]
    own = player == viewer
    view = {
        "species": cfg.species,
        "hp_fraction": round(mon.hp / mon.max_hp, 4),
        "status": mon.status,
        "fainted": mon.fainted,
        "revealed": mon.revealed,
        "tera_active": mon.is_tera,
        "active_slot": (side.active.index(team_index)
                        if team_index in side.active else None),
    }
    if view["active_slot"] is not None:
        view["boosts"] = {k: v for k, v in mon.boosts.items() if v != 0}
    open_sheets = state.options.open_team_sheets
    if own or open_sheets:
        view["moves"] = list(cfg.moves)
        view["ability"] = cfg.ability
        view["item"] = cfg.item
        view["tera_type"] = cfg.tera_type
    elif mon.revealed:
        view["moves"] = sorted(mon.revealed_moves)
        if mon.is_tera:
            view["tera_type"] = cfg.tera_type
    # stat allocations are never on the wire, not even for the own side's foe
    if own:
        view["stats"] = dict(mon.stats)
    return view


def snapshot(state: BattleState, viewer: int) -> dict:
    """The full player-view state message payload for one client."""
    sides = []
    for player in (0, 1):
        side = state.side(player)
        sides.append({
            "player": player + 1,
            "own": player == viewer,
            "team": [_mon_view(state, player, viewer, i) for i in range(6)],
            "chosen": [i + 1 for i in side.chosen],
            "active": [i + 1 if i is not None else None for i in side.active],
            "tera_used": side.tera_used,
            "conditions": dict(side.conditions),
        })
    return {
        "type": "state",
        "proto": PROTO_VERSION,
        "phase": state.phase,
        "turn": state.turn,
        "weather": state.weather,
        "weather_turns": state.weather_turns,
        "terrain": state.terrain,
        "terrain_turns": state.terrain_turns,
        "sides": sides,
        "winner": state.winner + 1 if state.winner is not None else None,
    }


def request_message(state: BattleState, viewer: int) -> dict:
    """Legality masks for the viewer's next joint choice."""
    obs = encode_observation(state, viewer, n_frames=1)
    return {
        "type": "request",
        "proto": PROTO_VERSION,
        "phase": state.phase,
        "turn": state.turn,
        "legal_a": [int(i) for i in np.flatnonzero(obs.masks[0])],
        "legal_b": [int(i) for i in np.flatnonzero(obs.masks[1])],
        "forbid_pass_pass": obs.forbid_pass_pass,
        "deadline": None,  # untimed by default
    }


# --- session ------------------------------------------------------------------

@dataclass
class Session:
    """One client's run of consecutive games against the served agent."""

    token: str
    agent: Policy
    agent_name: str
    client_team: TeamConfig
    agent_team: TeamConfig
    options: GameOptions
    n_games: int
    seed: int
    out_dir: Path | None = None
    game_index: int = 0  # games completed
    score: list[int] = field(default_factory=lambda: [0, 0])  # [client, agent]
    state: BattleState | None = None
    transcripts: list[str] = field(default_factory=list)
    connected: bool = False

    CLIENT = 0
    AGENT = 1

    @property
    def complete(self) -> bool:
        return self.game_index >= self.n_games

    def start_game(self) -> None:
        game_seed = int(np.random.default_rng(
            (self.seed, self.game_index)).integers(2 ** 31))
        self.state = start_battle(self.client_team, self.agent_team,
                                  game_seed, self.options)

    def agent_action(self) -> JointAction:
        obs = encode_observation(self.state, self.AGENT, n_frames=1)
        rng = np.random.default_rng(
            (self.seed, self.game_index, self.state.turn,
             len(self.state.history)))
        return self.agent.act(obs, rng)

    def commit(self, action: JointAction) -> list[tuple]:
        """Resolve the turn once the client's choice is validated."""
        events, _ = step(self.state, action, self.agent_action())
        return events

    def finish_game(self) -> dict:
        winner = self.state.winner
        self.score[winner] += 1
        log = write_log(self.state.history, self._header())
        self.transcripts.append(log)
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            path = self.out_dir / f"{self.token}-game{self.game_index}.battlelog"
            path.write_text(log)
        self.game_index += 1
        self.state = None
        return {
            "type": "end",
            "proto": PROTO_VERSION,
            "winner": winner + 1,
            "you_won": winner == self.CLIENT,
            "score": {"you": self.score[0], "agent": self.score[1]},
            "games_played": self.game_index,
            "games_total": self.n_games,
            "session_complete": self.complete,
        }

    def _header(self) -> LogHeader:
        return LogHeader(
            data_hash=get_data().content_hash,
            player_names=("you", self.agent_name),
            ratings=(None, None),
            team_sheets=((self.client_team, self.agent_team)
                         if self.options.open_team_sheets else None),
            rules=[f"turn_cap={self.options.turn_cap}",
                   f"open_team_sheets={self.options.open_team_sheets}"],
        )


def _error(message: str, **extra) -> dict:
    return {"type": "error", "proto": PROTO_VERSION, "message": message, **extra}


class MatchService:
    """Session registry plus the per-message protocol logic.

    Transport-independent: `handle` maps one inbound client message to the
    ordered list of outbound messages, so the same logic serves the WebSocket
    endpoint and in-process tests.
    """

    def __init__(self, agent: Policy, teams: list[TeamConfig],
                 agent_name: str = "agent",
                 n_games: int = DEFAULT_SESSION_GAMES, seed: int = 0,
                 options: GameOptions | None = None,
                 out_dir: str | Path | None = None) -> None:
        if not teams:
            raise ValueError("need at least one team")
        self.agent = agent
        self.teams = teams
        self.agent_name = agent_name
        self.n_games = n_games
        self.seed = seed
        self.options = options or GameOptions()
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.sessions: dict[str, Session] = {}

    # -- session management ---------------------------------------------------

    def _new_session(self) -> Session:
        token = secrets.token_hex(16)
        rng = np.random.default_rng((self.seed, len(self.sessions)))
        pick = rng.choice(len(self.teams), size=2, replace=len(self.teams) < 2)
        session = Session(
            token=token, agent=self.agent, agent_name=self.agent_name,
            client_team=self.teams[int(pick[0])],
            agent_team=self.teams[int(pick[1])],
            options=self.options, n_games=self.n_games,
            seed=int(rng.integers(2 ** 31)), out_dir=self.out_dir)
        self.sessions[token] = session
        return session

    # -- protocol -------------------------------------------------------------

    def handle(self, session: Session | None, message: dict
               ) -> tuple[Session | None, list[dict]]:
        """Process one client message; returns (session, replies)."""
        if not isinstance(message, dict) or "type" not in message:
            return session, [_error("message must be an object with a 'type'")]
        mtype = message["type"]
        if session is None:
            if mtype != "hello":
                return None, [_error("first message must be 'hello'")]
            return self._handle_hello(message)
        if mtype == "hello":
            return session, [_error("session already established")]
        if mtype == "choose":
            return session, self._handle_choose(session, message)
        return session, [_error(f"unknown message type {mtype!r}")]

    def _handle_hello(self, message: dict
                      ) -> tuple[Session | None, list[dict]]:
        proto = message.get("proto")
        if proto != PROTO_VERSION:
            return None, [_error(
                f"unsupported proto {proto!r}; server speaks {PROTO_VERSION}")]
        token = message.get("token")
        if token is not None:
            session = self.sessions.get(token)
            if session is None:
                return None, [_error(f"unknown session token {token!r}")]
            if session.connected:
                return None, [_error("session already has a live connection")]
        else:
            session = self._new_session()
            session.start_game()
        session.connected = True
        replies = [{
            "type": "session", "proto": PROTO_VERSION,
            "token": session.token,
            "games_played": session.game_index,
            "games_total": session.n_games,
            "score": {"you": session.score[0], "agent": session.score[1]},
            "session_complete": session.complete,
        }]
        if not session.complete:
            replies += [snapshot(session.state, Session.CLIENT),
                        request_message(session.state, Session.CLIENT)]
        return session, replies

    def _handle_choose(self, session: Session, message: dict) -> list[dict]:
        if session.complete:
            return [_error("session is complete; no choices expected")]
        actions = message.get("actions")
        if (not isinstance(actions, list) or len(actions) != 2
                or not all(isinstance(a, int) for a in actions)):
            return [_error("'actions' must be two integer indices"),
                    request_message(session.state, Session.CLIENT)]
        joint = JointAction(actions[0], actions[1])
        try:
            events = session.commit(joint)
        except IllegalActionError as exc:
            return [_error(str(exc), index=exc.slot_index),
                    request_message(session.state, Session.CLIENT)]
        replies: list[dict] = [
            {"type": "commit", "proto": PROTO_VERSION, "turn": session.state.turn},
            {"type": "reveal", "proto": PROTO_VERSION,
             "events": [_event_to_line(e) for e in events]},
        ]
        if session.state.phase == PHASE_TERMINAL:
            replies.append(self.finish_and_advance(session))
            if not session.complete:
                replies += [snapshot(session.state, Session.CLIENT),
                            request_message(session.state, Session.CLIENT)]
        else:
            replies += [snapshot(session.state, Session.CLIENT),
                        request_message(session.state, Session.CLIENT)]
        return replies

    def finish_and_advance(self, session: Session) -> dict:
        end = session.finish_game()
        if not session.complete:
            session.start_game()
        return end


# --- WebSocket app ------------------------------------------------------------

def build_app(service: MatchService):
    """FastAPI app exposing the service at /ws plus a /healthz probe."""
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect

    app = FastAPI(title="doublesim match service")
    app.state.service = service

    @app.get("/healthz")
    def healthz() -> dict:
        return {"ok": True, "proto": PROTO_VERSION,
                "sessions": len(service.sessions)}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        session: Session | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    message = json.loads(raw)
                except json.JSONDecodeError as exc:
                    await ws.send_text(json.dumps(_error(
                        f"invalid JSON: {exc.msg}")))
                    continue
                session, replies = service.handle(session, message)
                for reply in replies:
                    await ws.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            if session is not None:
                session.connected = False  # suspended; resumable by token

    return app


def serve_match(agent: Policy, teams: list[TeamConfig], host: str = "127.0.0.1",
                port: int = 8765, **service_kwargs) -> None:
    """Run the match service until interrupted."""
    import uvicorn

    service = MatchService(agent, teams, **service_kwargs)
    uvicorn.run(build_app(service), host=host, port=port, log_level="warning")
