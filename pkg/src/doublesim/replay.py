"""Battle-log protocol: writer, parser, and trajectory reconstruction.

A ``.battlelog`` file is UTF-8 text, one battle per file.  Every line starts
with ``|`` and fields are pipe-delimited with backslash-pipe escaping; the
grammar is documented in ``docs/battlelog.md``.  The header carries the
format id, the data-file hash, player names/ratings, and (when open team
sheets are on) each side's team sheet; the body is the engine's event list.

Reconstruction replays the events over a shadow battle state.  For our own
logs with team sheets the action sequences round-trip exactly; stat
allocations are never in a log, so shadow stats use defaults and HP is
tracked as a fraction (both flagged on the trajectory).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .agents.base import pair_matrix
from .engine.actions import (GIMMICKS, JointAction, SlotAction, encode_action)
from .engine.config import (GameOptions, PokemonConfig, StatAllocation,
                            TeamConfig)
from .engine.obs import Observation, encode_observation
from .engine.state import (PHASE_PREVIEW1, PHASE_PREVIEW2, PHASE_TERMINAL,
                           PHASE_TURN, BattleState, SideState, _make_side)
from .errors import LogParseError, ReconstructionError
from .gamedata import get_data

FORMAT_ID = "doublesim-1"

# field codes: ps = player+slot token, p = player token, i = int, s = string
_SCHEMAS: dict[str, tuple[str, ...]] = {
    "start": ("s",),
    "preview": ("p", "s", "s"),
    "switch": ("ps", "i", "s", "i", "i"),
    "turn": ("i",),
    "move": ("ps", "s", "s"),
    "cant": ("ps", "s", "s", "s", "s"),
    "-terastallize": ("ps", "s"),
    "-miss": ("ps",),
    "-fail": ("ps",),
    "-crit": ("ps",),
    "faint": ("ps",),
    "-activate": ("ps", "s"),
    "-immune": ("ps", "s"),
    "-ability": ("ps", "s"),
    "-item": ("ps", "s"),
    "-status": ("ps", "s"),
    "-singleturn": ("ps", "s"),
    "-damage": ("ps", "i", "i"),
    "-heal": ("ps", "i", "i"),
    "-boost": ("ps", "s", "i"),
    "-unboost": ("ps", "s", "i"),
    "-sidestart": ("p", "s", "i"),
    "-sideend": ("p", "s"),
    "-weather": ("s", "i"),
    "-weatherend": ("s",),
    "-fieldstart": ("s", "i"),
    "-fieldend": ("s",),
    "win": ("p",),
}

_SHEET_FIELDS = ("species", "moves", "ability", "item", "tera_type")


@dataclass
class LogHeader:
    data_hash: str
    player_names: tuple[str, str] = ("p1", "p2")
    ratings: tuple[float | None, float | None] = (None, None)
    team_sheets: tuple[TeamConfig, TeamConfig] | None = None
    rules: tuple[str, ...] = ()


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace("|", "\\|")


def _split_line(line: str, line_no: int) -> list[str]:
    if not line.startswith("|"):
        raise LogParseError("line must start with '|'", line=line_no, column=1)
    fields, cur, i = [], [], 1
    while i < len(line):
        c = line[i]
        if c == "\\":
            if i + 1 >= len(line):
                raise LogParseError("dangling escape", line=line_no, column=i + 1)
            cur.append(line[i + 1])
            i += 2
        elif c == "|":
            fields.append("".join(cur))
            cur = []
            i += 1
        else:
            cur.append(c)
            i += 1
    fields.append("".join(cur))
    return fields


def _ps_token(player: int, slot: int) -> str:
    return f"p{player + 1}{'ab'[slot]}"


def _parse_ps(tok: str, line_no: int) -> tuple[int, int]:
    if len(tok) == 3 and tok[0] == "p" and tok[1] in "12" and tok[2] in "ab":
        return int(tok[1]) - 1, "ab".index(tok[2])
    raise LogParseError(f"bad player-slot token {tok!r}", line=line_no, column=2)


def _parse_p(tok: str, line_no: int) -> int:
    if tok in ("p1", "p2"):
        return int(tok[1]) - 1
    raise LogParseError(f"bad player token {tok!r}", line=line_no, column=2)


def _event_to_line(event: tuple) -> str:
    tag = event[0]
    schema = _SCHEMAS.get(tag)
    if schema is None:
        raise ValueError(f"unknown event tag {tag!r}")
    fields = [tag]
    args = list(event[1:])
    for code in schema:
        if code == "ps":
            fields.append(_ps_token(args.pop(0), args.pop(0)))
        elif code == "p":
            fields.append(f"p{args.pop(0) + 1}")
        elif code == "i":
            fields.append(str(int(args.pop(0))))
        else:
            fields.append(_escape(str(args.pop(0))))
    if args:
        raise ValueError(f"event {event!r} does not fit schema for {tag!r}")
    return "|" + "|".join(fields)


def _line_to_event(fields: list[str], line_no: int) -> tuple:
    tag = fields[0]
    schema = _SCHEMAS.get(tag)
    if schema is None:
        raise LogParseError(f"unknown event tag {tag!r}", line=line_no, column=2)
    if len(fields) - 1 != len(schema):
        raise LogParseError(
            f"{tag!r} expects {len(schema)} fields, got {len(fields) - 1}",
            line=line_no, column=2)
    out: list = [tag]
    for code, fld in zip(schema, fields[1:]):
        if code == "ps":
            out.extend(_parse_ps(fld, line_no))
        elif code == "p":
            out.append(_parse_p(fld, line_no))
        elif code == "i":
            try:
                out.append(int(fld))
            except ValueError:
                raise LogParseError(f"expected integer, got {fld!r}",
                                    line=line_no, column=2) from None
        else:
            out.append(fld)
    return tuple(out)


def _sheet_doc(team: TeamConfig) -> list[dict]:
    return [{"species": m.species, "moves": list(m.moves),
             "ability": m.ability, "item": m.item, "tera_type": m.tera_type}
            for m in team.members]


def write_log(events: list[tuple], header: LogHeader) -> str:
    """Serialize a completed battle's event list.  Canonical and stable."""
    lines = [f"|format|{FORMAT_ID}", f"|datahash|{_escape(header.data_hash)}"]
    for i in (0, 1):
        rating = header.ratings[i]
        lines.append(f"|player|p{i + 1}|{_escape(header.player_names[i])}|"
                     + (f"{rating:g}" if rating is not None else "-"))
    if header.team_sheets is not None:
        for i in (0, 1):
            doc = json.dumps(_sheet_doc(header.team_sheets[i]),
                             separators=(",", ":"))
            lines.append(f"|teamsheet|p{i + 1}|{_escape(doc)}")
    for rule in header.rules:
        lines.append(f"|rule|{_escape(rule)}")
    lines.append("|")
    for event in events:
        if event[0] == "start":
            continue  # the data hash already lives in the header
        lines.append(_event_to_line(event))
    return "\n".join(lines) + "\n"


# --- parsing -----------------------------------------------------------------

@dataclass
class ParsedLog:
    header: LogHeader
    events: list[tuple]
    winner: int | None
    rules: tuple[str, ...]


def parse_log_text(text: str) -> ParsedLog:
    """Grammar-level parse: header + event list, no reconstruction."""
    lines = text.splitlines()
    if not lines:
        raise LogParseError("empty log", line=1, column=1)
    data_hash = ""
    names: list[str] = ["p1", "p2"]
    ratings: list[float | None] = [None, None]
    sheets: list[TeamConfig | None] = [None, None]
    rules: list[str] = []
    events: list[tuple] = []
    winner = None
    in_body = False
    saw_format = False
    for line_no, line in enumerate(lines, 1):
        if not line:
            continue
        fields = _split_line(line, line_no)
        if fields == [""]:
            in_body = True
            continue
        tag = fields[0]
        if not in_body:
            if tag == "format":
                if len(fields) != 2 or fields[1] != FORMAT_ID:
                    raise LogParseError(f"unsupported format {fields[1:]}",
                                        line=line_no, column=2)
                saw_format = True
            elif tag == "datahash":
                data_hash = fields[1] if len(fields) > 1 else ""
            elif tag == "player":
                if len(fields) != 4:
                    raise LogParseError("player line needs 3 fields",
                                        line=line_no, column=2)
                p = _parse_p(fields[1], line_no)
                names[p] = fields[2]
                if fields[3] != "-":
                    try:
                        ratings[p] = float(fields[3])
                    except ValueError:
                        raise LogParseError(f"bad rating {fields[3]!r}",
                                            line=line_no, column=4) from None
            elif tag == "teamsheet":
                if len(fields) != 3:
                    raise LogParseError("teamsheet line needs 2 fields",
                                        line=line_no, column=2)
                p = _parse_p(fields[1], line_no)
                sheets[p] = _team_from_sheet(fields[2], line_no)
            elif tag == "rule":
                rules.append(fields[1] if len(fields) > 1 else "")
            else:
                raise LogParseError(f"unknown header line {tag!r}",
                                    line=line_no, column=2)
        else:
            event = _line_to_event(fields, line_no)
            events.append(event)
            if event[0] == "win":
                winner = event[1]
    if not saw_format:
        raise LogParseError("missing format line", line=1, column=1)
    team_sheets = None
    if sheets[0] is not None and sheets[1] is not None:
        team_sheets = (sheets[0], sheets[1])
    header = LogHeader(data_hash=data_hash,
                       player_names=(names[0], names[1]),
                       ratings=(ratings[0], ratings[1]),
                       team_sheets=team_sheets, rules=tuple(rules))
    return ParsedLog(header, events, winner, tuple(rules))


def _team_from_sheet(doc_text: str, line_no: int) -> TeamConfig:
    try:
        doc = json.loads(doc_text)
    except ValueError:
        raise LogParseError("teamsheet is not valid JSON",
                            line=line_no, column=3) from None
    if not isinstance(doc, list) or len(doc) != 6:
        raise LogParseError("teamsheet must list 6 members",
                            line=line_no, column=3)
    mons = []
    for entry in doc:
        if not isinstance(entry, dict) or set(entry) - set(_SHEET_FIELDS):
            raise LogParseError("teamsheet member has unknown fields",
                                line=line_no, column=3)
        try:
            mons.append(PokemonConfig(
                species=entry["species"], moves=tuple(entry["moves"]),
                ability=entry["ability"], item=entry.get("item"),
                tera_type=entry.get("tera_type", "Normal"),
                stats=StatAllocation()))
        except (KeyError, TypeError):
            raise LogParseError("teamsheet member missing fields",
                                line=line_no, column=3) from None
    team = TeamConfig(members=tuple(mons))
    try:
        team.validate()
    except Exception as exc:
        raise LogParseError(f"teamsheet invalid: {exc}",
                            line=line_no, column=3) from None
    return team


# --- reconstruction ----------------------------------------------------------

@dataclass
class ReconstructedTrajectory:
    player: int
    player_name: str
    rating: float | None
    winner: bool
    steps: list[tuple[Observation, JointAction]] = field(default_factory=list)
    fidelity_flags: set[str] = field(default_factory=set)


def _infer_teams(events: list[tuple]) -> tuple[TeamConfig, TeamConfig]:
    """Best-effort teams when the log has no team sheets."""
    data = get_data()
    seen: list[dict[int, dict]] = [{}, {}]
    active: list[dict[int, int]] = [{}, {}]
    for ev in events:
        if ev[0] == "switch":
            _, p, s, member, species, _, _ = ev
            seen[p].setdefault(member - 1, {"species": species, "moves": []})
            active[p][s] = member - 1
        elif ev[0] in ("move", "cant"):
            p, s = ev[1], ev[2]
            name = ev[3] if ev[0] == "move" else ev[4]
            member = active[p].get(s)
            if member is not None and name != "?":
                moves = seen[p][member]["moves"]
                if name not in moves:
                    moves.append(name)
    teams = []
    for p in (0, 1):
        mons = []
        used_species = {m["species"] for m in seen[p].values()}
        filler = [sp.name for sp in data.species
                  if sp.name not in used_species]
        for i in range(6):
            info = seen[p].get(i)
            species = info["species"] if info else filler.pop()
            spec = data.species[data.species_index[species]]
            moves = list(info["moves"])[:4] if info else []
            for m in spec.learnset:
                if len(moves) >= 4:
                    break
                if m not in moves:
                    moves.append(m)
            mons.append(PokemonConfig(
                species=species, moves=tuple(moves),
                ability=spec.abilities[0], item=None,
                tera_type=spec.types[0], stats=StatAllocation()))
        teams.append(TeamConfig(members=tuple(mons)))
    return teams[0], teams[1]


def _shadow_hp(side: SideState, slot: int, hp: int, maxhp: int) -> None:
    mon = side.active_mon(slot)
    if mon is None:
        raise ReconstructionError("hp change on an empty slot")
    mon.hp = int(round(hp / maxhp * mon.max_hp)) if maxhp else 0
    mon.hp = max(0 if hp == 0 else 1, min(mon.hp, mon.max_hp))
    if hp == 0:
        mon.hp = 0


def _apply_shadow_event(state: BattleState, ev: tuple, index: int) -> None:
    tag = ev[0]
    try:
        if tag == "switch":
            _, p, s, member, species, hp, maxhp = ev
            side = state.side(p)
            out = side.active_mon(s)
            if out is not None and not out.fainted:
                out.reset_on_switch_out()
            side.active[s] = member - 1
            mon = side.mons[member - 1]
            mon.revealed = True
            _shadow_hp(side, s, hp, maxhp)
        elif tag in ("-damage", "-heal"):
            _, p, s, hp, maxhp = ev
            _shadow_hp(state.side(p), s, hp, maxhp)
        elif tag == "faint":
            mon = state.side(ev[1]).active_mon(ev[2])
            mon.fainted = True
            mon.hp = 0
        elif tag == "-status":
            state.side(ev[1]).active_mon(ev[2]).status = ev[3]
        elif tag in ("-boost", "-unboost"):
            _, p, s, stat, amt = ev
            mon = state.side(p).active_mon(s)
            mon.boosts[stat] += amt if tag == "-boost" else -amt
        elif tag == "-terastallize":
            state.side(ev[1]).active_mon(ev[2]).is_tera = True
            state.side(ev[1]).tera_used = True
        elif tag == "-item":
            mon = state.side(ev[1]).active_mon(ev[2])
            if ev[3] in ("Last Guard", "Tonic Berry"):
                mon.item_used = True
        elif tag == "-singleturn":
            state.side(ev[1]).active_mon(ev[2]).protected = True
        elif tag == "-sidestart":
            state.side(ev[1]).conditions[ev[2]] = ev[3]
        elif tag == "-sideend":
            state.side(ev[1]).conditions.pop(ev[2], None)
        elif tag == "-weather":
            state.weather, state.weather_turns = ev[1], ev[2]
        elif tag == "-weatherend":
            state.weather, state.weather_turns = None, 0
        elif tag == "-fieldstart":
            state.terrain, state.terrain_turns = ev[1], ev[2]
        elif tag == "-fieldend":
            state.terrain, state.terrain_turns = None, 0
        elif tag == "preview":
            _, p, leads, back = ev
            state.side(p).chosen = (
                [int(x) - 1 for x in leads.split(",")]
                + [int(x) - 1 for x in back.split(",")])
        elif tag == "move":
            mon = state.side(ev[1]).active_mon(ev[2])
            mon.revealed_moves.add(ev[3])
    except (AttributeError, IndexError, KeyError, TypeError,
            ValueError) as exc:
        raise ReconstructionError(f"impossible transition at event {index}: "
                                  f"{ev!r} ({exc})", event_index=index) from None


def _tick_timers(state: BattleState) -> None:
    """Mirror the engine's silent end-of-turn timer decrements."""
    if state.weather is not None:
        state.weather_turns = max(1, state.weather_turns - 1)
    if state.terrain is not None:
        state.terrain_turns = max(1, state.terrain_turns - 1)
    for side in state.sides:
        for name in list(side.conditions):
            side.conditions[name] = max(1, side.conditions[name] - 1)


def _actions_from_body(body: list[tuple], teams: tuple[TeamConfig, TeamConfig],
                       actives: list[list[int | None]],
                       start_index: int) -> list[JointAction]:
    """One JointAction per player from one turn's event span.

    ``actives`` holds each side's active team indices at turn start; a slot
    that moves this turn is necessarily the mon that started the turn there.
    """
    picks: dict[tuple[int, int], int] = {}
    pending_tera: dict[tuple[int, int], bool] = {}
    for off, ev in enumerate(body):
        tag = ev[0]
        if tag == "switch":
            _, p, s, member, *_ = ev
            if (p, s) not in picks:
                picks[(p, s)] = member
        elif tag == "-terastallize":
            pending_tera[(ev[1], ev[2])] = True
        elif tag in ("move", "cant"):
            if tag == "move":
                p, s, name, target = ev[1], ev[2], ev[3], ev[4]
                gimmick = "tera" if pending_tera.pop((p, s), False) else "none"
            else:
                p, s, name, target, gimmick = ev[1], ev[2], ev[4], ev[5], ev[6]
            if (p, s) in picks:
                continue
            member = actives[p][s]
            if member is None:
                raise ReconstructionError(
                    f"move from an empty slot at event {start_index + off}",
                    event_index=start_index + off)
            cfg = teams[p].members[member]
            if name not in cfg.moves:
                raise ReconstructionError(
                    f"move {name!r} not on the reconstructed set at event "
                    f"{start_index + off}", event_index=start_index + off)
            if gimmick not in GIMMICKS:
                raise ReconstructionError(
                    f"unknown gimmick {gimmick!r}",
                    event_index=start_index + off)
            action = SlotAction("move", move_slot=cfg.moves.index(name) + 1,
                                target=target, gimmick=gimmick)
            try:
                picks[(p, s)] = encode_action(action)
            except Exception as exc:
                raise ReconstructionError(str(exc),
                                          event_index=start_index + off) from None
    return [JointAction(picks.get((p, 0), 0), picks.get((p, 1), 0))
            for p in (0, 1)]


def reconstruct(parsed: ParsedLog) -> tuple[list[ReconstructedTrajectory], set[str]]:
    """Rebuild both players' (observation, action) sequences."""
    flags = {"stats-default", "hp-fraction-rounded"}
    if parsed.header.team_sheets is not None:
        teams = parsed.header.team_sheets
    else:
        teams = _infer_teams(parsed.events)
        flags |= {"teams-inferred", "move-slots-inferred"}
    options = GameOptions(open_team_sheets=parsed.header.team_sheets is not None)
    state = BattleState(options=options,
                        sides=[_make_side(teams[0]), _make_side(teams[1])],
                        rng=np.random.default_rng(0))
    skip_preview = "skip_team_preview" in parsed.rules
    trajs = [ReconstructedTrajectory(
        player=p, player_name=parsed.header.player_names[p],
        rating=parsed.header.ratings[p], winner=(parsed.winner == p),
        fidelity_flags=flags) for p in (0, 1)]

    events = [ev for ev in parsed.events if ev[0] != "start"]
    previews = [ev for ev in events if ev[0] == "preview"]
    if len(previews) == 2 and not skip_preview:
        picks = {ev[1]: (ev[2], ev[3]) for ev in previews}
        for phase, part in ((PHASE_PREVIEW1, 0), (PHASE_PREVIEW2, 1)):
            state.phase = phase
            for p in (0, 1):
                obs = encode_observation(state, p)
                pair = [int(x) for x in picks[p][part].split(",")]
                trajs[p].steps.append((obs, JointAction(pair[0], pair[1])))
            for p in (0, 1):
                pair = [int(x) for x in picks[p][part].split(",")]
                if part == 0:
                    state.side(p).chosen = [pair[0] - 1, pair[1] - 1]
                else:
                    state.side(p).chosen += [pair[0] - 1, pair[1] - 1]

    # split the body into turn spans
    state.phase = PHASE_TURN
    spans: list[tuple[int, list[tuple]]] = []
    current: list[tuple] = []
    current_start = 0
    turn_open = False
    for i, ev in enumerate(events):
        if ev[0] == "turn":
            if turn_open:
                spans.append((current_start, current))
            current, current_start, turn_open = [], i + 1, True
        elif ev[0] == "win":
            if turn_open and current:
                spans.append((current_start, current))
            turn_open = False
        elif turn_open:
            current.append(ev)
        # pre-turn-1 events (preview sendouts) mutate the shadow state below

    # replay: apply pre-turn-1 events, then per-span snapshot + actions + apply
    idx = 0
    while idx < len(events) and events[idx][0] != "turn":
        _apply_shadow_event(state, events[idx], idx)
        idx += 1
    state.turn = 1
    for start, body in spans:
        snapshots = [encode_observation(state, p) for p in (0, 1)]
        actives = [list(state.side(p).active) for p in (0, 1)]
        actions = _actions_from_body(body, teams, actives, start)
        for p in (0, 1):
            m = pair_matrix(snapshots[p])
            a = actions[p]
            if not m[a.slot_a, a.slot_b]:
                raise ReconstructionError(
                    f"reconstructed action {tuple(a)} for player {p + 1} is "
                    f"illegal at event {start}", event_index=start)
            trajs[p].steps.append((snapshots[p], a))
        for off, ev in enumerate(body):
            _apply_shadow_event(state, ev, start + off)
        _tick_timers(state)
        state.turn += 1
    state.phase = PHASE_TERMINAL
    return trajs, flags


# --- public API --------------------------------------------------------------

def parse_log(text: str, min_rating: float | None = None,
              winner_only: bool = False) -> list[ReconstructedTrajectory]:
    """Parse and reconstruct; returns the trajectories passing the filters.

    Raises LogParseError / ReconstructionError on malformed input; an empty
    list means the log was valid but every player was filtered out.
    """
    parsed = parse_log_text(text)
    trajs, _ = reconstruct(parsed)
    selected = []
    for t in trajs:
        if min_rating is not None and (t.rating is None or t.rating < min_rating):
            continue
        if winner_only and not t.winner:
            continue
        selected.append(t)
    return selected


def log_from_battle(state: BattleState,
                    player_names: tuple[str, str] = ("p1", "p2"),
                    ratings: tuple[float | None, float | None] = (None, None)
                    ) -> str:
    """Serialize a finished battle using its own options and teams."""
    sheets = None
    if state.options.open_team_sheets:
        sheets = (state.side(0).team, state.side(1).team)
    rules = ("skip_team_preview",) if state.options.skip_team_preview else ()
    header = LogHeader(data_hash=get_data().content_hash,
                       player_names=player_names, ratings=ratings,
                       team_sheets=sheets, rules=rules)
    return write_log(state.history, header)
