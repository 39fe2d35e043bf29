"""Command-line entry points.

`doublesim <subcommand>` fronts one library operation each:

    train       population training run from a YAML run configuration
    evaluate    performance / generalization cross-play report
    crossplay   empirical payoff matrix between named policies
    alpharank   Alpha-Rank a saved payoff matrix
    exploit     train a best-response exploiter against a frozen policy
    analyze     combinatorial size report for the game
    parse-logs  battle-log files -> reconstructed demonstration counts
    serve       host live matches over the WebSocket protocol
    play-bot    scripted agent-vs-agent matches with log output

Run configurations are schema-validated: unknown keys are rejected with the
offending path, and the resolved config is copied into the run directory so
a run is reproducible from its artifacts alone.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from . import analysis
from .agents import (
    ArchDescriptor, MaxBasePowerPlayer, ParametricPolicy, RandomPlayer,
    SimpleHeuristicsPlayer, load_checkpoint, save_checkpoint)
from .engine import GameOptions, TeamConfig, load_team
from .errors import DoublesimError, ValidationError
from .evalsuite import (
    EvalAgent, exploitability, generalization_test, performance_test)
from .learn import Hyperparameters, run_paradigm
from .learn.hyper import desk_profile
from .learn.paradigm import PARADIGMS
from .match import play_battle
from .metagame import (
    alpha_rank_sweep, estimate_crossplay, load_payoff_matrix,
    save_payoff_matrix)
from .replay import LogHeader, log_from_battle, parse_log, write_log
from .teams import builtin_holdout_teams, builtin_train_teams

SCRIPTED = {
    "random": RandomPlayer,
    "mbp": MaxBasePowerPlayer,
    "heuristics": SimpleHeuristicsPlayer,
}


# --- run configuration --------------------------------------------------------

_OPTION_FIELDS = {f.name: f.type for f in dataclasses.fields(GameOptions)}
_HYPER_FIELDS = {f.name: f.type for f in dataclasses.fields(Hyperparameters)}

_SCHEMA = {
    "paradigm": str,
    "init": (str, type(None)),
    "teams": (list, str),
    "hyperparameters": dict,
    "seed": int,
    "options": dict,
    "out_dir": str,
}


def _check_type(path: str, value, expected) -> None:
    kinds = expected if isinstance(expected, tuple) else (expected,)
    if not isinstance(value, kinds):
        names = "/".join(k.__name__ for k in kinds)
        raise ValidationError(f"{path}: expected {names}, "
                              f"got {type(value).__name__}")


@dataclasses.dataclass
class RunConfig:
    """Validated training-run configuration."""

    paradigm: str = "SP"
    init: str | None = None  # actor checkpoint to initialize from (e.g. BC)
    teams: list[str] | str = "builtin:train"
    hyperparameters: dict = dataclasses.field(default_factory=dict)
    seed: int = 0
    options: dict = dataclasses.field(default_factory=dict)
    out_dir: str = "runs/run"

    @classmethod
    def from_mapping(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ValidationError("run config must be a mapping")
        unknown = sorted(set(doc) - set(_SCHEMA))
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        for key, value in doc.items():
            _check_type(key, value, _SCHEMA[key])
        cfg = cls(**doc)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.paradigm not in PARADIGMS:
            raise ValidationError(
                f"paradigm: {self.paradigm!r} not one of {PARADIGMS}")
        for key, value in self.hyperparameters.items():
            if key not in _HYPER_FIELDS:
                raise ValidationError(f"hyperparameters.{key}: unknown key")
            _check_type(f"hyperparameters.{key}", value, (int, float))
        for key, value in self.options.items():
            if key not in _OPTION_FIELDS:
                raise ValidationError(f"options.{key}: unknown key")
            _check_type(f"options.{key}", value, (bool, int))
        self.resolve_hyper().validate()
        self.resolve_options().validate()

    def resolve_hyper(self) -> Hyperparameters:
        return dataclasses.replace(Hyperparameters(), **self.hyperparameters)

    def resolve_options(self) -> GameOptions:
        return GameOptions(**self.options)

    def resolve_teams(self) -> list[TeamConfig]:
        return resolve_teams(self.teams)


def load_run_config(path: str | Path) -> RunConfig:
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ValidationError(f"{path}: invalid YAML: {exc}") from exc
    return RunConfig.from_mapping(doc or {})


def resolve_teams(spec: list[str] | str) -> list[TeamConfig]:
    """Team file paths, or the bundled sets `builtin:train` / `builtin:holdout`."""
    if spec == "builtin:train":
        return builtin_train_teams()
    if spec == "builtin:holdout":
        return builtin_holdout_teams()
    if isinstance(spec, str):
        raise ValidationError(f"teams: unknown builtin set {spec!r}")
    if not spec:
        raise ValidationError("teams: need at least one team file")
    try:
        return [load_team(p) for p in spec]
    except OSError as exc:
        raise ValidationError(f"teams: {exc}") from exc


def resolve_policy(spec: str):
    """A scripted player name or an actor checkpoint path."""
    if spec in SCRIPTED:
        return SCRIPTED[spec]()
    params, desc, _ = load_checkpoint(spec, expect_head="actor")
    return ParametricPolicy(params, desc)


# --- subcommands --------------------------------------------------------------

def cmd_train(args) -> int:
    cfg = load_run_config(args.config)
    if args.out is not None:
        cfg.out_dir = args.out
    teams = cfg.resolve_teams()
    hyper = cfg.resolve_hyper()
    options = cfg.resolve_options()
    desc = ArchDescriptor.default(n_frames=options.n_frames)
    init_actor = None
    if cfg.init is not None:
        init_actor, desc, _ = load_checkpoint(cfg.init, expect_head="actor")

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(
        yaml.safe_dump(dataclasses.asdict(cfg), sort_keys=False))

    pool = run_paradigm(cfg.paradigm, teams, hyper, cfg.seed, desc=desc,
                        init_actor=init_actor, options=options,
                        progress=not args.quiet)
    save_checkpoint(out / "output.ckpt", pool.output.params, pool.desc,
                    head="actor", step=pool.output.step,
                    extra={"paradigm": cfg.paradigm, "seed": cfg.seed,
                           "team_ids": pool.team_ids})
    for member in pool.members:
        save_checkpoint(out / f"pool-{member.step:08d}.ckpt", member.params,
                        pool.desc, head="actor", step=member.step)
    (out / "metrics.json").write_text(json.dumps(pool.metrics, indent=1))
    if pool.payoff.size > 1:
        from .learn.paradigm import DO_GAMES_PER_PAIR
        from .metagame import PayoffMatrix
        matrix = PayoffMatrix(
            win_rates=pool.payoff,
            counts=np.full_like(pool.payoff, DO_GAMES_PER_PAIR, dtype=int),
            policy_ids=[f"step-{m.step}" for m in pool.members],
            seed=cfg.seed)
        save_payoff_matrix(matrix, out / "pool-payoff.txt")
    if pool.incidents:
        (out / "incidents.log").write_text("\n".join(pool.incidents) + "\n")
    print(f"run complete: {len(pool.members)} pool members, "
          f"output at {out / 'output.ckpt'}")
    return 0


def _eval_agents(specs: list[str], team_ids: list[list[str]]) -> list[EvalAgent]:
    agents = []
    for i, spec in enumerate(specs):
        ids = set(team_ids[i]) if i < len(team_ids) else set()
        agents.append(EvalAgent(resolve_policy(spec), name=spec,
                                train_team_ids=ids))
    return agents


def cmd_evaluate(args) -> int:
    teams = resolve_teams(args.teams if args.teams else "builtin:train")
    train_sets = [ids.split(",") if ids else [] for ids in args.train_teams]
    agents = _eval_agents(args.agents, train_sets)
    if args.protocol == "performance":
        report = performance_test(agents, teams, args.games, seed=args.seed)
    else:
        report = generalization_test(agents, teams, args.games, seed=args.seed)
    print(report)
    return 0


def cmd_crossplay(args) -> int:
    teams = resolve_teams(args.teams if args.teams else "builtin:train")
    policies = [resolve_policy(s) for s in args.policies]
    matrix = estimate_crossplay(policies, teams, args.games, args.seed,
                                policy_ids=args.policies)
    if args.out:
        save_payoff_matrix(matrix, args.out)
        print(f"payoff matrix written to {args.out}")
    np.set_printoptions(precision=3, suppress=True)
    print("policies:", ", ".join(matrix.policy_ids))
    print(matrix.win_rates)
    return 0


def cmd_alpharank(args) -> int:
    matrix = load_payoff_matrix(args.matrix)
    alpha, _, ranking = alpha_rank_sweep(matrix.win_rates,
                                         policy_ids=matrix.policy_ids)
    print(ranking)
    print(f"(selection intensity alpha = {alpha})")
    return 0


def cmd_exploit(args) -> int:
    target = resolve_policy(args.target)
    teams = resolve_teams(args.teams if args.teams else "builtin:train")
    hyper = desk_profile()
    if args.steps:
        hyper = dataclasses.replace(hyper, total_timesteps=args.steps)
    curve = exploitability(target, teams, hyper, seed=args.seed,
                           eval_games=args.games)
    for step, win in curve.points:
        print(f"step {step:>8d}  exploiter win rate {win:.3f}")
    print(f"exploitability (running max): {curve.exploitability:.3f}")
    return 0


def cmd_analyze(args) -> int:
    print(analysis.full_report())
    return 0


def cmd_parse_logs(args) -> int:
    n_logs, n_trajs, n_steps = 0, 0, 0
    for path in args.logs:
        text = Path(path).read_text()
        trajectories = parse_log(text, min_rating=args.min_rating,
                                 winner_only=args.winner_only)
        n_logs += 1
        n_trajs += len(trajectories)
        n_steps += sum(len(t.steps) for t in trajectories)
        if args.verbose:
            for t in trajectories:
                flags = ",".join(sorted(t.fidelity_flags)) or "-"
                print(f"{path} p{t.player + 1} {t.player_name}: "
                      f"{len(t.steps)} steps (flags: {flags})")
    print(f"{n_logs} logs -> {n_trajs} trajectories, {n_steps} decision steps")
    return 0


def cmd_serve(args) -> int:
    from .service import serve_match

    agent = resolve_policy(args.agent)
    teams = resolve_teams(args.teams if args.teams else "builtin:train")
    print(f"serving {args.agent} on ws://{args.host}:{args.port}/ws")
    serve_match(agent, teams, host=args.host, port=args.port,
                agent_name=args.agent, n_games=args.games, seed=args.seed,
                out_dir=args.out)
    return 0


def cmd_play_bot(args) -> int:
    p1, p2 = resolve_policy(args.p1), resolve_policy(args.p2)
    teams = resolve_teams(args.teams if args.teams else "builtin:train")
    rng = np.random.default_rng(args.seed)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    wins = [0, 0]
    for game in range(args.games):
        t1, t2 = (teams[int(i)] for i in
                  rng.choice(len(teams), size=2, replace=len(teams) < 2))
        result = play_battle((p1, p2), (t1, t2), int(rng.integers(2 ** 31)))
        wins[result.winner] += 1
        if out is not None:
            state_log = write_log(result.events, LogHeader(
                data_hash=_data_hash(), player_names=(args.p1, args.p2),
                ratings=(None, None), team_sheets=(t1, t2), rules=[]))
            (out / f"game{game:04d}.battlelog").write_text(state_log)
    print(f"{args.p1} vs {args.p2}: {wins[0]}-{wins[1]} "
          f"({wins[0] / args.games:.3f})")
    return 0


def _data_hash() -> str:
    from .gamedata import get_data
    return get_data().content_hash


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doublesim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="population training run")
    p.add_argument("--config", required=True, help="run-config YAML path")
    p.add_argument("--out", help="override the config's out_dir")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="performance/generalization report")
    p.add_argument("--agents", nargs="+", required=True,
                   help="scripted names or checkpoint paths")
    p.add_argument("--train-teams", nargs="*", default=[],
                   help="comma-joined training team ids per agent")
    p.add_argument("--teams", nargs="*", help="team files or builtin:SET")
    p.add_argument("--protocol", choices=("performance", "generalization"),
                   default="performance")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("crossplay", help="empirical payoff matrix")
    p.add_argument("--policies", nargs="+", required=True)
    p.add_argument("--teams", nargs="*")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the matrix to this path")
    p.set_defaults(func=cmd_crossplay)

    p = sub.add_parser("alpharank", help="rank a saved payoff matrix")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_alpharank)

    p = sub.add_parser("exploit", help="best-response exploiter curve")
    p.add_argument("--target", required=True)
    p.add_argument("--teams", nargs="*")
    p.add_argument("--steps", type=int, default=0,
                   help="override exploiter training steps")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_exploit)

    p = sub.add_parser("analyze", help="combinatorial size report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("parse-logs", help="reconstruct battle logs")
    p.add_argument("logs", nargs="+")
    p.add_argument("--min-rating", type=float, default=None)
    p.add_argument("--winner-only", action="store_true")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_parse_logs)

    p = sub.add_parser("serve", help="host live matches")
    p.add_argument("--agent", default="random")
    p.add_argument("--teams", nargs="*")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--games", type=int, default=5,
                   help="games per client session")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="transcript directory")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("play-bot", help="scripted agent-vs-agent matches")
    p.add_argument("--p1", default="random")
    p.add_argument("--p2", default="random")
    p.add_argument("--teams", nargs="*")
    p.add_argument("--games", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="battle-log output directory")
    p.set_defaults(func=cmd_play_bot)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DoublesimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
