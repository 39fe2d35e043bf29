"""Regenerate the fixture snapshot corpus from seeded server-side battles.

Run from the repository root:  python3 frontend/scripts/gen_fixtures.py
"""
import json
from pathlib import Path

import numpy as np

from doublesim.agents import RandomPlayer, SimpleHeuristicsPlayer
from doublesim.engine import GameOptions, encode_observation, start_battle, step
from doublesim.service import snapshot
from doublesim.teams import builtin_train_teams

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    teams = builtin_train_teams()
    players = (SimpleHeuristicsPlayer(), RandomPlayer())
    count = 0
    for seed, ots in [(11, False), (12, False), (13, True), (14, True)]:
        options = GameOptions(skip_team_preview=True, open_team_sheets=ots)
        state = start_battle(teams[seed % len(teams)],
                             teams[(seed + 3) % len(teams)], seed, options)
        rng = np.random.default_rng(seed)
        turn = 0
        while state.phase != "Terminal" and turn < 40:
            if turn % 5 == 0:
                for viewer in (0, 1):
                    path = OUT / f"snapshot_s{seed}_t{turn}_v{viewer}.json"
                    path.write_text(
                        json.dumps(snapshot(state, viewer), indent=1,
                                   sort_keys=True) + "\n")
                    count += 1
            actions = [players[p].act(encode_observation(state, p, n_frames=1),
                                      rng) for p in (0, 1)]
            step(state, actions[0], actions[1])
            turn += 1
        for viewer in (0, 1):
            path = OUT / f"snapshot_s{seed}_final_v{viewer}.json"
            path.write_text(json.dumps(snapshot(state, viewer), indent=1,
                                       sort_keys=True) + "\n")
            count += 1
    print(f"wrote {count} fixtures to {OUT}")


if __name__ == "__main__":
    main()
