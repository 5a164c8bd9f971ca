"""A minimal external bot speaking the line protocol, run against built-ins.

The child process receives one JSON request per decision on stdin and must
answer with one grammar line (``PASS``, ``HU``, ``PLAY W3``, ...) on stdout.
The bot below wins when it may, otherwise discards the first tile the legal
set offers, otherwise passes.  The same loop is the starting point for any
real bot.

Run from the repository root:

    python3 demos/external_bot.py
"""
import sys
import tempfile
from pathlib import Path

BOT_SOURCE = '''\
import json, sys
for line in sys.stdin:
    legal = json.loads(line)["observation"]["legal"]
    kinds = {a["kind"]: a for a in legal}
    if {"win_self_draw", "win_discard", "win_rob_kong"} & kinds.keys():
        print("HU", flush=True)
    elif "discard" in kinds:
        tile = kinds["discard"]["tile"].split(".")[0]
        print(f"PLAY {tile}", flush=True)
    else:
        print("PASS", flush=True)
'''


def main() -> None:
    from mahjong_lab import build_wall, get_ruleset, run_match
    from mahjong_lab.agents import GreedyDeficiencyAgent, make_agent

    script = Path(tempfile.mkdtemp()) / "first_legal_bot.py"
    script.write_text(BOT_SOURCE)
    bot = make_agent(f"external:{sys.executable} {script}")
    rivals = [GreedyDeficiencyAgent(i, f"house{i}") for i in range(3)]
    record = run_match(
        build_wall(5), [bot, *rivals], get_ruleset("classic"), match_id="demo-ext"
    )
    print(f"finished after {len(record.events)} events")
    print(f"winner: {record.result['winner']}  scores: {record.result['scores']}")


if __name__ == "__main__":
    main()
