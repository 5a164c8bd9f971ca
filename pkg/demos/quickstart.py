"""One complete match, step by step: wall, agents, referee, settlement.

Run from the repository root:

    python3 demos/quickstart.py
"""
from mahjong_lab import build_wall, format_tile, get_ruleset, run_match
from mahjong_lab.agents import GreedyDeficiencyAgent


def main() -> None:
    ruleset = get_ruleset("revised")
    agents = [GreedyDeficiencyAgent(seed, f"bot{seed}") for seed in range(4)]
    record = run_match(build_wall(11), agents, ruleset, match_id="demo-quickstart")

    result = record.result
    print(f"match {record.match_id} under ruleset {record.ruleset_id!r}")
    print(f"events: {len(record.events)}")
    if result["winner"] is None:
        print("wall exhausted: drawn match")
    else:
        print(f"winner: seat {result['winner']} with {result['fan_total']} fans")
        for fan in result["fan_list"]:
            name = ruleset.fan_table.name(fan["pattern_id"])
            print(f"  {name}: {fan['points']}")
    print(f"scores:      {result['scores']}")
    print(f"compensated: {result['compensated_scores']}")

    # every record replays byte for byte
    from mahjong_lab import replay_match

    again = record.to_json_line() == replay_match(record).to_json_line()
    print(f"replay byte-identical: {again}")

    # peek at the first few wall tiles the way the engine dealt them
    print("first draws:", " ".join(format_tile(t) for t in build_wall(11).tiles[:8]))


if __name__ == "__main__":
    main()
