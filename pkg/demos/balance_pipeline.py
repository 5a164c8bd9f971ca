"""The whole balance loop at demo scale: play, count, re-point, compensate.

Run from the repository root (about a minute of self-play):

    python3 demos/balance_pipeline.py
"""
from mahjong_lab import (
    adapt_points,
    count_frequencies,
    default_fan_table,
    derive_compensation,
    make_agent,
    run_selfplay,
)
from mahjong_lab.balance import adaptation_report, top_k


def main() -> None:
    table = default_fan_table()

    print("== self-play ==")
    records = []
    result = run_selfplay(make_agent("greedy"), 1500, 7, on_record=records.append)
    print(result.report())

    print("== most frequent patterns ==")
    freq = count_frequencies(records)
    for rank, pid in enumerate(top_k(freq, 10), 1):
        print(f"{rank:>3}. {table.name(pid):<30} {freq.count(pid)}")
    print()

    print("== adapted point table ==")
    adapted = adapt_points(freq)
    print(adaptation_report(adapted, table))

    print("== seat compensation from the same run ==")
    vector = derive_compensation(result.stats.avg_score)
    print(f"seat averages: {[round(a, 3) for a in result.stats.avg_score]}")
    print(f"compensation:  {list(vector.per_seat)}")


if __name__ == "__main__":
    main()
