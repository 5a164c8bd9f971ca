"""Command-line front end.

One executable, one subcommand per workflow:

* ``simulate`` / ``duplicate`` / ``fixed-seat``: self-play and tournaments;
* ``analyze`` / ``adapt-points`` / ``derive-compensation`` / ``enumerate``:
  the balance toolchain over recorded matches;
* ``score-hand``: score one hand from tile codes;
* ``serve``: the live-table HTTP/WebSocket service;
* ``replay``: re-run stored records and verify they reproduce byte for byte.

Conventions shared by every subcommand: flags are validated before any
work starts and usage problems exit with status 2, runtime failures print
a diagnostic to stderr and exit 1.  ``--config FILE`` reads ``key = value``
lines mirroring the command's flags (explicit flags win).  ``MBL_SEED``
in the environment overrides ``--seed`` wherever one exists, so CI can
sweep seeds without editing command lines.  Every JSON artifact embeds
the fully resolved options it was produced with.
"""
import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import balance
from .agents import make_agent
from .engine import MatchRecord, replay_match
from .rules import get_ruleset
from .scoring import WinBy, WinContext, best_fan, default_fan_table, settle
from .simulator import run_duplicate, run_fixed_seat, run_selfplay
from .tiles import Hand, format_tile, parse_hand_codes


class UsageError(Exception):
    """A bad flag value or config entry; exits with status 2."""


# -- option resolution ---------------------------------------------------------

# every flag of every subcommand: attribute name -> (caster, default).
# argparse supplies None for unset flags; the chain is flag > config > default.
_OPTIONS: dict[str, dict] = {
    "simulate": {
        "agent": (str, "greedy"),
        "n": (int, 1000),
        "seed": (int, 0),
        "ruleset": (str, "classic"),
        "workers": (int, 1),
        "out": (str, None),
    },
    "duplicate": {
        "agents": (str, "greedy,greedy:1,greedy:2,greedy:3"),
        "rounds": (int, 1),
        "seed": (int, 0),
        "ruleset": (str, "classic"),
        "out": (str, None),
    },
    "fixed-seat": {
        "agents": (str, "greedy,greedy:1,greedy:2,greedy:3"),
        "rounds": (int, 1),
        "seed": (int, 0),
        "ruleset": (str, "classic"),
        "compensation": (str, None),
        "out": (str, None),
    },
    "analyze": {
        "records": (str, None),
        "multiplicity": (bool, False),
        "top": (int, 43),
        "out": (str, None),
    },
    "adapt-points": {
        "freq": (str, None),
        "table": (str, "default"),
        "exempt": (str, None),
        "out": (str, None),
    },
    "derive-compensation": {
        "averages": (str, None),
        "stats": (str, None),
        "resolution": (float, 0.1),
        "out": (str, None),
    },
    "enumerate": {
        "patterns": (str, "Seven Pairs,Full Flush,Pure Triple Chow"),
        "honors": (bool, True),
        "lenient_pairs": (bool, False),
        "out": (str, None),
    },
    "score-hand": {
        "tiles": (str, None),
        "win_by": (str, "selfdraw"),
        "discarder": (int, None),
        "seat_wind": (int, 1),
        "prevalent_wind": (int, 1),
        "last_wall": (bool, False),
        "table": (str, "default"),
        "as_json": (bool, False),
    },
    "serve": {
        "host": (str, "127.0.0.1"),
        "port": (int, 8000),
        "act_timeout": (float, 30.0),
        "claim_timeout": (float, 10.0),
        "grace": (float, 30.0),
        "takeover_policy": (str, "greedy"),
        "store": (str, None),
        "static": (str, None),
    },
    "replay": {
        "records": (str, None),
        "match_id": (str, None),
    },
}

_BOOL_WORDS = {
    "true": True,
    "yes": True,
    "on": True,
    "1": True,
    "false": False,
    "no": False,
    "off": False,
    "0": False,
}


def _cast(caster, raw: str, key: str):
    if caster is bool:
        try:
            return _BOOL_WORDS[raw.strip().lower()]
        except KeyError:
            raise UsageError(f"config key {key!r} wants true/false, got {raw!r}")
    try:
        return caster(raw)
    except ValueError:
        raise UsageError(f"config key {key!r} wants {caster.__name__}, got {raw!r}")


def _load_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; quotes are optional."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        value = value.strip().strip("\"'")
        entries[key.strip().replace("-", "_")] = value
    return entries


def resolve_options(command: str, args: argparse.Namespace) -> dict:
    """Merge flags, config file, environment, and defaults into one dict."""
    spec = _OPTIONS[command]
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(config) - set(spec)
    if unknown:
        raise UsageError(
            f"config keys not recognized by {command}: {', '.join(sorted(unknown))}"
        )
    resolved: dict = {}
    for name, (caster, default) in spec.items():
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            resolved[name] = flag_value
        elif name in config:
            resolved[name] = _cast(caster, config[name], name)
        else:
            resolved[name] = default
    if "seed" in spec and os.environ.get("MBL_SEED"):
        raw = os.environ["MBL_SEED"]
        try:
            resolved["seed"] = int(raw)
        except ValueError:
            raise UsageError(f"MBL_SEED must be an integer, got {raw!r}")
    return resolved


# -- shared helpers --------------------------------------------------------------


def _artifact(command: str, options: dict, payload: dict) -> dict:
    config = {"command": command, **options}
    return {"config": config, **payload}


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n")


def _out_dir(options: dict) -> Path | None:
    if not options.get("out"):
        return None
    out = Path(options["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _csv_text(header: list[str], rows: list[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _make_agent(spec: str, agent_id: str | None = None):
    try:
        return make_agent(spec, agent_id=agent_id)
    except ValueError as exc:
        raise UsageError(f"bad agent spec {spec!r}: {exc}")


def _agent_list(text: str) -> list:
    specs = [s.strip() for s in text.split(",") if s.strip()]
    if len(specs) != 4:
        raise UsageError(f"--agents wants four comma-separated specs, got {len(specs)}")
    return [_make_agent(spec, f"a{i}:{spec}") for i, spec in enumerate(specs)]


def _float_list(text: str, flag: str, count: int = 4) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} wants comma-separated numbers, got {text!r}")
    if len(values) != count:
        raise UsageError(f"{flag} wants {count} values, got {len(values)}")
    return values


def _match_log_line(record: MatchRecord) -> str:
    entry = {
        "match_id": record.match_id,
        "seed": record.seed,
        "ruleset_id": record.ruleset_id,
        "result": record.result,
    }
    return json.dumps(entry, separators=(",", ":"))


def _read_jsonl(path: str):
    try:
        fh = open(path)
    except OSError as exc:
        raise RuntimeError(f"cannot read records file: {exc}")
    with fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


# -- subcommand handlers ----------------------------------------------------------


def cmd_simulate(options: dict) -> int:
    agent = _make_agent(options["agent"])
    out = _out_dir(options)
    log = open(out / "matches.jsonl", "w") if out else None
    try:
        sink = (lambda r: log.write(_match_log_line(r) + "\n")) if log else None
        result = run_selfplay(
            agent,
            options["n"],
            options["seed"],
            ruleset=options["ruleset"],
            workers=options["workers"],
            on_record=sink,
        )
    finally:
        if log:
            log.close()
    print(result.report())
    if out:
        _write_json(
            out / "selfplay.json",
            _artifact("simulate", options, {"result": result.to_payload()}),
        )
        (out / "selfplay.csv").write_text(
            _csv_text(["seat", "metric", "value", "ci95"], result.stats.csv_rows())
        )
        print(f"artifacts: {out / 'selfplay.json'}, {out / 'selfplay.csv'}, "
              f"{out / 'matches.jsonl'}")
    return 0


def cmd_duplicate(options: dict) -> int:
    agents = _agent_list(options["agents"])
    result = run_duplicate(
        agents, options["rounds"], options["seed"], ruleset=options["ruleset"]
    )
    width = max(len(i) for i in result.agent_ids)
    print(f"{'agent':<{width}}  {'matches':>8}  {'avg_score':>10}  {'total':>10}")
    for agent_id in result.agent_ids:
        print(
            f"{agent_id:<{width}}  {result.matches_per_agent:>8}  "
            f"{result.average_score[agent_id]:>10.4f}  "
            f"{result.total_score[agent_id]:>10.1f}"
        )
    out = _out_dir(options)
    if out:
        _write_json(
            out / "duplicate.json",
            _artifact("duplicate", options, {"result": result.to_payload()}),
        )
        rows = [
            (a, result.matches_per_agent, result.average_score[a], result.total_score[a])
            for a in result.agent_ids
        ]
        (out / "duplicate.csv").write_text(
            _csv_text(["agent", "matches", "avg_score", "total_score"], rows)
        )
    return 0


def cmd_fixed_seat(options: dict) -> int:
    agents = _agent_list(options["agents"])
    compensation = (
        _float_list(options["compensation"], "--compensation")
        if options["compensation"]
        else None
    )
    result = run_fixed_seat(
        agents,
        None,
        options["rounds"],
        options["seed"],
        compensation=compensation,
        ruleset=options["ruleset"],
    )
    print(f"{'seat':>4}  {'agent':<16}  {'raw_avg':>9}  {'compensated':>11}")
    for seat, agent_id in enumerate(result.agent_ids):
        comp = (
            f"{result.compensated_averages[seat]:>11.4f}"
            if result.compensated_averages is not None
            else f"{'-':>11}"
        )
        print(f"{seat:>4}  {agent_id:<16}  {result.raw_averages[seat]:>9.4f}  {comp}")
    out = _out_dir(options)
    if out:
        _write_json(
            out / "fixed_seat.json",
            _artifact("fixed-seat", options, {"result": result.to_payload()}),
        )
        rows = [
            (
                seat,
                result.agent_ids[seat],
                result.raw_averages[seat],
                (
                    result.compensated_averages[seat]
                    if result.compensated_averages is not None
                    else ""
                ),
            )
            for seat in range(4)
        ]
        (out / "fixed_seat.csv").write_text(
            _csv_text(["seat", "agent", "raw_avg", "compensated_avg"], rows)
        )
    return 0


def cmd_analyze(options: dict) -> int:
    if not options["records"]:
        raise UsageError("analyze needs --records FILE (a match log or replay store)")
    freq = balance.count_frequencies(
        _read_jsonl(options["records"]), count_multiplicity=options["multiplicity"]
    )
    table = default_fan_table()
    top = balance.top_k(freq, options["top"])
    print(f"matches: {freq.matches}")
    print(f"{'rank':>4}  {'id':>3}  {'pattern':<34}  {'count':>8}")
    for rank, pid in enumerate(top, 1):
        print(f"{rank:>4}  {pid:>3}  {table.name(pid):<34}  {freq.count(pid):>8}")
    out = _out_dir(options)
    if out:
        (out / "frequency.csv").write_text(balance.frequency_csv(freq, table))
        _write_json(
            out / "frequency.json",
            _artifact(
                "analyze",
                options,
                {"matches": freq.matches, "top": list(top), "counts": freq.to_payload()},
            ),
        )
        print(f"artifacts: {out / 'frequency.csv'}, {out / 'frequency.json'}")
    return 0


def _freq_from_csv(path: str) -> balance.FrequencyTable:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise RuntimeError(f"cannot read frequency file: {exc}")
    rows = list(csv.reader(text.splitlines()))
    if not rows or rows[0][:2] != ["pattern_id", "name"]:
        raise RuntimeError(f"{path} is not a frequency CSV (expected its header)")
    counts = {int(row[0]): int(row[2]) for row in rows[1:] if row}
    return balance.FrequencyTable(counts)


def _base_table(name: str):
    if name in ("default", "classic"):
        return default_fan_table()
    return get_ruleset(name).fan_table


def cmd_adapt_points(options: dict) -> int:
    if not options["freq"]:
        raise UsageError("adapt-points needs --freq FILE (analyze's frequency.csv)")
    table = _base_table(options["table"])
    exempt = None
    if options["exempt"] is not None:
        exempt = frozenset(
            int(v) for v in options["exempt"].split(",") if v.strip()
        )
    freq = _freq_from_csv(options["freq"])
    result = balance.adapt_points(freq, table, exempt_ids=exempt)
    print(balance.adaptation_report(result, table))
    out = _out_dir(options)
    if out:
        _write_json(
            out / "adapted_points.json",
            _artifact("adapt-points", options, result.to_payload()),
        )
        print(f"artifact: {out / 'adapted_points.json'}")
    return 0


def _avg_scores_from_stats(path: str) -> list[float]:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise RuntimeError(f"cannot read stats file: {exc}")
    for probe in (data, data.get("stats"), data.get("result", {}).get("stats")):
        if isinstance(probe, dict) and "avg_score" in probe:
            return list(probe["avg_score"])
    raise RuntimeError(f"{path} carries no avg_score field")


def cmd_derive_compensation(options: dict) -> int:
    if bool(options["averages"]) == bool(options["stats"]):
        raise UsageError("derive-compensation wants exactly one of --averages/--stats")
    if options["averages"]:
        averages = _float_list(options["averages"], "--averages")
    else:
        averages = _avg_scores_from_stats(options["stats"])
    vector = balance.derive_compensation(averages, resolution=options["resolution"])
    print(f"seat averages:  {[round(a, 4) for a in averages]}")
    print(f"compensation:   {list(vector.per_seat)}")
    print(f"units:          {list(vector.units)} (resolution {vector.resolution})")
    out = _out_dir(options)
    if out:
        _write_json(
            out / "compensation.json",
            _artifact("derive-compensation", options, vector.to_payload()),
        )
    return 0


def cmd_enumerate(options: dict) -> int:
    table = default_fan_table()
    ids = []
    for token in options["patterns"].split(","):
        token = token.strip()
        if not token:
            continue
        if token.isdigit():
            ids.append(int(token))
        else:
            try:
                ids.append(table.id_of(token))
            except (KeyError, ValueError):
                raise UsageError(f"unknown pattern name {token!r}")
    if not ids:
        raise UsageError("--patterns named no patterns")
    flags = balance.EnumerationFlags(
        include_honors=options["honors"],
        allow_duplicate_pairs=options["lenient_pairs"],
    )
    counts = balance.enumerate_pattern_counts(ids, flags)
    print(balance.enumeration_report(counts, table))
    out = _out_dir(options)
    if out:
        rows = [
            (c.pattern_id, table.name(c.pattern_id), c.exact_count, c.magnitude)
            for c in counts
        ]
        (out / "enumeration.csv").write_text(
            _csv_text(["pattern_id", "name", "exact_count", "magnitude"], rows)
        )
        _write_json(
            out / "enumeration.json",
            _artifact(
                "enumerate",
                options,
                {"counts": [c.to_payload() for c in counts]},
            ),
        )
    return 0


_WIN_BY = {
    "selfdraw": WinBy.SELF_DRAW,
    "discard": WinBy.DISCARD,
    "rob": WinBy.ROB_KONG,
    "replacement": WinBy.REPLACEMENT,
}


def cmd_score_hand(options: dict) -> int:
    if not options["tiles"]:
        raise UsageError("score-hand needs --tiles (14 codes, winning tile last)")
    win_by = _WIN_BY.get(options["win_by"])
    if win_by is None:
        raise UsageError(
            f"--win-by must be one of {', '.join(_WIN_BY)}, got {options['win_by']!r}"
        )
    try:
        tiles = parse_hand_codes(options["tiles"])
    except ValueError as exc:
        raise UsageError(str(exc))
    if len(tiles) != 14:
        raise UsageError(f"score-hand wants 14 tiles, got {len(tiles)}")
    discarder = options["discarder"]
    if win_by in (WinBy.DISCARD, WinBy.ROB_KONG) and discarder is None:
        discarder = 1
    context = WinContext(
        win_by=win_by,
        seat_wind=options["seat_wind"],
        prevalent_wind=options["prevalent_wind"],
        winner=0,
        discarder=discarder,
        last_wall_tile=options["last_wall"],
    )
    table = _base_table(options["table"])
    result = best_fan(Hand(tiles[:-1], []), tiles[-1], context, table=table)
    if not result.is_win:
        raise RuntimeError("not a winning hand at the required threshold")
    if options["as_json"]:
        payload = {
            "fans": [
                {
                    "pattern_id": a.pattern_id,
                    "name": table.name(a.pattern_id),
                    "points": a.points,
                    "multiplicity": a.multiplicity,
                }
                for a in result.fans
            ],
            "total": result.total,
            "scores": settle(result, context),
        }
        print(json.dumps(payload, indent=2))
        return 0
    win_code = format_tile(tiles[-1])
    print(f"winning tile: {win_code} ({options['win_by']})")
    for award in result.fans:
        times = f" x{award.multiplicity}" if award.multiplicity > 1 else ""
        print(f"  {table.name(award.pattern_id):<34} {award.points:>3}{times}")
    print(f"total: {result.total}")
    print(f"settlement (winner seat 0): {settle(result, context)}")
    return 0


def cmd_serve(options: dict) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig(
        act_timeout=options["act_timeout"],
        claim_timeout=options["claim_timeout"],
        takeover_grace=options["grace"],
        takeover_policy=options["takeover_policy"],
        store_path=options["store"],
        static_dir=options["static"],
    )
    print(f"serving tables on http://{options['host']}:{options['port']}")
    serve(options["host"], options["port"], config=config)
    return 0


def cmd_replay(options: dict) -> int:
    if not options["records"]:
        raise UsageError("replay needs --records FILE (a replay store)")
    checked = 0
    for entry in _read_jsonl(options["records"]):
        if "wall" not in entry:
            raise RuntimeError(
                "records file has no walls; replay needs the full replay store,"
                " not a match log"
            )
        if options["match_id"] and entry["match_id"] != options["match_id"]:
            continue
        record = MatchRecord.from_json_line(json.dumps(entry, separators=(",", ":")))
        rerun = replay_match(record)
        if rerun.to_json_line() != record.to_json_line():
            print(f"{record.match_id}: replay DIVERGED", file=sys.stderr)
            return 1
        print(f"{record.match_id}: replay OK  scores {rerun.scores}")
        checked += 1
    if not checked:
        raise RuntimeError(
            f"no record matched {options['match_id']!r}"
            if options["match_id"]
            else "records file is empty"
        )
    return 0


_HANDLERS = {
    "simulate": cmd_simulate,
    "duplicate": cmd_duplicate,
    "fixed-seat": cmd_fixed_seat,
    "analyze": cmd_analyze,
    "adapt-points": cmd_adapt_points,
    "derive-compensation": cmd_derive_compensation,
    "enumerate": cmd_enumerate,
    "score-hand": cmd_score_hand,
    "serve": cmd_serve,
    "replay": cmd_replay,
}


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mahjong-lab",
        description="Rules engine, self-play simulator, and balance laboratory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value file mirroring this command's flags")
        return p

    p = command("simulate", "self-play with four clones of one agent")
    p.add_argument("--agent", help="policy spec: greedy | random[:seed] | external:CMD")
    p.add_argument("--n", type=int, help="number of matches")
    p.add_argument("--seed", type=int, help="base seed (MBL_SEED overrides)")
    p.add_argument("--ruleset", help="classic | revised")
    p.add_argument("--workers", type=int, help="worker processes (same results at any count)")
    p.add_argument("--out", help="directory for stats JSON/CSV and the match log")

    p = command("duplicate", "duplicate-format tournament over all 24 seatings")
    p.add_argument("--agents", help="four comma-separated policy specs")
    p.add_argument("--rounds", type=int, help="rounds (24 matches each)")
    p.add_argument("--seed", type=int)
    p.add_argument("--ruleset")
    p.add_argument("--out")

    p = command("fixed-seat", "seat-locked tournament, optional compensation")
    p.add_argument("--agents", help="four comma-separated policy specs, seat 0 first")
    p.add_argument("--rounds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ruleset")
    p.add_argument("--compensation", help="four comma-separated per-seat offsets")
    p.add_argument("--out")

    p = command("analyze", "fan frequencies from a match log or replay store")
    p.add_argument("--records", help="JSONL of match records or match-log lines")
    p.add_argument(
        "--multiplicity",
        action=argparse.BooleanOptionalAction,
        help="count repeated awards within one match",
    )
    p.add_argument("--top", type=int, help="how many patterns to list")
    p.add_argument("--out")

    p = command("adapt-points", "re-point the table from observed frequencies")
    p.add_argument("--freq", help="frequency CSV produced by analyze")
    p.add_argument("--table", help="base point table: default | revised")
    p.add_argument("--exempt", help="comma-separated pattern ids excused from rising")
    p.add_argument("--out")

    p = command("derive-compensation", "seat offsets that cancel measured advantage")
    p.add_argument("--averages", help="four comma-separated per-seat average scores")
    p.add_argument("--stats", help="stats JSON carrying avg_score (simulate artifact)")
    p.add_argument("--resolution", type=float, help="offset granularity, default 0.1")
    p.add_argument("--out")

    p = command("enumerate", "exact hand counts for structural patterns")
    p.add_argument("--patterns", help="comma-separated pattern names or ids")
    p.add_argument(
        "--honors",
        action=argparse.BooleanOptionalAction,
        help="include honor tiles in the universe (default on)",
    )
    p.add_argument(
        "--lenient-pairs",
        dest="lenient_pairs",
        action=argparse.BooleanOptionalAction,
        help="let seven pairs repeat a kind (default strict)",
    )
    p.add_argument("--out")

    p = command("score-hand", "score 14 tiles; the winning tile is listed last")
    p.add_argument("--tiles", help='dense or spaced codes, e.g. "W1W1W1W2...W9"')
    p.add_argument("--win-by", dest="win_by", help="selfdraw | discard | rob | replacement")
    p.add_argument("--discarder", type=int, help="paying seat for discard/rob wins")
    p.add_argument("--seat-wind", dest="seat_wind", type=int, help="1..4, default 1")
    p.add_argument(
        "--prevalent-wind", dest="prevalent_wind", type=int, help="1..4, default 1"
    )
    p.add_argument(
        "--last-wall",
        dest="last_wall",
        action=argparse.BooleanOptionalAction,
        help="the winning tile was the wall's last",
    )
    p.add_argument("--table", help="point table: default | revised")
    p.add_argument(
        "--json",
        dest="as_json",
        action=argparse.BooleanOptionalAction,
        help="machine-readable output",
    )

    p = command("serve", "run the live-table HTTP/WebSocket service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--act-timeout", dest="act_timeout", type=float)
    p.add_argument("--claim-timeout", dest="claim_timeout", type=float)
    p.add_argument("--grace", type=float, help="seconds before a bot takes a dead seat")
    p.add_argument("--takeover-policy", dest="takeover_policy")
    p.add_argument("--store", help="replay store path (JSON Lines)")
    p.add_argument("--static", help="directory of web client assets to serve at /")

    p = command("replay", "re-run stored records; exit 1 on any divergence")
    p.add_argument("--records", help="replay store (JSONL of full match records)")
    p.add_argument("--match-id", dest="match_id", help="check one match only")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = resolve_options(args.command, args)
        return _HANDLERS[args.command](options)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # runtime failure: diagnostic + exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
