"""Agent tests: baseline policies, the line protocol, external processes."""
from __future__ import annotations

import sys
import textwrap

import pytest

from mahjong_lab.agents import (
    ExternalAgent,
    GreedyDeficiencyAgent,
    PolicySpec,
    RandomLegalAgent,
    deficiency,
    format_request_action,
    make_agent,
    parse_response,
)
from mahjong_lab.engine import (
    DRAW,
    PASS,
    SEATS,
    WIN_SELF_DRAW,
    Action,
    ActionKind,
    AgentFailure,
    Phase,
    RequestKind,
    legal_actions,
    new_match,
    observation_for,
    run_match,
    step,
)
from mahjong_lab.scoring import deficiency as counts_deficiency
from mahjong_lab.tiles import Hand, parse_hand_codes, parse_tile

from test_engine import JUNK_ROW, PassiveAgent, discard, only, rig_wall


def kidx(code: str) -> int:
    return parse_tile(code).kind.index


def test_deficiency_wrapper_counts_melds():
    hand = Hand(concealed=parse_hand_codes("W1 W2 W3 B4 B5 B6 T7 T8 T9 J1 J1 W7 W8"), melds=[])
    assert deficiency(hand) == 1  # waiting on W6/W9
    complete = Hand(
        concealed=parse_hand_codes("W1 W2 W3 B4 B5 B6 T7 T8 T9 J1 J1 W7 W8 W9"), melds=[]
    )
    assert deficiency(complete) == 0


def test_random_agent_is_seed_deterministic():
    from mahjong_lab.tiles import build_wall

    def play(seed):
        agents = [RandomLegalAgent(seed=seed * 4 + s) for s in range(SEATS)]
        return run_match(build_wall(seed), agents, "classic").to_json_line()

    assert play(17) == play(17)
    assert play(17) != play(18)


def test_random_agent_clone_replays_identically():
    from mahjong_lab.tiles import build_wall

    agents = [RandomLegalAgent(seed=90 + s) for s in range(SEATS)]
    clones = [a.clone() for a in agents]
    first = run_match(build_wall(90), agents, "classic").to_json_line()
    second = run_match(build_wall(90), clones, "classic").to_json_line()
    assert first == second


def test_random_agent_refuses_empty_legal_set():
    agent = RandomLegalAgent(seed=1)
    wall = rig_wall([JUNK_ROW.replace("F1 F2", "F1 F3"), JUNK_ROW, "W1 W4 W9 B2 B5 B9 T1 T4 T8 F1 F2 J1 J2", "W1 W4 W9 B2 B5 B9 T1 T4 T8 F2 F3 J1 J2"])
    st = new_match(wall, "classic", match_id="tempty")
    with pytest.raises(AgentFailure):
        agent.act(observation_for(st, 2))  # seat 2 has no pending decision


def test_greedy_keeps_pairs_and_sheds_the_loose_tile():
    wall = rig_wall(
        [
            "B1 B1 B2 B2 B4 B4 T5 T5 T7 T7 J1 J1 W9",
            JUNK_ROW,
            "W5 W7 B5 B6 B9 T1 T6 F3 F4 J2 J3 T8 B7",
            "W1 W6 B3 T2 T4 F1 F2 F3 F4 J1 J2 J3 W6",
        ],
        draws="W3",
    )
    st = new_match(wall, "classic", match_id="tgreedy")
    step(st, 0, DRAW)
    agent = GreedyDeficiencyAgent(seed=0)
    action = agent.act(observation_for(st, 0))
    assert action.kind is ActionKind.DISCARD
    assert action.tile.kind.index == kidx("W3")  # W9 ties on value, W3 sorts first
    counts = st.hands[0].counts()
    counts[kidx("W3")] -= 1
    assert counts_deficiency(counts) == 1


def test_greedy_takes_an_available_win():
    hands = [
        "W2 W3 W4 W6 W7 W8 B3 B4 B5 B8 B8 T5 T6",
        JUNK_ROW,
        "W5 W9 B1 B6 B9 T1 T8 F3 F4 J1 J2 T7 B7",
        "W1 W9 B2 T4 T8 F1 F2 F3 F4 J1 J2 J3 W9",
    ]
    agents = [GreedyDeficiencyAgent(seed=s) for s in range(SEATS)]
    rec = run_match(rig_wall(hands, draws="T7"), agents, "classic")
    assert rec.winner == 0
    assert rec.scores == [48, -16, -16, -16]


@pytest.mark.parametrize("seed", [501, 502])
def test_greedy_discards_minimize_deficiency(seed):
    from mahjong_lab.tiles import build_wall

    agents = [GreedyDeficiencyAgent(seed=seed * 4 + s) for s in range(SEATS)]
    st = new_match(build_wall(seed), "classic", match_id=f"tgd{seed}")
    checked = 0
    while st.phase is not Phase.FINISHED:
        seat = st.pending_claims.undecided[0] if st.phase is Phase.AWAIT_CLAIMS else st.current_seat
        obs = observation_for(st, seat)
        action = agents[seat].act(obs)
        if action.kind is ActionKind.DISCARD:
            counts = st.hands[seat].counts()
            melds = len(st.hands[seat].melds)
            outcomes = {}
            for cand in legal_actions(st, seat):
                if cand.kind is not ActionKind.DISCARD:
                    continue
                counts[cand.tile.kind.index] -= 1
                outcomes[cand] = counts_deficiency(counts, melds=melds)
                counts[cand.tile.kind.index] += 1
            assert outcomes[action] == min(outcomes.values())
            checked += 1
        step(st, seat, action)
    assert checked > 10


@pytest.mark.parametrize("seed", [601, 602])
def test_greedy_claims_only_on_strict_improvement(seed):
    from mahjong_lab.tiles import build_wall

    agents = [GreedyDeficiencyAgent(seed=seed * 4 + s) for s in range(SEATS)]
    st = new_match(build_wall(seed), "classic", match_id=f"tgc{seed}")
    while st.phase is not Phase.FINISHED:
        if st.phase is Phase.AWAIT_CLAIMS:
            seat = st.pending_claims.undecided[0]
            obs = observation_for(st, seat)
            action = agents[seat].act(obs)
            wins = {ActionKind.WIN_DISCARD, ActionKind.WIN_ROB_KONG}
            if action.kind not in wins:
                hand = st.hands[seat]
                before = counts_deficiency(hand.counts(), melds=len(hand.melds))

                def after_claim(claim):
                    counts = hand.counts()
                    for t in claim.using:
                        counts[t.kind.index] -= 1
                    melds = len(hand.melds) + 1
                    if claim.kind is ActionKind.MELDED_KONG:
                        return counts_deficiency(counts, melds=melds)
                    return min(
                        _after_discard(counts, melds, k)
                        for k in range(len(counts))
                        if counts[k]
                    )

                improvements = {
                    c: after_claim(c)
                    for c in legal_actions(st, seat)
                    if c.kind in (ActionKind.CHOW, ActionKind.PUNG, ActionKind.MELDED_KONG)
                }
                if action.kind is ActionKind.PASS:
                    assert all(v >= before for v in improvements.values())
                else:
                    assert improvements[action] < before
        else:
            seat = st.current_seat
            action = agents[seat].act(observation_for(st, seat))
        step(st, seat, action)


def _after_discard(counts, melds, k):
    counts[k] -= 1
    try:
        return counts_deficiency(counts, melds=melds)
    finally:
        counts[k] += 1


def test_agents_decide_from_observations_alone():
    """Feeding the recorded observation stream to a fresh twin replays the
    same choices: nothing outside the observation influences a decision."""
    from mahjong_lab.tiles import build_wall

    for build in (lambda s: RandomLegalAgent(seed=s), lambda s: GreedyDeficiencyAgent(seed=s)):
        agents = [build(700 + s) for s in range(SEATS)]
        st = new_match(build_wall(700), "classic", match_id="thygiene")
        trace = []
        while st.phase is not Phase.FINISHED:
            seat = st.pending_claims.undecided[0] if st.phase is Phase.AWAIT_CLAIMS else st.current_seat
            obs = observation_for(st, seat)
            action = agents[seat].act(obs)
            trace.append((seat, obs, action))
            step(st, seat, action)
        twins = [build(700 + s) for s in range(SEATS)]
        for seat, obs, action in trace:
            assert twins[seat].act(obs) == action


# -- the line protocol -------------------------------------------------------


def test_protocol_turn_actions_round_trip():
    wall = rig_wall(
        [
            "W1 W1 W1 W1 W2 W3 W4 B2 B3 B4 T2 T3 B8",
            JUNK_ROW,
            "W5 W7 B1 B6 B9 T1 T6 F3 F4 J1 J2 T7 B7",
            "W6 W9 B5 T4 T8 F1 F2 F3 F4 J1 J2 J3 W9",
        ],
        draws="B8",
        tail="T4",
    )
    st = new_match(wall, "classic", match_id="tproto")
    step(st, 0, DRAW)
    obs = observation_for(st, 0)
    kong = only(st, 0, ActionKind.CONCEALED_KONG)
    assert format_request_action(kong, obs) == "GANG W1"
    assert parse_response("GANG W1", obs) == kong
    play = next(a for a in obs.legal if a.kind is ActionKind.DISCARD and a.tile.kind.index == kidx("B8"))
    line = format_request_action(play, obs)
    assert line == "PLAY B8"
    parsed = parse_response(line, obs)
    assert parsed.kind is ActionKind.DISCARD and parsed.tile.kind.index == kidx("B8")
    step(st, 0, kong)
    obs = observation_for(st, 0)
    assert parse_response("HU", obs) == WIN_SELF_DRAW
    assert format_request_action(WIN_SELF_DRAW, obs) == "HU"


def test_protocol_claim_actions_round_trip():
    wall = rig_wall(
        [
            "W5 W9 B1 B4 B7 T2 T6 F1 F1 F3 J2 T9 B9",
            "W4 W6 W7 W8 B3 B6 T1 T4 F4 J3 J3 T8 B8",
            "W5 W5 W5 B4 T1 T5 F3 F4 J2 J2 B6 T6 B8",
            "B2 B5 B9 T3 T7 J1 F2 W1 W2 B3 T2 F2 J1",
        ],
        draws="B9",
    )
    st = new_match(wall, "classic", match_id="tclaims")
    step(st, 0, DRAW)
    discard(st, 0, "W5")
    obs1 = observation_for(st, 1)
    low = next(a for a in obs1.legal if a.kind is ActionKind.CHOW and a.using[0].kind.index == kidx("W4"))
    high = next(a for a in obs1.legal if a.kind is ActionKind.CHOW and a.using[0].kind.index == kidx("W6"))
    follow = parse_tile("T8")
    assert format_request_action(low, obs1, follow=follow) == "CHI W5 T8"
    assert format_request_action(high, obs1, follow=follow) == "CHI W6 T8"
    assert parse_response("CHI W5 T8", obs1) == low
    assert parse_response("CHI W6 T8", obs1) == high
    with pytest.raises(ValueError):
        format_request_action(high, obs1)  # CHI needs the planned follow-up
    obs2 = observation_for(st, 2)
    pung = only(st, 2, ActionKind.PUNG)
    kong = only(st, 2, ActionKind.MELDED_KONG)
    assert format_request_action(pung, obs2, follow=follow) == "PENG T8"
    assert parse_response("PENG T8", obs2) == pung
    assert format_request_action(kong, obs2) == "GANG"
    assert parse_response("GANG", obs2) == kong
    assert format_request_action(PASS, obs2) == "PASS"
    assert parse_response("PASS", obs2) == PASS


def test_protocol_added_kong_round_trip():
    wall = rig_wall(
        [
            "W5 W5 W9 B1 B4 B6 B9 T1 T4 T8 F1 J1 J2",
            "W5 W2 W3 B5 B5 B8 T3 T7 F2 F3 J1 J2 W6",
            "F4 F4 F4 F4 J3 J3 J3 J3 W4 T5 B6 T2 B2",
            "W2 W8 B1 B4 T3 T6 T9 F1 F2 F3 J1 J2 W1",
        ],
        draws="T9 B9 W9 B3 B7 W5",
    )
    st = new_match(wall, "classic", match_id="tbugang")
    step(st, 0, DRAW)
    discard(st, 0, "T9")
    step(st, 1, DRAW)
    discard(st, 1, "W5")
    step(st, 0, only(st, 0, ActionKind.PUNG))
    discard(st, 0, "B1")
    step(st, 1, DRAW)
    discard(st, 1, "W9")
    step(st, 2, DRAW)
    discard(st, 2, "B3")
    step(st, 3, DRAW)
    discard(st, 3, "W1")
    step(st, 0, DRAW)  # draws the fourth W5
    obs = observation_for(st, 0)
    bugang = only(st, 0, ActionKind.ADDED_KONG)
    assert format_request_action(bugang, obs) == "BUGANG W5"
    assert parse_response("BUGANG W5", obs) == bugang


def test_protocol_rejects_nonsense():
    from mahjong_lab.tiles import build_wall

    st = new_match(build_wall(3), "classic", match_id="tbad")
    obs = observation_for(st, 0)  # only DRAW is legal: no grammar form applies
    with pytest.raises(AgentFailure):
        parse_response("PLAY W1", obs)
    step(st, 0, DRAW)
    obs = observation_for(st, 0)
    with pytest.raises(AgentFailure):
        parse_response("", obs)
    with pytest.raises(AgentFailure):
        parse_response("BANANA", obs)
    with pytest.raises(AgentFailure):
        parse_response("PLAY", obs)
    with pytest.raises(AgentFailure):
        parse_response("PLAY Z9", obs)
    with pytest.raises(AgentFailure):
        parse_response("HU", obs)
    missing = next(code for code in ("W1", "W2", "W3") if not any(
        a.kind is ActionKind.DISCARD and a.tile.kind.index == kidx(code) for a in obs.legal
    ))
    with pytest.raises(AgentFailure):
        parse_response(f"PLAY {missing}", obs)


# -- external processes ------------------------------------------------------

GRAMMAR_BOT = """
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    legal = req["observation"]["legal"]
    kinds = [a["kind"] for a in legal]
    if any(k.startswith("win_") for k in kinds):
        print("HU", flush=True)
    elif "discard" in kinds:
        tile = next(a["tile"] for a in legal if a["kind"] == "discard")
        print("PLAY " + tile, flush=True)
    else:
        print("PASS", flush=True)
"""


def write_bot(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body).lstrip())
    return f"{sys.executable} {path}"


def test_external_agent_plays_a_full_match(tmp_path):
    from mahjong_lab.tiles import build_wall

    command = write_bot(tmp_path, "bot.py", GRAMMAR_BOT)
    agent = ExternalAgent(command, timeout_ms=5000)
    agents = [agent, PassiveAgent(1), PassiveAgent(2), PassiveAgent(3)]
    try:
        rec = run_match(build_wall(55), agents, "classic")
    finally:
        agent.close()
    assert "forfeit" not in rec.result
    assert sum(rec.scores) == 0


def test_external_agent_timeout_raises(tmp_path):
    command = write_bot(tmp_path, "sleeper.py", "import time\ntime.sleep(30)\n")
    from mahjong_lab.tiles import build_wall

    st = new_match(build_wall(3), "classic", match_id="ttimeout")
    step(st, 0, DRAW)
    agent = ExternalAgent(command, timeout_ms=200)
    try:
        with pytest.raises(AgentFailure, match="timed out"):
            agent.act(observation_for(st, 0))
    finally:
        agent.close()


def test_external_agent_malformed_response_raises(tmp_path):
    command = write_bot(
        tmp_path,
        "noise.py",
        "import sys\nfor line in sys.stdin:\n    print('BANANA', flush=True)\n",
    )
    from mahjong_lab.tiles import build_wall

    st = new_match(build_wall(3), "classic", match_id="tnoise")
    step(st, 0, DRAW)
    agent = ExternalAgent(command, timeout_ms=2000)
    try:
        with pytest.raises(AgentFailure):
            agent.act(observation_for(st, 0))
    finally:
        agent.close()


def test_external_agent_dead_child_raises(tmp_path):
    command = write_bot(tmp_path, "quitter.py", "import sys\nsys.exit(0)\n")
    from mahjong_lab.tiles import build_wall

    st = new_match(build_wall(3), "classic", match_id="tdead")
    step(st, 0, DRAW)
    agent = ExternalAgent(command, timeout_ms=2000)
    try:
        with pytest.raises(AgentFailure):
            agent.act(observation_for(st, 0))
    finally:
        agent.close()


def test_external_agent_failure_forfeits_the_match(tmp_path):
    from mahjong_lab.tiles import build_wall

    command = write_bot(tmp_path, "sleeper2.py", "import time\ntime.sleep(30)\n")
    agent = ExternalAgent(command, timeout_ms=200)
    agents = [agent, PassiveAgent(1), PassiveAgent(2), PassiveAgent(3)]
    try:
        rec = run_match(build_wall(56), agents, "classic")
    finally:
        agent.close()
    assert rec.result["forfeit"] == 0
    assert rec.scores == [-24, 8, 8, 8]


# -- policy specs ------------------------------------------------------------


def test_policy_spec_parses_the_three_families():
    assert PolicySpec.parse("random:7") == PolicySpec("random", seed=7)
    assert PolicySpec.parse("random") == PolicySpec("random", seed=0)
    assert PolicySpec.parse("greedy:3") == PolicySpec("greedy", seed=3)
    assert PolicySpec.parse("greedy_deficiency") == PolicySpec("greedy", seed=0)
    spec = PolicySpec.parse("external:python3 bot.py --fast")
    assert spec.policy == "external" and spec.command == "python3 bot.py --fast"
    with pytest.raises(ValueError):
        PolicySpec.parse("external:")
    with pytest.raises(ValueError):
        PolicySpec.parse("alphabeta")


def test_make_agent_builds_each_policy():
    assert isinstance(make_agent("random:7"), RandomLegalAgent)
    assert isinstance(make_agent("greedy"), GreedyDeficiencyAgent)
    ext = make_agent("external:python3 bot.py")
    assert isinstance(ext, ExternalAgent) and ext.command == "python3 bot.py"
    named = make_agent("greedy", agent_id="north")
    assert named.id == "north"
