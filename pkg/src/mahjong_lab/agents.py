"""Decision-makers: baseline policies and the external-process protocol.

Two built-in baselines ship with the package.  ``RandomLegalAgent`` picks
uniformly from the legal set.  ``GreedyDeficiencyAgent`` wins when it can,
otherwise discards the tile that minimizes the hand's deficiency (the
minimum number of tile replacements still needed to reach a winning shape)
and claims a discard only when doing so strictly lowers that number.

External programs attach through a one-line-per-message protocol: the
referee writes a single JSON request line and reads back one response line
in the classic competition grammar (``PLAY``/``CHI``/``PENG``/``GANG``/
``BUGANG``/``HU``/``PASS``).
"""

from __future__ import annotations

import json
import random
import select
import shlex
import subprocess
from dataclasses import dataclass

from .engine import (
    DRAW,
    Action,
    ActionKind,
    AgentFailure,
    Observation,
    RequestKind,
    _action_sort_key,
)
from .scoring import deficiency as shape_deficiency
from .tiles import Hand, Tile, format_tile, kind_from_index, parse_tile

DEFAULT_TIMEOUT_MS = 1000


def deficiency(hand: Hand) -> int:
    """Minimum tile replacements from this hand to a winning shape."""
    return shape_deficiency(hand.counts(), melds=len(hand.melds))


class RandomLegalAgent:
    """Uniform choice over the legal set; deterministic for a given seed."""

    def __init__(self, seed: int, agent_id: str | None = None):
        self.id = agent_id or f"random-{seed}"
        self.seed = seed
        self._rng = random.Random(seed)

    def clone(self) -> "RandomLegalAgent":
        return RandomLegalAgent(self.seed, self.id)

    def act(self, obs: Observation) -> Action:
        choices = sorted(obs.legal, key=_action_sort_key)
        if not choices:
            raise AgentFailure("asked to act with no legal actions")
        return choices[self._rng.randrange(len(choices))]


class GreedyDeficiencyAgent:
    """Wins when possible, otherwise greedily lowers hand deficiency."""

    def __init__(self, seed: int = 0, agent_id: str | None = None):
        self.id = agent_id or f"greedy-{seed}"
        self.seed = seed

    def clone(self) -> "GreedyDeficiencyAgent":
        return GreedyDeficiencyAgent(self.seed, self.id)

    def act(self, obs: Observation) -> Action:
        if not obs.legal:
            raise AgentFailure("asked to act with no legal actions")
        for win_kind in (
            ActionKind.WIN_SELF_DRAW,
            ActionKind.WIN_DISCARD,
            ActionKind.WIN_ROB_KONG,
        ):
            for action in obs.legal:
                if action.kind is win_kind:
                    return action
        if obs.request_kind is RequestKind.CLAIM_OR_PASS:
            return self._claim_or_pass(obs)
        return self._turn_action(obs)

    # -- own turn ---------------------------------------------------------

    def _turn_action(self, obs: Observation) -> Action:
        draw = next((a for a in obs.legal if a.kind is ActionKind.DRAW), None)
        if draw is not None:
            return draw
        discards = [a for a in obs.legal if a.kind is ActionKind.DISCARD]
        if not discards:  # forced kong-only corner; take the canonical action
            return min(obs.legal, key=_action_sort_key)
        counts = _counts(obs.concealed)
        melds = sum(1 for view in obs.melds if view.seat == obs.seat)
        best = min(
            discards,
            key=lambda a: (_post_discard_deficiency(counts, melds, a.tile), _action_sort_key(a)),
        )
        return best

    # -- reacting to a discard or added kong ------------------------------

    def _claim_or_pass(self, obs: Observation) -> Action:
        pass_action = next(a for a in obs.legal if a.kind is ActionKind.PASS)
        claim_tile = obs.claim_tile
        if claim_tile is None:
            return pass_action
        counts = _counts(obs.concealed)
        melds = sum(1 for view in obs.melds if view.seat == obs.seat)
        current = shape_deficiency(counts, melds=melds)
        best_action = pass_action
        best_score = current
        for action in sorted(obs.legal, key=_action_sort_key):
            if action.kind not in (ActionKind.CHOW, ActionKind.PUNG, ActionKind.MELDED_KONG):
                continue
            after = counts.copy()
            for t in action.using:
                after[t.kind.index] -= 1
            if action.kind is ActionKind.MELDED_KONG:
                # the claimed meld leaves a 13-tile-equivalent hand
                score = shape_deficiency(after, melds=melds + 1)
            else:
                score = _best_discard_deficiency(after, melds + 1)
            if score < best_score:
                best_score = score
                best_action = action
        return best_action


def _counts(tiles: tuple[Tile, ...]) -> list[int]:
    counts = [0] * 34
    for t in tiles:
        counts[t.kind.index] += 1
    return counts


def _post_discard_deficiency(counts: list[int], melds: int, tile: Tile | None) -> int:
    assert tile is not None
    counts[tile.kind.index] -= 1
    try:
        return shape_deficiency(counts, melds=melds)
    finally:
        counts[tile.kind.index] += 1


def _best_discard_deficiency(counts: list[int], melds: int) -> int:
    best = 14
    for k in range(34):
        if counts[k]:
            counts[k] -= 1
            best = min(best, shape_deficiency(counts, melds=melds))
            counts[k] += 1
    return best


# -- external processes ----------------------------------------------------


class ExternalAgent:
    """Supervises one child process speaking the line protocol.

    The child receives one JSON request per decision on stdin and must
    answer with one grammar line on stdout within the timeout.  Any
    malformed response, timeout, or death of the child raises
    :class:`AgentFailure`, which the referee converts into a forfeit.
    """

    def __init__(
        self,
        command: str | list[str],
        *,
        timeout_ms: int = DEFAULT_TIMEOUT_MS,
        agent_id: str | None = None,
    ):
        self.command = command
        self.timeout_ms = timeout_ms
        self.id = agent_id or f"external-{_command_name(command)}"
        self._proc: subprocess.Popen | None = None

    def clone(self) -> "ExternalAgent":
        return ExternalAgent(self.command, timeout_ms=self.timeout_ms, agent_id=self.id)

    def _ensure_process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            argv = shlex.split(self.command) if isinstance(self.command, str) else self.command
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        return self._proc

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()
        self._proc = None

    def act(self, obs: Observation) -> Action:
        # the grammar has no word for the forced wall draw; take it silently,
        # the child sees the drawn tile in its next request
        if len(obs.legal) == 1 and next(iter(obs.legal)).kind is ActionKind.DRAW:
            return DRAW
        proc = self._ensure_process()
        request = json.dumps(
            {
                "match_id": obs.match_id,
                "seat": obs.seat,
                "request_kind": obs.request_kind.value if obs.request_kind else None,
                "observation": obs.to_payload(),
            },
            separators=(",", ":"),
        )
        try:
            assert proc.stdin is not None
            proc.stdin.write(request + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.close()
            raise AgentFailure(f"external agent pipe failed: {exc}") from exc
        line = self._read_line(proc)
        return parse_response(line, obs)

    def _read_line(self, proc: subprocess.Popen) -> str:
        assert proc.stdout is not None
        ready, _, _ = select.select([proc.stdout], [], [], self.timeout_ms / 1000)
        if not ready:
            self.close()
            raise AgentFailure(f"external agent timed out after {self.timeout_ms} ms")
        line = proc.stdout.readline()
        if not line:
            self.close()
            raise AgentFailure("external agent closed its output")
        return line.strip()


def _command_name(command: str | list[str]) -> str:
    if isinstance(command, str):
        return shlex.split(command)[0].rsplit("/", 1)[-1]
    return command[0].rsplit("/", 1)[-1]


def parse_response(line: str, obs: Observation) -> Action:
    """Parse one grammar line into a member of the observation's legal set."""
    parts = line.split()
    if not parts:
        raise AgentFailure("empty response line")
    verb, args = parts[0].upper(), parts[1:]
    legal = sorted(obs.legal, key=_action_sort_key)
    if verb == "PASS":
        return _require(legal, lambda a: a.kind is ActionKind.PASS, line)
    if verb == "HU":
        return _require(
            legal,
            lambda a: a.kind
            in (ActionKind.WIN_SELF_DRAW, ActionKind.WIN_DISCARD, ActionKind.WIN_ROB_KONG),
            line,
        )
    if verb == "PLAY":
        if len(args) != 1:
            raise AgentFailure(f"bad response {line!r}")
        kind = _kind_index(args[0])
        if not any(a.kind is ActionKind.DRAW for a in legal):
            return _require(
                legal,
                lambda a: a.kind is ActionKind.DISCARD and a.tile.kind.index == kind,
                line,
            )
        raise AgentFailure(f"PLAY not valid now: {line!r}")
    if verb == "PENG":
        # the follow-up discard travels in a later request
        return _require(legal, lambda a: a.kind is ActionKind.PUNG, line)
    if verb == "CHI":
        if not args:
            raise AgentFailure(f"bad response {line!r}")
        mid = _kind_index(args[0])
        return _require(
            legal,
            lambda a: a.kind is ActionKind.CHOW and _chow_mid(a, obs) == mid,
            line,
        )
    if verb == "GANG":
        if args:
            kind = _kind_index(args[0])
            return _require(
                legal,
                lambda a: a.kind is ActionKind.CONCEALED_KONG
                and a.using[0].kind.index == kind,
                line,
            )
        return _require(legal, lambda a: a.kind is ActionKind.MELDED_KONG, line)
    if verb == "BUGANG":
        if len(args) != 1:
            raise AgentFailure(f"bad response {line!r}")
        kind = _kind_index(args[0])
        return _require(
            legal,
            lambda a: a.kind is ActionKind.ADDED_KONG and a.tile.kind.index == kind,
            line,
        )
    raise AgentFailure(f"unknown verb in response {line!r}")


def _chow_mid(action: Action, obs: Observation) -> int:
    kinds = sorted(t.kind.index for t in action.using)
    claim = obs.claim_tile
    if claim is not None:
        kinds = sorted(kinds + [claim.kind.index])
    return kinds[len(kinds) // 2]


def _kind_index(code: str) -> int:
    try:
        return parse_tile(code).kind.index
    except ValueError as exc:
        raise AgentFailure(f"bad tile code {code!r}") from exc


def _require(legal: list[Action], pred, line: str) -> Action:
    for action in legal:
        if pred(action):
            return action
    raise AgentFailure(f"response {line!r} names no legal action")


def format_request_action(
    action: Action, obs: Observation, *, follow: Tile | None = None
) -> str:
    """Render an action in the response grammar (used by tests and clients).

    ``CHI`` and ``PENG`` carry the claimant's planned follow-up discard in
    the grammar; the referee still collects that discard through its own
    request, so ``follow`` only fills the textual slot.
    """
    kind = action.kind
    if kind is ActionKind.PASS:
        return "PASS"
    if kind in (ActionKind.WIN_SELF_DRAW, ActionKind.WIN_DISCARD, ActionKind.WIN_ROB_KONG):
        return "HU"
    if kind is ActionKind.DISCARD:
        return f"PLAY {format_tile(action.tile)}"
    if kind is ActionKind.PUNG:
        if follow is None:
            raise ValueError("PENG needs the planned follow-up discard")
        return f"PENG {format_tile(follow)}"
    if kind is ActionKind.CHOW:
        if follow is None:
            raise ValueError("CHI needs the planned follow-up discard")
        mid = _chow_mid(action, obs)
        return f"CHI {kind_from_index(mid).code} {format_tile(follow)}"
    if kind is ActionKind.CONCEALED_KONG:
        return f"GANG {format_tile(action.using[0])}"
    if kind is ActionKind.MELDED_KONG:
        return "GANG"
    if kind is ActionKind.ADDED_KONG:
        return f"BUGANG {format_tile(action.tile)}"
    raise ValueError(f"no grammar form for {kind}")


@dataclass(frozen=True)
class PolicySpec:
    """Parsed agent description, e.g. ``random:7``, ``greedy``, ``external:cmd``."""

    policy: str
    seed: int = 0
    command: str | None = None
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    @classmethod
    def parse(cls, text: str) -> "PolicySpec":
        head, _, rest = text.partition(":")
        head = head.strip().lower()
        if head in ("random", "random_legal"):
            return cls("random", seed=int(rest) if rest else 0)
        if head in ("greedy", "greedy_deficiency"):
            return cls("greedy", seed=int(rest) if rest else 0)
        if head == "external":
            if not rest:
                raise ValueError("external policy needs a command")
            return cls("external", command=rest)
        raise ValueError(f"unknown policy {text!r}")


def make_agent(spec: PolicySpec | str, *, agent_id: str | None = None):
    """Build an agent from a policy spec."""
    if isinstance(spec, str):
        spec = PolicySpec.parse(spec)
    if spec.policy == "random":
        return RandomLegalAgent(spec.seed, agent_id)
    if spec.policy == "greedy":
        return GreedyDeficiencyAgent(spec.seed, agent_id)
    if spec.policy == "external":
        assert spec.command is not None
        return ExternalAgent(spec.command, timeout_ms=spec.timeout_ms, agent_id=agent_id)
    raise ValueError(f"unknown policy {spec.policy!r}")
