"""Deterministic sparse-reward gridworlds with engineered bottlenecks.

Layouts are flat character grids: ``#`` wall, ``.`` floor, ``s`` start,
``g`` goal, ``k`` key, ``d`` door. Keys and doors pair up by reading order
(top-to-bottom, left-to-right): the i-th key opens the i-th door. Walking
onto a key picks it up; walking into a closed door opens it and moves in if
the matching key is held, otherwise the move is a no-op that still costs a
step, as is walking into a wall. The only nonzero reward is 1.0 for stepping
onto the goal, which ends the episode; running out the horizon ends it with
reward 0.

Observations are short token strings (region, cell, inventory, and the four
adjacent cell contents) so the graph's text-merging path is exercised while
distinct world states stay distinguishable. Rendering is a pure function of
the environment state: identical states always produce identical text.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator

from .errors import ActionError, ConfigError, EpisodeFinishedError

ACTION_NAMES = ("up", "right", "down", "left")
_MOVES = ((-1, 0), (0, 1), (1, 0), (0, -1))

DEFAULT_HORIZON = 40

_LAYOUT_TEXT = {
    # single chain of rooms: reachable by a monotone action sequence
    "corridor": """
#########
#s.....g#
#########
""",
    # two 5x3 rooms joined by a one-cell hallway; the key sits off the direct
    # path in room 1 and the hallway door is locked until it is collected
    "bottleneck": """
#############
#.k...#.....#
#s....d....g#
#.....#.....#
#############
""",
    # two sequential key-door bottlenecks; each key sits off the direct path
    # in the room before its door, forcing a strict collect-open ordering
    # with deliberate detours over a long horizon
    "two-keys": """
################
#..k.#....#....#
#s...d....d...g#
#....#..k.#....#
################
""",
}

_LAYOUT_NOTES = {
    "corridor": "single open corridor, no doors",
    "bottleneck": "two rooms, one locked hallway, one key",
    "two-keys": "three rooms, two sequential key-door locks",
}


@dataclass(frozen=True)
class Layout:
    """Parsed grid with the positions every rule needs."""

    name: str
    rows: tuple[str, ...]
    start: tuple[int, int]
    goal: tuple[int, int]
    keys: tuple[tuple[int, int], ...]
    doors: tuple[tuple[int, int], ...]
    regions: dict[tuple[int, int], str]
    description: str = ""

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    def is_wall(self, pos: tuple[int, int]) -> bool:
        r, c = pos
        if not (0 <= r < self.height and 0 <= c < self.width):
            return True
        return self.rows[r][c] == "#"


def parse_layout(name: str, text: str, description: str = "") -> Layout:
    """Parse a character grid into a Layout, validating the required markers."""
    rows = tuple(line for line in text.strip("\n").splitlines())
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigError(f"layout {name!r} must be a non-empty rectangular grid")
    start = goal = None
    keys: list[tuple[int, int]] = []
    doors: list[tuple[int, int]] = []
    for r, line in enumerate(rows):
        for c, ch in enumerate(line):
            if ch == "s":
                start = (r, c)
            elif ch == "g":
                goal = (r, c)
            elif ch == "k":
                keys.append((r, c))
            elif ch == "d":
                doors.append((r, c))
            elif ch not in "#.":
                raise ConfigError(f"layout {name!r} has unknown cell {ch!r} at {(r, c)}")
    if start is None or goal is None:
        raise ConfigError(f"layout {name!r} needs exactly one start and one goal")
    if len(keys) != len(doors):
        raise ConfigError(f"layout {name!r} must pair every key with a door")
    regions = _label_regions(rows, doors)
    return Layout(name, rows, start, goal, tuple(keys), tuple(doors), regions, description)


def _label_regions(rows: tuple[str, ...], doors: list[tuple[int, int]]) -> dict[tuple[int, int], str]:
    """Flood-fill floor cells into rooms; each door cell is its own region."""
    door_set = set(doors)
    regions: dict[tuple[int, int], str] = {}
    for i, pos in enumerate(doors):
        regions[pos] = f"door{i}"
    room = 0
    for r, line in enumerate(rows):
        for c, ch in enumerate(line):
            pos = (r, c)
            if ch == "#" or pos in regions:
                continue
            stack = [pos]
            while stack:
                cur = stack.pop()
                if cur in regions:
                    continue
                regions[cur] = f"room{room}"
                for dr, dc in _MOVES:
                    nxt = (cur[0] + dr, cur[1] + dc)
                    if (
                        0 <= nxt[0] < len(rows)
                        and 0 <= nxt[1] < len(line)
                        and rows[nxt[0]][nxt[1]] != "#"
                        and nxt not in door_set
                        and nxt not in regions
                    ):
                        stack.append(nxt)
            room += 1
    return regions


def load_layout(name: str) -> Layout:
    if name not in _LAYOUT_TEXT:
        raise ConfigError(f"unknown layout {name!r}; available: {sorted(_LAYOUT_TEXT)}")
    return parse_layout(name, _LAYOUT_TEXT[name], _LAYOUT_NOTES[name])


def load_layout_file(path: str) -> Layout:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_layout(name, text)


def layout_catalog() -> list[Layout]:
    """All built-in layouts, easiest first."""
    return [load_layout(name) for name in ("corridor", "bottleneck", "two-keys")]


@dataclass(frozen=True)
class EnvState:
    """Full world state; the observation renders only part of it."""

    pos: tuple[int, int]
    keys_held: frozenset[int]
    doors_open: frozenset[int]
    steps_elapsed: int


@dataclass(frozen=True)
class StepOutcome:
    observation: str
    reward: float
    terminal: bool
    success: bool


class GridEnv:
    """Deterministic episodic gridworld over one layout."""

    def __init__(self, layout: Layout | str, horizon: int = DEFAULT_HORIZON):
        self.layout = load_layout(layout) if isinstance(layout, str) else layout
        if horizon < 1:
            raise ConfigError("horizon must be >= 1")
        self.horizon = horizon
        self._render_cache: dict[tuple, str] = {}
        self._state: EnvState | None = None
        self._done = True
        self._succeeded = False

    @property
    def action_count(self) -> int:
        return len(ACTION_NAMES)

    @property
    def done(self) -> bool:
        return self._done

    @property
    def succeeded(self) -> bool:
        return self._succeeded

    def reset(self, seed: int | None = None) -> str:
        """Restore the canonical initial state; the seed is accepted for interface
        compatibility but the environment is fully deterministic."""
        del seed
        self._state = EnvState(self.layout.start, frozenset(), frozenset(), 0)
        self._done = False
        self._succeeded = False
        return self.render(self._state)

    def step(self, action: int) -> StepOutcome:
        if self._done or self._state is None:
            raise EpisodeFinishedError("episode is finished; call reset()")
        if not 0 <= action < self.action_count:
            raise ActionError(f"action {action} outside [0, {self.action_count})")
        state = self._state
        pos, keys_held, doors_open = self._transition(state, action)
        steps = state.steps_elapsed + 1
        success = pos == self.layout.goal
        terminal = success or steps >= self.horizon
        self._state = EnvState(pos, keys_held, doors_open, steps)
        self._done = terminal
        self._succeeded = success
        reward = 1.0 if success else 0.0
        return StepOutcome(self.render(self._state), reward, terminal, success)

    def _transition(
        self, state: EnvState, action: int
    ) -> tuple[tuple[int, int], frozenset[int], frozenset[int]]:
        dr, dc = _MOVES[action]
        target = (state.pos[0] + dr, state.pos[1] + dc)
        keys_held, doors_open = state.keys_held, state.doors_open
        if self.layout.is_wall(target):
            return state.pos, keys_held, doors_open
        if target in self.layout.doors:
            idx = self.layout.doors.index(target)
            if idx not in doors_open:
                if idx not in keys_held:
                    return state.pos, keys_held, doors_open  # locked: no-op
                doors_open = doors_open | {idx}
        if target in self.layout.keys:
            idx = self.layout.keys.index(target)
            if idx not in keys_held:
                keys_held = keys_held | {idx}
        return target, keys_held, doors_open

    # -- rendering ----------------------------------------------------------

    def render(self, state: EnvState) -> str:
        """Observation text: region, cell, inventory, and adjacent cell contents."""
        cache_key = (state.pos, state.keys_held, state.doors_open)
        text = self._render_cache.get(cache_key)
        if text is None:
            text = self._render_uncached(state)
            self._render_cache[cache_key] = text
        return text

    def _render_uncached(self, state: EnvState) -> str:
        layout = self.layout
        region = layout.regions.get(state.pos, "void")
        inventory = "inv_" + ("".join(f"k{i}" for i in sorted(state.keys_held)) or "none")
        tokens = [f"loc_{region}", f"pos_{state.pos[0]}x{state.pos[1]}", inventory]
        for name, (dr, dc) in zip("nesw", _MOVES):
            tokens.append(f"{name}_{self._cell_content(state, (state.pos[0] + dr, state.pos[1] + dc))}")
        return " ".join(tokens)

    def _cell_content(self, state: EnvState, pos: tuple[int, int]) -> str:
        layout = self.layout
        if layout.is_wall(pos):
            return "wall"
        if pos in layout.doors:
            idx = layout.doors.index(pos)
            return "dooropen" if idx in state.doors_open else "doorshut"
        if pos in layout.keys and layout.keys.index(pos) not in state.keys_held:
            return "key"
        if pos == layout.goal:
            return "goal"
        return "floor"


def enumerate_reachable_transitions(
    layout: Layout | str,
) -> Iterator[tuple[str, int, str]]:
    """Exhaustive (observation, action, next observation) triples over reachable states.

    Breadth-first over the step-counter-free state space, so the full
    transition structure of a layout can be analyzed without sampling.
    """
    env = GridEnv(layout, horizon=2)
    initial = EnvState(env.layout.start, frozenset(), frozenset(), 0)
    seen = {(initial.pos, initial.keys_held, initial.doors_open)}
    frontier = [initial]
    while frontier:
        state = frontier.pop()
        if state.pos == env.layout.goal:
            continue  # terminal states have no outgoing transitions
        for action in range(env.action_count):
            pos, keys_held, doors_open = env._transition(state, action)
            nxt = EnvState(pos, keys_held, doors_open, 0)
            yield env.render(state), action, env.render(nxt)
            sig = (pos, keys_held, doors_open)
            if sig not in seen:
                seen.add(sig)
                frontier.append(nxt)
