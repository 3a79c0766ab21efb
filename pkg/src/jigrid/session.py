"""Event-sourced sessions: timestamped input logs, deterministic replay,
and wire-format serialization shared by the server, the CLI, and clients.

A session log is plain text, one event per line::

    at=0 kind=move arg=up
    at=120 kind=button arg=draw

``at`` is milliseconds from session start and must never decrease.  The
same records travel over the wire as JSON objects (see PROTOCOL.md).
Replaying a log folds the engine over the events in order, so a log plus a
grid config fully determines the final state, every snapshot, and every
effect, byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import (
    Button,
    Cell,
    ChordOn,
    Direction,
    EngineEffect,
    FadeOut,
    Flash,
    GameState,
    GridConfig,
    GridDiff,
    MarqueeColor,
    Mode,
    PALETTE,
    StepResult,
    apply_action,
    new_game,
)
from .synth import TimedEffect
from .tuning import Hz, nearest_tet

LOG_SUFFIX = ".limlog"

_DIRECTIONS = {d.value: d for d in Direction}
_BUTTONS = {b.value: b for b in Button}


@dataclass(frozen=True)
class PerformanceEvent:
    """One joystick move or button press, ``at`` milliseconds into the session."""

    at: int
    action: Direction | Button

    @property
    def kind(self) -> str:
        return "move" if isinstance(self.action, Direction) else "button"

    @property
    def arg(self) -> str:
        return self.action.value


EventLog = tuple[PerformanceEvent, ...]


class LogParseError(ValueError):
    """A malformed log line; carries its 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def append_event(log: EventLog, event: PerformanceEvent) -> EventLog:
    """Extend the log; timestamps must be non-decreasing."""
    if event.at < 0:
        raise ValueError(f"timestamp must be >= 0, got {event.at}")
    if log and event.at < log[-1].at:
        raise ValueError(
            f"timestamp {event.at} decreases below last event at {log[-1].at}"
        )
    return log + (event,)


def event_to_line(event: PerformanceEvent) -> str:
    return f"at={event.at} kind={event.kind} arg={event.arg}"


def _parse_line(line: str, lineno: int) -> PerformanceEvent:
    fields = line.split(" ")
    if len(fields) != 3:
        raise LogParseError(lineno, f"expected 3 fields, got {len(fields)}")
    values = {}
    for field, key in zip(fields, ("at", "kind", "arg")):
        prefix = key + "="
        if not field.startswith(prefix):
            raise LogParseError(lineno, f"expected '{key}=...', got '{field}'")
        values[key] = field[len(prefix) :]
    if not values["at"].isdigit():
        raise LogParseError(lineno, f"bad timestamp '{values['at']}'")
    at = int(values["at"])
    kind, arg = values["kind"], values["arg"]
    if kind == "move":
        if arg not in _DIRECTIONS:
            raise LogParseError(lineno, f"unknown direction '{arg}'")
        return PerformanceEvent(at, _DIRECTIONS[arg])
    if kind == "button":
        if arg not in _BUTTONS:
            raise LogParseError(lineno, f"unknown button '{arg}'")
        return PerformanceEvent(at, _BUTTONS[arg])
    raise LogParseError(lineno, f"unknown kind '{kind}'")


def serialize_log(log: Iterable[PerformanceEvent]) -> str:
    return "".join(event_to_line(e) + "\n" for e in log)


def parse_log(text: str) -> EventLog:
    """Parse log text strictly; raises LogParseError with the offending line."""
    events: EventLog = ()
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue  # blank line (including the trailing newline)
        event = _parse_line(line, lineno)
        try:
            events = append_event(events, event)
        except ValueError as exc:
            raise LogParseError(lineno, str(exc)) from None
    return events


def load_log(path) -> EventLog:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_log(fh.read())


def save_log(log: Iterable[PerformanceEvent], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_log(log))


# --- snapshots ---------------------------------------------------------------


@dataclass(frozen=True)
class ChordVoice:
    freq_hz: Hz
    tet_name: str
    cents_off: float


@dataclass(frozen=True)
class SessionSnapshot:
    """Everything a client needs to draw one frame of the session."""

    mode: str
    system: str
    cursor: Cell
    pending: tuple[Cell, ...]
    cells: tuple[tuple[Cell, int], ...]  # committed cells with color indices
    history_len: int
    next_color: int
    chord: tuple[ChordVoice, ...] | None


def snapshot_of(state: GameState) -> SessionSnapshot:
    """Project a game state to its client-facing snapshot.

    While shifting, the slid shape is presented as the pending cells, which
    is what the performer is holding on screen.
    """
    if state.mode is Mode.SHIFTING:
        pending = tuple(sorted(state.grabbed_cells()))
    else:
        pending = tuple(sorted(state.pending))
    chord = None
    if state.sustained_chord is not None:
        voices = []
        for f in state.sustained_chord:
            name, off = nearest_tet(f, state.config.base_hz)
            voices.append(ChordVoice(f, name, off))
        chord = tuple(voices)
    return SessionSnapshot(
        mode=state.mode.value,
        system=state.system.value,
        cursor=state.cursor,
        pending=pending,
        cells=tuple(sorted(state.grid_colors().items())),
        history_len=len(state.history),
        next_color=state.color_counter % len(PALETTE),
        chord=chord,
    )


def snapshot_to_wire(snap: SessionSnapshot) -> dict:
    """Snapshot as the JSON-ready dict fixed by PROTOCOL.md."""
    return {
        "type": "snapshot",
        "mode": snap.mode,
        "system": snap.system,
        "cursor": [snap.cursor.row, snap.cursor.col],
        "pending": [[c.row, c.col] for c in snap.pending],
        "cells": [[c.row, c.col, color] for c, color in snap.cells],
        "history_len": snap.history_len,
        "next_color": snap.next_color,
        "chord": None
        if snap.chord is None
        else [
            {
                "freq_hz": round(v.freq_hz, 6),
                "tet_name": v.tet_name,
                "cents_off": round(v.cents_off, 3),
            }
            for v in snap.chord
        ],
    }


def effect_to_wire(effect: EngineEffect) -> dict | None:
    """Effect as its wire message, or None for effects that stay engine-side.

    Grid changes are not broadcast as effects; snapshots already carry the
    full cell map.
    """
    if isinstance(effect, ChordOn):
        return {"type": "effect", "name": "chord_on", "payload": {"freqs": list(effect.freqs)}}
    if isinstance(effect, Flash):
        return {"type": "effect", "name": "flash", "payload": {}}
    if isinstance(effect, FadeOut):
        return {"type": "effect", "name": "fade", "payload": {"seconds": effect.seconds}}
    if isinstance(effect, MarqueeColor):
        return {"type": "effect", "name": "marquee", "payload": {"color_index": effect.color_index}}
    assert isinstance(effect, GridDiff)
    return None


def parse_wire_input(message: dict) -> PerformanceEvent:
    """Validate a client input message; raises ValueError with a reason."""
    if not isinstance(message, dict) or message.get("type") != "input":
        raise ValueError("expected {'type': 'input', ...}")
    at = message.get("at")
    if not isinstance(at, int) or isinstance(at, bool) or at < 0:
        raise ValueError("'at' must be a non-negative integer")
    kind = message.get("kind")
    arg = message.get("arg")
    if kind == "move":
        if arg not in _DIRECTIONS:
            raise ValueError(f"unknown direction {arg!r}")
        return PerformanceEvent(at, _DIRECTIONS[arg])
    if kind == "button":
        if arg not in _BUTTONS:
            raise ValueError(f"unknown button {arg!r}")
        return PerformanceEvent(at, _BUTTONS[arg])
    raise ValueError(f"unknown kind {kind!r}")


def dumps_wire(message: dict) -> str:
    """Canonical JSON encoding for wire messages (stable key order, compact)."""
    return json.dumps(message, separators=(",", ":"))


# --- replay ------------------------------------------------------------------


@dataclass(frozen=True)
class ReplayStep:
    event: PerformanceEvent
    result: StepResult
    snapshot: SessionSnapshot


def replay_steps(log: Sequence[PerformanceEvent], config: GridConfig | None = None) -> list[ReplayStep]:
    """Fold the engine over the log, capturing each step's result and snapshot."""
    state = new_game(config)
    steps = []
    for event in log:
        result = apply_action(state, event.action)
        state = result.state
        steps.append(ReplayStep(event, result, snapshot_of(state)))
    return steps


def replay(
    log: Sequence[PerformanceEvent], config: GridConfig | None = None
) -> tuple[GameState, tuple[TimedEffect, ...]]:
    """Deterministically recompute the final state and full effect stream."""
    steps = replay_steps(log, config)
    effects = tuple(
        TimedEffect(step.event.at, effect)
        for step in steps
        for effect in step.result.effects
    )
    final = steps[-1].result.state if steps else new_game(config)
    return final, effects
