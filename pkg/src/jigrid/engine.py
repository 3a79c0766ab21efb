"""Deterministic performance state machine for the grid instrument.

Play happens on a rectangular grid whose cells index into the tuning
lattice (up = ascending fifths, right = ascending limb steps).  The rules:

1. a shape is exactly four cells, orthogonally connected;
2. the first shape may sit anywhere, every later one must share at least
   one cell with some earlier shape, except shapes produced by the shift,
   mirror, and rotate transforms, which are exempt;
3. each committed shape takes the next color in a cycling palette.

Every operation is a pure function from state to a :class:`StepResult`
holding the new state, any emitted effects, and whether the input was
accepted.  States are immutable, so histories and snapshots can be shared
freely.  Inputs after END GAME are ignored no-ops.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Union

from .tuning import (
    DEFAULT_BASE_HZ,
    CoordRangeError,
    Hz,
    LatticeCoord,
    TuningSystem,
    coord_frequency,
)

#: Shape colors, assigned in order and cycling.
PALETTE = ("red", "orange", "yellow", "green", "blue", "violet")


class Mode(Enum):
    DRAWING = "drawing"
    SHIFTING = "shifting"
    ENDED = "ended"


class Direction(Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"


class Button(Enum):
    DRAW = "draw"
    SONIFY = "sonify"
    SHIFT = "shift"
    MIRROR = "mirror"
    ROTATE = "rotate"
    DELETE = "delete"
    CHANGE_TUNING = "change_tuning"
    END_GAME = "end_game"


class Cell(NamedTuple):
    """Grid cell; row 0 is the top row, col 0 the left column."""

    row: int
    col: int


@dataclass(frozen=True)
class GridConfig:
    width: int = 16
    height: int = 16
    origin_row: int = 8
    origin_col: int = 8
    base_hz: Hz = DEFAULT_BASE_HZ
    fade_seconds: float = 5.0

    def __post_init__(self) -> None:
        if not (4 <= self.width <= 64 and 4 <= self.height <= 64):
            raise ValueError(
                f"grid must be between 4x4 and 64x64, got {self.width}x{self.height}"
            )
        if not (0 <= self.origin_row < self.height and 0 <= self.origin_col < self.width):
            raise ValueError(
                f"origin ({self.origin_row},{self.origin_col}) outside "
                f"{self.width}x{self.height} grid"
            )
        if self.base_hz <= 0:
            raise ValueError(f"base_hz must be positive, got {self.base_hz}")
        if self.fade_seconds <= 0:
            raise ValueError(f"fade_seconds must be positive, got {self.fade_seconds}")

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell.row < self.height and 0 <= cell.col < self.width


@dataclass(frozen=True)
class Shape:
    """One committed four-cell chord."""

    cells: frozenset[Cell]
    color_index: int
    ordinal: int


# --- effects ---------------------------------------------------------------


@dataclass(frozen=True)
class ChordOn:
    """Retarget the four voices; frequencies sorted ascending."""

    freqs: tuple[Hz, ...]

    def __post_init__(self) -> None:
        if len(self.freqs) != 4:
            raise ValueError(f"a chord carries exactly four voices, got {len(self.freqs)}")


@dataclass(frozen=True)
class Flash:
    """Full-screen white burst."""


@dataclass(frozen=True)
class FadeOut:
    seconds: float


@dataclass(frozen=True)
class GridDiff:
    """Committed-cell changes: newly lit cells with colors, and unlit cells."""

    lit: tuple[tuple[Cell, int], ...] = ()
    unlit: tuple[Cell, ...] = ()


@dataclass(frozen=True)
class MarqueeColor:
    """The palette index currently being drawn with."""

    color_index: int


EngineEffect = Union[ChordOn, Flash, FadeOut, GridDiff, MarqueeColor]


# --- state -----------------------------------------------------------------


@dataclass(frozen=True)
class GameState:
    config: GridConfig
    mode: Mode = Mode.DRAWING
    cursor: Cell = Cell(0, 0)
    pending: frozenset[Cell] = frozenset()
    pending_exempt: bool = False
    history: tuple[Shape, ...] = ()
    shift_offset: tuple[int, int] = (0, 0)
    system: TuningSystem = TuningSystem.FIVE_LIMIT
    color_counter: int = 0
    sustained_chord: tuple[Hz, ...] | None = None

    def grabbed_cells(self) -> frozenset[Cell]:
        """Last committed shape translated by the current shift offset."""
        dr, dc = self.shift_offset
        return frozenset(Cell(c.row + dr, c.col + dc) for c in self.history[-1].cells)

    def grid_colors(self) -> dict[Cell, int]:
        """Cell -> color index over all committed shapes, later shapes on top."""
        out: dict[Cell, int] = {}
        for shape in self.history:
            for cell in shape.cells:
                out[cell] = shape.color_index
        return out


@dataclass(frozen=True)
class StepResult:
    state: GameState
    effects: tuple[EngineEffect, ...] = ()
    accepted: bool = True
    reason: str | None = None


def _noop(state: GameState, reason: str) -> StepResult:
    return StepResult(state, (), accepted=False, reason=reason)


# --- shape validation ------------------------------------------------------


class ShapeFault(Enum):
    WRONG_COUNT = "wrong_count"
    NOT_CONTIGUOUS = "not_contiguous"
    NO_OVERLAP = "no_overlap"


def is_connected(cells: frozenset[Cell]) -> bool:
    """True when the cells form one component under orthogonal adjacency."""
    if not cells:
        return False
    todo = [next(iter(cells))]
    seen = {todo[0]}
    while todo:
        r, c = todo.pop()
        for nb in (Cell(r - 1, c), Cell(r + 1, c), Cell(r, c - 1), Cell(r, c + 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                todo.append(nb)
    return len(seen) == len(cells)


def validate_shape(
    cells: frozenset[Cell],
    history: tuple[Shape, ...],
    config: GridConfig,
    exempt_overlap: bool = False,
) -> ShapeFault | None:
    """Check the play rules; returns the violated rule or None when valid.

    Cells are assumed in-bounds.  The overlap rule compares against the
    union of all prior shapes' cells and is skipped for the first shape or
    when the caller holds an exemption (shift/mirror/rotate commits).
    """
    if len(cells) != 4:
        return ShapeFault.WRONG_COUNT
    if not is_connected(cells):
        return ShapeFault.NOT_CONTIGUOUS
    if history and not exempt_overlap:
        prior = set().union(*(s.cells for s in history))
        if not cells & prior:
            return ShapeFault.NO_OVERLAP
    return None


# --- shape transforms ------------------------------------------------------


def mirror_cells(cells: frozenset[Cell], width: int) -> frozenset[Cell]:
    """Reflect over the grid's vertical center line (left-right flip)."""
    return frozenset(Cell(c.row, width - 1 - c.col) for c in cells)


def rotate_cells(cells: frozenset[Cell]) -> frozenset[Cell]:
    """Rotate 90° clockwise in place.

    The cell set turns about its top-left-most cell and the image is then
    re-anchored so its bounding box keeps the source's top-left corner.
    Anchoring makes the transform a pure function of the shape, so four
    applications restore the original cell set exactly.
    """
    pr, pc = min(cells)
    image = [Cell(pr + (c.col - pc), pc - (c.row - pr)) for c in cells]
    row0 = min(c.row for c in cells)
    col0 = min(c.col for c in cells)
    shift_r = row0 - min(c.row for c in image)
    shift_c = col0 - min(c.col for c in image)
    return frozenset(Cell(c.row + shift_r, c.col + shift_c) for c in image)


# --- lattice mapping -------------------------------------------------------


def cell_to_coord(cell: Cell, config: GridConfig) -> LatticeCoord:
    """Map a grid cell to its lattice coordinate (up = +fifths, right = +limb)."""
    if not config.in_bounds(cell):
        raise ValueError(f"cell {cell} outside {config.width}x{config.height} grid")
    return LatticeCoord(config.origin_row - cell.row, cell.col - config.origin_col)


def chord_frequencies(
    cells: frozenset[Cell], config: GridConfig, system: TuningSystem
) -> tuple[Hz, ...]:
    """Four voice frequencies for a shape, sorted ascending."""
    freqs = [
        coord_frequency(cell_to_coord(cell, config), system, config.base_hz)
        for cell in sorted(cells)
    ]
    return tuple(sorted(freqs))


# --- operations ------------------------------------------------------------


def new_game(config: GridConfig | None = None) -> GameState:
    config = config or GridConfig()
    return GameState(config=config, cursor=Cell(config.origin_row, config.origin_col))


_DELTAS = {
    Direction.UP: (-1, 0),
    Direction.DOWN: (1, 0),
    Direction.LEFT: (0, -1),
    Direction.RIGHT: (0, 1),
}


def move_cursor(state: GameState, direction: Direction) -> StepResult:
    """Move the cursor (drawing) or slide the grabbed shape (shifting).

    Both clamp at the grid edges; a clamped move is still an accepted input.
    """
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    dr, dc = _DELTAS[direction]
    cfg = state.config
    if state.mode is Mode.DRAWING:
        nxt = Cell(
            min(max(state.cursor.row + dr, 0), cfg.height - 1),
            min(max(state.cursor.col + dc, 0), cfg.width - 1),
        )
        return StepResult(replace(state, cursor=nxt))
    # Shifting: the whole grabbed shape must stay in-bounds.
    odr, odc = state.shift_offset
    candidate = (odr + dr, odc + dc)
    trial = replace(state, shift_offset=candidate)
    if all(cfg.in_bounds(c) for c in trial.grabbed_cells()):
        return StepResult(trial)
    return StepResult(state)


def press_draw(state: GameState) -> StepResult:
    """Add the cursor cell to the pending shape (idempotent, max four cells)."""
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    if state.mode is not Mode.DRAWING:
        return _noop(state, "not_drawing")
    if state.cursor in state.pending:
        return StepResult(state)
    if len(state.pending) >= 4:
        return _noop(state, "shape_full")
    effects: tuple[EngineEffect, ...] = ()
    if not state.pending:
        effects = (MarqueeColor(state.color_counter % len(PALETTE)),)
    return StepResult(
        replace(state, pending=state.pending | {state.cursor}), effects
    )


def _commit_shape(
    state: GameState, cells: frozenset[Cell], lead: tuple[EngineEffect, ...] = ()
) -> StepResult:
    """Append a validated shape, assign its color, and sound its chord."""
    try:
        freqs = chord_frequencies(cells, state.config, state.system)
    except CoordRangeError:
        return _noop(state, "coord_out_of_range")
    color = state.color_counter % len(PALETTE)
    shape = Shape(cells=cells, color_index=color, ordinal=state.color_counter)
    nxt = replace(
        state,
        mode=Mode.DRAWING,
        pending=frozenset(),
        pending_exempt=False,
        history=state.history + (shape,),
        shift_offset=(0, 0),
        color_counter=state.color_counter + 1,
        sustained_chord=freqs,
    )
    effects = lead + (
        ChordOn(freqs),
        GridDiff(lit=tuple((c, color) for c in sorted(cells))),
    )
    return StepResult(nxt, effects)


def press_sonify(state: GameState) -> StepResult:
    """Commit the pending shape (drawing) or the slid shape (shifting).

    Invalid shapes are silent no-ops with the violated rule as the reason.
    """
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    if state.mode is Mode.SHIFTING:
        cells = state.grabbed_cells()
        fault = validate_shape(cells, state.history, state.config, exempt_overlap=True)
        if fault is not None:
            return _noop(state, fault.value)
        return _commit_shape(state, cells)
    fault = validate_shape(
        state.pending, state.history, state.config, exempt_overlap=state.pending_exempt
    )
    if fault is not None:
        return _noop(state, fault.value)
    return _commit_shape(state, state.pending)


def press_shift(state: GameState) -> StepResult:
    """Toggle shifting mode, grabbing the most recently sonified shape."""
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    if state.mode is Mode.SHIFTING:
        return StepResult(
            replace(state, mode=Mode.DRAWING, shift_offset=(0, 0))
        )
    if not state.history:
        return _noop(state, "empty_history")
    return StepResult(
        replace(
            state,
            mode=Mode.SHIFTING,
            shift_offset=(0, 0),
            pending=frozenset(),
            pending_exempt=False,
        )
    )


def press_mirror(state: GameState) -> StepResult:
    """Reflect the last shape over the vertical center line into pending."""
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    if state.mode is not Mode.DRAWING:
        return _noop(state, "not_drawing")
    if not state.history:
        return _noop(state, "empty_history")
    cells = mirror_cells(state.history[-1].cells, state.config.width)
    nxt = replace(state, pending=cells, pending_exempt=True)
    return StepResult(nxt, (MarqueeColor(state.color_counter % len(PALETTE)),))


def press_rotate(state: GameState) -> StepResult:
    """Rotate the last shape 90° clockwise in place into pending.

    Rejected outright when any rotated cell would leave the grid.
    """
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    if state.mode is not Mode.DRAWING:
        return _noop(state, "not_drawing")
    if not state.history:
        return _noop(state, "empty_history")
    rotated = rotate_cells(state.history[-1].cells)
    if not all(state.config.in_bounds(c) for c in rotated):
        return _noop(state, "out_of_bounds")
    nxt = replace(state, pending=rotated, pending_exempt=True)
    return StepResult(nxt, (MarqueeColor(state.color_counter % len(PALETTE)),))


def press_delete(state: GameState) -> StepResult:
    """Clear the pending shape; cancels shifting mode. History is untouched."""
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    return StepResult(
        replace(
            state,
            mode=Mode.DRAWING,
            pending=frozenset(),
            pending_exempt=False,
            shift_offset=(0, 0),
        )
    )


def press_change_tuning(state: GameState) -> StepResult:
    """Swap five/seven limit, keeping only the last shape and retuning it."""
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    if state.mode is not Mode.DRAWING:
        return _noop(state, "not_drawing")
    system = state.system.toggled()
    kept = state.history[-1:]
    dropped: list[Cell] = []
    if len(state.history) > 1:
        gone = set().union(*(s.cells for s in state.history[:-1])) - kept[0].cells
        dropped = sorted(gone)
    effects: list[EngineEffect] = [Flash()]
    if dropped:
        effects.append(GridDiff(unlit=tuple(dropped)))
    chord = state.sustained_chord
    if kept:
        try:
            chord = chord_frequencies(kept[0].cells, state.config, system)
        except CoordRangeError:
            return _noop(state, "coord_out_of_range")
        effects.append(ChordOn(chord))
    nxt = replace(
        state,
        system=system,
        history=kept,
        pending=frozenset(),
        pending_exempt=False,
        sustained_chord=chord,
    )
    return StepResult(nxt, tuple(effects))


def press_end_game(state: GameState) -> StepResult:
    """End the performance: release the chord and fade the screen."""
    if state.mode is Mode.ENDED:
        return _noop(state, "ended")
    nxt = replace(state, mode=Mode.ENDED, sustained_chord=None)
    return StepResult(nxt, (FadeOut(state.config.fade_seconds),))


_BUTTON_HANDLERS = {
    Button.DRAW: press_draw,
    Button.SONIFY: press_sonify,
    Button.SHIFT: press_shift,
    Button.MIRROR: press_mirror,
    Button.ROTATE: press_rotate,
    Button.DELETE: press_delete,
    Button.CHANGE_TUNING: press_change_tuning,
    Button.END_GAME: press_end_game,
}


def apply_action(state: GameState, action: Direction | Button) -> StepResult:
    """Dispatch one joystick or button input."""
    if isinstance(action, Direction):
        return move_cursor(state, action)
    return _BUTTON_HANDLERS[action](state)
