"""jigrid: a grid-based just-intonation arcade instrument.

Exact five/seven-limit tuning math, a deterministic grid/shape performance
engine, an offline chord renderer, and an event-sourced session service.
"""

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
    Shape,
    StepResult,
    apply_action,
    cell_to_coord,
    new_game,
    validate_shape,
)
from .session import (
    EventLog,
    LogParseError,
    PerformanceEvent,
    SessionSnapshot,
    append_event,
    load_log,
    parse_log,
    replay,
    replay_steps,
    save_log,
    serialize_log,
    snapshot_of,
)
from .synth import RenderConfig, TimedEffect, VoiceParams, Waveform, render_performance, wav_encode
from .tuning import (
    CoordRangeError,
    HelmholtzAnnotation,
    LatticeCoord,
    TuningSystem,
    cents_between,
    coord_frequency,
    helmholtz_annotation,
    lattice_ratio,
    octave_reduce,
    ratio_cents,
    tet_frequency,
)

__version__ = "0.1.0"
