"""Offline, sample-accurate rendering of an effect stream to PCM/WAV.

Four oscillator voices with linear ADSR envelopes.  Each chord event starts
four fresh notes while the previous chord's notes enter their release, so
transitions crossfade; a fade event releases everything, applies a linear
master ramp to silence, and ends the buffer.  Rendering is a pure function
of its inputs: the same stream and configs always produce identical bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .engine import ChordOn, EngineEffect, FadeOut

SUPPORTED_RATES = (22050, 44100, 48000)

#: Sustain tail appended after the last event when a stream does not end in
#: a fade; the final chord would otherwise ring forever.
DEFAULT_TAIL_SECONDS = 1.0


class Waveform(Enum):
    SINE = "sine"
    TRIANGLE = "triangle"
    SAWTOOTH = "sawtooth"
    SQUARE = "square"


@dataclass(frozen=True)
class VoiceParams:
    waveform: Waveform = Waveform.SINE
    attack: float = 0.010
    decay: float = 0.050
    sustain_level: float = 0.8
    release: float = 0.400
    gain: float = 0.25  # per voice; four voices sum to full scale at peak

    def __post_init__(self) -> None:
        if min(self.attack, self.decay, self.release) < 0:
            raise ValueError("envelope times must be >= 0")
        if not (0.0 <= self.sustain_level <= 1.0):
            raise ValueError(f"sustain_level must be in [0,1], got {self.sustain_level}")
        if not (0.0 <= self.gain <= 1.0):
            raise ValueError(f"gain must be in [0,1], got {self.gain}")


@dataclass(frozen=True)
class RenderConfig:
    sample_rate: int = 44100
    bit_depth: int = 16
    channels: int = 1

    def __post_init__(self) -> None:
        if self.sample_rate not in SUPPORTED_RATES:
            raise ValueError(f"sample_rate must be one of {SUPPORTED_RATES}")
        if self.bit_depth != 16 or self.channels != 1:
            raise ValueError("only 16-bit mono output is supported")


@dataclass(frozen=True)
class TimedEffect:
    at_ms: int
    effect: EngineEffect


def oscillator_sample(waveform: Waveform, phase):
    """Amplitude in [-1, 1] at a phase in [0, 1); accepts scalars or arrays.

    Naive band-unlimited shapes: fine for inspection and testing, aliased
    at the extremes like any textbook oscillator.
    """
    p = np.asarray(phase, dtype=np.float64)
    if np.any((p < 0) | (p >= 1)):
        raise ValueError("phase must lie in [0, 1)")
    if waveform is Waveform.SINE:
        out = np.sin(2.0 * np.pi * p)
    elif waveform is Waveform.SQUARE:
        out = np.where(p < 0.5, 1.0, -1.0)
    elif waveform is Waveform.SAWTOOTH:
        out = 2.0 * p - 1.0
    else:  # triangle, sine-aligned: 0 at phase 0, peak at 1/4, trough at 3/4
        out = np.where(p < 0.25, 4.0 * p, np.where(p < 0.75, 2.0 - 4.0 * p, 4.0 * p - 4.0))
    if np.isscalar(phase):
        return float(out)
    return out


def envelope_gain(
    params: VoiceParams, t_since_on: float, gate_on: bool, t_since_off: float = 0.0
):
    """Piecewise-linear ADSR gain; continuous in both time arguments.

    While the gate is on: ramp 0..1 over the attack, down to the sustain
    level over the decay, then hold.  After gate-off the level at the
    moment of release ramps linearly to zero over the release time.
    Accepts scalar or array times.
    """
    t_on = np.asarray(t_since_on, dtype=np.float64)
    if np.any(t_on < 0):
        raise ValueError("times must be >= 0")
    level = _gated_level(params, t_on)
    if not gate_on:
        t_off = np.asarray(t_since_off, dtype=np.float64)
        if np.any(t_off < 0):
            raise ValueError("times must be >= 0")
        at_release = _gated_level(params, t_on - t_off)
        frac = 1.0 - t_off / params.release if params.release > 0 else np.zeros_like(t_off)
        level = at_release * np.clip(frac, 0.0, 1.0)
    if np.isscalar(t_since_on) and np.isscalar(t_since_off):
        return float(level)
    return level


def _gated_level(params: VoiceParams, t):
    """ADS portion of the envelope (gate held on)."""
    t = np.asarray(t, dtype=np.float64)
    a, d, s = params.attack, params.decay, params.sustain_level
    attack = t / a if a > 0 else np.ones_like(t)
    decay = 1.0 - (1.0 - s) * ((t - a) / d) if d > 0 else np.full_like(t, s)
    out = np.where(t < a, attack, np.where(t < a + d, decay, s))
    return np.clip(out, 0.0, 1.0)


class _Note(NamedTuple):
    freq: float
    on_at: float  # seconds
    off_at: float | None  # None while unreleased


def _validate_stream(effects: Sequence[TimedEffect]) -> None:
    last = None
    for te in effects:
        if last is not None and te.at_ms < last:
            raise ValueError(f"effect timestamps decrease at t={te.at_ms}ms")
        last = te.at_ms
        if isinstance(te.effect, ChordOn) and len(te.effect.freqs) != 4:
            raise ValueError("chord must carry exactly four frequencies")


def render_performance(
    effects: Iterable[TimedEffect],
    render: RenderConfig | None = None,
    voice: VoiceParams | None = None,
    tail_seconds: float = DEFAULT_TAIL_SECONDS,
) -> np.ndarray:
    """Render a timed effect stream to a float64 sample buffer in [-1, 1].

    Chord events retarget the four voices (the previous chord releases);
    the first fade event releases the chord, ramps the master gain to zero
    over its duration, and defines the end of the buffer.  Streams with no
    fade get ``tail_seconds`` of sustain after the last event.  In the rare
    case that overlapping crossfades push the sum past full scale the whole
    buffer is rescaled to peak at 1.
    """
    render = render or RenderConfig()
    voice = voice or VoiceParams()
    stream = list(effects)
    _validate_stream(stream)

    notes: list[_Note] = []
    live: list[int] = []  # indices of the currently sustained chord's notes
    fade_start: float | None = None
    fade_len = 0.0
    last_t = 0.0
    for te in stream:
        t = te.at_ms / 1000.0
        last_t = max(last_t, t)
        if fade_start is not None:
            break  # the fade ends the performance; ignore anything after
        if isinstance(te.effect, ChordOn):
            for i in live:
                notes[i] = notes[i]._replace(off_at=t)
            live = []
            for f in te.effect.freqs:
                live.append(len(notes))
                notes.append(_Note(freq=f, on_at=t, off_at=None))
        elif isinstance(te.effect, FadeOut):
            for i in live:
                notes[i] = notes[i]._replace(off_at=t)
            live = []
            fade_start = t
            fade_len = te.effect.seconds
    if not stream:
        return np.zeros(0, dtype=np.float64)

    if fade_start is not None:
        end = fade_start + fade_len
    else:
        end = last_t + tail_seconds
        for i in live:
            notes[i] = notes[i]._replace(off_at=end)

    sr = render.sample_rate
    total = int(round(end * sr))
    out = np.zeros(total, dtype=np.float64)
    for note in notes:
        _mix_note(out, note, sr, voice, end)

    if fade_start is not None and total:
        t_axis = np.arange(total) / sr
        ramp = np.clip(1.0 - (t_axis - fade_start) / fade_len, 0.0, 1.0) if fade_len > 0 else (
            (t_axis < fade_start).astype(np.float64)
        )
        out *= ramp

    peak = float(np.max(np.abs(out))) if total else 0.0
    if peak > 1.0:
        out /= peak
    return out


def _mix_note(
    out: np.ndarray, note: _Note, sr: int, voice: VoiceParams, end: float
) -> None:
    off = note.off_at if note.off_at is not None else end
    stop = min(off + voice.release, end)
    i0 = int(round(note.on_at * sr))
    i1 = min(int(round(stop * sr)), len(out))
    if i1 <= i0:
        return
    t = np.arange(i0, i1) / sr - note.on_at
    phase = np.mod(note.freq * t, 1.0)
    wave = oscillator_sample(voice.waveform, phase)
    t_off_at = off - note.on_at
    gains = np.where(
        t < t_off_at,
        _gated_level(voice, t),
        envelope_gain(voice, t, False, np.maximum(t - t_off_at, 0.0)),
    )
    out[i0:i1] += voice.gain * gains * wave


class EncodedWav(NamedTuple):
    data: bytes
    clip_count: int


def wav_encode(samples: Sequence[float] | np.ndarray, render: RenderConfig | None = None) -> EncodedWav:
    """Encode samples as a canonical RIFF/WAVE file (PCM 16-bit LE mono).

    Samples outside [-1, 1] are clamped and counted in ``clip_count``.
    """
    render = render or RenderConfig()
    x = np.asarray(samples, dtype=np.float64)
    clip_count = int(np.count_nonzero((x < -1.0) | (x > 1.0)))
    pcm = np.round(np.clip(x, -1.0, 1.0) * 32767.0).astype("<i2")
    payload = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,  # PCM fmt chunk size
        1,  # PCM
        render.channels,
        render.sample_rate,
        render.sample_rate * render.channels * render.bit_depth // 8,
        render.channels * render.bit_depth // 8,
        render.bit_depth,
        b"data",
        len(payload),
    )
    return EncodedWav(header + payload, clip_count)
