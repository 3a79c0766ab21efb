"""Exact just-intonation math over a two-axis ratio lattice.

All pitch ratios are ``fractions.Fraction`` values kept in lowest terms, so
two computation orders of the same lattice coordinate always produce
structurally identical results.  The lattice has a fifths axis (steps of 3/2)
and a limb axis whose step is 5/4 in the five-limit system and 7/4 in the
seven-limit system.  Frequencies only become floats at the final Hz
conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

#: Frequencies are plain floats measured in Hz.
Hz = float

#: Default reference pitch (A4) used when a base is not supplied.
DEFAULT_BASE_HZ: Hz = 440.0

#: Largest supported magnitude for either lattice exponent.  Exponents are
#: exact at any size in principle, but bounding them keeps every ratio a
#: small integer pair and makes out-of-range coordinates an explicit error
#: instead of a silent precision surprise downstream.
MAX_EXPONENT = 16

THREE_HALVES = Fraction(3, 2)
FIVE_FOURTHS = Fraction(5, 4)
SEVEN_FOURTHS = Fraction(7, 4)

#: The syntonic comma: the gap between the Pythagorean major third (81/64)
#: and the just major third (5/4), about 21.5 cents.
SYNTONIC_COMMA = Fraction(81, 80)

_LETTER_FIFTH_ORDER = "FCGDAEB"
_A_FIFTH_INDEX = _LETTER_FIFTH_ORDER.index("A")

_TET_NAMES = ("C", "C♯", "D", "D♯", "E", "F", "F♯", "G", "G♯", "A", "A♯", "B")


class CoordRangeError(ValueError):
    """A lattice exponent exceeds the supported range (|n| > MAX_EXPONENT)."""


class TuningSystem(Enum):
    """Which ratio the limb axis steps by: 5/4 (five-limit) or 7/4 (seven-limit)."""

    FIVE_LIMIT = "5"
    SEVEN_LIMIT = "7"

    @property
    def limb_step(self) -> Fraction:
        return FIVE_FOURTHS if self is TuningSystem.FIVE_LIMIT else SEVEN_FOURTHS

    def toggled(self) -> "TuningSystem":
        return (
            TuningSystem.SEVEN_LIMIT
            if self is TuningSystem.FIVE_LIMIT
            else TuningSystem.FIVE_LIMIT
        )


class LatticeCoord(NamedTuple):
    """Integer exponents into the lattice: ``fifths`` of 3/2, ``limb`` of the limb step."""

    fifths: int
    limb: int


@dataclass(frozen=True)
class HelmholtzAnnotation:
    """Spelled note name plus comma/septimal alterations for one coordinate.

    ``note_name`` is the Pythagorean spelling from the chain of fifths around
    A.  ``comma_alteration`` counts syntonic commas (negative = lowered), and
    ``septimal_alteration`` counts 7/4 steps; at most one of the two is
    nonzero for any coordinate.
    """

    note_name: str
    comma_alteration: int = 0
    septimal_alteration: int = 0

    def label(self) -> str:
        """Compact one-cell rendering, e.g. ``C♯ -1c`` or ``G +1s``."""
        parts = [self.note_name]
        if self.comma_alteration:
            parts.append(f"{self.comma_alteration:+d}c")
        if self.septimal_alteration:
            parts.append(f"{self.septimal_alteration:+d}s")
        return " ".join(parts)


def _check_positive_ratio(r: Fraction) -> None:
    if r <= 0:
        raise ValueError(f"ratio must be positive, got {r}")


def octave_reduce(r: Fraction) -> Fraction:
    """Scale ``r`` by a power of two into the octave range [1, 2)."""
    _check_positive_ratio(r)
    while r < 1:
        r *= 2
    while r >= 2:
        r /= 2
    return r


def lattice_ratio(coord: LatticeCoord, system: TuningSystem) -> Fraction:
    """Exact octave-reduced ratio of a lattice coordinate.

    Multiplies (3/2)^fifths by the system's limb step raised to ``limb``,
    then octave-reduces.  Raises CoordRangeError when either exponent
    magnitude exceeds MAX_EXPONENT.
    """
    fifths, limb = coord
    if abs(fifths) > MAX_EXPONENT or abs(limb) > MAX_EXPONENT:
        raise CoordRangeError(
            f"lattice exponents {coord} outside supported range ±{MAX_EXPONENT}"
        )
    return octave_reduce(THREE_HALVES**fifths * system.limb_step**limb)


def ratio_cents(r: Fraction) -> float:
    """Size of the interval ``r`` in cents (1200 × log2)."""
    _check_positive_ratio(r)
    return 1200.0 * (math.log2(r.numerator) - math.log2(r.denominator))


def coord_frequency(
    coord: LatticeCoord, system: TuningSystem, base: Hz = DEFAULT_BASE_HZ
) -> Hz:
    """Frequency of a coordinate relative to ``base``; lands in [base, 2·base).

    The ratio is formed exactly and only the final division produces a float,
    so dyadic results like 7/4 × 440 = 770 come out exact.
    """
    if base <= 0:
        raise ValueError(f"base frequency must be positive, got {base}")
    r = lattice_ratio(coord, system)
    return base * r.numerator / r.denominator


def tet_ratio(semitones: float) -> float:
    """Equal-temperament ratio for a signed number of 12TET semitones."""
    return 2.0 ** (semitones / 12.0)


def tet_frequency(semitones: float, base: Hz = DEFAULT_BASE_HZ) -> Hz:
    """Frequency ``semitones`` 12TET steps away from ``base``."""
    if base <= 0:
        raise ValueError(f"base frequency must be positive, got {base}")
    return base * tet_ratio(semitones)


def cents_between(a: Hz, b: Hz) -> float:
    """Signed cents from pitch ``a`` up to pitch ``b`` (antisymmetric)."""
    if a <= 0 or b <= 0:
        raise ValueError(f"frequencies must be positive, got {a}, {b}")
    return 1200.0 * math.log2(b / a)


def _fifth_chain_name(steps_from_a: int) -> str:
    """Spell a note ``steps_from_a`` fifths away from A.

    Positive chains pick up sharps, negative chains flats, seven fifths per
    accidental.
    """
    position = _A_FIFTH_INDEX + steps_from_a
    letter = _LETTER_FIFTH_ORDER[position % 7]
    accidentals = position // 7
    if accidentals >= 0:
        return letter + "♯" * accidentals
    return letter + "♭" * (-accidentals)


def helmholtz_annotation(
    coord: LatticeCoord, system: TuningSystem
) -> HelmholtzAnnotation:
    """Helmholtz-Ellis style annotation for a coordinate.

    Five-limit: each ascending 5/4 limb step is spelled as four Pythagorean
    fifths lowered by one syntonic comma, so the name comes from the chain
    fifths + 4·limb and the comma count is −limb.  Seven-limit: the name
    follows the fifths axis alone and the limb count is reported as the
    septimal alteration.
    """
    fifths, limb = coord
    if system is TuningSystem.FIVE_LIMIT:
        return HelmholtzAnnotation(
            note_name=_fifth_chain_name(fifths + 4 * limb),
            comma_alteration=-limb,
        )
    return HelmholtzAnnotation(
        note_name=_fifth_chain_name(fifths),
        septimal_alteration=limb,
    )


def nearest_tet(freq: Hz, base: Hz = DEFAULT_BASE_HZ) -> tuple[str, float]:
    """Nearest 12TET note to ``freq`` and the signed deviation in cents.

    Note names are spelled relative to the base pitch being A4, e.g.
    770 Hz over a 440 base reads as G5 about 31 cents flat.
    """
    semis = cents_between(base, freq) / 100.0
    nearest = round(semis)
    midi = 69 + nearest  # A4 = MIDI 69
    name = f"{_TET_NAMES[midi % 12]}{midi // 12 - 1}"
    return name, (semis - nearest) * 100.0
