"""Symbolic staff model and a parser for a restricted subset of Humdrum **kern.

The subset covers what the query encodings need:

* ``*clef<S><L>`` tandem interpretations (e.g. ``*clefG2``)
* numeric meters ``*M<p>/<q>``
* notes ``<dur><dots><pitch letters><accidentals>`` such as ``8cc#`` or ``4.G``
* rests ``<dur><dots>r``
* barlines (any record starting with ``=``)

Comments, null records, other tandem interpretations, grace notes and chords
are skipped. Beam, slur, tie and articulation signifiers attached to a note
are stripped before the note is read.

Kern octaves: ``c`` is C4, ``cc`` C5, ``C`` C3, ``CC`` C2.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import BadToken, MalformedSpine, MultiSpine, OctaveOutOfRange

STEPS = "CDEFGAB"
STEP_BASE = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
MAX_ALTERATION = 2
MAX_DOTS = 3
MIN_OCTAVE, MAX_OCTAVE = -1, 9

# pitch classes 0..11 -> (step, alteration); naturals first, then sharps
_RESPELL = {}
for _step, _base in STEP_BASE.items():
    _RESPELL[_base] = (_step, 0)
for _step, _base in STEP_BASE.items():
    _RESPELL.setdefault((_base + 1) % 12, (_step, 1))
for _step, _base in STEP_BASE.items():
    _RESPELL.setdefault((_base - 1) % 12, (_step, -1))


@dataclass(frozen=True)
class PitchSpelled:
    step: str
    alteration: int = 0
    octave: int = 4

    def __post_init__(self):
        if self.step not in STEP_BASE:
            raise ValueError(f"invalid step {self.step!r}")
        if abs(self.alteration) > MAX_ALTERATION:
            raise ValueError(f"alteration {self.alteration} outside ±{MAX_ALTERATION}")

    @property
    def chromatic(self) -> int:
        return chromatic_number(self)

    @property
    def accidental(self) -> str:
        """Scientific-notation accidental: ``#``/``##`` or ``b``/``bb``."""
        return "#" * self.alteration if self.alteration > 0 else "b" * -self.alteration

    def scientific_name(self) -> str:
        return f"{self.step}{self.accidental}{self.octave}"

    def kern(self) -> str:
        if self.octave >= 4:
            letters = self.step.lower() * (self.octave - 3)
        else:
            letters = self.step * (4 - self.octave)
        acc = "#" * self.alteration if self.alteration > 0 else "-" * -self.alteration
        return letters + acc

    def __str__(self):
        return self.scientific_name()


def chromatic_number(pitch: PitchSpelled) -> int:
    """MIDI-style chromatic number; C4 is 60."""
    return 12 * (pitch.octave + 1) + STEP_BASE[pitch.step] + pitch.alteration


_SCIENTIFIC_RE = re.compile(r"^([A-G])(#{1,2}|b{1,2})?(-?\d+)$")


def parse_pitch(name: str) -> PitchSpelled:
    """Parse a scientific pitch name such as ``C4``, ``Bb3`` or ``F##-1``."""
    m = _SCIENTIFIC_RE.match(name)
    if not m:
        raise ValueError(f"not a scientific pitch name: {name!r}")
    step, acc, octave = m.groups()
    acc = acc or ""
    alteration = len(acc) if acc.startswith("#") else -len(acc)
    return PitchSpelled(step, alteration, int(octave))


def respell(chromatic: int) -> PitchSpelled:
    """Spell a chromatic number, preferring naturals, then sharps, then flats."""
    step, alteration = _RESPELL[chromatic % 12]
    octave = (chromatic - STEP_BASE[step] - alteration) // 12 - 1
    return PitchSpelled(step, alteration, octave)


def _kern_digits_value(digits: str) -> Fraction:
    # "0" is a breve, "00" a longa, "000" a maxima
    if set(digits) == {"0"}:
        return Fraction(2 ** len(digits))
    if digits.startswith("0"):
        raise ValueError(f"bad duration digits {digits!r}")
    return Fraction(1, int(digits))


def _dotted(base: Fraction, dots: int) -> Fraction:
    return base * (2 - Fraction(1, 2**dots))


@dataclass(frozen=True)
class Duration:
    """Exact note value as a fraction of a whole note.

    Only values spellable as a kern duration (digits plus up to three dots)
    are accepted, so every Duration can be written back out.
    """

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.numerator <= 0 or self.denominator <= 0:
            raise ValueError("duration must be positive")
        g = math.gcd(self.numerator, self.denominator)
        object.__setattr__(self, "numerator", self.numerator // g)
        object.__setattr__(self, "denominator", self.denominator // g)
        if _kern_spelling(self.fraction) is None:
            raise ValueError(f"duration {self.fraction} has no kern spelling")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Duration":
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def from_kern(cls, digits: str, dots: int = 0) -> "Duration":
        return cls.from_fraction(_dotted(_kern_digits_value(digits), dots))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def kern(self) -> str:
        digits, dots = _kern_spelling(self.fraction)
        return digits + "." * dots

    def __str__(self):
        return str(self.fraction)


def _kern_spelling(value: Fraction) -> Optional[tuple[str, int]]:
    # fewest dots wins, so "3." (=1/2) is spelled "2"
    for dots in range(MAX_DOTS + 1):
        base = value / _dotted(Fraction(1), dots)
        if base.numerator == 1:
            return str(base.denominator), dots
        if base.denominator == 1 and base.numerator in (2, 4, 8):
            return "0" * (base.numerator.bit_length() - 1), dots
    return None


@dataclass(frozen=True)
class Clef:
    shape: str
    line: int
    kind = "clef"

    def __post_init__(self):
        if self.shape not in ("G", "F", "C"):
            raise ValueError(f"invalid clef shape {self.shape!r}")
        if not 1 <= self.line <= 5:
            raise ValueError(f"clef line {self.line} outside 1..5")

    def kern(self) -> str:
        return f"*clef{self.shape}{self.line}"


@dataclass(frozen=True)
class Meter:
    numerator: int
    denominator: int
    kind = "meter"

    def __post_init__(self):
        if self.numerator <= 0 or self.denominator <= 0:
            raise ValueError("meter terms must be positive")

    def kern(self) -> str:
        return f"*M{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class Note:
    pitch: PitchSpelled
    duration: Duration
    kind = "note"

    def kern(self) -> str:
        return self.duration.kern() + self.pitch.kern()


@dataclass(frozen=True)
class Rest:
    duration: Duration
    kind = "rest"

    def kern(self) -> str:
        return self.duration.kern() + "r"


@dataclass(frozen=True)
class Barline:
    kind = "barline"

    def kern(self) -> str:
        return "="


StaffSymbol = Union[Clef, Meter, Note, Rest, Barline]
SYMBOL_KINDS = ("clef", "meter", "note", "rest", "barline")


@dataclass(frozen=True)
class Staff:
    id: str
    symbols: tuple = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("staff id must be non-empty")
        object.__setattr__(self, "symbols", tuple(self.symbols))

    @property
    def notes(self) -> list[Note]:
        return [s for s in self.symbols if isinstance(s, Note)]

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class Corpus:
    staves: tuple = ()
    provenance: str = ""
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "staves", tuple(self.staves))
        by_id = {}
        for staff in self.staves:
            if staff.id in by_id:
                raise ValueError(f"duplicate staff id {staff.id!r}")
            by_id[staff.id] = staff
        object.__setattr__(self, "_by_id", by_id)

    def __getitem__(self, staff_id: str) -> Staff:
        return self._by_id[staff_id]

    def __contains__(self, staff_id) -> bool:
        return staff_id in self._by_id

    def __iter__(self):
        return iter(self.staves)

    def __len__(self):
        return len(self.staves)

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.staves]


# ---------------------------------------------------------------------------
# parsing

_CLEF_RE = re.compile(r"^\*clef([GFC])([1-5])$")
_METER_RE = re.compile(r"^\*M([1-9]\d*)/([1-9]\d*)$")
_NOTE_RE = re.compile(r"^(\d+)(\.*)(?:([a-g]+|[A-G]+)(#+|-+|n)?|(r+))$")
# beams, slurs, phrases, ties, articulations, ornaments, stems, editorial marks
_MARKUP = re.compile(r"[LJKk()\[\]_{}&'\"~^;:`/\\<>|,!?xXyYTtSsMmWwOoUuvVIiNPpZz$@]")


def parse_note_token(token: str) -> Union[Note, Rest]:
    """Read a single kern note or rest token (markup already allowed).

    Raises ValueError when the token is not a note or rest.
    """
    core = _MARKUP.sub("", token)
    m = _NOTE_RE.match(core)
    if not m:
        raise ValueError(f"not a note or rest: {token!r}")
    digits, dots, letters, acc, rest = m.groups()
    if len(dots) > MAX_DOTS:
        raise ValueError(f"too many dots: {token!r}")
    duration = Duration.from_kern(digits, len(dots))
    if rest:
        return Rest(duration)
    if len(set(letters)) != 1:
        raise ValueError(f"mixed pitch letters: {token!r}")
    acc = acc or ""
    if len(acc) > MAX_ALTERATION:
        raise ValueError(f"too many accidentals: {token!r}")
    alteration = 0 if acc in ("", "n") else (len(acc) if acc[0] == "#" else -len(acc))
    if letters.islower():
        octave = 3 + len(letters)
    else:
        octave = 4 - len(letters)
    return Note(PitchSpelled(letters[0].upper(), alteration, octave), duration)


def parse_kern(text: str, staff_id: str) -> Staff:
    """Parse one monophonic **kern spine into a :class:`Staff`."""
    lines = text.lstrip("﻿").replace("\r\n", "\n").replace("\r", "\n").split("\n")
    symbols: list = []
    opened = closed = False
    for number, raw in enumerate(lines, start=1):
        record = raw.strip(" ")
        if not record or record.startswith("!"):
            continue
        if "\t" in record:
            raise MultiSpine(f"record {number}: multiple spines")
        if closed:
            raise MalformedSpine(f"record {number}: content after '*-'")
        if not opened:
            if record != "**kern":
                raise MalformedSpine(f"record {number}: expected '**kern', got {record!r}")
            opened = True
            continue
        if record == "*-":
            closed = True
        elif record.startswith("**"):
            raise MalformedSpine(f"record {number}: nested exclusive interpretation")
        elif record.startswith("*"):
            symbol = _parse_tandem(record)
            if symbol is not None:
                symbols.append(symbol)
        elif record.startswith("="):
            symbols.append(Barline())
        elif record == ".":
            continue
        else:
            symbol = _parse_data(record, number)
            if symbol is not None:
                symbols.append(symbol)
    if not opened:
        raise MalformedSpine("no '**kern' header")
    if not closed:
        raise MalformedSpine("no '*-' terminator")
    return Staff(staff_id, tuple(symbols))


def _parse_tandem(record: str):
    m = _CLEF_RE.match(record)
    if m:
        return Clef(m.group(1), int(m.group(2)))
    m = _METER_RE.match(record)
    if m:
        return Meter(int(m.group(1)), int(m.group(2)))
    return None


def _parse_data(record: str, number: int):
    if " " in record:
        return None  # chord
    if "q" in record or "Q" in record:
        return None  # grace note
    try:
        return parse_note_token(record)
    except ValueError:
        raise BadToken(number, record) from None


def serialize_kern(staff: Staff) -> str:
    records = ["**kern"] + [s.kern() for s in staff.symbols] + ["*-"]
    return "\n".join(records)


def transpose(staff: Staff, semitones: int) -> Staff:
    """Shift every note by ``semitones``; rests, clefs, meters and bars are kept.

    Whole-octave shifts keep each note's spelling. Any other amount respells
    the result: natural if possible, else a single sharp.
    """
    if semitones == 0:
        return staff
    octaves, rem = divmod(semitones, 12)
    out = []
    for symbol in staff.symbols:
        if isinstance(symbol, Note):
            if rem == 0:
                # whole octaves keep the written spelling
                pitch = replace(symbol.pitch, octave=symbol.pitch.octave + octaves)
            else:
                pitch = respell(symbol.pitch.chromatic + semitones)
            if not MIN_OCTAVE <= pitch.octave <= MAX_OCTAVE:
                raise OctaveOutOfRange(
                    f"{symbol.pitch} + {semitones} lands in octave {pitch.octave}"
                )
            symbol = Note(pitch, symbol.duration)
        out.append(symbol)
    return Staff(staff.id, tuple(out))


def symbol_tokens(symbols: Iterable) -> list[str]:
    """One kern token per symbol; the unit over which SER is measured."""
    return [s.kern() for s in symbols]
