"""Query encodings derived from a staff.

Each query class turns a :class:`~scorequery.kern.Staff` into a flat list of
string tokens. Kern-only markup and barlines never appear in any encoding;
rests are dropped from every sequence class so the five sequence encodings
stay positionally aligned note-for-note.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import UnknownClass
from .kern import Clef, Meter, Staff


class QueryClass(str, Enum):
    CLEF = "clef"
    METER = "meter"
    MELODY = "melody"
    RHYTHM = "rhythm"
    PITCH = "pitch"
    PITCH_CLASS = "pitch_class"
    INTERVAL = "interval"

    @property
    def single_symbol(self) -> bool:
        return self in (QueryClass.CLEF, QueryClass.METER)

    @classmethod
    def parse(cls, name: str) -> "QueryClass":
        """Lenient lookup: ``PitchClass``, ``pitch-class`` and ``pitch_class`` all work."""
        if isinstance(name, QueryClass):
            return name
        key = name.strip().lower().replace("-", "").replace("_", "")
        for qc in cls:
            if qc.value.replace("_", "") == key:
                return qc
        raise UnknownClass(f"unknown query class {name!r}")

    def __str__(self):
        return self.value


SEQUENCE_CLASSES = tuple(qc for qc in QueryClass if not qc.single_symbol)


@dataclass(frozen=True)
class Encoding:
    query_class: QueryClass
    tokens: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self):
        return len(self.tokens)


def encode_clef(staff: Staff) -> Encoding:
    tokens = [s.kern() for s in staff.symbols if isinstance(s, Clef)]
    return Encoding(QueryClass.CLEF, tokens)


def encode_meter(staff: Staff) -> Encoding:
    tokens = [s.kern() for s in staff.symbols if isinstance(s, Meter)]
    return Encoding(QueryClass.METER, tokens)


def encode_pitch(staff: Staff) -> Encoding:
    return Encoding(QueryClass.PITCH, [n.pitch.scientific_name() for n in staff.notes])


def encode_pitch_class(staff: Staff) -> Encoding:
    # spelling is kept: D#4 and Eb4 stay distinct
    tokens = [n.pitch.step + n.pitch.accidental for n in staff.notes]
    return Encoding(QueryClass.PITCH_CLASS, tokens)


def _signed(value: int) -> str:
    return f"{value:+d}" if value else "0"


def encode_interval(staff: Staff) -> Encoding:
    chromatic = [n.pitch.chromatic for n in staff.notes]
    tokens = [_signed(b - a) for a, b in zip(chromatic, chromatic[1:])]
    return Encoding(QueryClass.INTERVAL, tokens)


def encode_rhythm(staff: Staff) -> Encoding:
    return Encoding(QueryClass.RHYTHM, [str(n.duration.fraction) for n in staff.notes])


def encode_melody(staff: Staff) -> Encoding:
    return Encoding(QueryClass.MELODY, [n.kern() for n in staff.notes])


ENCODERS = {
    QueryClass.CLEF: encode_clef,
    QueryClass.METER: encode_meter,
    QueryClass.MELODY: encode_melody,
    QueryClass.RHYTHM: encode_rhythm,
    QueryClass.PITCH: encode_pitch,
    QueryClass.PITCH_CLASS: encode_pitch_class,
    QueryClass.INTERVAL: encode_interval,
}


def encode(staff: Staff, query_class) -> Encoding:
    return ENCODERS[QueryClass.parse(query_class)](staff)


def encode_all(staff: Staff, classes=None) -> dict:
    classes = list(QueryClass) if classes is None else [QueryClass.parse(c) for c in classes]
    return {qc: encode(staff, qc) for qc in classes}
