"""Content-based queries over symbolic music staves.

Parse kern staves, derive the seven query encodings (clef, meter, melody,
rhythm, pitch, pitch class, interval), build labeled query datasets, match
them exactly, simulate OMR noise and score retrieval.
"""

__version__ = "0.1.0"

from .encode import Encoding, QueryClass, encode
from .engine import CorpusIndex, MatchDecision, evaluate_matcher, match_query, search
from .kern import (
    Barline,
    Clef,
    Corpus,
    Duration,
    Meter,
    Note,
    PitchSpelled,
    Rest,
    Staff,
    parse_kern,
    parse_pitch,
    serialize_kern,
    transpose,
)
from .metrics import aggregate, f1, random_baseline_f1, ser
from .omrnoise import NoiseConfig, corrupt, degradation_curve
from .querygen import GenConfig, LabeledQuery, Source, build_dataset

__all__ = [
    "Barline",
    "Clef",
    "Corpus",
    "CorpusIndex",
    "Duration",
    "Encoding",
    "GenConfig",
    "LabeledQuery",
    "MatchDecision",
    "Meter",
    "NoiseConfig",
    "Note",
    "PitchSpelled",
    "QueryClass",
    "Rest",
    "Source",
    "Staff",
    "aggregate",
    "build_dataset",
    "corrupt",
    "degradation_curve",
    "encode",
    "evaluate_matcher",
    "f1",
    "match_query",
    "parse_kern",
    "parse_pitch",
    "random_baseline_f1",
    "search",
    "ser",
    "serialize_kern",
    "transpose",
]
