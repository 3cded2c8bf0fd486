"""Exact-match retrieval over query encodings.

Clef and meter queries use membership: every query token must be present
somewhere in the staff. Sequence queries must occur contiguously.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .encode import Encoding, QueryClass, encode
from .errors import ClassMismatch, DuplicateDecision, UnknownClass, UnknownQueryId
from .kern import Corpus

logger = logging.getLogger(__name__)


def contains_run(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    """True iff ``needle`` occurs as a contiguous run inside ``haystack``.

    Tokens never contain whitespace, so joining with single spaces and padding
    both ends turns token-run containment into plain substring containment
    without any false hits at token boundaries.
    """
    if not needle:
        return True
    if len(needle) > len(haystack):
        return False
    return f" {' '.join(needle)} " in f" {' '.join(haystack)} "


def match_tokens(query_class: QueryClass, encoding_tokens: Sequence[str], query_tokens: Sequence[str]) -> bool:
    if query_class.single_symbol:
        present = set(encoding_tokens)
        return all(t in present for t in query_tokens)
    return contains_run(encoding_tokens, query_tokens)


def match_query(encoding: Encoding, query) -> bool:
    """Decide whether ``query`` (anything with ``query_class`` and ``tokens``) occurs in ``encoding``."""
    qc = QueryClass.parse(query.query_class)
    if encoding.query_class != qc:
        raise ClassMismatch(f"encoding is {encoding.query_class}, query is {qc}")
    return match_tokens(qc, encoding.tokens, query.tokens)


class CorpusIndex:
    """Per-class encodings for every staff of a corpus, computed once."""

    def __init__(self, corpus: Corpus, classes: Iterable = None):
        classes = list(QueryClass) if classes is None else [QueryClass.parse(c) for c in classes]
        self.staff_ids = tuple(corpus.ids)
        self.encodings: dict[QueryClass, dict[str, Encoding]] = {
            qc: {staff.id: encode(staff, qc) for staff in corpus} for qc in classes
        }
        # joined form for the sequence fast path
        self._joined = {
            qc: {sid: f" {' '.join(enc.tokens)} " for sid, enc in by_id.items()}
            for qc, by_id in self.encodings.items()
            if not qc.single_symbol
        }

    @property
    def classes(self) -> list[QueryClass]:
        return list(self.encodings)

    def __getitem__(self, key) -> Encoding:
        qc, staff_id = key
        return self.encodings[QueryClass.parse(qc)][staff_id]

    def matches(self, staff_id: str, query) -> bool:
        qc = QueryClass.parse(query.query_class)
        if qc not in self.encodings:
            raise UnknownClass(f"class {qc} is not indexed")
        if qc.single_symbol:
            return match_query(self.encodings[qc][staff_id], query)
        if not query.tokens:
            return True
        return f" {' '.join(query.tokens)} " in self._joined[qc][staff_id]


def search(index: CorpusIndex, query) -> list[str]:
    """Staff ids whose encoding matches ``query``, in corpus order."""
    qc = QueryClass.parse(query.query_class)
    if qc not in index.encodings:
        raise UnknownClass(f"class {qc} is not indexed")
    return [sid for sid in index.staff_ids if index.matches(sid, query)]


@dataclass(frozen=True)
class MatchDecision:
    query_id: str
    predicted: bool


@dataclass
class JoinedDecisions:
    """Gold labels joined with predictions.

    ``pairs`` holds ``(query_class, label, predicted)`` triples ready for
    :func:`scorequery.metrics.aggregate`; ``missing`` lists dataset query ids
    that received no decision.
    """

    pairs: list = field(default_factory=list)
    missing: list = field(default_factory=list)


def evaluate_matcher(dataset, decisions: Iterable[MatchDecision]) -> JoinedDecisions:
    by_id = {q.query_id: q for q in dataset}
    seen: dict[str, bool] = {}
    for d in decisions:
        if d.query_id in seen:
            raise DuplicateDecision(f"duplicate decision for {d.query_id!r}")
        if d.query_id not in by_id:
            raise UnknownQueryId(f"unknown query id {d.query_id!r}")
        seen[d.query_id] = bool(d.predicted)
    joined = JoinedDecisions()
    for q in dataset:
        if q.query_id in seen:
            joined.pairs.append((QueryClass.parse(q.query_class), bool(q.label), seen[q.query_id]))
        else:
            joined.missing.append(q.query_id)
    if joined.missing:
        logger.warning("%d queries have no decision", len(joined.missing))
    return joined
