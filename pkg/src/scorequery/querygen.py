"""Labeled query dataset construction.

Per staff and query class:

* up to ``max_positives`` positives extracted from the staff's own encoding
  (every distinct clef/meter token, or random contiguous substrings);
* up to ``cross_staff_negatives`` positives of *other* staves that do not
  occur in this one;
* up to ``mutation_negatives`` near misses: a positive with 1-3 tokens
  substituted, re-checked so it no longer matches.

Generation runs in two passes because cross-staff negatives need the global
pool of positives. Every staff/class/pass gets its own derived RNG stream, so
the output depends only on (corpus order, classes, config).
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Iterable, Optional

from ._rng import derive_rng
from .encode import Encoding, QueryClass, encode
from .engine import match_tokens
from .errors import EmptyCorpus
from .kern import Corpus, Staff

logger = logging.getLogger(__name__)


class Source(str, Enum):
    EXTRACTED = "extracted"
    CROSS_STAFF = "cross_staff"
    MUTATION = "mutation"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LabeledQuery:
    query_id: str
    staff_id: str
    query_class: QueryClass
    tokens: tuple
    label: bool
    source: Source

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "query_class", QueryClass.parse(self.query_class))
        object.__setattr__(self, "source", Source(self.source))
        if not self.tokens:
            raise ValueError("query tokens must be non-empty")
        if self.label != (self.source is Source.EXTRACTED):
            raise ValueError("label must be true exactly for extracted queries")

    def to_json(self) -> dict:
        return {
            "query_id": self.query_id,
            "staff_id": self.staff_id,
            "query_class": self.query_class.value,
            "tokens": list(self.tokens),
            "label": self.label,
            "source": self.source.value,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LabeledQuery":
        return cls(
            query_id=obj["query_id"],
            staff_id=obj["staff_id"],
            query_class=obj["query_class"],
            tokens=obj["tokens"],
            label=bool(obj["label"]),
            source=obj["source"],
        )


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    min_len: int = 4
    max_len: int = 12
    max_positives: int = 3
    cross_staff_negatives: int = 3
    mutation_negatives: int = 2
    max_mutation_attempts: int = 20

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.min_len < 1 or self.max_len < 1 or self.min_len > self.max_len:
            raise ValueError("need 1 <= min_len <= max_len")
        if self.max_positives < 1 or self.max_mutation_attempts < 1:
            raise ValueError("max_positives and max_mutation_attempts must be positive")
        if self.cross_staff_negatives < 0 or self.mutation_negatives < 0:
            raise ValueError("negative counts must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


def _staff_tokens(staff_or_encoding, query_class: QueryClass) -> tuple:
    if isinstance(staff_or_encoding, Encoding):
        return staff_or_encoding.tokens
    return encode(staff_or_encoding, query_class).tokens


def gen_positives(staff: Staff, query_class, config: GenConfig, rng) -> list[tuple]:
    """Positive token sequences for one staff.

    Returns plain token tuples; :func:`build_dataset` wraps them into
    :class:`LabeledQuery` objects once ids are assigned.
    """
    qc = QueryClass.parse(query_class)
    tokens = _staff_tokens(staff, qc)
    if qc.single_symbol:
        distinct = list(dict.fromkeys(tokens))
        return [(t,) for t in distinct[: config.max_positives]]
    n = len(tokens)
    if n < config.min_len:
        return []
    out = []
    for _ in range(config.max_positives):
        length = rng.randint(config.min_len, min(config.max_len, n))
        start = rng.randrange(n - length + 1)
        out.append(tuple(tokens[start : start + length]))
    return list(dict.fromkeys(out))


def _lazy_permutation(n: int, rng):
    """Yield a uniform random permutation of range(n) one element at a time."""
    swapped: dict[int, int] = {}
    for i in range(n):
        j = rng.randrange(i, n)
        yield swapped.get(j, j)
        swapped[j] = swapped.get(i, i)


def gen_cross_staff_negatives(
    staff: Staff, pool: list, query_class, config: GenConfig, rng
) -> list[tuple]:
    """Up to ``cross_staff_negatives`` distinct pool entries absent from ``staff``.

    ``pool`` holds token tuples (or LabeledQuery objects) that are positives
    of other staves. Drawing from a lazy permutation and keeping the first
    survivors is uniform sampling without replacement from the valid set.
    """
    qc = QueryClass.parse(query_class)
    if config.cross_staff_negatives == 0 or not pool:
        return []
    tokens = _staff_tokens(staff, qc)
    candidates = [tuple(getattr(p, "tokens", p)) for p in pool]
    if len(set(candidates)) != len(candidates):
        candidates = list(dict.fromkeys(candidates))
    out = []
    for i in _lazy_permutation(len(candidates), rng):
        cand = candidates[i]
        if not match_tokens(qc, tokens, cand):
            out.append(cand)
            if len(out) == config.cross_staff_negatives:
                break
    return out


def gen_mutation_negatives(
    staff: Staff, positives: list, alphabet, config: GenConfig, rng, query_class=None, exclude=()
) -> list[tuple]:
    """Near-miss negatives: positives with m ~ U{1,2,3} positions substituted.

    A draw that still matches the staff, or duplicates an earlier negative,
    is retried up to ``max_mutation_attempts`` times before the slot is
    skipped.
    """
    if not positives or config.mutation_negatives == 0:
        return []
    positives_in = positives
    positives = [tuple(getattr(p, "tokens", p)) for p in positives]
    if query_class is None:
        query_class = getattr(staff, "query_class", None) or getattr(positives_in[0], "query_class")
    qc = QueryClass.parse(query_class)
    tokens = _staff_tokens(staff, qc)
    alphabet = sorted(set(alphabet))
    rank = {t: i for i, t in enumerate(alphabet)}
    taken = set(exclude)
    out = []
    for _ in range(config.mutation_negatives):
        for _attempt in range(config.max_mutation_attempts):
            base = positives[rng.randrange(len(positives))]
            m = min(rng.randint(1, 3), len(base))
            positions = rng.sample(range(len(base)), m)
            mutated = list(base)
            ok = True
            for pos in positions:
                # uniform over alphabet minus the original token
                skip = rank.get(base[pos])
                n_choices = len(alphabet) - (skip is not None)
                if n_choices == 0:
                    ok = False
                    break
                j = rng.randrange(n_choices)
                if skip is not None and j >= skip:
                    j += 1
                mutated[pos] = alphabet[j]
            mutated = tuple(mutated)
            if ok and mutated not in taken and not match_tokens(qc, tokens, mutated):
                out.append(mutated)
                taken.add(mutated)
                break
    return out


def build_dataset(corpus: Corpus, classes: Optional[Iterable] = None, config: GenConfig = GenConfig()) -> list[LabeledQuery]:
    """Generate the labeled query dataset for ``corpus``.

    Query ids are ``<staff_id>#<class>#<ordinal>``, ordinals counting from 0
    over positives, then cross-staff, then mutation negatives.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot build a dataset from an empty corpus")
    if classes is None:
        classes = list(QueryClass)
    wanted = {QueryClass.parse(c) for c in classes}
    classes = [qc for qc in QueryClass if qc in wanted]

    encodings = {qc: {s.id: encode(s, qc) for s in corpus} for qc in classes}
    alphabets = {
        qc: sorted({t for enc in encodings[qc].values() for t in enc.tokens}) for qc in classes
    }

    # pass 1: positives
    positives: dict[tuple, list] = {}
    for staff in corpus:
        for qc in classes:
            rng = derive_rng(config.seed, "positives", staff.id, qc.value)
            positives[staff.id, qc] = gen_positives(encodings[qc][staff.id], qc, config, rng)

    # pass 2: negatives against the frozen pool. A staff's own positives
    # always match it, so the global pool can stand in for "other staves".
    negatives: dict[tuple, tuple] = {}
    for qc in classes:
        pool = list(dict.fromkeys(p for s in corpus for p in positives[s.id, qc]))
        for staff in corpus:
            enc = encodings[qc][staff.id]
            cross = gen_cross_staff_negatives(
                enc, pool, qc, config, derive_rng(config.seed, "cross", staff.id, qc.value)
            )
            mutated = gen_mutation_negatives(
                enc,
                positives[staff.id, qc],
                alphabets[qc],
                config,
                derive_rng(config.seed, "mutation", staff.id, qc.value),
                query_class=qc,
                exclude=cross,
            )
            negatives[staff.id, qc] = (cross, mutated)

    dataset = []
    for staff in corpus:
        for qc in classes:
            cross, mutated = negatives[staff.id, qc]
            groups = [
                (positives[staff.id, qc], Source.EXTRACTED),
                (cross, Source.CROSS_STAFF),
                (mutated, Source.MUTATION),
            ]
            ordinal = 0
            for group, source in groups:
                for tokens in group:
                    dataset.append(
                        LabeledQuery(
                            query_id=f"{staff.id}#{qc.value}#{ordinal}",
                            staff_id=staff.id,
                            query_class=qc,
                            tokens=tokens,
                            label=source is Source.EXTRACTED,
                            source=source,
                        )
                    )
                    ordinal += 1
    logger.info("generated %d queries over %d staves", len(dataset), len(corpus))
    return dataset
