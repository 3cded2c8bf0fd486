"""Symbol error rate, F1 bookkeeping and the random-classifier baseline."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .encode import QueryClass
from .errors import DomainError, EmptyReference


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance between two token sequences.

    Bit-parallel formulation (Myers 1999, Hyyrö's global-distance variant):
    one machine word per column becomes one Python int, so sequences of any
    length are handled in O(len(b)) big-int operations.
    """
    m = len(a)
    if m == 0:
        return len(b)
    if not b:
        return m
    peq: dict = {}
    for i, tok in enumerate(a):
        peq[tok] = peq.get(tok, 0) | (1 << i)
    full = (1 << m) - 1
    top = 1 << (m - 1)
    pv, mv, score = full, 0, m
    for tok in b:
        eq = peq.get(tok, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | (~(xh | pv) & full)
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        # row 0 of the DP table grows by one per column, hence the carried-in 1
        ph = ((ph << 1) | 1) & full
        mh = (mh << 1) & full
        pv = mh | (~(xv | ph) & full)
        mv = ph & xv
    return score


def ser(reference: Sequence, hypothesis: Sequence) -> float:
    """Symbol error rate in percent; can exceed 100 when the hypothesis over-generates."""
    if len(reference) == 0:
        raise EmptyReference("SER needs a non-empty reference")
    return 100.0 * levenshtein(reference, hypothesis) / len(reference)


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def add(self, label: bool, predicted: bool) -> None:
        if label and predicted:
            self.tp += 1
        elif predicted:
            self.fp += 1
        elif label:
            self.fn += 1
        else:
            self.tn += 1

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def f1(counts: ConfusionCounts) -> tuple[float, float, float]:
    """(precision, recall, F1) on a 0-100 scale; every 0/0 is taken as 0."""
    p = _ratio(counts.tp, counts.tp + counts.fp)
    r = _ratio(counts.tp, counts.tp + counts.fn)
    f = _ratio(2 * p * r, p + r)
    return 100.0 * p, 100.0 * r, 100.0 * f


@dataclass
class ClassScore:
    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    per_class: dict = field(default_factory=dict)
    macro_f1: float = 0.0
    micro_f1: float = 0.0
    excluded_classes: frozenset = frozenset()
    weighted_f1: float = 0.0
    ser: float | None = None

    def rows(self) -> list[tuple]:
        """TSV-ready rows: per class, then MACRO and MICRO."""
        out = []
        for qc, score in self.per_class.items():
            c = score.counts
            out.append((qc.value, c.tp, c.fp, c.fn, c.tn, score.precision, score.recall, score.f1))
        out.append(("MACRO", "", "", "", "", "", "", self.macro_f1))
        out.append(("MICRO", "", "", "", "", "", "", self.micro_f1))
        return out


def aggregate(pairs: Iterable[tuple], excluded: Iterable = ()) -> EvalReport:
    """Per-class and overall scores from ``(query_class, label, predicted)`` triples.

    Excluded classes are still scored individually but left out of both
    aggregates. ``micro_f1`` pools counts across classes; ``weighted_f1`` is
    the alternative reading (per-class F1 averaged with pair-count weights).
    """
    excluded = frozenset(QueryClass.parse(c) for c in excluded)
    counts: dict[QueryClass, ConfusionCounts] = {}
    for qc, label, predicted in pairs:
        qc = QueryClass.parse(qc)
        counts.setdefault(qc, ConfusionCounts()).add(bool(label), bool(predicted))

    report = EvalReport(excluded_classes=excluded)
    for qc in QueryClass:
        if qc in counts:
            report.per_class[qc] = ClassScore(counts[qc], *f1(counts[qc]))

    kept = [qc for qc in report.per_class if qc not in excluded]
    if kept:
        report.macro_f1 = sum(report.per_class[qc].f1 for qc in kept) / len(kept)
        pooled = ConfusionCounts()
        for qc in kept:
            pooled = pooled + counts[qc]
        report.micro_f1 = f1(pooled)[2]
        total = sum(counts[qc].total for qc in kept)
        report.weighted_f1 = sum(report.per_class[qc].f1 * counts[qc].total for qc in kept) / total
    return report


def random_baseline_f1(positive_fraction: float, predict_true_prob: float) -> float:
    """Expected-count F1 (0-100) of a classifier answering "yes" at random.

    In expectation precision equals the positive fraction and recall equals
    the probability of answering "yes".
    """
    rho, q = positive_fraction, predict_true_prob
    if not 0.0 < rho < 1.0:
        raise DomainError(f"positive_fraction must lie in (0, 1), got {rho}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"predict_true_prob must lie in [0, 1], got {q}")
    return 100.0 * 2 * rho * q / (rho + q)


def monte_carlo_baseline_f1(
    positive_fraction: float, predict_true_prob: float, trials: int = 1_000_000, seed: int = 0
) -> float:
    """Simulated F1 of the same random classifier over ``trials`` Bernoulli pairs."""
    rng = np.random.default_rng(seed)
    labels = rng.random(trials) < positive_fraction
    preds = rng.random(trials) < predict_true_prob
    tp = int(np.count_nonzero(labels & preds))
    fp = int(np.count_nonzero(~labels & preds))
    fn = int(np.count_nonzero(labels & ~preds))
    return f1(ConfusionCounts(tp, fp, fn, trials - tp - fp - fn))[2]


def class_balance(dataset) -> dict:
    """Fraction of positive queries per class."""
    pos, tot = Counter(), Counter()
    for q in dataset:
        tot[q.query_class] += 1
        pos[q.query_class] += bool(q.label)
    return {qc: pos[qc] / tot[qc] for qc in QueryClass if tot[qc]}
