"""Simulated OMR transcription noise and the SER -> retrieval F1 curve.

The error channel is i.i.d. per symbol: with probability ``rate`` a symbol
suffers one event, chosen by the (substitution, deletion, insertion) mix.
Substitutions stay within the symbol's kind so the corrupted staff remains a
well-formed kern spine. Insertions add a corpus-frequency-weighted random
symbol right after the current one.

Every symbol consumes exactly four uniforms from its staff's stream whether
or not an event fires. Raising ``rate`` therefore only adds events on top of
the ones already present, which keeps the achieved SER close to monotone in
``rate`` and makes the bisection in :func:`calibrate_rate` well behaved.
"""

from __future__ import annotations

import bisect
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from ._rng import derive_rng
from .encode import QueryClass
from .engine import CorpusIndex
from .kern import SYMBOL_KINDS, Clef, Corpus, Meter, Staff, symbol_tokens
from .metrics import aggregate, ser

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseConfig:
    target_ser: float = 0.0
    mix: tuple = (0.6, 0.2, 0.2)
    protect_header: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mix", tuple(float(w) for w in self.mix))
        if self.target_ser < 0:
            raise ValueError("target_ser must be non-negative")
        if len(self.mix) != 3 or any(w < 0 for w in self.mix):
            raise ValueError("mix must be three non-negative weights")
        if abs(sum(self.mix) - 1.0) > 1e-9:
            raise ValueError(f"mix weights must sum to 1, got {sum(self.mix)}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {
            "target_ser": self.target_ser,
            "mix": list(self.mix),
            "protect_header": self.protect_header,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SymbolPool:
    """Distinct observed symbols per kind, plus how often each kind occurs."""

    by_kind: dict
    kind_counts: dict
    _rank: dict = field(init=False, repr=False, compare=False)
    _cum: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not any(self.by_kind.values()):
            raise ValueError("symbol pool is empty")
        rank = {kind: {s: i for i, s in enumerate(syms)} for kind, syms in self.by_kind.items()}
        object.__setattr__(self, "_rank", rank)
        kinds = [k for k in SYMBOL_KINDS if self.by_kind.get(k) and self.kind_counts.get(k)]
        total, cum = 0, []
        for k in kinds:
            total += self.kind_counts[k]
            cum.append(total)
        object.__setattr__(self, "_cum", (tuple(kinds), tuple(c / total for c in cum)))

    @classmethod
    def from_staves(cls, staves: Iterable[Staff]) -> "SymbolPool":
        seen: dict[str, dict] = {k: {} for k in SYMBOL_KINDS}
        counts: Counter = Counter()
        for staff in staves:
            for sym in staff.symbols:
                seen[sym.kind].setdefault(sym.kern(), sym)
                counts[sym.kind] += 1
        by_kind = {k: tuple(v[t] for t in sorted(v)) for k, v in seen.items()}
        return cls(by_kind, dict(counts))

    def substitute(self, symbol, u: float):
        """A same-kind symbol other than ``symbol``, or None if there is none."""
        options = self.by_kind.get(symbol.kind, ())
        skip = self._rank.get(symbol.kind, {}).get(symbol)
        n = len(options) - (skip is not None)
        if n <= 0:
            return None
        j = min(int(u * n), n - 1)
        if skip is not None and j >= skip:
            j += 1
        return options[j]

    def draw(self, u_kind: float, u_symbol: float):
        kinds, cum = self._cum
        kind = kinds[min(bisect.bisect_right(cum, u_kind), len(kinds) - 1)]
        options = self.by_kind[kind]
        return options[min(int(u_symbol * len(options)), len(options) - 1)]


def _header_length(staff: Staff) -> int:
    n = 0
    for sym in staff.symbols:
        if not isinstance(sym, (Clef, Meter)):
            break
        n += 1
    return n


def corrupt(
    staff: Staff,
    config: NoiseConfig,
    alphabet: SymbolPool,
    rate: Optional[float] = None,
    rng=None,
) -> Staff:
    """Apply the noise channel to one staff.

    ``rate`` is the per-symbol event probability; when omitted it defaults to
    ``target_ser / 100`` (capped at 1), the uncalibrated first-order guess.
    Substitutions with no same-kind alternative (e.g. a barline) fall back
    to deletion.
    """
    if rate is None:
        rate = min(config.target_ser / 100.0, 1.0)
    if rate <= 0:
        return staff
    if rng is None:
        rng = derive_rng(config.seed, "noise", staff.id)
    p_sub, p_del, _ = config.mix
    protected = _header_length(staff) if config.protect_header else 0
    out = []
    for i, sym in enumerate(staff.symbols):
        u_event, u_type, u_a, u_b = rng.random(), rng.random(), rng.random(), rng.random()
        if i < protected or u_event >= rate:
            out.append(sym)
            continue
        if u_type < p_sub:
            new = alphabet.substitute(sym, u_a)
            if new is not None:
                out.append(new)
        elif u_type < p_sub + p_del:
            pass
        else:
            out.append(sym)
            out.append(alphabet.draw(u_a, u_b))
    return Staff(staff.id, tuple(out))


def mean_ser(originals: Sequence[Staff], corrupted: Sequence[Staff]) -> float:
    """Average per-staff SER over kern symbol tokens (empty staves skipped)."""
    values = [
        ser(symbol_tokens(a.symbols), symbol_tokens(b.symbols))
        for a, b in zip(originals, corrupted)
        if len(a.symbols)
    ]
    return sum(values) / len(values) if values else 0.0


def calibrate_rate(
    staves: Sequence[Staff],
    config: NoiseConfig,
    alphabet: SymbolPool,
    tolerance: float = 1.0,
    max_iter: int = 40,
) -> tuple[float, float]:
    """Bisect the event rate until mean achieved SER is within ``tolerance`` of target.

    Returns ``(rate, achieved_ser)``. If even rate 1 falls short (possible
    with protected headers or deletion-light mixes) rate 1 is returned.
    """
    target = config.target_ser
    if target <= 0 or not staves:
        return 0.0, 0.0

    def achieved(rate: float) -> float:
        return mean_ser(staves, [corrupt(s, config, alphabet, rate) for s in staves])

    lo, hi = 0.0, 1.0
    top = achieved(hi)
    if top <= target + tolerance:
        if top < target - tolerance:
            logger.warning("target SER %.1f unreachable; rate 1 gives %.2f", target, top)
        return hi, top
    rate, value = hi, top
    for _ in range(max_iter):
        rate = (lo + hi) / 2
        value = achieved(rate)
        if abs(value - target) <= tolerance:
            break
        if value < target:
            lo = rate
        else:
            hi = rate
    return rate, value


@dataclass
class CurveRow:
    level: float
    achieved_ser: float
    rate: float
    class_f1: dict
    macro_f1: float
    micro_f1: float


def degradation_curve(
    corpus: Corpus,
    dataset: Sequence,
    ser_levels: Iterable[float],
    config: NoiseConfig = NoiseConfig(),
    excluded: Iterable = (),
    calibrate: bool = True,
) -> list[CurveRow]:
    """Retrieval F1 over corrupted transcriptions, one row per target SER level."""
    pool = SymbolPool.from_staves(corpus)
    classes = [qc for qc in QueryClass if any(q.query_class == qc for q in dataset)]
    staves = list(corpus.staves)
    rows = []
    for level in ser_levels:
        cfg = replace(config, target_ser=float(level))
        if calibrate:
            rate, _ = calibrate_rate(staves, cfg, pool)
        else:
            rate = min(cfg.target_ser / 100.0, 1.0)
        noisy = [corrupt(s, cfg, pool, rate) for s in staves]
        achieved = mean_ser(staves, noisy)
        index = CorpusIndex(Corpus(noisy, corpus.provenance), classes)
        pairs = [(q.query_class, q.label, index.matches(q.staff_id, q)) for q in dataset]
        report = aggregate(pairs, excluded)
        rows.append(
            CurveRow(
                level=float(level),
                achieved_ser=achieved,
                rate=rate,
                class_f1={qc: report.per_class[qc].f1 for qc in report.per_class},
                macro_f1=report.macro_f1,
                micro_f1=report.micro_f1,
            )
        )
        logger.info("level %s: rate %.4f, SER %.2f, macro F1 %.1f", level, rate, achieved, report.macro_f1)
    return rows


def format_curve(rows: Sequence[CurveRow], classes: Sequence = None) -> str:
    if classes is None:
        classes = [qc for qc in QueryClass if any(qc in r.class_f1 for r in rows)]
    classes = [QueryClass.parse(c) for c in classes]
    header = ["level", "achieved_ser"] + [qc.value for qc in classes] + ["macro", "micro"]
    lines = ["\t".join(header)]
    for r in rows:
        vals = [f"{r.level:g}", f"{r.achieved_ser:.2f}"]
        vals += [f"{r.class_f1[qc]:.2f}" if qc in r.class_f1 else "" for qc in classes]
        vals += [f"{r.macro_f1:.2f}", f"{r.micro_f1:.2f}"]
        lines.append("\t".join(vals))
    return "\n".join(lines) + "\n"
