"""Seeded synthetic kern corpus.

Each staff is one clef, a key signature, one meter, then a stream of notes,
rests and barlines whose length (clef/meter excluded) is drawn uniformly from
``length_range``. Distributions:

* clef: G2 50%, F4 20%, C3 15%, C4 10%, C1 5%
* meter: 4/4 25%, 3/4 20%, 2/4 15%, 6/8 15%, 2/2 10%, 3/8 10%, 12/8 5%
* key: uniform over -4..+4 fifths
* events: rest 12%, note 88%; durations drawn from {1, 2., 2, 4., 4, 8., 8, 16}
  with weights (1, 2, 6, 4, 12, 2, 10, 3), restricted to values that fit the
  rest of the current measure; a barline closes every full measure
* pitch: diatonic random walk around the clef's central pitch, steps
  -4..+4 with weights (1, 2, 4, 8, 3, 8, 4, 2, 1), clamped to ±9 steps; 5% of
  notes get a chromatic inflection (+1 or -1 semitone on the spelled pitch)
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from .kern import Barline, Clef, Duration, Meter, Note, PitchSpelled, Rest, Staff, STEPS

CLEFS = [(("G", 2), 50), (("F", 4), 20), (("C", 3), 15), (("C", 4), 10), (("C", 1), 5)]
CLEF_CENTER = {  # (step index in STEPS, octave) of the middle staff line
    ("G", 2): (6, 4),  # B4
    ("F", 4): (1, 3),  # D3
    ("C", 3): (0, 4),  # C4
    ("C", 4): (5, 3),  # A3
    ("C", 1): (4, 4),  # G4
}
METERS = [((4, 4), 25), ((3, 4), 20), ((2, 4), 15), ((6, 8), 15), ((2, 2), 10), ((3, 8), 10), ((12, 8), 5)]
DURATIONS = [
    (Fraction(1), 1),
    (Fraction(3, 4), 2),
    (Fraction(1, 2), 6),
    (Fraction(3, 8), 4),
    (Fraction(1, 4), 12),
    (Fraction(3, 16), 2),
    (Fraction(1, 8), 10),
    (Fraction(1, 16), 3),
]
STEP_MOVES = list(range(-4, 5))
STEP_WEIGHTS = [1, 2, 4, 8, 3, 8, 4, 2, 1]
SHARP_ORDER = "FCGDAEB"
REST_PROB = 0.12
CHROMATIC_PROB = 0.05
RANGE = 9


def _pick(rng: random.Random, table):
    values, weights = zip(*table)
    return rng.choices(values, weights=weights)[0]


def key_alterations(fifths: int) -> dict:
    if fifths >= 0:
        return {s: 1 for s in SHARP_ORDER[:fifths]}
    return {s: -1 for s in SHARP_ORDER[::-1][:-fifths]}


def key_signature_token(fifths: int) -> str:
    alt = key_alterations(fifths)
    order = SHARP_ORDER if fifths >= 0 else SHARP_ORDER[::-1]
    return "*k[" + "".join(s.lower() + ("#" if alt[s] > 0 else "-") for s in order if s in alt) + "]"


def generate_staff(rng: random.Random, staff_id: str, length: int) -> tuple[Staff, int]:
    """One random staff; returns it with the key (in fifths) used to spell it."""
    clef = _pick(rng, CLEFS)
    meter = _pick(rng, METERS)
    fifths = rng.randint(-4, 4)
    alterations = key_alterations(fifths)
    measure = Fraction(meter[0], meter[1])

    center_step, center_oct = CLEF_CENTER[clef]
    center = center_oct * 7 + center_step
    position = center + rng.randint(-3, 3)

    symbols = [Clef(*clef), Meter(*meter)]
    remaining = measure
    emitted = 0
    while emitted < length:
        if remaining == 0:
            symbols.append(Barline())
            remaining = measure
            emitted += 1
            continue
        fitting = [(d, w) for d, w in DURATIONS if d <= remaining]
        dur = _pick(rng, fitting)
        remaining -= dur
        duration = Duration.from_fraction(dur)
        if rng.random() < REST_PROB:
            symbols.append(Rest(duration))
        else:
            position += _pick(rng, list(zip(STEP_MOVES, STEP_WEIGHTS)))
            position = max(center - RANGE, min(center + RANGE, position))
            octave, idx = divmod(position, 7)
            step = STEPS[idx]
            alteration = alterations.get(step, 0)
            if rng.random() < CHROMATIC_PROB:
                alteration += rng.choice((-1, 1))
            symbols.append(Note(PitchSpelled(step, alteration, octave), duration))
        emitted += 1
    return Staff(staff_id, tuple(symbols)), fifths


def staff_to_kern(staff: Staff, fifths: int) -> str:
    records = ["**kern"]
    for i, sym in enumerate(staff.symbols):
        records.append(sym.kern())
        if i == 0:
            records.append(key_signature_token(fifths))
    records.append("*-")
    return "\n".join(records) + "\n"


def generate_corpus_texts(n_staves: int, length_range=(10, 60), seed: int = 0, prefix: str = "staff_"):
    """Yield ``(staff_id, kern_text)`` pairs, deterministic in ``seed``."""
    if n_staves < 1:
        raise ValueError("n_staves must be at least 1")
    lo, hi = length_range
    if not 1 <= lo <= hi:
        raise ValueError("length_range must satisfy 1 <= lo <= hi")
    rng = random.Random(seed)
    width = max(5, len(str(n_staves)))
    for i in range(n_staves):
        staff_id = f"{prefix}{i:0{width}d}"
        staff, fifths = generate_staff(rng, staff_id, rng.randint(lo, hi))
        yield staff_id, staff_to_kern(staff, fifths)


def generate_corpus(n_staves: int, length_range=(10, 60), seed: int = 0):
    """In-memory synthetic :class:`~scorequery.kern.Corpus` (parsed back from its kern text)."""
    from .kern import Corpus, parse_kern

    staves = [parse_kern(text, sid) for sid, text in generate_corpus_texts(n_staves, length_range, seed)]
    return Corpus(staves, provenance=f"synthetic n={n_staves} lengths={tuple(length_range)} seed={seed}")


def write_corpus(out_dir, n_staves: int, length_range=(10, 60), seed: int = 0) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for staff_id, text in generate_corpus_texts(n_staves, length_range, seed):
        path = out_dir / f"{staff_id}.krn"
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths
