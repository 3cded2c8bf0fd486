from fractions import Fraction

import pytest
from hypothesis import strategies as st

from scorequery.kern import Barline, Clef, Duration, Meter, Note, PitchSpelled, Rest, Staff
from scorequery.querygen import GenConfig, build_dataset
from scorequery.synth import generate_corpus

KERN_VALUES = [Fraction(1), Fraction(1, 2), Fraction(3, 4), Fraction(1, 4), Fraction(3, 8),
               Fraction(1, 8), Fraction(3, 16), Fraction(1, 16), Fraction(1, 3), Fraction(1, 6),
               Fraction(7, 8), Fraction(2), Fraction(15, 16)]

durations = st.sampled_from(KERN_VALUES).map(Duration.from_fraction)


def pitches(min_octave=1, max_octave=7):
    return st.builds(
        PitchSpelled,
        st.sampled_from("CDEFGAB"),
        st.integers(-2, 2),
        st.integers(min_octave, max_octave),
    )


def symbols(min_octave=1, max_octave=7):
    notes = st.builds(Note, pitches(min_octave, max_octave), durations)
    return st.one_of(
        notes,
        notes,
        notes,
        st.builds(Rest, durations),
        st.just(Barline()),
        st.builds(Clef, st.sampled_from("GFC"), st.integers(1, 5)),
        st.builds(Meter, st.integers(1, 12), st.sampled_from([1, 2, 4, 8, 16])),
    )


def staves(max_size=40, min_octave=1, max_octave=7):
    return st.lists(symbols(min_octave, max_octave), max_size=max_size).map(
        lambda syms: Staff("s", tuple(syms))
    )


def note(name: str, value=Fraction(1, 4)) -> Note:
    from scorequery.kern import parse_pitch

    return Note(parse_pitch(name), Duration.from_fraction(value))


def staff_of(*syms, staff_id="s") -> Staff:
    return Staff(staff_id, tuple(syms))


@pytest.fixture(scope="session")
def small_corpus():
    return generate_corpus(60, (10, 40), seed=7)


@pytest.fixture(scope="session")
def small_dataset(small_corpus):
    return build_dataset(small_corpus, None, GenConfig(seed=7))


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
