import statistics

import pytest
from scipy.stats import spearmanr

from conftest import note, staff_of
from scorequery.encode import QueryClass, SEQUENCE_CLASSES
from scorequery.kern import Barline, Clef, Meter, parse_kern, serialize_kern
from scorequery.omrnoise import (
    NoiseConfig,
    SymbolPool,
    corrupt,
    degradation_curve,
    format_curve,
    mean_ser,
)
from scorequery.querygen import GenConfig, build_dataset
from scorequery.synth import generate_corpus


@pytest.fixture(scope="module")
def pool(small_corpus):
    return SymbolPool.from_staves(small_corpus)


def test_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(target_ser=-1)
    with pytest.raises(ValueError):
        NoiseConfig(mix=(0.5, 0.2, 0.2))
    with pytest.raises(ValueError):
        NoiseConfig(mix=(1.2, -0.2, 0.0))
    NoiseConfig(mix=(0.6, 0.2, 0.2))


def test_target_zero_is_identity(small_corpus, pool):
    cfg = NoiseConfig(target_ser=0, seed=5)
    assert all(corrupt(s, cfg, pool) == s for s in small_corpus)


def test_deletion_only_full_rate_empties(small_corpus, pool):
    cfg = NoiseConfig(target_ser=100, mix=(0, 1, 0), seed=1)
    assert all(len(corrupt(s, cfg, pool).symbols) == 0 for s in small_corpus)


def test_substitution_is_same_kind(small_corpus, pool):
    cfg = NoiseConfig(target_ser=100, mix=(1, 0, 0), seed=2)
    for s in small_corpus:
        out = corrupt(s, cfg, pool)
        kept = [a.kind for a in s.symbols if not isinstance(a, Barline)]
        assert [b.kind for b in out.symbols] == kept


def test_barline_substitution_falls_back_to_deletion():
    staff = staff_of(note("C4"), Barline(), note("D4"))
    pool = SymbolPool.from_staves([staff])
    out = corrupt(staff, NoiseConfig(target_ser=100, mix=(1, 0, 0)), pool)
    assert not any(isinstance(x, Barline) for x in out.symbols)


def test_insertion_only_doubles(small_corpus, pool):
    cfg = NoiseConfig(target_ser=100, mix=(0, 0, 1), seed=4)
    for s in list(small_corpus)[:10]:
        out = corrupt(s, cfg, pool)
        assert len(out.symbols) == 2 * len(s.symbols)
        assert out.symbols[::2] == s.symbols


def test_protect_header():
    staff = staff_of(Clef("G", 2), Meter(3, 4), *[note("C4")] * 20)
    pool = SymbolPool.from_staves([staff, staff_of(Clef("F", 4), Meter(2, 4), note("D4"))])
    out = corrupt(staff, NoiseConfig(target_ser=100, mix=(0, 1, 0), protect_header=True), pool)
    assert out.symbols == (Clef("G", 2), Meter(3, 4))


def test_corrupted_staves_reparse(small_corpus, pool):
    cfg = NoiseConfig(target_ser=60, seed=9)
    for s in small_corpus:
        out = corrupt(s, cfg, pool)
        assert parse_kern(serialize_kern(out), s.id) == out


def test_deterministic(small_corpus, pool):
    cfg = NoiseConfig(target_ser=40, seed=3)
    assert [corrupt(s, cfg, pool) for s in small_corpus] == [corrupt(s, cfg, pool) for s in small_corpus]


@pytest.mark.slow
def test_calibrated_seventy():
    corpus = generate_corpus(500, (30, 60), seed=21)
    dataset = build_dataset(corpus, [QueryClass.CLEF], GenConfig(seed=21))
    (row,) = degradation_curve(corpus, dataset, [70], NoiseConfig(seed=21))
    assert abs(row.achieved_ser - 70) <= 10


def test_ser_increases_with_level():
    corpus = generate_corpus(200, (10, 60), seed=13)
    pool = SymbolPool.from_staves(corpus)
    levels = list(range(0, 101, 10))
    for seed in range(5):
        achieved = []
        for level in levels:
            cfg = NoiseConfig(target_ser=level, seed=seed)
            achieved.append(mean_ser(corpus.staves, [corrupt(s, cfg, pool) for s in corpus]))
        assert spearmanr(levels, achieved).statistic > 0.95


@pytest.fixture(scope="module")
def curve_setup():
    corpus = generate_corpus(150, (20, 50), seed=17)
    return corpus, build_dataset(corpus, None, GenConfig(seed=17))


def test_macro_f1_non_increasing(curve_setup):
    corpus, dataset = curve_setup
    rows = degradation_curve(corpus, dataset, [0, 10, 20, 40, 60, 80], NoiseConfig(seed=17))
    assert rows[0].macro_f1 == rows[0].micro_f1 == 100.0
    assert all(v == 100.0 for v in rows[0].class_f1.values())
    rows.sort(key=lambda r: r.achieved_ser)
    for a, b in zip(rows, rows[1:]):
        assert b.macro_f1 <= a.macro_f1 + 2.0


def test_protected_header_classes_dominate(curve_setup):
    corpus, dataset = curve_setup
    (row,) = degradation_curve(corpus, dataset, [60], NoiseConfig(protect_header=True, seed=17))
    top_seq = max(row.class_f1[qc] for qc in SEQUENCE_CLASSES)
    assert row.class_f1[QueryClass.CLEF] > top_seq and row.class_f1[QueryClass.METER] > top_seq


def test_format_curve(curve_setup):
    corpus, dataset = curve_setup
    rows = degradation_curve(corpus, dataset, [0], NoiseConfig(seed=1), calibrate=False)
    text = format_curve(rows)
    header, line = text.splitlines()
    assert header.split("\t") == ["level", "achieved_ser"] + [qc.value for qc in QueryClass] + ["macro", "micro"]
    assert line.split("\t")[:2] == ["0", "0.00"]
    assert line.split("\t")[2:] == ["100.00"] * 9


@pytest.mark.slow
@pytest.mark.xfail(
    reason="i.i.d. symbol errors at SER 3 leave micro F1 near 89-92; bursty real OMR errors are less destructive",
    strict=False,
)
def test_low_ser_micro_f1():
    scores = []
    for seed in range(5):
        corpus = generate_corpus(300, (10, 60), seed=seed)
        dataset = build_dataset(corpus, None, GenConfig(seed=seed))
        (row,) = degradation_curve(corpus, dataset, [3], NoiseConfig(seed=seed))
        scores.append(row.micro_f1)
    assert statistics.mean(scores) > 90
