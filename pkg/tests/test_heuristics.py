from fractions import Fraction
from math import log

from hypothesis import given, strategies as st
import pytest

from isorank import arith, ec, heuristics, modp
from isorank.ec import ShortModel, WeierstrassModel
from isorank.errors import InsufficientTable, ScanInterrupted, SnapshotMismatch, ZeroInput
from isorank.heuristics import BiasRecord, FrequencyTable

from conftest import CONGRUENT, N19


@given(st.fractions().filter(bool))
def test_squarefree_class_is_square_multiple(q):
    D = heuristics.squarefree_class(q)
    ratio = q / D
    assert ratio > 0
    assert arith.is_square(ratio.numerator) and arith.is_square(ratio.denominator)
    assert arith.is_squarefree(D)


def test_squarefree_class_zero():
    with pytest.raises(ZeroInput):
        heuristics.squarefree_class(0)


def brute_rogers(model, H):
    coeffs = heuristics.cubic_coefficients(model)
    out = {}
    for r in ec.rationals_of_height(H):
        v = heuristics.eval_cubic(coeffs, r)
        if v:
            D = heuristics.squarefree_class(v)
            out.setdefault(D, []).append(r)
    return out


def test_rogers_x3_minus_x_small_heights():
    t = heuristics.rogers_scan(ShortModel(-1, 0), 2)
    assert {D: (c, sorted(w)) for D, (c, w) in t.as_dict().items()} == {
        -6: (2, [Fraction(-2), Fraction(1, 2)]),
        6: (2, [Fraction(-1, 2), Fraction(2)]),
    }
    assert len(heuristics.rogers_scan(ShortModel(-1, 0), 1)) == 0


@pytest.mark.parametrize("model,H", [(ShortModel(-1, 0), 15), (N19, 12), (WeierstrassModel(1, 1, 1, -30, -76), 9)])
def test_rogers_matches_brute(model, H):
    t = heuristics.rogers_scan(model, H, chunk_size=4)
    brute = brute_rogers(model, H)
    assert {D: (c, sorted(w)) for D, (c, w) in t.as_dict().items()} == \
        {D: (len(w), sorted(w)) for D, w in brute.items()}


def test_rogers_big_coefficients_fall_back():
    big = ShortModel(-2174420 * 27, 1234136692 * 54)
    t = heuristics.rogers_scan(big, 6)
    brute = brute_rogers(big, 6)
    assert t.as_dict() == {D: (len(w), w) for D, w in brute.items()}


def test_ranked_order():
    t = heuristics.rogers_scan(N19, 40)
    rows = t.ranked()
    keys = [(-c, abs(D), D) for D, c, _ in rows]
    assert keys == sorted(keys)
    assert sum(c for _, c, _ in rows) == sum(1 for r in ec.rationals_of_height(40)
                                             if heuristics.eval_cubic(heuristics.cubic_coefficients(N19), r))


def test_rogers_workers_and_resume(tmp_path):
    ref = heuristics.rogers_scan(N19, 30, chunk_size=5).as_dict()
    snap = tmp_path / "r.snap"
    with pytest.raises(ScanInterrupted):
        heuristics.rogers_scan(N19, 30, chunk_size=5, snapshot=snap, stop_after=2)
    assert heuristics.rogers_scan(N19, 30, chunk_size=5, snapshot=snap, workers=2).as_dict() == ref
    with pytest.raises(SnapshotMismatch):
        heuristics.rogers_scan(N19, 31, chunk_size=5, snapshot=snap)


def test_frequency_table_lookup():
    t = FrequencyTable(None, 3, [5, -2, 5], [1, 2, 3], [1, 1, 2])
    assert t.count(5) == 2 and t.count(-2) == 1 and t.count(7) == 0
    assert t.witnesses(5) == [Fraction(1), Fraction(3, 2)]


# -- Mazur ------------------------------------------------------------------


def test_mazur_bias_small():
    tab = modp.ap_table(CONGRUENT, 30)
    trace, lo, fin = heuristics.mazur_bias(tab, 30)
    signs = [(r.ap > 0) - (r.ap < 0) for r in tab.records]
    partial = [sum(signs[: i + 1]) for i in range(len(signs))]
    assert trace == partial
    assert lo == min([0] + partial) and fin == partial[-1]
    with pytest.raises(InsufficientTable):
        heuristics.mazur_bias(tab, 31)


def test_twist_scan_matches_scalar_reference():
    base = modp.ap_table(N19, 2000)
    Ds = heuristics.twist_values(1, 60)
    recs = heuristics.mazur_twist_scan(base, Ds, 2000, chunk_size=17)
    assert len(recs) == len(Ds)
    for r in recs:
        pairs = heuristics.twist_ap_pairs(base, r.D, 2000)
        s, lo = 0, 0
        for _, a, _ in pairs:
            s += (a > 0) - (a < 0)
            lo = min(lo, s)
        assert (r.min_bias, r.final_bias) == (lo, s)
        assert r.exact == all(ex for _, _, ex in pairs)
    keys = [(r.min_bias, abs(r.D), r.D) for r in recs]
    assert keys == sorted(keys)


def test_twist_scan_matches_direct_counts_when_exact():
    base = modp.ap_table(N19, 400)
    for r in heuristics.mazur_twist_scan(base, [-7, 5, 13, -43], 400):
        tw = modp.ap_table(ec.twist(N19, r.D), 400)
        _, lo, fin = heuristics.mazur_bias(tw, 400)
        assert r.exact and (r.min_bias, r.final_bias) == (lo, fin)


def test_twist_scan_never_counts_points(monkeypatch):
    base = modp.ap_table(N19, 1000)

    def boom(*a, **k):
        raise AssertionError("point counting inside a twist scan")

    monkeypatch.setattr(modp, "count_points", boom)
    monkeypatch.setattr(modp, "_count_bsgs", boom)
    monkeypatch.setattr(modp, "_affine_count", boom)
    recs = heuristics.mazur_twist_scan(base, heuristics.twist_values(1, 100), 1000)
    assert recs


def test_twist_values():
    assert heuristics.twist_values(1, 6) == [-1, 1, -2, 2, -3, 3, -5, 5, -6, 6]


# -- Nagao ------------------------------------------------------------------


def test_nagao_direct():
    tab = modp.ap_table(N19, 500)
    want = 0.0
    for p in arith.primes_up_to(300):
        a = modp.ap(N19, p)
        want += (2 - a) / (p + 1 - a) * log(p)
    assert heuristics.nagao_score(tab, 300).value == pytest.approx(want, rel=1e-12)
    with pytest.raises(InsufficientTable):
        heuristics.nagao_score(tab, 501)


def test_rank_candidates():
    scored = [(3, 1.0), (-2, 5.0), (2, 5.0), (7, -1.0)]
    assert heuristics.rank_candidates(scored, 3) == [-2, 2, 3]
    assert heuristics.rank_candidates(scored, 2, "min") == [7, 3]
    with pytest.raises(ValueError):
        heuristics.rank_candidates(scored, 1, "up")


def test_witness_holds():
    assert heuristics.witness_holds(ShortModel(-1, 0), 6, Fraction(2))
    assert not heuristics.witness_holds(ShortModel(-1, 0), 5, Fraction(2))


def test_bias_record_defaults():
    assert BiasRecord(5, -3, 1, 100).exact
