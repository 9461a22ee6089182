import itertools

import numpy as np
import pytest

from carnot_lab import growth
from carnot_lab.errors import BudgetError, DomainError


def octahedral_count(r):
    # exact closed-form count of the l1 ball in Z^3
    return (2 * r + 1) * (2 * r * r + 2 * r + 3) // 3


def enumerate_words(gens, length, law):
    """Oracle: the set of all products of words up to the given length."""
    seen = {growth.IDENTITY}
    for n in range(1, length + 1):
        for word in itertools.product(gens, repeat=n):
            g = growth.IDENTITY
            for s in word:
                g = law(g, s)
            seen.add(g)
    return seen


HEIS_GENS = growth.symmetrize_generators(
    "heis_Z", growth.STANDARD_GENERATORS["heis_Z"])


# ---------------------------------------------------------------------------
# group laws

def test_heis_law_and_inverse():
    g = (3, -2, 5)
    assert growth.heis_mul(g, growth.heis_inv(g)) == growth.IDENTITY
    assert growth.heis_mul(growth.heis_inv(g), g) == growth.IDENTITY
    assert growth.heis_mul((1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    assert growth.heis_mul((0, 1, 0), (1, 0, 0)) == (1, 1, 0)


def test_heis_double_commutator_trivial():
    rng = np.random.default_rng(71)
    for _ in range(100):
        g1, g2, g3 = (tuple(int(v) for v in rng.integers(-9, 10, 3))
                      for _ in range(3))

        def comm(a, b):
            return growth.heis_mul(
                growth.heis_mul(a, b),
                growth.heis_mul(growth.heis_inv(a), growth.heis_inv(b)))

        inner = comm(g1, g2)
        assert inner[0] == 0 and inner[1] == 0
        assert comm(g3, inner) == growth.IDENTITY


def test_symmetrize():
    gens = growth.symmetrize_generators("heis_Z", [(1, 0, 0), (0, 1, 0)])
    assert set(gens) == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)}
    with pytest.raises(DomainError):
        growth.symmetrize_generators("heis_Z", [(0, 0, 0)])
    with pytest.raises(DomainError):
        growth.symmetrize_generators("so3", [(1, 0, 0)])
    with pytest.raises(DomainError):
        growth.symmetrize_generators("z3", [])


# ---------------------------------------------------------------------------
# word balls

def test_word_ball_first_counts():
    table = growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 2)
    assert table.counts == (1, 5, 17)
    assert table.radii == (0, 1, 2)


def test_word_ball_matches_exhaustive_enumeration():
    table = growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 4)
    for r in range(5):
        oracle = enumerate_words(HEIS_GENS, r, growth.heis_mul)
        assert table.counts[r] == len(oracle)


def test_word_ball_strictly_increasing_with_frontier_bound():
    table = growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 12)
    gens = len(table.generators)
    for r in range(1, 13):
        assert table.counts[r] > table.counts[r - 1]
        assert table.counts[r] <= table.counts[r - 1] * (1 + gens)


def test_word_ball_z3_octahedral_oracle():
    table = growth.word_ball("z3", growth.STANDARD_GENERATORS["z3"], 25)
    for r in range(26):
        assert table.counts[r] == octahedral_count(r)


def test_word_ball_anisotropy():
    # the vertical coordinate reach grows quadratically, the horizontal
    # one linearly
    table = growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 20)
    r = np.arange(6, 21)
    vert = np.array(table.max_abs_vertical[6:21], dtype=float)
    horiz = np.array(table.max_abs_horizontal[6:21], dtype=float)
    fit_v = np.polyfit(np.log(r), np.log(vert), 1)[0]
    assert abs(fit_v - 2.0) <= 0.2
    assert np.array_equal(horiz, r)


def test_word_ball_determinism():
    t1 = growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 10)
    t2 = growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 10)
    assert t1.counts == t2.counts
    assert t1.to_payload() == t2.to_payload()


def test_word_ball_budget_error_carries_partial():
    with pytest.raises(BudgetError) as info:
        growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 40,
                         mem_budget_mb=1)
    partial = info.value.partial
    assert partial is not None and partial.truncated
    assert partial.counts[0] == 1
    assert len(partial.counts) >= 1


def test_word_ball_payload_schema():
    table = growth.word_ball("z3", growth.STANDARD_GENERATORS["z3"], 3)
    payload = table.to_payload()
    assert set(payload) == {"group", "generators", "radii", "counts"}
    assert payload["counts"] == [1, 7, 25, 63]
    assert ("r", "count") == table.to_csv_rows()[0]


# ---------------------------------------------------------------------------
# word norm

def test_word_norm_examples():
    assert growth.word_norm((0, 0, 0)) == 0
    assert growth.word_norm((1, 1, 1)) == 2    # T1 T2
    assert growth.word_norm((1, 1, 0)) == 2    # T2 T1
    assert growth.word_norm((1, 0, 0)) == 1


def test_word_norm_central_element():
    # the central generator (0,0,1) is the commutator word of length 4
    norm = growth.word_norm((0, 0, 1))
    assert norm is not None and norm <= 4
    # oracle: exhaustive enumeration of short words
    for length in range(norm):
        assert (0, 0, 1) not in enumerate_words(HEIS_GENS, length,
                                                growth.heis_mul)
    assert (0, 0, 1) in enumerate_words(HEIS_GENS, norm, growth.heis_mul)


def test_word_norm_cap():
    assert growth.word_norm((40, 0, 0), radius_cap=5) is None


def test_word_norm_consistent_with_word_enumeration():
    # the norm is the first word length whose exhaustive product set
    # contains the element
    rng = np.random.default_rng(72)
    balls = [enumerate_words(HEIS_GENS, n, growth.heis_mul)
             for n in range(6)]
    for _ in range(30):
        g = (int(rng.integers(-2, 3)), int(rng.integers(-2, 3)),
             int(rng.integers(-2, 3)))
        norm = growth.word_norm(g, radius_cap=12)
        assert norm is not None
        if norm <= 5:
            assert g in balls[norm]
            if norm > 0:
                assert g not in balls[norm - 1]
        else:
            assert g not in balls[5]


# ---------------------------------------------------------------------------
# growth fitting

def test_growth_fit_synthetic_power_law():
    counts = tuple(7 * r ** 5 if r else 1 for r in range(21))
    table = growth.GrowthTable("z3", (), tuple(range(21)), counts)
    d, c, resid = growth.growth_fit(table, 5, 20)
    assert d == pytest.approx(5.0, abs=1e-12)
    assert c == pytest.approx(7.0, rel=1e-10)
    assert resid < 1e-12


def test_growth_fit_windows_and_errors():
    table = growth.word_ball("z3", growth.STANDARD_GENERATORS["z3"], 12)
    with pytest.raises(DomainError):
        growth.growth_fit(table, 5, 5)
    with pytest.raises(DomainError):
        growth.growth_fit(table, 5, 40)


def test_growth_fit_z3_exponent():
    table = growth.word_ball("z3", growth.STANDARD_GENERATORS["z3"], 40)
    d, _, _ = growth.growth_fit(table, 10, 40)
    assert d == pytest.approx(3.0, abs=0.1)


def test_growth_fit_heis_exponent():
    table = growth.word_ball("heis_Z", growth.STANDARD_GENERATORS["heis_Z"], 25)
    d, _, _ = growth.growth_fit(table, 10, 25)
    assert d == pytest.approx(4.0, abs=0.25)


# ---------------------------------------------------------------------------
# generator robustness

def test_generator_robustness_heis():
    report = growth.generator_robustness(
        "heis_Z", growth.STANDARD_GENERATORS["heis_Z"],
        (growth.T1, growth.T2, (1, 1, 1)), 18)
    assert report.exponent_gap <= 0.3
    assert report.coverage_ok
    # the count ratios bounded away from 0 and infinity are the
    # empirical quasi-isometry witness; the richer set grows faster
    lo, hi = report.count_ratio_bounds
    assert 0.05 < lo <= hi <= 1.0 + 1e-12


def test_generator_robustness_identical_sets():
    report = growth.generator_robustness(
        "z3", growth.STANDARD_GENERATORS["z3"],
        growth.STANDARD_GENERATORS["z3"], 12)
    assert report.exponent_gap == 0.0
    assert report.count_ratio_bounds == (1.0, 1.0)
    assert report.tables[0].counts == report.tables[1].counts


def test_generator_robustness_warns_on_non_generating_set():
    # planar unit vectors never reach the third axis of z3
    with pytest.warns(UserWarning, match="may not generate"):
        report = growth.generator_robustness(
            "z3", growth.STANDARD_GENERATORS["z3"],
            ((1, 0, 0), (0, 1, 0)), 10)
    assert not report.coverage_ok


def test_generator_robustness_z3_diagonals():
    diag = growth.STANDARD_GENERATORS["z3"] + ((1, 1, 0), (0, 1, 1))
    report = growth.generator_robustness(
        "z3", growth.STANDARD_GENERATORS["z3"], diag, 16)
    assert abs(report.exponents[0] - 3.0) <= 0.15
    assert abs(report.exponents[1] - 3.0) <= 0.15
    assert report.exponent_gap <= 0.3
