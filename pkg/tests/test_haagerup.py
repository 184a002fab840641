"""Block-norm ratios, the commuting-pair family, and factorization counts."""

import math
from fractions import Fraction

import pytest

from heckeq import (
    HeckeElement,
    MultiParameter,
    builtin_graph,
    count_tuples,
    haagerup_ratio,
    haagerup_scan,
    tail_band_check,
    tuple_scan,
    verify_counterexample,
)
from heckeq.coxeter import ResourceGuardExceeded
from heckeq.haagerup import c_q, feasible_blocks, square_family_element


def test_c_q_is_max_clique_product():
    dihedral = builtin_graph("dihedral")
    pentagon = builtin_graph("pentagon")
    # no commuting pair in the dihedral graph: best clique is one letter
    assert c_q(dihedral, MultiParameter.uniform(dihedral, 4.0)) == 1.5
    # pentagon cliques are edges: (3/2)^2
    assert c_q(pentagon, MultiParameter.uniform(pentagon, 4.0)) == 2.25
    # |p| < 1 for q = 2, so the empty clique wins
    assert c_q(pentagon, MultiParameter.uniform(pentagon, 2.0)) == 1.0
    # q < 1 has negative p with the same magnitude as 1/q
    assert c_q(pentagon, MultiParameter.uniform(pentagon, 0.25)) == 2.25


def test_haagerup_ratio_validates_blocks(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    x = HeckeElement.basis(q, pentagon.generator(0))
    with pytest.raises(ValueError):
        haagerup_ratio(x, 0, 9, radius=3)
    with pytest.raises(ValueError):
        haagerup_ratio(x, 9, 0, radius=3)
    with pytest.raises(ValueError):
        haagerup_ratio(HeckeElement.zero(q), 0, 0, radius=3)
    assert haagerup_ratio(x, 1, 0, radius=3) == pytest.approx(1.0)


def test_feasible_blocks_parity_and_bandwidth():
    blocks = feasible_blocks(2, 3)
    assert all(abs(i - j) <= 2 for i, j in blocks)
    assert all((i + j) % 2 == 0 for i, j in blocks)
    assert (1, 3) in blocks and (3, 3) in blocks and (5, 3) in blocks
    assert (4, 3) not in blocks


def test_family_element_words(square):
    q = MultiParameter.uniform(square, 2.0)
    x = square_family_element(q, 3)
    words = x.support()
    assert len(words) == 3
    assert all(len(w) == 6 for w in words)
    assert all(x.coeff(w) == 1.0 for w in words)


def test_family_needs_a_square(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    with pytest.raises(ValueError):
        square_family_element(q, 2)
    with pytest.raises(ValueError):
        verify_counterexample(2, q)


PINNED_SQUARE_SUMS = {1: 2, 2: 14, 3: 46, 4: 108, 5: 210}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_counterexample_exact_values(n, square):
    q = MultiParameter.uniform(square, 2.0)
    result = verify_counterexample(n, q)
    counts = result.coefficient_counts
    sum_sq = sum(c * c for c in counts.values())
    assert sum_sq == PINNED_SQUARE_SUMS[n]
    assert result.x_norm == pytest.approx(n ** -0.5, abs=1e-15)
    assert result.xi_norm == pytest.approx(1.0, abs=1e-15)
    assert result.block_norm**2 == pytest.approx(
        float(Fraction(sum_sq, 2 * n**3)), abs=1e-12
    )
    assert result.ratio >= math.sqrt(n / 2) - 1e-12
    assert result.block_norm >= 1 / math.sqrt(2) - 1e-12
    assert result.passed


def test_counterexample_counts_do_not_depend_on_q(square):
    for qval in (0.25, 1.0, 4.0):
        q = MultiParameter.uniform(square, qval)
        assert verify_counterexample(3, q).coefficient_counts == {
            2: 1, 3: 2, 4: 3, 5: 3, 6: 3, 7: 3, 8: 2, 9: 1,
        }


def test_counterexample_rejects_bad_n(square):
    q = MultiParameter.uniform(square, 2.0)
    with pytest.raises(ValueError):
        verify_counterexample(0, q)


def test_scan_is_deterministic(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    a = haagerup_scan(pentagon, q, 2, 3, 4, seed=7)
    b = haagerup_scan(pentagon, q, 2, 3, 4, seed=7)
    assert a.to_dict() == b.to_dict()
    c = haagerup_scan(pentagon, q, 2, 3, 4, seed=8)
    assert [r.ratio for r in a.rows] != [r.ratio for r in c.rows]


def test_scan_threads_agree_with_serial(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    a = haagerup_scan(pentagon, q, 2, 3, 4, seed=7)
    b = haagerup_scan(pentagon, q, 2, 3, 4, seed=7, threads=3)
    assert a.to_dict() == b.to_dict()


def test_dihedral_group_algebra_ratios_stay_at_one(dihedral):
    # at q = 1 every block of a reduced-word sum is a partial isometry piece
    q = MultiParameter.one(dihedral)
    report = haagerup_scan(dihedral, q, 3, 4, 5, seed=7)
    assert report.max_ratio <= 1.0 + 1e-12
    assert report.k_emp == report.max_ratio  # c_q = 1 at q = 1
    assert not report.has_square


def test_scan_embeds_family_on_square_graph(square):
    q = MultiParameter.uniform(square, 2.0)
    report = haagerup_scan(square, q, 2, 3, 3, seed=7)
    assert report.has_square
    labels = {r.sample for r in report.rows}
    assert "square-family" in labels
    family_rows = [r for r in report.rows if r.sample == "square-family" and r.n == 2]
    assert family_rows
    assert max(r.ratio for r in family_rows) >= 1.0 - 1e-9  # sqrt(n/2) at n = 2


def test_count_tuples_small_pinned_values(pentagon):
    e = pentagon.identity
    a = pentagon.generator(0)
    assert count_tuples(e, e, 0) == 1
    assert count_tuples(a, e, 0) == 5
    assert count_tuples(a, e, 1) == 1
    assert count_tuples(a, a, 1) == 5
    ab = pentagon.word((0, 1))
    assert count_tuples(ab, a, 2) == 15


def test_count_tuples_rejects_negative_index(pentagon):
    with pytest.raises(ValueError):
        count_tuples(pentagon.identity, pentagon.identity, -1)


def test_tuple_scan_matches_literal_count(pentagon):
    report = tuple_scan(pentagon, 2, 2)
    for i in range(3):
        best = 0
        from heckeq import ball

        for x in ball(pentagon, 2).words:
            for y in ball(pentagon, 2).words:
                best = max(best, count_tuples(x, y, i))
        assert report.per_i_max[i] == best


def test_tuple_scan_deterministic_and_recorded(pentagon):
    a = tuple_scan(pentagon, 2, 3)
    b = tuple_scan(pentagon, 2, 3)
    assert a.to_dict() == b.to_dict()
    assert a.bound == max(a.per_i_max.values())
    x_name, y_name, i = a.argmax
    x = pentagon.word(pentagon.parse_letters(x_name))
    y = pentagon.word(pentagon.parse_letters(y_name))
    assert count_tuples(x, y, i) == a.bound


def test_tail_band_lower_bound_respects_estimate(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    x = HeckeElement(
        q,
        {
            pentagon.generator(0): 1.0,
            pentagon.word((0, 2)): 0.5,
        },
    )
    band = tail_band_check(x, 1, 3)
    assert band.lhs_lower <= band.rhs
    assert band.consistent
    # widening the band past the degree kills every off-band block
    wide = tail_band_check(x, x.degree, 3)
    assert wide.lhs_lower == 0.0
