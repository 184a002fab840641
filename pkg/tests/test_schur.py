"""Radial multiplier positivity, intertwining, and the q -> 1 experiment."""

import random

import numpy as np
import pytest

from heckeq import (
    HeckeElement,
    MultiParameter,
    ball,
    builtin_graph,
    banded_difference_check,
    c_qq,
    commutator_intertwine_check,
    convergence_experiment,
    default_k_emp,
    dirac_commutator_matrix,
    gram_check,
    lip_lower_bound,
    magnitude_check,
    matrix_of,
    operator_norm,
    schur_map,
)
from heckeq.schur import commutator_norms


def random_element(q, rng, max_degree=2):
    basis = ball(q.graph, max_degree)
    coeffs = {w: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for w in basis.words}
    return HeckeElement(q, coeffs)


def test_gram_three_words_oracle(dihedral):
    # ball(1) = {e, s, t}: distances 0/1/2 give the kernel by hand
    kappa = 0.5
    check = gram_check(kappa, ball(dihedral, 1))
    gram = np.array([[1, 0.5, 0.5], [0.5, 1, 0.25], [0.5, 0.25, 1]])
    assert check.size == 3
    assert check.min_eigenvalue == pytest.approx(
        float(np.linalg.eigvalsh(gram)[0]), abs=1e-12
    )
    assert check.passed


@pytest.mark.parametrize("kappa", [0.3, 0.5, 0.7, 0.95, 1.0])
def test_gram_positive_on_builtin_balls(kappa, graphs):
    for graph in graphs:
        check = gram_check(kappa, ball(graph, 3))
        assert check.min_eigenvalue >= -1e-10
        assert check.passed


def test_gram_at_kappa_one_is_rank_one(pentagon):
    check = gram_check(1.0, ball(pentagon, 2))
    assert check.min_eigenvalue == pytest.approx(0.0, abs=1e-10)


def test_kappa_validation(pentagon):
    basis = ball(pentagon, 2)
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            gram_check(bad, basis)


def test_multiplier_scales_group_basis_by_length(pentagon):
    # radial eigen-relation: the q = 1 basis operator at length n scales by kappa^n
    q1 = MultiParameter.one(pentagon)
    kappa = 0.5
    for letters in [(), (0,), (0, 2), (0, 2, 4)]:
        w = pentagon.word(letters)
        op = matrix_of(HeckeElement.basis(q1, w), 3, codomain_radius=3)
        mapped = schur_map(kappa, op)
        assert np.max(np.abs(mapped.entries - kappa ** len(w) * op.entries)) <= 1e-12


def test_multiplier_composition(square):
    q = MultiParameter.uniform(square, 2.0)
    rng = random.Random(23)
    x = random_element(q, rng)
    op = matrix_of(x, 3, codomain_radius=3)
    twice = schur_map(0.6, schur_map(0.9, op))
    once = schur_map(0.54, op)
    assert np.max(np.abs(twice.entries - once.entries)) <= 1e-12


def test_multiplier_fixes_diagonal(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    rng = random.Random(29)
    x = random_element(q, rng)
    op = matrix_of(x, 2, codomain_radius=2)
    mapped = schur_map(0.4, op)
    assert np.max(np.abs(np.diag(mapped.entries) - np.diag(op.entries))) == 0


def test_commutator_intertwines_multiplier(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    rng = random.Random(31)
    for _ in range(5):
        x = random_element(q, rng)
        assert commutator_intertwine_check(x, 0.7, 3) <= 1e-12


def test_multiplier_contracts_commutator_norm(square):
    q = MultiParameter.uniform(square, 4.0)
    rng = random.Random(37)
    for _ in range(10):
        x = random_element(q, rng)
        damped, plain = commutator_norms(x, 0.5, 3)
        assert damped <= plain + 1e-10


def test_c_qq_pinned_value(pentagon):
    q = MultiParameter.uniform(pentagon, 1.1)
    q1 = MultiParameter.one(pentagon)
    assert c_qq(pentagon, q, q1) == pytest.approx(0.095346258925, abs=1e-12)
    assert c_qq(pentagon, q, q) == 0.0


def test_banded_difference_vanishes_at_equal_parameters(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    x = HeckeElement.basis(q, pentagon.word((0, 2)))
    result = banded_difference_check(x, q, 0.5, 2, 2, radius=3, k_emp=1.5)
    assert result.lhs <= 1e-12
    assert result.passed


def test_banded_difference_bounded_by_estimate(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    q1 = MultiParameter.one(pentagon)
    x = HeckeElement.basis(q, pentagon.word((0, 2)))
    k_emp = default_k_emp(pentagon, 3, seed=7)
    result = banded_difference_check(x, q1, 0.5, 2, 2, radius=3, k_emp=k_emp)
    assert result.lhs <= result.rhs + 1e-12
    assert result.passed


def test_banded_difference_requires_homogeneous(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    x = HeckeElement.one(q) + HeckeElement.basis(q, pentagon.generator(0))
    with pytest.raises(ValueError):
        banded_difference_check(x, q, 0.5, 1, 1, radius=3, k_emp=1.0)


def test_magnitude_check_zero_at_equal_parameters(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    rng = random.Random(41)
    x = random_element(q, rng)
    result = magnitude_check(x, q, 0.5, 3)
    assert result.norm_gap_ratio == 0.0
    assert result.commutator_gap_ratio == 0.0


def test_magnitude_check_small_near_one(pentagon):
    q = MultiParameter.uniform(pentagon, 1.1)
    q1 = MultiParameter.one(pentagon)
    rng = random.Random(43)
    x = random_element(q, rng)
    result = magnitude_check(x, q1, 0.5, 3)
    assert 0 <= result.norm_gap_ratio <= 1.0
    assert 0 <= result.commutator_gap_ratio <= 1.0


def test_default_k_emp_deterministic(pentagon):
    a = default_k_emp(pentagon, 3, seed=11)
    b = default_k_emp(pentagon, 3, seed=11)
    assert a == b
    assert a >= 1.0


def test_convergence_rejects_square_graph(square):
    with pytest.raises(ValueError):
        convergence_experiment(square, [2.0, 1.5], 0.5, 2, 3, 2, seed=11)


def test_convergence_rows_shrink_toward_one(pentagon):
    rows = convergence_experiment(pentagon, [2.0, 1.2, 1.05], 0.5, 2, 3, 4, seed=11)
    assert [r.q for r in rows] == [2.0, 1.2, 1.05]
    cs = [r.c_q1 for r in rows]
    fs = [r.f_q1 for r in rows]
    assert cs == sorted(cs, reverse=True)
    assert fs == sorted(fs, reverse=True)
    assert all(r.n_samples == 4 and r.radius == 3 for r in rows)
    assert rows[-1].gap_dir1 < rows[0].gap_dir1
    assert rows[-1].gap_dir2 < rows[0].gap_dir2


def test_convergence_deterministic_and_threaded(pentagon):
    a = convergence_experiment(pentagon, [2.0, 1.2], 0.5, 2, 3, 3, seed=11)
    b = convergence_experiment(pentagon, [2.0, 1.2], 0.5, 2, 3, 3, seed=11)
    c = convergence_experiment(pentagon, [2.0, 1.2], 0.5, 2, 3, 3, seed=11, threads=2)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    assert [r.to_dict() for r in a] == [r.to_dict() for r in c]


def test_schur_map_requires_matching_sides(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    x = HeckeElement.basis(q, pentagon.generator(0))
    rect = matrix_of(x, 2)  # codomain radius 3: sides differ
    with pytest.raises(ValueError):
        schur_map(0.5, rect)


def test_damped_commutator_against_plain(pentagon):
    q = MultiParameter.uniform(pentagon, 2.0)
    rng = random.Random(47)
    x = random_element(q, rng)
    damped, plain = commutator_norms(x, 0.9, 3)
    direct = operator_norm(dirac_commutator_matrix(x, 3, codomain_radius=3))
    assert plain == pytest.approx(direct, rel=1e-12)
    assert damped <= plain + 1e-10
    assert lip_lower_bound(x, 3) == pytest.approx(direct, rel=1e-12)
