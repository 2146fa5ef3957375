"""Solver tests.

The oracle is classical series data, written out independently of the
contour machinery: with all nodes at 0, the row conditions are Taylor
coefficients, so small systems can be solved from exact closed-form
coefficients (geometric series for poles, the binomial series for the
square root, factorials for exp) and compared against the pipeline.
"""

import math

import numpy as np
import pytest

from multipade import (
    FunctionModel,
    GeometrySpec,
    NodeTable,
    SystemModel,
    approximant_eval,
    compute_incomplete,
    compute_mhp,
    entire_exp,
    quadrature_level,
    rational,
    sqrt_branch,
)
from multipade.errors import CurveSeparationError, NearPoleError

DISK = GeometrySpec.disk(0.0, 0.5)
TABLE = NodeTable(DISK, "repeated_point", point=0.0)
SEGMENT = GeometrySpec.segment(-1.0, 1.0)
CHEB = NodeTable(SEGMENT, "chebyshev")


def pole_coeff(a, j):
    """Taylor coefficient at 0 of 1/(z - a)."""
    return -(a ** -(j + 1))


def sqrt_coeff(a, j):
    """Taylor coefficient at 0 of sqrt(a - z), principal branch."""
    b = 1.0
    for i in range(j):
        b *= (0.5 - i) / (i + 1)
    return math.sqrt(a) * b * (-1.0 / a) ** j


def test_sqrt_coeff_oracle_sums_correctly():
    # sanity-check the oracle itself before using it
    z = 0.2 + 0.1j
    total = sum(sqrt_coeff(3.0, j) * z ** j for j in range(60))
    assert total == pytest.approx(complex(np.sqrt(3.0 - z)), abs=1e-13)


def test_exact_recovery_single_pole():
    f = FunctionModel([rational([1.0], [-1.0, 1.0])])
    system = SystemModel([f], (1,), DISK, TABLE)
    for n in (2, 5, 9):
        res = compute_mhp(system, n)
        np.testing.assert_allclose(
            res.denominator.coefficients, [-1.0, 1.0], atol=1e-12
        )
        assert res.normalization == "monic"
        assert not res.degenerate
        assert max(res.residuals) < 1e-10


def test_root_matches_series_oracle_pole_plus_branch():
    f = FunctionModel([rational([1.0], [-1.0, 1.0]), sqrt_branch(3.0)])
    system = SystemModel([f], (1,), DISK, TABLE)
    for n in (6, 10, 14):
        res = compute_mhp(system, n)
        c = lambda j: pole_coeff(1.0, j) + sqrt_coeff(3.0, j)
        oracle_root = c(n - 1) / c(n)
        roots = res.denominator_roots()
        assert len(roots) == 1
        assert roots[0] == pytest.approx(oracle_root, rel=1e-9)


def test_two_function_system_matches_brute_force():
    # f1 = 1/((z-1)(z-2)), f2 = 1/(z-2), m = (1, 1)
    f1 = FunctionModel([rational([1.0], [2.0, -3.0, 1.0])])
    f2 = FunctionModel([rational([1.0], [-2.0, 1.0])])
    system = SystemModel([f1, f2], (1, 1), DISK, TABLE)
    n = 8
    c1 = lambda j: 1.0 - 2.0 ** -(j + 1)
    c2 = lambda j: -(2.0 ** -(j + 1))
    matrix = np.array(
        [
            [c1(n), c1(n - 1), c1(n - 2)],
            [c2(n), c2(n - 1), c2(n - 2)],
        ],
        dtype=complex,
    )
    _, _, vh = np.linalg.svd(matrix)
    brute = vh[-1].conj()
    brute = brute / brute[-1]

    res = compute_mhp(system, n)
    np.testing.assert_allclose(res.denominator.coefficients, brute, atol=1e-8)
    np.testing.assert_allclose(
        res.denominator.coefficients, [2.0, -3.0, 1.0], atol=1e-8
    )


def test_entire_function_root_escapes_like_n():
    system = SystemModel([FunctionModel([entire_exp(1.0)])], (1,), DISK, TABLE)
    for n in (8, 12):
        res = compute_mhp(system, n)
        # exact coefficients 1/n! give root exactly n
        roots = res.denominator_roots()
        assert len(roots) == 1
        assert roots[0] == pytest.approx(n, rel=1e-6)
        assert 0.5 / n < res.leading_weight < 2.0 / n
        assert res.normalization == "monic"


def test_segment_chebyshev_exact_recovery():
    f = FunctionModel([rational([1.0], [-1.25, 1.0])])
    system = SystemModel([f], (1,), SEGMENT, CHEB)
    res = compute_mhp(system, 10)
    roots = res.denominator_roots()
    assert len(roots) == 1
    assert roots[0] == pytest.approx(1.25, abs=1e-10)


def test_numerators_interpolate():
    # P_k must reproduce Q f_k at the nodes: check via the approximant
    # agreeing with f at fresh interior points to solver accuracy
    f = FunctionModel([rational([1.0], [-1.0, 1.0])])
    system = SystemModel([f], (1,), DISK, TABLE)
    res = compute_mhp(system, 8)
    z = np.array([0.25, -0.3 + 0.1j, 0.4j])
    np.testing.assert_allclose(
        approximant_eval(res, 0, z), f.evaluate(z), atol=1e-10
    )
    assert approximant_eval(res, 0, 0.25) == pytest.approx(-4.0 / 3.0, abs=1e-10)


def test_scale_invariance_of_denominator():
    base = FunctionModel([rational([1.0], [-1.0, 1.0]), sqrt_branch(3.0)])
    scaled = FunctionModel(
        [rational([100.0], [-1.0, 1.0]), sqrt_branch(3.0, scale=100.0)]
    )
    sys_a = SystemModel([base], (1,), DISK, TABLE)
    sys_b = SystemModel([scaled], (1,), DISK, TABLE)
    res_a = compute_mhp(sys_a, 9)
    res_b = compute_mhp(sys_b, 9)
    np.testing.assert_allclose(
        res_a.denominator.coefficients,
        res_b.denominator.coefficients,
        atol=1e-11,
    )


def test_approximant_eval_near_pole_raises():
    f = FunctionModel([rational([1.0], [-1.0, 1.0])])
    system = SystemModel([f], (1,), DISK, TABLE)
    res = compute_mhp(system, 6)
    with pytest.raises(NearPoleError):
        approximant_eval(res, 0, 1.0)
    with pytest.raises(NearPoleError):
        approximant_eval(res, 0, np.array([0.25, 1.0]))


def test_quadrature_level_rules():
    pole = FunctionModel([rational([1.0], [-1.0, 1.0])])
    assert quadrature_level(pole, DISK) == pytest.approx(1.9, rel=1e-9)
    entire = FunctionModel([entire_exp(1.0)])
    assert quadrature_level(entire, DISK) == 4.0
    near = FunctionModel([rational([1.0], [-0.52, 1.0])])
    with pytest.raises(CurveSeparationError):
        quadrature_level(near, DISK)


def test_degree_validation():
    f = FunctionModel([rational([1.0], [-1.0, 1.0])])
    system = SystemModel([f], (2,), DISK, TABLE)
    with pytest.raises(ValueError):
        compute_mhp(system, 1)


def test_incomplete_budget_validation():
    f = FunctionModel([rational([1.0], [-1.0, 1.0])])
    with pytest.raises(ValueError):
        compute_incomplete(f, DISK, TABLE, 8, 2, 3)
    with pytest.raises(ValueError):
        compute_incomplete(f, DISK, TABLE, 8, 2, 0)


def test_incomplete_rank_deficient_system_still_pins_the_pole():
    # one true pole, budget m=2: both condition rows coincide, yet any
    # nullspace vector must satisfy Q(1) = 0
    f = FunctionModel([rational([1.0], [-1.0, 1.0])])
    res = compute_incomplete(f, DISK, TABLE, 8, 2, 1)
    assert res.pole_budget == 1
    assert res.multi_index == (2,)
    q = res.denominator
    assert abs(q(1.0)) <= 1e-8 * max(1.0, q.coeff_norm)


def test_residuals_reported_per_function():
    f1 = FunctionModel([rational([1.0], [2.0, -3.0, 1.0])])
    f2 = FunctionModel([rational([1.0], [-2.0, 1.0])])
    system = SystemModel([f1, f2], (1, 1), DISK, TABLE)
    res = compute_mhp(system, 8)
    assert len(res.residuals) == 2
    assert max(res.residuals) < 1e-10
