"""Forced-pole accounting tests against hand-worked linear algebra.

Every frozen number below was derived by hand before running the
code.  The recurring geometry is the half-radius disk, where a real
point x > 1/2 sits at level 2x: the pole at 1 has level 2, the pole
at 1.5 level 3, the pole at 2 level 4 and the branch point at 3
level 6.

Worked cases:

* (1/((z-1)(z-2)), 1/(z-2)) with m = (1, 1).  Both residues are
  reachable (p = (1, -1) keeps the pole at 1, p = (0, 1) the pole at
  2), nothing obstructs beyond them, so Q_mf = (z-1)(z-2), all radii
  are infinite and the rate is 0.

* sqrt(3-z) alone, m = (1).  No pole candidates at all: Q_mf = 1 and
  the rate statement does not apply.

* 1/(z-1) + 1/(z-1.5) + sqrt(3-z), m = (1).  The weight is a scalar,
  so annihilating the residue at 1.5 forces p = 0; only the pole at 1
  is credited and its radius is the level of the screening pole,
  R = 3, giving rate 2/3.

* the same function with m = (2).  p = z - 1.5 and p = z - 1 show
  both residues reachable; each walk-out survives level 3 and dies at
  the branch rows (level 6, p must vanish identically).  Rate is
  max(2/6, 3/6) = 1/2.

* 1/(z-1)^2 + sqrt(3-z), m = (2).  Exact order 1 at 1 needs
  p(1) = 0 but p'(1) is free, so both s = 1 and s = 2 are feasible:
  tau = 2, R_xi_s = [6, 6], rate 2/6.
"""

import math

import numpy as np
import pytest

from multipade import (
    FunctionModel,
    GeometrySpec,
    NodeTable,
    SystemModel,
    entire_exp,
    polynomial_independence,
    predicted_theta,
    r_values,
    rational,
    sqrt_branch,
    system_poles,
)
from multipade.errors import (
    DegenerateSystemError,
    IncompletePoleCountError,
    UnsupportedModelError,
)

DISK = GeometrySpec.disk(0.0, 0.5)
TABLE = NodeTable(DISK, "repeated_point", point=0.0)


def make_system(functions, multi_index):
    return SystemModel(functions, multi_index, DISK, TABLE)


def pole_orders(pole_set):
    return sorted(
        (round(loc.real, 6), round(loc.imag, 6), order)
        for loc, order in pole_set.poles
    )


def two_rational_system():
    # f1 = 1/((z-1)(z-2)), f2 = 1/(z-2)
    f1 = FunctionModel([rational([1.0], [2.0, -3.0, 1.0])])
    f2 = FunctionModel([rational([1.0], [-2.0, 1.0])])
    return make_system([f1, f2], (1, 1))


def screened_terms(weight=1.0):
    return [
        rational([weight], [-1.0, 1.0]),
        rational([weight], [-1.5, 1.0]),
        sqrt_branch(3.0, scale=weight),
    ]


class TestSystemPoles:
    def test_two_rational_functions_force_both_poles(self):
        pole_set = system_poles(two_rational_system())
        assert pole_orders(pole_set) == [(1.0, 0.0, 1), (2.0, 0.0, 1)]
        assert pole_set.target_order == 2
        assert pole_set.total_order == 2
        np.testing.assert_allclose(
            pole_set.Q_mf.coefficients, [2.0, -3.0, 1.0], atol=1e-8
        )

    def test_pure_branch_has_no_forced_poles(self):
        system = make_system([FunctionModel([sqrt_branch(3.0)])], (1,))
        pole_set = system_poles(system)
        assert pole_set.poles == []
        assert pole_set.total_order == 0
        np.testing.assert_allclose(pole_set.Q_mf.coefficients, [1.0])

    def test_screening_pole_is_not_credited_at_m_one(self):
        system = make_system([FunctionModel(screened_terms())], (1,))
        pole_set = system_poles(system)
        # scalar weight cannot kill the residue at 1.5 without dying
        assert pole_orders(pole_set) == [(1.0, 0.0, 1)]
        np.testing.assert_allclose(
            pole_set.Q_mf.coefficients, [-1.0, 1.0], atol=1e-12
        )

    def test_degree_one_weight_frees_the_screened_pole(self):
        system = make_system([FunctionModel(screened_terms())], (2,))
        pole_set = system_poles(system)
        assert pole_orders(pole_set) == [(1.0, 0.0, 1), (1.5, 0.0, 1)]
        np.testing.assert_allclose(
            pole_set.Q_mf.coefficients, [1.5, -2.5, 1.0], atol=1e-10
        )

    def test_double_pole_credits_both_orders(self):
        f = FunctionModel(
            [rational([1.0], [1.0, -2.0, 1.0]), sqrt_branch(3.0)]
        )
        pole_set = system_poles(make_system([f], (2,)))
        assert pole_orders(pole_set) == [(1.0, 0.0, 2)]
        np.testing.assert_allclose(
            pole_set.Q_mf.coefficients, [1.0, -2.0, 1.0], atol=1e-8
        )

    def test_single_function_single_pole(self):
        f = FunctionModel([rational([1.0], [-1.0, 1.0])])
        pole_set = system_poles(make_system([f], (1,)))
        assert pole_orders(pole_set) == [(1.0, 0.0, 1)]

    def test_duplicated_functions_leave_budget_unfilled(self):
        f1 = FunctionModel([rational([1.0], [-1.0, 1.0])])
        f2 = FunctionModel([rational([1.0], [-1.0, 1.0])])
        pole_set = system_poles(make_system([f1, f2], (1, 1)))
        assert pole_orders(pole_set) == [(1.0, 0.0, 1)]
        assert pole_set.total_order == 1
        assert pole_set.target_order == 2

    def test_function_order_does_not_change_the_answer(self):
        f1 = FunctionModel([rational([1.0], [2.0, -3.0, 1.0])])
        f2 = FunctionModel([rational([1.0], [-2.0, 1.0])])
        forward = system_poles(make_system([f1, f2], (1, 1)))
        swapped = system_poles(make_system([f2, f1], (1, 1)))
        assert pole_orders(forward) == pole_orders(swapped)
        np.testing.assert_allclose(
            forward.Q_mf.coefficients, swapped.Q_mf.coefficients, atol=1e-10
        )

    def test_term_scaling_does_not_change_the_answer(self):
        plain = system_poles(make_system([FunctionModel(screened_terms())], (1,)))
        scaled = system_poles(
            make_system([FunctionModel(screened_terms(5.0))], (1,))
        )
        assert pole_orders(plain) == pole_orders(scaled)

    def test_total_order_never_exceeds_the_budget(self):
        rng = np.random.default_rng(7)
        for _ in range(8):
            count = int(rng.integers(1, 4))
            locs = 1.0 + rng.uniform(0.0, 2.0, size=count)
            terms = [rational([1.0], [-loc, 1.0]) for loc in locs]
            m = (int(rng.integers(1, 4)),)
            pole_set = system_poles(make_system([FunctionModel(terms)], m))
            assert pole_set.total_order <= m[0]


class TestRValues:
    def test_purely_rational_radii_are_infinite(self):
        filled = r_values(system_poles(two_rational_system()), two_rational_system())
        for loc, _ in filled.poles:
            key = min(filled.per_pole, key=lambda c: abs(c - loc))
            assert filled.per_pole[key]["R_xi_s"] == [math.inf]
            assert filled.per_pole[key]["R_xi"] == math.inf
        for k in (0, 1):
            assert filled.per_function[k]["R_k"] == math.inf
            assert filled.per_function[k]["R_k_star"] == math.inf

    def test_rational_poles_inside_dk_are_listed(self):
        system = two_rational_system()
        filled = r_values(system_poles(system), system)
        first = sorted(
            (round(loc.real), order)
            for loc, order in filled.per_function[0]["poles_in_Dk"]
        )
        second = sorted(
            (round(loc.real), order)
            for loc, order in filled.per_function[1]["poles_in_Dk"]
        )
        assert first == [(1, 1), (2, 1)]
        assert second == [(2, 1)]

    def test_screening_pole_sets_the_radius(self):
        system = make_system([FunctionModel(screened_terms())], (1,))
        filled = r_values(system_poles(system), system)
        (key,) = filled.per_pole
        assert filled.per_pole[key]["R_xi_s"] == pytest.approx([3.0])
        assert filled.per_pole[key]["R_xi"] == pytest.approx(3.0)
        assert filled.per_function[0]["R_k"] == pytest.approx(3.0)
        assert filled.per_function[0]["R_k_star"] == pytest.approx(3.0)

    def test_branch_rows_stop_both_walks_at_level_six(self):
        system = make_system([FunctionModel(screened_terms())], (2,))
        filled = r_values(system_poles(system), system)
        for data in filled.per_pole.values():
            assert data["R_xi_s"] == pytest.approx([6.0])
        assert filled.per_function[0]["R_k"] == pytest.approx(6.0)

    def test_double_pole_radii_per_order(self):
        f = FunctionModel(
            [rational([1.0], [1.0, -2.0, 1.0]), sqrt_branch(3.0)]
        )
        system = make_system([f], (2,))
        filled = r_values(system_poles(system), system)
        (key,) = filled.per_pole
        assert filled.per_pole[key]["R_xi_s"] == pytest.approx([6.0, 6.0])

    def test_uncaptured_branch_caps_the_function_radius(self):
        system = make_system([FunctionModel([sqrt_branch(3.0)])], (1,))
        filled = r_values(system_poles(system), system)
        assert filled.per_pole == {}
        assert filled.per_function[0]["R_k"] == pytest.approx(6.0)
        assert filled.per_function[0]["R_k_star"] == pytest.approx(6.0)
        assert filled.per_function[0]["poles_in_Dk"] == []


class TestPredictedTheta:
    def test_purely_rational_rate_is_zero(self):
        system = two_rational_system()
        filled = r_values(system_poles(system), system)
        assert predicted_theta(filled, DISK) == 0.0

    def test_screened_pole_rate(self):
        system = make_system([FunctionModel(screened_terms())], (1,))
        filled = r_values(system_poles(system), system)
        assert predicted_theta(filled, DISK) == pytest.approx(2.0 / 3.0)

    def test_two_pole_rate_takes_the_max(self):
        system = make_system([FunctionModel(screened_terms())], (2,))
        filled = r_values(system_poles(system), system)
        # max(|phi(1)|/6, |phi(1.5)|/6) = max(1/3, 1/2)
        assert predicted_theta(filled, DISK) == pytest.approx(0.5)

    def test_double_pole_rate(self):
        f = FunctionModel(
            [rational([1.0], [1.0, -2.0, 1.0]), sqrt_branch(3.0)]
        )
        system = make_system([f], (2,))
        filled = r_values(system_poles(system), system)
        assert predicted_theta(filled, DISK) == pytest.approx(1.0 / 3.0, abs=1e-9)

    def test_incomplete_pole_set_is_rejected(self):
        system = make_system([FunctionModel([sqrt_branch(3.0)])], (1,))
        filled = r_values(system_poles(system), system)
        with pytest.raises(IncompletePoleCountError):
            predicted_theta(filled, DISK)

    def test_unfilled_pole_set_is_rejected(self):
        bare = system_poles(two_rational_system())
        with pytest.raises(ValueError):
            predicted_theta(bare, DISK)

    def test_incomplete_error_is_a_degeneracy(self):
        # callers that guard on the broad class must catch the narrow one
        assert issubclass(IncompletePoleCountError, DegenerateSystemError)


class TestPolynomialIndependence:
    def test_distinct_poles_are_independent(self):
        assert polynomial_independence(two_rational_system()) is True

    def test_duplicated_functions_are_dependent(self):
        f1 = FunctionModel([rational([1.0], [-1.0, 1.0])])
        f2 = FunctionModel([rational([1.0], [-1.0, 1.0])])
        assert polynomial_independence(make_system([f1, f2], (1, 1))) is False

    def test_branch_rows_count(self):
        # p*f polynomial forces p = 0 even though f has no poles
        system = make_system([FunctionModel([sqrt_branch(3.0)])], (1,))
        assert polynomial_independence(system) is True

    def test_higher_budget_on_single_pole_is_dependent(self):
        # deg-1 weight on a simple pole leaves a kernel direction
        f = FunctionModel([rational([1.0], [-1.0, 1.0])])
        assert polynomial_independence(make_system([f], (2,))) is False


class TestModelValidation:
    def test_entire_term_is_rejected(self):
        system = make_system([FunctionModel([entire_exp()])], (1,))
        with pytest.raises(UnsupportedModelError):
            system_poles(system)

    def test_two_branch_terms_are_rejected(self):
        f = FunctionModel([sqrt_branch(3.0), sqrt_branch(4.0)])
        with pytest.raises(UnsupportedModelError):
            system_poles(make_system([f], (1,)))

    def test_near_coincident_poles_are_rejected(self):
        # 1e-7 apart: too far to merge, too close to separate
        f1 = FunctionModel([rational([1.0], [-1.0, 1.0])])
        f2 = FunctionModel([rational([1.0], [-(1.0 + 1e-7), 1.0])])
        with pytest.raises(UnsupportedModelError):
            system_poles(make_system([f1, f2], (1, 1)))

    def test_branch_point_on_a_pole_is_rejected(self):
        f1 = FunctionModel([rational([1.0], [-1.0, 1.0])])
        f2 = FunctionModel([sqrt_branch(1.0)])
        with pytest.raises(UnsupportedModelError):
            system_poles(make_system([f1, f2], (1, 1)))
