"""Kernel tests.

The divided-difference oracle below is independent of the contour
machinery: the classical two-point recursion over distinct nodes, and
the Taylor rule (k-th derivative over k!) at fully confluent nodes.
Frozen Taylor rows come from 1/(z-2) = -sum z^i / 2^(i+1).
"""

import math

import numpy as np
import pytest

from multipade import ComplexPolynomial, GeometrySpec, NodeTable, level_curve, nodes
from multipade.errors import QuadratureError
from multipade.numkernel import (
    circle_coefficients,
    condition_row,
    contour_integral,
    divided_difference_ladder,
    nullspace,
    poly_roots,
)

DISK = GeometrySpec.disk(0.0, 0.5)
SEGMENT = GeometrySpec.segment(-1.0, 1.0)


def dd_recursive(f, xs):
    """Divided difference over distinct nodes, classical recursion."""
    table = [complex(f(np.asarray(x, dtype=complex))) for x in xs]
    for level in range(1, len(xs)):
        table = [
            (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
            for i in range(len(table) - 1)
        ]
    return table[0]


# --- contour quadrature -------------------------------------------------


def test_residue_exactness():
    curve = level_curve(DISK, 2.0)  # the unit circle in z
    res = contour_integral(lambda z: 1.0 / (z - 0.3), curve)
    assert res.value == pytest.approx(2j * np.pi, abs=1e-12)
    assert abs(res.value - 2j * np.pi) <= max(res.est_error, 1e-12)

    res = contour_integral(lambda z: z ** 2, curve)
    assert abs(res.value) < 1e-12

    res = contour_integral(lambda z: 1.0 / ((z - 0.3) * (z - 5.0)), curve)
    assert res.value == pytest.approx(2j * np.pi / (0.3 - 5.0), abs=1e-12)


def test_residue_on_segment_curve():
    curve = level_curve(SEGMENT, 2.0)
    res = contour_integral(lambda z: 1.0 / (z - 0.5), curve)
    assert res.value == pytest.approx(2j * np.pi, abs=1e-11)
    # pole at 3 sits outside the rho=2 curve (its level is 3 + sqrt(8))
    res = contour_integral(lambda z: 1.0 / (z - 3.0), curve)
    assert abs(res.value) < 1e-11


def test_unsettleable_integral_raises():
    curve = level_curve(DISK, 2.0)
    with pytest.raises(QuadratureError):
        contour_integral(lambda z: 1.0 / (z - (1.0 + 1e-7)), curve)


# --- divided differences ------------------------------------------------


def test_condition_row_matches_recursion_on_distinct_nodes():
    table = NodeTable(SEGMENT, "chebyshev")
    pts, _ = nodes(table, 6)
    curve = level_curve(SEGMENT, 2.0)
    f = lambda z: 1.0 / (z - 2.0)
    for col in range(3):
        got = condition_row(f, pts, curve, col)
        want = dd_recursive(lambda x, c=col: x ** c * f(x), pts)
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_ladder_matches_recursion_on_distinct_nodes():
    table = NodeTable(SEGMENT, "chebyshev")
    pts, _ = nodes(table, 7)
    curve = level_curve(SEGMENT, 2.5)
    f = lambda z: 1.0 / (z - 2.0) + z ** 3
    tab = divided_difference_ladder(f, pts, curve, 4)
    assert tab.shape == (7, 4)
    for i in (0, 2, 4, 6):
        for c in range(4):
            want = dd_recursive(lambda x, cc=c: x ** cc * f(x), pts[: i + 1])
            assert tab[i, c] == pytest.approx(want, rel=1e-8, abs=1e-11)


def test_ladder_confluent_taylor_rule():
    # all nodes at 0: row i of column 0 is the Taylor coefficient c_i
    pts = np.zeros(5, dtype=complex)
    curve = level_curve(DISK, 2.0)
    f = lambda z: 1.0 / (z - 2.0)
    tab = divided_difference_ladder(f, pts, curve, 3)
    for i in range(5):
        assert tab[i, 0] == pytest.approx(-(2.0 ** -(i + 1)), rel=1e-11)
    # column c shifts the row index: dd of z^c f over i+1 zeros = c_{i-c}
    for i in range(5):
        for c in (1, 2):
            want = -(2.0 ** -(i - c + 1)) if i >= c else 0.0
            assert tab[i, c] == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_ladder_unsettleable_raises():
    pts = np.zeros(3, dtype=complex)
    curve = level_curve(DISK, 2.0)
    with pytest.raises(QuadratureError):
        divided_difference_ladder(lambda z: 1.0 / (z - (1.0 + 1e-7)), pts, curve, 2)


# --- Laurent coefficients ------------------------------------------------


def test_circle_coefficients_frozen():
    f = lambda z: 2.0 / (z - 1.0) + 3.0 / (z - 1.0) ** 2 + np.cos(z)
    got = circle_coefficients(f, 1.0, (0, 1, 2), 0.5)
    assert got[0] == pytest.approx(math.cos(1.0), abs=1e-11)
    assert got[1] == pytest.approx(2.0, abs=1e-11)
    assert got[2] == pytest.approx(3.0, abs=1e-11)


def test_circle_coefficients_orders_above_the_pole_vanish():
    f = lambda z: 1.0 / (z - 1.0j)
    got = circle_coefficients(f, 1.0j, (1, 2, 3), 0.25)
    assert got[0] == pytest.approx(1.0, abs=1e-11)
    assert abs(got[1]) < 1e-11
    assert abs(got[2]) < 1e-11


# --- nullspace ------------------------------------------------------------


def test_nullspace_recovers_planted_vector():
    rng = np.random.default_rng(2)
    for _ in range(25):
        rows = int(rng.integers(1, 7))
        v0 = rng.standard_normal(rows + 1) + 1j * rng.standard_normal(rows + 1)
        v0 /= np.linalg.norm(v0)
        r = rng.standard_normal((rows, rows + 1)) + 1j * rng.standard_normal(
            (rows, rows + 1)
        )
        m = r - np.outer(r @ v0, v0.conj())
        res = nullspace(m)
        assert abs(np.linalg.norm(res.vector) - 1.0) < 1e-12
        assert abs(abs(np.vdot(res.vector, v0)) - 1.0) < 1e-9
        assert res.sigma_min < 1e-12 * np.linalg.norm(m)
        assert res.sigma_gap >= res.sigma_min - 1e-15


def test_nullspace_phase_is_canonical_and_deterministic():
    rng = np.random.default_rng(9)
    m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    a = nullspace(m)
    b = nullspace(m.copy())
    assert np.array_equal(a.vector, b.vector)
    pivot = np.argmax(np.abs(a.vector))
    assert abs(a.vector[pivot].imag) < 1e-14
    assert a.vector[pivot].real > 0


def test_nullspace_shape_check():
    with pytest.raises(ValueError):
        nullspace(np.zeros((3, 3)))


def test_nullspace_backward_error_is_minimal():
    # no unit vector can do better than sigma_min of the SVD
    rng = np.random.default_rng(4)
    m = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
    res = nullspace(m)
    smin = np.linalg.svd(m, compute_uv=False)[-1]
    assert res.sigma_min <= smin * (1.0 + 1e-12) + 1e-15
    for _ in range(50):
        probe = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        probe /= np.linalg.norm(probe)
        assert np.linalg.norm(m @ probe) >= res.sigma_min * (1.0 - 1e-12)


# --- polynomial roots -----------------------------------------------------


def test_poly_roots_plant_and_recover():
    rng = np.random.default_rng(6)
    done = 0
    while done < 20:
        deg = int(rng.integers(1, 9))
        roots = rng.standard_normal(deg) + 1j * rng.standard_normal(deg)
        if deg > 1:
            sep = min(
                abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :]
            )
            if sep < 0.3:
                continue
        done += 1
        p = ComplexPolynomial.from_roots(roots)
        got = poly_roots(p)
        want = sorted(roots, key=lambda c: (c.real, c.imag))
        assert len(got) == deg
        for g, w in zip(got, want):
            assert abs(g - w) < 1e-9


def test_poly_roots_triple_root():
    p = ComplexPolynomial.from_roots([1.0 + 1.0j] * 3)
    got = poly_roots(p)
    assert len(got) == 3
    for g in got:
        assert abs(g - (1.0 + 1.0j)) < 1e-4


def test_poly_roots_scaling_invariance():
    p = ComplexPolynomial.from_roots([0.5, -1.25, 2.0 + 1.0j])
    a = poly_roots(p)
    b = poly_roots(ComplexPolynomial(5.0j * p.coefficients))
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_poly_roots_degenerate_degrees():
    assert len(poly_roots(ComplexPolynomial([3.0]))) == 0
    got = poly_roots(ComplexPolynomial([-1.5, 1.0]))
    assert len(got) == 1 and got[0] == pytest.approx(1.5, abs=1e-14)
    with pytest.raises(ValueError):
        poly_roots(ComplexPolynomial.zero())


def test_poly_roots_sorted_by_real_then_imag():
    p = ComplexPolynomial.from_roots([1.0 + 1.0j, 1.0 - 1.0j, -2.0])
    got = poly_roots(p)
    keys = [(g.real, g.imag) for g in got]
    assert keys == sorted(keys)
