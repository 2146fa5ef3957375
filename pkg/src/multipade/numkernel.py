"""Contour quadrature, interpolation-condition rows, nullspaces, roots.

All quadrature here is the periodic trapezoid rule in the level-curve
parameter, which converges geometrically for integrands analytic in an
annulus around the curve.  Sample counts double until the result is
stable, so every routine is deterministic for a given input.
"""

import numpy as np

from .errors import QuadratureError, RootSolveError
from .geometry import psi_derivative
from .poly import ComplexPolynomial

_EPS = np.finfo(float).eps
_SAMPLE_CAP = 2 ** 16


class QuadratureResult:
    """Value of a contour integral plus convergence diagnostics."""

    __slots__ = ("value", "est_error", "samples_used")

    def __init__(self, value, est_error, samples_used):
        self.value = value
        self.est_error = est_error
        self.samples_used = samples_used

    def __repr__(self):
        return "QuadratureResult(value=%r, est_error=%.3e, samples_used=%d)" % (
            self.value,
            self.est_error,
            self.samples_used,
        )


def _curve_terms(curve, count):
    """Sample points and d z / d theta weights on an equispaced grid."""
    w = curve.parameter_points(count)
    z = curve.geometry.center + curve.geometry.map_cap * w + curve.geometry.map_d / w
    return z, psi_derivative(curve.geometry, w) * 1j * w


def contour_integral(integrand, curve, rel_tol=1e-12):
    """Integrate ``integrand`` once around a level curve.

    Args:
        integrand: callable accepting a complex ndarray of points on the
            curve and returning values of the same shape.
        curve: LevelCurve; its sample count is the starting resolution.
        rel_tol: doubling stops once the change is below this, relative
            to the value (with an absolute roundoff floor).

    Returns:
        QuadratureResult.

    Raises:
        QuadratureError: sample cap reached with the estimated error
            still above 10 * rel_tol * |value|.
    """
    count = min(curve.count, _SAMPLE_CAP // 2)
    z, dz = _curve_terms(curve, count)
    terms = np.asarray(integrand(z), dtype=complex) * dz
    value = 2.0 * np.pi * np.mean(terms)
    floor = 64.0 * _EPS * 2.0 * np.pi * float(np.mean(np.abs(terms)))
    est = np.inf
    while count < _SAMPLE_CAP:
        count *= 2
        z, dz = _curve_terms(curve, count)
        terms = np.asarray(integrand(z), dtype=complex) * dz
        new_value = 2.0 * np.pi * np.mean(terms)
        floor = 64.0 * _EPS * 2.0 * np.pi * float(np.mean(np.abs(terms)))
        est = abs(new_value - value)
        value = new_value
        if est <= max(rel_tol * abs(value), floor):
            return QuadratureResult(value, est, count)
    # negated form so a nan value (singular sample) also lands here
    if not est <= 10.0 * rel_tol * max(abs(value), floor):
        raise QuadratureError(
            "contour integral did not settle within %d samples" % count,
            value=value,
            est_error=est,
            samples_used=count,
        )
    return QuadratureResult(value, est, count)


def condition_row(f, row_nodes, curve, col_degree, rel_tol=1e-12):
    """Newton-coefficient functional of t**col_degree * f(t).

    Computes (1/2*pi*i) * integral of t**col * f(t) / prod(t - node)
    over the curve, i.e. the divided difference of z**col * f over the
    given nodes.  The curve must enclose every node and stay strictly
    inside the holomorphy domain of f; confluent (repeated) nodes need
    no special casing.
    """
    row_nodes = np.asarray(row_nodes, dtype=complex)

    def integrand(t):
        denom = np.ones_like(t)
        for a in row_nodes:
            denom = denom * (t - a)
        return t ** col_degree * np.asarray(f(t), dtype=complex) / denom

    res = contour_integral(integrand, curve, rel_tol)
    return res.value / (2j * np.pi)


def divided_difference_ladder(f, row_nodes, curve, n_cols, rel_tol=1e-13):
    """All Newton-coefficient functionals for one function at once.

    Returns a (len(row_nodes), n_cols) array whose (i, c) entry is the
    divided difference of z**c * f over the first i+1 nodes.  A single
    adaptive quadrature pass serves the whole tableau; entry (i, c)
    counts as settled when its change is below rel_tol relative to the
    entry or below a per-row roundoff floor.

    Raises:
        QuadratureError: sample cap reached with unsettled entries.
    """
    row_nodes = np.asarray(row_nodes, dtype=complex)
    n_rows = row_nodes.size

    def tableau(count):
        z, dz = _curve_terms(curve, count)
        base = np.asarray(f(z), dtype=complex) * dz / (2j * np.pi) * (2.0 * np.pi / count)
        powers = z[:, None] ** np.arange(n_cols)[None, :]
        out = np.empty((n_rows, n_cols), dtype=complex)
        # sum of term magnitudes = cancellation scale; roundoff noise in
        # each entry cannot fall below eps times this, so the settle
        # floor must track it rather than the (possibly tiny) entry
        mags = np.empty((n_rows, n_cols))
        denom = np.ones_like(z)
        abs_powers = np.abs(powers)
        for i in range(n_rows):
            denom = denom * (z - row_nodes[i])
            terms = base / denom
            out[i] = terms @ powers
            mags[i] = np.abs(terms) @ abs_powers
        return out, mags

    count = min(curve.count, _SAMPLE_CAP // 2)
    prev, _ = tableau(count)
    worst = np.inf
    while count < _SAMPLE_CAP:
        count *= 2
        cur, mags = tableau(count)
        delta = np.abs(cur - prev)
        ok = delta <= np.maximum(rel_tol * np.abs(cur), 64.0 * _EPS * mags)
        worst = float(np.max(delta))
        prev = cur
        if np.all(ok):
            return cur
    raise QuadratureError(
        "condition tableau did not settle within %d samples" % count,
        value=None,
        est_error=worst,
        samples_used=count,
    )


def circle_coefficients(f, center, orders, radius, rel_tol=1e-11):
    """Laurent coefficients of f around ``center`` on a small circle.

    ``orders`` lists the powers t of (z - center)**(-t) wanted; positive
    t picks principal-part coefficients, t <= 0 picks Taylor ones.
    """
    orders = np.asarray(list(orders), dtype=int)

    def values(count):
        theta = 2.0 * np.pi * np.arange(count) / count
        ring = np.exp(1j * theta)
        fv = np.asarray(f(center + radius * ring), dtype=complex)
        out = np.empty(orders.size, dtype=complex)
        mags = np.empty(orders.size)
        mean_mag = float(np.mean(np.abs(fv)))
        for k, t in enumerate(orders):
            out[k] = radius ** t * np.mean(fv * np.exp(1j * t * theta))
            mags[k] = radius ** t * mean_mag
        return out, mags

    count = 512
    prev, _ = values(count)
    while count < _SAMPLE_CAP:
        count *= 2
        cur, mags = values(count)
        floors = np.maximum(rel_tol * np.abs(cur), 64.0 * _EPS * mags)
        if np.all(np.abs(cur - prev) <= floors):
            return cur
        prev = cur
    raise QuadratureError(
        "Laurent coefficients did not settle", samples_used=count
    )


class NullspaceResult:
    """Unit minimizer of |M v| with conditioning diagnostics.

    ``sigma_min`` is the achieved |M v| (backward-error level for an
    underdetermined system); ``sigma_gap`` is the second-smallest
    singular value of the column problem, i.e. the smallest nontrivial
    one, whose size measures how far the nullspace is from having a
    second dimension.
    """

    __slots__ = ("vector", "sigma_min", "sigma_gap")

    def __init__(self, vector, sigma_min, sigma_gap):
        self.vector = vector
        self.sigma_min = sigma_min
        self.sigma_gap = sigma_gap


def nullspace(matrix):
    """Right-nullspace direction of a rows x (rows+1) complex matrix.

    The returned vector has unit Euclidean norm and a canonical phase
    (its largest entry is real positive) so repeated runs agree exactly.
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    rows, cols = m.shape
    if rows + 1 != cols:
        raise ValueError("matrix must have exactly one more column than rows")
    _, s, vh = np.linalg.svd(m)
    v = vh[-1].conj()
    pivot = int(np.argmax(np.abs(v)))
    phase = v[pivot] / abs(v[pivot])
    v = v * phase.conjugate()
    sigma_min = float(np.linalg.norm(m @ v))
    sigma_gap = float(s[-1]) if s.size else 0.0
    return NullspaceResult(v, sigma_min, sigma_gap)


def poly_roots(p, max_sweeps=500, tol=1e-13, cluster_tol=1e-7):
    """All roots of a polynomial, by Aberth-Ehrlich simultaneous iteration.

    Args:
        p: ComplexPolynomial or ascending coefficient sequence.
        max_sweeps: iteration cap before RootSolveError.
        tol: per-root relative correction target.
        cluster_tol: roots closer than this (relative) are averaged into
            one location reported with multiplicity.

    Returns:
        ndarray of roots with multiplicity, sorted by (real, imag).
    """
    if not isinstance(p, ComplexPolynomial):
        p = ComplexPolynomial(p)
    if p.is_zero:
        raise ValueError("the zero polynomial has no well-defined roots")
    coeffs = p.coefficients
    deg = coeffs.size - 1
    if deg == 0:
        return np.empty(0, dtype=complex)
    monic = coeffs / coeffs[-1]
    dcoeffs = monic[1:] * np.arange(1, deg + 1)

    # perturbed-circle initial guesses inside the Cauchy bound
    bound = 1.0 + float(np.max(np.abs(monic[:-1])))
    angles = 2.0 * np.pi * (np.arange(deg) + 0.35) / deg + 0.4 / deg
    z = bound * (1.0 + 0.01 * np.sin(3.7 * np.arange(deg))) * np.exp(1j * angles)

    def horner(c, x):
        acc = np.full(x.shape, c[-1], dtype=complex)
        for ck in c[-2::-1]:
            acc = acc * x + ck
        return acc

    active = np.ones(deg, dtype=bool)
    for _ in range(max_sweeps):
        pv = horner(monic, z)
        dv = horner(dcoeffs, z)
        # attainable-accuracy scale of p at each iterate
        mag = horner(np.abs(monic), np.abs(z)).real
        newly_done = np.abs(pv) <= 32.0 * _EPS * mag
        active &= ~newly_done
        if not np.any(active):
            break
        ratio = np.where(dv != 0, pv / np.where(dv != 0, dv, 1.0), 0.1 + 0.1j)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        if np.any(np.abs(diff[~np.eye(deg, dtype=bool)]) < 1e-300):
            z = z + 1e-8 * (1.0 + np.abs(z)) * np.exp(1j * np.arange(deg))
            continue
        sums = np.sum(1.0 / diff, axis=1) - 1.0
        denom = 1.0 - ratio * sums
        step = np.where(np.abs(denom) > 1e-300, ratio / np.where(denom != 0, denom, 1.0), ratio)
        z = np.where(active, z - step, z)
        small = np.abs(step) <= tol * (1.0 + np.abs(z))
        active &= ~small
        if not np.any(active):
            break
    else:
        raise RootSolveError(
            "root iteration did not converge in %d sweeps" % max_sweeps,
            best=np.sort_complex(z),
        )

    # merge numerically coincident roots and report cluster means
    order = np.lexsort((z.imag, z.real))
    z = z[order]
    merged = []
    used = np.zeros(deg, dtype=bool)
    for i in range(deg):
        if used[i]:
            continue
        group = [z[i]]
        used[i] = True
        for j in range(i + 1, deg):
            if not used[j] and abs(z[j] - z[i]) <= cluster_tol * (1.0 + abs(z[i])):
                group.append(z[j])
                used[j] = True
        merged.extend([np.mean(group)] * len(group))
    out = np.array(merged, dtype=complex)
    order = np.lexsort((out.imag, out.real))
    return out[order]
