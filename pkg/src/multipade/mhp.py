"""Simultaneous rational interpolation with a shared denominator.

For a system of d functions and a multi-index m = (m_1, ..., m_d) the
degree-n approximant consists of one denominator Q of degree at most
|m| and numerators P_k of degree at most n - m_k, chosen so that each
(Q f_k - P_k) vanishes to full order against the degree-(n+1) node
polynomial.  The linear conditions on Q are the highest-order divided
differences of Q f_k over the node prefixes; they form an |m| x (|m|+1)
homogeneous system solved by SVD.
"""

import math

import numpy as np

from .errors import CurveSeparationError, NearPoleError
from .funcs import rho_zero
from .geometry import level_curve, nodes
from .numkernel import divided_difference_ladder, nullspace, poly_roots
from .poly import ComplexPolynomial

# Leading-coefficient share below which the monic normalization is
# abandoned (the denominator is then effectively of lower degree).
_MONIC_FLOOR = 1e-3
_DEFLATE_TOL = 1e-7

# Quadrature curves sit at 95% of the first singularity level.  The
# obvious-looking sqrt(rho) midpoint is unusable here: the integrand of
# a divided difference grows like (level/rho)**n relative to its value,
# so any level materially below rho drowns high-n rows in cancellation
# noise long before the geometric signal does.
_CURVE_FRACTION = 0.95
_ENTIRE_LEVEL = 4.0


class MHPResult:
    """Output of one denominator-plus-numerators solve."""

    __slots__ = (
        "n",
        "multi_index",
        "denominator",
        "numerators",
        "normalization",
        "leading_weight",
        "sigma_min",
        "sigma_gap",
        "residuals",
        "degenerate",
        "pole_budget",
    )

    def __init__(
        self,
        n,
        multi_index,
        denominator,
        numerators,
        normalization,
        leading_weight,
        sigma_min,
        sigma_gap,
        residuals,
        degenerate,
        pole_budget=None,
    ):
        self.n = int(n)
        self.multi_index = tuple(multi_index)
        self.denominator = denominator
        self.numerators = list(numerators)
        self.normalization = normalization
        self.leading_weight = float(leading_weight)
        self.sigma_min = float(sigma_min)
        self.sigma_gap = float(sigma_gap)
        self.residuals = [float(r) for r in residuals]
        self.degenerate = bool(degenerate)
        self.pole_budget = pole_budget

    def denominator_roots(self):
        return poly_roots(self.denominator)

    def __repr__(self):
        return "MHPResult(n=%d, multi_index=%r, normalization=%r)" % (
            self.n,
            self.multi_index,
            self.normalization,
        )


def quadrature_level(f, geometry):
    """Curve level used to integrate f's divided differences."""
    rho = rho_zero(f, geometry)
    if math.isinf(rho):
        return _ENTIRE_LEVEL
    level = _CURVE_FRACTION * rho
    if level <= 1.0 + 1e-9:
        raise CurveSeparationError(
            "first singularity level %.6g leaves no room for a quadrature "
            "curve between it and the region" % rho
        )
    return level


def compute_mhp(system, n):
    """Denominator and numerators of the degree-n approximant.

    Args:
        system: a SystemModel.
        n: interpolation degree; needs n >= max(multi_index).

    Returns:
        MHPResult.  The denominator is monic unless the leading
        coefficient carries less than a 1e-3 share of the nullspace
        vector, in which case coefficients are normalized to unit
        absolute sum and the result is flagged degenerate.
    """
    return _solve(
        system.functions,
        system.multi_index,
        system.geometry,
        system.table,
        n,
        pole_budget=None,
    )


def compute_incomplete(f, geometry, table, n, m, m_star):
    """Single-function approximant carrying an assumed pole count.

    The linear system is the one for multi-index (m,); ``m_star`` (the
    number of poles the function is actually credited with, at most m)
    only rides along for rate predictions downstream.
    """
    m = int(m)
    m_star = int(m_star)
    if not 1 <= m_star <= m:
        raise ValueError("need 1 <= m_star <= m")
    return _solve([f], (m,), geometry, table, n, pole_budget=m_star)


def _solve(functions, multi_index, geometry, table, n, pole_budget):
    multi_index = tuple(int(m) for m in multi_index)
    n = int(n)
    if n < max(multi_index):
        raise ValueError("degree n must be at least max(multi_index)")
    total = sum(multi_index)

    points, _ = nodes(table, n + 1)
    tableaus = []
    row_blocks = []
    for k, f in enumerate(functions):
        curve = level_curve(geometry, quadrature_level(f, geometry))
        tab = divided_difference_ladder(f.evaluate, points, curve, total + 1)
        tableaus.append(tab)
        block = tab[n - multi_index[k] + 1 : n + 1].copy()
        scales = np.max(np.abs(block), axis=1)
        scales[scales == 0.0] = 1.0
        row_blocks.append(block / scales[:, None])

    matrix = np.vstack(row_blocks)
    null = nullspace(matrix)
    v = null.vector
    leading_weight = abs(v[-1])
    if leading_weight >= _MONIC_FLOOR:
        q = v / v[-1]
        normalization = "monic"
        degenerate = False
    else:
        q = v / np.sum(np.abs(v))
        normalization = "unit_coefficient_sum"
        degenerate = True
    denominator = ComplexPolynomial(q)

    numerators = []
    for k in range(len(functions)):
        dd = tableaus[k][: n - multi_index[k] + 1] @ q
        p = ComplexPolynomial.zero()
        omega = ComplexPolynomial.one()
        for i, c in enumerate(dd):
            p = p + omega * complex(c)
            omega = omega * ComplexPolynomial([-points[i], 1.0])
        numerators.append(p)

    residuals = [float(np.max(np.abs(block @ v))) for block in row_blocks]
    denominator, numerators = _deflate_common_roots(denominator, numerators)

    return MHPResult(
        n=n,
        multi_index=multi_index,
        denominator=denominator,
        numerators=numerators,
        normalization=normalization,
        leading_weight=leading_weight,
        sigma_min=null.sigma_min,
        sigma_gap=null.sigma_gap,
        residuals=residuals,
        degenerate=degenerate,
        pole_budget=pole_budget,
    )


def _deflate_common_roots(denominator, numerators):
    # A root shared (to tolerance) by the denominator and every
    # numerator is a removable defect; divide it out everywhere.
    while denominator.degree >= 1:
        scales = [max(1.0, p.coeff_norm) for p in numerators]
        shared = None
        for r in poly_roots(denominator):
            if all(
                p.is_zero or abs(p(r)) <= _DEFLATE_TOL * s
                for p, s in zip(numerators, scales)
            ):
                shared = r
                break
        if shared is None:
            break
        denominator = denominator.deflate(shared)
        numerators = [
            p if p.is_zero else p.deflate(shared) for p in numerators
        ]
    return denominator, numerators


def approximant_eval(result, k, z):
    """Value of P_k / Q at z (scalar or array).

    Raises NearPoleError when the denominator is smaller than 1e-13
    times its coefficient norm anywhere on the requested points.
    """
    q = result.denominator
    p = result.numerators[k]
    z_arr = np.asarray(z, dtype=complex)
    qv = q(z_arr)
    floor = 1e-13 * q.coeff_norm
    if np.any(np.abs(qv) <= floor):
        raise NearPoleError(
            "denominator below %.3g in modulus on the evaluation set" % floor
        )
    out = p(z_arr) / qv
    if np.ndim(z) == 0:
        return complex(out)
    return out
