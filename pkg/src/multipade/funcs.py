"""Symbolic-enough models of the approximated functions.

A FunctionModel is a finite sum of closed-form terms (rational pieces,
square-root or logarithmic branch terms, scaled exponentials).  Models
know their own singularities: pole locations and orders are derived
from the denominators and then confirmed by small contour integrals, so
cross-term cancellations are detected rather than trusted.

A SystemModel bundles d function models with a multi-index, a geometry
and a node table, and validates that every declared singularity lies
strictly outside the region.
"""

import cmath
import math

import numpy as np

from .errors import (
    BranchCutError,
    SingularityError,
    UnsupportedModelError,
)
from .geometry import phi
from .numkernel import circle_coefficients, poly_roots
from .poly import ComplexPolynomial

_PROXIMITY = 1e-12
_MERGE_TOL = 1e-8
_ORDER_TOL = 1e-10


class Singularity:
    """A declared singular point of a function model."""

    __slots__ = ("location", "kind", "order")

    def __init__(self, location, kind, order=0):
        if kind not in ("pole", "branch_point", "logarithmic"):
            raise ValueError("unknown singularity kind %r" % (kind,))
        self.location = complex(location)
        self.kind = kind
        self.order = int(order)

    def __repr__(self):
        if self.kind == "pole":
            return "Singularity(%r, 'pole', order=%d)" % (self.location, self.order)
        return "Singularity(%r, %r)" % (self.location, self.kind)


class RationalTerm:
    """numerator(z) / denominator(z) with polynomial parts."""

    kind = "rational"
    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator):
        self.numerator = _as_poly(numerator)
        self.denominator = _as_poly(denominator)
        if self.denominator.is_zero:
            raise ValueError("rational term denominator must be nonzero")

    def evaluate(self, z):
        return self.numerator(z) / self.denominator(z)

    def candidate_poles(self):
        roots = poly_roots(self.denominator)
        out = []
        for r in roots:
            for entry in out:
                if abs(r - entry[0]) <= _MERGE_TOL * (1.0 + abs(r)):
                    entry[1] += 1
                    break
            else:
                out.append([r, 1])
        return [(complex(r), int(o)) for r, o in out]


class SqrtBranchTerm:
    """scale * sqrt(branch_at - z) with a steerable cut ray.

    The cut leaves ``branch_at`` along ``cut_direction`` (a unit complex;
    the default +1 reproduces the principal branch, cut toward +real
    infinity).  Off the cut the value squares back to branch_at - z.
    """

    kind = "sqrt_branch"
    __slots__ = ("branch_at", "scale", "cut_direction")

    def __init__(self, branch_at, scale, cut_direction=None):
        self.branch_at = complex(branch_at)
        self.scale = complex(scale)
        self.cut_direction = _unit(cut_direction)

    def evaluate(self, z):
        zeta = self.branch_at - np.asarray(z, dtype=complex)
        alpha = cmath.phase(_effective_cut(self))
        rot = cmath.exp(-1j * alpha)
        return self.scale * cmath.exp(1j * alpha / 2.0) * np.sqrt(zeta * rot)

    def with_cut(self, direction):
        return SqrtBranchTerm(self.branch_at, self.scale, direction)


class LogBranchTerm:
    """scale * log(branch_at - z), cut handled as for sqrt terms."""

    kind = "log_branch"
    __slots__ = ("branch_at", "scale", "cut_direction")

    def __init__(self, branch_at, scale, cut_direction=None):
        self.branch_at = complex(branch_at)
        self.scale = complex(scale)
        self.cut_direction = _unit(cut_direction)

    def evaluate(self, z):
        zeta = self.branch_at - np.asarray(z, dtype=complex)
        alpha = cmath.phase(_effective_cut(self))
        return self.scale * (1j * alpha + np.log(zeta * cmath.exp(-1j * alpha)))

    def with_cut(self, direction):
        return LogBranchTerm(self.branch_at, self.scale, direction)


class EntireExpTerm:
    """scale * exp(z); contributes no singularities."""

    kind = "entire_exp"
    __slots__ = ("scale",)

    def __init__(self, scale):
        self.scale = complex(scale)

    def evaluate(self, z):
        return self.scale * np.exp(np.asarray(z, dtype=complex))


def rational(numerator, denominator):
    return RationalTerm(numerator, denominator)


def sqrt_branch(branch_at, scale=1.0, cut_direction=None):
    return SqrtBranchTerm(branch_at, scale, cut_direction)


def log_branch(branch_at, scale=1.0, cut_direction=None):
    return LogBranchTerm(branch_at, scale, cut_direction)


def entire_exp(scale=1.0):
    return EntireExpTerm(scale)


class FunctionModel:
    """A finite sum of closed-form terms.

    Args:
        terms: list of term objects (see ``rational``, ``sqrt_branch``,
            ``log_branch``, ``entire_exp``).

    Singularities are derived on construction.  Pole orders are taken
    from denominator multiplicities and then confirmed by Laurent
    coefficients on a small circle, so poles cancelled by the numerator
    or by sibling terms are dropped.
    """

    __slots__ = ("terms", "singularities")

    def __init__(self, terms):
        self.terms = list(terms)
        if not self.terms:
            raise ValueError("a function model needs at least one term")
        self.singularities = self._derive_singularities()

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        z_arr = np.asarray(z, dtype=complex)
        self._guard(z_arr)
        total = np.zeros(z_arr.shape, dtype=complex)
        for term in self.terms:
            total = total + term.evaluate(z_arr)
        if np.ndim(z) == 0:
            return complex(total)
        return total

    def _guard(self, z):
        for s in self.singularities:
            if np.any(np.abs(z - s.location) < _PROXIMITY * (1.0 + abs(s.location))):
                raise SingularityError(
                    "evaluation within 1e-12 of the singularity at %r" % (s.location,)
                )
        for term in self.terms:
            if term.kind in ("sqrt_branch", "log_branch"):
                v = z - term.branch_at
                u = _effective_cut(term)
                proj = (v * np.conj(u)).real
                off = np.abs((v * np.conj(u)).imag)
                dist = np.where(proj >= 0.0, off, np.abs(v))
                if np.any(dist < _PROXIMITY * (1.0 + np.abs(v))):
                    raise BranchCutError(
                        "evaluation on the branch cut leaving %r" % (term.branch_at,)
                    )

    def _branch_points(self):
        return [
            t.branch_at
            for t in self.terms
            if t.kind in ("sqrt_branch", "log_branch")
        ]

    def _derive_singularities(self):
        candidates = []
        for term in self.terms:
            if term.kind == "rational":
                for loc, order in term.candidate_poles():
                    for entry in candidates:
                        if abs(loc - entry[0]) <= _MERGE_TOL * (1.0 + abs(loc)):
                            entry[0] = (entry[0] + loc) / 2.0
                            entry[1] = max(entry[1], order)
                            break
                    else:
                        candidates.append([loc, order])
        out = []
        all_locs = [c[0] for c in candidates]
        for loc, bound in candidates:
            radius = self._clear_radius(loc, all_locs)
            if radius < 1e-7:
                raise UnsupportedModelError(
                    "singular structure too close to %r for Laurent analysis"
                    % (loc,)
                )
            coeffs = circle_coefficients(
                self._sum_terms, loc, range(1, bound + 1), radius
            )
            scale = 1.0 + float(np.max(np.abs(coeffs)))
            order = 0
            for t in range(bound, 0, -1):
                if abs(coeffs[t - 1]) > _ORDER_TOL * scale:
                    order = t
                    break
            if order:
                out.append(Singularity(loc, "pole", order))
        kind_map = {"sqrt_branch": "branch_point", "log_branch": "logarithmic"}
        for loc, term_kind, cut, net in self.branch_signatures():
            if net != 0.0:
                out.append(Singularity(loc, kind_map[term_kind]))
        return out

    def _clear_radius(self, center, points):
        center = complex(center)
        dist = 1.0
        for p in points:
            d = abs(complex(p) - center)
            if d > _MERGE_TOL:
                dist = min(dist, d)
        for term in self.terms:
            if term.kind in ("sqrt_branch", "log_branch"):
                v = center - term.branch_at
                u = _effective_cut(term)
                proj = (v * u.conjugate()).real
                d = abs((v * u.conjugate()).imag) if proj >= 0 else abs(v)
                if d > _MERGE_TOL:
                    dist = min(dist, d)
        return 0.4 * dist

    def safe_radius(self, center):
        """Largest small-circle radius clear of other singular structure."""
        return self._clear_radius(center, [s.location for s in self.singularities])

    def _sum_terms(self, z):
        total = np.zeros(np.shape(z), dtype=complex)
        for term in self.terms:
            total = total + term.evaluate(z)
        return total

    def laurent_coefficients(self, center, orders):
        """Coefficients of (z - center)**(-t) for each t in ``orders``."""
        radius = self.safe_radius(center)
        if radius < 1e-7:
            raise UnsupportedModelError(
                "singular structure too close to %r for Laurent analysis" % (center,)
            )
        return circle_coefficients(self._sum_terms, center, orders, radius)

    def branch_signatures(self):
        """(location, term kind, cut direction, net scale) per branch group.

        Terms sharing location, kind and cut can cancel; the net scale
        is zeroed when they do, so a cancelled branch point is not
        reported as a singularity.
        """
        sig = {}
        for term in self.terms:
            if term.kind not in ("sqrt_branch", "log_branch"):
                continue
            cut = _effective_cut(term)
            key = (
                round(term.branch_at.real, 9),
                round(term.branch_at.imag, 9),
                term.kind,
                round(cut.real, 9),
                round(cut.imag, 9),
            )
            loc, kind, u, net, gross = sig.get(
                key, (term.branch_at, term.kind, cut, 0.0 + 0.0j, 0.0)
            )
            sig[key] = (loc, kind, u, net + term.scale, gross + abs(term.scale))
        out = []
        for loc, kind, u, net, gross in sig.values():
            if abs(net) <= 1e-12 * gross:
                net = 0.0 + 0.0j
            out.append((loc, kind, u, net))
        return out


def evaluate(f, z):
    """Evaluate a FunctionModel at scalar or array arguments."""
    return f.evaluate(z)


def rho_zero(f, geometry):
    """Level index of the first singularity; +inf for entire models."""
    levels = [abs(phi(geometry, s.location)) for s in f.singularities]
    return min(levels) if levels else math.inf


def rho_meromorphy(f, geometry, s):
    """Largest level to which f extends with at most s poles inside.

    Walks singularity levels outward: a non-pole singularity stops the
    extension at its own level; poles stop it once their cumulative
    order would exceed the budget ``s``.
    """
    if s < 0:
        raise ValueError("pole budget must be nonnegative")
    events = sorted(
        ((abs(phi(geometry, sg.location)), sg) for sg in f.singularities),
        key=lambda pair: pair[0],
    )
    budget = int(s)
    count = 0
    idx = 0
    while idx < len(events):
        level = events[idx][0]
        group = []
        while idx < len(events) and events[idx][0] <= level * (1.0 + 1e-9):
            group.append(events[idx][1])
            idx += 1
        if any(sg.kind != "pole" for sg in group):
            return level
        count += sum(sg.order for sg in group)
        if count > budget:
            return level
    return math.inf


class SystemModel:
    """d function models sharing a geometry, node table and multi-index.

    Args:
        functions: list of FunctionModel.
        multi_index: list of positive ints, one per function.
        geometry: GeometrySpec on which all models must be analytic.
        table: NodeTable on the same geometry.

    Branch terms without an explicit cut direction get their cut aimed
    radially away from the geometry's center, so quadrature curves and
    canonical domains below the branch level never touch a cut.
    """

    __slots__ = ("functions", "multi_index", "geometry", "table")

    def __init__(self, functions, multi_index, geometry, table):
        multi_index = tuple(int(m) for m in multi_index)
        if len(functions) != len(multi_index):
            raise ValueError("need one multi-index entry per function")
        if not multi_index or any(m < 1 for m in multi_index):
            raise ValueError("multi-index entries must be positive integers")
        if table.geometry is not geometry and (
            table.geometry.kind != geometry.kind
            or table.geometry.params != geometry.params
        ):
            raise ValueError("table and system geometries disagree")
        self.functions = [
            _resolve_cuts(f, geometry.center) for f in functions
        ]
        self.multi_index = multi_index
        self.geometry = geometry
        self.table = table
        for f in self.functions:
            for s in f.singularities:
                level = abs(phi(geometry, s.location))
                if level <= 1.0 + 1e-12:
                    raise UnsupportedModelError(
                        "singularity at %r touches the region (level %.6g)"
                        % (s.location, level)
                    )

    @property
    def total_order(self):
        return sum(self.multi_index)

    def singularity_levels(self, k):
        """(singularity, level) pairs for function k, sorted by level."""
        f = self.functions[k]
        pairs = [
            (s, abs(phi(self.geometry, s.location))) for s in f.singularities
        ]
        pairs.sort(key=lambda p: p[1])
        return pairs


def _resolve_cuts(f, center):
    changed = False
    terms = []
    for term in f.terms:
        if term.kind in ("sqrt_branch", "log_branch") and term.cut_direction is None:
            v = term.branch_at - complex(center)
            if v != 0:
                terms.append(term.with_cut(v / abs(v)))
                changed = True
                continue
        terms.append(term)
    return FunctionModel(terms) if changed else f


def _as_poly(p):
    if isinstance(p, ComplexPolynomial):
        return p
    return ComplexPolynomial(p)


def _unit(direction):
    # None means "not chosen yet": principal cut until a SystemModel
    # re-aims it away from the region center.
    if direction is None:
        return None
    d = complex(direction)
    if d == 0:
        raise ValueError("cut direction must be nonzero")
    return d / abs(d)


def _effective_cut(term):
    return term.cut_direction if term.cut_direction is not None else 1.0 + 0.0j
