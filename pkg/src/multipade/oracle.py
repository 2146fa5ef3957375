"""Ground truth for the denominator: forced poles, radii and rate.

Works for functions that are sums of rational terms plus at most one
branch term.  Everything reduces to finite linear algebra over the
combination weights (p_1, ..., p_d), deg p_k < m_k: a point ξ carries
system order s when some combination keeps a pole of exact order s at ξ
while staying analytic on a neighborhood of the closed level domain
through ξ.  Analyticity requirements translate to annihilation rows
(Laurent principal coefficients at other poles, identity rows for
branch coefficients); "exact order s is reachable" is the rank test
rank([A; row_s]) > rank(A).
"""

import math

import numpy as np

from .errors import (
    DegenerateSystemError,
    IncompletePoleCountError,
    UnsupportedModelError,
)
from .geometry import phi
from .poly import ComplexPolynomial

_RANK_TOL = 1e-7
_ZERO_ROW = 1e-9
# Closed-domain semantics: a singularity exactly on the critical level
# still obstructs; only levels beyond an absolute 1e-9 slack do not.
_LEVEL_SLACK = 1e-9
_COINCIDE = 1e-8
_SEPARATION = 1e-6


class SystemPoleSet:
    """Poles forced on the denominator, with optional radius data.

    ``poles`` is a list of (location, order).  ``per_pole`` and
    ``per_function`` stay empty until ``r_values`` fills them.
    """

    __slots__ = ("poles", "Q_mf", "per_pole", "per_function", "target_order")

    def __init__(self, poles, Q_mf, target_order, per_pole=None, per_function=None):
        self.poles = [(complex(loc), int(order)) for loc, order in poles]
        self.Q_mf = Q_mf
        self.target_order = int(target_order)
        self.per_pole = dict(per_pole) if per_pole else {}
        self.per_function = dict(per_function) if per_function else {}

    @property
    def total_order(self):
        return sum(order for _, order in self.poles)

    def __repr__(self):
        return "SystemPoleSet(poles=%r)" % (self.poles,)


class _Workspace:
    """Merged pole clusters, branch groups and cached Laurent data."""

    def __init__(self, system):
        self.system = system
        self.geometry = system.geometry
        self.m = system.multi_index
        self.offsets = np.concatenate([[0], np.cumsum(self.m)])
        self.width = int(self.offsets[-1])
        self._validate_class()
        self.clusters = self._cluster_poles()
        self.branches = self._group_branches()
        self._laurent = {}

    def _validate_class(self):
        for f in self.system.functions:
            branch_terms = 0
            for term in f.terms:
                if term.kind in ("sqrt_branch", "log_branch"):
                    branch_terms += 1
                elif term.kind != "rational":
                    raise UnsupportedModelError(
                        "pole accounting only supports rational terms plus "
                        "at most one branch term per function; got %r" % term.kind
                    )
            if branch_terms > 1:
                raise UnsupportedModelError(
                    "pole accounting only supports one branch term per function"
                )

    def _cluster_poles(self):
        clusters = []
        for k, f in enumerate(self.system.functions):
            for s in f.singularities:
                if s.kind != "pole":
                    continue
                for c in clusters:
                    if abs(s.location - c["location"]) <= _COINCIDE * (
                        1.0 + abs(s.location)
                    ):
                        c["orders"][k] = s.order
                        break
                else:
                    clusters.append(
                        {"location": s.location, "orders": {k: s.order}}
                    )
        for i, a in enumerate(clusters):
            for b in clusters[i + 1 :]:
                gap = abs(a["location"] - b["location"])
                if gap < _SEPARATION * (1.0 + abs(a["location"])):
                    raise UnsupportedModelError(
                        "pole locations %r and %r are neither coincident nor "
                        "separated by 1e-6" % (a["location"], b["location"])
                    )
        for c in clusters:
            c["level"] = abs(phi(self.geometry, c["location"]))
            c["maxord"] = max(c["orders"].values())
        clusters.sort(key=lambda c: (c["location"].real, c["location"].imag))
        return clusters

    def _group_branches(self):
        groups = []
        for k, f in enumerate(self.system.functions):
            for loc, kind, cut, net in f.branch_signatures():
                if net == 0.0:
                    continue
                for g in groups:
                    if (
                        g["kind"] == kind
                        and abs(g["location"] - loc) <= _COINCIDE
                        and abs(g["cut"] - cut) <= 1e-9
                    ):
                        g["scales"][k] = g["scales"].get(k, 0.0) + net
                        break
                else:
                    groups.append(
                        {
                            "location": loc,
                            "kind": kind,
                            "cut": cut,
                            "scales": {k: net},
                        }
                    )
        for g in groups:
            g["level"] = abs(phi(self.geometry, g["location"]))
            for c in self.clusters:
                if abs(g["location"] - c["location"]) < _SEPARATION * (
                    1.0 + abs(c["location"])
                ):
                    raise UnsupportedModelError(
                        "branch point %r sits on top of a pole location; "
                        "Laurent analysis cannot separate them" % (g["location"],)
                    )
        return groups

    def laurent(self, k, ci):
        key = (k, ci)
        if key not in self._laurent:
            cluster = self.clusters[ci]
            order = cluster["orders"].get(k, 0)
            if order == 0:
                self._laurent[key] = np.zeros(0, dtype=complex)
            else:
                self._laurent[key] = np.asarray(
                    self.system.functions[k].laurent_coefficients(
                        cluster["location"], range(1, order + 1)
                    ),
                    dtype=complex,
                )
        return self._laurent[key]

    def pole_row(self, ci, t):
        """Row reading the combination's (z-xi)^(-t) coefficient.

        Returns (row, magnitude_row); the latter is the same sum over
        absolute values, used to recognize numerically-zero rows at the
        model's own scale.
        """
        cluster = self.clusters[ci]
        xi = cluster["location"]
        row = np.zeros(self.width, dtype=complex)
        mag = np.zeros(self.width, dtype=float)
        for k, order in cluster["orders"].items():
            a = self.laurent(k, ci)
            off = int(self.offsets[k])
            for u in range(self.m[k]):
                val = 0.0 + 0.0j
                bound = 0.0
                for i in range(u + 1):
                    if t + i > order:
                        break
                    w = math.comb(u, i) * xi ** (u - i)
                    val += w * a[t + i - 1]
                    bound += abs(w) * abs(a[t + i - 1])
                row[off + u] = val
                mag[off + u] = bound
        return row, mag

    def pole_obstruction_rows(self, ci):
        return [self.pole_row(ci, t) for t in range(1, self.clusters[ci]["maxord"] + 1)]

    def branch_obstruction_rows(self, bi):
        group = self.branches[bi]
        rows = []
        top = max(self.m[k] for k in group["scales"])
        for u in range(top):
            row = np.zeros(self.width, dtype=complex)
            mag = np.zeros(self.width, dtype=float)
            hit = False
            for k, scale in group["scales"].items():
                if u < self.m[k]:
                    row[int(self.offsets[k]) + u] = scale
                    mag[int(self.offsets[k]) + u] = abs(scale)
                    hit = True
            if hit:
                rows.append((row, mag))
        return rows

    def obstruction_items(self):
        """All (level, rows-thunk) obstructions, sorted by level."""
        items = []
        for ci in range(len(self.clusters)):
            items.append(
                (self.clusters[ci]["level"], "pole", ci)
            )
        for bi in range(len(self.branches)):
            items.append((self.branches[bi]["level"], "branch", bi))
        items.sort(key=lambda it: it[0])
        return items

    def item_rows(self, item):
        _, kind, idx = item
        if kind == "pole":
            return self.pole_obstruction_rows(idx)
        return self.branch_obstruction_rows(idx)


def _clean(rows):
    out = []
    for row, mag in rows:
        top = float(np.max(np.abs(row)))
        scale = 1.0 + float(np.max(mag))
        if top > _ZERO_ROW * scale:
            out.append(row / top)
    return out


def _rank(rows):
    if not rows:
        return 0
    sv = np.linalg.svd(np.array(rows), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > _RANK_TOL * sv[0]))


def _feasible(constraint_rows, target_row):
    row, mag = target_row
    top = float(np.max(np.abs(row)))
    if top <= _ZERO_ROW * (1.0 + float(np.max(mag))):
        return False
    base = _clean(constraint_rows)
    return _rank(base + [row / top]) > _rank(base)


def _base_rows(ws, level, exclude_ci):
    rows = []
    for item in ws.obstruction_items():
        if item[1] == "pole" and item[2] == exclude_ci:
            continue
        if item[0] <= level + _LEVEL_SLACK:
            rows.extend(ws.item_rows(item))
    return rows


def _cap_rows(ws, ci, s):
    maxord = ws.clusters[ci]["maxord"]
    return [ws.pole_row(ci, t) for t in range(s + 1, maxord + 1)]


def system_poles(system):
    """Locations and orders every admissible denominator must carry.

    Candidates are the declared pole locations (merged across the
    functions).  A candidate gets order τ = the longest run s = 1, 2,
    ... for which a combination with a pole of exact order s there
    stays analytic on the closed level domain through the candidate.
    """
    ws = _Workspace(system)
    poles = []
    for ci, cluster in enumerate(ws.clusters):
        base = _base_rows(ws, cluster["level"], ci)
        tau = 0
        for s in range(1, cluster["maxord"] + 1):
            rows = base + _cap_rows(ws, ci, s)
            if not _feasible(rows, ws.pole_row(ci, s)):
                break
            tau = s
        if tau > 0:
            poles.append((cluster["location"], tau))
    total = sum(order for _, order in poles)
    if total > ws.width:
        raise DegenerateSystemError(
            "pole-order accounting exceeded the multi-index size"
        )
    roots = []
    for loc, order in poles:
        roots.extend([loc] * order)
    q_mf = ComplexPolynomial.from_roots(roots) if roots else ComplexPolynomial.one()
    return SystemPoleSet(poles, q_mf, target_order=ws.width)


def r_values(pole_set, system):
    """Fill the radius data of a pole set computed by system_poles.

    For each credited order s at each pole, walks the remaining
    obstructions outward and records the first level whose annihilation
    constraints make exact order s unreachable; the minimum over orders
    up to s gives the per-order radius, and per-function radii follow
    by capping at the first non-captured singularity.
    """
    ws = _Workspace(system)
    per_pole = {}
    for loc, tau in pole_set.poles:
        ci = _find_cluster(ws, loc)
        level = ws.clusters[ci]["level"]
        rho = []
        for s in range(1, tau + 1):
            base = _base_rows(ws, level, ci) + _cap_rows(ws, ci, s)
            target = ws.pole_row(ci, s)
            rho.append(_walk_out(ws, ci, level, base, target))
        r_xi_s = [min(rho[: s + 1]) for s in range(tau)]
        per_pole[loc] = {"R_xi_s": r_xi_s, "R_xi": r_xi_s[-1]}

    credited = {loc: tau for loc, tau in pole_set.poles}
    per_function = {}
    for k in range(len(system.functions)):
        r_k = math.inf
        declared = []
        for sing, lvl in system.singularity_levels(k):
            if sing.kind == "pole":
                declared.append((sing.location, sing.order, lvl))
                tau = _credit_at(credited, sing.location)
                if tau >= sing.order:
                    continue
            r_k = lvl
            break
        caps = [r_k]
        for loc, order, lvl in declared:
            tau = _credit_at(credited, loc)
            if 1 <= order <= tau:
                key = _pole_key(per_pole, loc)
                caps.append(per_pole[key]["R_xi_s"][order - 1])
        poles_in = [
            (loc, order) for loc, order, lvl in declared if lvl < r_k
        ]
        per_function[k] = {
            "R_k": r_k,
            "R_k_star": min(caps),
            "poles_in_Dk": poles_in,
        }
    return SystemPoleSet(
        pole_set.poles,
        pole_set.Q_mf,
        pole_set.target_order,
        per_pole=per_pole,
        per_function=per_function,
    )


def _walk_out(ws, ci, level, base, target):
    items = [
        it
        for it in ws.obstruction_items()
        if it[0] > level + _LEVEL_SLACK
        and not (it[1] == "pole" and it[2] == ci)
    ]
    rows = list(base)
    idx = 0
    while idx < len(items):
        group_level = items[idx][0]
        added = []
        while idx < len(items) and items[idx][0] <= group_level + _LEVEL_SLACK:
            added.extend(ws.item_rows(items[idx]))
            idx += 1
        if not _feasible(rows + added, target):
            return group_level
        rows.extend(added)
    return math.inf


def _find_cluster(ws, loc):
    for ci, cluster in enumerate(ws.clusters):
        if abs(cluster["location"] - loc) <= _COINCIDE * (1.0 + abs(loc)):
            return ci
    raise ValueError("location %r is not a declared pole" % (loc,))


def _credit_at(credited, loc):
    for cloc, tau in credited.items():
        if abs(cloc - loc) <= _COINCIDE * (1.0 + abs(loc)):
            return tau
    return 0


def _pole_key(per_pole, loc):
    for key in per_pole:
        if abs(key - loc) <= _COINCIDE * (1.0 + abs(loc)):
            return key
    raise KeyError(loc)


def predicted_theta(pole_set, geometry):
    """Geometric denominator rate implied by a filled pole set."""
    if pole_set.total_order < pole_set.target_order:
        raise IncompletePoleCountError(
            "only %d of %d pole orders are forced; the rate statement "
            "does not apply" % (pole_set.total_order, pole_set.target_order)
        )
    if not pole_set.per_pole:
        raise ValueError("pole set has no radius data; run r_values first")
    theta = 0.0
    for loc, _ in pole_set.poles:
        r_xi = pole_set.per_pole[_pole_key(pole_set.per_pole, loc)]["R_xi"]
        if math.isinf(r_xi):
            continue
        theta = max(theta, abs(phi(geometry, loc)) / r_xi)
    return theta


def polynomial_independence(system):
    """Whether no nontrivial weighted combination collapses to a polynomial.

    The matrix stacks every Laurent-annihilation row at every pole and
    every branch-coefficient identity row; a nontrivial kernel means
    some combination has no singular part at all, i.e. is a polynomial.
    """
    ws = _Workspace(system)
    rows = []
    for ci in range(len(ws.clusters)):
        rows.extend(ws.pole_obstruction_rows(ci))
    for bi in range(len(ws.branches)):
        rows.extend(ws.branch_obstruction_rows(bi))
    cleaned = _clean(rows)
    return _rank(cleaned) == ws.width
