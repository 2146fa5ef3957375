"""Measurement side: run row sequences and fit geometric rates.

Everything here turns limsup statements into finite-window slope fits:
least squares on the log-error sequence, with the first three entries
dropped as transient and entries at the numerical floor excluded.  The
fitted rate is exp(slope); the fit residual (RMS in natural log) is
kept so downstream checks can tell geometric decay from algebraic.
"""

import math

import numpy as np

from .errors import FitWindowError, InteriorPointError, NearPoleError
from .geometry import level_curve, nodes, node_poly_values, phi
from .mhp import (
    approximant_eval,
    compute_incomplete,
    compute_mhp,
    quadrature_level,
)
from .numkernel import contour_integral, poly_roots
from .poly import ComplexPolynomial

_TRANSIENT = 3
_MIN_FIT_POINTS = 5
_Q_ERROR_FLOOR = 1e-13
# Approximant sup-errors bottom out near the quadrature tolerance, two
# decades above the coefficient-norm floor.
_APPROX_FLOOR = 1e-11
_EXACT_CEILING = 1e-8
_DECAY_RATE_LIMIT = 0.9
_DECAY_RESIDUAL_LIMIT = 0.15


class FitResult:
    __slots__ = ("rate", "window", "residual", "count")

    def __init__(self, rate, window, residual, count):
        self.rate = float(rate)
        self.window = window
        self.residual = float(residual)
        self.count = int(count)

    def __repr__(self):
        return "FitResult(rate=%.6g, window=%r, residual=%.3g)" % (
            self.rate,
            self.window,
            self.residual,
        )


def fit_rate(n_values, errors, floor=_Q_ERROR_FLOOR, transient=_TRANSIENT):
    """Least-squares geometric rate of an error sequence.

    Entries in the first ``transient`` positions, below ``floor``, or
    non-finite are excluded.  Needs at least five surviving points.
    """
    xs = []
    ys = []
    for i, (n, err) in enumerate(zip(n_values, errors)):
        if i < transient:
            continue
        if not np.isfinite(err) or err <= floor:
            continue
        xs.append(float(n))
        ys.append(math.log(err))
    if len(xs) < _MIN_FIT_POINTS:
        raise FitWindowError(
            "only %d usable points above the floor; need %d"
            % (len(xs), _MIN_FIT_POINTS)
        )
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    rms = float(np.sqrt(np.mean(resid * resid)))
    return FitResult(math.exp(slope), (int(xs[0]), int(xs[-1])), rms, len(xs))


class ConvergenceReport:
    """Everything measured along one row sequence."""

    __slots__ = (
        "n_values",
        "q_errors",
        "sigma_history",
        "pole_tracks",
        "fitted_theta",
        "fit_window",
        "fit_residual",
        "exact",
        "reference",
        "predicted_theta",
        "approx_errors",
        "derivative_rates",
        "results",
    )

    def __init__(
        self,
        n_values,
        q_errors,
        sigma_history,
        pole_tracks,
        fitted_theta,
        fit_window,
        fit_residual,
        exact,
        reference,
        predicted_theta=None,
        approx_errors=None,
        derivative_rates=None,
        results=None,
    ):
        self.n_values = list(n_values)
        self.q_errors = [float(e) for e in q_errors]
        self.sigma_history = [(float(a), float(b)) for a, b in sigma_history]
        self.pole_tracks = list(pole_tracks)
        self.fitted_theta = fitted_theta
        self.fit_window = fit_window
        self.fit_residual = fit_residual
        self.exact = bool(exact)
        self.reference = reference
        self.predicted_theta = predicted_theta
        self.approx_errors = dict(approx_errors) if approx_errors else {}
        self.derivative_rates = list(derivative_rates) if derivative_rates else []
        # raw per-n solver output; not serialized
        self.results = list(results) if results else []

    def to_dict(self):
        return {
            "n_values": [int(n) for n in self.n_values],
            "q_errors": self.q_errors,
            "sigma_history": [[a, b] for a, b in self.sigma_history],
            "pole_tracks": [
                {
                    "reference": _c(t["reference"]),
                    "locations": [_c(loc) for loc in t["locations"]],
                    "deviations": t["deviations"],
                    "dispersion": t["dispersion"],
                }
                for t in self.pole_tracks
            ],
            "fitted_theta": self.fitted_theta,
            "fit_window": list(self.fit_window) if self.fit_window else None,
            "fit_residual": self.fit_residual,
            "exact": self.exact,
            "reference": [_c(c) for c in self.reference.coefficients],
            "predicted_theta": self.predicted_theta,
            "approx_errors": self.approx_errors,
            "derivative_rates": self.derivative_rates,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            n_values=data["n_values"],
            q_errors=data["q_errors"],
            sigma_history=[tuple(pair) for pair in data["sigma_history"]],
            pole_tracks=[
                {
                    "reference": _unc(t["reference"]),
                    "locations": [_unc(loc) for loc in t["locations"]],
                    "deviations": list(t["deviations"]),
                    "dispersion": t["dispersion"],
                }
                for t in data["pole_tracks"]
            ],
            fitted_theta=data["fitted_theta"],
            fit_window=tuple(data["fit_window"]) if data["fit_window"] else None,
            fit_residual=data["fit_residual"],
            exact=data["exact"],
            reference=ComplexPolynomial([_unc(c) for c in data["reference"]]),
            predicted_theta=data["predicted_theta"],
            approx_errors=data["approx_errors"],
            derivative_rates=data["derivative_rates"],
        )


def _c(value):
    if value is None:
        return None
    value = complex(value)
    return [value.real, value.imag]


def _unc(value):
    if value is None:
        return None
    return complex(value[0], value[1])


def run_row_sequence(system, n_lo, n_hi, q_ref=None):
    """Solve for every n in [n_lo, n_hi] and measure denominator decay.

    Args:
        system: SystemModel.
        n_lo, n_hi: inclusive degree range; n_lo must be at least |m|.
        q_ref: monic reference denominator.  None means self-consistent
            mode: the final-n monic denominator becomes the reference
            (used to probe whether denominators stabilize at all).

    Returns:
        ConvergenceReport.  fitted_theta is 0 with the ``exact`` flag
        when every error sits at the floor; otherwise it comes from the
        log-error slope fit.
    """
    n_lo = int(n_lo)
    n_hi = int(n_hi)
    if n_lo < system.total_order:
        raise ValueError("n_lo must be at least the multi-index size")
    if n_hi < n_lo:
        raise ValueError("empty degree range")
    n_values = list(range(n_lo, n_hi + 1))
    results = [compute_mhp(system, n) for n in n_values]
    if q_ref is None:
        q_ref = results[-1].denominator.monic_normalize()

    q_errors = []
    for res in results:
        den = res.denominator
        if den.is_zero:
            q_errors.append(math.inf)
        else:
            q_errors.append((den.monic_normalize() - q_ref).coeff_norm)

    sigma_history = [(res.sigma_min, res.sigma_gap) for res in results]
    root_lists = [
        poly_roots(res.denominator) if res.denominator.degree >= 1 else []
        for res in results
    ]
    tracks = _track_roots(root_lists)
    refs = poly_roots(q_ref) if q_ref.degree >= 1 else []
    pole_tracks = [_finish_track(t, len(n_values), refs) for t in tracks]

    exact = all(e <= _EXACT_CEILING for e in q_errors)
    if exact:
        fitted, window, residual = 0.0, None, 0.0
    else:
        fit = fit_rate(n_values, q_errors)
        fitted, window, residual = fit.rate, fit.window, fit.residual

    return ConvergenceReport(
        n_values=n_values,
        q_errors=q_errors,
        sigma_history=sigma_history,
        pole_tracks=pole_tracks,
        fitted_theta=fitted,
        fit_window=window,
        fit_residual=residual,
        exact=exact,
        reference=q_ref,
        results=results,
    )


def geometric_decay_test(report):
    """Whether the q_errors sequence shows clean geometric decay.

    Fails when the fitted rate is 0.9 or worse, or when the log-fit
    residual exceeds 0.15 (algebraic decay bends the log plot).
    """
    if report.exact:
        return True
    if report.fitted_theta is None:
        return False
    return (
        report.fitted_theta < _DECAY_RATE_LIMIT
        and report.fit_residual <= _DECAY_RESIDUAL_LIMIT
    )


def _track_roots(root_lists):
    tracks = []
    for step, roots in enumerate(root_lists):
        candidates = []
        for ti, t in enumerate(tracks):
            if len(t["locations"]) != step or t["locations"][-1] is None:
                continue
            for j in range(len(roots)):
                candidates.append((abs(t["locations"][-1] - roots[j]), ti, j))
        candidates.sort()
        taken_tracks = set()
        taken_roots = set()
        for dist, ti, j in candidates:
            if ti in taken_tracks or j in taken_roots:
                continue
            tracks[ti]["locations"].append(complex(roots[j]))
            taken_tracks.add(ti)
            taken_roots.add(j)
        for t in tracks:
            if len(t["locations"]) == step:
                t["locations"].append(None)
        for j in range(len(roots)):
            if j not in taken_roots:
                tracks.append({"locations": [None] * step + [complex(roots[j])]})
    return tracks


def _finish_track(track, length, refs):
    locs = track["locations"]
    locs += [None] * (length - len(locs))
    known = [loc for loc in locs if loc is not None]
    reference = None
    if refs is not None and len(refs) and known:
        reference = complex(min(refs, key=lambda r: abs(r - known[-1])))
    deviations = [
        (abs(loc - reference) if loc is not None and reference is not None else None)
        for loc in locs
    ]
    tail = [loc for loc in locs[_TRANSIENT:] if loc is not None]
    dispersion = 0.0
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            dispersion = max(dispersion, abs(tail[i] - tail[j]))
    return {
        "reference": reference,
        "locations": locs,
        "deviations": deviations,
        "dispersion": dispersion,
    }


def track_convergence(n_values, track, target):
    """Deviation sequence of one root track against a fixed target.

    Returns (deviations, FitResult or None); the fit is None when too
    few points clear the floor for a slope.
    """
    target = complex(target)
    deviations = [
        (abs(loc - target) if loc is not None else math.nan)
        for loc in track["locations"]
    ]
    try:
        fit = fit_rate(n_values, deviations)
    except FitWindowError:
        fit = None
    return deviations, fit


def estimate_rho0(f, geometry, table, n_hi):
    """First-singularity level recovered from node-functional decay.

    Integrates f against the reciprocal node polynomials on a fixed
    curve and inverts the fitted log-magnitude slope through the
    capacity constant.  Integrals that sink below ten times their own
    quadrature error estimate are unresolved and dropped; three
    consecutive unresolved entries end the scan.  Returns +inf when the
    second-half rate beats the first-half rate by more than 1.5x (the
    decay is accelerating, so no geometric level exists in the window).
    """
    n_hi = int(n_hi)
    if n_hi < 10:
        raise ValueError("need n_hi >= 10 for a stable slope")
    curve = level_curve(geometry, quadrature_level(f, geometry))
    pairs = []
    misses = 0
    for n in range(n_hi + 1):
        points, _ = nodes(table, n + 1)

        def integrand(t, pts=points):
            return f.evaluate(t) / node_poly_values(pts, t)

        res = contour_integral(integrand, curve)
        value = abs(res.value)
        if value <= 10.0 * res.est_error:
            misses += 1
            if misses >= 3:
                break
            continue
        misses = 0
        pairs.append((n, value))

    n_values = [n for n, _ in pairs]
    values = [v for _, v in pairs]
    cap = geometry.map_cap
    half = _TRANSIENT + (len(pairs) - _TRANSIENT) // 2
    try:
        fit_head = fit_rate(n_values[:half], values[:half], floor=0.0)
        fit_tail = fit_rate(n_values[half:], values[half:], floor=0.0, transient=0)
    except FitWindowError:
        return 1.0 / (cap * fit_rate(n_values, values, floor=0.0).rate)
    if fit_tail.rate < fit_head.rate / 1.5:
        return math.inf
    return 1.0 / (cap * fit_tail.rate)


def probe_points(probe, geometry, exclude=()):
    """Concrete evaluation points for a compact-set descriptor.

    ``probe`` is a dict with ``kind`` one of grid_in_e, level_curve,
    disk_grid.  Points within 1e-3 of any location in ``exclude`` are
    dropped.
    """
    kind = probe["kind"]
    if kind == "grid_in_e":
        count = int(probe.get("count", 100))
        pts = _grid_in_e(geometry, count)
    elif kind == "level_curve":
        rho = float(probe["rho"])
        count = int(probe.get("count", 64))
        curve = level_curve(geometry, rho, min_samples=count)
        pts = curve.samples[:: max(1, curve.count // count)]
    elif kind == "disk_grid":
        center = complex(probe["center"])
        radius = float(probe["radius"])
        step = float(probe["step"])
        ticks = np.arange(-radius, radius + step / 2, step)
        grid = center + ticks[:, None] + 1j * ticks[None, :]
        pts = grid.ravel()
        pts = pts[np.abs(pts - center) <= radius + 1e-12]
    else:
        raise ValueError("unknown probe kind %r" % (kind,))
    pts = np.asarray(pts, dtype=complex)
    for loc in exclude:
        pts = pts[np.abs(pts - complex(loc)) > 1e-3]
    return pts


def _grid_in_e(geometry, count):
    if geometry.kind == "segment":
        a = complex(geometry.params["a"])
        b = complex(geometry.params["b"])
        t = np.linspace(0.0, 1.0, count)
        return a + (b - a) * t
    rings = max(1, int(round(math.sqrt(count / 2))))
    per_ring = max(1, count // rings)
    out = []
    for i in range(rings):
        r = math.sqrt((i + 0.5) / rings)
        for j in range(per_ring):
            ang = 2.0 * math.pi * (j + 0.5 * (i % 2)) / per_ring
            out.append(r * complex(math.cos(ang), math.sin(ang)))
    w = np.asarray(out, dtype=complex)
    if geometry.kind == "disk":
        return geometry.center + geometry.params["radius"] * w
    rot = np.exp(1j * geometry.params["rotation"])
    scaled = (
        geometry.params["semi_major"] * w.real
        + 1j * geometry.params["semi_minor"] * w.imag
    )
    return geometry.center + rot * scaled


def approximant_error_scan(system, report, k, probe):
    """Sup error of the k-th approximant over a probe set, per n.

    Returns a dict with the per-n errors, the fitted rate, and the
    probe's sup of |phi| (clamped below at 1 so interior probes compare
    against the inside-the-region rule).  The dict is also stored on
    the report under a deterministic label.
    """
    ref_roots = poly_roots(report.reference) if report.reference.degree >= 1 else []
    pts = probe_points(probe, system.geometry, exclude=())
    if pts.size == 0:
        raise ValueError("probe produced no points")
    for root in ref_roots:
        if np.any(np.abs(pts - root) <= 1e-3):
            raise NearPoleError(
                "probe point within 1e-3 of the reference pole at %r" % (root,)
            )
    truth = system.functions[k].evaluate(pts)
    errors = []
    for res in report.results:
        try:
            approx = approximant_eval(res, k, pts)
            errors.append(float(np.max(np.abs(approx - truth))))
        except NearPoleError:
            errors.append(math.inf)

    phi_sup = 1.0
    for pt in pts:
        try:
            phi_sup = max(phi_sup, abs(phi(system.geometry, complex(pt))))
        except InteriorPointError:
            pass

    at_floor = all(e <= _APPROX_FLOOR for e in errors if np.isfinite(e))
    if at_floor:
        fitted, window, residual = 0.0, None, 0.0
    else:
        fit = fit_rate(report.n_values, errors, floor=_APPROX_FLOOR)
        fitted, window, residual = fit.rate, fit.window, fit.residual

    entry = {
        "probe": _probe_label(probe),
        "function": int(k),
        "errors": errors,
        "fitted_rate": fitted,
        "window": list(window) if window else None,
        "residual": residual,
        "phi_sup": phi_sup,
    }
    report.approx_errors[_probe_label(probe) + ":f%d" % k] = entry
    return entry


def _probe_label(probe):
    kind = probe["kind"]
    if kind == "grid_in_e":
        return "grid_in_e"
    if kind == "level_curve":
        return "level_curve_%g" % float(probe["rho"])
    return "disk_grid_%g" % float(probe["radius"])


def derivative_rate_check(system, report, xi, max_j):
    """Fitted growth rates of denominator derivatives at a forced pole.

    For each derivative order j up to max_j, fits |Q_n^(j)(xi)|^(1/n)
    and reports the running maximum over orders 0..j.
    """
    xi = complex(xi)
    max_j = int(max_j)
    rates = []
    sequences = []
    peaks = []
    for j in range(max_j + 1):
        seq = []
        for res in report.results:
            den = res.denominator
            if den.is_zero:
                seq.append(math.inf)
            else:
                seq.append(abs(den.monic_normalize().derivative(j)(xi)))
        finite = [v for i, v in enumerate(seq) if np.isfinite(v) and i >= _TRANSIENT]
        peaks.append(max(finite) if finite else math.inf)
        sequences.append(seq)
        if all(v <= _Q_ERROR_FLOOR for v in seq if np.isfinite(v)):
            rates.append(0.0)
        else:
            rates.append(fit_rate(report.n_values, seq).rate)
    running = []
    top = 0.0
    for r in rates:
        top = max(top, r)
        running.append(top)
    entry = {
        "xi": _c(xi),
        "rates": rates,
        "running_max": running,
        "sequences": sequences,
        "peaks": peaks,
    }
    report.derivative_rates.append(entry)
    return entry


def run_incomplete_sequence(f, geometry, table, n_lo, n_hi, m, m_star):
    """Row sequence of single-function approximants with a pole budget.

    Returns (n_values, results, tracks) where tracks carry the
    denominator-root trajectories (reference-free).
    """
    n_lo = int(n_lo)
    n_hi = int(n_hi)
    if n_lo < int(m):
        raise ValueError("n_lo must be at least m")
    n_values = list(range(n_lo, n_hi + 1))
    results = [
        compute_incomplete(f, geometry, table, n, m, m_star) for n in n_values
    ]
    root_lists = [
        poly_roots(res.denominator) if res.denominator.degree >= 1 else []
        for res in results
    ]
    tracks = [
        _finish_track(t, len(n_values), None) for t in _track_roots(root_lists)
    ]
    return n_values, results, tracks
