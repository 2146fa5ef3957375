"""Compact sets, exterior conformal maps, level curves, and node tables.

Every supported region (disk, segment, ellipse) has an inverse exterior
map of the Joukowski form

    psi(w) = center + cap * w + d / w,        |w| > 1,

with cap the logarithmic capacity (real, positive) and d a complex
coefficient carrying eccentricity and rotation.  The forward map phi
solves the resulting quadratic and picks the root of larger modulus,
which is the exterior branch; no explicit branch-cut bookkeeping is
needed.  phi(z)/z -> 1/cap as z -> infinity for all three shapes.
"""

import math

import numpy as np

from .errors import InteriorPointError, UnitDiskError
from .poly import ComplexPolynomial

_BOUNDARY_TOL = 1e-12


class GeometrySpec:
    """A compact region E with connected complement.

    Use the ``disk``, ``segment`` and ``ellipse`` class methods; the
    constructor is internal.  ``center`` is the conformal center,
    ``map_cap`` and ``map_d`` the coefficients of psi above.
    """

    __slots__ = ("kind", "center", "map_cap", "map_d", "params")

    def __init__(self, kind, center, map_cap, map_d, params):
        self.kind = kind
        self.center = complex(center)
        self.map_cap = float(map_cap)
        self.map_d = complex(map_d)
        self.params = params

    @classmethod
    def disk(cls, center, radius):
        radius = float(radius)
        if radius <= 0:
            raise ValueError("disk radius must be positive")
        return cls("disk", center, radius, 0.0, {"radius": radius})

    @classmethod
    def segment(cls, a, b):
        a, b = complex(a), complex(b)
        if a == b:
            raise ValueError("segment endpoints must be distinct")
        direction = (b - a) / abs(b - a)
        cap = abs(b - a) / 4.0
        return cls(
            "segment",
            (a + b) / 2.0,
            cap,
            cap * direction * direction,
            {"a": a, "b": b},
        )

    @classmethod
    def ellipse(cls, center, semi_major, semi_minor, rotation=0.0):
        semi_major = float(semi_major)
        semi_minor = float(semi_minor)
        if not semi_major >= semi_minor > 0:
            raise ValueError("require semi_major >= semi_minor > 0")
        rot = np.exp(2j * float(rotation))
        return cls(
            "ellipse",
            center,
            (semi_major + semi_minor) / 2.0,
            (semi_major - semi_minor) / 2.0 * rot,
            {
                "semi_major": semi_major,
                "semi_minor": semi_minor,
                "rotation": float(rotation),
            },
        )

    def __repr__(self):
        return "GeometrySpec(%r, %r)" % (self.kind, self.params)


def capacity_constant(geometry):
    """Logarithmic capacity of the region (positive real)."""
    return geometry.map_cap


def _exterior_root(geometry, z):
    """Solve cap*w**2 - (z - center)*w + d = 0 for the larger-|w| root."""
    zeta = np.asarray(z, dtype=complex) - geometry.center
    cap, d = geometry.map_cap, geometry.map_d
    s = np.sqrt(zeta * zeta - 4.0 * cap * d)
    # add s with the sign that avoids cancellation, then recover the
    # companion root from the product w1*w2 = d/cap
    plus = zeta + s
    minus = zeta - s
    num = np.where(np.abs(plus) >= np.abs(minus), plus, minus)
    w1 = num / (2.0 * cap)
    with np.errstate(divide="ignore", invalid="ignore"):
        w2 = np.where(w1 != 0, (d / cap) / np.where(w1 != 0, w1, 1.0), 0.0)
    return np.where(np.abs(w1) >= np.abs(w2), w1, w2)


def phi(geometry, z):
    """Exterior conformal map onto {|w| > 1}, boundary to |w| = 1.

    Args:
        geometry: GeometrySpec.
        z: complex scalar or array, outside the open interior of E.

    Raises:
        InteriorPointError: if any point lies strictly inside E.
    """
    w = _exterior_root(geometry, z)
    if np.any(np.abs(w) < 1.0 - _BOUNDARY_TOL):
        raise InteriorPointError(
            "point lies inside the region; the exterior map is undefined there"
        )
    if np.ndim(z) == 0:
        return complex(w)
    return w


def contains_interior(geometry, z):
    """True where z lies strictly inside E (always False for segments)."""
    w = _exterior_root(geometry, z)
    return np.abs(w) < 1.0 - _BOUNDARY_TOL


def psi(geometry, w):
    """Inverse of phi, defined for |w| strictly greater than 1.

    Raises:
        UnitDiskError: if any |w| <= 1.
    """
    w_arr = np.asarray(w, dtype=complex)
    if np.any(np.abs(w_arr) <= 1.0):
        raise UnitDiskError("psi requires |w| > 1")
    out = geometry.center + geometry.map_cap * w_arr + geometry.map_d / w_arr
    if np.ndim(w) == 0:
        return complex(out)
    return out


def psi_derivative(geometry, w):
    """d psi / d w, used by contour quadrature."""
    w = np.asarray(w, dtype=complex)
    return geometry.map_cap - geometry.map_d / (w * w)


class LevelCurve:
    """Discretized level curve {z : |phi(z)| = rho}, rho > 1.

    Samples are psi(rho * exp(2*pi*i*j/count)) for j = 0..count-1,
    counterclockwise.  ``count`` is 16 times a power of two so that
    quadrature can reuse every sample when it doubles.
    """

    __slots__ = ("geometry", "rho", "samples", "count")

    def __init__(self, geometry, rho, samples, count):
        self.geometry = geometry
        self.rho = rho
        self.samples = samples
        self.count = count

    def parameter_points(self, count=None):
        """Unit-circle parameters rho*e^(i*theta) on an equispaced grid."""
        if count is None:
            count = self.count
        theta = 2.0 * np.pi * np.arange(count) / count
        return self.rho * np.exp(1j * theta)


def level_curve(geometry, rho, min_samples=256):
    """Sample the level curve of index rho counterclockwise.

    Args:
        geometry: GeometrySpec.
        rho: level index, must exceed 1.
        min_samples: minimum number of samples; the actual count is the
            smallest 16 * 2**k not below this.
    """
    rho = float(rho)
    if rho <= 1.0:
        raise ValueError("level curve index must exceed 1")
    count = 16
    while count < max(int(min_samples), 16):
        count *= 2
    w = rho * np.exp(2j * np.pi * np.arange(count) / count)
    return LevelCurve(geometry, rho, psi(geometry, w), count)


class NodeTable:
    """Triangular interpolation-node scheme attached to a geometry.

    Supported schemes, each with a provable strong node asymptotic
    (node polynomials behave like cap**n * phi**n with a nonzero limit
    ratio):

      * ``repeated_point``: the disk's conformal center repeated n times;
      * ``chebyshev``: Chebyshev zeros, segments only;
      * ``fejer``: boundary images of roots of unity, disks only.

    Row ordering is fixed per scheme so results are deterministic.
    """

    __slots__ = ("geometry", "scheme", "point")

    def __init__(self, geometry, scheme, point=None):
        if scheme not in ("repeated_point", "chebyshev", "fejer"):
            raise ValueError("unknown node scheme %r" % (scheme,))
        if scheme == "repeated_point":
            if geometry.kind != "disk":
                raise ValueError(
                    "repeated_point nodes keep the required asymptotic only "
                    "at a disk's center"
                )
            point = geometry.center if point is None else complex(point)
            scale = 1.0 + abs(geometry.center)
            if abs(point - geometry.center) > 1e-12 * scale:
                raise ValueError(
                    "repeated_point must coincide with the disk center"
                )
        elif scheme == "chebyshev":
            if geometry.kind != "segment":
                raise ValueError("chebyshev nodes require a segment")
            point = None
        else:
            if geometry.kind != "disk":
                raise ValueError("fejer nodes require a disk")
            point = None
        self.geometry = geometry
        self.scheme = scheme
        self.point = point

    def __repr__(self):
        return "NodeTable(%r, %r)" % (self.geometry.kind, self.scheme)


def nodes(table, n):
    """Row n of the table: n nodes and the monic node polynomial.

    Returns:
        (points, node_poly): ndarray of n complex nodes, and the monic
        ComplexPolynomial with exactly those zeros.
    """
    if n < 1:
        raise ValueError("node row index must be at least 1")
    g = table.geometry
    if table.scheme == "repeated_point":
        pts = np.full(n, table.point, dtype=complex)
    elif table.scheme == "chebyshev":
        a, b = g.params["a"], g.params["b"]
        k = np.arange(1, n + 1)
        t = np.cos((2 * k - 1) * np.pi / (2 * n))
        pts = (a + b) / 2.0 + (b - a) / 2.0 * t
    else:
        radius = g.params["radius"]
        pts = g.center + radius * np.exp(2j * np.pi * np.arange(n) / n)
    return pts, ComplexPolynomial.from_roots(pts)


def node_poly_values(points, z):
    """Evaluate prod (z - point) directly from the roots (stable form)."""
    z = np.asarray(z, dtype=complex)
    acc = np.ones(z.shape, dtype=complex)
    for p in points:
        acc = acc * (z - p)
    return acc


def equilibrium_potential(geometry, z, samples=4096):
    """Green's function of the complement with pole at infinity.

    Computed from the equilibrium measure, which for these regions is
    the boundary image of the uniform measure on the unit circle:

        g(z) = mean_theta log|z - psi(e^(i*theta))| - log(capacity).

    Independent of phi up to the shared psi boundary values; used as a
    cross-check oracle for log|phi|.
    """
    theta = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
    w = np.exp(1j * theta)
    boundary = geometry.center + geometry.map_cap * w + geometry.map_d / w
    vals = np.log(np.abs(np.asarray(z, dtype=complex)[..., None] - boundary))
    return vals.mean(axis=-1) - math.log(geometry.map_cap)
