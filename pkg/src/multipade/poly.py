"""Dense complex polynomials in the monomial basis.

Coefficients are stored ascending (index i multiplies z**i).  Trailing
zero coefficients are trimmed exactly: only coefficients that compare
equal to 0.0 are dropped, so nothing is rounded away.  The zero
polynomial keeps a single [0] coefficient and reports degree -inf.
"""

import math

import numpy as np


class ComplexPolynomial:
    """A polynomial with complex coefficients.

    Args:
        coefficients: iterable of complex, ascending powers.  Trailing
            exact zeros are removed on construction.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        c = np.atleast_1d(np.asarray(coefficients, dtype=complex))
        if c.ndim != 1:
            raise ValueError("coefficient array must be one-dimensional")
        last = c.size
        while last > 1 and c[last - 1] == 0:
            last -= 1
        self.coefficients = c[:last].copy()

    @classmethod
    def zero(cls):
        return cls([0.0])

    @classmethod
    def one(cls):
        return cls([1.0])

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        """Monic-by-default polynomial with the given roots."""
        c = np.array([complex(leading)])
        for r in roots:
            c = np.convolve(c, np.array([-complex(r), 1.0]))
        return cls(c)

    @property
    def degree(self):
        """Degree as an int; -inf for the zero polynomial."""
        if self.coefficients.size == 1 and self.coefficients[0] == 0:
            return -math.inf
        return self.coefficients.size - 1

    @property
    def is_zero(self):
        return self.coefficients.size == 1 and self.coefficients[0] == 0

    @property
    def leading(self):
        return complex(self.coefficients[-1])

    def __call__(self, z):
        """Horner evaluation; accepts scalars or numpy arrays."""
        z = np.asarray(z, dtype=complex)
        acc = np.full(z.shape, self.coefficients[-1], dtype=complex)
        for ck in self.coefficients[-2::-1]:
            acc = acc * z + ck
        if z.ndim == 0:
            return complex(acc)
        return acc

    def derivative(self, order=1):
        c = self.coefficients
        for _ in range(order):
            if c.size == 1:
                c = np.array([0.0 + 0.0j])
                break
            c = c[1:] * np.arange(1, c.size)
        return ComplexPolynomial(c)

    def monic_normalize(self):
        """Divide by the leading coefficient.  Errors on the zero polynomial."""
        if self.is_zero:
            raise ZeroDivisionError("cannot normalize the zero polynomial")
        return ComplexPolynomial(self.coefficients / self.coefficients[-1])

    @property
    def coeff_norm(self):
        """Sum of absolute coefficient values."""
        return float(np.sum(np.abs(self.coefficients)))

    def padded(self, size):
        """Ascending coefficients padded with zeros up to ``size`` entries."""
        out = np.zeros(size, dtype=complex)
        out[: self.coefficients.size] = self.coefficients
        return out

    def __add__(self, other):
        other = _coerce(other)
        size = max(self.coefficients.size, other.coefficients.size)
        return ComplexPolynomial(self.padded(size) + other.padded(size))

    def __sub__(self, other):
        other = _coerce(other)
        size = max(self.coefficients.size, other.coefficients.size)
        return ComplexPolynomial(self.padded(size) - other.padded(size))

    def __mul__(self, other):
        if np.isscalar(other) or isinstance(other, complex):
            return ComplexPolynomial(self.coefficients * complex(other))
        other = _coerce(other)
        return ComplexPolynomial(
            np.convolve(self.coefficients, other.coefficients)
        )

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexPolynomial(-self.coefficients)

    def deflate(self, root):
        """Synthetic division by (z - root); the remainder is discarded."""
        c = self.coefficients
        if c.size == 1:
            return ComplexPolynomial([0.0])
        out = np.empty(c.size - 1, dtype=complex)
        acc = c[-1]
        for i in range(c.size - 2, -1, -1):
            out[i] = acc
            acc = c[i] + acc * root
        return ComplexPolynomial(out)

    def divide(self, other):
        """Long division: returns (quotient, remainder)."""
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = self.coefficients.copy()
        dn = other.coefficients
        if rem.size < dn.size:
            return ComplexPolynomial.zero(), ComplexPolynomial(rem)
        quo = np.zeros(rem.size - dn.size + 1, dtype=complex)
        for i in range(quo.size - 1, -1, -1):
            quo[i] = rem[i + dn.size - 1] / dn[-1]
            rem[i : i + dn.size] -= quo[i] * dn
        return ComplexPolynomial(quo), ComplexPolynomial(rem[: dn.size - 1] if dn.size > 1 else [0.0])

    def __eq__(self, other):
        if not isinstance(other, ComplexPolynomial):
            return NotImplemented
        return (
            self.coefficients.size == other.coefficients.size
            and bool(np.all(self.coefficients == other.coefficients))
        )

    def __hash__(self):
        return hash(tuple(self.coefficients.tolist()))

    def __repr__(self):
        return "ComplexPolynomial(%s)" % (self.coefficients.tolist(),)


def _coerce(value):
    if isinstance(value, ComplexPolynomial):
        return value
    return ComplexPolynomial(value)
