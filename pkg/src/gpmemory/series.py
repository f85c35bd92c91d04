"""Truncated power series in one variable.

Coefficients may be :class:`fractions.Fraction` (exact arithmetic) or floats;
operations never mix in floats unless the inputs already contain them.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number


class TruncatedSeries:
    """``c[0] + c[1] w + ... + c[n-1] w**(n-1) + O(w**n)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise ValueError("a series needs at least one coefficient")

    @property
    def order(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries({list(self.coeffs)!r})"

    def __getitem__(self, i):
        return self.coeffs[i]

    def __eq__(self, other):
        return isinstance(other, TruncatedSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if isinstance(other, Number):
            return TruncatedSeries((self.coeffs[0] + other,) + self.coeffs[1:])
        n = min(self.order, other.order)
        return TruncatedSeries(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return TruncatedSeries(c * other for c in self.coeffs)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return TruncatedSeries(sum(a[k] * b[i - k] for k in range(i + 1)) for i in range(n))

    __rmul__ = __mul__

    def reciprocal(self):
        """``1/s``; requires a non-zero constant term."""
        s = self.coeffs
        if s[0] == 0:
            raise ZeroDivisionError("series has zero constant term")
        inv0 = 1 / s[0] if not isinstance(s[0], int) else Fraction(1, s[0])
        q = [inv0]
        for n in range(1, self.order):
            q.append(-inv0 * sum(s[k] * q[n - k] for k in range(1, n + 1)))
        return TruncatedSeries(q)

    def sqrt(self):
        """Principal square root; the constant term must be 1 for exact inputs."""
        s = self.coeffs
        if s[0] == 1:
            r0 = s[0]
        elif isinstance(s[0], (Fraction, int)):
            raise ValueError("exact square root needs constant term 1; normalise first")
        else:
            if s[0] <= 0:
                raise ValueError("constant term must be positive")
            r0 = s[0] ** 0.5
        r = [r0]
        for n in range(1, self.order):
            acc = sum(r[k] * r[n - k] for k in range(1, n))
            r.append((s[n] - acc) / (2 * r0))
        return TruncatedSeries(r)
