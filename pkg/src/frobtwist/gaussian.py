"""Exact Gaussian rationals a + b*i built on fractions.Fraction.

Central functions and all series bookkeeping use these so that identity
checks (projection formula, reciprocity, base change) are equality tests,
never tolerance tests. Conversion to floats happens only at the rendering
edge (density evaluation, JSON emission).
"""

from fractions import Fraction


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational((self.re * other.re + self.im * other.im) / n,
                                (self.im * other.re - self.re * other.im) / n)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self):
        """|z|^2 as an exact Fraction."""
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        if self.im == 0:
            return "GaussianRational(%s)" % (self.re,)
        return "GaussianRational(%s, %s)" % (self.re, self.im)

    def to_quad(self):
        """Serialization: [num, den, inum, iden] as decimal strings."""
        return [str(self.re.numerator), str(self.re.denominator),
                str(self.im.numerator), str(self.im.denominator)]

    @classmethod
    def from_quad(cls, quad):
        return cls(Fraction(int(quad[0]), int(quad[1])),
                   Fraction(int(quad[2]), int(quad[3])))


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    raise TypeError("cannot mix GaussianRational with %r" % type(x).__name__)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
