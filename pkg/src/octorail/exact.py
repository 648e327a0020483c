"""Exact arithmetic over the field Q(sqrt2).

Splitter-network transfer matrices, stabilizer row combinations and the
teleported-gate constraint solver all live in Z[1/2, sqrt(2)], so identities
that the rest of the package asserts "exactly" are checked with these types
instead of floats.
"""

from __future__ import annotations

from fractions import Fraction

_SQRT2 = 2 ** 0.5


class ExactCoeff:
    """Element a + b*sqrt(2) with rational a, b.

    The normal form a / 2^(k/2) (integer a, k >= 0) used in printed matrices
    is a special case: one of the two components is zero and the denominator
    is a power of two.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def from_half_power(cls, numer, k):
        """Exact value numer / 2^(k/2) with integer numer and k >= 0."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        if k % 2 == 0:
            return cls(Fraction(numer, 2 ** (k // 2)))
        # 1/2^(k/2) = sqrt(2) / 2^((k+1)/2)
        return cls(0, Fraction(numer, 2 ** ((k + 1) // 2)))

    def as_half_power(self):
        """Inverse of from_half_power; returns (numer, k) or None if the
        value is not of that form."""
        if self.a and self.b:
            return None
        comp, odd = (self.a, 0) if not self.b else (self.b, 1)
        den = comp.denominator
        if den & (den - 1):  # not a power of two
            return None
        # even case: a = numer/2^(k/2) with k = 2*log2(den)
        # odd case:  b*sqrt2 = numer/2^(k/2) with k = 2*log2(den) - 1
        k = 2 * (den.bit_length() - 1) - odd
        numer = comp.numerator
        if k < 0:  # integer multiple of sqrt2: n*sqrt2 = 2n/2^(1/2)
            return (2 * numer, 1)
        return (numer, k)

    # -- field operations -------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ExactCoeff):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactCoeff(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactCoeff(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return ExactCoeff(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactCoeff(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactCoeff(self.a * o.a + 2 * self.b * o.b,
                          self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self):
        # 1/(a + b*sqrt2) = (a - b*sqrt2)/(a^2 - 2 b^2)
        norm = self.a * self.a - 2 * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        return ExactCoeff(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * _SQRT2

    def is_rational(self):
        return self.b == 0

    def __repr__(self):
        if not self.b:
            return f"ExactCoeff({self.a})"
        if not self.a:
            return f"ExactCoeff({self.b}*sqrt2)"
        return f"ExactCoeff({self.a} + {self.b}*sqrt2)"


SQRT2 = ExactCoeff(0, 1)
HALF_SQRT2 = ExactCoeff(0, Fraction(1, 2))  # 1/sqrt(2)
ZERO = ExactCoeff(0)
ONE = ExactCoeff(1)


class ExactMatrix:
    """Dense matrix over Q(sqrt2)."""

    def __init__(self, rows):
        self.rows = [[e if isinstance(e, ExactCoeff) else ExactCoeff(e)
                      for e in row] for row in rows]
        self.shape = (len(self.rows), len(self.rows[0]) if self.rows else 0)
        if any(len(r) != self.shape[1] for r in self.rows):
            raise ValueError("ragged rows")

    @classmethod
    def identity(cls, n):
        return cls([[ONE if i == j else ZERO for j in range(n)]
                    for i in range(n)])

    @classmethod
    def zeros(cls, n, m):
        return cls([[ZERO] * m for _ in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other):
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(n):
            ri = self.rows[i]
            out.append([sum((ri[t] * other.rows[t][j] for t in range(k)),
                            ZERO) for j in range(m)])
        return ExactMatrix(out)

    def __add__(self, other):
        return ExactMatrix([[a + b for a, b in zip(r1, r2)]
                            for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return ExactMatrix([[a - b for a, b in zip(r1, r2)]
                            for r1, r2 in zip(self.rows, other.rows)])

    def __mul__(self, scalar):
        return ExactMatrix([[e * scalar for e in row] for row in self.rows])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def transpose(self):
        return ExactMatrix(list(map(list, zip(*self.rows))))

    def to_float(self):
        import numpy as np
        return np.array([[float(e) for e in row] for row in self.rows])

    def __repr__(self):
        return f"ExactMatrix({self.rows!r})"


def solve_exact(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    """Solve A @ X = B by Gaussian elimination over Q(sqrt2).

    Raises ValueError if A is singular.
    """
    n, n2 = A.shape
    if n != n2 or B.shape[0] != n:
        raise ValueError("bad shapes")
    aug = [list(ra) + list(rb) for ra, rb in zip(A.rows, B.rows)]
    m = B.shape[1]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [e * inv for e in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [er - f * ec for er, ec in zip(aug[r], aug[col])]
    return ExactMatrix([row[n:n + m] for row in aug])
