"""Exact base rings: rationals, polynomials in one variable, cyclotomic
field elements, and fraction-free linear algebra over polynomial matrices.

The polynomial variable is called ``k`` throughout (it plays the role of the
surface parameter once polynomials reach the certification layer, but nothing
in this module cares).  Coefficients are `fractions.Fraction`, so every
operation here is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


class KPoly:
    """Dense univariate polynomial over Q.

    Coefficients are stored little-endian (``coeffs[i]`` multiplies ``k^i``)
    with no trailing zeros; the zero polynomial has an empty coefficient
    list and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def const(c):
        return KPoly([Fraction(c)])

    @staticmethod
    def var():
        return KPoly([0, 1])

    @staticmethod
    def zero():
        return KPoly()

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = KPoly.const(other)
        if not isinstance(other, KPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = KPoly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return KPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return KPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = KPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return KPoly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return KPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return KPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = KPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, n):
        """Multiply by k^n."""
        if not self.coeffs:
            return self
        return KPoly((Fraction(0),) * n + self.coeffs)

    def divmod(self, other):
        """Exact quotient/remainder over Q.  `other` must be nonzero."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.coeffs[-1]
        q = [Fraction(0)] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c:
                f = c / lead
                q[i - d] = f
                for j, oc in enumerate(other.coeffs):
                    rem[i - d + j] -= f * oc
        return KPoly(q), KPoly(rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def divexact(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __call__(self, x):
        """Horner evaluation; works for Fraction, int, or ring elements."""
        acc = None
        for c in reversed(self.coeffs):
            if acc is None:
                acc = x * 0 + c if not isinstance(x, (int, Fraction)) else Fraction(c)
            else:
                acc = acc * x + c
        if acc is None:
            return x * 0 if not isinstance(x, (int, Fraction)) else Fraction(0)
        return acc

    def content(self):
        """gcd of numerators over lcm of denominators, as a Fraction > 0."""
        if not self.coeffs:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = math.gcd(num, abs(c.numerator))
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self):
        """Primitive integer-coefficient associate with positive lead."""
        if not self.coeffs:
            return self
        c = self.content()
        if self.coeffs[-1] < 0:
            c = -c
        return self * (1 / c)

    def monic(self):
        if not self.coeffs:
            return self
        return self * (1 / self.coeffs[-1])

    def derivative(self):
        return KPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def int_coeffs(self):
        """Coefficients as ints; raises if any denominator is not 1."""
        out = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise ArithmeticError("non-integer coefficient")
            out.append(c.numerator)
        return out

    def valuation_at(self, root):
        """Largest e with (k - root)^e dividing self; 0 for the zero poly."""
        if self.is_zero():
            return 0
        e = 0
        cur = self
        lin = KPoly([-Fraction(root), 1])
        while True:
            q, r = cur.divmod(lin)
            if not r.is_zero():
                return e
            e += 1
            cur = q

    def __repr__(self):
        return f"KPoly({format_kpoly(self)!r})"


def format_kpoly(p, var="k"):
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            v = var if i == 1 else f"{var}^{i}"
            body = v if mag == 1 else f"{mag}*{v}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def kpoly_gcd(a, b):
    """Monic gcd over Q via the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, a % b
        # keep remainders primitive to tame coefficient growth
        if not b.is_zero():
            b = b.primitive()
    if a.is_zero():
        return a
    return a.monic()


def kpoly_xgcd(a, b):
    """Extended gcd with a single cleared denominator.

    Returns ``(g, h1, h2, clear)`` where ``g`` is the primitive
    positive-lead generator of (a, b) over Q, ``h1`` and ``h2`` have integer
    coefficients, ``clear`` is a positive integer,

        clear * g == h1*a + h2*b,

    and gcd(content(h1), content(h2), clear) == 1.
    """
    if a.is_zero() and b.is_zero():
        raise ValueError("xgcd of two zero polynomials")
    # extended Euclid over Q
    r0, r1 = a, b
    s0, s1 = KPoly.const(1), KPoly.zero()
    t0, t1 = KPoly.zero(), KPoly.const(1)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    # r0 = s0*a + t0*b
    g = r0.primitive()
    scale = g.coeffs[-1] / r0.coeffs[-1] if not r0.is_zero() else Fraction(1)
    u, v = s0 * scale, t0 * scale
    # clear denominators of u, v into one integer
    den = 1
    for c in list(u.coeffs) + list(v.coeffs):
        den = den * c.denominator // math.gcd(den, c.denominator)
    h1, h2 = u * den, v * den
    clear = den
    # strip any common integer factor of (h1, h2, clear)
    com = clear
    for c in list(h1.coeffs) + list(h2.coeffs):
        com = math.gcd(com, abs(c.numerator))
    if com > 1:
        h1 = h1 * Fraction(1, com)
        h2 = h2 * Fraction(1, com)
        clear //= com
    return g, h1, h2, clear


@lru_cache(maxsize=None)
def cyclotomic_poly(m):
    """The m-th cyclotomic polynomial as an integer-coefficient KPoly.

    Computed by exact division of t^m - 1 by the lower-order cyclotomics.
    """
    if m < 1:
        raise ValueError("conductor must be >= 1")
    num = KPoly([-1] + [0] * (m - 1) + [1])
    for d in range(1, m):
        if m % d == 0:
            num = num.divexact(cyclotomic_poly(d))
    return num


def euler_phi(m):
    out = m
    mm = m
    p = 2
    while p * p <= mm:
        if mm % p == 0:
            out -= out // p
            while mm % p == 0:
                mm //= p
        p += 1
    if mm > 1:
        out -= out // mm
    return out


class CycloElem:
    """Element of Q(zeta_m), reduced mod the m-th cyclotomic polynomial.

    `coords` has length phi(m); coordinate i multiplies zeta^i.  The
    conductor is fixed at construction and mixed-conductor arithmetic is
    rejected.
    """

    __slots__ = ("m", "coords")

    def __init__(self, m, coords):
        self.m = m
        phi = euler_phi(m)
        cs = [Fraction(c) for c in coords]
        if len(cs) > phi:
            cs = _cyclo_reduce(m, cs)
        cs += [Fraction(0)] * (phi - len(cs))
        self.coords = tuple(cs)

    @staticmethod
    def zeta(m, power=1):
        """zeta_m^power."""
        power %= m
        coords = [Fraction(0)] * (power + 1)
        coords[power] = Fraction(1)
        return CycloElem(m, coords)

    @staticmethod
    def from_rational(m, c):
        return CycloElem(m, [Fraction(c)])

    def _check(self, other):
        if self.m != other.m:
            raise ValueError("mixed cyclotomic conductors")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloElem.from_rational(self.m, other)
        self._check(other)
        return CycloElem(self.m, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.m, [-a for a in self.coords])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloElem.from_rational(self.m, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.m, [a * other for a in self.coords])
        self._check(other)
        a, b = self.coords, other.coords
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return CycloElem(self.m, _cyclo_reduce(self.m, out))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycloElem.from_rational(self.m, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloElem.from_rational(self.m, other)
        if not isinstance(other, CycloElem):
            return NotImplemented
        return self.m == other.m and self.coords == other.coords

    def __hash__(self):
        return hash((self.m, self.coords))

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ArithmeticError("not a rational element")
        return self.coords[0]

    def inverse(self):
        """Inverse via extended Euclid against the cyclotomic polynomial."""
        if self.is_zero():
            raise ZeroDivisionError("inverting zero cyclotomic element")
        a = KPoly(self.coords)
        mod = cyclotomic_poly(self.m)
        g, h1, _, clear = kpoly_xgcd(a, mod)
        if g.degree != 0:
            raise ArithmeticError("element not invertible (unexpected)")
        # clear*g0 = h1*a + h2*Phi_m, so a^{-1} = h1 / (clear*g0) mod Phi_m
        inv = h1 * (Fraction(1) / (Fraction(clear) * g.coeffs[0]))
        return CycloElem(self.m, list(inv.coeffs))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        self._check(other)
        return self * other.inverse()

    def __repr__(self):
        return f"CycloElem(m={self.m}, {list(self.coords)})"


def _cyclo_reduce(m, coords):
    """Reduce a coefficient list mod the m-th cyclotomic polynomial."""
    mod = cyclotomic_poly(m)
    d = mod.degree
    cs = [Fraction(c) for c in coords]
    for i in range(len(cs) - 1, d - 1, -1):
        c = cs[i]
        if c:
            # subtract c * t^(i-d) * mod
            for j, mc in enumerate(mod.coeffs):
                cs[i - d + j] -= c * mc
        cs.pop()
    return cs


def chebyshev_u(n):
    """Trace-order factor polynomial u_n, as an integer KPoly in x^2.

    Built from the rescaled second-kind recursion U_0(x/2)=1, U_1(x/2)=x,
    U_{j+1}(x/2) = x*U_j(x/2) - U_{j-1}(x/2); odd n takes U_{n-1}(x/2)
    directly and even n takes x*U_{n-1}(x/2), which in both cases is a
    polynomial in x^2.  The returned KPoly is in the variable x^2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    # U_{j}(x/2) as coefficient lists in x
    prev = [1]
    cur = [0, 1]
    for _ in range(n - 2):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    u = prev if n == 1 else cur
    if n % 2 == 0:
        u = [0] + u
    # now u is even in x: coefficients at odd indices vanish
    assert all(c == 0 for c in u[1::2])
    return KPoly(u[0::2])


class PolyMatrix:
    """Dense row-major matrix with KPoly entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        entries = [e if isinstance(e, KPoly) else KPoly.const(e) for e in entries]
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match dimensions")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    def at(self, i, j):
        return self.entries[i * self.cols + j]

    def submatrix(self, row_idx, col_idx):
        ents = [self.at(i, j) for i in row_idx for j in col_idx]
        return PolyMatrix(len(row_idx), len(col_idx), ents)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )


def bareiss_det(mat):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if mat.rows != mat.cols:
        raise ValueError("determinant of a non-square matrix")
    n = mat.rows
    if n == 0:
        return KPoly.const(1)
    m = [[mat.at(i, j) for j in range(n)] for i in range(n)]
    sign = 1
    prev = KPoly.const(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return KPoly.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.divexact(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def naive_det(mat):
    """Cofactor-expansion determinant; test oracle for bareiss_det."""
    if mat.rows != mat.cols:
        raise ValueError("determinant of a non-square matrix")
    n = mat.rows
    if n == 0:
        return KPoly.const(1)
    if n == 1:
        return mat.at(0, 0)
    total = KPoly.zero()
    cols = list(range(1, n))
    for j in range(n):
        minor = mat.submatrix(list(range(1, n)), [c for c in range(n) if c != j])
        term = mat.at(0, j) * naive_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
