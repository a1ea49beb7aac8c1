"""Trivariate reduction calculus for sums over Markoff-surface orbits.

Polynomials in x, y, z over either Q[k] (k symbolic) or F_p with k fixed are
rewritten by three kinds of degree-lowering steps:

* a three-variable monomial absorbs one factor of each variable against the
  surface relation:  x^l y^m z^n  ->  x^(l-1) y^(m-1) z^(n-1) (x^2+y^2+z^2-k);
* a two-variable monomial trades a factor of each present variable for twice
  the missing one:   y^m z^n      ->  2 x y^(m-1) z^(n-1)   (and cyclically);
* a one-variable monomial is renamed into x.

`phi` runs this to a univariate polynomial in x.  `phi_x` is the restriction
that never touches the first coordinate (no sigma_x, no renaming of y or z
into x); its output lives in R[x] + R[y,z] with y-degree >= z-degree in every
mixed monomial.  Both are linear and order-independent, so a deterministic
sweep is used.

Sums over orbit-invariant sets are preserved by construction; the test suite
checks this exhaustively for small primes.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from math import comb, gcd

from .rings import KPoly


# ---------------------------------------------------------------------------
# coefficient rings


class SymbolicRing:
    """Coefficients are polynomials in k over Q (KPoly)."""

    key = ("sym",)
    is_prime = False

    zero = KPoly.zero()
    one = KPoly.const(1)
    kappa = KPoly.var()
    half = KPoly.const(Fraction(1, 2))

    def from_fraction(self, q):
        return KPoly.const(q)

    from_int = from_fraction

    def is_zero(self, a):
        return a.is_zero()

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def fmt(self, a):
        from .rings import format_kpoly

        return format_kpoly(a)


class PrimeRing:
    """Coefficients are ints mod p with the parameter k fixed."""

    is_prime = True

    def __init__(self, p, kappa):
        self.p = p
        self.kappa = kappa % p
        self.key = ("fp", p, self.kappa)
        self.zero = 0
        self.one = 1 % p
        self.half = pow(2, p - 2, p)

    def from_int(self, n):
        return n % self.p

    def from_fraction(self, q):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise ZeroDivisionError(f"denominator divisible by {self.p}")
        return q.numerator * pow(q.denominator, self.p - 2, self.p) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def fmt(self, a):
        return str(a % self.p)


SYM = SymbolicRing()

_RING_CACHE = {}


def prime_ring(p, kappa):
    key = (p, kappa % p)
    if key not in _RING_CACHE:
        _RING_CACHE[key] = PrimeRing(p, kappa)
    return _RING_CACHE[key]


# ---------------------------------------------------------------------------
# trivariate polynomials


class TriPoly:
    """Polynomial in x, y, z with coefficients in `ring`.

    Terms map exponent triples (a, b, c) to nonzero coefficients.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if not ring.is_zero(c):
                    self.terms[e] = c

    @staticmethod
    def monomial(ring, a, b, c, coeff=1):
        co = coeff if not isinstance(coeff, (int, Fraction)) else ring.from_fraction(coeff)
        return TriPoly(ring, {(a, b, c): co})

    @staticmethod
    def zero(ring):
        return TriPoly(ring)

    @staticmethod
    def const(ring, c):
        return TriPoly(ring, {(0, 0, 0): ring.from_fraction(c)})

    def copy(self):
        t = TriPoly(self.ring)
        t.terms = dict(self.terms)
        return t

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return TriPoly.const(self.ring, other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        r = self.ring
        for e, c in other.terms.items():
            s = r.add(out.get(e, r.zero), c)
            if r.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        t = TriPoly(r)
        t.terms = out
        return t

    __radd__ = __add__

    def __neg__(self):
        r = self.ring
        t = TriPoly(r)
        t.terms = {e: r.neg(c) for e, c in self.terms.items()}
        return t

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        r = self.ring
        if isinstance(other, (int, Fraction)):
            other = TriPoly.const(r, other)
        elif not isinstance(other, TriPoly):
            # ring element scalar
            t = TriPoly(r)
            for e, c in self.terms.items():
                v = r.mul(c, other)
                if not r.is_zero(v):
                    t.terms[e] = v
            return t
        out = {}
        for (a1, b1, c1), v1 in self.terms.items():
            for (a2, b2, c2), v2 in other.terms.items():
                e = (a1 + a2, b1 + b2, c1 + c2)
                prod = r.mul(v1, v2)
                s = r.add(out.get(e, r.zero), prod)
                if r.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        t = TriPoly(r)
        t.terms = out
        return t

    __rmul__ = __mul__

    def __pow__(self, n):
        result = TriPoly.const(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale_ring(self, c):
        return self.__mul__(c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TriPoly.const(self.ring, other)
        return isinstance(other, TriPoly) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def total_degree(self):
        return max((a + b + c for (a, b, c) in self.terms), default=-1)

    def is_even(self):
        return all(a % 2 == 0 and b % 2 == 0 and c % 2 == 0 for (a, b, c) in self.terms)

    def evaluate(self, x, y, z):
        """Evaluate mod p (PrimeRing only)."""
        p = self.ring.p
        tot = 0
        for (a, b, c), v in self.terms.items():
            tot += v * pow(x, a, p) * pow(y, b, p) * pow(z, c, p)
        return tot % p

    def __repr__(self):
        return f"TriPoly({format_tripoly(self)})"


def x_var(ring):
    return TriPoly.monomial(ring, 1, 0, 0)


def y_var(ring):
    return TriPoly.monomial(ring, 0, 1, 0)


def z_var(ring):
    return TriPoly.monomial(ring, 0, 0, 1)


def kappa_poly(ring):
    return TriPoly(ring, {(0, 0, 0): ring.kappa})


def x2_minus_kappa(ring):
    return TriPoly(ring, {(2, 0, 0): ring.one, (0, 0, 0): ring.neg(ring.kappa)})


def x2_minus_const(ring, c):
    return TriPoly(ring, {(2, 0, 0): ring.one, (0, 0, 0): ring.from_int(-c)})


# ---------------------------------------------------------------------------
# univariate output


class XPoly:
    """Univariate polynomial in x over the coefficient ring."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs=None):
        self.ring = ring
        self.coeffs = {}
        if coeffs:
            for e, c in coeffs.items():
                if not ring.is_zero(c):
                    self.coeffs[e] = c

    def degree(self):
        return max(self.coeffs, default=-1)

    def coeff(self, e):
        return self.coeffs.get(e, self.ring.zero)

    def __eq__(self, other):
        return isinstance(other, XPoly) and self.coeffs == other.coeffs

    def __add__(self, other):
        r = self.ring
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = r.add(out.get(e, r.zero), c)
            if r.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return XPoly(r, out)

    def __sub__(self, other):
        r = self.ring
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = r.sub(out.get(e, r.zero), c)
            if r.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return XPoly(r, out)

    def scale(self, c):
        r = self.ring
        if isinstance(c, (int, Fraction)):
            c = r.from_fraction(c)
        return XPoly(r, {e: r.mul(v, c) for e, v in self.coeffs.items()})

    def is_zero(self):
        return not self.coeffs

    def even_part(self):
        return XPoly(self.ring, {e: c for e, c in self.coeffs.items() if e % 2 == 0})

    def fold_mod(self, p):
        """Reduce exponents mod (x^(p+1) - x^2): x^e -> x^(e-(p-1)) for e > p."""
        r = self.ring
        out = {}
        for e, c in self.coeffs.items():
            while e > p:
                e -= p - 1
            s = r.add(out.get(e, r.zero), c)
            if r.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return XPoly(r, out)

    def eval_int(self, x):
        """Evaluate at x mod p (PrimeRing only)."""
        p = self.ring.p
        return sum(c * pow(x, e, p) for e, c in self.coeffs.items()) % p

    def to_tripoly(self):
        return TriPoly(self.ring, {(e, 0, 0): c for e, c in self.coeffs.items()})

    def __repr__(self):
        return f"XPoly({format_xpoly(self)})"


class PhiXResult:
    """Output of phi_x: an x-part plus a pure y,z part (y-degree >= z-degree)."""

    __slots__ = ("xpart", "yzpart")

    def __init__(self, xpart, yzpart):
        self.xpart = xpart
        self.yzpart = yzpart  # dict (b, c) -> coeff, b >= c, (0,0) never present

    def __eq__(self, other):
        return (
            isinstance(other, PhiXResult)
            and self.xpart == other.xpart
            and self.yzpart == other.yzpart
        )

    def is_zero(self):
        return self.xpart.is_zero() and not self.yzpart

    def to_tripoly(self):
        ring = self.xpart.ring
        t = TriPoly(ring, {(e, 0, 0): c for e, c in self.xpart.coeffs.items()})
        return t + TriPoly(ring, {(0, b, c): v for (b, c), v in self.yzpart.items()})

    def __repr__(self):
        return f"PhiXResult({format_tripoly(self.to_tripoly())})"


# ---------------------------------------------------------------------------
# canonical (z-free) form


def canonical_form(f):
    """Replace z via the surface relation: z^2 -> xyz - x^2 - y^2 + k, then
    the leftover linear z by xy/2 (the average of the two z-roots).

    The result is z-free and reduces identically under phi_x.
    """
    r = f.ring
    pending = dict(f.terms)
    out = {}

    def bump(d, e, c):
        s = r.add(d.get(e, r.zero), c)
        if r.is_zero(s):
            d.pop(e, None)
        else:
            d[e] = s

    while pending:
        (a, b, c), v = pending.popitem()
        if c == 0:
            bump(out, (a, b, 0), v)
        elif c == 1:
            bump(out, (a + 1, b + 1, 0), r.mul(v, r.half))
        else:
            # z^2 = xyz - x^2 - y^2 + k
            bump(pending, (a + 1, b + 1, c - 1), v)
            bump(pending, (a + 2, b, c - 2), r.neg(v))
            bump(pending, (a, b + 2, c - 2), r.neg(v))
            bump(pending, (a, b, c - 2), r.mul(v, r.kappa))
    g = TriPoly(r)
    g.terms = out
    return g


def yz_coefficients(f):
    """For a z-free f, the list [f_0, f_1, ...] with f = sum f_j(x) y^j.

    Each f_j is an XPoly in x.
    """
    r = f.ring
    cols = {}
    for (a, b, c), v in f.terms.items():
        if c != 0:
            raise ValueError("polynomial is not z-free")
        cols.setdefault(b, {})[a] = v
    m = max(cols, default=0)
    return [XPoly(r, cols.get(j, {})) for j in range(m + 1)]


# ---------------------------------------------------------------------------
# the reducers


class Reducer:
    """Shared-memo reduction engine for a fixed coefficient ring.

    Monomial reductions of x^a y^b (the only shapes left after passing to
    the canonical form) are memoized in a raw integer representation:
    symbolic values map x-exponent -> little-endian k-coefficient list of
    ints, mod-p values map x-exponent -> int.  Reduction steps never divide,
    so raw ints are exact.
    """

    def __init__(self, ring):
        self.ring = ring
        self._memo = {}
        self._xy = {}
        if sys.getrecursionlimit() < 50000:
            sys.setrecursionlimit(50000)
        self._phix_memo = {}

    # -- raw coefficient helpers (symbolic: list of ints; prime: int)

    def _raw_add(self, A, B, sign=1, kappa_shift=False, scale=1):
        """A += scale * (k if kappa_shift else 1) * sign * B, in place-ish."""
        if self.ring.is_prime:
            p = self.ring.p
            mult = sign * scale * (self.ring.kappa if kappa_shift else 1) % p
            for e, v in B.items():
                A[e] = (A.get(e, 0) + v * mult) % p
        else:
            mult = sign * scale
            for e, v in B.items():
                cur = A.get(e)
                if kappa_shift:
                    v = [0] + v
                if cur is None:
                    A[e] = [c * mult for c in v]
                else:
                    if len(cur) < len(v):
                        cur.extend([0] * (len(v) - len(cur)))
                    for i, c in enumerate(v):
                        cur[i] += c * mult
        return A

    def _raw_clean(self, A):
        if self.ring.is_prime:
            return {e: v for e, v in A.items() if v % self.ring.p}
        out = {}
        for e, v in A.items():
            while v and v[-1] == 0:
                v.pop()
            if v:
                out[e] = v
        return out

    def _mono(self, l, m, n):
        """phi of the monomial x^l y^m z^n (raw representation).

        phi is symmetric in the exponents, so the memo key is sorted.
        """
        a, b, c = sorted((l, m, n), reverse=True)
        key = (a, b, c)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if b == 0:  # univariate (or constant): rename into x
            one = 1 % self.ring.p if self.ring.is_prime else [1]
            val = {a: one}
        elif c == 0:  # two variables: trade for twice the missing one
            sub = self._mono(a - 1, b - 1, 1)
            val = self._raw_clean(self._raw_add({}, sub, scale=2))
        else:  # three variables: absorb against the surface relation
            acc = {}
            self._raw_add(acc, self._mono(a + 1, b - 1, c - 1))
            self._raw_add(acc, self._mono(a - 1, b + 1, c - 1))
            self._raw_add(acc, self._mono(a - 1, b - 1, c + 1))
            self._raw_add(acc, self._mono(a - 1, b - 1, c - 1), sign=-1, kappa_shift=True)
            val = self._raw_clean(acc)
        self._memo[key] = val
        return val

    def phi_xy_raw(self, a, b):
        """Raw reduction of x^a y^b."""
        key = (a, b) if a >= b else (b, a)
        hit = self._xy.get(key)
        if hit is None:
            hit = self._mono(key[0], key[1], 0)
            self._xy[key] = hit
        return hit

    def seed_table(self, entries):
        """Install precomputed x^(2m) y^(2n) reductions (from cache_build)."""
        for (m, n), raw in entries.items():
            a, b = 2 * m, 2 * n
            key = (a, b) if a >= b else (b, a)
            self._xy[key] = raw

    def drop_intermediates(self):
        self._memo.clear()

    # -- public reductions

    def phi(self, f):
        """Full reduction to a univariate polynomial in x."""
        r = self.ring
        g = canonical_form(f)
        if r.is_prime:
            p = r.p
            acc = {}
            for (a, b, _), v in g.terms.items():
                raw = self.phi_xy_raw(a, b)
                for e, c in raw.items():
                    acc[e] = (acc.get(e, 0) + v * c) % p
            return XPoly(r, acc)
        # symbolic: coefficients are KPoly over Q; combine with int k-lists
        acc = {}
        for (a, b, _), v in g.terms.items():
            raw = self.phi_xy_raw(a, b)
            vc = v.coeffs
            for e, clist in raw.items():
                slot = acc.setdefault(e, {})
                for i, ci in enumerate(clist):
                    if ci:
                        for j, vj in enumerate(vc):
                            if vj:
                                slot[i + j] = slot.get(i + j, 0) + ci * vj
        out = {}
        for e, slot in acc.items():
            if slot:
                top = max(slot)
                kp = KPoly([slot.get(i, 0) for i in range(top + 1)])
                if not kp.is_zero():
                    out[e] = kp
        return XPoly(r, out)

    def phi_x(self, f):
        """First-coordinate-preserving reduction into R[x] + R[y,z]."""
        r = self.ring
        xacc = {}
        yzacc = {}
        for (a, b, c), v in f.terms.items():
            xq, yzq = self._phix_mono(a, b, c)
            for e, q in xq.items():
                s = r.add(xacc.get(e, r.zero), r.mul(v, q))
                if r.is_zero(s):
                    xacc.pop(e, None)
                else:
                    xacc[e] = s
            for e, q in yzq.items():
                s = r.add(yzacc.get(e, r.zero), r.mul(v, q))
                if r.is_zero(s):
                    yzacc.pop(e, None)
                else:
                    yzacc[e] = s
        # constants belong to the x-part
        if (0, 0) in yzacc:
            c0 = yzacc.pop((0, 0))
            s = r.add(xacc.get(0, r.zero), c0)
            if r.is_zero(s):
                xacc.pop(0, None)
            else:
                xacc[0] = s
        return PhiXResult(XPoly(r, xacc), yzacc)

    def _phix_mono(self, l, m, n):
        if m < n:
            m, n = n, m  # swapping y and z commutes with every allowed step
        key = (l, m, n)
        hit = self._phix_memo.get(key)
        if hit is not None:
            return hit
        r = self.ring
        if m == 0:  # pure power of x (n <= m = 0)
            val = ({l: r.one}, {})
        elif l == 0:  # stuck: phi_x cannot reduce y^m z^n
            val = ({}, {(m, n): r.one})
        elif n == 0:  # x^l y^m -> 2 x^(l-1) y^(m-1) z
            xq, yzq = self._phix_mono(l - 1, m - 1, 1)
            two = r.from_int(2)
            val = (
                {e: r.mul(two, q) for e, q in xq.items()},
                {e: r.mul(two, q) for e, q in yzq.items()},
            )
        else:  # trivariate: absorb against the surface relation
            acc_x, acc_yz = {}, {}
            for (dl, dm, dn), sgn, kap in (
                ((1, -1, -1), 1, False),
                ((-1, 1, -1), 1, False),
                ((-1, -1, 1), 1, False),
                ((-1, -1, -1), -1, True),
            ):
                xq, yzq = self._phix_mono(l + dl, m + dm, n + dn)
                mult = r.neg(r.kappa) if kap else (r.one if sgn == 1 else r.neg(r.one))
                for e, q in xq.items():
                    s = r.add(acc_x.get(e, r.zero), r.mul(mult, q))
                    if r.is_zero(s):
                        acc_x.pop(e, None)
                    else:
                        acc_x[e] = s
                for e, q in yzq.items():
                    s = r.add(acc_yz.get(e, r.zero), r.mul(mult, q))
                    if r.is_zero(s):
                        acc_yz.pop(e, None)
                    else:
                        acc_yz[e] = s
            val = (acc_x, acc_yz)
        self._phix_memo[key] = val
        return val


_REDUCERS = {}


def reducer(ring):
    rd = _REDUCERS.get(ring.key)
    if rd is None:
        rd = Reducer(ring)
        _REDUCERS[ring.key] = rd
    return rd


def phi(f, table=None):
    rd = reducer(f.ring)
    if table is not None:
        rd.seed_table(table.entries_raw(f.ring))
    return rd.phi(f)


def phi_x(f):
    return reducer(f.ring).phi_x(f)


# ---------------------------------------------------------------------------
# reduction cache


class ReductionTable:
    """Precomputed symbolic reductions of x^(2m) y^(2n).

    Entries are stored in the raw integer representation (x-exponent ->
    k-coefficient int list); `as_xpoly` converts on demand.
    """

    VERSION = 1

    def __init__(self, m_max, n_max, entries):
        self.m_max = m_max
        self.n_max = n_max
        self.entries = entries  # (m, n) -> {xexp: [int, ...]}

    def as_xpoly(self, m, n):
        raw = self.entries[(m, n)]
        return XPoly(SYM, {e: KPoly(v) for e, v in raw.items()})

    def entries_raw(self, ring):
        if ring.is_prime:
            p = ring.p
            k0 = ring.kappa
            out = {}
            for key, raw in self.entries.items():
                out[key] = {
                    e: sum(c * pow(k0, i, p) for i, c in enumerate(v)) % p
                    for e, v in raw.items()
                }
                out[key] = {e: c for e, c in out[key].items() if c}
            return out
        return self.entries

    def to_payload(self):
        ents = {
            f"{m},{n}": {str(e): list(v) for e, v in raw.items()}
            for (m, n), raw in sorted(self.entries.items())
        }
        return {"version": self.VERSION, "m_max": self.m_max, "n_max": self.n_max, "entries": ents}

    @staticmethod
    def from_payload(payload):
        if payload.get("version") != ReductionTable.VERSION:
            raise ValueError(f"unsupported cache version {payload.get('version')!r}")
        ents = {}
        for key, raw in payload["entries"].items():
            m, n = map(int, key.split(","))
            ents[(m, n)] = {int(e): [int(c) for c in v] for e, v in raw.items()}
        return ReductionTable(payload["m_max"], payload["n_max"], ents)


def cache_build(m_max, n_max):
    """Reduce x^(2m) y^(2n) for all m <= m_max, n <= n_max, symbolically."""
    if m_max < 0 or n_max < 0:
        raise ValueError("bounds must be nonnegative")
    rd = reducer(SYM)
    entries = {}
    for m in range(m_max + 1):
        for n in range(n_max + 1):
            raw = rd.phi_xy_raw(2 * m, 2 * n)
            entries[(m, n)] = {e: list(v) for e, v in raw.items()}
    return ReductionTable(m_max, n_max, entries)


# ---------------------------------------------------------------------------
# orbit-average coefficient extraction (even polynomials)


SQRT_KAPPA = ("sqrt_kappa",)


def c_coeff(f, lam, n):
    """Coefficient of the order-2n rotation class `lam` in the orbit averages
    of the even polynomial f.

    `lam` is one of:
      * ("fp", value)        -- value in F_p (ring must be a PrimeRing);
      * ("cyclo", m, j)      -- zeta_m^j + zeta_m^(-j), symbolic ring;
      * SQRT_KAPPA           -- formal square root of k, symbolic ring.

    For n > 0 the value is scaled by n and is zero unless lam lies in the
    order-dividing-2n class set (excluding +-2).  lam = +-2 is outside every
    rotation class and yields 0 for every n.
    """
    if not f.is_even():
        raise ValueError("polynomial must be even in x, y, z")
    fstar = canonical_form(f)
    cols = yz_coefficients(fstar)
    fj = cols[0::2]  # f = sum f_j(x^2) y^(2j)
    r = f.ring

    if lam[0] == "fp":
        if not r.is_prime:
            raise ValueError("fp lambda requires a prime-ring polynomial")
        return _c_coeff_fp(fj, lam[1], n, r)
    if lam == SQRT_KAPPA:
        return _c_coeff_sqrtk(fj, n)
    if lam[0] == "cyclo":
        return _c_coeff_cyclo(fj, lam[1], lam[2], n, r)
    raise ValueError(f"unknown lambda spec {lam!r}")


def _member_2n(plain_order, n):
    return plain_order not in (1, 2) and (2 * n) % plain_order == 0


def _c_coeff_fp(fj, lam, n, ring):
    from .ffield import field

    p = ring.p
    F = field(p)
    lam %= p
    l2 = lam * lam % p
    if (l2 - 4) % p == 0:
        return 0  # lam = +-2 excluded from every class
    if n > 0:
        # membership: the root of t^2 - lam t + 1 must have order dividing 2n
        if not _member_2n(F.root_order(lam), n):
            return 0
    def ev(xp):
        return sum(c * pow(l2, e // 2, p) for e, c in xp.coeffs.items()) % p
    vals = [ev(x) for x in fj]
    m = len(vals) - 1
    if l2 == ring.kappa % p:
        cn = vals[n] if n <= m else 0
    else:
        ratio = (l2 - ring.kappa) * pow(l2 - 4, p - 2, p) % p
        cn = 0
        for j in range(n, m + 1):
            cn = (cn + comb(2 * j, j - n) * pow(ratio, j - n, p) * vals[j]) % p
    return cn * (n if n > 0 else 1) % p


def _c_coeff_sqrtk(fj, n):
    """Third case: lam^2 = k formally; returns a KPoly in k."""
    kvar = KPoly.var()
    m = len(fj) - 1
    if n > m:
        return KPoly.zero()
    val = KPoly.zero()
    for e, c in fj[n].coeffs.items():
        val = val + c * kvar ** (e // 2)
    return val * (n if n > 0 else 1)


def _c_coeff_cyclo(fj, m_cond, j, n, ring):
    """Symbolic-kappa value for lam = zeta^j + zeta^(-j); returns a dict
    k-exponent -> CycloElem."""
    from .rings import CycloElem

    if ring.is_prime:
        raise ValueError("cyclotomic lambda requires the symbolic ring")
    z = CycloElem.zeta(m_cond, j)
    lam2 = (z + z.inverse()) ** 2
    plain = m_cond // gcd(m_cond, j)
    if plain in (1, 2):
        return {}  # lam = +-2 excluded from every class
    if n > 0 and not _member_2n(plain, n):
        return {}
    mtop = len(fj) - 1

    def ev(xp):
        # value in Q(zeta)[k]: dict kexp -> CycloElem
        out = {}
        for e, c in xp.coeffs.items():  # c is a KPoly in k
            pw = lam2 ** (e // 2)
            for i, ci in enumerate(c.coeffs):
                if ci:
                    out[i] = out.get(i, CycloElem.from_rational(m_cond, 0)) + pw * ci
        return {i: v for i, v in out.items() if not v.is_zero()}

    kterm = {1: CycloElem.from_rational(m_cond, 1)}  # the polynomial "k"
    lam2_minus_k = {0: lam2, 1: CycloElem.from_rational(m_cond, -1)}
    inv4 = (lam2 - 4).inverse()

    def dmul(A, B):
        out = {}
        for i, a in A.items():
            for jj, b in B.items():
                key = i + jj
                out[key] = out.get(key, CycloElem.from_rational(m_cond, 0)) + a * b
        return {k2: v for k2, v in out.items() if not v.is_zero()}

    def dscale(A, c):
        return {k2: v * c for k2, v in A.items()}

    def dadd(A, B):
        out = dict(A)
        for k2, v in B.items():
            out[k2] = out.get(k2, CycloElem.from_rational(m_cond, 0)) + v
        return {k2: v for k2, v in out.items() if not v.is_zero()}

    ratio = dscale(lam2_minus_k, inv4)  # (lam^2 - k) / (lam^2 - 4)
    total = {}
    rpow = {0: CycloElem.from_rational(m_cond, 1)}
    for j2 in range(n, mtop + 1):
        term = dscale(dmul(rpow, ev(fj[j2])), Fraction(comb(2 * j2, j2 - n)))
        total = dadd(total, term)
        rpow = dmul(rpow, ratio)
    if n > 0:
        total = dscale(total, Fraction(n))
    return total


# ---------------------------------------------------------------------------
# text format


def parse_poly(text, ring):
    """Parse `c*x^a*y^b*z^c` terms (k denotes the parameter) into a TriPoly."""
    s = text.replace(" ", "").replace("\t", "")
    if not s:
        raise ValueError("empty polynomial")
    # split into signed terms
    terms = []
    cur = ""
    for i, ch in enumerate(s):
        if ch in "+-" and i > 0 and s[i - 1] not in "+-*/^":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    out = TriPoly.zero(ring)
    for term in terms:
        if not term or term in "+-":
            raise ValueError(f"malformed term in {text!r}")
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        coeff = Fraction(sign)
        exps = {"x": 0, "y": 0, "z": 0, "k": 0}
        for factor in term.split("*"):
            if not factor:
                raise ValueError(f"malformed term in {text!r}")
            if factor[0] in exps:
                var = factor[0]
                rest = factor[1:]
                if rest == "":
                    e = 1
                elif rest.startswith("^"):
                    e = int(rest[1:])
                else:
                    raise ValueError(f"bad factor {factor!r}")
                exps[var] += e
            else:
                coeff *= Fraction(factor)
        mono = TriPoly.monomial(ring, exps["x"], exps["y"], exps["z"], coeff)
        if exps["k"]:
            kp = kappa_poly(ring) ** exps["k"]
            mono = mono * kp
        out = out + mono
    return out


def _fmt_coeff_mono(ring, c, body):
    """Render coeff * body, where body may be empty (constant term)."""
    if not ring.is_prime and c.degree > 0:
        cs = ring.fmt(c)
        cs = f"({cs})"
        return f"{cs}*{body}" if body else cs
    cs = ring.fmt(c if not ring.is_prime else c)
    if not body:
        return cs
    if cs == "1":
        return body
    if cs == "-1":
        return f"-{body}"
    return f"{cs}*{body}"


def format_xpoly(xp, var="x"):
    ring = xp.ring
    if xp.is_zero():
        return "0"
    parts = []
    for e in sorted(xp.coeffs, reverse=True):
        body = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        piece = _fmt_coeff_mono(ring, xp.coeffs[e], body)
        parts.append(piece)
    return _join_signed(parts)


def format_tripoly(f):
    """Grammar-compatible rendering: k-polynomial coefficients are
    distributed into separate `c*k^j*...` terms so output re-parses."""
    if f.is_zero():
        return "0"
    ring = f.ring
    keys = sorted(f.terms, key=lambda e: (-(e[0] + e[1] + e[2]), -e[0], -e[1], -e[2]))
    parts = []
    for e in keys:
        a, b, c = e
        vars_body = (
            ([] if a == 0 else [f"x^{a}" if a > 1 else "x"])
            + ([] if b == 0 else [f"y^{b}" if b > 1 else "y"])
            + ([] if c == 0 else [f"z^{c}" if c > 1 else "z"])
        )
        coeff = f.terms[e]
        if ring.is_prime:
            parts.append(_fmt_scalar_mono(str(coeff), "*".join(vars_body)))
            continue
        for j in range(coeff.degree, -1, -1):
            cj = coeff.coeffs[j]
            if cj == 0:
                continue
            body = "*".join(([] if j == 0 else [f"k^{j}" if j > 1 else "k"]) + vars_body)
            parts.append(_fmt_scalar_mono(str(cj), body))
    return _join_signed(parts)


def _fmt_scalar_mono(cs, body):
    if not body:
        return cs
    if cs == "1":
        return body
    if cs == "-1":
        return f"-{body}"
    return f"{cs}*{body}"


def _join_signed(parts):
    out = parts[0]
    for piece in parts[1:]:
        if piece.startswith("-"):
            out += f" - {piece[1:]}"
        else:
            out += f" + {piece}"
    return out
