"""Truncated formal Laurent series with differential-polynomial coefficients.

Exponents are stored doubled so that half-integer powers (the b-type series
carry an overall lambda^(-1/2)) are plain integers: stored key d means actual
power d/2.  A series is parity-homogeneous: either all keys are even (integer
powers) or all odd (half-shifted); products assert this invariant.

Truncation: a series knows all its nonzero coefficients at doubled exponents
>= floor; below the floor coefficients are unknown and are dropped.  Products
propagate floors from the operands' supports so that every stored coefficient
of a result is exact.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import DiffPoly, NotInvertible, Q

NEG_INF = None  # floor sentinel for exact series


def _as_poly(c):
    return c if isinstance(c, DiffPoly) else DiffPoly.const(c)


class LaurentJet:
    """One-variable truncated Laurent series."""

    __slots__ = ('coeffs', 'floor')

    def __init__(self, coeffs, floor):
        self.coeffs = {d: _as_poly(c) for d, c in coeffs.items()
                       if _as_poly(c).terms}
        self.floor = floor
        if floor is not NEG_INF:
            self.coeffs = {d: c for d, c in self.coeffs.items() if d >= floor}
        pars = {d % 2 for d in self.coeffs}
        assert len(pars) <= 1, "mixed integer/half-integer exponents"

    @staticmethod
    def zero(floor=NEG_INF):
        return LaurentJet({}, floor)

    @staticmethod
    def monomial(c, d, floor=NEG_INF):
        return LaurentJet({d: c}, floor)

    def parity(self):
        for d in self.coeffs:
            return d % 2
        return 0

    def support_max(self):
        return max(self.coeffs) if self.coeffs else None

    def coeff(self, d):
        """Exact coefficient at doubled exponent d."""
        if self.floor is not NEG_INF and d < self.floor:
            raise ValueError(f"exponent {d}/2 below truncation floor "
                             f"{self.floor}/2")
        return self.coeffs.get(d, DiffPoly.zero())

    def _join_floor(self, other):
        if self.floor is NEG_INF:
            return other.floor
        if other.floor is NEG_INF:
            return self.floor
        return max(self.floor, other.floor)

    def __add__(self, other):
        coeffs = dict(self.coeffs)
        for d, c in other.coeffs.items():
            coeffs[d] = coeffs.get(d, DiffPoly.zero()) + c
        return LaurentJet(coeffs, self._join_floor(other))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LaurentJet({d: -c for d, c in self.coeffs.items()}, self.floor)

    def __mul__(self, other):
        if not isinstance(other, LaurentJet):
            return LaurentJet({d: c * other for d, c in self.coeffs.items()},
                              self.floor)
        if self.floor is NEG_INF and other.floor is NEG_INF:
            floor = NEG_INF
        else:
            sa, sb = self.support_max(), other.support_max()
            if sa is None or sb is None:
                return LaurentJet.zero(NEG_INF)
            cands = []
            if self.floor is not NEG_INF:
                cands.append(self.floor + sb)
            if other.floor is not NEG_INF:
                cands.append(other.floor + sa)
            floor = max(cands)
        coeffs = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = d1 + d2
                if floor is not NEG_INF and d < floor:
                    continue
                coeffs[d] = coeffs.get(d, DiffPoly.zero()) + c1 * c2
        return LaurentJet(coeffs, floor)

    __rmul__ = __mul__

    def shift(self, d):
        """Multiply by lambda^(d/2)."""
        floor = self.floor if self.floor is NEG_INF else self.floor + d
        return LaurentJet({k + d: c for k, c in self.coeffs.items()}, floor)

    def map_coeffs(self, fn):
        return LaurentJet({d: fn(c) for d, c in self.coeffs.items()},
                          self.floor)

    def split(self):
        """(plus, minus): powers >= 0 and powers < 0.  For half-shifted
        series the plus part holds lambda^(k+1/2), k >= 0."""
        plus = {d: c for d, c in self.coeffs.items() if d >= 0}
        minus = {d: c for d, c in self.coeffs.items() if d < 0}
        return (LaurentJet(plus, NEG_INF if self.floor is NEG_INF or
                           self.floor <= 0 else self.floor),
                LaurentJet(minus, self.floor))

    def plus_part(self):
        return self.split()[0]

    def minus_part(self):
        return self.split()[1]

    def residue(self):
        """Coefficient of lambda^(-1)."""
        return self.coeff(-2)

    def invert(self):
        """Multiplicative inverse; the leading (top) coefficient must be a
        nonzero constant."""
        top = self.support_max()
        if top is None:
            raise NotInvertible("zero series")
        lead = self.coeffs[top]
        lc = lead.constant_term()
        if lead != DiffPoly.const(lc) or lc == 0:
            raise NotInvertible(f"leading coefficient {lead!r} is not a "
                                "nonzero constant")
        if self.floor is NEG_INF:
            depth = max(top - d for d in self.coeffs)
            floor = -top - depth * 64  # effectively exact for polynomials
        else:
            floor = self.floor - 2 * top
        out = {-top: DiffPoly.const(1 / lc)}
        # tail = 1 - self * out, iterated: out += lead^-1 * tail * shift
        while True:
            prod = {}
            for d1, c1 in self.coeffs.items():
                for d2, c2 in out.items():
                    d = d1 + d2
                    if d < floor + top:
                        continue
                    prod[d] = prod.get(d, DiffPoly.zero()) + c1 * c2
            tail = {d: -c for d, c in prod.items() if c.terms and d != 0}
            z = prod.get(0, DiffPoly.zero()) - DiffPoly.const(1)
            if z.terms:
                tail[0] = tail.get(0, DiffPoly.zero()) - z
            tail = {d: c for d, c in tail.items() if c.terms}
            if not tail:
                break
            for d, c in tail.items():
                nd = d - top
                if nd < floor:
                    continue
                out[nd] = out.get(nd, DiffPoly.zero()) + c / lc
        return LaurentJet(out, floor)

    def __eq__(self, other):
        keys = set(self.coeffs) | set(other.coeffs)
        fl = self._join_floor(other)
        for d in keys:
            if fl is not NEG_INF and d < fl:
                continue
            if self.coeffs.get(d, DiffPoly.zero()) != \
               other.coeffs.get(d, DiffPoly.zero()):
                return False
        return True

    def is_zero(self):
        return all(not c.terms for c in self.coeffs.values())

    def __repr__(self):
        if not self.coeffs:
            return "O(...)"
        bits = []
        for d in sorted(self.coeffs, reverse=True):
            p = "1" if d == 0 else (f"L^{Q(d,2)}")
            bits.append(f"({self.coeffs[d]!r})*{p}")
        tail = "" if self.floor is NEG_INF else f" + O(L^{Q(self.floor, 2)})"
        return " + ".join(bits) + tail


class BiLaurent:
    """Two-variable truncated Laurent series (first variable lambda, second
    mu), doubled exponents per axis, independent floors."""

    __slots__ = ('coeffs', 'lfloor', 'mfloor')

    def __init__(self, coeffs, lfloor, mfloor):
        self.coeffs = {}
        for (dl, dm), c in coeffs.items():
            c = _as_poly(c)
            if not c.terms:
                continue
            if lfloor is not NEG_INF and dl < lfloor:
                continue
            if mfloor is not NEG_INF and dm < mfloor:
                continue
            self.coeffs[(dl, dm)] = c
        self.lfloor = lfloor
        self.mfloor = mfloor

    @staticmethod
    def from_lambda(jet):
        return BiLaurent({(d, 0): c for d, c in jet.coeffs.items()},
                         jet.floor, NEG_INF)

    @staticmethod
    def from_mu(jet):
        return BiLaurent({(0, d): c for d, c in jet.coeffs.items()},
                         NEG_INF, jet.floor)

    @staticmethod
    def geometric(order):
        """Expansion of 1/(mu - lambda) in powers of lambda/mu, truncated:
        sum_{i<=order} lambda^i mu^(-i-1)."""
        return BiLaurent({(2 * i, -2 * i - 2): Q(1) for i in range(order + 1)},
                         NEG_INF, -2 * order - 2)

    def support_max(self):
        if not self.coeffs:
            return None, None
        return (max(dl for dl, _ in self.coeffs),
                max(dm for _, dm in self.coeffs))

    def _mul_floors(self, other):
        sa_l, sa_m = self.support_max()
        sb_l, sb_m = other.support_max()

        def axis(fa, fb, sa, sb):
            cands = []
            if fa is not NEG_INF:
                cands.append(fa + sb)
            if fb is not NEG_INF:
                cands.append(fb + sa)
            return max(cands) if cands else NEG_INF

        return (axis(self.lfloor, other.lfloor, sa_l, sb_l),
                axis(self.mfloor, other.mfloor, sa_m, sb_m))

    def __add__(self, other):
        def jf(a, b):
            if a is NEG_INF:
                return b
            if b is NEG_INF:
                return a
            return max(a, b)
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            coeffs[k] = coeffs.get(k, DiffPoly.zero()) + c
        return BiLaurent(coeffs, jf(self.lfloor, other.lfloor),
                         jf(self.mfloor, other.mfloor))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BiLaurent({k: -c for k, c in self.coeffs.items()},
                         self.lfloor, self.mfloor)

    def __mul__(self, other):
        if not isinstance(other, BiLaurent):
            return BiLaurent({k: c * other for k, c in self.coeffs.items()},
                             self.lfloor, self.mfloor)
        if not self.coeffs or not other.coeffs:
            return BiLaurent({}, NEG_INF, NEG_INF)
        lf, mf = self._mul_floors(other)
        coeffs = {}
        for (l1, m1), c1 in self.coeffs.items():
            for (l2, m2), c2 in other.coeffs.items():
                k = (l1 + l2, m1 + m2)
                if lf is not NEG_INF and k[0] < lf:
                    continue
                if mf is not NEG_INF and k[1] < mf:
                    continue
                coeffs[k] = coeffs.get(k, DiffPoly.zero()) + c1 * c2
        return BiLaurent(coeffs, lf, mf)

    __rmul__ = __mul__

    def map_coeffs(self, fn):
        return BiLaurent({k: fn(c) for k, c in self.coeffs.items()},
                         self.lfloor, self.mfloor)

    def lambda_minus(self):
        """Keep terms with negative lambda power."""
        return BiLaurent({k: c for k, c in self.coeffs.items() if k[0] < 0},
                         self.lfloor, self.mfloor)

    def coeff(self, dl, dm):
        if self.lfloor is not NEG_INF and dl < self.lfloor:
            raise ValueError(f"lambda exponent {Q(dl,2)} below floor")
        if self.mfloor is not NEG_INF and dm < self.mfloor:
            raise ValueError(f"mu exponent {Q(dm,2)} below floor")
        return self.coeffs.get((dl, dm), DiffPoly.zero())

    def is_zero_within(self, lmin, mmin):
        """True when all exact coefficients with exponents >= the given
        doubled bounds vanish."""
        for (dl, dm), c in self.coeffs.items():
            if dl >= lmin and dm >= mmin and c.terms:
                return False
        return True
