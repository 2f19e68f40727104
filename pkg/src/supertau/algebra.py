"""Graded differential polynomials on a super jet space, with exact rational
coefficients and a terminating rewrite system producing unique normal forms.

Generators are plain tuples so they hash and sort fast:

    ('u', a, s)        even jet coordinate, field index a (1-based), order s
    ('s', a, k, s)     odd jet coordinate of recursion level k; level 0 are
                       the base odd variables theta_a^s
    ('f', a, p)        one-point function (even, never carries an order)
    ('g', a, p, n)     resonant odd one-point generator Phi^n_{a,p}
    ('t', a, p)        even time variable
    ('o', k)           odd time variable tau_k

The dispersion parameter and the symbolic Virasoro constant c0 are tracked as
integer exponents inside each monomial, so every coefficient stays a Fraction.

Normal form: odd factors sorted by ODD_KEY with the permutation sign absorbed
into the coefficient; repeated odd factors kill the term; odd jets of level
k >= 1 never appear with order >= 1 (the ring rewrites them away).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

Q = Fraction


class NotATotalDerivative(Exception):
    pass


class NotInvertible(Exception):
    pass


class UnsupportedGenerators(Exception):
    pass


# ---------------------------------------------------------------------------
# generators

def U(a, s=0):
    return ('u', a, s)


def SIG(a, k, s=0):
    return ('s', a, k, s)


def TH(a, s=0):
    return ('s', a, 0, s)


def F1(a, p):
    return ('f', a, p)


def PHI(a, p, n):
    return ('g', a, p, n)


def T(a, p):
    return ('t', a, p)


def TAU(k):
    return ('o', k)


def is_odd_gen(g):
    return g[0] in ('s', 'g', 'o')


def gen_order(g):
    """Derivative order of a jet generator; 0 for everything else."""
    kind = g[0]
    if kind == 'u':
        return g[2]
    if kind == 's':
        return g[3]
    return 0


def gen_base(g):
    """Same generator with derivative order stripped."""
    kind = g[0]
    if kind == 'u':
        return ('u', g[1], 0)
    if kind == 's':
        return ('s', g[1], g[2], 0)
    return g


def gen_raise(g, r):
    kind = g[0]
    if kind == 'u':
        return ('u', g[1], g[2] + r)
    if kind == 's':
        return ('s', g[1], g[2], g[3] + r)
    raise ValueError(f"generator {g} carries no derivative order")


def odd_key(g):
    """Canonical order of odd factors: jet odds by (level, field, order),
    then odd one-point generators, then odd times."""
    kind = g[0]
    if kind == 's':
        return (0, g[2], g[1], g[3])
    if kind == 'g':
        return (1, g[2], g[1], g[3])
    return (2, g[1], 0, 0)


def sort_odd(gens):
    """Insertion-sort an odd factor sequence; returns (tuple, sign) or
    (None, 0) when a factor repeats."""
    lst = list(gens)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and odd_key(lst[j - 1]) > odd_key(lst[j]):
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(lst)):
        if lst[i] == lst[i - 1]:
            return None, 0
    return tuple(lst), sign


# monomial = (even, odd, exps, eps_power, c0_power)
#   even: sorted tuple of (generator, power)
#   odd:  tuple of odd generators in canonical order
#   exps: sorted tuple of (field index, rational coefficient q) for exp(q*v^a)
ONE_MONO = ((), (), (), 0, 0)


def _merge_even(e1, e2):
    d = dict(e1)
    for g, p in e2:
        np = d.get(g, 0) + p
        if np:
            d[g] = np
        else:
            del d[g]
    return tuple(sorted(d.items()))


def _merge_exps(x1, x2):
    d = dict(x1)
    for a, q in x2:
        nq = d.get(a, 0) + q
        if nq:
            d[a] = nq
        else:
            del d[a]
    return tuple(sorted(d.items()))


def mono_mul(m1, m2):
    """Product of two monomials -> (monomial, sign) or (None, 0)."""
    odd, sign = sort_odd(m1[1] + m2[1])
    if odd is None:
        return None, 0
    return (_merge_even(m1[0], m2[0]), odd, _merge_exps(m1[2], m2[2]),
            m1[3] + m2[3], m1[4] + m2[4]), sign


class DiffPoly:
    """Immutable sum of monomials with Fraction coefficients."""

    __slots__ = ('terms',)

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero():
        return DiffPoly({})

    @staticmethod
    def const(q):
        q = Q(q)
        return DiffPoly({ONE_MONO: q} if q else {})

    @staticmethod
    def gen(g, power=1):
        if is_odd_gen(g):
            if power != 1:
                return DiffPoly.zero()
            return DiffPoly({((), (g,), (), 0, 0): Q(1)})
        if power == 0:
            return DiffPoly.const(1)
        return DiffPoly({(((g, power),), (), (), 0, 0): Q(1)})

    @staticmethod
    def eps(power=1):
        return DiffPoly({((), (), (), power, 0): Q(1)})

    @staticmethod
    def c0(power=1):
        return DiffPoly({((), (), (), 0, power): Q(1)})

    @staticmethod
    def expgen(a, q):
        q = Q(q)
        if not q:
            return DiffPoly.const(1)
        return DiffPoly({((), (), ((a, q),), 0, 0): Q(1)})

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, DiffPoly):
            other = DiffPoly.const(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        terms = dict(self.terms)
        for m, c in other.terms.items():
            nc = terms.get(m, 0) + c
            if nc:
                terms[m] = nc
            else:
                terms.pop(m, None)
        return DiffPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DiffPoly):
            other = DiffPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return DiffPoly.const(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            q = Q(other)
            if not q:
                return DiffPoly.zero()
            return DiffPoly({m: c * q for m, c in self.terms.items()})
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m, sign = mono_mul(m1, m2)
                if m is None:
                    continue
                nc = terms.get(m, 0) + sign * c1 * c2
                if nc:
                    terms[m] = nc
                else:
                    terms.pop(m, None)
        return DiffPoly(terms)

    __rmul__ = __mul__

    def __truediv__(self, q):
        q = Q(q)
        return DiffPoly({m: c / q for m, c in self.terms.items()})

    def __pow__(self, n):
        out = DiffPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            return self.terms == DiffPoly.const(other).terms
        return self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    # -- queries ------------------------------------------------------------

    def generators(self):
        seen = set()
        for m in self.terms:
            for g, _ in m[0]:
                seen.add(g)
            for g in m[1]:
                seen.add(g)
        return seen

    def exp_fields(self):
        seen = set()
        for m in self.terms:
            for a, _ in m[2]:
                seen.add(a)
        return seen

    def odd_degrees(self):
        return {len(m[1]) for m in self.terms} or {0}

    def odd_degree(self):
        degs = self.odd_degrees()
        if len(degs) != 1:
            raise ValueError(f"mixed odd degrees {sorted(degs)}")
        return degs.pop()

    def max_order(self):
        mo = 0
        for m in self.terms:
            for g, _ in m[0]:
                mo = max(mo, gen_order(g))
            for g in m[1]:
                mo = max(mo, gen_order(g))
        return mo

    def constant_term(self):
        return self.terms.get(ONE_MONO, Q(0))

    def eps_powers(self):
        return {m[3] for m in self.terms}

    def coefficient_of_eps(self, k):
        """Collect terms with dispersion power k, with that power removed."""
        terms = {}
        for m, c in self.terms.items():
            if m[3] == k:
                terms[(m[0], m[1], m[2], 0, m[4])] = c
        return DiffPoly(terms)

    def set_eps_zero(self):
        """Dispersionless limit: keep only dispersion-free terms."""
        terms = {}
        for m, c in self.terms.items():
            if m[3] < 0:
                raise ValueError("negative dispersion power has no limit")
            if m[3] == 0:
                terms[m] = c
        return DiffPoly(terms)

    def set_c0(self, value):
        """Pin the symbolic constant c0 to a rational value."""
        value = Q(value)
        out = DiffPoly.zero()
        for m, c in self.terms.items():
            base = DiffPoly({(m[0], m[1], m[2], m[3], 0): c})
            out = out + base * value ** m[4]
        return out

    def truncate_time(self, tmax, taumax, taumin=0):
        """Drop terms carrying even time variables of level > tmax or odd
        time variables outside [taumin, taumax] (the comparison window)."""
        terms = {}
        for m, c in self.terms.items():
            ok = all(not (g[0] == 't' and g[2] > tmax) for g, _ in m[0]) and \
                all(not (g[0] == 'o' and not taumin <= g[1] <= taumax)
                    for g in m[1])
            if ok:
                terms[m] = c
        return DiffPoly(terms)

    def map_generators(self, fn):
        """Rename generators through fn (must preserve parity and exps)."""
        out = {}
        for m, c in self.terms.items():
            even = tuple(sorted((fn(g), p) for g, p in m[0]))
            odd, sign = sort_odd(tuple(fn(g) for g in m[1]))
            if odd is None:
                raise ValueError("generator map collapsed odd factors")
            nm = (even, odd, m[2], m[3], m[4])
            out[nm] = out.get(nm, 0) + sign * c
        return DiffPoly({m: c for m, c in out.items() if c})

    # -- differentiation ----------------------------------------------------

    def partial(self, g):
        """Partial derivative; for odd g the left Grassmann derivative."""
        terms = {}
        if is_odd_gen(g):
            for m, c in self.terms.items():
                if g not in m[1]:
                    continue
                i = m[1].index(g)
                odd = m[1][:i] + m[1][i + 1:]
                nm = (m[0], odd, m[2], m[3], m[4])
                nc = terms.get(nm, 0) + (-1) ** i * c
                if nc:
                    terms[nm] = nc
                else:
                    terms.pop(nm, None)
            return DiffPoly(terms)
        is_base_field = g[0] == 'u' and g[2] == 0
        acc = {}

        def bump(mono, coeff):
            nc = acc.get(mono, 0) + coeff
            if nc:
                acc[mono] = nc
            else:
                del acc[mono]

        for m, c in self.terms.items():
            ed = dict(m[0])
            p = ed.get(g, 0)
            if p:
                if p == 1:
                    del ed[g]
                else:
                    ed[g] = p - 1
                bump((tuple(sorted(ed.items())), m[1], m[2], m[3], m[4]),
                     c * p)
            if is_base_field:
                q = dict(m[2]).get(g[1], 0)
                if q:
                    bump(m, c * q)
        return DiffPoly(acc)

    # -- display ------------------------------------------------------------

    def __repr__(self):
        return poly_str(self)

    def sorted_terms(self):
        return sorted(self.terms.items())


ZERO = DiffPoly.zero()
ONE = DiffPoly.const(1)


# ---------------------------------------------------------------------------
# derivations

def _acc_mono_mul(acc, img, rest, coeff):
    """acc += coeff * img * monomial(rest), accumulated in place."""
    for mi, ci in img.terms.items():
        m, sign = mono_mul(mi, rest)
        if m is None:
            continue
        nc = acc.get(m, 0) + sign * ci * coeff
        if nc:
            acc[m] = nc
        else:
            del acc[m]


def derivation(poly, image, odd=False):
    """Apply the derivation defined by generator images to a polynomial.

    image(g) -> DiffPoly for every generator; exp factors differentiate
    through image of the base field.  For an odd derivation the usual graded
    Leibniz signs apply; with even factors written first, the sign of the
    i-th odd factor is (-1)^i for either parity of the derivation.
    """
    acc = {}
    for m, c in poly.terms.items():
        even, oddf, exps, ep, cp = m
        for g, p in even:
            img = image(g)
            if img is None or not img.terms:
                continue
            ed = dict(even)
            if p == 1:
                del ed[g]
            else:
                ed[g] = p - 1
            rest = (tuple(sorted(ed.items())), oddf, exps, ep, cp)
            _acc_mono_mul(acc, img, rest, c * p)
        for a, q in exps:
            img = image(('u', a, 0))
            if img is None or not img.terms:
                continue
            _acc_mono_mul(acc, img, m, c * q)
        for i, g in enumerate(oddf):
            img = image(g)
            if img is None or not img.terms:
                continue
            rest = (even, oddf[:i] + oddf[i + 1:], exps, ep, cp)
            _acc_mono_mul(acc, img, rest, c * (-1) ** i)
    return DiffPoly(acc)


def free_dx(poly):
    """Total x-derivative on the free subalgebra (even jets, level-0 odd
    jets, exponentials).  Raises on any constrained generator."""

    def image(g):
        kind = g[0]
        if kind == 'u':
            return DiffPoly.gen(('u', g[1], g[2] + 1))
        if kind == 's' and g[2] == 0:
            return DiffPoly.gen(('s', g[1], 0, g[3] + 1))
        raise UnsupportedGenerators(f"free dx cannot differentiate {g}")

    return derivation(poly, image)


# ---------------------------------------------------------------------------
# the rewrite-aware ring

class JetRing:
    """Jet-space ring of a fixed hierarchy.

    Rewrite hooks (all optional) give x-derivative images of constrained
    generators; their right-hand sides must already be in normal form:

      sigma_rule(a, k) : image of the first derivative of level-k odd jets,
                         k >= 1, expressed in strictly lower levels
      onepoint_rule(a, p) : image of the derivative of f_{a,p}
      oddpt_rule(a, p, n) : image of the derivative of a resonant generator
    """

    def __init__(self, n, sigma_rule=None, onepoint_rule=None, oddpt_rule=None):
        self.n = n
        self.sigma_rule = sigma_rule
        self.onepoint_rule = onepoint_rule
        self.oddpt_rule = oddpt_rule
        self._dx_cache = {}

    def dx_gen(self, g):
        cached = self._dx_cache.get(g)
        if cached is not None:
            return cached
        kind = g[0]
        if kind == 'u':
            out = DiffPoly.gen(('u', g[1], g[2] + 1))
        elif kind == 's':
            a, k, s = g[1], g[2], g[3]
            if k == 0:
                out = DiffPoly.gen(('s', a, 0, s + 1))
            else:
                if s != 0:
                    raise AssertionError(f"non-normal generator {g}")
                if self.sigma_rule is None:
                    raise UnsupportedGenerators(
                        f"no recursion rule installed for {g}")
                out = self.sigma_rule(a, k)
        elif kind == 'f':
            if self.onepoint_rule is None:
                raise UnsupportedGenerators(f"no density rule for {g}")
            out = self.onepoint_rule(g[1], g[2])
        elif kind == 'g':
            if self.oddpt_rule is None:
                raise UnsupportedGenerators(f"no rule for {g}")
            out = self.oddpt_rule(g[1], g[2], g[3])
        else:  # time variables are x-independent
            out = ZERO
        self._dx_cache[g] = out
        return out

    def dx(self, poly, times=1):
        for _ in range(times):
            poly = derivation(poly, self.dx_gen)
        return poly


# ---------------------------------------------------------------------------
# x-antiderivative on the free subalgebra

def _top_variable(poly):
    best = None
    for m in poly.terms:
        for g, _ in m[0]:
            key = (gen_order(g), gen_base(g))
            if best is None or key > best:
                best = key
        for g in m[1]:
            key = (gen_order(g), gen_base(g))
            if best is None or key > best:
                best = key
    return best


def _integrate_even_var(poly, g):
    """Polynomial antiderivative in the single variable g (an even jet),
    integrating exp factors of the same base field by parts."""
    base_field = g[1] if g[2] == 0 else None
    acc = {}

    def bump(mono, coeff):
        nc = acc.get(mono, 0) + coeff
        if nc:
            acc[mono] = nc
        else:
            del acc[mono]

    for m, c in poly.terms.items():
        ed = dict(m[0])
        p = ed.get(g, 0)
        q = dict(m[2]).get(base_field, 0) if base_field is not None else 0
        if not q:
            ed[g] = p + 1
            bump((tuple(sorted(ed.items())), m[1], m[2], m[3], m[4]),
                 c / (p + 1))
        else:
            # int v^p exp(qv) dv = exp(qv) sum_j (-1)^j p!/(p-j)! v^(p-j)/q^(j+1)
            for j in range(p + 1):
                ed2 = dict(ed)
                if p - j:
                    ed2[g] = p - j
                else:
                    ed2.pop(g, None)
                bump((tuple(sorted(ed2.items())), m[1], m[2], m[3], m[4]),
                     c * (-1) ** j * Q(factorial(p), factorial(p - j)) /
                     q ** (j + 1))
    return DiffPoly(acc)


def antiderivative(poly):
    """Invert the total x-derivative, dropping the integration constant.

    The input must lie in the free subalgebra and be an exact derivative;
    otherwise NotATotalDerivative is raised.  Peels the top (order, rank)
    variable per round; soundness checks on the peeled coefficient make the
    loop terminate on every input.
    """
    for g in poly.generators():
        if g[0] not in ('u', 's') or (g[0] == 's' and g[2] != 0):
            raise UnsupportedGenerators(f"antiderivative over {g}")
    acc = ZERO
    p = poly
    while p.terms:
        top = _top_variable(p)
        order, base = top
        if order == 0:
            raise NotATotalDerivative(
                f"underived remainder {p!r}")
        w = gen_raise(base, order)
        coeff = p.partial(w)
        for g in coeff.generators():
            key = (gen_order(g), gen_base(g))
            if key >= top and not (g == w and not is_odd_gen(w)):
                raise NotATotalDerivative(
                    f"coefficient of {w} involves {g}")
        if is_odd_gen(w):
            if coeff.is_zero():
                raise NotATotalDerivative(f"vanishing odd coefficient of {w}")
            step = DiffPoly.gen(gen_raise(base, order - 1)) * coeff
        else:
            if w in coeff.generators():
                raise NotATotalDerivative(f"nonlinear in top variable {w}")
            step = _integrate_even_var(coeff, gen_raise(base, order - 1))
        acc = acc + step
        p = p - free_dx(step)
        if w in p.generators():
            raise NotATotalDerivative(f"top variable {w} not eliminated")
    if acc.constant_term():
        acc = acc - DiffPoly.const(acc.constant_term())
    return acc


def integrate_in(poly, a):
    """Antiderivative with respect to the base field v^a (order-0 jets only),
    exp factors handled by parts."""
    for g in poly.generators():
        if gen_order(g) != 0:
            raise UnsupportedGenerators("integrate_in expects order-0 input")
    return _integrate_even_var(poly, ('u', a, 0))


# ---------------------------------------------------------------------------
# display and serialization

GREEK = {'s': 'sigma', 'o': 'tau', 'g': 'Phi'}


def gen_str(g):
    kind = g[0]
    if kind == 'u':
        a, s = g[1], g[2]
        return f"u{a}" + (f"[{s}]" if s else "")
    if kind == 's':
        a, k, s = g[1], g[2], g[3]
        name = f"th{a}" if k == 0 else f"sig{a},{k}"
        return name + (f"[{s}]" if s else "")
    if kind == 'f':
        return f"f{g[1]},{g[2]}"
    if kind == 'g':
        return f"Phi{g[1]},{g[2]}^{g[3]}"
    if kind == 't':
        return f"t{g[1]},{g[2]}"
    return f"tau{g[1]}"


def mono_str(m):
    even, odd, exps, ep, cp = m
    parts = []
    if ep:
        parts.append("eps" + (f"^{ep}" if ep != 1 else ""))
    if cp:
        parts.append("c0" + (f"^{cp}" if cp != 1 else ""))
    for g, p in even:
        parts.append(gen_str(g) + (f"^{p}" if p != 1 else ""))
    for a, q in exps:
        parts.append(f"exp({q}*u{a})" if q != 1 else f"exp(u{a})")
    for g in odd:
        parts.append(gen_str(g))
    return "*".join(parts) if parts else "1"


def poly_str(poly):
    if not poly.terms:
        return "0"
    bits = []
    for m, c in poly.sorted_terms():
        s = mono_str(m)
        if c == 1 and s != "1":
            bits.append(s)
        elif c == -1 and s != "1":
            bits.append(f"-{s}")
        elif s == "1":
            bits.append(str(c))
        else:
            bits.append(f"{c}*{s}")
    out = bits[0]
    for b in bits[1:]:
        out += f" + {b}" if not b.startswith("-") else f" - {b[1:]}"
    return out


def poly_to_json(poly):
    """Deterministic JSON form: list of [coeff, even, odd, exps, eps, c0]."""
    rows = []
    for m, c in poly.sorted_terms():
        even = [[list(g), p] for g, p in m[0]]
        odd = [list(g) for g in m[1]]
        exps = [[a, str(q)] for a, q in m[2]]
        rows.append([str(c), even, odd, exps, m[3], m[4]])
    return rows


def poly_from_json(rows):
    terms = {}
    for coeff, even, odd, exps, ep, cp in rows:
        m = (tuple(sorted((tuple(g), p) for g, p in even)),
             tuple(tuple(g) for g in odd),
             tuple(sorted((a, Q(q)) for a, q in exps)),
             ep, cp)
        terms[m] = Q(coeff)
    return DiffPoly(terms)


def _frac_latex(c):
    if c.denominator == 1:
        return str(c.numerator)
    if c.numerator < 0:
        return f"-\\frac{{{-c.numerator}}}{{{c.denominator}}}"
    return f"\\frac{{{c.numerator}}}{{{c.denominator}}}"


def _gen_latex(g, scalar_field):
    kind = g[0]
    primes = {0: "", 1: "'", 2: "''", 3: "'''"}
    if kind == 'u':
        name = "u" if scalar_field else f"u^{{{g[1]}}}"
        s = g[2]
        return name + (primes[s] if s in primes else f"^{{({s})}}")
    if kind == 's':
        a, k, s = g[1], g[2], g[3]
        if k == 0:
            name = "\\theta" if scalar_field else f"\\theta_{{{a}}}"
        else:
            name = f"\\sigma_{{{k}}}" if scalar_field else f"\\sigma_{{{a},{k}}}"
        return name + (f"^{{{s}}}" if s else "")
    if kind == 'f':
        return f"f_{{{g[2]}}}" if scalar_field else f"f_{{{g[1]},{g[2]}}}"
    if kind == 'g':
        return f"\\Phi_{{{g[1]},{g[2]}}}^{{{g[3]}}}"
    if kind == 't':
        return f"t_{{{g[2]}}}" if scalar_field else f"t^{{{g[1]},{g[2]}}}"
    return f"\\tau_{{{g[1]}}}"


def poly_to_latex(poly, scalar_field=False):
    """LaTeX with jet orders as primes/superscripts; single fractions per
    term, e.g. u^2/2 prints as \\frac{u^2}{2}."""
    if not poly.terms:
        return "0"
    bits = []
    for m, c in poly.sorted_terms():
        even, odd, exps, ep, cp = m
        factors = []
        if ep:
            factors.append("\\varepsilon" + (f"^{{{ep}}}" if ep != 1 else ""))
        if cp:
            factors.append("c_0" + (f"^{{{cp}}}" if cp != 1 else ""))
        for g, p in even:
            t = _gen_latex(g, scalar_field)
            factors.append(t if p == 1 else f"{t}^{{{p}}}" if gen_order(g) == 0
                           else f"({t})^{{{p}}}")
        for a, q in exps:
            arg = "u" if scalar_field else f"u^{{{a}}}"
            factors.append(f"e^{{{arg}}}" if q == 1 else f"e^{{{q}{arg}}}")
        for g in odd:
            factors.append(_gen_latex(g, scalar_field))
        body = " ".join(factors)
        if not factors:
            bits.append(_frac_latex(c))
        elif c == 1:
            bits.append(body)
        elif c == -1:
            bits.append(f"-{body}")
        elif c.denominator == 1:
            bits.append(f"{c.numerator} {body}")
        else:
            num = body if c.numerator == 1 else (
                f"-{body}" if c.numerator == -1 else f"{abs(c.numerator)} {body}")
            sign = "-" if c.numerator < 0 and abs(c.numerator) != 1 else ""
            if c.numerator < 0 and abs(c.numerator) == 1:
                bits.append(f"-\\frac{{{body}}}{{{c.denominator}}}")
                continue
            bits.append(f"{sign}\\frac{{{num.lstrip('-')}}}{{{c.denominator}}}")
    out = bits[0]
    for b in bits[1:]:
        out += f" + {b}" if not b.startswith("-") else f" - {b[1:]}"
    return out
