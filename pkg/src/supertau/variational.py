"""Local functionals, variational derivatives, the Schouten bracket and the
evolutionary flows attached to bivectors."""

from __future__ import annotations

from .algebra import (
    DiffPoly, NotATotalDerivative, Q, SIG, TH, U, UnsupportedGenerators,
    antiderivative, free_dx, gen_order, is_odd_gen,
)


def _require_free(poly):
    for g in poly.generators():
        if g[0] == 'u':
            continue
        if g[0] == 's' and g[2] == 0:
            continue
        raise UnsupportedGenerators(
            f"variational calculus lives on the free subalgebra, got {g}")


def variational_derivative(density, g):
    """Euler operator sum_s (-dx)^s d/dg^(s) applied to a density.

    g is a base generator: an even field U(a) or an odd field TH(a).
    """
    _require_free(density)
    smax = density.max_order()
    out = DiffPoly.zero()
    for s in range(smax + 1):
        if g[0] == 'u':
            gs = ('u', g[1], s)
        else:
            gs = ('s', g[1], 0, s)
        piece = density.partial(gs)
        for _ in range(s):
            piece = free_dx(piece)
        out = out + (-1) ** s * piece
    return out


def is_total_derivative(poly):
    """Membership test for the image of dx, with witness.

    Returns (True, witness) or (False, residue) where the residue is a
    nonzero variational derivative or constant term demonstrating failure.
    """
    _require_free(poly)
    if poly.constant_term():
        return False, DiffPoly.const(poly.constant_term())
    fields = sorted({g[1] for g in poly.generators()} |
                    {a for a in poly.exp_fields()})
    for a in fields:
        r = variational_derivative(poly, U(a))
        if r.terms:
            return False, r
        r = variational_derivative(poly, TH(a))
        if r.terms:
            return False, r
    return True, antiderivative(poly)


class LocalFunctional:
    """Equivalence class of a density modulo total x-derivatives.

    The density is one chosen lift; equality always goes through the
    total-derivative criterion, never through density comparison.
    """

    __slots__ = ('density', 'degree')

    def __init__(self, density, degree=None):
        _require_free(density)
        d = density.odd_degree()
        if degree is not None and density.terms and d != degree:
            raise ValueError(f"density has odd degree {d}, declared {degree}")
        self.density = density
        self.degree = degree if degree is not None else d

    def delta_u(self, a):
        return variational_derivative(self.density, U(a))

    def delta_theta(self, a):
        return variational_derivative(self.density, TH(a))

    def __add__(self, other):
        return LocalFunctional(self.density + other.density)

    def __sub__(self, other):
        return LocalFunctional(self.density - other.density)

    def __rmul__(self, q):
        return LocalFunctional(self.density * q)

    def is_zero(self):
        ok, _ = is_total_derivative(self.density)
        return ok

    def __eq__(self, other):
        return (self - other).is_zero()

    def __repr__(self):
        return f"int({self.density!r})"


def _fields_of(*functionals):
    fields = set()
    for F in functionals:
        fields |= {g[1] for g in F.density.generators()}
        fields |= F.density.exp_fields()
    return sorted(fields)


def schouten_bracket(P, Q_):
    """Graded Lie bracket on local functionals,
    [P,Q] = int( dP/dtheta_a dQ/du^a + (-1)^p dP/du^a dQ/dtheta_a )."""
    p = P.degree
    density = DiffPoly.zero()
    for a in _fields_of(P, Q_):
        density = density + P.delta_theta(a) * Q_.delta_u(a)
        density = density + (-1) ** p * P.delta_u(a) * Q_.delta_theta(a)
    return LocalFunctional(density, P.degree + Q_.degree - 1
                           if density.terms else None)


def dp_flow(P, fields=None):
    """Evolutionary flow of a bivector: du^a = dP/dtheta_a,
    dtheta_a = (-1)^p dP/du^a.  Returns {generator: image}."""
    if P.degree != 2:
        raise ValueError("flows are attached to bivectors (odd degree 2)")
    sign = (-1) ** P.degree
    rules = {}
    for a in (fields or _fields_of(P)):
        rules[U(a)] = P.delta_theta(a)
        rules[TH(a)] = sign * P.delta_u(a)
    return rules


def check_poisson_pair(P0, P1):
    """The three bracket conditions of a bihamiltonian pair, with witnesses
    (antiderivatives) on success and offending residues on failure."""
    report = []
    for name, F, G in (("[P0,P0]", P0, P0), ("[P0,P1]", P0, P1),
                       ("[P1,P1]", P1, P1)):
        br = schouten_bracket(F, G)
        ok, obj = is_total_derivative(br.density)
        report.append({
            "check": name,
            "status": "pass" if ok else "fail",
            ("witness" if ok else "residue"): obj,
        })
    return report


class DiffOperator:
    """Matrix differential operator; entries are lists of (order, DiffPoly)."""

    __slots__ = ('entries',)

    def __init__(self, entries):
        self.entries = entries
        for row in entries:
            if len(row) != len(entries):
                raise ValueError("operator matrix must be square")

    def apply(self, vec):
        n = len(self.entries)
        if len(vec) != n:
            raise ValueError(f"dimension mismatch: {len(vec)} != {n}")
        out = []
        for i in range(n):
            acc = DiffPoly.zero()
            for j in range(n):
                for s, A in self.entries[i][j]:
                    w = vec[j]
                    for _ in range(s):
                        w = free_dx(w)
                    acc = acc + A * w
            out.append(acc)
        return out
