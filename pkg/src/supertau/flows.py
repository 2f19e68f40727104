"""Named evolutionary derivations (flows) over a jet ring and their
commutators.

A Flow holds images of base generators; images of derived jet generators are
x-derivatives of the base image (evolutionary flows commute with dx).  Time
variables are generators too: a flow differentiates the matching time
variable to 1, all others to 0, which is what makes symmetries with explicit
time dependence (Virasoro flows) work out.
"""

from __future__ import annotations

from .algebra import DiffPoly, derivation, gen_base, gen_order

ZERO = DiffPoly.zero()
ONE = DiffPoly.const(1)


class Flow:
    """A derivation of fixed parity given by a table of base-generator
    images.  table maps base generators to DiffPoly images or to callables
    evaluated (and cached) on demand; generators absent from the table and
    not matching a time key differentiate to zero."""

    __slots__ = ('ring', 'key', 'parity', 'table', '_cache')

    def __init__(self, ring, key, parity, table):
        self.ring = ring
        self.key = key
        self.parity = parity
        self.table = table
        self._cache = {}

    def image(self, g):
        img = self._cache.get(g)
        if img is not None:
            return img
        s = gen_order(g)
        if s:
            img = self.ring.dx(self.image(gen_base(g)), s)
        else:
            entry = self.table.get(g)
            if entry is None:
                if g[0] == 't':
                    entry = ONE if self.key == g else ZERO
                elif g[0] == 'o':
                    entry = ONE if self.key == g else ZERO
                else:
                    entry = ZERO
            elif callable(entry):
                entry = entry()
            img = entry
        self._cache[g] = img
        return img

    def __call__(self, poly):
        return derivation(poly, self.image, odd=self.parity)

    def on_gen(self, g):
        return self.image(g)


def commutator(F1, F2, poly):
    """Graded commutator [F1,F2] applied to poly:
    F1 F2 - (-1)^(p1 p2) F2 F1 (anticommutator for two odd flows)."""
    sign = (-1) ** (F1.parity * F2.parity)
    return F1(F2(poly)) - sign * F2(F1(poly))


def commutes_on(F1, F2, gens):
    """Evaluate the graded commutator on a list of generators; returns the
    first nonzero (generator, residue) or None."""
    for g in gens:
        r = commutator(F1, F2, DiffPoly.gen(g))
        if r.terms:
            return g, r
    return None
