"""Ideals of ``Z[t_1^(+-1), ..., t_d^(+-1)]`` through strong Groebner bases.

A Laurent ring in d variables is presented as ``Z[t, y] / (t_i y_i - 1)``.
The monomial order is graded, ties broken lexicographically on the
inverse variables first and then on the t-variables, so that y-variables
are the expensive ones and normal forms prefer positive powers of t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..lattice import FgAbelianGroup, SublatticeSpec, quotient_data
from .engine import Budget, Element, Engine, additive_relations, leading_modulus, order_ideal
from .poly import LaurentPoly

INFINITE = math.inf

ORDER_TAG = "graded, ties lex on (y_1..y_d, t_1..t_d)"


def laurent_key(d: int):
    def key(m):
        return (m[0], sum(m[1:])) + m[1 + d:] + m[1:1 + d]
    return key


def to_internal(p: LaurentPoly, component: int = 0) -> dict:
    """Split negative exponents onto the inverse variables."""
    out = {}
    for e, c in p.items():
        m = (component,) + tuple(max(x, 0) for x in e) + tuple(max(-x, 0) for x in e)
        out[m] = out.get(m, 0) + c
    return {m: c for m, c in out.items() if c}


def mono_to_laurent(m, d: int) -> tuple[int, ...]:
    return tuple(a - b for a, b in zip(m[1:1 + d], m[1 + d:1 + 2 * d]))


def from_internal(p: dict, d: int) -> LaurentPoly:
    out = {}
    for m, c in p.items():
        e = mono_to_laurent(m, d)
        out[e] = out.get(e, 0) + c
    return LaurentPoly(d, out)


def inverse_relations(d: int, component: int = 0) -> list[dict]:
    rels = []
    for i in range(d):
        m = [0] * (2 * d)
        m[i] = m[d + i] = 1
        rels.append({(component,) + tuple(m): 1, (component,) + (0,) * (2 * d): -1})
    return rels


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced strong Groebner basis of a Laurent ideal, stored on 2d variables."""

    arity: int
    elements: tuple[Element, ...] = field(repr=False)
    generators: tuple[LaurentPoly, ...]
    order: str = ORDER_TAG

    @property
    def polys(self) -> list[LaurentPoly]:
        """Basis elements pulled back to Laurent polynomials (the t*y - 1 ones vanish)."""
        out = (from_internal(e.poly, self.arity) for e in self.elements)
        return [p for p in out if p]

    def engine(self, budget: Budget | None = None) -> Engine:
        return Engine(laurent_key(self.arity), budget)

    def reduce_internal(self, p: dict, budget: Budget | None = None) -> dict:
        return self.engine(budget).reduce(p, self.elements)

    def is_unit_ideal(self) -> bool:
        one = (0,) * (2 * self.arity + 1)
        return any(e.lm == one and e.lc == 1 for e in self.elements)


def groebner(arity: int, gens: Iterable[LaurentPoly], budget: Budget | None = None) -> GroebnerBasis:
    """Strong Groebner basis over Z of the ideal ``<gens>`` in the Laurent ring."""
    gens = tuple(gens)
    for g in gens:
        if g.nvars != arity:
            raise ValueError(f"generator in {g.nvars} variables, expected {arity}")
    engine = Engine(laurent_key(arity), budget)
    internal = [to_internal(g) for g in gens if g]
    elements = engine.groebner(inverse_relations(arity) + internal)
    return GroebnerBasis(arity, tuple(elements), gens)


def normal_form(p: LaurentPoly, gb: GroebnerBasis, budget: Budget | None = None) -> LaurentPoly:
    """Unique remainder of ``p``; zero exactly when ``p`` lies in the ideal."""
    if p.nvars != gb.arity:
        raise ValueError(f"polynomial in {p.nvars} variables, basis has arity {gb.arity}")
    return from_internal(gb.reduce_internal(to_internal(p), budget), gb.arity)


def contains(gb: GroebnerBasis, p: LaurentPoly, budget: Budget | None = None) -> bool:
    return normal_form(p, gb, budget).is_zero()


def ideal_equal(gb1: GroebnerBasis, gb2: GroebnerBasis, budget: Budget | None = None) -> bool:
    """Equality of ideals: each side's generators reduce to zero modulo the other."""
    if gb1.arity != gb2.arity:
        raise ValueError("ideals live in rings of different arity")
    return (all(contains(gb2, g, budget) for g in gb1.generators)
            and all(contains(gb1, g, budget) for g in gb2.generators))


class AdditiveStructure:
    """A finitely generated part of the quotient, as ``Z^monomials / relations``."""

    def __init__(self, engine: Engine, basis: Sequence[Element], seeds: Iterable[tuple]):
        self.monomials, self.relations = additive_relations(engine, basis, seeds)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        k = len(self.monomials)
        rows = [self.vector(r) for r in self.relations]
        self.data = quotient_data(k, SublatticeSpec.from_rows(k, rows))
        self.free_positions = [i for i, d in enumerate(self.data.moduli) if d == 0]

    @property
    def group(self) -> FgAbelianGroup:
        return self.data.group

    def vector(self, nf: dict) -> list[int]:
        v = [0] * len(self.monomials)
        for m, c in nf.items():
            v[self.index[m]] = c
        return v

    def coordinates(self, nf: dict) -> tuple[int, ...]:
        """Smith coordinates of a reduced element; torsion entries taken mod their order."""
        return self.data.coordinates(self.vector(nf))

    def free_coordinates(self, nf: dict) -> tuple[int, ...]:
        y = self.coordinates(nf)
        return tuple(y[i] for i in self.free_positions)

    def order(self, nf: dict) -> int | None:
        """Additive order of the class (None when infinite)."""
        y = self.coordinates(nf)
        out = 1
        for v, d in zip(y, self.data.moduli):
            if d == 0 and v:
                return None
            if d > 1:
                out = math.lcm(out, d // math.gcd(v, d))
        return out

    def generator(self, position: int) -> dict:
        """Reduced element whose coordinates are the unit vector at ``position``."""
        V_inv = self.data.V_inv
        return {m: V_inv[position, i] for i, m in enumerate(self.monomials) if V_inv[position, i]}


@dataclass(frozen=True)
class QuotientReport:
    """Additive structure of ``Z[t^(+-1)] / I`` read off a strong Groebner basis.

    ``z_rank`` is the rank of the free part (``INFINITE`` when the quotient
    is not finitely generated).  ``torsion_witness`` is an element of finite
    order > 1 with that order, a monomial whenever one exists.
    ``standard_monomials`` are the monomials under no leading term; there
    are exactly ``z_rank`` of them.  ``is_free`` is None when undecided
    (infinite staircase with non-unit leading coefficients).
    """

    z_rank: float | int
    is_free: bool | None
    torsion_witness: tuple[LaurentPoly, int] | None
    standard_monomials: tuple[tuple[int, ...], ...] | None
    group: FgAbelianGroup | None = None

    @property
    def finite(self) -> bool:
        return self.z_rank != INFINITE

    def to_json(self) -> dict:
        return {
            "z_rank": "INFINITE" if not self.finite else self.z_rank,
            "is_free": self.is_free,
            "group": None if self.group is None else str(self.group),
            "torsion_witness": None if self.torsion_witness is None
            else {"element": self.torsion_witness[0].to_json(), "order": self.torsion_witness[1]},
            "standard_monomials": None if self.standard_monomials is None
            else [list(m) for m in self.standard_monomials],
        }


def spanning_monomials(gb: GroebnerBasis) -> list[tuple] | None:
    """Internal monomials whose classes span the quotient additively (None if infinitely many)."""
    return order_ideal(2 * gb.arity, 0, [e.lm for e in gb.elements if e.lc == 1])


def additive_structure(gb: GroebnerBasis, budget: Budget | None = None) -> AdditiveStructure | None:
    """Exact Z-module structure of the quotient, or None when it is not finitely generated."""
    span = spanning_monomials(gb)
    if span is None:
        return None
    return AdditiveStructure(gb.engine(budget), gb.elements, span)


def quotient_report(gb: GroebnerBasis, budget: Budget | None = None) -> QuotientReport:
    d = gb.arity
    struct = additive_structure(gb, budget)
    if struct is None:
        free = True if all(e.lc == 1 for e in gb.elements) else None
        return QuotientReport(INFINITE, free, None, None)
    std = [m for m in struct.monomials if leading_modulus(m, gb.elements) == 0]
    monos = tuple(sorted((mono_to_laurent(m, d) for m in std), key=lambda e: (sum(e), e)))
    g = struct.group
    witness = None
    if g.torsion:
        for m in reversed(struct.monomials):
            k = struct.order({m: 1})
            if k is not None and k > 1:
                witness = (LaurentPoly.monomial(mono_to_laurent(m, d)), k)
                break
        if witness is None:
            pos = [i for i, x in enumerate(struct.data.moduli) if x > 1][0]
            witness = (from_internal(struct.generator(pos), d), struct.data.moduli[pos])
    return QuotientReport(g.free_rank, not g.torsion, witness, monos, g)


def z_coordinates(p: LaurentPoly, gb: GroebnerBasis, struct: AdditiveStructure,
                  budget: Budget | None = None) -> tuple[int, ...]:
    """Coordinates of the class of p in a Z-basis of the free quotient."""
    nf = gb.reduce_internal(to_internal(p), budget)
    return struct.free_coordinates(nf)
