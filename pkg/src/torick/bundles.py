"""Stanley-Reisner algebras over a coefficient ring with designated units.

The coefficient ring A is a Laurent ring on named base variables.  Each
designated unit r_i is paired, in order, with the i-th Hermite basis
character chi'_i of the subgroup, giving the relation t_{chi'_i} - r_i.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import MalformedRelation, NotComplete, NotSmooth, NotSupported, UnitArityMismatch
from .fan import Fan, is_complete, is_smooth
from .ktheory import character_exponents, ray_annotations, ray_names, stanley_reisner_ideal
from .lattice import SublatticeSpec, quotient_data
from .laurent.engine import Budget, Engine, order_ideal
from .laurent.groebner import INFINITE, from_internal, inverse_relations, to_internal
from .laurent.poly import LaurentPoly
from .laurent.presentation import CoefficientTag, RingPresentation

_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?$")


def parse_unit(text: str, base_vars: Sequence[str]) -> LaurentPoly:
    """Parse ``1``, ``-1``, ``u1``, ``-u2`` or ``u1*u2^-1`` into a signed monomial."""
    s = text.replace(" ", "")
    sign = 1
    if s.startswith("-"):
        sign, s = -1, s[1:]
    elif s.startswith("+"):
        s = s[1:]
    exps = [0] * len(base_vars)
    if s != "1":
        if not s:
            raise ValueError(f"empty unit {text!r}")
        for factor in s.split("*"):
            m = _FACTOR.match(factor)
            if not m or m.group(1) not in base_vars:
                raise ValueError(f"cannot read {factor!r} in unit {text!r}")
            exps[base_vars.index(m.group(1))] += int(m.group(2) or 1)
    return LaurentPoly.monomial(exps, sign)


@dataclass(frozen=True)
class CoefficientRingSpec:
    """A = Z[base_vars^(+-1)] / relations, with units r_1..r_k."""

    base_vars: tuple[str, ...]
    units: tuple[LaurentPoly, ...]
    relations: tuple[LaurentPoly, ...] = ()

    def __post_init__(self):
        k = len(self.base_vars)
        for u in self.units + self.relations:
            if u.nvars != k:
                raise ValueError(f"polynomial in {u.nvars} variables, A has {k}")
        for u in self.units:
            if len(u) != 1 or abs(next(iter(u.items()))[1]) != 1:
                raise ValueError(f"designated unit {u.format(self.base_vars)} is not +-monomial")

    @classmethod
    def parse(cls, base_vars: Sequence[str], units: Sequence[str]) -> CoefficientRingSpec:
        base_vars = tuple(base_vars)
        return cls(base_vars, tuple(parse_unit(u, base_vars) for u in units))

    @property
    def arity(self) -> int:
        return len(self.base_vars)


@dataclass(frozen=True)
class BundlePresentation:
    """R_G(A, fan) with variables t_1..t_d followed by the base variables."""

    presentation: RingPresentation
    fan: Fan
    sub: SublatticeSpec
    coefficients: CoefficientRingSpec
    reln1: tuple[LaurentPoly, ...]
    reln2: tuple[LaurentPoly, ...]
    base_relations: tuple[LaurentPoly, ...] = field(default=())

    @property
    def nfan(self) -> int:
        return self.fan.nrays

    def specialise_units(self) -> tuple[LaurentPoly, ...]:
        """Relations on the fan variables alone after sending every base variable to 1."""
        d, k = self.nfan, self.coefficients.arity
        images = [LaurentPoly.variable(d, j) for j in range(d)] + [LaurentPoly.constant(d, 1)] * k
        return tuple(q for q in (r.substitute(images) for r in self.presentation.relations) if q)


def sr_algebra(f: Fan, sub: SublatticeSpec, A: CoefficientRingSpec) -> BundlePresentation:
    if not is_smooth(f):
        raise NotSmooth("the fan is not smooth")
    if not is_complete(f):
        raise NotComplete("the fan is not complete")
    basis = sub.hermite_basis()
    if len(basis) != len(A.units):
        raise UnitArityMismatch(
            f"{len(A.units)} designated units for {len(basis)} basis characters of the subgroup"
        )
    d, k = f.nrays, A.arity
    n = d + k
    fan_pos = list(range(d))
    base_pos = list(range(d, n))
    reln1 = tuple(r.embed(n, fan_pos) for r in stanley_reisner_ideal(f))
    reln2 = tuple(
        LaurentPoly.monomial(character_exponents(f, chi) + (0,) * k) - u.embed(n, base_pos)
        for chi, u in zip(basis, A.units)
    )
    base = tuple(r.embed(n, base_pos) for r in A.relations)
    names = ray_names(d) + A.base_vars
    if len(set(names)) != n:
        raise ValueError(f"base variable names clash with fan variables {ray_names(d)}")
    ann = {v: f"class of the bundle induced by the dual line bundle of ray {j + 1}"
           for j, v in enumerate(ray_names(d))}
    ann.update({v: "invertible class of the coefficient ring" for v in A.base_vars})
    for chi, u in zip(basis, A.units):
        ann[f"unit for character {list(chi)}"] = u.format(A.base_vars)
    pres = RingPresentation(CoefficientTag.USER_RING, names, reln1 + reln2 + base, ann)
    return BundlePresentation(pres, f, sub, A, reln1, reln2, base)


def fiber_presentation(bp: BundlePresentation) -> RingPresentation:
    """The Stanley-Reisner quotient with all units set to 1, on the fan variables."""
    d = bp.nfan
    return RingPresentation(CoefficientTag.INTEGERS, ray_names(d), bp.specialise_units(),
                            ray_annotations(d))


# -- freeness over A --------------------------------------------------------


@dataclass(frozen=True)
class MonomialBasisReport:
    rank: int | float
    basis: tuple[tuple[int, ...], ...] | None

    def to_json(self) -> dict:
        return {
            "rank": "INFINITE" if self.rank == INFINITE else self.rank,
            "basis": None if self.basis is None else [list(b) for b in self.basis],
        }


def split_unit_relation(r: LaurentPoly, nfan: int) -> tuple[tuple[int, ...], LaurentPoly]:
    """Read ``+-(x^a - unit)`` as the fan exponent a and the signed base monomial."""
    terms = r.sorted_terms()
    if len(terms) != 2:
        raise MalformedRelation(f"expected two terms, got {len(terms)}")
    for sign in (1, -1):
        for (e1, c1), (e2, c2) in (terms, terms[::-1]):
            if (sign * c1 == 1 and abs(c2) == 1 and not any(e1[nfan:])
                    and not any(e2[:nfan])):
                return e1[:nfan], LaurentPoly.monomial(e2[nfan:], -sign * c2)
    raise MalformedRelation("relation is not a fan monomial minus a unit")


def unit_monomial_freeness(A: CoefficientRingSpec, relations: Sequence[LaurentPoly],
                           nfan: int) -> MonomialBasisReport:
    """A[x^(+-1)] / (x^a_i - r_i) as an A-module: free on coset representatives of <a_i>.

    Relations live in ``nfan + A.arity`` variables, fan variables first.
    """
    exps = []
    for r in relations:
        if r.nvars != nfan + A.arity:
            raise MalformedRelation(f"relation in {r.nvars} variables, expected {nfan + A.arity}")
        a, _unit = split_unit_relation(r, nfan)
        exps.append(a)
    H = SublatticeSpec.from_rows(nfan, exps).hermite_basis()
    if len(H) < nfan:
        return MonomialBasisReport(INFINITE, None)
    # full rank: the Hermite pivots sit on the diagonal and the box below them
    # meets every coset exactly once
    box = itertools.product(*(range(H[i][i]) for i in range(nfan)))
    reps = sorted(box, key=lambda e: (sum(e), e))
    return MonomialBasisReport(len(reps), tuple(reps))


@dataclass(frozen=True)
class BundleRankReport:
    a_free: bool | None
    a_rank: int | float
    expected: int | None
    matches: bool | None
    basis: tuple[tuple[int, ...], ...] | None
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "a_free": self.a_free,
            "a_rank": "INFINITE" if self.a_rank == INFINITE else self.a_rank,
            "expected_rank": self.expected,
            "rank_law_holds": self.matches,
            "basis": None if self.basis is None else [list(b) for b in self.basis],
            "notes": list(self.notes),
        }


def block_key(nfan: int, nbase: int):
    """Fan block (graded, inverse variables first) above the base block."""
    n = nfan + nbase

    def key(m):
        t, y = m[1:1 + n], m[1 + n:1 + 2 * n]
        ft, fy, bt, by = t[:nfan], y[:nfan], t[nfan:], y[nfan:]
        return (m[0], sum(ft) + sum(fy)) + fy + ft + (sum(bt) + sum(by),) + by + bt
    return key


def _fan_part(m, nfan: int, n: int) -> tuple[int, ...]:
    return m[1:1 + nfan] + m[1 + n:1 + n + nfan]


def bundle_rank_check(bp: BundlePresentation, budget: Budget | None = None) -> BundleRankReport:
    """A-freeness and A-rank of R_G(A, fan) from a block-order Groebner basis."""
    A = bp.coefficients
    if A.relations:
        raise NotSupported("coefficient rings with extra relations are not handled")
    d, k = bp.nfan, A.arity
    n = d + k
    eng = Engine(block_key(d, k), budget or Budget())
    gens = inverse_relations(n) + [to_internal(r) for r in bp.presentation.relations]
    G = eng.groebner(gens)
    notes = []
    free: bool | None = True
    blocked = []
    for e in G:
        fl = _fan_part(e.lm, d, n)
        if not any(fl):
            if from_internal(e.poly, n):
                free = False
                notes.append("the ideal meets the coefficient ring")
            continue
        lead = {m: c for m, c in e.poly.items() if _fan_part(m, d, n) == fl}
        coeff = from_internal(lead, n)
        if len(coeff) != 1 or abs(next(iter(coeff.items()))[1]) != 1:
            if free:
                free = None
            notes.append(f"leading coefficient {coeff.format(bp.presentation.variables)} is not a unit")
        blocked.append((0,) + fl)
    std = order_ideal(2 * d, 0, blocked)
    if std is None:
        rank: int | float = INFINITE
        basis = None
    else:
        rank = len(std)
        basis = tuple(sorted((tuple(a - b for a, b in zip(m[1:1 + d], m[1 + d:])) for m in std),
                             key=lambda e: (sum(e), e)))
    q = quotient_data(bp.fan.lattice_rank, bp.sub).group
    expected = None
    if q.free_rank == 0:
        expected = len(bp.fan.max_cones) * (q.order or 1)
    else:
        notes.append("G has positive dimension: the rank is taken over A tensor R(G)")
    matches = None if expected is None or free is not True else rank == expected
    return BundleRankReport(free, rank, expected, matches, basis, tuple(notes))
