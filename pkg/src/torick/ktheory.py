"""Presentations of K_0 of toric stacks and the checks around them.

Variable t_j is the class of the dual of the line bundle attached to
ray j; a character chi of the torus acts as t_chi = prod_j t_j^<-chi, v_j>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import BasisCheckFailed, NotCompleteOrSmooth, NotSmooth, NotSupported
from .fan import (
    Beta,
    Fan,
    ShellingOrder,
    StackyFan,
    is_complete,
    is_smooth,
    minimal_nonfaces,
    shelling_order,
    stacky_reduction,
)
from .lattice import (
    FgAbelianGroup,
    IntMatrix,
    SublatticeSpec,
    kernel_lattice,
    quotient_data,
    quotient_group,
    regenerate_basis,
)
from .laurent.engine import Budget
from .laurent.groebner import (
    INFINITE,
    additive_structure,
    groebner,
    ideal_equal,
    z_coordinates,
)
from .laurent.grouprings import group_ring
from .laurent.koszul import TorResult, koszul_tor
from .laurent.poly import LaurentPoly, product_of_differences
from .laurent.presentation import (
    CoefficientTag,
    RingPresentation,
    fresh_names,
    tensor_presentations,
)


def ray_names(d: int) -> tuple[str, ...]:
    return tuple(f"t{j + 1}" for j in range(d))


def ray_annotations(d: int, names: Sequence[str] | None = None) -> dict[str, str]:
    names = names or ray_names(d)
    return {v: f"class of the dual line bundle of ray {j + 1}" for j, v in enumerate(names)}


def stanley_reisner_ideal(f: Fan) -> list[LaurentPoly]:
    """prod_{j in S} (t_j - 1) for every minimal non-face S."""
    return [product_of_differences(f.nrays, s) for s in minimal_nonfaces(f)]


def character_exponents(f: Fan, chi: Sequence[int]) -> tuple[int, ...]:
    return tuple(-sum(a * b for a, b in zip(chi, v)) for v in f.rays)


def character_monomial(f: Fan, chi: Sequence[int]) -> LaurentPoly:
    return LaurentPoly.monomial(character_exponents(f, chi))


def character_ideal(f: Fan, sub: SublatticeSpec) -> list[LaurentPoly]:
    """t_chi - 1 over a Hermite basis of the character sublattice."""
    if sub.ambient_rank != f.lattice_rank:
        raise ValueError(f"characters live in Z^{sub.ambient_rank}, fan in Z^{f.lattice_rank}")
    return character_relations(f, sub.hermite_basis())


def character_relations(f: Fan, rows: Sequence[Sequence[int]]) -> list[LaurentPoly]:
    return [character_monomial(f, chi) - 1 for chi in rows]


def _reduced_sublattice(sf: StackyFan) -> SublatticeSpec:
    g = sf.group
    if isinstance(g, Beta) and g.target.torsion:
        raise NotSupported("beta with a torsion target: reduce the stacky fan first")
    return sf.character_sublattice()


def _presentation(f: Fan, sub: SublatticeSpec, names=None, extra_ann=None) -> RingPresentation:
    names = names or ray_names(f.nrays)
    rels = stanley_reisner_ideal(f) + character_ideal(f, sub)
    ann = ray_annotations(f.nrays, names)
    if extra_ann:
        ann.update(extra_ann)
    return RingPresentation(CoefficientTag.INTEGERS, tuple(names), tuple(rels), ann)


def split_data(sf: StackyFan) -> tuple[FgAbelianGroup, FgAbelianGroup, FgAbelianGroup]:
    """(G^dual, F^dual, H^dual) for a beta-form stacky fan, H the part acting trivially."""
    red = stacky_reduction(sf)
    n = sf.fan.lattice_rank
    s = red.s
    basis = red.stacky_fan.character_sublattice().hermite_basis()
    G = red.group
    H = quotient_group(s, SublatticeSpec.from_rows(s, [b[n:] for b in basis]))
    if basis:
        A = IntMatrix.from_rows([b[n:] for b in basis], s) if s else IntMatrix.zeros(len(basis), 0)
        K = kernel_lattice(A.T) if s else IntMatrix.identity(len(basis))
        rows = [[sum(K[i, k] * basis[k][j] for k in range(len(basis))) for j in range(n)]
                for i in range(K.rows)]
    else:
        rows = []
    F = quotient_group(n, SublatticeSpec.from_rows(n, rows))
    return G, F, H


def k0_presentation(sf: StackyFan) -> RingPresentation:
    """K_0 of the toric stack as Z[t^(+-1)] / (Stanley-Reisner + character relations).

    A beta form with torsion target is computed on the enlarged fan of its
    reduction; the extra variables u_k belong to the new rays.
    """
    g = sf.group
    if isinstance(g, Beta) and g.target.torsion:
        red = stacky_reduction(sf)
        G, F, H = split_data(sf)
        if FgAbelianGroup.from_invariants(list(F.torsion) + list(H.torsion),
                                          F.free_rank + H.free_rank) != G:
            raise NotSupported(f"the extension of {F} by {H} does not split")
        f2 = red.stacky_fan.fan
        if not is_smooth(f2):
            raise NotSmooth("the fan is not smooth")
        d = sf.fan.nrays
        names = ray_names(d) + tuple(f"u{k + 1}" for k in range(red.s))
        extra = {f"u{k + 1}": f"character {k + 1} of the torus added by the reduction"
                 for k in range(red.s)}
        p = _presentation(f2, red.stacky_fan.character_sublattice(), names, extra)
        return p
    if not is_smooth(sf.fan):
        raise NotSmooth("the fan is not smooth")
    return _presentation(sf.fan, _reduced_sublattice(sf))


def regenerated_k0(sf: StackyFan, rng) -> RingPresentation:
    """k0_presentation with the character relations taken over a random other basis."""
    p = k0_presentation(sf)
    g = sf.group
    if isinstance(g, Beta) and g.target.torsion:
        red = stacky_reduction(sf)
        f, sub = red.stacky_fan.fan, red.stacky_fan.character_sublattice()
    else:
        f, sub = sf.fan, _reduced_sublattice(sf)
    rels = stanley_reisner_ideal(f) + character_relations(f, regenerate_basis(sub, rng))
    return RingPresentation(p.coefficient_tag, p.variables, tuple(rels), p.annotations)


def kt0(f: Fan) -> RingPresentation:
    """K_0 of [X/T]: Stanley-Reisner relations only."""
    if not is_smooth(f):
        raise NotSmooth("the fan is not smooth")
    return _presentation(f, SublatticeSpec.zero(f.lattice_rank))


def tensor_split(p: RingPresentation, extra: FgAbelianGroup) -> RingPresentation:
    """p tensored over Z with the group ring of ``extra``."""
    if extra.is_trivial:
        return p
    k = extra.free_rank + len(extra.torsion)
    names = fresh_names("x", k, p.variables)
    q = group_ring(extra)
    q = RingPresentation(q.coefficient_tag, names,
                         q.relations, {n: q.annotations[o] for n, o in zip(names, q.variables)})
    return tensor_presentations(p, q)


def _unit_binomial(r: LaurentPoly):
    """For r = +-(m1 - c m2) with c = +-1: the exponent m1 - m2 and c."""
    if len(r) != 2:
        return None
    (e1, c1), (e2, c2) = r.sorted_terms()
    if abs(c1) != 1 or abs(c2) != 1:
        return None
    return tuple(a - b for a, b in zip(e1, e2)), -c2 * c1


def simplify(p: RingPresentation) -> tuple[RingPresentation, dict[str, LaurentPoly]]:
    """Eliminate variables fixed by unit binomial relations like t1^-1*t3 - 1.

    Returns the smaller presentation (isomorphic quotient ring) and the
    images of the eliminated variables in terms of the remaining ones.
    """
    names = list(p.variables)
    rels = list(p.relations)
    subs: dict[str, LaurentPoly] = {}
    while True:
        found = None
        for ri, r in enumerate(rels):
            b = _unit_binomial(r)
            if b is None:
                continue
            e, c = b
            for i, x in enumerate(e):
                if abs(x) == 1:
                    found = (ri, i, e, c)
                    break
            if found:
                break
        if not found:
            break
        ri, i, e, c = found
        n = len(names)
        # t^e = c  =>  t_i = (c * prod_{j != i} t_j^{-e_j})^{e_i}
        rest = [-x if j != i else 0 for j, x in enumerate(e)]
        image = LaurentPoly.monomial(rest, c)
        if e[i] == -1:
            image = image ** -1
        images = [image if j == i else LaurentPoly.variable(n, j) for j in range(n)]
        keep = [j for j in range(n) if j != i]
        new_rels = []
        for k, r in enumerate(rels):
            if k == ri:
                continue
            q = r.substitute(images)
            q = LaurentPoly(n - 1, {tuple(x for j, x in enumerate(ex) if j != i): v
                                    for ex, v in q.items()})
            if q:
                new_rels.append(q)
        img = LaurentPoly(n - 1, {tuple(x for j, x in enumerate(ex) if j != i): v
                                  for ex, v in image.items()})
        for name in list(subs):
            subs[name] = subs[name].substitute(
                [img if j == i else LaurentPoly.variable(n - 1, keep.index(j))
                 for j in range(n)])
        subs[names[i]] = img
        names.pop(i)
        rels = new_rels
    ann = {v: p.annotations[v] for v in names}
    ann.update({k: v for k, v in p.annotations.items() if k not in p.variables})
    for name, img in subs.items():
        ann[f"eliminated {name}"] = img.format(names)
    return RingPresentation(p.coefficient_tag, tuple(names), tuple(rels), ann), subs


def wps_relation(q: Sequence[int]) -> LaurentPoly:
    t = LaurentPoly.variable(1, 0)
    out = LaurentPoly.constant(1, 1)
    for qi in q:
        out = out * (1 - t ** qi)
    return out


def _check_weights(q: Sequence[int]) -> tuple[int, ...]:
    q = tuple(int(x) for x in q)
    if not q or any(x < 1 for x in q):
        raise ValueError("weights must be a non-empty list of positive integers")
    return q


def wps_presentation(q: Sequence[int]) -> RingPresentation:
    """K_*(P(q)) = K_*(k)[t^(+-1)] / prod (1 - t^q_i)."""
    q = _check_weights(q)
    return RingPresentation(
        CoefficientTag.GRADED_K_OF_FIELD, ("t",), (wps_relation(q),),
        {"t": "class of the weight-one character of the acting one-dimensional torus"},
    )


def wps_coarse_presentations(q: Sequence[int]) -> tuple[RingPresentation, RingPresentation]:
    """K_* of [P^n / mu_q0 x ... x mu_qn], and rational G_* of the coarse space."""
    q = _check_weights(q)
    n = len(q) - 1
    k = n + 2
    t = LaurentPoly.variable(k, 0)
    rels = [(t - 1) ** (n + 1)]
    rels += [LaurentPoly.variable(k, i + 1, qi) - 1 for i, qi in enumerate(q)]
    names = ("t",) + tuple(f"t{i}" for i in range(n + 1))
    ann = {"t": "class of O(1) on P^n"}
    ann.update({f"t{i}": f"generator of the characters of mu_{qi}" for i, qi in enumerate(q)})
    stack = RingPresentation(CoefficientTag.GRADED_K_OF_FIELD, names, tuple(rels), ann)
    t1 = LaurentPoly.variable(1, 0)
    coarse = RingPresentation(
        CoefficientTag.RATIONAL, ("t",), ((t1 - 1) ** (n + 1),),
        {"t": "class of O(1) pushed to the coarse space",
         "characteristic": "valid when the characteristic of k divides no weight"},
    )
    return stack, coarse


# -- cell basis -------------------------------------------------------------


@dataclass(frozen=True)
class BasisReport:
    mode: str
    expected_rank: int
    quotient_rank: int | float
    determinant: int | None
    passed: bool

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "expected_rank": self.expected_rank,
            "quotient_rank": "INFINITE" if self.quotient_rank == INFINITE else self.quotient_rank,
            "determinant": self.determinant,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CellBasis:
    elements: tuple[LaurentPoly, ...]
    order: ShellingOrder
    report: BasisReport

    def to_json(self, names: Sequence[str]) -> dict:
        return {
            "elements": [self.elements[c].format(names) for c in self.order.order],
            "order": self.order.to_json(),
            "verification": self.report.to_json(),
        }


def cell_elements(f: Fan, so: ShellingOrder) -> tuple[LaurentPoly, ...]:
    """prod_{rho in tau_i} (1 - t_rho), indexed by maximal cone."""
    out = []
    for tau in so.tau:
        p = LaurentPoly.constant(f.nrays, 1)
        for j in sorted(tau):
            p = p * (1 - LaurentPoly.variable(f.nrays, j))
        out.append(p)
    return tuple(out)


def _unimodular_check(f: Fan, sub: SublatticeSpec, elements, budget) -> tuple[int | float, int | None, int]:
    """Determinant of the character translates of the cells in a Z-basis of the quotient."""
    gb = _presentation(f, sub).groebner(budget)
    struct = additive_structure(gb, budget)
    reps = quotient_data(f.lattice_rank, sub).coset_representatives()
    products = [character_monomial(f, chi) * b for chi in reps for b in elements]
    if struct is None:
        return INFINITE, None, len(products)
    g = struct.group
    if g.torsion or g.free_rank != len(products):
        return g.free_rank, None, len(products)
    rows = [z_coordinates(p, gb, struct, budget) for p in products]
    det = IntMatrix.from_rows(rows, g.free_rank).det()
    return g.free_rank, det, len(products)


def cell_basis(sf: StackyFan, so: ShellingOrder | None = None, budget: Budget | None = None
               ) -> CellBasis:
    f = sf.fan
    if not (is_smooth(f) and is_complete(f)):
        raise NotCompleteOrSmooth("the cell basis needs a smooth complete fan")
    sub = _reduced_sublattice(sf)
    so = so or shelling_order(f, budget)
    elements = cell_elements(f, so)
    G = quotient_group(f.lattice_rank, sub)
    if G.free_rank == 0:
        mode = "finite group: character translates of the cells"
        used = sub
    else:
        mode = "all characters specialised to 1"
        used = SublatticeSpec.whole(f.lattice_rank)
    rank, det, expected = _unimodular_check(f, used, elements, budget)
    passed = det is not None and abs(det) == 1
    report = BasisReport(mode, expected, rank, det, passed)
    if not passed:
        raise BasisCheckFailed(f"cell classes do not form a Z-basis ({report.to_json()})")
    return CellBasis(elements, so, report)


# -- Tor and the edge map ---------------------------------------------------


@dataclass(frozen=True)
class EdgeReport:
    tor: TorResult
    edge_isomorphism: bool
    degenerate: bool
    s_max: int

    def to_json(self) -> dict:
        return {
            "edge_isomorphism": self.edge_isomorphism,
            "higher_tor_vanishes": self.degenerate,
            "s_max": self.s_max,
            "tor": self.tor.to_json(),
        }


def edge_and_tor(sf: StackyFan, s_max: int = 3, budget: Budget | None = None) -> EdgeReport:
    """Tor^{R(T)}(R(G), K_0([X/T])) by Koszul homology, and the degree-0 edge comparison."""
    f = sf.fan
    if not is_smooth(f):
        raise NotSmooth("the fan is not smooth")
    sub = _reduced_sublattice(sf)
    seq = character_ideal(f, sub)
    module = stanley_reisner_ideal(f)
    tor = koszul_tor(f.nrays, seq, module, s_max, budget=budget)
    k0 = k0_presentation(sf)
    edge = ideal_equal(k0.groebner(budget), groebner(f.nrays, tor.tor0_relations(), budget), budget)
    degenerate = all(tor.degree(s).vanishes for s in range(1, s_max + 1))
    return EdgeReport(tor, edge, degenerate, s_max)


def expected_rank(sf: StackyFan) -> int | None:
    """#maximal cones times |G^dual| when G is finite."""
    G = quotient_group(sf.fan.lattice_rank, _reduced_sublattice(sf))
    if G.order is None:
        return None
    return len(sf.fan.max_cones) * G.order
