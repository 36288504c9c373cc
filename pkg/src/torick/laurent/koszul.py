"""Koszul homology of a cyclic module over a Laurent ring.

For a sequence e_1..e_r in R = Z[t^(+-1)] and A = R / I, the Koszul
complex K(e) (x) A has K_s = A^(r choose s) with basis e_S over s-subsets S
and d(e_S) = sum_k (-1)^k e_{S[k]} e_{S - S[k]}.  When e is a regular
sequence on R its homology is Tor^R(R/(e), A).

Two routes:

* ``finite``: A is a free Z-module of finite rank, so every K_s is a
  finite free Z-module and the homology comes from Smith forms.
* ``module``: submodules of R^k are handled by strong Groebner bases with
  one component per basis vector.  Cycles are found by the usual
  elimination trick on the graph of d, boundaries are im d + I K_s.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import UnsupportedModule
from ..lattice import (
    FgAbelianGroup,
    IntMatrix,
    SublatticeSpec,
    kernel_lattice,
    quotient_group,
    smith_normal_form,
)
from .engine import Budget, Element, Engine, add_into, additive_relations, shift
from .groebner import (
    additive_structure,
    from_internal,
    groebner,
    inverse_relations,
    laurent_key,
    spanning_monomials,
    to_internal,
)
from .poly import LaurentPoly

ROUTES = ("auto", "finite", "module")


def koszul_basis(r: int, s: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(r), s))


def koszul_differential(seq: Sequence[LaurentPoly], s: int) -> list[list[tuple[int, LaurentPoly]]]:
    """``d_s`` as a list over source basis vectors of (target index, coefficient) pairs."""
    r = len(seq)
    target = {S: i for i, S in enumerate(koszul_basis(r, s - 1))}
    out = []
    for S in koszul_basis(r, s):
        col = []
        for k, j in enumerate(S):
            rest = S[:k] + S[k + 1:]
            c = seq[j] if k % 2 == 0 else -seq[j]
            col.append((target[rest], c))
        out.append(col)
    return out


@dataclass(frozen=True)
class TorDegree:
    """One homological degree.

    ``cycles`` are cycle generators (vectors over R, one entry per Koszul
    basis vector) that survive modulo ``boundaries``; together they present
    the homology as the subquotient Z_s / B_s of R^(r choose s).  ``group``
    is the additive structure when it could be computed.
    """

    s: int
    width: int
    cycles: tuple[tuple[LaurentPoly, ...], ...]
    boundaries: tuple[tuple[LaurentPoly, ...], ...]
    vanishes: bool
    group: FgAbelianGroup | None

    @property
    def z_rank(self):
        if self.vanishes:
            return 0
        if self.group is None:
            return None
        return self.group.free_rank

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "width": self.width,
            "vanishes": self.vanishes,
            "z_rank": self.z_rank,
            "group": None if self.group is None else str(self.group),
            "cycles": [[p.to_json() for p in v] for v in self.cycles],
        }


@dataclass(frozen=True)
class TorResult:
    base_arity: int
    sequence: tuple[LaurentPoly, ...]
    module_rel: tuple[LaurentPoly, ...]
    degrees: tuple[TorDegree, ...]
    route: str
    regular: bool
    warnings: tuple[str, ...] = field(default=())

    def degree(self, s: int) -> TorDegree:
        """Degree s; above the length of the sequence this is the zero module."""
        if s > len(self.sequence) or s < 0:
            return TorDegree(s, 0, (), (), True, FgAbelianGroup())
        for d in self.degrees:
            if d.s == s:
                return d
        raise KeyError(f"degree {s} was not computed")

    def tor0_relations(self) -> tuple[LaurentPoly, ...]:
        """Ideal presenting Tor_0 = R / (I + (e))."""
        return self.module_rel + self.sequence

    def to_json(self) -> dict:
        return {
            "base_arity": self.base_arity,
            "route": self.route,
            "regular_sequence_checked": self.regular,
            "warnings": list(self.warnings),
            "degrees": [d.to_json() for d in self.degrees],
        }


# -- finite route -------------------------------------------------------


def _homology_groups(mats: dict[int, IntMatrix], dims: dict[int, int], s_range) -> dict[int, FgAbelianGroup]:
    """H_s of a complex of free Z-modules; ``mats[s]`` maps Z^dims[s] -> Z^dims[s-1] on columns."""
    out = {}
    for s in s_range:
        n = dims[s]
        if n == 0:
            out[s] = FgAbelianGroup()
            continue
        d = mats.get(s)
        if d is None or d.rows == 0:
            Z = IntMatrix.identity(n)
        else:
            Z = kernel_lattice(d)
        if Z.rows == 0:
            out[s] = FgAbelianGroup()
            continue
        nxt = mats.get(s + 1)
        # boundaries as integer combinations of the cycle basis
        if nxt is None or nxt.cols == 0:
            coords = []
        else:
            coords = _solve_in_basis(Z, [nxt.column(j) for j in range(nxt.cols)])
        out[s] = quotient_group(Z.rows, SublatticeSpec.from_rows(Z.rows, coords))
    return out


def _solve_in_basis(Z: IntMatrix, vectors) -> list[tuple[int, ...]]:
    """Coordinates of vectors in the row basis Z (they must lie in its span)."""
    # x Z = v  <=>  Z^T x^T = v^T; use the Smith form of Z^T
    A = Z.T
    snf = smith_normal_form(A)
    out = []
    for v in vectors:
        w = [sum(snf.U[i, j] * v[j] for j in range(A.rows)) for i in range(A.rows)]
        y = []
        for i in range(A.cols):
            d = snf.D[i, i] if i < min(A.rows, A.cols) else 0
            if d == 0:
                if i < A.rows and w[i]:
                    raise ValueError("vector outside the span of the basis")
                y.append(0)
            else:
                if w[i] % d:
                    raise ValueError("vector outside the lattice of the basis")
                y.append(w[i] // d)
        for i in range(A.cols, A.rows):
            if w[i]:
                raise ValueError("vector outside the span of the basis")
        x = [sum(snf.V[i, j] * y[j] for j in range(A.cols)) for i in range(A.cols)]
        out.append(tuple(x))
    return out


def _finite_route(d, seq, rel, s_max, budget):
    gb = groebner(d, rel, budget)
    struct = additive_structure(gb, budget)
    if struct is None or struct.group.torsion:
        raise UnsupportedModule("finite route needs a free module of finite Z-rank")
    engine = gb.engine(budget)
    basis = [struct.generator(i) for i in struct.free_positions]
    N = len(basis)

    def mult_matrix(e: LaurentPoly) -> list[list[int]]:
        ei = to_internal(e)
        cols = []
        for b in basis:
            prod: dict = {}
            for m, c in ei.items():
                add_into(prod, shift(b, m[1:], c))
            cols.append(struct.free_coordinates(engine.reduce(prod, gb.elements)))
        return [[cols[j][i] for j in range(N)] for i in range(N)]

    r = len(seq)
    mult = [mult_matrix(e) for e in seq]
    dims = {s: math.comb(r, s) * N for s in range(r + 2)}
    mats = {}
    for s in range(1, r + 1):
        rows = dims[s - 1]
        M = [[0] * dims[s] for _ in range(rows)]
        target = {S: i for i, S in enumerate(koszul_basis(r, s - 1))}
        for src, S in enumerate(koszul_basis(r, s)):
            for k, j in enumerate(S):
                tgt = target[S[:k] + S[k + 1:]]
                sign = 1 if k % 2 == 0 else -1
                for a in range(N):
                    for b in range(N):
                        M[tgt * N + a][src * N + b] += sign * mult[j][a][b]
        mats[s] = IntMatrix.from_rows(M, dims[s]) if rows else IntMatrix.zeros(0, dims[s])
    groups = _homology_groups(mats, dims, range(0, min(s_max, r) + 1))
    out = []
    for s in range(0, min(s_max, r) + 1):
        g = groups[s]
        out.append(TorDegree(s, math.comb(r, s), (), (), g.is_trivial, g))
    return out


# -- module route ---------------------------------------------------------


class _Modules:
    """Submodules of R^k, R = Z[t^(+-1)] in d variables, over one engine."""

    def __init__(self, d: int, budget: Budget):
        self.d = d
        self.engine = Engine(laurent_key(d), budget, module=True)

    def vec(self, entries: Sequence[LaurentPoly], offset: int = 0) -> dict:
        out: dict = {}
        for i, p in enumerate(entries):
            add_into(out, to_internal(p, offset + i))
        return out

    def unvec(self, v: dict, k: int, offset: int = 0) -> tuple[LaurentPoly, ...]:
        parts: list[dict] = [{} for _ in range(k)]
        for m, c in v.items():
            parts[m[0] - offset][(0,) + m[1:]] = c
        return tuple(from_internal(p, self.d) for p in parts)

    def ring_relations(self, components: range) -> list[dict]:
        out = []
        for c in components:
            out += inverse_relations(self.d, c)
        return out

    def gb(self, gens: list[dict], components: range) -> list[Element]:
        return self.engine.groebner(self.ring_relations(components) + [g for g in gens if g])


def _module_route(d, seq, rel, s_max, budget):
    mods = _Modules(d, budget)
    eng = mods.engine
    r = len(seq)
    top = min(s_max, r)
    rel_int = [to_internal(p) for p in rel if p]

    def ideal_times_basis(k: int, offset: int = 0) -> list[dict]:
        return [{(c + offset,) + m[1:]: v for m, v in p.items()} for c in range(k) for p in rel_int]

    # A' = R / (I + (e)) spans every homology group over Z
    gb_a = groebner(d, list(rel) + list(seq), budget)
    span = spanning_monomials(gb_a)

    out = []
    for s in range(0, top + 1):
        ms = math.comb(r, s)
        # cycles: source part of a Groebner basis of the graph of d_s
        if s == 0:
            cycles = [mods.vec([LaurentPoly.constant(d, 1)])]
        else:
            mt = math.comb(r, s - 1)
            diff = koszul_differential(seq, s)
            graph = []
            for k, col in enumerate(diff):
                v = {(k,) + (0,) * (2 * d): 1}
                for tgt, c in col:
                    add_into(v, to_internal(c, ms + tgt))
                graph.append(v)
            gens = graph + ideal_times_basis(mt, ms) + ideal_times_basis(ms)
            G = mods.gb(gens, range(ms + mt))
            cycles = [e.poly for e in G if e.lm[0] < ms]
        # boundaries: im d_{s+1} + I K_s
        bgens = ideal_times_basis(ms)
        if s < r:
            for col in koszul_differential(seq, s + 1):
                v: dict = {}
                for tgt, c in col:
                    add_into(v, to_internal(c, tgt))
                bgens.append(v)
        B = mods.gb(bgens, range(ms))
        survivors = []
        for z in cycles:
            nz = eng.reduce(z, B)
            if nz:
                survivors.append(nz)
        vanishes = not survivors
        group = FgAbelianGroup() if vanishes else _span_group(eng, survivors, B, span, d)
        cyc = tuple(mods.unvec(z, ms) for z in survivors)
        bnd = tuple(mods.unvec(e.poly, ms) for e in B if not _is_ring_relation(e.poly, d))
        out.append(TorDegree(s, ms, cyc, bnd, vanishes, group))
    return out


def _is_ring_relation(p: dict, d: int) -> bool:
    return from_internal({(0,) + m[1:]: c for m, c in p.items()}, d).is_zero() and len(
        {m[0] for m in p}) == 1


def _span_group(eng: Engine, cycles: list[dict], B: list[Element], span, d: int) -> FgAbelianGroup | None:
    """Additive group generated by the cycle classes, or None if A' is not Z-finite."""
    if span is None:
        return None
    vectors = [eng.reduce(shift(z, m[1:]), B) for z in cycles for m in span]
    monos, rels = additive_relations(eng, B, {m for v in vectors for m in v})
    index = {m: i for i, m in enumerate(monos)}
    k = len(monos)
    if k == 0:
        return FgAbelianGroup()

    def row(v: dict) -> list[int]:
        out = [0] * k
        for m, c in v.items():
            out[index[m]] = c
        return out

    # a.V + b.R = 0 describes the relations among the vectors
    n = len(vectors)
    stacked = IntMatrix.from_rows([row(v) for v in vectors] + [row(r) for r in rels], k)
    K = kernel_lattice(stacked.T)
    return quotient_group(n, SublatticeSpec.from_rows(n, [K.row(i)[:n] for i in range(K.rows)]))


def koszul_tor(base_arity: int, sequence: Sequence[LaurentPoly], module_rel: Sequence[LaurentPoly],
               s_max: int, route: str = "auto", budget: Budget | None = None,
               check_regular: bool = True) -> TorResult:
    """Homology of K(sequence) (x) R/(module_rel) in degrees 0..s_max."""
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}")
    seq = tuple(sequence)
    rel = tuple(module_rel)
    for p in seq + rel:
        if p.nvars != base_arity:
            raise ValueError(f"polynomial in {p.nvars} variables, base arity is {base_arity}")
    if s_max < 0:
        raise ValueError("s_max must be non-negative")
    budget = budget or Budget()
    chosen = route
    if route == "auto":
        struct = additive_structure(groebner(base_arity, rel, budget), budget)
        chosen = "finite" if struct is not None and not struct.group.torsion else "module"
    if chosen == "finite":
        degrees = _finite_route(base_arity, seq, rel, s_max, budget)
    else:
        degrees = _module_route(base_arity, seq, rel, s_max, budget)
    warnings = []
    regular = False
    if check_regular and seq:
        free = _module_route(base_arity, seq, (), len(seq), budget)
        regular = all(x.vanishes for x in free if x.s >= 1)
        if not regular:
            warnings.append("sequence is not regular on the base ring; homology need not be Tor")
    return TorResult(base_arity, seq, rel, tuple(degrees), chosen, regular, tuple(warnings))
