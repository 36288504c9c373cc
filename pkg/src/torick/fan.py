"""Fans, stacky fans and their combinatorics.

Ray indices are 0-based throughout the Python API.  A cone is stored as
the frozenset of its ray indices; the zero cone is the empty set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import NoOrderFound, NotCompleteOrSmooth, NotFiniteIndex
from .lattice import (
    FgAbelianGroup,
    IntMatrix,
    SublatticeSpec,
    gbeta_characters,
    gcd_all,
    kernel_lattice,
    quotient_group,
    smith_normal_form,
)
from .laurent.engine import Budget

Cone = frozenset


def _rank(vectors: Sequence[Sequence[int]], n: int) -> int:
    if not vectors:
        return 0
    return IntMatrix.from_rows(vectors, n).rank()


@dataclass(frozen=True)
class Fan:
    lattice_rank: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[Cone, ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "max_cones", tuple(frozenset(c) for c in self.max_cones))
        for r in self.rays:
            if len(r) != self.lattice_rank:
                raise ValueError(f"ray {r} does not live in Z^{self.lattice_rank}")
        for c in self.max_cones:
            for i in c:
                if not 0 <= i < len(self.rays):
                    raise ValueError(f"cone {sorted(c)} refers to missing ray {i}")

    @classmethod
    def make(cls, n: int, rays: Iterable[Sequence[int]], cones: Iterable[Iterable[int]]) -> Fan:
        return cls(n, tuple(tuple(r) for r in rays), tuple(frozenset(c) for c in cones))

    @property
    def nrays(self) -> int:
        return len(self.rays)

    def ray_matrix(self, cone: Iterable[int]) -> IntMatrix:
        """Rays of ``cone`` as rows."""
        return IntMatrix.from_rows([self.rays[i] for i in sorted(cone)], self.lattice_rank)

    def cone_dim(self, cone: Iterable[int]) -> int:
        return _rank([self.rays[i] for i in cone], self.lattice_rank)

    def is_simplicial_cone(self, cone: Cone) -> bool:
        return self.cone_dim(cone) == len(cone)

    @cached_property
    def _faces(self) -> tuple[frozenset[Cone], ...]:
        return tuple(frozenset(_cone_faces(self, c)) for c in self.max_cones)

    def faces_of(self, k: int) -> frozenset[Cone]:
        """Ray sets of all faces of the k-th maximal cone."""
        return self._faces[k]

    @cached_property
    def all_faces(self) -> frozenset[Cone]:
        out = set()
        for fs in self._faces:
            out |= fs
        return frozenset(out)

    def __str__(self):
        cones = ", ".join("{" + ",".join(str(i) for i in sorted(c)) + "}" for c in self.max_cones)
        return f"Fan(Z^{self.lattice_rank}, rays={list(self.rays)}, cones=[{cones}])"


def _supporting_functional(f: Fan, cone: Cone, hyper: Sequence[int]) -> tuple[int, ...] | None:
    """Integer functional vanishing on ``hyper`` and not on the whole span of ``cone``."""
    n = f.lattice_rank
    if hyper:
        K = kernel_lattice(f.ray_matrix(hyper))
        candidates = [K.row(i) for i in range(K.rows)]
    else:
        candidates = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    for u in candidates:
        if any(sum(a * b for a, b in zip(u, f.rays[r])) for r in cone):
            return u
    return None


def _cone_faces(f: Fan, cone: Cone) -> set[Cone]:
    """Ray sets of the faces of one cone, via its facets."""
    if f.is_simplicial_cone(cone):
        return {frozenset(s) for k in range(len(cone) + 1) for s in itertools.combinations(sorted(cone), k)}
    k = f.cone_dim(cone)
    facets = set()
    for hyper in itertools.combinations(sorted(cone), k - 1):
        if _rank([f.rays[i] for i in hyper], f.lattice_rank) != k - 1:
            continue
        u = _supporting_functional(f, cone, hyper)
        if u is None:
            continue
        vals = {r: sum(a * b for a, b in zip(u, f.rays[r])) for r in cone}
        if all(v >= 0 for v in vals.values()) or all(v <= 0 for v in vals.values()):
            facets.add(frozenset(r for r, v in vals.items() if v == 0))
    faces = {frozenset(cone)}
    frontier = set(facets)
    while frontier:
        faces |= frontier
        nxt = set()
        for a in frontier:
            for b in facets:
                c = a & b
                if c not in faces:
                    nxt.add(c)
        frontier = nxt
    return faces


def _is_strongly_convex(f: Fan, cone: Cone) -> bool:
    if not cone:
        return True
    faces = _cone_faces(f, cone)
    return frozenset() in faces


@dataclass(frozen=True)
class Failure:
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[Failure, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def kinds(self) -> set[str]:
        return {x.kind for x in self.failures}

    def to_json(self) -> dict:
        return {
            "valid": self.ok,
            "failures": [{"kind": x.kind, "detail": x.detail} for x in self.failures],
            "notes": list(self.notes),
        }


def _circuits(cols: Sequence[Sequence[int]], n: int):
    """Minimal linear dependencies among the given column vectors."""
    m = len(cols)
    r = _rank(cols, n)
    for size in range(1, r + 2):
        for S in itertools.combinations(range(m), size):
            A = IntMatrix.from_rows([[cols[j][i] for j in S] for i in range(n)], size)
            K = kernel_lattice(A)
            if K.rows != 1:
                continue
            v = K.row(0)
            if all(v):
                yield dict(zip(S, v))


def _overlap_ok(f: Fan, a: Cone, b: Cone) -> bool:
    """Two simplicial cones meet in the cone on their shared rays."""
    shared = a & b
    la, lb = sorted(a), sorted(b)
    cols = [f.rays[i] for i in la] + [tuple(-x for x in f.rays[i]) for i in lb]
    labels = la + lb
    for circ in _circuits(cols, f.lattice_rank):
        signs = {v > 0 for v in circ.values()}
        if len(signs) != 1:
            continue
        if any(labels[j] not in shared for j in circ):
            return False
    return True


def validate_fan(f: Fan) -> ValidationReport:
    failures = []
    notes = []
    for i, r in enumerate(f.rays):
        if not any(r):
            failures.append(Failure("zero_ray", f"ray {i} is zero"))
        elif gcd_all(r) != 1:
            failures.append(Failure("not_primitive", f"ray {i} = {list(r)} is not primitive"))
    seen = {}
    for i, r in enumerate(f.rays):
        if r in seen:
            failures.append(Failure("duplicate_ray", f"rays {seen[r]} and {i} coincide"))
        else:
            seen[r] = i
    for i, c in enumerate(f.max_cones):
        for j, d in enumerate(f.max_cones):
            if i != j and c <= d and (c != d or i > j):
                failures.append(Failure("not_maximal", f"cone {i} is contained in cone {j}"))
    if failures:
        return ValidationReport(tuple(failures), tuple(notes))
    for i, c in enumerate(f.max_cones):
        if not _is_strongly_convex(f, c):
            failures.append(Failure("not_strongly_convex", f"cone {i} contains a line"))
    if failures:
        return ValidationReport(tuple(failures), tuple(notes))
    for i, j in itertools.combinations(range(len(f.max_cones)), 2):
        a, b = f.max_cones[i], f.max_cones[j]
        if f.is_simplicial_cone(a) and f.is_simplicial_cone(b):
            if not _overlap_ok(f, a, b):
                failures.append(Failure("overlap", f"cones {i} and {j} meet outside a common face"))
        else:
            notes.append(f"overlap of cones {i} and {j} not checked (non-simplicial)")
    return ValidationReport(tuple(failures), tuple(notes))


def spans_cone(f: Fan, rayset: Iterable[int]) -> bool:
    """True iff ``rayset`` is exactly the ray set of a cone of the fan."""
    s = frozenset(rayset)
    for i in s:
        if not 0 <= i < f.nrays:
            raise IndexError(f"ray index {i} out of range")
    return s in f.all_faces


def minimal_nonfaces(f: Fan) -> list[tuple[int, ...]]:
    """Inclusion-minimal ray sets that do not span a cone, in lexicographic order."""
    faces = f.all_faces
    top = max((len(c) for c in faces), default=0) + 1
    found: list[frozenset] = []
    for k in range(1, min(top, f.nrays) + 1):
        for s in itertools.combinations(range(f.nrays), k):
            fs = frozenset(s)
            if fs in faces or any(m <= fs for m in found):
                continue
            found.append(fs)
    return sorted(tuple(sorted(s)) for s in found)


def is_smooth(f: Fan) -> bool:
    for c in f.max_cones:
        if not c:
            continue
        snf = smith_normal_form(f.ray_matrix(c))
        if snf.rank != len(c) or any(d != 1 for d in snf.invariants[:snf.rank]):
            return False
    return True


def neighbours(f: Fan) -> dict[int, dict[int, int]]:
    """For simplicial full-dimensional cones: ``nb[i][j]`` is the ray of cone i opposite cone j."""
    n = f.lattice_rank
    nb: dict[int, dict[int, int]] = {i: {} for i in range(len(f.max_cones))}
    for i, j in itertools.combinations(range(len(f.max_cones)), 2):
        a, b = f.max_cones[i], f.max_cones[j]
        common = a & b
        if len(a) == len(b) == n and len(common) == n - 1:
            (x,) = a - common
            (y,) = b - common
            nb[i][j] = x
            nb[j][i] = y
    return nb


def is_complete(f: Fan) -> bool:
    n = f.lattice_rank
    if not f.max_cones:
        return False
    for c in f.max_cones:
        if f.cone_dim(c) != n:
            return False
    count: dict[Cone, list[int]] = {}
    for k in range(len(f.max_cones)):
        for face in f.faces_of(k):
            if f.cone_dim(face) == n - 1:
                count.setdefault(face, []).append(k)
    if any(len(v) != 2 for v in count.values()):
        return False
    adj: dict[int, set[int]] = {k: set() for k in range(len(f.max_cones))}
    for a, b in count.values():
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(f.max_cones)


@dataclass(frozen=True)
class ShellingOrder:
    """``order[p]`` is the maximal cone placed at position p; tau/tau_prime indexed by cone."""

    order: tuple[int, ...]
    tau: tuple[Cone, ...]
    tau_prime: tuple[Cone, ...]

    def position(self) -> dict[int, int]:
        return {c: p for p, c in enumerate(self.order)}

    def to_json(self, one_based: bool = True) -> dict:
        off = 1 if one_based else 0
        return {
            "order": [c + off for c in self.order],
            "tau": [sorted(i + off for i in self.tau[c]) for c in self.order],
            "tau_prime": [sorted(i + off for i in self.tau_prime[c]) for c in self.order],
        }


def shelling_violations(f: Fan, so: ShellingOrder) -> list[str]:
    """Every way ``so`` fails the ordering conditions (empty when it is valid).

    tau is recomputed from its definition: the intersection of sigma_i
    with the later cones meeting it in a facet.
    """
    n = f.lattice_rank
    pos = so.position()
    out = []
    if sorted(so.order) != list(range(len(f.max_cones))):
        return ["order is not a permutation of the maximal cones"]
    for i, sigma in enumerate(f.max_cones):
        t = set(sigma)
        for j, other in enumerate(f.max_cones):
            if pos[j] > pos[i] and f.cone_dim(sigma & other) == n - 1:
                t &= other
        if frozenset(t) != so.tau[i]:
            out.append(f"tau of cone {i} should be {sorted(t)}")
        tp = so.tau_prime[i]
        if tp & so.tau[i] or not tp | so.tau[i] <= sigma:
            out.append(f"tau and tau' of cone {i} are not complementary faces")
        if f.cone_dim(tp) + f.cone_dim(so.tau[i]) != n:
            out.append(f"dimensions of tau and tau' of cone {i} do not add up to {n}")
        for j, other in enumerate(f.max_cones):
            if so.tau[i] <= other and pos[i] > pos[j]:
                out.append(f"tau of cone {i} lies in earlier cone {j}")
            if tp <= other and pos[j] > pos[i]:
                out.append(f"tau' of cone {i} lies in later cone {j}")
    return out


def shelling_order(f: Fan, budget: Budget | None = None) -> ShellingOrder:
    """First valid ordering in lexicographic search order."""
    if not (is_complete(f) and is_smooth(f)):
        raise NotCompleteOrSmooth("a shelling order needs a smooth complete fan")
    budget = budget or Budget()
    cones = f.max_cones
    m = len(cones)
    nb = neighbours(f)
    placed: list[int] = []
    unplaced = set(range(m))
    tau: dict[int, Cone] = {}
    tau_p: dict[int, Cone] = {}

    def local(c: int) -> tuple[Cone, Cone] | None:
        t = cones[c] - {nb[c][j] for j in nb[c] if j in unplaced and j != c}
        tp = cones[c] - t
        if any(t <= cones[j] for j in placed):
            return None
        if any(tp <= cones[j] for j in unplaced if j != c):
            return None
        return t, tp

    def search() -> bool:
        if not unplaced:
            return True
        for c in sorted(unplaced):
            budget.tick()
            r = local(c)
            if r is None:
                continue
            tau[c], tau_p[c] = r
            placed.append(c)
            unplaced.discard(c)
            if search():
                return True
            placed.pop()
            unplaced.add(c)
        return False

    if not search():
        raise NoOrderFound("no ordering of the maximal cones satisfies the shelling conditions")
    return ShellingOrder(tuple(placed), tuple(tau[i] for i in range(m)),
                         tuple(tau_p[i] for i in range(m)))


def product_fan(f1: Fan, f2: Fan) -> Fan:
    n1, n2 = f1.lattice_rank, f2.lattice_rank
    rays = [r + (0,) * n2 for r in f1.rays] + [(0,) * n1 + r for r in f2.rays]
    d = f1.nrays
    cones = [a | frozenset(j + d for j in b) for a in f1.max_cones for b in f2.max_cones]
    return Fan(n1 + n2, tuple(rays), tuple(cones))


# -- group data ----------------------------------------------------------


@dataclass(frozen=True)
class TrivialGroup:
    kind = "trivial"


@dataclass(frozen=True)
class FullTorus:
    kind = "full_torus"


@dataclass(frozen=True)
class Subgroup:
    """G inside T given by the characters ``sub`` of T that vanish on G."""

    sub: SublatticeSpec
    kind = "subgroup"


@dataclass(frozen=True)
class Beta:
    """``beta: L -> N``; columns of the matrix are images of the basis of L.

    N is presented as ``Z^free_rank + Z/d_1 + ...``; rows follow that order
    and torsion rows are read modulo their invariant.
    """

    matrix: IntMatrix
    target: FgAbelianGroup
    kind = "beta"


GroupData = Union[TrivialGroup, FullTorus, Subgroup, Beta]


@dataclass(frozen=True)
class StackyFan:
    fan: Fan
    group: GroupData = field(default_factory=TrivialGroup)

    def __post_init__(self):
        g, n = self.group, self.fan.lattice_rank
        if isinstance(g, Subgroup) and g.sub.ambient_rank != n:
            raise ValueError(f"subgroup characters live in Z^{g.sub.ambient_rank}, fan in Z^{n}")
        if isinstance(g, Beta):
            r = g.target.free_rank + len(g.target.torsion)
            if g.matrix.cols != n or g.matrix.rows != r:
                raise ValueError(
                    f"beta must be {r} x {n}, got {g.matrix.rows} x {g.matrix.cols}"
                )

    def character_sublattice(self) -> SublatticeSpec:
        """M' for the reduced forms (characters of T trivial on G)."""
        g, n = self.group, self.fan.lattice_rank
        if isinstance(g, TrivialGroup):
            return SublatticeSpec.whole(n)
        if isinstance(g, FullTorus):
            return SublatticeSpec.zero(n)
        if isinstance(g, Subgroup):
            return g.sub
        if not g.target.torsion:
            return gbeta_characters(g.matrix)
        raise ValueError("beta with a torsion target must go through stacky_reduction")

    def character_group(self) -> FgAbelianGroup:
        """G^dual = M / M'."""
        return quotient_group(self.fan.lattice_rank, self.character_sublattice())


@dataclass(frozen=True)
class Reduction:
    """Output of the stacky reduction.

    ``stacky_fan`` is (Sigma', M') on ``L + Z^s``; ``tau`` holds the
    indices of the s new rays, whose orbit closure is X_Sigma.
    """

    stacky_fan: StackyFan
    tau: Cone
    s: int
    lift: IntMatrix
    Q: IntMatrix
    beta_prime: IntMatrix
    group: FgAbelianGroup

    def to_json(self) -> dict:
        f = self.stacky_fan.fan
        return {
            "s": self.s,
            "lattice_rank": f.lattice_rank,
            "rays": [list(r) for r in f.rays],
            "max_cones": [sorted(i + 1 for i in c) for c in f.max_cones],
            "tau": sorted(i + 1 for i in self.tau),
            "lift": self.lift.tolist(),
            "Q": self.Q.tolist(),
            "beta_prime": self.beta_prime.tolist(),
            "M_prime": [list(r) for r in self.stacky_fan.character_sublattice().hermite_basis()],
            "character_group": str(self.group),
        }


def _lift(beta: IntMatrix, target: FgAbelianGroup) -> IntMatrix:
    # torsion rows reduced into [0, d): the smallest non-negative lift
    rows = []
    for i in range(beta.rows):
        row = beta.row(i)
        if i >= target.free_rank:
            d = target.torsion[i - target.free_rank]
            row = tuple(x % d for x in row)
        rows.append(row)
    return IntMatrix.from_rows(rows, beta.cols)


def stacky_reduction(sf: StackyFan, lift: IntMatrix | None = None) -> Reduction:
    """Replace a torsion target by the free presentation ``Z^s -Q-> Z^r -> N``."""
    g = sf.group
    if not isinstance(g, Beta):
        raise ValueError("stacky_reduction expects a beta-form stacky fan")
    f = sf.fan
    n = f.lattice_rank
    N = g.target
    r = N.free_rank + len(N.torsion)
    s = len(N.torsion)
    B = lift if lift is not None else _lift(g.matrix, N)
    Q = IntMatrix.from_rows(
        [[N.torsion[k] if i == N.free_rank + k else 0 for k in range(s)] for i in range(r)], s
    )
    beta_p = IntMatrix.from_rows([B.row(i) + Q.row(i) for i in range(r)], n + s)
    if smith_normal_form(beta_p).rank < r:
        raise NotFiniteIndex("the image of beta has infinite index in N")
    Mp = gbeta_characters(beta_p)
    rays = [v + (0,) * s for v in f.rays]
    rays += [(0,) * n + tuple(int(i == k) for i in range(s)) for k in range(s)]
    tau = frozenset(range(f.nrays, f.nrays + s))
    cones = [c | tau for c in f.max_cones]
    fan2 = Fan(n + s, tuple(rays), tuple(cones))
    out = StackyFan(fan2, Subgroup(Mp))
    return Reduction(out, tau, s, B, Q, beta_p, quotient_group(n + s, Mp))


def character_group_direct(sf: StackyFan) -> FgAbelianGroup:
    """G_beta^dual from the unreduced beta rows, independent of the chosen lift."""
    g = sf.group
    if not isinstance(g, Beta):
        return sf.character_group()
    N = g.target
    n = sf.fan.lattice_rank
    s = len(N.torsion)
    rows = []
    for i in range(g.matrix.rows):
        extra = [0] * s
        if i >= N.free_rank:
            extra[i - N.free_rank] = N.torsion[i - N.free_rank]
        rows.append(list(g.matrix.row(i)) + extra)
    return quotient_group(n + s, SublatticeSpec.from_rows(n + s, rows))
