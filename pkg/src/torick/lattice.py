"""Exact integer lattice arithmetic.

Everything here works on Python ints, so there is no overflow and no
floating point.  Matrices are small (desk-scale fans), so the algorithms
favour transparency over asymptotic speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterable, Sequence

from .errors import NotFiniteIndex


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("column count required for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: int | None = None, cols: int | None = None) -> IntMatrix:
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            data[i][i] = d
        return cls.from_rows(data, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def tolist(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix.from_rows((self.column(j) for j in range(self.cols)), self.rows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = [other.column(j) for j in range(other.cols)]
        return IntMatrix.from_rows(
            ([sum(a * b for a, b in zip(self.row(i), c)) for c in cols] for i in range(self.rows)),
            other.cols,
        )

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det(self.tolist())

    def rank(self) -> int:
        return smith_normal_form(self).rank

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with U, V unimodular and D in Smith form.

    ``U_inv`` and ``V_inv`` are carried along because inverting over the
    integers after the fact is awkward and callers (coset enumeration,
    kernels) need them.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariants: tuple[int, ...]
    U_inv: IntMatrix = field(repr=False)
    V_inv: IntMatrix = field(repr=False)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariants if d != 0)


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form by unimodular row and column operations.

    Pivots are chosen as the entry of least nonzero absolute value in the
    active submatrix, ties broken by (row, col).  The invariants tuple has
    length ``min(rows, cols)`` with zeros trailing.
    """
    m, n = A.rows, A.cols
    D = A.tolist()
    U = _eye(m)
    Ui = _eye(m)
    V = _eye(n)
    Vi = _eye(n)

    # Row op on D and U: row_i += q * row_k; the inverse op updates Ui columns.
    def add_row(i, k, q):
        if q == 0:
            return
        Di, Dk = D[i], D[k]
        for j in range(n):
            Di[j] += q * Dk[j]
        Ui_, Uk = U[i], U[k]
        for j in range(m):
            Ui_[j] += q * Uk[j]
        for r in range(m):
            Ui[r][k] -= q * Ui[r][i]

    def swap_rows(i, k):
        if i == k:
            return
        D[i], D[k] = D[k], D[i]
        U[i], U[k] = U[k], U[i]
        for r in range(m):
            Ui[r][i], Ui[r][k] = Ui[r][k], Ui[r][i]

    def neg_row(i):
        D[i] = [-x for x in D[i]]
        U[i] = [-x for x in U[i]]
        for r in range(m):
            Ui[r][i] = -Ui[r][i]

    def add_col(j, k, q):
        if q == 0:
            return
        for r in range(m):
            D[r][j] += q * D[r][k]
        for r in range(n):
            V[r][j] += q * V[r][k]
        Vj, Vk = Vi[j], Vi[k]
        for c in range(n):
            Vk[c] -= q * Vj[c]

    def swap_cols(j, k):
        if j == k:
            return
        for r in range(m):
            D[r][j], D[r][k] = D[r][k], D[r][j]
        for r in range(n):
            V[r][j], V[r][k] = V[r][k], V[r][j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    def min_pivot(t):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        return best

    t = 0
    while t < min(m, n):
        piv = min_pivot(t)
        if piv is None:
            break
        _, pi, pj = piv
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                # a remainder is now smaller than the pivot; bring it in
                best = None
                for i in range(t, m):
                    x = D[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, t)
                for j in range(t + 1, n):
                    x = D[t][j]
                    if x and abs(x) < best[0]:
                        best = (abs(x), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            neg_row(t)
        t += 1

    invariants = tuple(D[i][i] for i in range(min(m, n)))
    return SmithDecomposition(
        U=IntMatrix.from_rows(U, m),
        D=IntMatrix.from_rows(D, n),
        V=IntMatrix.from_rows(V, n),
        invariants=invariants,
        U_inv=IntMatrix.from_rows(Ui, m),
        V_inv=IntMatrix.from_rows(Vi, n),
    )


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def hermite_rows(rows: Iterable[Sequence[int]], ncols: int) -> tuple[tuple[int, ...], ...]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns a basis in echelon form: positive pivots, entries above each
    pivot reduced into ``[0, pivot)``, zero rows dropped.
    """
    a = [list(r) for r in rows if any(r)]
    out = []
    col = 0
    while a and col < ncols:
        nz = [r for r in a if r[col]]
        if not nz:
            col += 1
            continue
        rest = [r for r in a if not r[col]]
        # Euclid on the column until one row remains nonzero there
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            nxt = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            nz = nxt
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        a = rest
        col += 1
    # reduce above the pivots
    for k, piv in enumerate(out):
        c = next(j for j, x in enumerate(piv) if x)
        for i in range(k):
            q = out[i][c] // piv[c]
            if q:
                out[i] = [x - q * y for x, y in zip(out[i], piv)]
    return tuple(tuple(r) for r in out)


def kernel_lattice(A: IntMatrix) -> IntMatrix:
    """Basis (as rows, Hermite-reduced) of ``{x in Z^cols : A x = 0}``."""
    snf = smith_normal_form(A)
    r = snf.rank
    basis = [snf.V.column(j) for j in range(r, A.cols)]
    return IntMatrix.from_rows(hermite_rows(basis, A.cols), A.cols)


def image_lattice(A: IntMatrix) -> IntMatrix:
    """Hermite basis of the row space of A."""
    return IntMatrix.from_rows(hermite_rows((A.row(i) for i in range(A.rows)), A.cols), A.cols)


@dataclass(frozen=True)
class FgAbelianGroup:
    """``Z^free_rank + Z/torsion[0] + ...`` with ``torsion[i] | torsion[i+1]``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"torsion invariants must be >= 2, got {d}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def from_invariants(cls, invariants: Iterable[int], free_rank: int = 0) -> FgAbelianGroup:
        """Normalise arbitrary cyclic orders (0 meaning Z) into invariant factors."""
        invariants = [abs(int(d)) for d in invariants]
        free = free_rank + invariants.count(0)
        finite = [d for d in invariants if d > 1]
        if not finite:
            return cls(free, ())
        snf = smith_normal_form(IntMatrix.diagonal(finite))
        return cls(free, tuple(d for d in snf.invariants if d > 1))

    @property
    def order(self) -> int | None:
        """Group order, or None when infinite."""
        return prod(self.torsion) if self.free_rank == 0 else None

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class SublatticeSpec:
    """Subgroup of ``Z^ambient_rank`` generated by the rows of ``generators``."""

    ambient_rank: int
    generators: IntMatrix

    def __post_init__(self):
        if self.generators.cols != self.ambient_rank:
            raise ValueError(
                f"generators have {self.generators.cols} columns, ambient rank is {self.ambient_rank}"
            )

    @classmethod
    def from_rows(cls, ambient_rank: int, rows: Iterable[Sequence[int]]) -> SublatticeSpec:
        return cls(ambient_rank, IntMatrix.from_rows(list(rows), ambient_rank))

    @classmethod
    def whole(cls, n: int) -> SublatticeSpec:
        return cls(n, IntMatrix.identity(n))

    @classmethod
    def zero(cls, n: int) -> SublatticeSpec:
        return cls(n, IntMatrix.zeros(0, n))

    def hermite_basis(self) -> tuple[tuple[int, ...], ...]:
        g = self.generators
        return hermite_rows((g.row(i) for i in range(g.rows)), self.ambient_rank)

    @property
    def rank(self) -> int:
        return len(self.hermite_basis())

    def direct_sum(self, other: SublatticeSpec) -> SublatticeSpec:
        n1, n2 = self.ambient_rank, other.ambient_rank
        rows = [r + (0,) * n2 for r in self.hermite_basis()]
        rows += [(0,) * n1 + r for r in other.hermite_basis()]
        return SublatticeSpec.from_rows(n1 + n2, rows)


@dataclass(frozen=True)
class QuotientData:
    """``Z^n / sub`` together with the coordinates that diagonalise it.

    In the coordinates ``y = x @ V`` the subgroup is ``sum_i d_i Z e_i``,
    where ``d_i`` runs over ``moduli`` (0 for a free coordinate).
    """

    group: FgAbelianGroup
    moduli: tuple[int, ...]
    V: IntMatrix
    V_inv: IntMatrix

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates of the coset of ``x``; free coordinates kept as is."""
        n = len(self.moduli)
        y = [sum(x[i] * self.V[i, j] for i in range(n)) for j in range(n)]
        return tuple(v % d if d else v for v, d in zip(y, self.moduli))

    def coset_representatives(self) -> list[tuple[int, ...]]:
        """Representatives of all cosets; only meaningful for a finite quotient."""
        if self.group.free_rank:
            raise ValueError("infinitely many cosets")
        n = len(self.moduli)
        ranges = [range(d) for d in self.moduli]
        reps = []
        for y in itertools.product(*ranges):
            x = tuple(sum(y[i] * self.V_inv[i, j] for i in range(n)) for j in range(n))
            reps.append(x)
        return reps


def quotient_data(ambient_rank: int, sub: SublatticeSpec) -> QuotientData:
    if sub.ambient_rank != ambient_rank:
        raise ValueError(f"sublattice lives in Z^{sub.ambient_rank}, expected Z^{ambient_rank}")
    n = ambient_rank
    snf = smith_normal_form(sub.generators)
    # rows of U^-1 D span the same lattice as the generators; in y = x V
    # coordinates the sublattice is generated by d_i e_i.
    moduli = list(snf.invariants[:n]) + [0] * (n - len(snf.invariants))
    moduli = tuple(abs(d) for d in moduli)
    free = sum(1 for d in moduli if d == 0)
    group = FgAbelianGroup(free, tuple(d for d in moduli if d > 1))
    return QuotientData(group=group, moduli=moduli, V=snf.V, V_inv=snf.V_inv)


def quotient_group(ambient_rank: int, sub: SublatticeSpec) -> FgAbelianGroup:
    """Isomorphism type of ``Z^ambient_rank / <rows of sub>``."""
    return quotient_data(ambient_rank, sub).group


def gbeta_characters(beta: IntMatrix) -> SublatticeSpec:
    """Characters of ``T_L`` killed by the group ``G_beta = ker(T_L -> T_N)``.

    ``beta`` maps ``Z^cols -> Z^rows`` (columns are images of basis vectors
    of L).  The returned sublattice is ``beta^*(N^dual)``, the row space of
    ``beta`` inside ``Z^cols``; its quotient is the character group of G_beta.
    """
    snf = smith_normal_form(beta)
    if snf.rank < beta.rows:
        raise NotFiniteIndex(
            f"image of beta has rank {snf.rank} in a lattice of rank {beta.rows}"
        )
    return SublatticeSpec(beta.cols, image_lattice(beta))


def coset_count_bruteforce(rows: Sequence[Sequence[int]], n: int, bound: int) -> int:
    """Number of cosets of ``<rows>`` in ``Z^n``, given ``bound * Z^n`` lies inside it.

    Counts residues of the subgroup modulo ``bound`` by closure under
    addition, so it is independent of any normal-form computation.
    """
    seen = {(0,) * n}
    frontier = [(0,) * n]
    gens = [tuple(x % bound for x in r) for r in rows]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % bound for a, b in zip(v, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return bound ** n // len(seen)


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


def random_unimodular(n: int, rng, steps: int = 4, bound: int = 1) -> IntMatrix:
    """A random element of GL_n(Z) built from elementary row operations."""
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-bound, bound)
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    if n and rng.random() < 0.5:
        rows[0] = [-a for a in rows[0]]
    return IntMatrix.from_rows(rows, n)


def regenerate_basis(sub: SublatticeSpec, rng) -> tuple[tuple[int, ...], ...]:
    """Another basis of the same row space: the Hermite basis times a random unimodular matrix."""
    H = sub.hermite_basis()
    U = random_unimodular(len(H), rng)
    return tuple(tuple(sum(U[i, k] * H[k][j] for k in range(len(H))) for j in range(sub.ambient_rank))
                 for i in range(len(H)))
