"""Small shared oracles for the tests."""

import random

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from torick.lattice import IntMatrix


def random_matrix(rng: random.Random, max_dim: int = 6, bound: int = 50) -> IntMatrix:
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return IntMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)], n)


def sympy_invariants(A: IntMatrix) -> list[int]:
    """Nonzero invariant factors from sympy, as positive ints."""
    if A.rows == 0 or A.cols == 0:
        return []
    inv = invariant_factors(Matrix(A.tolist()), domain=ZZ)
    return [abs(int(d)) for d in inv if d != 0]


def matmul(A: IntMatrix, B: IntMatrix) -> list[list[int]]:
    a, b = A.tolist(), B.tolist()
    return [[sum(a[i][k] * b[k][j] for k in range(A.cols)) for j in range(B.cols)] for i in range(A.rows)]


def sympy_quotient_dim(arity: int, polys, modulus: int | None = None):
    """Vector-space dimension of k[t^(+-1)]/(polys) over Q or GF(p), via sympy.

    Returns None when the quotient is not finite dimensional.
    """
    from sympy import GF, QQ, Poly, groebner, symbols

    ts = symbols(f"t1:{arity + 1}")
    ys = symbols(f"y1:{arity + 1}")
    gens = list(ts) + list(ys)
    exprs = [t * y - 1 for t, y in zip(ts, ys)]
    for p in polys:
        e = 0
        for exps, c in p.items():
            term = c
            for t, y, x in zip(ts, ys, exps):
                term *= t ** x if x >= 0 else y ** (-x)
            e += term
        exprs.append(e)
    dom = QQ if modulus is None else GF(modulus)
    G = groebner(exprs, *gens, order="grevlex", domain=dom)
    if list(G.exprs) == [1]:
        return 0
    lms = [Poly(g, *gens).monoms(order="grevlex")[0] for g in G.exprs]
    # walk the staircase
    n = len(gens)
    seen = set()
    frontier = [(0,) * n]
    while frontier:
        m = frontier.pop()
        if m in seen or any(all(a >= b for a, b in zip(m, lm)) for lm in lms):
            continue
        seen.add(m)
        if len(seen) > 5000:
            return None
        for i in range(n):
            frontier.append(tuple(x + (i == j) for j, x in enumerate(m)))
    return len(seen)


def brute_rank(rows, n):
    """Number of cosets of <rows> in Z^n by enumeration; INFINITE for infinite index.

    If some n rows have determinant d != 0 then d Z^n lies in the lattice and
    counting residues mod d is exact.  Otherwise the index is infinite, which
    shows up as at least p cosets modulo each prime p.
    """
    from itertools import combinations

    from torick.lattice import IntMatrix, coset_count_bruteforce
    from torick.laurent.groebner import INFINITE

    for sub in combinations(rows, n):
        d = abs(IntMatrix.from_rows(list(sub), n).det())
        if d:
            return coset_count_bruteforce(rows, n, d)
    assert all(coset_count_bruteforce(rows, n, p) >= p for p in (5, 7))
    return INFINITE
