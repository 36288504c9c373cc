"""Small stacky fans used throughout the tests and documentation."""

from __future__ import annotations

from .fan import Beta, Fan, FullTorus, StackyFan, Subgroup, TrivialGroup, product_fan
from .lattice import FgAbelianGroup, IntMatrix, SublatticeSpec


def projective_space(n: int) -> Fan:
    """Rays e_1..e_n and -(e_1+...+e_n); every n-subset is a cone."""
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    cones = [frozenset(k for k in range(n + 1) if k != skip) for skip in reversed(range(n + 1))]
    return Fan(n, tuple(rays), tuple(cones))


def p1() -> Fan:
    return projective_space(1)


def p2() -> Fan:
    return projective_space(2)


def p1xp1() -> Fan:
    return product_fan(p1(), p1())


def p1xp2() -> Fan:
    return product_fan(p1(), p2())


def single_cone() -> Fan:
    return Fan(2, ((1, 0), (0, 1)), (frozenset({0, 1}),))


def point() -> Fan:
    return Fan(0, (), (frozenset(),))


def punctured_plane() -> Fan:
    """A^2 minus the origin: rays e_1, e_2 with no 2-dimensional cone."""
    return Fan(2, ((1, 0), (0, 1)), (frozenset({0}), frozenset({1})))


def cyclic_quotient(f: Fan, rows) -> StackyFan:
    return StackyFan(f, Subgroup(SublatticeSpec.from_rows(f.lattice_rank, rows)))


def golden_stacky_fans() -> dict[str, StackyFan]:
    """Smooth complete stacky fans with finite group."""
    return {
        "P1": StackyFan(p1(), TrivialGroup()),
        "P2": StackyFan(p2(), TrivialGroup()),
        "P1xP1": StackyFan(p1xp1(), TrivialGroup()),
        "P1xP2": StackyFan(p1xp2(), TrivialGroup()),
        "[P1/mu2]": cyclic_quotient(p1(), [[2]]),
        "[P1/mu3]": cyclic_quotient(p1(), [[3]]),
        "[P2/mu2]": cyclic_quotient(p2(), [[1, 1], [0, 2]]),
        "[P1xP1/mu2]": cyclic_quotient(p1xp1(), [[1, 1], [0, 2]]),
    }


def quotient_fans() -> dict[str, StackyFan]:
    g = golden_stacky_fans()
    return {k: g[k] for k in ("[P1/mu2]", "[P1/mu3]", "[P2/mu2]", "[P1xP1/mu2]")}


def full_torus(f: Fan) -> StackyFan:
    return StackyFan(f, FullTorus())


def b_mu2_beta() -> StackyFan:
    """The classifying stack of mu_2: point fan, beta: 0 -> Z/2."""
    return StackyFan(point(), Beta(IntMatrix.zeros(1, 0), FgAbelianGroup(0, (2,))))


def p12_beta() -> StackyFan:
    """P(1,2) as the punctured plane with beta = [1 2]."""
    return StackyFan(punctured_plane(), Beta(IntMatrix.from_rows([[1, 2]]), FgAbelianGroup(1)))


def p12_subgroup() -> StackyFan:
    return cyclic_quotient(punctured_plane(), [[1, 2]])
