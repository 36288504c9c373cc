from __future__ import annotations

from ..lattice import FgAbelianGroup
from .poly import LaurentPoly
from .presentation import CoefficientTag, RingPresentation


def group_ring(g: FgAbelianGroup, prefix: str = "x") -> RingPresentation:
    """``Z[g]`` as a Laurent quotient: one variable per cyclic factor.

    Free factors come first and carry no relation; a torsion factor of
    order d contributes ``x^d - 1``.
    """
    n = g.free_rank + len(g.torsion)
    names = tuple(f"{prefix}{i + 1}" for i in range(n))
    rels = tuple(
        LaurentPoly.variable(n, g.free_rank + k, d) - 1 for k, d in enumerate(g.torsion)
    )
    ann = {}
    for i, name in enumerate(names):
        if i < g.free_rank:
            ann[name] = "generator of a free Z factor of the character group"
        else:
            ann[name] = f"generator of a Z/{g.torsion[i - g.free_rank]} factor of the character group"
    return RingPresentation(CoefficientTag.INTEGERS, names, rels, ann)
