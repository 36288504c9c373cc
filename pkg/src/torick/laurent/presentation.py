"""Ring presentations emitted by the K-theory computations."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .engine import Budget
from .groebner import GroebnerBasis, QuotientReport, groebner, ideal_equal, quotient_report
from .poly import LaurentPoly


class CoefficientTag(str, Enum):
    INTEGERS = "INTEGERS"
    # K_*(k) of the base field, kept as an opaque graded symbol
    GRADED_K_OF_FIELD = "GRADED_K_OF_FIELD"
    USER_RING = "USER_RING"
    # G_*(k) tensored with Q
    RATIONAL = "RATIONAL"


COEFFICIENT_SYMBOLS = {
    CoefficientTag.INTEGERS: "Z",
    CoefficientTag.GRADED_K_OF_FIELD: "K_*(k)",
    CoefficientTag.USER_RING: "A",
    CoefficientTag.RATIONAL: "G_*(k) (x) Q",
}


@dataclass(frozen=True)
class RingPresentation:
    """``coefficients[variables^(+-1)] / (relations)``.

    Variables are always Laurent.  Rank statements about a presentation
    refer to the integral (degree-zero) part: the opaque coefficient
    symbols are never expanded.
    """

    coefficient_tag: CoefficientTag
    variables: tuple[str, ...]
    relations: tuple[LaurentPoly, ...]
    annotations: Mapping[str, str] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        n = len(self.variables)
        for r in self.relations:
            if r.nvars != n:
                raise ValueError(f"relation in {r.nvars} variables, presentation has {n}")
        missing = [v for v in self.variables if v not in self.annotations]
        if missing:
            raise ValueError(f"variables without annotation: {missing}")

    @property
    def arity(self) -> int:
        return len(self.variables)

    def groebner(self, budget: Budget | None = None) -> GroebnerBasis:
        return groebner(self.arity, self.relations, budget)

    def quotient_report(self, budget: Budget | None = None) -> QuotientReport:
        return quotient_report(self.groebner(budget))

    def same_ideal(self, other: RingPresentation, budget: Budget | None = None) -> bool:
        if self.arity != other.arity:
            return False
        return ideal_equal(self.groebner(budget), other.groebner(budget), budget)

    def format(self) -> str:
        coeff = COEFFICIENT_SYMBOLS[self.coefficient_tag]
        gens = ", ".join(f"{v}^(+-1)" for v in self.variables)
        lines = [f"{coeff}[{gens}] / I" if self.variables else f"{coeff} / I"]
        lines.append("I generated by:")
        for r in self.relations:
            lines.append(f"  {r.format(self.variables)}")
        if not self.relations:
            lines.append("  (nothing)")
        for v in self.variables:
            lines.append(f"  {v}: {self.annotations[v]}")
        extra = {k: v for k, v in self.annotations.items() if k not in self.variables}
        for k in sorted(extra):
            lines.append(f"  [{k}] {extra[k]}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "coefficient_tag": self.coefficient_tag.value,
            "variables": list(self.variables),
            "relations": [r.to_json() for r in self.relations],
            "annotations": dict(sorted(self.annotations.items())),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> RingPresentation:
        variables = tuple(data["variables"])
        return cls(
            CoefficientTag(data["coefficient_tag"]),
            variables,
            tuple(LaurentPoly.from_json(len(variables), r) for r in data["relations"]),
            dict(data.get("annotations", {})),
        )


def tensor_presentations(p: RingPresentation, q: RingPresentation,
                         tag: CoefficientTag | None = None) -> RingPresentation:
    """Tensor product over the coefficients: variables and relations side by side."""
    n, m = p.arity, q.arity
    rels = [r.embed(n + m, range(n)) for r in p.relations]
    rels += [r.embed(n + m, range(n, n + m)) for r in q.relations]
    ann = dict(p.annotations)
    ann.update(q.annotations)
    return RingPresentation(tag or p.coefficient_tag, p.variables + q.variables, tuple(rels), ann)


def fresh_names(prefix: str, count: int, taken: Sequence[str] = ()) -> tuple[str, ...]:
    names = []
    k = 1
    while len(names) < count:
        cand = f"{prefix}{k}"
        if cand not in taken:
            names.append(cand)
        k += 1
    return tuple(names)
