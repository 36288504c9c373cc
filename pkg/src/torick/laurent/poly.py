from __future__ import annotations

from typing import Iterable, Mapping, Sequence


class LaurentPoly:
    """Integer Laurent polynomial in a fixed number of variables.

    Terms map exponent tuples (entries may be negative) to nonzero ints.
    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], int] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} does not have {nvars} entries")
                c = int(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def constant(cls, nvars: int, c: int) -> LaurentPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: int = 1) -> LaurentPoly:
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def variable(cls, nvars: int, i: int, power: int = 1) -> LaurentPoly:
        e = [0] * nvars
        e[i] = power
        return cls(nvars, {tuple(e): 1})

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def _check(self, other):
        if isinstance(other, int):
            return LaurentPoly.constant(self.nvars, other)
        if other.nvars != self.nvars:
            raise ValueError(f"arity mismatch: {self.nvars} vs {other.nvars}")
        return other

    def __add__(self, other):
        other = self._check(other)
        t = dict(self._terms)
        for e, c in other._terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPoly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        t: dict[tuple[int, ...], int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return LaurentPoly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have negative powers")
            (e, c), = self._terms.items()
            if abs(c) != 1:
                raise ValueError("monomial with non-unit coefficient is not invertible")
            return LaurentPoly(self.nvars, {tuple(x * k for x in e): c ** (-k)})
        out = LaurentPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(self.nvars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in display order: total degree descending, then exponents descending."""
        return sorted(self._terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def embed(self, nvars: int, positions: Sequence[int]) -> LaurentPoly:
        """Image under the ring map sending variable i to variable positions[i]."""
        t = {}
        for e, c in self._terms.items():
            f = [0] * nvars
            for i, x in enumerate(e):
                f[positions[i]] += x
            f = tuple(f)
            t[f] = t.get(f, 0) + c
        return LaurentPoly(nvars, t)

    def substitute(self, images: Sequence[LaurentPoly]) -> LaurentPoly:
        """Ring map sending variable i to ``images[i]``; negative powers need unit images."""
        if len(images) != self.nvars:
            raise ValueError("one image per variable required")
        nv = images[0].nvars if images else 0
        out = LaurentPoly(nv)
        for e, c in self._terms.items():
            term = LaurentPoly.constant(nv, c)
            for img, x in zip(images, e):
                if x:
                    term = term * img ** x
            out = out + term
        return out

    def to_json(self) -> list[dict]:
        return [{"coeff": c, "exp": list(e)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, nvars: int, terms: Iterable[Mapping]) -> LaurentPoly:
        t: dict[tuple[int, ...], int] = {}
        for term in terms:
            e = tuple(term["exp"])
            t[e] = t.get(e, 0) + term["coeff"]
        return cls(nvars, t)

    def format(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            factors = []
            for name, x in zip(names, e):
                if x == 1:
                    factors.append(name)
                elif x:
                    factors.append(f"{name}^{x}")
            mono = "*".join(factors)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            out.append((sign, body))
        first_sign, first = out[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"LaurentPoly({self.format()})"


def product_of_differences(nvars: int, indices: Iterable[int]) -> LaurentPoly:
    """``prod_{j in indices} (x_j - 1)``."""
    out = LaurentPoly.constant(nvars, 1)
    for j in indices:
        out = out * (LaurentPoly.variable(nvars, j) - 1)
    return out
