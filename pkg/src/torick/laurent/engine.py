"""Strong Groebner bases over the integers.

Polynomials are plain dicts mapping monomials to nonzero ints.  A monomial
is a tuple ``(component, e_1, ..., e_n)``: ideals use component 0 only,
submodules of a free module use one component per basis vector.  The
monomial order is supplied as a key function returning a flat int tuple;
larger tuples are larger monomials.

The algorithm is Buchberger's with both S-polynomials and
G-polynomials (the gcd combinations of leading coefficients), and
reduction with remainder on leading coefficients.  The result is
interreduced, with positive leading coefficients and tails reduced into
``[0, c)`` ranges, which makes it canonical for a fixed order.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from math import gcd
from threading import Event
from typing import Callable, Iterable, Sequence

from ..errors import ResourceLimit

Mono = tuple
Poly = dict

DEFAULT_STEP_BUDGET = 10 ** 6


@dataclass
class Budget:
    """Counts reduction steps; exceeding ``max_steps`` raises ResourceLimit.

    ``cancel`` is checked on every tick so a caller on another thread can
    stop a long computation cooperatively.
    """

    max_steps: int = DEFAULT_STEP_BUDGET
    cancel: Event | None = None
    steps: int = field(default=0, init=False)

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.max_steps:
            raise ResourceLimit(f"step budget of {self.max_steps} reductions exceeded")
        if self.cancel is not None and self.cancel.is_set():
            raise ResourceLimit("computation cancelled")


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, u, v) with u*a + v*b == g == gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def divides(a: Mono, b: Mono) -> bool:
    if a[0] != b[0]:
        return False
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def mono_lcm(a: Mono, b: Mono) -> Mono:
    return (a[0],) + tuple(max(x, y) for x, y in zip(a[1:], b[1:]))


def mono_div(a: Mono, b: Mono) -> tuple[int, ...]:
    """Exponent shift ``a / b`` (component dropped); assumes ``b | a``."""
    return tuple(x - y for x, y in zip(a[1:], b[1:]))


def shift(p: Poly, s: Sequence[int], c: int = 1) -> Poly:
    return {(m[0],) + tuple(x + y for x, y in zip(m[1:], s)): c * v for m, v in p.items()}


def add_into(p: Poly, q: Poly, c: int = 1) -> None:
    for m, v in q.items():
        w = p.get(m, 0) + c * v
        if w:
            p[m] = w
        else:
            p.pop(m, None)


@dataclass
class Element:
    lm: Mono
    lc: int
    poly: Poly


class Engine:
    """Groebner machinery for one monomial order."""

    def __init__(self, key: Callable[[Mono], tuple[int, ...]], budget: Budget | None = None,
                 module: bool = False):
        self._key = key
        self._nkeys: dict[Mono, tuple[int, ...]] = {}
        self.budget = budget if budget is not None else Budget()
        self.module = module

    def nkey(self, m: Mono) -> tuple[int, ...]:
        k = self._nkeys.get(m)
        if k is None:
            k = tuple(-x for x in self._key(m))
            self._nkeys[m] = k
        return k

    def lead(self, p: Poly) -> Mono:
        return min(p, key=self.nkey)

    def element(self, p: Poly) -> Element:
        lm = self.lead(p)
        if p[lm] < 0:
            p = {m: -c for m, c in p.items()}
        return Element(lm, p[lm], p)

    def sorted_monos(self, p: Iterable[Mono]) -> list[Mono]:
        """Monomials in decreasing order."""
        return sorted(p, key=self.nkey)

    # -- reduction ---------------------------------------------------------

    def _best_divisor(self, m: Mono, basis: Sequence[Element], skip=None) -> Element | None:
        best = None
        for e in basis:
            if e is skip or (best is not None and e.lc >= best.lc):
                continue
            if divides(e.lm, m):
                best = e
                if e.lc == 1:
                    break
        return best

    def reduce(self, p: Poly, basis: Sequence[Element], skip: Element | None = None) -> Poly:
        """Full reduction with remainder; the result is unique when basis is a strong GB."""
        if not p or not basis:
            return dict(p)
        p = dict(p)
        heap = [(self.nkey(m), m) for m in p]
        heapq.heapify(heap)
        queued = set(p)
        rem: Poly = {}
        tick = self.budget.tick
        while heap:
            _, m = heapq.heappop(heap)
            queued.discard(m)
            c = p.pop(m, 0)
            if not c:
                continue
            e = self._best_divisor(m, basis, skip)
            if e is None:
                rem[m] = c
                continue
            q = c // e.lc
            if q:
                tick()
                s = mono_div(m, e.lm)
                for gm, gc in e.poly.items():
                    if gm == e.lm:
                        continue
                    mm = (gm[0],) + tuple(x + y for x, y in zip(gm[1:], s))
                    w = p.get(mm, 0) - q * gc
                    if w:
                        p[mm] = w
                        if mm not in queued:
                            queued.add(mm)
                            heapq.heappush(heap, (self.nkey(mm), mm))
                    else:
                        p.pop(mm, None)
            r = c - q * e.lc
            if r:
                rem[m] = r
        return rem

    # -- basis construction -----------------------------------------------

    def spoly(self, f: Element, g: Element) -> Poly:
        L = mono_lcm(f.lm, g.lm)
        c = f.lc * g.lc // gcd(f.lc, g.lc)
        out = shift(f.poly, mono_div(L, f.lm), c // f.lc)
        add_into(out, shift(g.poly, mono_div(L, g.lm), c // g.lc), -1)
        return out

    def gpoly(self, f: Element, g: Element) -> Poly:
        L = mono_lcm(f.lm, g.lm)
        _, u, v = xgcd(f.lc, g.lc)
        out = shift(f.poly, mono_div(L, f.lm), u)
        add_into(out, shift(g.poly, mono_div(L, g.lm), v))
        return out

    def groebner(self, gens: Iterable[Poly]) -> list[Element]:
        basis: list[Element] = []
        pairs: list = []
        counter = itertools.count()

        def add(p: Poly) -> None:
            if not p:
                return
            e = self.element(p)
            for i, f in enumerate(basis):
                if f.lm[0] == e.lm[0]:
                    L = mono_lcm(f.lm, e.lm)
                    heapq.heappush(pairs, (self._key(L), next(counter), i, len(basis)))
            basis.append(e)

        for g in gens:
            add(self.reduce(g, basis))

        while pairs:
            _, _, i, j = heapq.heappop(pairs)
            f, g = basis[i], basis[j]
            coprime_monos = all(x == 0 or y == 0 for x, y in zip(f.lm[1:], g.lm[1:]))
            skip_s = not self.module and coprime_monos and gcd(f.lc, g.lc) == 1
            if not skip_s:
                add(self.reduce(self.spoly(f, g), basis))
            if f.lc % g.lc and g.lc % f.lc:
                add(self.reduce(self.gpoly(f, g), basis))
        return self.interreduce(basis)

    def interreduce(self, basis: Sequence[Element]) -> list[Element]:
        # minimalise: drop elements whose leading term another one divides
        elems = sorted(basis, key=lambda e: (self._key(e.lm), e.lc))
        keep: list[Element] = []
        for e in elems:
            if any(divides(k.lm, e.lm) and e.lc % k.lc == 0 for k in keep):
                continue
            keep = [k for k in keep if not (divides(e.lm, k.lm) and k.lc % e.lc == 0)]
            keep.append(e)
        out = []
        for e in keep:
            tail = {m: c for m, c in e.poly.items() if m != e.lm}
            red = self.reduce(tail, keep, skip=e)
            red[e.lm] = e.lc
            out.append(Element(e.lm, e.lc, red))
        out.sort(key=lambda e: self.nkey(e.lm), reverse=True)
        return out

    def is_groebner(self, basis: Sequence[Element]) -> bool:
        """Check every S- and G-polynomial reduces to zero (no criteria used)."""
        for f, g in itertools.combinations(basis, 2):
            if f.lm[0] != g.lm[0]:
                continue
            if self.reduce(self.spoly(f, g), basis):
                return False
            if self.reduce(self.gpoly(f, g), basis):
                return False
        return True


def leading_modulus(m: Mono, basis: Sequence[Element]) -> int:
    """Generator of the ideal of leading coefficients at ``m`` (0 if none)."""
    g = 0
    for e in basis:
        if divides(e.lm, m):
            g = gcd(g, e.lc)
    return g


def order_ideal(nvars: int, component: int, blocked: Sequence[Mono], limit: int = 200000
                ) -> list[Mono] | None:
    """Monomials of one component not divisible by any of ``blocked``.

    Returns None when the set is infinite (some variable has no pure power
    among the blockers) or exceeds ``limit``.
    """
    blocked = [b for b in blocked if b[0] == component]
    start = (component,) + (0,) * nvars
    if any(divides(b, start) for b in blocked):
        return []
    for v in range(nvars):
        if not any(b[1 + v] > 0 and all(x == 0 for k, x in enumerate(b[1:]) if k != v)
                   for b in blocked):
            return None
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            for v in range(nvars):
                w = m[:1 + v] + (m[1 + v] + 1,) + m[2 + v:]
                if w in seen or any(divides(b, w) for b in blocked):
                    continue
                seen.add(w)
                nxt.append(w)
        if len(seen) > limit:
            return None
        frontier = nxt
    return sorted(seen)


def additive_relations(engine: Engine, basis: Sequence[Element], seeds: Iterable[Mono],
                       limit: int = 100000) -> tuple[list[Mono], list[Poly]]:
    """Z-linear relations among reduced monomials, closed under the monomials they involve.

    A monomial m with leading modulus c > 0 obeys ``c*m = -NF(tail)``, read off
    the basis element whose leading term is ``c*m``; the tail only involves
    smaller monomials, so the closure is finite.  The span of the returned
    monomials modulo these rows embeds in the quotient by the basis.
    """
    seen: set = set()
    todo = list(seeds)
    rels: list[Poly] = []
    while todo:
        m = todo.pop()
        if m in seen:
            continue
        seen.add(m)
        if len(seen) > limit:
            raise ResourceLimit(f"more than {limit} monomials in an additive closure")
        c = leading_modulus(m, basis)
        if c == 0:
            continue
        g = next((e for e in basis if e.lc == c and divides(e.lm, m)), None)
        if g is None:
            raise ValueError("basis is not a strong Groebner basis")
        tail = {k: v for k, v in g.poly.items() if k != g.lm}
        row = engine.reduce(shift(tail, mono_div(m, g.lm)), basis)
        todo.extend(row)
        row[m] = c
        rels.append(row)
    return engine.sorted_monos(seen), rels
