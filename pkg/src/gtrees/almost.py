"""Twisted-action constructions on finite models: derivations into modules,
the twisted G-set they define, the explicit potential trivializing any
derivation into a function module, coset retractions, and the untwisting
isomorphism between function G-sets.

Function spaces (E, A) are represented as tuples indexed by the points of E
with values in A; the ambient action is (g.v)(e) = g(v(g^-1 e)).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InputError, InternalCheckError, PreconditionError
from .gaction import FiniteGroup, GSet


@dataclass(frozen=True)
class AbelianGroup:
    """A finite abelian group: addition table, negation, zero index."""

    add: tuple[tuple[int, ...], ...]
    neg: tuple[int, ...]
    zero: int
    factors: Optional[tuple[int, ...]] = None

    @property
    def size(self) -> int:
        return len(self.add)

    @classmethod
    def from_factors(cls, factors: Sequence[int]) -> "AbelianGroup":
        """Product of cyclic groups; elements are mixed-radix tuples."""
        factors = tuple(int(f) for f in factors)
        if any(f < 1 for f in factors):
            raise InputError("cyclic factors must be positive")
        size = 1
        for f in factors:
            size *= f

        def decode(i):
            out = []
            for f in reversed(factors):
                out.append(i % f)
                i //= f
            return tuple(reversed(out))

        def encode(t):
            i = 0
            for f, x in zip(factors, t):
                i = i * f + (x % f)
            return i

        add = tuple(
            tuple(encode(tuple(a + b for a, b in zip(decode(i), decode(j)))) for j in range(size))
            for i in range(size)
        )
        neg = tuple(encode(tuple(-a for a in decode(i))) for i in range(size))
        return cls(add, neg, 0, factors)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]]) -> "AbelianGroup":
        add = tuple(tuple(row) for row in table)
        n = len(add)
        if any(len(r) != n for r in add):
            raise InputError("addition table must be square")
        zero = None
        for e in range(n):
            if all(add[e][x] == x for x in range(n)):
                zero = e
                break
        if zero is None:
            raise InputError("addition table has no zero")
        for a in range(n):
            for b in range(n):
                if add[a][b] != add[b][a]:
                    raise InputError("addition table is not commutative")
                for c in range(n):
                    if add[add[a][b]][c] != add[a][add[b][c]]:
                        raise InputError("addition table is not associative")
        neg = [None] * n
        for a in range(n):
            for b in range(n):
                if add[a][b] == zero:
                    neg[a] = b
        if any(v is None for v in neg):
            raise InputError("some element has no negative")
        return cls(add, tuple(neg), zero)

    def sum_of(self, items: Iterable[int]) -> int:
        acc = self.zero
        for x in items:
            acc = self.add[acc][x]
        return acc

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]


@dataclass(frozen=True)
class GModule:
    """A finite abelian group on which the group acts by additive automorphisms."""

    group: FiniteGroup
    carrier: AbelianGroup
    act: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, group: FiniteGroup, carrier: AbelianGroup, element_images: Sequence[Sequence[int]]) -> "GModule":
        m = cls(group, carrier, tuple(tuple(r) for r in element_images))
        m.validate()
        return m

    @classmethod
    def from_generator_maps(
        cls, group: FiniteGroup, carrier: AbelianGroup, gen_maps: Sequence[Sequence[int]]
    ) -> "GModule":
        if len(gen_maps) != len(group.generators):
            raise InputError("need one automorphism per group generator")
        per_gen = {g: tuple(img) for g, img in zip(group.generators, gen_maps)}
        rows = []
        for a in group.elements:
            row = list(range(carrier.size))
            for g in reversed(group.gen_words[a]):
                row = [per_gen[g][x] for x in row]
            rows.append(tuple(row))
        return cls.build(group, carrier, rows)

    @classmethod
    def trivial(cls, group: FiniteGroup, carrier: AbelianGroup) -> "GModule":
        row = tuple(range(carrier.size))
        return cls.build(group, carrier, [row] * group.order)

    def validate(self) -> None:
        n, m = self.group.order, self.carrier.size
        if len(self.act) != n or any(len(r) != m for r in self.act):
            raise InputError("module action has wrong shape")
        if self.act[self.group.identity] != tuple(range(m)):
            raise InputError("identity does not act trivially on the module")
        add = self.carrier.add
        for g in range(n):
            row = self.act[g]
            if sorted(row) != list(range(m)):
                raise InputError(f"element {g} does not act bijectively")
            for a in range(m):
                for b in range(m):
                    if row[add[a][b]] != add[row[a]][row[b]]:
                        raise InputError(f"element {g} does not act additively")
        for g in range(n):
            for h in range(n):
                gh = self.group.mult[g][h]
                for a in range(m):
                    if self.act[gh][a] != self.act[g][self.act[h][a]]:
                        raise InputError("module action is not associative")

    def as_gset(self) -> GSet:
        return GSet.build(self.group, self.carrier.size, self.act)


# ---------------------------------------------------------------------------
# derivations and the twisted G-set
# ---------------------------------------------------------------------------


def check_derivation(module: GModule, d: Sequence[int]) -> bool:
    """Exhaustive check of d(xy) = d(x) + x.d(y) over the whole group square."""
    group, add = module.group, module.carrier.add
    if len(d) != group.order:
        raise InputError("derivation must assign a value to every group element")
    for x in group.elements:
        for y in group.elements:
            if d[group.mult[x][y]] != add[d[x]][module.act[x][d[y]]]:
                return False
    return True


def inner_derivation(module: GModule, v: int) -> tuple[int, ...]:
    """g -> g.v - v."""
    car = module.carrier
    return tuple(car.sub(module.act[g][v], v) for g in module.group.elements)


def twisted_gset(module: GModule, d: Sequence[int]) -> GSet:
    """The module's carrier with the action g.m = gm + d(g)."""
    if not check_derivation(module, d):
        raise PreconditionError("the map is not a derivation")
    add = module.carrier.add
    rows = [
        tuple(add[module.act[g][m]][d[g]] for m in range(module.carrier.size))
        for g in module.group.elements
    ]
    s = GSet.build(module.group, module.carrier.size, rows)
    return s


def twisted_stabilizer_kernel(module: GModule, d: Sequence[int], p: int) -> frozenset[int]:
    """{g : d(g) + g.p - p = 0}; equals the twisted-action stabilizer of p."""
    car = module.carrier
    return frozenset(
        g
        for g in module.group.elements
        if car.add[d[g]][car.sub(module.act[g][p], p)] == car.zero
    )


# ---------------------------------------------------------------------------
# function spaces (E, A)
# ---------------------------------------------------------------------------


def function_action(e_set: GSet, a_set: GSet, g: int, fn: Sequence[int]) -> tuple[int, ...]:
    """(g.v)(e) = g(v(g^-1 e))."""
    inv = e_set.group.inverse[g]
    return tuple(a_set.act[g][fn[e_set.act[inv][e]]] for e in range(e_set.size))


def function_gset(e_set: GSet, a_set: GSet, size_limit: int = 100_000) -> GSet:
    """All maps E -> A as an explicit G-set (small instances only)."""
    if a_set.size**e_set.size > size_limit:
        raise InputError("function space too large to enumerate")
    fns = list(product(range(a_set.size), repeat=e_set.size))
    index = {fn: i for i, fn in enumerate(fns)}
    rows = [
        tuple(index[function_action(e_set, a_set, g, fn)] for fn in fns)
        for g in e_set.group.elements
    ]
    return GSet.build(e_set.group, len(fns), rows, labels=fns)


def almost_equal(f1: Sequence[int], f2: Sequence[int]) -> bool:
    """Whether two functions differ in only finitely many places (always, here)."""
    return len(difference_set(f1, f2)) < float("inf")


def difference_set(f1: Sequence[int], f2: Sequence[int]) -> frozenset[int]:
    if len(f1) != len(f2):
        raise InputError("functions over different point sets")
    return frozenset(e for e in range(len(f1)) if f1[e] != f2[e])


# ---------------------------------------------------------------------------
# the function module A[G] and the explicit potential
# ---------------------------------------------------------------------------


def ag_shift(group: FiniteGroup, u: Sequence[int], g: int) -> tuple[int, ...]:
    """(g.u)(x) = u(g^-1 x): the function-module action with A untouched."""
    inv = group.inverse[g]
    return tuple(u[group.mult[inv][x]] for x in group.elements)


def ag_add(a: AbelianGroup, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    return tuple(a.add[x][y] for x, y in zip(u, v))


def ag_sub(a: AbelianGroup, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    return tuple(a.sub(x, y) for x, y in zip(u, v))


def check_function_derivation(group: FiniteGroup, a: AbelianGroup, d: Sequence[Sequence[int]]) -> bool:
    """Cocycle rule for d: G -> (functions G -> A)."""
    if len(d) != group.order or any(len(row) != group.order for row in d):
        raise InputError("derivation must give one function per group element")
    for x in group.elements:
        for y in group.elements:
            lhs = tuple(d[group.mult[x][y]])
            rhs = ag_add(a, d[x], ag_shift(group, d[y], x))
            if lhs != rhs:
                return False
    return True


def hochschild_v(group: FiniteGroup, a: AbelianGroup, d: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """The explicit potential v(x) = -(d(x))(x), with g.v - v = d(g) for all g."""
    if not check_function_derivation(group, a, d):
        raise PreconditionError("the map is not a derivation into the function module")
    v = tuple(a.neg[d[x][x]] for x in group.elements)
    for g in group.elements:
        if ag_sub(a, ag_shift(group, v, g), v) != tuple(d[g]):
            raise InternalCheckError("potential fails its defining identity")
    return v


def coset_retraction(
    group: FiniteGroup,
    a: AbelianGroup,
    v: Sequence[int],
    p_members: Iterable[tuple[int, ...]],
    pi: Mapping[tuple[int, ...], tuple[int, ...]],
    d: Sequence[Sequence[int]],
) -> dict[tuple[int, ...], tuple[int, ...]]:
    """The equivariant retraction v + m -> v + pi(m) of the shifted coset.

    pi must be an additive, equivariant projection of the function module
    onto the submodule P, and the derivation must take values in P.
    """
    p_set = {tuple(m) for m in p_members}
    dom = list(pi.keys())
    if len(dom) != a.size**group.order:
        raise PreconditionError("the projection must be defined on the whole function module")
    if set(pi.values()) - p_set:
        raise PreconditionError("the projection does not land in the submodule")
    for m in p_set:
        if tuple(pi[m]) != m:
            raise PreconditionError("the projection is not the identity on the submodule")
    for m in dom:
        for m2 in dom:
            if pi.get(ag_add(a, m, m2)) != ag_add(a, pi[m], pi[m2]):
                raise PreconditionError("the projection is not additive")
    for g in group.elements:
        for m in dom:
            if pi.get(ag_shift(group, m, g)) != ag_shift(group, pi[m], g):
                raise PreconditionError("the projection is not equivariant")
    for g in group.elements:
        if tuple(d[g]) not in p_set:
            raise PreconditionError("the derivation leaves the submodule")
    v = tuple(v)
    for g in group.elements:
        if ag_sub(a, ag_shift(group, v, g), v) != tuple(d[g]):
            raise PreconditionError("the shifted coset is not action-closed for this derivation")

    out = {ag_add(a, v, m): ag_add(a, v, pi[m]) for m in dom}
    # equivariance in the ambient function space: g(v+m) = v + (gm + d(g))
    for g in group.elements:
        for m in dom:
            src = ag_add(a, v, m)
            moved = ag_shift(group, src, g)
            if moved != ag_add(a, v, ag_add(a, ag_shift(group, m, g), d[g])):
                raise InternalCheckError("ambient action disagrees with the twisted form")
            if out[moved] != ag_shift(group, out[src], g):
                raise InternalCheckError("coset retraction is not equivariant")
    return out


# ---------------------------------------------------------------------------
# untwisting function G-sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UntwistPair:
    """Mutually inverse maps between (E, A) and (E, A-with-trivial-action)."""

    e_set: GSet
    a_set: GSet
    transversal: tuple[int, ...]
    g_of: tuple[int, ...]

    def hat(self, phi: Sequence[int]) -> tuple[int, ...]:
        inv = self.e_set.group.inverse
        return tuple(self.a_set.act[inv[self.g_of[x]]][phi[x]] for x in range(self.e_set.size))

    def tilde(self, psi: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.a_set.act[self.g_of[x]][psi[x]] for x in range(self.e_set.size))


def untwist(e_set: GSet, a_set: GSet, transversal: Sequence[int]) -> UntwistPair:
    """Build the untwisting pair; point stabilizers of E must fix A pointwise."""
    if e_set.group != a_set.group:
        raise PreconditionError("both G-sets must share one group")
    orbits = e_set.orbits()
    tr = list(transversal)
    if len(tr) != len(orbits) or {frozenset(e_set.orbit(x)) for x in tr} != {frozenset(o) for o in orbits}:
        raise PreconditionError("transversal must meet each orbit exactly once")
    ident = tuple(range(a_set.size))
    for x in range(e_set.size):
        for s in e_set.stabilizer(x):
            if a_set.act[s] != ident:
                raise PreconditionError("a point stabilizer acts nontrivially on the value set")
    g_of = [None] * e_set.size
    for x0 in tr:
        for g in e_set.group.elements:
            y = e_set.act[g][x0]
            if g_of[y] is None:
                g_of[y] = g
    return UntwistPair(e_set, a_set, tuple(tr), tuple(g_of))
