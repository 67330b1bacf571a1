"""Explicit finite groups, their actions on finite sets, orbits, stabilizers,
retract checks, and conjugate-incomparability."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

from .errors import InputError, InternalCheckError, PreconditionError


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its full multiplication table over element indices."""

    mult: tuple[tuple[int, ...], ...]
    identity: int
    generators: tuple[int, ...]
    inverse: tuple[int, ...] = field(default=(), compare=False)
    gen_words: tuple[tuple[int, ...], ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return len(self.mult)

    @property
    def elements(self) -> range:
        return range(self.order)

    @classmethod
    def from_mult_table(cls, table: Sequence[Sequence[int]], generators: Iterable[int]) -> "FiniteGroup":
        mult = tuple(tuple(row) for row in table)
        n = len(mult)
        if any(len(row) != n for row in mult):
            raise InputError("multiplication table must be square")
        if any(not 0 <= x < n for row in mult for x in row):
            raise InputError("multiplication table entry out of range")
        identity = None
        for e in range(n):
            if all(mult[e][g] == g and mult[g][e] == g for g in range(n)):
                identity = e
                break
        if identity is None:
            raise InputError("multiplication table has no identity")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]]:
                        raise InputError("multiplication table is not associative")
        inverse = [None] * n
        for a in range(n):
            for b in range(n):
                if mult[a][b] == identity and mult[b][a] == identity:
                    inverse[a] = b
        if any(v is None for v in inverse):
            raise InputError("some element has no inverse")
        gens = tuple(dict.fromkeys(generators))
        if any(not 0 <= g < n for g in gens):
            raise InputError("generator index out of range")
        words: dict[int, tuple[int, ...]] = {identity: ()}
        frontier = [identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = mult[a][g]
                    if b not in words:
                        words[b] = words[a] + (g,)
                        nxt.append(b)
            frontier = nxt
        if len(words) != n:
            raise InputError("the listed generators do not generate the group")
        gen_words = tuple(words[a] for a in range(n))
        return cls(mult, identity, gens, tuple(inverse), gen_words)

    @classmethod
    def from_generator_permutations(cls, perms: Sequence[Sequence[int]]) -> "FiniteGroup":
        """Closure of permutations of a faithful finite set; identity gets index 0."""
        if not perms:
            raise InputError("need at least one generator permutation")
        npts = len(perms[0])
        gens = []
        for p in perms:
            t = tuple(p)
            if len(t) != npts or sorted(t) != list(range(npts)):
                raise InputError(f"not a permutation: {p}")
            gens.append(t)
        ident = tuple(range(npts))
        elements = [ident]
        index = {ident: 0}
        frontier = [ident]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = tuple(g[a[i]] for i in range(npts))  # b = g after a (left action)
                    if b not in index:
                        index[b] = len(elements)
                        elements.append(b)
                        nxt.append(b)
            frontier = nxt
        n = len(elements)
        mult = [[0] * n for _ in range(n)]
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                mult[i][j] = index[tuple(a[b[k]] for k in range(npts))]
        return cls.from_mult_table(mult, [index[g] for g in gens])

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls.from_mult_table([[0]], [0])

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n == 1:
            return cls.trivial()
        return cls.from_generator_permutations([[(i + 1) % n for i in range(n)]])

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        rot = [(i + 1) % n for i in range(n)]
        ref = [(-i) % n for i in range(n)]
        return cls.from_generator_permutations([rot, ref])

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        if n == 1:
            return cls.trivial()
        perms = []
        for i in range(n - 1):
            p = list(range(n))
            p[i], p[i + 1] = p[i + 1], p[i]
            perms.append(p)
        return cls.from_generator_permutations(perms)

    @classmethod
    def direct_product(cls, a: "FiniteGroup", b: "FiniteGroup") -> "FiniteGroup":
        pairs = [(i, j) for i in a.elements for j in b.elements]
        index = {p: k for k, p in enumerate(pairs)}
        mult = [
            [index[(a.mult[i1][i2], b.mult[j1][j2])] for (i2, j2) in pairs]
            for (i1, j1) in pairs
        ]
        gens = [index[(g, b.identity)] for g in a.generators]
        gens += [index[(a.identity, g)] for g in b.generators]
        return cls.from_mult_table(mult, gens)

    def conj(self, h: int, g: int) -> int:
        """g^-1 h g."""
        return self.mult[self.mult[self.inverse[g]][h]][g]


@dataclass(frozen=True)
class GSet:
    """A finite set with a left action of a FiniteGroup, one permutation per element."""

    group: FiniteGroup
    act: tuple[tuple[int, ...], ...]
    labels: tuple[Hashable, ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def apply(self, g: int, p: int) -> int:
        return self.act[g][p]

    @classmethod
    def build(
        cls,
        group: FiniteGroup,
        size: int,
        element_images: Sequence[Sequence[int]],
        labels: Optional[Sequence[Hashable]] = None,
    ) -> "GSet":
        if labels is None:
            labels = tuple(range(size))
        s = cls(group, tuple(tuple(row) for row in element_images), tuple(labels))
        s.validate()
        return s

    @classmethod
    def from_generator_images(
        cls,
        group: FiniteGroup,
        size: int,
        gen_images: Sequence[Sequence[int]],
        labels: Optional[Sequence[Hashable]] = None,
    ) -> "GSet":
        """Extend per-generator permutations to the whole group along generator words."""
        if len(gen_images) != len(group.generators):
            raise InputError("need one permutation per group generator")
        per_gen = {}
        for g, img in zip(group.generators, gen_images):
            t = tuple(img)
            if len(t) != size or sorted(t) != list(range(size)):
                raise InputError("generator image is not a permutation of the points")
            per_gen[g] = t
        rows = []
        for a in group.elements:
            row = list(range(size))
            # a = g1 g2 ... gk acts by applying gk first
            for g in reversed(group.gen_words[a]):
                row = [per_gen[g][p] for p in row]
            rows.append(tuple(row))
        return cls.build(group, size, rows, labels)

    @classmethod
    def trivial_action(cls, group: FiniteGroup, size: int, labels=None) -> "GSet":
        row = tuple(range(size))
        return cls.build(group, size, [row] * group.order, labels)

    @classmethod
    def regular(cls, group: FiniteGroup) -> "GSet":
        rows = [tuple(group.mult[g][h] for h in group.elements) for g in group.elements]
        return cls.build(group, group.order, rows)

    def validate(self) -> None:
        n, m = self.group.order, self.size
        if len(self.act) != n or any(len(r) != m for r in self.act):
            raise InputError("action table has wrong shape")
        if self.act[self.group.identity] != tuple(range(m)):
            raise InputError("identity does not act trivially")
        for g in range(n):
            if sorted(self.act[g]) != list(range(m)):
                raise InputError(f"element {g} does not act by a permutation")
        mult = self.group.mult
        for g in range(n):
            for h in range(n):
                gh = mult[g][h]
                for p in range(m):
                    if self.act[gh][p] != self.act[g][self.act[h][p]]:
                        raise InputError("action is not associative: (gh)p != g(hp)")

    # -- queries -------------------------------------------------------

    def orbit(self, p: int) -> frozenset[int]:
        if not 0 <= p < self.size:
            raise PreconditionError(f"point {p} outside the carrier")
        return frozenset(self.act[g][p] for g in self.group.elements)

    def orbits(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        out = []
        for p in range(self.size):
            if p not in seen:
                orb = self.orbit(p)
                seen |= orb
                out.append(orb)
        return out

    def orbit_reps(self) -> list[int]:
        return [min(orb) for orb in self.orbits()]

    def stabilizer(self, p: int) -> frozenset[int]:
        if not 0 <= p < self.size:
            raise PreconditionError(f"point {p} outside the carrier")
        return frozenset(g for g in self.group.elements if self.act[g][p] == p)

    def is_action_closed(self, subset: Iterable[int]) -> bool:
        ss = set(subset)
        return all(self.act[g][p] in ss for p in ss for g in self.group.generators)

    def restrict(self, points: Sequence[int]) -> "GSet":
        """Sub-GSet on an action-closed subset; original labels are kept."""
        pts = sorted(set(points))
        if not self.is_action_closed(pts):
            raise PreconditionError("subset is not action-closed")
        renum = {p: i for i, p in enumerate(pts)}
        rows = [tuple(renum[self.act[g][p]] for p in pts) for g in self.group.elements]
        return GSet(self.group, tuple(rows), tuple(self.labels[p] for p in pts))


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------


def is_subgroup(group: FiniteGroup, elements: Iterable[int]) -> bool:
    ss = set(elements)
    if group.identity not in ss:
        return False
    return all(group.mult[a][b] in ss for a in ss for b in ss) and all(
        group.inverse[a] in ss for a in ss
    )


def subgroup_closure(group: FiniteGroup, elements: Iterable[int]) -> frozenset[int]:
    ss = {group.identity} | set(elements)
    frontier = list(ss)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(ss):
                for c in (group.mult[a][b], group.mult[b][a], group.inverse[a]):
                    if c not in ss:
                        ss.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(ss)


def conjugate_subgroup(group: FiniteGroup, h: Iterable[int], g: int) -> frozenset[int]:
    """H^g = g^-1 H g."""
    return frozenset(group.conj(a, g) for a in h)


def is_conjugate_incomparable(group: FiniteGroup, h: Iterable[int]) -> bool:
    """H^g contained in H only when equal; automatic for finite groups."""
    hs = frozenset(h)
    if not is_subgroup(group, hs):
        raise PreconditionError("not a subgroup")
    for g in group.elements:
        hg = conjugate_subgroup(group, hs, g)
        if hg <= hs and hg != hs:
            return False
    return True


# ---------------------------------------------------------------------------
# retracts
# ---------------------------------------------------------------------------


def retraction_map(s: GSet, u_set: Iterable[int]) -> Optional[dict[int, int]]:
    """An equivariant retraction onto the subset, or None when none exists.

    Built on orbit representatives: the lowest-index point of each outside
    orbit is sent to the lowest-index inside point whose stabilizer contains
    its own, then translated along the action.
    """
    u = set(u_set)
    if not all(0 <= p < s.size for p in u):
        raise PreconditionError("subset point outside the carrier")
    if not s.is_action_closed(u):
        raise PreconditionError("subset is not action-closed")
    ret = {p: p for p in u}
    outside = [p for p in range(s.size) if p not in u]
    stabs = {p: s.stabilizer(p) for p in range(s.size)}
    done: set[int] = set()
    for p in outside:
        if p in done:
            continue
        target = None
        for q in sorted(u):
            if stabs[p] <= stabs[q]:
                target = q
                break
        if target is None:
            return None
        for g in s.group.elements:
            ret[s.act[g][p]] = s.act[g][target]
            done.add(s.act[g][p])
    # post: equivariant and the identity on the subset
    for g in s.group.elements:
        for p in range(s.size):
            if ret[s.act[g][p]] != s.act[g][ret[p]]:
                raise InternalCheckError("constructed retraction is not equivariant")
    return ret


def is_retract(s: GSet, u_set: Iterable[int]) -> bool:
    """True iff every outside point has its stabilizer inside some subset stabilizer."""
    return retraction_map(s, u_set) is not None


# ---------------------------------------------------------------------------
# JSON formats
# ---------------------------------------------------------------------------


def group_to_json(group: FiniteGroup) -> dict:
    return {
        "order": group.order,
        "mult_table": [list(r) for r in group.mult],
        "generators": list(group.generators),
    }


def group_from_json(doc: dict) -> FiniteGroup:
    if not isinstance(doc, dict):
        raise InputError("group document must be an object")
    if "mult_table" in doc:
        table = doc["mult_table"]
        gens = doc.get("generators")
        if gens is None:
            gens = list(range(len(table)))
        group = FiniteGroup.from_mult_table(table, gens)
        if "order" in doc and doc["order"] != group.order:
            raise InputError("declared order does not match the table")
        return group
    if "generator_permutations" in doc:
        return FiniteGroup.from_generator_permutations(doc["generator_permutations"])
    raise InputError("group document needs mult_table or generator_permutations")


def gset_to_json(s: GSet) -> dict:
    return {
        "points": list(s.labels),
        "action": [list(s.act[g]) for g in s.group.generators],
    }


def gset_from_json(group: FiniteGroup, doc: dict) -> GSet:
    if not isinstance(doc, dict) or "points" not in doc or "action" not in doc:
        raise InputError("gset document needs points and action")
    points = doc["points"]
    size = points if isinstance(points, int) else len(points)
    labels = None if isinstance(points, int) else points
    action = doc["action"]
    if len(action) == len(group.generators):
        return GSet.from_generator_images(group, size, action, labels)
    if len(action) == group.order:
        return GSet.build(group, size, action, labels)
    raise InputError("action must list one permutation per generator or per element")
