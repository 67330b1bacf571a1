"""Retracting the vertex set of a finite G-tree onto a G-retract.

The pipeline assigns a degree map (a filtration) to vertices and edges,
removes the "problematic" configurations where every shortest descent path
must first climb one level (by equivariant sliding), and finally compresses
one distinguished edge per outside vertex to land on a G-tree whose vertex
set is exactly the retract.

Degrees are natural numbers here: on finite instances every stage of the
transfinite construction collapses to a successor step, and the limit-stage
branches are unreachable (guarded by internal checks).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .errors import InternalCheckError, PreconditionError
from .gaction import is_conjugate_incomparable
from .ggraph import (
    GGraph,
    GPath,
    compress,
    geodesic,
    reorient,
    slide,
    validate,
)


@dataclass(frozen=True)
class Filtration:
    """Degree map on vertices and edges; kappa = 1 + max degree."""

    vdeg: tuple[int, ...]
    edeg: tuple[int, ...]
    kappa: int

    def vertex_level(self, alpha: int) -> list[int]:
        return [v for v, d in enumerate(self.vdeg) if d == alpha]

    def edge_level(self, alpha: int) -> list[int]:
        return [e for e, d in enumerate(self.edeg) if d == alpha]


@dataclass(frozen=True)
class Move:
    kind: str
    detail: dict
    pre: str
    post: str


@dataclass(frozen=True)
class RetractState:
    """Immutable snapshot of the pipeline: tree + filtration + move history."""

    tree: GGraph
    filtration: Filtration
    u_set: frozenset[int]
    move_log: tuple[Move, ...] = ()
    _vstab: tuple[frozenset[int], ...] = field(default=(), compare=False, repr=False)

    @property
    def w_set(self) -> frozenset[int]:
        return frozenset(range(self.tree.n_vertices)) - self.u_set

    def vstab(self, v: int) -> frozenset[int]:
        return self._vstab[v]

    def with_tree(self, tree: GGraph, new_moves: Iterable[Move]) -> "RetractState":
        return replace(self, tree=tree, move_log=self.move_log + tuple(new_moves))


def make_state(tree: GGraph, u_set: Iterable[int], filtration: Optional[Filtration] = None) -> RetractState:
    u = frozenset(u_set)
    if filtration is None:
        filtration = build_filtration(tree, u)
    vstab = tuple(tree.vertices.stabilizer(v) for v in range(tree.n_vertices))
    return RetractState(tree, filtration, u, (), vstab)


# ---------------------------------------------------------------------------
# building a filtration
# ---------------------------------------------------------------------------


def _retract_precheck(tree: GGraph, u: frozenset[int]) -> None:
    from .gaction import retraction_map

    rep = validate(tree)
    if not rep.is_tree:
        raise PreconditionError("input graph is not a G-tree")
    if retraction_map(tree.vertices, u) is None:
        raise PreconditionError("the given vertex subset is not a G-retract")


def build_filtration(tree: GGraph, u_set: Iterable[int]) -> Filtration:
    """Assign degrees stagewise.

    Stage 1 consumes one fresh edge orbit.  A later stage alpha+1 routes each
    vertex first seen at level alpha down a geodesic towards an already-placed
    vertex fixed by its stabilizer; the new edges on those geodesics form the
    next level (or, if none are new, one fresh orbit is consumed).
    """
    u = frozenset(u_set)
    _retract_precheck(tree, u)
    nv, ne = tree.n_vertices, tree.n_edges
    vstab = [tree.vertices.stabilizer(v) for v in range(nv)]
    edge_level: dict[int, int] = {}
    vertex_level: dict[int, int] = {v: 0 for v in u}

    def place_edges(es: Iterable[int], gamma: int) -> None:
        for e in es:
            edge_level[e] = gamma
            for v in (tree.iota[e], tree.tau[e]):
                if v not in vertex_level:
                    vertex_level[v] = gamma

    def lowest_fresh_orbit() -> list[int]:
        e0 = min(e for e in range(ne) if e not in edge_level)
        return sorted(tree.edges.orbit(e0))

    gamma = 0
    while len(edge_level) < ne:
        gamma += 1
        if gamma > ne + 1:
            raise InternalCheckError("filtration construction failed to terminate")
        if gamma == 1:
            place_edges(lowest_fresh_orbit(), gamma)
            continue
        alpha = gamma - 1
        v_alpha = sorted(v for v, lvl in vertex_level.items() if lvl == alpha)
        collected: set[int] = set()
        seen_orbit: set[int] = set()
        for w in v_alpha:
            if w in seen_orbit:
                continue
            seen_orbit |= tree.vertices.orbit(w)
            target = None
            for v in sorted(vertex_level):
                if vertex_level[v] < alpha and vstab[w] <= vstab[v]:
                    target = v
                    break
            if target is None:
                raise InternalCheckError("no placed vertex absorbs the stabilizer of a placed vertex")
            path = geodesic(tree, w, target)
            cut = next(
                i
                for i in range(1, len(path.vertices))
                if path.vertices[i] in vertex_level and vertex_level[path.vertices[i]] < alpha
            )
            for z in path.vertices[: cut + 1]:
                if not vstab[w] <= vstab[z]:
                    raise InternalCheckError("stabilizer does not fix the chosen descent geodesic")
            for e, _ in path.steps[:cut]:
                collected |= tree.edges.orbit(e)
        if any(edge_level.get(e, gamma) < alpha for e in collected):
            raise InternalCheckError("descent geodesic used an edge below its window")
        fresh = sorted(e for e in collected if e not in edge_level)
        if fresh:
            place_edges(fresh, gamma)
        else:
            place_edges(lowest_fresh_orbit(), gamma)

    kappa = 1 + max(edge_level.values(), default=0)
    vdeg = tuple(vertex_level[v] for v in range(nv))
    edeg = tuple(edge_level[e] for e in range(ne))
    return Filtration(vdeg, edeg, kappa)


def check_filtration(tree: GGraph, u_set: Iterable[int], filt: Filtration) -> list[str]:
    """Executable form of the four filtration conditions; empty means valid."""
    u = frozenset(u_set)
    problems: list[str] = []
    nv, ne = tree.n_vertices, tree.n_edges

    # degrees must be constant on orbits (action-closed level sets; also (3))
    for v in range(nv):
        for g in tree.group.generators:
            if filt.vdeg[tree.vertices.act[g][v]] != filt.vdeg[v]:
                problems.append(f"(1) vertex degree not constant on the orbit of {v}")
    for e in range(ne):
        for g in tree.group.generators:
            if filt.edeg[tree.edges.act[g][e]] != filt.edeg[e]:
                problems.append(f"(1) edge degree not constant on the orbit of {e}")

    # (1) every initial segment is a subforest with both endpoints present
    for e in range(ne):
        if max(filt.vdeg[tree.iota[e]], filt.vdeg[tree.tau[e]]) > filt.edeg[e]:
            problems.append(f"(1) edge {e} enters a level before both endpoints")
    from .ggraph import _UnionFind

    for beta in range(filt.kappa + 1):
        uf = _UnionFind(nv)
        for e in range(ne):
            if filt.edeg[e] < beta:
                if not uf.union(tree.iota[e], tree.tau[e]):
                    problems.append(f"(1) level set below {beta} contains a cycle")
                    break

    # (2) level zero is exactly the retract, and holds no edges
    if {v for v in range(nv) if filt.vdeg[v] == 0} != u:
        problems.append("(2) vertex level zero differs from the retract")
    if any(filt.edeg[e] == 0 for e in range(ne)):
        problems.append("(2) an edge has degree zero")

    # (3) each positive level is a finite union of orbits: finiteness is
    # automatic here; orbit-closure was checked above.

    # (4) every outside vertex has a descent path
    state = make_state(tree, u, filt)
    for w in sorted(state.w_set):
        if not paths_P(state, w):
            problems.append(f"(4) no descent path from vertex {w}")
    return problems


# ---------------------------------------------------------------------------
# descent paths, the lower-than order, problematic configurations
# ---------------------------------------------------------------------------


def paths_P(state: RetractState, w: int) -> list[GPath]:
    """All reduced paths from w whose pointwise stabilizer equals stab(w),
    which end strictly below deg(w), and whose edges stay in the window
    {deg(w), deg(w)+1}.  Sorted by (length, steps)."""
    if w in state.u_set:
        raise PreconditionError("descent paths are defined for outside vertices only")
    tree, filt = state.tree, state.filtration
    dw = filt.vdeg[w]
    adj = tree.adjacency()
    parent: dict[int, tuple[int, int, int]] = {w: (-1, 0, -1)}
    order = [w]
    qi = 0
    while qi < len(order):
        v = order[qi]
        qi += 1
        for e, eps, other in adj[v]:
            if other not in parent:
                parent[other] = (v, eps, e)
                order.append(other)
    out = []
    for v in order:
        if v == w or filt.vdeg[v] >= dw:
            continue
        verts = [v]
        steps = []
        cur = v
        ok = True
        while cur != w:
            prev, eps, e = parent[cur]
            if filt.edeg[e] not in (dw, dw + 1):
                ok = False
                break
            steps.append((e, eps))
            verts.append(prev)
            cur = prev
        if not ok:
            continue
        verts.reverse()
        steps.reverse()
        if all(state.vstab(w) <= state.vstab(z) for z in verts):
            out.append(GPath(tuple(verts), tuple(steps)))
    out.sort(key=lambda p: (p.length, p.steps))
    return out


def d_T(state: RetractState, w: int) -> int:
    ps = paths_P(state, w)
    if not ps:
        raise InternalCheckError(f"no descent path from vertex {w}: filtration invalid")
    return ps[0].length


def is_lower(state: RetractState, v1: int, v0: int) -> bool:
    """True when v1 is lower than v0: smaller degree, or equal positive degree
    with strictly larger stabilizer, or equal stabilizers and shorter descent."""
    filt = state.filtration
    d0, d1 = filt.vdeg[v0], filt.vdeg[v1]
    if d0 > d1:
        return True
    if d0 != d1 or d0 == 0:
        return False
    s0, s1 = state.vstab(v0), state.vstab(v1)
    if s0 < s1:
        return True
    if s0 != s1:
        return False
    return d_T(state, v0) > d_T(state, v1)


def problematic(state: RetractState) -> tuple[frozenset[int], frozenset[int]]:
    """Problematic vertices and the edges that witness them.

    A vertex is problematic when some shortest descent path must first climb
    one level; the first edges of those paths (one level above the vertex)
    are the problematic edges reported here.  Both sets are empty after
    eliminate_problematic.
    """
    tree, filt = state.tree, state.filtration
    bad_edges = set()
    bad_vertices = set()
    for w in state.w_set:
        ps = paths_P(state, w)
        if not ps:
            raise InternalCheckError(f"no descent path from vertex {w}: filtration invalid")
        d = ps[0].length
        dw = filt.vdeg[w]
        for p in ps:
            if p.length != d:
                break
            if filt.vdeg[p.vertices[1]] == dw + 1:
                bad_vertices.add(w)
                bad_edges.add(p.steps[0][0])
    return frozenset(bad_edges), frozenset(bad_vertices)


# ---------------------------------------------------------------------------
# the problem-reducing slide procedure
# ---------------------------------------------------------------------------


def _slide_endpoint(tree: GGraph, moving_edge: int, step_edge: int, step_eps: int, log: list[Move]) -> GGraph:
    """One equivariant sliding operation: move the tau-endpoint of the orbit
    of moving_edge along step_edge traversed with sign step_eps, restoring the
    step edge's stored orientation afterwards."""
    flipped_step = step_eps == -1
    if flipped_step:
        pre = tree.state_digest()
        tree = reorient(tree, tree.edges.orbit(step_edge))
        log.append(Move("reorient", {"orbit_of": step_edge}, pre, tree.state_digest()))
    pre = tree.state_digest()
    try:
        tree = slide(tree, moving_edge, step_edge)
    except PreconditionError as exc:
        raise InternalCheckError(f"problem-reducing slide became illegal: {exc}") from exc
    log.append(Move("slide", {"edge": moving_edge, "along": step_edge}, pre, tree.state_digest()))
    if flipped_step:
        pre = tree.state_digest()
        tree = reorient(tree, tree.edges.orbit(step_edge))
        log.append(Move("reorient", {"orbit_of": step_edge}, pre, tree.state_digest()))
    return tree


def _problem_orbit_count(state: RetractState, level: int) -> int:
    """Orbits of level edges joining a level vertex to one a level below.

    This is the quantity the sliding procedure strictly decreases; it is the
    termination measure, independent of the vertex-witness report above.
    """
    tree, filt = state.tree, state.filtration
    seen: set[int] = set()
    count = 0
    for e in range(tree.n_edges):
        if e in seen or filt.edeg[e] != level:
            continue
        a, b = filt.vdeg[tree.iota[e]], filt.vdeg[tree.tau[e]]
        if (a == level and b == level - 1) or (b == level and a == level - 1):
            count += 1
            seen |= tree.edges.orbit(e)
    return count


def eliminate_problematic(state: RetractState) -> RetractState:
    """Slide away problematic vertices level by level.

    For a problematic vertex v0 with minimal descent path v0, e1, v1, ...,
    the far endpoint of e1 is slid along the path to the first vertex already
    placed at or below v0's level; the moved orbit stops being problematic
    and no other edge's incidence changes.  The degree map never changes.
    """
    filt = state.filtration
    for alpha in range(1, filt.kappa):
        while True:
            _, bad_v = problematic(state)
            level_bad = sorted(v for v in bad_v if filt.vdeg[v] == alpha)
            if not level_bad:
                if bad_v and min(filt.vdeg[v] for v in bad_v) < alpha:
                    raise InternalCheckError("a lower level became problematic again")
                break
            v0 = level_bad[0]
            before = _problem_orbit_count(state, alpha + 1)
            ps = paths_P(state, v0)
            d = ps[0].length
            chosen = next(
                p for p in ps if p.length == d and filt.vdeg[p.vertices[1]] == alpha + 1
            )
            e1, eps1 = chosen.steps[0]
            if filt.edeg[e1] != alpha + 1:
                raise InternalCheckError("problematic first edge is not one level up")
            i = next(
                j
                for j in range(2, d + 1)
                if filt.vdeg[chosen.vertices[j]] < alpha + 1
            )
            step_orbits: set[int] = set()
            for e, _ in chosen.steps[1:i]:
                step_orbits |= state.tree.edges.orbit(e)
            if state.tree.edges.orbit(e1) & step_orbits:
                raise InternalCheckError("slide path meets the moved edge orbit")

            log: list[Move] = []
            tree = state.tree
            flipped_moving = eps1 == -1
            if flipped_moving:
                pre = tree.state_digest()
                tree = reorient(tree, tree.edges.orbit(e1))
                log.append(Move("reorient", {"orbit_of": e1}, pre, tree.state_digest()))
            for e, eps in chosen.steps[1:i]:
                tree = _slide_endpoint(tree, e1, e, eps, log)
            if flipped_moving:
                pre = tree.state_digest()
                tree = reorient(tree, tree.edges.orbit(e1))
                log.append(Move("reorient", {"orbit_of": e1}, pre, tree.state_digest()))
            state = state.with_tree(tree, log)

            after = _problem_orbit_count(state, alpha + 1)
            if after >= before:
                raise InternalCheckError("problem-reducing step did not reduce problematic orbits")
            bad = check_filtration(state.tree, state.u_set, filt)
            if bad:
                raise InternalCheckError("filtration broke during sliding: " + "; ".join(bad))
    _, bad_v = problematic(state)
    if bad_v:
        raise InternalCheckError("problematic vertices survived elimination")
    return state


# ---------------------------------------------------------------------------
# compressing onto the retract
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RetractResult:
    tree: GGraph
    move_log: tuple[Move, ...]
    removed_edges: tuple[int, ...]            # edge indices of the input tree
    removed_to_vertex: dict[int, int]         # removed edge -> outside vertex (input indices)
    bijection_by_label: dict                  # removed edge label -> vertex label


def compress_to_U(state: RetractState) -> RetractResult:
    """Reorient downhill, pick one distinguished edge per outside vertex, and
    compress those edges away; the vertex set becomes exactly the retract."""
    _, bad_v = problematic(state)
    if bad_v:
        raise PreconditionError("problematic vertices present; eliminate them first")
    tree = state.tree
    log: list[Move] = []

    flips: set[int] = set()
    seen: set[int] = set()
    for e in range(tree.n_edges):
        if e in seen:
            continue
        orb = tree.edges.orbit(e)
        seen |= orb
        if is_lower(state, tree.iota[e], tree.tau[e]):
            flips |= orb
    if flips:
        pre = tree.state_digest()
        tree = reorient(tree, flips)
        log.append(Move("reorient", {"flips": sorted(flips)}, pre, tree.state_digest()))
    state = state.with_tree(tree, log)
    log = []
    for e in range(tree.n_edges):
        if is_lower(state, tree.iota[e], tree.tau[e]):
            raise InternalCheckError("an edge still points uphill after reorientation")

    distinguished: dict[int, int] = {}
    va, ea = tree.vertices.act, tree.edges.act
    for v0 in sorted(state.w_set):
        if v0 in distinguished:
            continue
        ps = paths_P(state, v0)
        chosen = ps[0]
        e1, eps1 = chosen.steps[0]
        if eps1 != 1 or tree.iota[e1] != v0:
            raise InternalCheckError("distinguished edge does not leave its vertex")
        if tree.edges.stabilizer(e1) != state.vstab(v0):
            raise InternalCheckError("distinguished edge stabilizer differs from its vertex")
        if not is_lower(state, chosen.vertices[1], v0):
            raise InternalCheckError("distinguished neighbour is not lower")
        for g in tree.group.elements:
            w, eg = va[g][v0], ea[g][e1]
            if distinguished.setdefault(w, eg) != eg:
                raise InternalCheckError("equivariant distinguished choice clashed")
    removed = sorted(set(distinguished.values()))
    if sorted(tree.iota[e] for e in removed) != sorted(state.w_set):
        raise InternalCheckError("distinguished edges do not biject onto the outside vertices")

    keep = [e for e in range(tree.n_edges) if e not in set(removed)]
    pre = tree.state_digest()
    res = compress(tree, keep)
    log.append(
        Move("compress", {"removed": removed}, pre, res.tree.state_digest())
    )

    u_labels = {tree.vertices.labels[v] for v in state.u_set}
    if set(res.tree.vertices.labels) != u_labels:
        raise InternalCheckError("compressed vertex set is not the retract")

    removed_to_vertex = {e: tree.iota[e] for e in removed}
    bij = {tree.edges.labels[e]: tree.vertices.labels[tree.iota[e]] for e in removed}
    return RetractResult(
        tree=res.tree,
        move_log=state.move_log + tuple(log),
        removed_edges=tuple(removed),
        removed_to_vertex=removed_to_vertex,
        bijection_by_label=bij,
    )


def retract_tree(tree: GGraph, u_set: Iterable[int]) -> RetractResult:
    """Full pipeline: filtration, problem-reducing slides, compression.

    The output is a G-tree with vertex set the retract, edge set a subset of
    the input edges with unchanged stabilizers, plus the equivariant pairing
    of removed edges with outside vertices.
    """
    u = frozenset(u_set)
    _retract_precheck(tree, u)
    state = make_state(tree, u)
    for w in sorted(state.w_set):
        if not is_conjugate_incomparable(tree.group, state.vstab(w)):
            raise PreconditionError("an outside vertex has conjugate-comparable stabilizer")
    bad = check_filtration(tree, u, state.filtration)
    if bad:
        raise InternalCheckError("freshly built filtration invalid: " + "; ".join(bad))
    state = eliminate_problematic(state)
    result = compress_to_U(state)

    # postconditions of the pipeline
    if not validate(result.tree).is_tree:
        raise InternalCheckError("pipeline output is not a G-tree")
    if len(result.removed_edges) != len(state.w_set):
        raise InternalCheckError("removed edge count differs from the outside vertex count")
    old_stab = {tree.edges.labels[e]: tree.edges.stabilizer(e) for e in range(tree.n_edges)}
    for i in range(result.tree.n_edges):
        if result.tree.edges.stabilizer(i) != old_stab[result.tree.edges.labels[i]]:
            raise InternalCheckError("a retained edge changed stabilizer")
    ea, va = tree.edges.act, tree.vertices.act
    for g in tree.group.elements:
        for e, w in result.removed_to_vertex.items():
            if result.removed_to_vertex.get(ea[g][e]) != va[g][w]:
                raise InternalCheckError("removed-edge pairing is not equivariant")
    return result
