"""The constructive filling pipeline over a bubble tree.

A 1-cycle is decomposed into per-body pieces (neck geodesics inserted with
both orientations, so the pieces sum to the input exactly), each piece is
pushed to the geodesic graph and filled either inside its subtree or, when
its class survives, through a short representative in the outer neck and a
global fill.  Exact chains come from the integer solvers; the chart cone
fillings provide the mass accounting checked against the printed constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .bounds import BoundParams, bound_calculator, h_constant_log2, log2_add, log2_value, log_le
from .charts import ChartPolyline, cone_fill
from .complexes import (Chain, ComplexValidationError, WeightedComplex,
                        boundary, is_cycle, mass, transfer_chain)
from .covering import (GeodesicGraph, GraphChain, SkeletonMetric,
                       graph_cycle_to_nerve, nerve_filling_to_triangles,
                       triangle_boundary_chain)
from .homology import (InfeasibleError, IntegerLinearSolver, boundary_matrix,
                       bounded_filling, fill_context, fills_exist,
                       homology_rank_and_torsion, nr_coefficient_bound,
                       nr_coefficient_bound_exact, reduced_filling,
                       shortest_h1_basis)
from .tree import BubbleTree


class PipelineError(RuntimeError):
    """A pipeline stage failed; carries the branch trace collected so far."""

    def __init__(self, message: str, trace: Optional[list] = None):
        super().__init__(message)
        self.trace = trace or []


class DataInconsistencyError(PipelineError):
    """Tree, covering, or labeling data contradicts itself."""


class PipelineAssertionError(PipelineError):
    """A printed-constant inequality failed on actual data."""


# ---------------------------------------------------------------------------
# walks


def chain_to_walks(c: Chain) -> List[List[int]]:
    """Eulerian decomposition of a 1-cycle into closed vertex walks.

    Each walk is a vertex list whose consecutive pairs (wrapping around)
    are directed edges; the walks sum to the chain exactly.
    """
    out_arcs: Dict[int, Dict[int, int]] = {}
    for (u, v), k in c.coefficients.items():
        a, b = (u, v) if k > 0 else (v, u)
        out_arcs.setdefault(a, {})[b] = out_arcs.get(a, {}).get(b, 0) + abs(k)
    walks = []
    while True:
        starts = [v for v, heads in out_arcs.items() if heads]
        if not starts:
            break
        start = min(starts)
        walk = [start]
        cur = start
        while True:
            heads = out_arcs.get(cur)
            if not heads:
                raise ComplexValidationError("chain is not a cycle")
            nxt = min(heads)
            heads[nxt] -= 1
            if not heads[nxt]:
                del heads[nxt]
            if nxt == start:
                break
            walk.append(nxt)
            cur = nxt
        walks.append(walk)
    return walks


def walk_to_chain(complex: WeightedComplex, walk: Sequence[int]) -> Chain:
    c = Chain(complex, 1)
    for i, u in enumerate(walk):
        v = walk[(i + 1) % len(walk)]
        if u != v:
            c.add_term((u, v), 1)
    return c


def _loop_erase(seq: Sequence[int]) -> List[int]:
    stack: List[int] = []
    pos: Dict[int, int] = {}
    for v in seq:
        if v in pos:
            for u in stack[pos[v] + 1:]:
                del pos[u]
            del stack[pos[v] + 1:]
        else:
            pos[v] = len(stack)
            stack.append(v)
    return stack


# ---------------------------------------------------------------------------
# neck geometry


def neck_thickness_and_diameter(neck: str, tree: BubbleTree
                                ) -> Tuple[float, float]:
    """Thickness (min S1-S2 distance) and diameter of the neck subgraph.

    Distances are taken inside the neck's induced subcomplex.  The printed
    inequality diam <= B * thick with B from the instance parameters is
    asserted; a failure names the known formula caveat instead of guessing
    a corrected constant.
    """
    key = ("neckgeom", neck)
    if key in tree._cache:
        return tree._cache[key]
    r = tree.regions[neck]
    if not r.s1 or not r.s2 or (r.s1 & r.s2):
        raise ValueError(f"neck {neck}: S1/S2 labels missing or overlapping")
    ncx = tree.neck_complex(neck)
    nm = SkeletonMetric(ncx)
    verts = ncx.vertices
    reach = nm._tree(verts[0])[0]
    if len(reach) != len(verts):
        raise ValueError(f"neck {neck} subgraph disconnected")
    diam = 0.0
    for v in verts:
        diam = max(diam, max(nm._tree(v)[0].values()))
    thick = min(nm.dist(a, b) for a in r.s1 for b in r.s2)
    B = tree.params.neck_distortion
    if diam > B * thick * (1.0 + 1e-9):
        raise PipelineAssertionError(
            f"neck {neck}: diam {diam} exceeds B*thick {B * thick}; the "
            f"printed constant B(v) = (20/3) sqrt(1-eps) sqrt(1+2eps) is "
            f"known to be delicate, see the validation notes")
    tree._cache[key] = (thick, diam)
    return thick, diam


# ---------------------------------------------------------------------------
# cycle decomposition over the tree


def decompose_cycle(c: Chain, tree: BubbleTree
                    ) -> List[Tuple[str, Chain]]:
    """Split a 1-cycle into closed per-body pieces summing to it exactly.

    Inserted neck geodesics appear once with each orientation.  Each
    piece's support stays inside one body together with its incident
    necks; the total piece mass is checked against (2B+1)^depth * mass(c).
    """
    if not is_cycle(c):
        raise ValueError("decompose_cycle needs a cycle")
    if c.is_empty():
        return []
    labeled = set()
    for r in tree.regions.values():
        labeled |= r.vertices
    stray = c.support_vertices() - labeled
    if stray:
        raise DataInconsistencyError(f"unlabeled vertices {sorted(stray)[:8]}")
    pieces: Dict[str, Chain] = {}
    for walk in chain_to_walks(c):
        body = _deepest_body(walk, tree)
        _decompose_walk(walk, body, pieces, tree)
    out = [(b, ch) for b, ch in sorted(pieces.items()) if not ch.is_empty()]
    total = Chain(tree.complex, 1)
    for _, ch in out:
        total = total + ch
    if total != c:
        raise PipelineAssertionError("piece sum differs from the input cycle")
    budget = ((2.0 * tree.params.neck_distortion + 1.0) ** tree.params.depth
              * mass(c))
    got = sum(mass(ch) for _, ch in out)
    if got > budget * (1.0 + 1e-9):
        raise PipelineAssertionError(
            f"piece masses {got} exceed (2B+1)^k budget {budget}")
    for b, ch in out:
        allowed = set(tree.regions[b].vertices)
        neck = tree.outer_neck(b)
        if neck is not None:
            allowed |= tree.regions[neck].vertices
        for ch_id in tree.children[b]:
            allowed |= tree.regions[tree.child_neck(b, ch_id)].vertices
        if not ch.support_vertices() <= allowed:
            raise PipelineAssertionError(
                f"piece for {b} leaves body+incident necks")
    return out


def _deepest_body(walk: Sequence[int], tree: BubbleTree) -> str:
    support = set(walk)
    body = tree.root
    while True:
        for ch in tree.children[body]:
            if support <= tree.territory(ch):
                body = ch
                break
        else:
            return body


def _decompose_walk(walk: List[int], body: str, pieces: Dict[str, Chain],
                    tree: BubbleTree):
    body_set = tree.regions[body].vertices
    exc: List[Optional[str]] = []
    for v in walk:
        owner = None
        if v not in body_set:
            for ch in tree.children[body]:
                if v in tree.territory(ch):
                    owner = ch
                    break
        exc.append(owner)
    if all(e is None for e in exc):
        _accumulate(pieces, body, walk, tree)
        return
    if all(e is not None for e in exc):
        raise DataInconsistencyError(
            f"walk never meets body {body} although it is the deepest "
            f"containing body")
    shift = next(i for i, e in enumerate(exc) if e is None)
    walk = walk[shift:] + walk[:shift]
    exc = exc[shift:] + exc[:shift]

    new_walk: List[int] = []
    i = 0
    n = len(walk)
    while i < n:
        if exc[i] is None:
            new_walk.append(walk[i])
            i += 1
            continue
        ch = exc[i]
        j = i
        while j < n and exc[j] == ch:
            j += 1
        if j < n and exc[j] is not None:
            raise DataInconsistencyError(
                f"piece straddles bodies {ch} and {exc[j]} with no shared "
                f"neck vertex between them")
        entry = walk[i - 1]
        exit_ = walk[j % n]
        neck = tree.child_neck(body, ch)
        neck_verts = tree.regions[neck].vertices
        if entry not in neck_verts or exit_ not in neck_verts:
            raise DataInconsistencyError(
                f"excursion into {ch} is not cut inside neck {neck}")
        gamma = _neck_path(tree, neck, entry, exit_)
        arc = [entry] + walk[i:j] + [exit_]
        child_walk = arc + gamma[::-1][1:-1] if len(gamma) > 2 else arc
        if child_walk[0] == child_walk[-1]:
            child_walk = child_walk[:-1]
        _decompose_walk(child_walk, ch, pieces, tree)
        new_walk.extend(gamma[1:-1])
        i = j
    _accumulate(pieces, body, new_walk, tree)


def _neck_path(tree: BubbleTree, neck: str, a: int, b: int) -> List[int]:
    key = ("neckmetric", neck)
    if key not in tree._cache:
        tree._cache[key] = SkeletonMetric(tree.neck_complex(neck))
    nm = tree._cache[key]
    path = nm.path_vertices(a, b)
    if path is None:
        raise DataInconsistencyError(f"neck {neck} subgraph disconnected")
    return path


def _accumulate(pieces: Dict[str, Chain], body: str, walk: List[int],
                tree: BubbleTree):
    ch = walk_to_chain(tree.complex, walk)
    if body in pieces:
        pieces[body] = pieces[body] + ch
    else:
        pieces[body] = ch


# ---------------------------------------------------------------------------
# pushing a piece into the geodesic graph


@dataclass
class PushAccounting:
    n_balls: int
    scale: float
    simplicial_length: int
    graph_mass: float
    cone_mass: float
    charted_loops: int
    formal_loops: int
    length_bound: float
    graph_mass_bound: float
    cone_bound: float
    cone_bound_vs_graph_ok: bool
    e_mass: float = 0.0
    solve_scope: str = ""

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "n_balls", "scale", "simplicial_length", "graph_mass",
            "cone_mass", "charted_loops", "formal_loops", "length_bound",
            "graph_mass_bound", "cone_bound", "cone_bound_vs_graph_ok",
            "e_mass", "solve_scope")}


def _split_arcs(walk: List[int], limit: float,
                cx: WeightedComplex) -> List[List[int]]:
    """Greedy split of a closed walk into arcs of metric length <= limit
    (every arc keeps at least one edge)."""
    arcs = []
    cur = [walk[0]]
    acc = 0.0
    n = len(walk)
    for i in range(n):
        u, v = walk[i], walk[(i + 1) % n]
        if u == v:
            continue
        step = cx.edge_length(u, v)
        if len(cur) > 1 and acc + step > limit:
            arcs.append(cur)
            cur = [u]
            acc = 0.0
        cur.append(v)
        acc += step
    arcs.append(cur)
    return arcs


def push_to_graph(c: Chain, body: str, tree: BubbleTree,
                  scope: str = "subtree"
                  ) -> Tuple[GraphChain, Chain, PushAccounting]:
    """Homologous graph cycle plus the exact 2-chain E with dE = c - c'.

    The graph cycle comes from per-arc ball assignments with loop erasure;
    E is solved exactly in the scope subcomplex.  Cone fillings of the
    per-arc loops supply the mass accounting (chart cones where the body
    chart covers the loop, the length * r_h bound otherwise).
    """
    scope_body = body if scope == "subtree" else None
    cov = tree.scope_covering(scope_body)
    graph = tree.scope_graph(scope_body)
    region = tree.regions[body]
    R = region.scale
    r_h = region.r_h
    chart = tree.charts.get(body)
    metric = tree.metric
    cx = tree.complex
    n_balls = len(cov.balls)
    ball_center = {b.index: b.center for b in cov.balls}

    c_graph = GraphChain(graph)
    cone_total = 0.0
    charted = 0
    formal = 0
    for walk in chain_to_walks(c):
        arcs = _split_arcs(walk, R, cx)
        for arc in arcs:
            try:
                balls = [cov.assign_ball(v) for v in arc]
            except ValueError as exc:
                raise PipelineError(
                    f"arc escapes every ball of the body covering: {exc}")
            path = _loop_erase(balls)
            for a, b in zip(path, path[1:]):
                try:
                    c_graph.add(a, b, 1)
                except ValueError as exc:
                    raise DataInconsistencyError(
                        f"covering too coarse: {exc}")
            # accounting loop: arc, spoke to the end center, the center
            # path backwards, spoke from the start center
            loop_vertices = list(arc)
            loop_len = sum(cx.edge_length(u, v)
                           for u, v in zip(arc, arc[1:]) if u != v)
            loop_len += metric.dist(arc[-1], ball_center[path[-1]])
            for a, b in zip(path[::-1], path[::-1][1:]):
                loop_vertices.append(ball_center[a])
                loop_len += graph.edge(a, b).length
            loop_vertices.append(ball_center[path[0]])
            loop_len += metric.dist(ball_center[path[0]], arc[0])
            m = _account_loop(loop_vertices, loop_len, chart, r_h)
            cone_total += m[0]
            charted += m[1]
            formal += 1 - m[1]

    if not c_graph.is_closed():
        raise PipelineError("pushed graph chain is not closed")

    mass_c = mass(c)
    sl = c_graph.simplicial_length()
    len_bound = n_balls ** 2 * mass_c / R
    if sl > len_bound * (1.0 + 1e-9) + 1e-12:
        raise PipelineAssertionError(
            f"simplicial length {sl} exceeds N^2 mass/R = {len_bound}")
    gmass = c_graph.mass()
    max_radius = max((b.radius for b in cov.balls), default=R)
    gmass_bound = 2.0 * n_balls ** 2 * mass_c * max(1.0, max_radius / R)
    if scope == "subtree":
        gmass_bound = 2.0 * n_balls ** 2 * mass_c
    if gmass > gmass_bound * (1.0 + 1e-9) + 1e-12:
        raise PipelineAssertionError(
            f"graph cycle mass {gmass} exceeds 2 N^2 mass bound {gmass_bound}")
    cone_budget = 20.0 * R * (2.0 * n_balls ** 2 + 3.0) * mass_c
    if cone_total > cone_budget * (1.0 + 1e-9) + 1e-12:
        raise PipelineAssertionError(
            f"cone accounting {cone_total} exceeds 20R(2N^2+3) mass budget "
            f"{cone_budget}")
    cone_vs_graph = cone_total <= 20.0 * R * (2.0 * n_balls ** 2 + 3.0) \
        * max(gmass, 1e-300) * (1.0 + 1e-9)

    target = c - c_graph.as_complex_chain(cx)
    E, solve_scope = _solve_in_scope(target, tree, scope_body)
    acct = PushAccounting(
        n_balls=n_balls, scale=R, simplicial_length=sl, graph_mass=gmass,
        cone_mass=cone_total, charted_loops=charted, formal_loops=formal,
        length_bound=len_bound, graph_mass_bound=gmass_bound,
        cone_bound=cone_budget, cone_bound_vs_graph_ok=cone_vs_graph,
        e_mass=mass(E), solve_scope=solve_scope)
    return c_graph, E, acct


def _account_loop(vertices: List[int], loop_len: float, chart, r_h: float
                  ) -> Tuple[float, int]:
    """Cone mass of one accounting loop: chart cone when fully charted,
    otherwise the length * r_h bound of the cone lemma."""
    if chart is not None and all(chart.has_coords(v) for v in vertices):
        pts = []
        for v in vertices:
            p = chart.point(v)
            if not pts or not np.array_equal(pts[-1], p):
                pts.append(p)
        while len(pts) > 1 and np.array_equal(pts[0], pts[-1]):
            pts.pop()
        if len(pts) >= 3:
            half = r_h / 2.0
            if all(np.linalg.norm(p) < half for p in pts):
                try:
                    _, m = cone_fill(ChartPolyline(pts, closed=True), chart)
                    return m, 1
                except (ValueError, AssertionError):
                    pass
        elif len(pts) <= 2:
            return 0.0, 1
    return loop_len * r_h, 0


def _solve_in_scope(target: Chain, tree: BubbleTree,
                    scope_body: Optional[str]) -> Tuple[Chain, str]:
    """Exact filling of a bounding 1-chain, preferring the subtree."""
    if target.is_empty():
        return Chain(tree.complex, 2), "empty"
    if scope_body is not None and scope_body != tree.root:
        sub = tree.subtree_complex(scope_body)
        try:
            res = reduced_filling(transfer_chain(target, sub), sub)
            return transfer_chain(res.filling, tree.complex), "subtree"
        except (InfeasibleError, ComplexValidationError):
            pass
    try:
        res = reduced_filling(target, tree.complex)
    except InfeasibleError:
        raise DataInconsistencyError(
            "a pipeline 1-chain fails to bound in the full complex; "
            "H1 should be trivial")
    return res.filling, "global"


# ---------------------------------------------------------------------------
# branch classification


@dataclass
class BodyFillable:
    pass


@dataclass
class NeckRepresentative:
    c2: Chain
    neck: str
    E: Chain
    c2_mass: float
    budget_log2: float


def _neck_basis(tree: BubbleTree, neck: str):
    key = ("neckbasis", neck)
    if key not in tree._cache:
        ncx = tree.neck_complex(neck)
        tree._cache[key] = shortest_h1_basis(ncx)
    return tree._cache[key]


def _augmented_solver(tree: BubbleTree, body: str) -> Tuple:
    """Cached solver for d2 x + sum(lambda_t g_t) = z on the subtree."""
    key = ("augsolver", body)
    if key in tree._cache:
        return tree._cache[key]
    neck = tree.outer_neck(body)
    sub = tree.subtree_complex(body)
    basis = _neck_basis(tree, neck)
    gens = [transfer_chain(g, sub) for g, _ in basis]
    bd = boundary_matrix(sub, 2)
    edge_index = {s: i for i, s in enumerate(bd.row_simplices)}
    entries = dict(bd.entries)
    ncols = len(bd.col_simplices)
    weights = [sub.volumes[t] for t in bd.col_simplices]
    for t, g in enumerate(gens):
        col = ncols + t
        for s, coeff in g.coefficients.items():
            entries[(edge_index[s], col)] = coeff
        weights.append(mass(g))
    solver = IntegerLinearSolver(entries, len(bd.row_simplices),
                                 ncols + len(gens), weights)
    pack = (solver, bd, edge_index, ncols, basis, gens)
    tree._cache[key] = pack
    return pack


def classify_fill_branch(c: Chain, body: str, tree: BubbleTree):
    """Decide between the subtree filling branch and the neck branch.

    In the neck branch the returned representative is an integer
    combination of the neck's shortest H1 generators, homologous to the
    piece inside the subtree, with dE = c - c''.
    """
    if not is_cycle(c):
        raise ValueError("classify_fill_branch needs a cycle")
    sub = tree.subtree_complex(body)
    try:
        zs = transfer_chain(c, sub)
    except ComplexValidationError as exc:
        raise DataInconsistencyError(f"piece leaves the subtree: {exc}")
    if c.is_empty() or fills_exist(zs, sub):
        return BodyFillable()
    neck = tree.outer_neck(body)
    if neck is None:
        raise DataInconsistencyError(
            "root piece does not bound although H1 of the complex is "
            "trivial; tree data inconsistent")
    solver, bd, edge_index, ncols, basis, gens = _augmented_solver(tree, body)
    zvec = {edge_index[s]: coeff for s, coeff in zs.coefficients.items()}
    sol = solver.solve(zvec)
    if sol is None:
        raise DataInconsistencyError(
            f"piece class in subtree of {body} is not generated by neck "
            f"{neck} classes")
    # z = d2 x + sum lambda g  =>  c'' = sum lambda g,  E fills z - c''
    c2 = Chain(tree.complex, 1)
    E = Chain(tree.complex, 2)
    for j, v in sol.items():
        if j < ncols:
            E.coefficients[bd.col_simplices[j]] = v
        else:
            g_full, _ = basis[j - ncols]
            for s, coeff in g_full.coefficients.items():
                new = c2.coefficients.get(s, 0) + v * coeff
                if new:
                    c2.coefficients[s] = new
                else:
                    c2.coefficients.pop(s, None)
    if boundary(E) != (c - c2):
        raise PipelineAssertionError("augmented solve lost chain exactness")
    thick, diam = neck_thickness_and_diameter(neck, tree)
    budget_log2 = h_constant_log2(tree.params.h1_max) + log2_value(diam)
    c2_mass = mass(c2)
    if not log_le(log2_value(c2_mass), budget_log2):
        raise PipelineAssertionError(
            f"neck representative mass {c2_mass} exceeds the "
            f"2 h1^h1 diam budget (log2 {budget_log2:.3f})")
    return NeckRepresentative(c2, neck, E, c2_mass, budget_log2)


# ---------------------------------------------------------------------------
# nerve fillings and triangle caches


def _nerve_fill(tree: BubbleTree, scope_body: Optional[str],
                cg: GraphChain) -> Tuple[Chain, dict]:
    """Fill a graph cycle through the scope's nerve, then realize each nerve
    triangle as an exactly-filled geodesic triangle in the complex."""
    nerve = tree.scope_nerve(scope_body)
    graph = tree.scope_graph(scope_body)
    z = graph_cycle_to_nerve(cg, nerve)
    n0 = len(nerve.covering.balls)
    maxc = z.max_abs_coeff()
    nr_log2 = nr_coefficient_bound(max(n0, 2), max(n0, 2), max(maxc, 1))
    if nr_log2 < 62:
        bound = nr_coefficient_bound_exact(max(n0, 2), max(n0, 2),
                                           max(maxc, 1))
        fres = bounded_filling(z, bound, nerve.complex)
        if fres is None:
            raise DataInconsistencyError(
                "graph cycle does not bound in the nerve")
    else:
        fres = reduced_filling(z, nerve.complex)
    F = fres.filling
    coeff_sum = sum(abs(v) for v in F.coefficients.values())
    if coeff_sum and not log_le(log2_value(float(coeff_sum)), nr_log2):
        raise PipelineAssertionError(
            "nerve filling exceeds the N^(4N^(N+1)) coefficient bound")
    info = {"nerve_coeff_sum": coeff_sum,
            "nerve_terms": len(F.coefficients),
            "nr_bound_log2": nr_log2,
            "simplicial_length": cg.simplicial_length()}
    total = Chain(tree.complex, 2)
    tri_account = 0.0
    scale_cap = None
    for triple, coeff in nerve_filling_to_triangles(F, graph):
        fill = _triangle_fill(tree, scope_body, triple)
        total = total + coeff * fill
        # accounting: chart cone when possible, else perimeter * chart radius
        perim = sum(graph.edge(a, b).length
                    for a, b in ((triple[0], triple[1]),
                                 (triple[1], triple[2]),
                                 (triple[0], triple[2])))
        if scope_body is not None:
            r_h = tree.regions[scope_body].r_h
            cap = 120.0 * tree.regions[scope_body].scale ** 2
        else:
            r_h = tree.params.diameter
            cap = 3.0 * tree.params.diameter ** 2
        bound = min(perim * r_h, cap)
        tri_account += abs(coeff) * bound
        scale_cap = cap
    check = boundary(total)
    want = cg.as_complex_chain(tree.complex)
    if check != want:
        raise PipelineAssertionError(
            "triangle fills do not assemble to the graph cycle")
    info["triangle_account"] = tri_account
    info["triangle_cap"] = scale_cap
    return total, info


def _triangle_fill(tree: BubbleTree, scope_body: Optional[str],
                   triple: Tuple[int, int, int]) -> Chain:
    key = ("trifill", scope_body, triple)
    if key in tree._cache:
        return tree._cache[key]
    graph = tree.scope_graph(scope_body)
    tb = triangle_boundary_chain(triple, graph, tree.complex)
    fill, _ = _solve_in_scope(tb, tree, scope_body)
    tree._cache[key] = fill
    return fill


# ---------------------------------------------------------------------------
# the two filling branches and the full pipeline


def fill_in_subtree(c: Chain, body: str, tree: BubbleTree
                    ) -> Tuple[Chain, dict]:
    """Fill a piece that bounds inside its subtree."""
    cg, E1, acct = push_to_graph(c, body, tree, scope="subtree")
    trace = {"body": body, "branch": "body-fill", "piece_mass": mass(c),
             "push": acct.to_json_dict()}
    if cg.is_empty():
        total = E1
        trace["nerve"] = None
    else:
        W, info = _nerve_fill(tree, body, cg)
        total = E1 + W
        trace["nerve"] = info
    if boundary(total) != c:
        raise PipelineAssertionError("subtree fill boundary mismatch")
    trace["fill_mass"] = mass(total)
    return total, trace


def fill_via_neck(c: Chain, body: str, tree: BubbleTree,
                  branch: NeckRepresentative) -> Tuple[Chain, dict]:
    """Fill a piece whose class survives into the outer neck."""
    trace = {"body": body, "branch": "neck-fill", "piece_mass": mass(c),
             "neck": branch.neck, "c2_mass": branch.c2_mass,
             "c2_budget_log2": branch.budget_log2}
    if branch.c2.is_empty():
        total, sub_trace = fill_in_subtree(c, body, tree)
        trace["degenerate"] = sub_trace
        return total, trace
    cg, E2, acct = push_to_graph(branch.c2, body, tree, scope="global")
    trace["push"] = acct.to_json_dict()
    if cg.is_empty():
        W = Chain(tree.complex, 2)
        trace["nerve"] = None
    else:
        W, info = _nerve_fill(tree, None, cg)
        trace["nerve"] = info
    total = branch.E + E2 + W
    if boundary(total) != c:
        raise PipelineAssertionError("neck-branch fill boundary mismatch")
    trace["fill_mass"] = mass(total)
    return total, trace


@dataclass
class FillingReport:
    filling: Chain
    mass: float
    input_mass: float
    f1_log2: float
    f2_log2: float
    F_log2: float
    bound_ok: bool
    branch_trace: List[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        d = {"feasible": True, "optimal": False, "mass": self.mass,
             "input_mass": self.input_mass,
             "max_abs_coeff": self.filling.max_abs_coeff(),
             "terms": [{"simplex": list(s), "coeff": cf}
                       for s, cf in self.filling.terms()],
             "f1_log2": self.f1_log2, "f2_log2": self.f2_log2,
             "F_log2": self.F_log2, "bound_ok": self.bound_ok,
             "branch_trace": self.branch_trace}
        return d


def full_fill(c: Chain, tree: BubbleTree,
              params: Optional[BoundParams] = None) -> FillingReport:
    """Decompose, classify, and fill a 1-cycle; verify the mass bound.

    The report's filling satisfies boundary(filling) == c exactly, and its
    mass is checked (in log space) against f1 * mass(c) + f2 evaluated on
    the instance parameters.
    """
    params = params or tree.params
    key = ("h1check",)
    if key not in tree._cache:
        tree._cache[key] = homology_rank_and_torsion(tree.complex, 1)
    rank, torsion = tree._cache[key]
    if rank != 0 or torsion:
        raise ValueError("filling function undefined: nontrivial H1")
    if not is_cycle(c):
        raise ValueError("full_fill needs a 1-cycle")
    trace: List[dict] = []
    total = Chain(tree.complex, 2)
    try:
        for body, piece in decompose_cycle(c, tree):
            branch = classify_fill_branch(piece, body, tree)
            if isinstance(branch, BodyFillable):
                fill, t = fill_in_subtree(piece, body, tree)
            else:
                fill, t = fill_via_neck(piece, body, tree, branch)
            trace.append(t)
            total = total + fill
    except PipelineError as exc:
        exc.trace = trace + exc.trace
        raise
    if boundary(total) != c:
        raise PipelineAssertionError("full fill boundary mismatch", trace)
    table = bound_calculator(params)
    in_mass = mass(c)
    out_mass = mass(total)
    rhs = log2_add(table.f1_log2 + log2_value(in_mass), table.f2_log2)
    ok = log_le(log2_value(out_mass), rhs)
    return FillingReport(total, out_mass, in_mass, table.f1_log2,
                         table.f2_log2, table.F_log2, ok, trace)
