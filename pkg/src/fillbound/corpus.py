"""Deterministic generators of test geometries.

Every instance carries its complex, bubble tree (with charts and a global
ball covering), bound parameters, and provenance.  Generators validate
their own output: closure, tree invariants, chart bounds, covering
coverage, and the homology ground truth they promise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .bounds import BoundParams, neck_distortion_constant
from .charts import HarmonicChart
from .complexes import Chain, WeightedComplex, induced_subcomplex, mass
from .covering import Covering, SkeletonMetric, build_covering
from .homology import H1Structure, homology_rank_and_torsion
from .tree import BubbleTree, Region, trivial_tree

EPSILON_DEFAULT = 1e-2


@dataclass
class CorpusInstance:
    name: str
    complex: WeightedComplex
    tree: BubbleTree
    params: BoundParams
    seed: int
    provenance: Dict
    metadata: Dict = field(default_factory=dict)


class CorpusError(RuntimeError):
    pass


def _metric_diameter(metric: SkeletonMetric, vertices: Sequence[int]) -> float:
    diam = 0.0
    for v in vertices:
        diam = max(diam, max(metric._tree(v)[0].values()))
    return diam


def _greedy_cover_centers(cx: WeightedComplex, vertices: Set[int]
                          ) -> List[int]:
    """1-hop dominating set inside ``vertices``, smallest ids first."""
    adj: Dict[int, Set[int]] = {v: set() for v in vertices}
    for (u, v) in cx.simplices_of_dim(1):
        if u in vertices and v in vertices:
            adj[u].add(v)
            adj[v].add(u)
    centers = []
    uncovered = set(vertices)
    while uncovered:
        c = min(uncovered)
        centers.append(c)
        uncovered -= adj[c] | {c}
    return centers


def _validate_instance(inst: CorpusInstance):
    inst.complex.validate()
    bad = [i for i in inst.tree.validate() if not i.ok]
    if bad:
        raise CorpusError(
            f"{inst.name}: tree validation failed: "
            + "; ".join(f"{i.name}: {i.detail}" for i in bad))


# ---------------------------------------------------------------------------
# flat and perturbed chart balls


def _grid_complex(resolution: int, h: float
                  ) -> Tuple[WeightedComplex, Dict[int, np.ndarray]]:
    n = resolution
    diag = h * math.sqrt(2.0)

    def vid(i, j):
        return i * (n + 1) + j

    coords = {}
    half = n / 2.0
    for i in range(n + 1):
        for j in range(n + 1):
            coords[vid(i, j)] = np.array(
                [(i - half) * h, (j - half) * h, 0.0, 0.0])
    simplices = []
    volumes = {}

    def add_edge(a, b, ln):
        e = (a, b) if a < b else (b, a)
        simplices.append(e)
        volumes[e] = ln

    for i in range(n + 1):
        for j in range(n + 1):
            if i < n:
                add_edge(vid(i, j), vid(i + 1, j), h)
            if j < n:
                add_edge(vid(i, j), vid(i, j + 1), h)
            if i < n and j < n:
                add_edge(vid(i, j), vid(i + 1, j + 1), diag)
                t1 = tuple(sorted((vid(i, j), vid(i + 1, j),
                                   vid(i + 1, j + 1))))
                t2 = tuple(sorted((vid(i, j), vid(i, j + 1),
                                   vid(i + 1, j + 1))))
                simplices.extend([t1, t2])
                volumes[t1] = h * h / 2.0
                volumes[t2] = h * h / 2.0
    return WeightedComplex(simplices, volumes), coords


def _ball_instance(name: str, resolution: int, r_h: float, amplitude: float,
                   seed: int) -> CorpusInstance:
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if resolution > 12:
        raise ValueError("resolution beyond 12 no longer fits the chart ball")
    h = r_h / 60.0          # ball radius r_h/20 = 3 h overlaps the mesh
    cx, coords = _grid_complex(resolution, h)
    n = resolution
    anchor = min(coords, key=lambda v: (float(np.linalg.norm(coords[v])), v))
    shift = coords[anchor].copy()
    coords = {v: p - shift for v, p in coords.items()}

    if amplitude == 0.0:
        samples = [(np.zeros(4), np.eye(4))]
    else:
        omega = 0.25 / r_h
        mdir = np.diag([1.0, -1.0, 1.0, -1.0])
        span = (n / 2.0 + 1.0) * h
        step = r_h / 64.0
        k = int(math.ceil(2 * span / step)) + 1
        samples = []
        for a in range(k):
            for b in range(k):
                x = np.array([-span + a * step, -span + b * step, 0.0, 0.0])
                g = np.eye(4) + amplitude * math.sin(omega * x[0]) \
                    * math.cos(omega * x[1]) * mdir
                samples.append((x, g))
    chart = HarmonicChart(anchor, r_h, coords, samples)

    centers = []
    for i in range(0, n + 1, 2):
        for j in range(0, n + 1, 2):
            centers.append(i * (n + 1) + j)
    radius = 3.0 * h
    body = "B-1-1"
    cov = build_covering(cx, centers, [radius] * len(centers),
                         regions=[body] * len(centers),
                         region_vertices={body: set(cx.vertices)})
    metric = cov.metric
    diam = _metric_diameter(metric, cx.vertices)
    params = BoundParams(
        n_balls=len(centers), diameter=diam * 1.001,
        neck_distortion=neck_distortion_constant(EPSILON_DEFAULT),
        depth=1, width=1, h1_max=1, epsilon=EPSILON_DEFAULT)
    tree = trivial_tree(cx, body, r_h, chart, cov, params)
    inst = CorpusInstance(
        name=name, complex=cx, tree=tree, params=params, seed=seed,
        provenance={"generator": name.split(":")[0],
                    "resolution": resolution, "r_h": r_h,
                    "amplitude": amplitude, "seed": seed},
        metadata={"grid_step": h, "anchor": anchor})
    rank, torsion = homology_rank_and_torsion(cx, 1)
    if rank != 0 or torsion:
        raise CorpusError("flat ball has nontrivial H1")
    _validate_instance(inst)
    return inst


def gen_flat_ball(resolution: int, r_h: float, seed: int = 0
                  ) -> CorpusInstance:
    """Triangulated flat grid patch with the exact Euclidean chart."""
    return _ball_instance(f"flat_ball:r{resolution}", resolution, r_h,
                          0.0, seed)


def gen_perturbed_ball(resolution: int, r_h: float,
                       amplitude: float = 5e-4, seed: int = 0
                       ) -> CorpusInstance:
    """Grid patch with a low-frequency metric perturbation of the chart.

    The sampled field keeps C0 deviation = amplitude and radius-scaled
    derivative well inside the validation budget, so amplitude 5e-4
    validates with slack while 2e-3 fails.
    """
    return _ball_instance(f"perturbed_ball:r{resolution}", resolution, r_h,
                          amplitude, seed)


# ---------------------------------------------------------------------------
# simplex shells


def gen_simplex_shell(scale: float = 1.0, seed: int = 0) -> CorpusInstance:
    """Boundary of a regular tetrahedron: the smallest 2-sphere complex."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    s = float(scale)
    base = np.array([[1, 1, 1, 0], [1, -1, -1, 0],
                     [-1, 1, -1, 0], [-1, -1, 1, 0]], dtype=float)
    base *= s / (2.0 * math.sqrt(2.0))
    coords = {v: base[v] - base[0] for v in range(4)}
    area = math.sqrt(3.0) / 4.0 * s * s
    simplices = []
    volumes = {}
    for t in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        simplices.append(t)
        volumes[t] = area
    for e in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        volumes[e] = s
    cx = WeightedComplex(simplices, volumes)
    r_h = 24.0 * s
    chart = HarmonicChart(0, r_h, coords, [(np.zeros(4), np.eye(4))])
    body = "B-1-1"
    cov = build_covering(cx, [0, 1, 2, 3], [1.2 * s] * 4,
                         regions=[body] * 4,
                         region_vertices={body: set(cx.vertices)})
    params = BoundParams(
        n_balls=4, diameter=s * 1.001,
        neck_distortion=neck_distortion_constant(EPSILON_DEFAULT),
        depth=1, width=1, h1_max=1, epsilon=EPSILON_DEFAULT)
    tree = trivial_tree(cx, body, r_h, chart, cov, params)
    inst = CorpusInstance(
        name=f"simplex_shell:s{scale}", complex=cx, tree=tree, params=params,
        seed=seed, provenance={"generator": "simplex_shell", "scale": scale,
                               "seed": seed})
    _validate_instance(inst)
    return inst


def gen_circle(n: int = 6, edge_len: float = 1.0, seed: int = 0
               ) -> CorpusInstance:
    """Plain n-gon circle: H1 = Z, nothing bounds.  Negative-test corpus."""
    if n < 3:
        raise ValueError("need at least 3 edges")
    rho = edge_len / (2.0 * math.sin(math.pi / n))
    coords = {}
    for k in range(n):
        a = 2.0 * math.pi * k / n
        coords[k] = np.array([rho * math.cos(a), rho * math.sin(a), 0.0, 0.0])
    shift = coords[0].copy()
    coords = {v: p - shift for v, p in coords.items()}
    simplices = []
    volumes = {}
    for k in range(n):
        e = tuple(sorted((k, (k + 1) % n)))
        simplices.append(e)
        volumes[e] = edge_len
    cx = WeightedComplex(simplices, volumes)
    r_h = max(24.0 * edge_len, 2.5 * rho)
    chart = HarmonicChart(0, r_h, coords, [(np.zeros(4), np.eye(4))])
    body = "B-1-1"
    cov = build_covering(cx, list(range(n)), [1.2 * edge_len] * n,
                         regions=[body] * n,
                         region_vertices={body: set(cx.vertices)})
    metric = cov.metric
    params = BoundParams(
        n_balls=n, diameter=_metric_diameter(metric, cx.vertices) * 1.001,
        neck_distortion=neck_distortion_constant(EPSILON_DEFAULT),
        depth=1, width=1, h1_max=1, epsilon=EPSILON_DEFAULT)
    tree = trivial_tree(cx, body, r_h, chart, cov, params)
    gen_cycle = [(k, (k + 1) % n) for k in range(n)]
    inst = CorpusInstance(
        name=f"circle:n{n}", complex=cx, tree=tree, params=params, seed=seed,
        provenance={"generator": "circle", "n": n, "edge_len": edge_len,
                    "seed": seed},
        metadata={"generator_cycle": gen_cycle})
    rank, torsion = homology_rank_and_torsion(cx, 1)
    if (rank, torsion) != (1, []):
        raise CorpusError("circle homology sanity failed")
    _validate_instance(inst)
    return inst


# ---------------------------------------------------------------------------
# lens complexes by quotient of the join of two polygons


def _join_two_skeleton(m: int) -> Tuple[List[tuple], Dict[int, np.ndarray]]:
    """2-skeleton of the join of two m-gons, with S^3 coordinates.

    Vertices 0..m-1 are the first circle, m..2m-1 the second.
    """
    coords = {}
    for k in range(m):
        a = 2.0 * math.pi * k / m
        coords[k] = np.array([math.cos(a), math.sin(a), 0.0, 0.0])
        coords[m + k] = np.array([0.0, 0.0, math.cos(a), math.sin(a)])
    simplices = []
    for i in range(m):
        i2 = (i + 1) % m
        simplices.append((i, i2))
        simplices.append((m + i, m + i2))
        for j in range(m):
            j2 = (j + 1) % m
            simplices.append((i, m + j))
            simplices.append(tuple(sorted((i, i2, m + j))))
            simplices.append(tuple(sorted((i, m + j, m + j2))))
    return simplices, coords


def _barycentric_subdivide(simplices: List[tuple],
                           coords: Dict[int, np.ndarray]
                           ) -> Tuple[List[tuple], Dict[tuple, int],
                                      Dict[int, np.ndarray]]:
    """One barycentric subdivision of a 2-complex on the unit 3-sphere.

    New vertices are the simplices of the input (barycenters normalized
    back onto the sphere); simplices of the subdivision are the flags.
    """
    closed: Set[tuple] = set()
    for s in simplices:
        s = tuple(sorted(s))
        closed.add(s)
        if len(s) >= 2:
            for i in range(len(s)):
                closed.add(s[:i] + s[i + 1:])
        if len(s) == 3:
            for v in s:
                closed.add((v,))
    order = sorted(closed, key=lambda s: (len(s), s))
    vert_id = {s: i for i, s in enumerate(order)}
    new_coords = {}
    for s, i in vert_id.items():
        pt = np.mean([coords[v] for v in s], axis=0)
        new_coords[i] = pt / np.linalg.norm(pt)

    def proper_faces(s: tuple) -> List[tuple]:
        if len(s) == 2:
            return [(s[0],), (s[1],)]
        return [(s[0],), (s[1],), (s[2],),
                (s[0], s[1]), (s[0], s[2]), (s[1], s[2])]

    new_simplices: List[tuple] = [(vert_id[s],) for s in order
                                  if len(s) == 1]
    for s in closed:
        for f in proper_faces(s) if len(s) >= 2 else []:
            new_simplices.append(tuple(sorted((vert_id[f], vert_id[s]))))
    for s in closed:
        if len(s) == 3:
            for v in s:
                for f in ((s[0], s[1]), (s[0], s[2]), (s[1], s[2])):
                    if v in f:
                        new_simplices.append(tuple(sorted(
                            (vert_id[(v,)], vert_id[f], vert_id[s]))))
    return new_simplices, vert_id, new_coords


def _lens_quotient(p: int, q: int) -> Tuple[WeightedComplex,
                                            Dict[int, int], List[int],
                                            Dict[int, np.ndarray]]:
    """Quotient of the subdivided join by the free Z_p rotation action.

    Returns (quotient complex with spherical metric at unit scale,
    vertex orbit map, a generator loop as a vertex cycle, representative
    coordinates per orbit).
    """
    if p < 2 or math.gcd(p, q % p if q % p else p) != 1:
        raise ValueError("need p >= 2 and gcd(p, q) = 1")
    # two fundamental domains per circle keep the quotient simplicial
    # after a single barycentric subdivision
    c = 2
    m = c * p
    simplices, coords = _join_two_skeleton(m)
    sub, vert_id, sub_coords = _barycentric_subdivide(simplices, coords)

    # the rotation by c steps on each circle (second twisted by q)
    def rot_orig(v: int) -> int:
        if v < m:
            return (v + c) % m
        return m + ((v - m + q * c) % m)

    rot_sub = {}
    for s, i in vert_id.items():
        rot_sub[i] = vert_id[tuple(sorted(rot_orig(v) for v in s))]

    def orbit(v: int) -> List[int]:
        out = [v]
        while True:
            v = rot_sub[v]
            if v == out[0]:
                return out
            out.append(v)

    orbit_id: Dict[int, int] = {}
    for v in sorted(rot_sub):
        if v in orbit_id:
            continue
        o = orbit(v)
        if len(o) != p:
            raise CorpusError("group action is not free on subdivision "
                              "vertices")
        rep = min(o)
        for u in o:
            orbit_id[u] = rep

    quotient: Dict[int, tuple] = {}
    per_dim_count = {0: 0, 1: 0, 2: 0}
    volumes = {}
    rep_coords = {}
    for s in sub:
        img = tuple(sorted(orbit_id[v] for v in s))
        if len(set(img)) != len(img):
            raise CorpusError("quotient simplex degenerates; need a finer "
                              "subdivision")
        if img in quotient:
            continue
        quotient[img] = s
        per_dim_count[len(img) - 1] += 1
    for img, s in quotient.items():
        pts = [sub_coords[v] for v in s]
        if len(img) == 2:
            volumes[img] = float(np.linalg.norm(pts[0] - pts[1]))
        elif len(img) == 3:
            a = np.linalg.norm(pts[0] - pts[1])
            b = np.linalg.norm(pts[1] - pts[2])
            cc = np.linalg.norm(pts[0] - pts[2])
            sp = (a + b + cc) / 2.0
            val = max(sp * (sp - a) * (sp - b) * (sp - cc), 0.0)
            area = math.sqrt(val)
            if area <= 1e-12:
                raise CorpusError("degenerate quotient triangle")
            volumes[img] = area
        if len(img) == 1:
            rep_coords[img[0]] = sub_coords[s[0]]
    counts = {}
    for s in sub:
        counts[len(s) - 1] = counts.get(len(s) - 1, 0) + 1
    for d, cnt in counts.items():
        if per_dim_count[d] * p != cnt:
            raise CorpusError("quotient identified distinct orbits; need a "
                              "finer subdivision")
    cx = WeightedComplex(list(quotient), volumes)

    # generator loop: the image of the first circle through edge barycenters
    loop = []
    for k in range(c):
        v = orbit_id[vert_id[(k,)]]
        e = orbit_id[vert_id[tuple(sorted((k, (k + 1) % m)))]]
        loop.extend([v, e])
    rank, torsion = homology_rank_and_torsion(cx, 1)
    if (rank, torsion) != (0, [p]):
        raise CorpusError(
            f"lens quotient homology is ({rank}, {torsion}), wanted (0, [{p}])")
    loop_chain = Chain.from_terms(
        cx, 1, [((loop[i], loop[(i + 1) % len(loop)]), 1)
                for i in range(len(loop))])
    cls = H1Structure(cx).class_coords(loop_chain)
    if len(cls) != 1 or math.gcd(cls[0], p) != 1:
        raise CorpusError("circle image does not generate H1 of the quotient")
    return cx, orbit_id, loop, rep_coords


def _lens_tube(p: int, q: int, layers: int, scale: float
               ) -> Tuple[WeightedComplex, List[Set[int]], List[int], float]:
    """L(p,q) x [0,1] as levels of the lens complex joined by edge tubes.

    Returns (complex, per-level vertex sets, generator loop on the deep
    level, level spacing).  The product metric uses the lens scale
    horizontally; the total height equals the lens graph diameter so the
    neck inequality has margin.  Only level 0 carries the lens 2-cells
    (the tube retracts onto it, so H1 is unchanged and the complex stays
    2-skeleton sufficient at desk size).
    """
    lens, _, loop, _ = _lens_quotient(p, q)
    lens_metric = SkeletonMetric(lens)
    lens_diam = _metric_diameter(lens_metric, lens.vertices) * scale
    spacing = lens_diam / layers
    base = sorted(lens.vertices)
    nvert = max(base) + 1

    def lid(v: int, level: int) -> int:
        return level * nvert + v

    simplices = []
    volumes = {}
    for level in range(layers + 1):
        for e in lens.simplices_of_dim(1):
            ee = (lid(e[0], level), lid(e[1], level))
            simplices.append(ee)
            volumes[tuple(sorted(ee))] = lens.volumes[e] * scale
        if level == 0:
            for t in lens.simplices_of_dim(2):
                tt = tuple(sorted(lid(v, level) for v in t))
                simplices.append(tt)
                volumes[tt] = lens.volumes[t] * scale * scale
    for level in range(layers):
        for v in base:
            e = (lid(v, level), lid(v, level + 1))
            simplices.append(e)
            volumes[tuple(sorted(e))] = spacing
        for (a, b) in lens.simplices_of_dim(1):
            e_len = lens.volumes[(a, b)] * scale
            d = (lid(a, level), lid(b, level + 1))
            simplices.append(d)
            volumes[tuple(sorted(d))] = math.hypot(e_len, spacing)
            t1 = tuple(sorted((lid(a, level), lid(b, level),
                               lid(b, level + 1))))
            t2 = tuple(sorted((lid(a, level), lid(a, level + 1),
                               lid(b, level + 1))))
            simplices.extend([t1, t2])
            volumes[t1] = e_len * spacing / 2.0
            volumes[t2] = e_len * spacing / 2.0
    cx = WeightedComplex(simplices, volumes)
    levels = [{lid(v, level) for v in base} for level in range(layers + 1)]
    deep_loop = [lid(v, layers) for v in loop]
    return cx, levels, deep_loop, spacing


def gen_lens_neck(p: int, q: int = 1, layers: int = 1, scale: float = 1.0,
                  seed: int = 0) -> CorpusInstance:
    """Standalone lens-space neck L(p,q) x I with stub boundary bodies.

    H1 = Z_p; the shortest generator loop and its length are recorded.
    The whole product carries the neck region, the two boundary levels
    double as the stub parent/child bodies.
    """
    if layers < 1:
        raise ValueError("need at least one layer")
    cx, levels, deep_loop, spacing = _lens_tube(p, q, layers, scale)
    rank, torsion = homology_rank_and_torsion(cx, 1)
    if (rank, torsion) != (0, [p]):
        raise CorpusError(f"lens neck H1 = ({rank}, {torsion})")
    all_verts = set(cx.vertices)
    s1 = levels[0]
    s2 = levels[-1]
    max_edge = max(cx.volumes[e] for e in cx.simplices_of_dim(1))
    radius_child = 2.2 * max_edge
    radius_parent = 2.4 * max_edge
    r_h_child = 20.0 * radius_child
    r_h_parent = 20.0 * radius_parent
    parent, child, neck = "B-1-1", "B-2-1", "N-2-1"
    regions = [
        Region(parent, "body", set(s1), r_h=r_h_parent),
        Region(child, "body", set(s2), r_h=r_h_child),
        Region(neck, "neck", all_verts, group_order=p, s1=set(s1),
               s2=set(s2)),
    ]
    parent_centers = _greedy_cover_centers(cx, s1)
    child_centers = _greedy_cover_centers(cx, all_verts)
    centers = parent_centers + child_centers
    radii = [radius_parent] * len(parent_centers) \
        + [radius_child] * len(child_centers)
    tags = [parent] * len(parent_centers) + [child] * len(child_centers)
    cov = build_covering(cx, centers, radii, regions=tags,
                         region_vertices={parent: set(s1),
                                          child: all_verts})
    metric = cov.metric
    diam = _metric_diameter(metric, cx.vertices)
    params = BoundParams(
        n_balls=len(centers), diameter=diam * 1.001,
        neck_distortion=neck_distortion_constant(EPSILON_DEFAULT),
        depth=2, width=1, h1_max=p, epsilon=EPSILON_DEFAULT)
    anchor_p = min(s1)
    anchor_c = min(s2)
    charts = {
        parent: HarmonicChart(anchor_p, r_h_parent, {anchor_p: np.zeros(4)},
                              [(np.zeros(4), np.eye(4))]),
        child: HarmonicChart(anchor_c, r_h_child, {anchor_c: np.zeros(4)},
                             [(np.zeros(4), np.eye(4))]),
    }
    tree = BubbleTree(cx, regions, [(parent, child)],
                      [(neck, parent), (neck, child)], charts, cov, params)
    gen_edges = [(deep_loop[i], deep_loop[(i + 1) % len(deep_loop)])
                 for i in range(len(deep_loop))]
    gen_chain = Chain.from_terms(cx, 1, [(e, 1) for e in gen_edges])
    inst = CorpusInstance(
        name=f"lens_neck:p{p}q{q}l{layers}", complex=cx, tree=tree,
        params=params, seed=seed,
        provenance={"generator": "lens_neck", "p": p, "q": q,
                    "layers": layers, "scale": scale, "seed": seed},
        metadata={"generator_cycle": gen_edges,
                  "generator_length": mass(gen_chain),
                  "spacing": spacing})
    _validate_instance(inst)
    return inst


# ---------------------------------------------------------------------------
# two-scale bubble and the thin-neck variant


def _two_scale(p: int, scale_ratio: float, shrink: float, seed: int,
               name: str) -> CorpusInstance:
    if scale_ratio < 4:
        raise ValueError("scale ratio must be at least 4")
    if not 0 < shrink <= 1:
        raise ValueError("shrink must lie in (0, 1]")
    layers = 1
    child_scale = 1.0
    tube, levels, deep_loop, spacing = _lens_tube(p, 1, layers, child_scale)
    tube_verts = sorted(tube.vertices)
    s2 = levels[-1]
    # the parent attaches along the level-0 image of the generator loop
    nloop = len(deep_loop)
    nvert_lens = (max(tube_verts) + 1) // (layers + 1)
    base_loop0 = [v - layers * nvert_lens for v in deep_loop]
    s1 = set(base_loop0)
    max_edge_tube = max(tube.volumes[e] for e in tube.simplices_of_dim(1))

    # parent grid at the large scale
    radius_child = 2.2 * max_edge_tube
    radius_parent = scale_ratio * radius_child
    h_p = radius_parent / 3.0
    grid_n = 4
    grid, grid_coords = _grid_complex(grid_n, h_p)
    offset = max(tube_verts) + 1

    simplices: List[tuple] = []
    volumes: Dict[tuple, float] = {}
    for k in range(tube.dim + 1):
        for s in tube.simplices_of_dim(k):
            simplices.append(s)
            if k >= 1:
                volumes[s] = tube.volumes[s]
    gmap = {v: v + offset for v in grid.vertices}
    for k in range(grid.dim + 1):
        for s in grid.simplices_of_dim(k):
            ss = tuple(sorted(gmap[v] for v in s))
            simplices.append(ss)
            if k >= 1:
                volumes[ss] = grid.volumes[s]
    apex = gmap[0]

    # cone from the apex over the level-0 generator loop: the disk that
    # kills the lens class at parent cost.  Equal spokes keep the triangle
    # inequality for any loop edge length.
    spoke = 1.8 * h_p
    for v in sorted(s1):
        e = tuple(sorted((apex, v)))
        simplices.append(e)
        volumes[e] = spoke
    for i in range(nloop):
        a, b = base_loop0[i], base_loop0[(i + 1) % nloop]
        t = tuple(sorted((apex, a, b)))
        simplices.append(t)
        e_len = tube.volumes[tuple(sorted((a, b)))]
        val = spoke * spoke - (e_len / 2.0) ** 2
        volumes[t] = e_len / 2.0 * math.sqrt(max(val, 0.0))

    # shrinkable collar: a parallel copy of the deep generator loop joined
    # by an isoceles prism whose triangle volumes never depend on shrink
    base_loop = deep_loop
    collar0 = offset + len(grid.vertices)
    collar = [collar0 + i for i in range(nloop)]
    base_edge = {}
    for i in range(nloop):
        a, b = base_loop[i], base_loop[(i + 1) % nloop]
        base_edge[i] = tube.volumes[tuple(sorted((a, b)))]
    rung = max(base_edge.values())
    v0 = max(base_edge.values()) * rung / 2.0
    for i in range(nloop):
        g_i, g_j = base_loop[i], base_loop[(i + 1) % nloop]
        c_i, c_j = collar[i], collar[(i + 1) % nloop]
        e = tuple(sorted((c_i, c_j)))
        simplices.append(e)
        volumes[e] = base_edge[i] * shrink
        r1 = tuple(sorted((c_i, g_i)))
        simplices.append(r1)
        volumes[r1] = rung
        d = tuple(sorted((c_i, g_j)))
        simplices.append(d)
        volumes[d] = rung
        t1 = tuple(sorted((c_i, c_j, g_j)))
        t2 = tuple(sorted((c_i, g_i, g_j)))
        simplices.extend([t1, t2])
        volumes[t1] = v0
        volumes[t2] = v0

    cx = WeightedComplex(simplices, volumes)
    rank, torsion = homology_rank_and_torsion(cx, 1)
    if rank != 0 or torsion:
        raise CorpusError(f"two-scale H1 = ({rank}, {torsion}), wanted trivial")

    parent, child, neck = "B-1-1", "B-2-1", "N-2-1"
    parent_verts = {gmap[v] for v in grid.vertices} | set(s1)
    child_verts = set(s2) | set(collar)
    neck_verts = set(tube_verts)
    regions = [
        Region(parent, "body", parent_verts, r_h=20.0 * radius_parent),
        Region(child, "body", child_verts, r_h=20.0 * radius_child),
        Region(neck, "neck", neck_verts, group_order=p, s1=set(s1),
               s2=set(s2)),
    ]

    grid_centers = [gmap[i * (grid_n + 1) + j]
                    for i in range(0, grid_n + 1, 2)
                    for j in range(0, grid_n + 1, 2)]
    if apex not in grid_centers:
        grid_centers.append(apex)
    child_cover_zone = neck_verts | child_verts
    child_centers = _greedy_cover_centers(cx, child_cover_zone)
    centers = grid_centers + child_centers
    radii = [radius_parent] * len(grid_centers) \
        + [radius_child] * len(child_centers)
    tags = [parent] * len(grid_centers) + [child] * len(child_centers)
    cov = build_covering(cx, centers, radii, regions=tags,
                         region_vertices={parent: parent_verts,
                                          child: child_cover_zone})
    metric = cov.metric
    diam = _metric_diameter(metric, cx.vertices)
    params = BoundParams(
        n_balls=len(centers), diameter=diam * 1.001,
        neck_distortion=neck_distortion_constant(EPSILON_DEFAULT),
        depth=2, width=1, h1_max=p, epsilon=EPSILON_DEFAULT)
    anchor_c = min(child_verts)
    grid_chart_coords = {gmap[v]: grid_coords[v] - grid_coords[0]
                         for v in grid.vertices}
    charts = {
        parent: HarmonicChart(apex, 20.0 * radius_parent, grid_chart_coords,
                              [(np.zeros(4), np.eye(4))]),
        child: HarmonicChart(anchor_c, 20.0 * radius_child,
                             {anchor_c: np.zeros(4)},
                             [(np.zeros(4), np.eye(4))]),
    }
    tree = BubbleTree(cx, regions, [(parent, child)],
                      [(neck, parent), (neck, child)], charts, cov, params)
    collar_edges = [(collar[i], collar[(i + 1) % nloop])
                    for i in range(nloop)]
    collar_chain = Chain.from_terms(cx, 1, [(e, 1) for e in collar_edges])
    gen_edges = [(base_loop[i], base_loop[(i + 1) % nloop])
                 for i in range(nloop)]
    inst = CorpusInstance(
        name=name, complex=cx, tree=tree, params=params, seed=seed,
        provenance={"generator": name.split(":")[0], "p": p,
                    "scale_ratio": scale_ratio, "shrink": shrink,
                    "seed": seed},
        metadata={"generator_cycle": gen_edges,
                  "collar_cycle": collar_edges,
                  "collar_length": mass(collar_chain),
                  "collar_triangle_volume": v0,
                  "parent_scale": radius_parent,
                  "child_scale": radius_child})
    _validate_instance(inst)
    return inst


def gen_two_scale_bubble(scale_ratio: float = 8.0, p: int = 3,
                         seed: int = 0) -> CorpusInstance:
    """Large chart-ball body glued through a lens neck to a small body.

    The neck carries H1 = Z_p; the deep generator loop (with its shrinkable
    collar at shrink = 1) survives until the cone cap in the parent kills
    it, so minimal fillings of the tiny loop cost parent-scale area.
    """
    return _two_scale(p, scale_ratio, 1.0, seed,
                      f"two_scale:p{p}r{scale_ratio:g}")


def gen_eh_thin_neck(shrink: float, scale_ratio: float = 8.0, p: int = 2,
                     seed: int = 0) -> CorpusInstance:
    """Thin-neck phenomenon: collar loop edge lengths scaled by ``shrink``.

    Identical to the two-scale bubble at shrink = 1.  The collar's incident
    triangle volumes do not depend on shrink, so the minimal filling mass
    of the collar loop is shrink-independent while its 1-mass scales.
    """
    return _two_scale(p, scale_ratio, shrink, seed,
                      f"eh_thin_neck:s{shrink:g}")


# ---------------------------------------------------------------------------
# the standard corpus


GENERATORS = {
    "flat_ball": gen_flat_ball,
    "perturbed_ball": gen_perturbed_ball,
    "simplex_shell": gen_simplex_shell,
    "circle": gen_circle,
    "lens_neck": gen_lens_neck,
    "two_scale": gen_two_scale_bubble,
    "eh_thin_neck": gen_eh_thin_neck,
}

ACCEPTANCE_SUITE: List[Tuple[str, dict]] = [
    ("flat_ball", {"resolution": 2, "r_h": 1.0}),
    ("flat_ball", {"resolution": 4, "r_h": 1.0}),
    ("flat_ball", {"resolution": 6, "r_h": 2.0}),
    ("perturbed_ball", {"resolution": 4, "r_h": 1.0, "amplitude": 5e-4}),
    ("perturbed_ball", {"resolution": 4, "r_h": 2.0, "amplitude": 2.5e-4}),
    ("perturbed_ball", {"resolution": 6, "r_h": 1.0, "amplitude": 5e-4}),
    ("simplex_shell", {"scale": 1.0}),
    ("simplex_shell", {"scale": 0.5}),
    ("simplex_shell", {"scale": 2.0}),
    ("circle", {"n": 6, "edge_len": 1.0}),
    ("circle", {"n": 8, "edge_len": 0.5}),
    ("circle", {"n": 12, "edge_len": 2.0}),
    ("lens_neck", {"p": 2, "layers": 2}),
    ("lens_neck", {"p": 3, "layers": 1}),
    ("lens_neck", {"p": 5, "layers": 1}),
    ("two_scale", {"p": 2, "scale_ratio": 8.0}),
    ("two_scale", {"p": 3, "scale_ratio": 8.0}),
    ("two_scale", {"p": 3, "scale_ratio": 16.0}),
    ("eh_thin_neck", {"shrink": 1.0}),
    ("eh_thin_neck", {"shrink": 0.1}),
    ("eh_thin_neck", {"shrink": 0.01}),
]


def build_instance(generator: str, seed: int = 0, **kwargs) -> CorpusInstance:
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}; "
                         f"choose from {sorted(GENERATORS)}")
    return GENERATORS[generator](seed=seed, **kwargs)
