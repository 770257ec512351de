"""Metric structure on the 1-skeleton, ball coverings, nerves, and the
geodesic graph of ball centers.

Balls are combinatorial: the member set of a ball is every vertex at
skeleton distance strictly less than the radius from the center.  Two balls
intersect iff they share a member vertex, and every derived object (nerve
simplices, graph edges) is witnessed by such shared vertices.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .complexes import Chain, WeightedComplex


class CoverageError(ValueError):
    """A covering misses part of its tagged region."""

    def __init__(self, region: str, uncovered: Sequence[int]):
        self.region = region
        self.uncovered = sorted(uncovered)
        super().__init__(
            f"covering of region {region!r} misses vertices {self.uncovered}")


class SkeletonMetric:
    """Shortest-path distances on the weighted 1-skeleton.

    Dijkstra trees are computed per source on demand and cached; ties are
    broken toward the lexicographically smaller predecessor so paths are
    reproducible.
    """

    def __init__(self, complex: WeightedComplex):
        self.complex = complex
        self.adj: Dict[int, List[Tuple[int, float]]] = {}
        for (u, v) in complex.simplices_of_dim(1):
            w = complex.volumes[(u, v)]
            self.adj.setdefault(u, []).append((v, w))
            self.adj.setdefault(v, []).append((u, w))
        for v in complex.vertices:
            self.adj.setdefault(v, [])
        for v in self.adj:
            self.adj[v].sort()
        self._trees: Dict[int, Tuple[Dict[int, float], Dict[int, int]]] = {}

    def _tree(self, source: int):
        if source not in self._trees:
            dist: Dict[int, float] = {source: 0.0}
            pred: Dict[int, int] = {source: source}
            heap = [(0.0, source, source)]
            done: Set[int] = set()
            while heap:
                d, u, p = heapq.heappop(heap)
                if u in done:
                    continue
                # equal-distance entries pop smallest predecessor first,
                # which makes the tree lexicographically canonical
                done.add(u)
                pred[u] = p
                dist[u] = d
                for v, w in self.adj.get(u, ()):
                    if v in done:
                        continue
                    nd = d + w
                    old = dist.get(v)
                    if old is None or nd < old:
                        dist[v] = nd
                        heapq.heappush(heap, (nd, v, u))
                    elif nd == old:
                        heapq.heappush(heap, (nd, v, u))
            self._trees[source] = (dist, pred)
        return self._trees[source]

    def dist(self, u: int, v: int) -> float:
        d = self._tree(u)[0].get(v)
        return float("inf") if d is None else d

    def path(self, u: int, v: int) -> Optional[List[Tuple[int, int]]]:
        """Directed edge list of a shortest u -> v path, None if disconnected."""
        dist, pred = self._tree(u)
        if v not in dist:
            return None
        edges = []
        cur = v
        while cur != u:
            p = pred[cur]
            edges.append((p, cur))
            cur = p
        edges.reverse()
        return edges

    def path_vertices(self, u: int, v: int) -> Optional[List[int]]:
        edges = self.path(u, v)
        if edges is None:
            return None
        return [u] + [e[1] for e in edges]

    def eccentricity(self, sources: Sequence[int]) -> float:
        return max(max(self._tree(s)[0].values()) for s in sources)


def shortest_path(complex: WeightedComplex, u: int, v: int,
                  metric: Optional[SkeletonMetric] = None
                  ) -> Tuple[List[Tuple[int, int]], float]:
    """Length-minimal path under edge_length weights.

    Returns (edge list, length); raises for disconnected pairs.
    """
    metric = metric or SkeletonMetric(complex)
    edges = metric.path(u, v)
    if edges is None:
        raise ValueError(f"vertices {u} and {v} are disconnected")
    return edges, metric.dist(u, v)


@dataclass
class Ball:
    index: int
    center: int
    radius: float
    region: str
    members: Set[int] = field(default_factory=set)


class Covering:
    """A system of metric balls with per-ball region tags."""

    def __init__(self, complex: WeightedComplex, balls: List[Ball],
                 metric: Optional[SkeletonMetric] = None):
        self.complex = complex
        self.balls = balls
        self.by_index = {b.index: b for b in balls}
        self.metric = metric or SkeletonMetric(complex)
        self._containing: Dict[int, List[int]] = {}
        for b in balls:
            for v in b.members:
                self._containing.setdefault(v, []).append(b.index)
        for v in self._containing:
            self._containing[v].sort()

    def __len__(self):
        return len(self.balls)

    def balls_containing(self, v: int) -> List[int]:
        return self._containing.get(v, [])

    def assign_ball(self, v: int) -> int:
        """Deterministic ball assignment: nearest center, then lowest index."""
        ids = self.balls_containing(v)
        if not ids:
            raise ValueError(f"vertex {v} is covered by no ball")
        return min(ids, key=lambda i:
                   (self.metric.dist(self.by_index[i].center, v), i))

    def intersecting_pairs(self) -> List[Tuple[int, int]]:
        pairs = set()
        for ids in self._containing.values():
            for a, b in combinations(ids, 2):
                pairs.add((a, b))
        return sorted(pairs)

    def restricted(self, ball_ids: Sequence[int]) -> "Covering":
        """Sub-covering on a subset of balls (ball indices are preserved)."""
        keep = set(ball_ids)
        return Covering(self.complex,
                        [b for b in self.balls if b.index in keep],
                        metric=self.metric)


def build_covering(complex: WeightedComplex, centers: Sequence[int],
                   radii: Sequence[float],
                   regions: Optional[Sequence[str]] = None,
                   region_vertices: Optional[Dict[str, Set[int]]] = None,
                   metric: Optional[SkeletonMetric] = None) -> Covering:
    """Covering from centers and radii; member sets from the skeleton metric.

    When ``region_vertices`` is given, every tagged region must be fully
    covered by the union of its balls' member sets, otherwise a
    CoverageError listing the uncovered vertices is raised.
    """
    if len(centers) != len(radii):
        raise ValueError("centers and radii must have equal length")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    regions = list(regions) if regions else [""] * len(centers)
    metric = metric or SkeletonMetric(complex)
    balls = []
    for i, (c, r) in enumerate(zip(centers, radii)):
        dist = metric._tree(c)[0]
        members = {v for v, d in dist.items() if d < r}
        balls.append(Ball(i, c, float(r), regions[i], members))
    cov = Covering(complex, balls, metric=metric)
    if region_vertices:
        for tag, verts in region_vertices.items():
            covered: Set[int] = set()
            for b in balls:
                if b.region == tag:
                    covered |= b.members
            missing = set(verts) - covered
            if missing:
                raise CoverageError(tag, missing)
    return cov


@dataclass
class Nerve:
    """Nerve of a covering: one vertex per ball, a simplex per set of balls
    with a common member vertex, truncated above ``max_dim``."""

    complex: WeightedComplex
    covering: Covering
    max_dim: int


def build_nerve(cov: Covering, max_dim: int = 4) -> Nerve:
    cap = min(max_dim, max(len(cov.balls) - 1, 0))
    simplices: Set[tuple] = {(b.index,) for b in cov.balls}
    for ids in cov._containing.values():
        top = min(len(ids), cap + 1)
        for k in range(2, top + 1):
            for combo in combinations(ids, k):
                simplices.add(combo)
    nerve_complex = WeightedComplex(list(simplices))
    return Nerve(nerve_complex, cov, cap)


def natural_map(v: int, cov: Covering) -> Tuple[int, ...]:
    """Nerve simplex spanned by exactly the balls containing v."""
    ids = cov.balls_containing(v)
    if not ids:
        raise ValueError(f"vertex {v} is covered by no ball")
    return tuple(ids)


@dataclass
class GraphEdge:
    pair: Tuple[int, int]            # ball indices, i < j
    length: float
    vertex_path: List[Tuple[int, int]]  # directed complex edges center_i -> center_j


class GeodesicGraph:
    """Graph on ball centers; one shortest-path edge per intersecting pair."""

    def __init__(self, cov: Covering):
        self.covering = cov
        self.edges: Dict[Tuple[int, int], GraphEdge] = {}
        metric = cov.metric
        balls = {b.index: b for b in cov.balls}
        for (i, j) in cov.intersecting_pairs():
            ci, cj = balls[i].center, balls[j].center
            path = metric.path(ci, cj)
            if path is None:
                raise ValueError(
                    f"balls {i}, {j} intersect but their centers are "
                    f"disconnected")
            self.edges[(i, j)] = GraphEdge((i, j), metric.dist(ci, cj), path)

    @property
    def n_vertices(self) -> int:
        return len(self.covering.balls)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def edge(self, i: int, j: int) -> GraphEdge:
        return self.edges[(min(i, j), max(i, j))]


class GraphChain:
    """Integer 1-chain on a geodesic graph.

    Multiplicities are signed on canonical (i < j) edges; the positive
    direction runs i -> j.  The simplicial length counts segments with
    multiplicity.
    """

    def __init__(self, graph: GeodesicGraph,
                 mult: Optional[Dict[Tuple[int, int], int]] = None):
        self.graph = graph
        self.mult: Dict[Tuple[int, int], int] = dict(mult or {})

    def add(self, i: int, j: int, count: int = 1):
        """Add ``count`` copies of the directed segment i -> j."""
        if i == j or count == 0:
            return
        key = (min(i, j), max(i, j))
        if key not in self.graph.edges:
            raise ValueError(f"no geodesic edge for ball pair {key}")
        signed = count if i < j else -count
        new = self.mult.get(key, 0) + signed
        if new:
            self.mult[key] = new
        else:
            self.mult.pop(key, None)

    def simplicial_length(self) -> int:
        return sum(abs(m) for m in self.mult.values())

    def mass(self) -> float:
        return sum(abs(m) * self.graph.edges[k].length
                   for k, m in self.mult.items())

    def is_empty(self) -> bool:
        return not self.mult

    def is_closed(self) -> bool:
        deg: Dict[int, int] = {}
        for (i, j), m in self.mult.items():
            deg[i] = deg.get(i, 0) - m
            deg[j] = deg.get(j, 0) + m
        return all(v == 0 for v in deg.values())

    def __add__(self, other: "GraphChain") -> "GraphChain":
        out = GraphChain(self.graph, dict(self.mult))
        for k, m in other.mult.items():
            new = out.mult.get(k, 0) + m
            if new:
                out.mult[k] = new
            else:
                out.mult.pop(k, None)
        return out

    def as_complex_chain(self, complex: WeightedComplex) -> Chain:
        """Image in the complex: each graph edge maps to its vertex path."""
        chain = Chain(complex, 1)
        for (i, j), m in self.mult.items():
            for (u, v) in self.graph.edges[(i, j)].vertex_path:
                chain.add_term((u, v), m)
        return chain


def graph_cycle_to_nerve(c: GraphChain, nerve: Nerve) -> Chain:
    """Transfer a closed graph chain to a simplicial 1-cycle in the nerve.

    Each geodesic edge E_ij maps to the nerve 1-simplex {i, j}; simplicial
    length and cycle-ness are preserved.
    """
    if not c.is_closed():
        raise ValueError("graph chain is not closed")
    out = Chain(nerve.complex, 1)
    for (i, j), m in c.mult.items():
        if not nerve.complex.has_simplex((i, j)):
            raise AssertionError(
                f"nerve lacks edge {(i, j)} present in the geodesic graph")
        out.add_term((i, j), m)
    return out


def nerve_filling_to_triangles(F: Chain, graph: GeodesicGraph
                               ) -> List[Tuple[Tuple[int, int, int], int]]:
    """Expand a nerve 2-chain into geodesic triangles with multiplicity."""
    if F.degree != 2:
        raise ValueError("expected a nerve 2-chain")
    out = []
    for (i, j, k), coeff in F.terms():
        for a, b in ((i, j), (j, k), (i, k)):
            if not graph.has_edge(a, b):
                raise AssertionError(
                    f"no geodesic edge {(a, b)} for nerve simplex {(i, j, k)}")
        out.append(((i, j, k), coeff))
    return out


def triangle_boundary_chain(triple: Tuple[int, int, int],
                            graph: GeodesicGraph,
                            complex: WeightedComplex) -> Chain:
    """Complex 1-chain of the geodesic triangle matching the nerve boundary
    orientation: path(j,k) - path(i,k) + path(i,j) for i < j < k."""
    i, j, k = triple
    c = GraphChain(graph)
    c.add(j, k, 1)
    c.add(i, k, -1)
    c.add(i, j, 1)
    return c.as_complex_chain(complex)
