"""Bubble tree data model: body and neck regions, their incidences, and
the cached per-subtree machinery (subcomplexes, coverings, graphs, nerves)
used by the filling pipeline.

Bodies overlap their incident necks only in the labeled boundary spheres:
S1 joins a neck to the parent body, S2 to the child body, and the neck
interior belongs to no body.  The subtree territory of a body includes its
outer neck, matching how fillings are allowed to spill into it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .bounds import BoundParams
from .charts import HarmonicChart, validate_chart
from .complexes import WeightedComplex, induced_subcomplex
from .covering import Covering, GeodesicGraph, Nerve, SkeletonMetric, build_nerve


class TreeValidationError(ValueError):
    pass


@dataclass
class Region:
    id: str
    kind: str                      # "body" or "neck"
    vertices: Set[int]
    r_h: float = 0.0               # bodies only
    chart_ref: str = ""            # bodies only
    covering_ref: str = ""         # bodies only
    group_order: int = 0           # necks only
    s1: Set[int] = field(default_factory=set)
    s2: Set[int] = field(default_factory=set)

    @property
    def scale(self) -> float:
        return self.r_h / 20.0


@dataclass
class ValidationItem:
    name: str
    ok: bool
    detail: str = ""


class BubbleTree:
    """Resolved bubble tree: regions plus charts, the global covering, and
    the bound parameters of the instance."""

    def __init__(self, complex: WeightedComplex, regions: Sequence[Region],
                 edges: Sequence[Tuple[str, str]],
                 incidence: Sequence[Tuple[str, str]],
                 charts: Dict[str, HarmonicChart],
                 covering: Covering, params: BoundParams):
        self.complex = complex
        self.regions = {r.id: r for r in regions}
        self.edges = [tuple(e) for e in edges]
        self.incidence = [tuple(i) for i in incidence]
        self.charts = charts
        self.covering = covering
        self.params = params
        self.metric = covering.metric

        self.bodies = [r.id for r in regions if r.kind == "body"]
        self.necks = [r.id for r in regions if r.kind == "neck"]
        self.parent: Dict[str, Optional[str]] = {b: None for b in self.bodies}
        self.children: Dict[str, List[str]] = {b: [] for b in self.bodies}
        for p, c in self.edges:
            self.parent[c] = p
            self.children[p].append(c)
        for b in self.children:
            self.children[b].sort()
        roots = [b for b in self.bodies if self.parent[b] is None]
        if len(roots) != 1:
            raise TreeValidationError(f"expected one root body, got {roots}")
        self.root = roots[0]
        # neck <-> (parent body, child body)
        self.neck_bodies: Dict[str, List[str]] = {}
        for n, b in self.incidence:
            self.neck_bodies.setdefault(n, []).append(b)
        self._outer_neck: Dict[str, Optional[str]] = {b: None
                                                      for b in self.bodies}
        for n, bs in self.neck_bodies.items():
            if len(bs) != 2:
                raise TreeValidationError(
                    f"neck {n} must touch exactly two bodies, got {bs}")
            a, b = bs
            if (a, b) in self.edges:
                child = b
            elif (b, a) in self.edges:
                child = a
            else:
                raise TreeValidationError(
                    f"neck {n} joins {a}, {b} but no tree edge does")
            self._outer_neck[child] = n
        self._cache: Dict = {}

    # -- structure queries ------------------------------------------------

    def region(self, rid: str) -> Region:
        return self.regions[rid]

    def outer_neck(self, body: str) -> Optional[str]:
        return self._outer_neck[body]

    def child_neck(self, parent: str, child: str) -> str:
        neck = self._outer_neck[child]
        if neck is None:
            raise TreeValidationError(f"body {child} has no outer neck")
        return neck

    def depth(self, body: str) -> int:
        d = 1
        while self.parent[body] is not None:
            body = self.parent[body]
            d += 1
        return d

    def subtree_bodies(self, body: str) -> List[str]:
        out = [body]
        for c in self.children[body]:
            out.extend(self.subtree_bodies(c))
        return out

    def territory(self, body: str) -> Set[int]:
        """Vertex set of the subtree: bodies, inner necks, and the outer neck."""
        key = ("territory", body)
        if key not in self._cache:
            verts = set(self.regions[body].vertices)
            neck = self.outer_neck(body)
            if neck is not None:
                verts |= self.regions[neck].vertices
            for c in self.children[body]:
                verts |= self.territory(c)
            self._cache[key] = verts
        return self._cache[key]

    # -- cached derived objects -------------------------------------------

    def subtree_complex(self, body: str) -> WeightedComplex:
        key = ("subcomplex", body)
        if key not in self._cache:
            if body == self.root:
                self._cache[key] = self.complex
            else:
                self._cache[key] = induced_subcomplex(
                    self.complex, self.territory(body))
        return self._cache[key]

    def neck_complex(self, neck: str) -> WeightedComplex:
        key = ("neckcomplex", neck)
        if key not in self._cache:
            self._cache[key] = induced_subcomplex(
                self.complex, self.regions[neck].vertices)
        return self._cache[key]

    def scope_covering(self, body: Optional[str]) -> Covering:
        """Covering of the subtree below ``body`` (None for the whole complex)."""
        key = ("cov", body)
        if key not in self._cache:
            if body is None or body == self.root:
                self._cache[key] = self.covering
            else:
                tags = set(self.subtree_bodies(body))
                ids = [b.index for b in self.covering.balls
                       if b.region in tags]
                self._cache[key] = self.covering.restricted(ids)
        return self._cache[key]

    def scope_graph(self, body: Optional[str]) -> GeodesicGraph:
        key = ("graph", body)
        if key not in self._cache:
            self._cache[key] = GeodesicGraph(self.scope_covering(body))
        return self._cache[key]

    def scope_nerve(self, body: Optional[str]) -> Nerve:
        key = ("nerve", body)
        if key not in self._cache:
            self._cache[key] = build_nerve(self.scope_covering(body))
        return self._cache[key]

    def body_of_vertex(self, v: int) -> Optional[str]:
        """Deepest body whose region contains v, None for neck interiors."""
        best, best_depth = None, -1
        for b in self.bodies:
            if v in self.regions[b].vertices:
                d = self.depth(b)
                if d > best_depth or (d == best_depth and b < str(best)):
                    best, best_depth = b, d
        return best

    # -- validation ---------------------------------------------------------

    def validate(self) -> List[ValidationItem]:
        items: List[ValidationItem] = []
        allv = set(self.complex.vertices)
        covered = set()
        for r in self.regions.values():
            covered |= r.vertices
        items.append(ValidationItem(
            "region-cover", covered >= allv,
            f"uncovered={sorted(allv - covered)[:8]}" if covered < allv else ""))

        ok = True
        detail = ""
        for n in self.necks:
            r = self.regions[n]
            touching = {b for b in self.bodies
                        if r.vertices & self.regions[b].vertices}
            declared = set(self.neck_bodies.get(n, ()))
            if touching != declared:
                ok, detail = False, f"neck {n}: meets {sorted(touching)}, " \
                                    f"declared {sorted(declared)}"
                break
            if not r.s1 or not r.s2 or (r.s1 & r.s2):
                ok, detail = False, f"neck {n}: bad S1/S2 labels"
                break
            parent, child = self._neck_parent_child(n)
            if not (r.s1 <= r.vertices & self.regions[parent].vertices):
                ok, detail = False, f"neck {n}: S1 not in parent overlap"
                break
            if not (r.s2 <= r.vertices & self.regions[child].vertices):
                ok, detail = False, f"neck {n}: S2 not in child overlap"
                break
        items.append(ValidationItem("neck-incidence", ok, detail))

        ok = True
        detail = ""
        for p, c in self.edges:
            if not self.regions[c].scale < self.regions[p].scale:
                ok = False
                detail = f"child {c} scale !< parent {p} scale"
                break
        items.append(ValidationItem("scale-monotone", ok, detail))

        maxd = max(self.depth(b) for b in self.bodies)
        items.append(ValidationItem(
            "depth-bound", maxd <= self.params.depth,
            f"depth {maxd} > {self.params.depth}" if maxd > self.params.depth
            else ""))
        maxw = max((len(c) for c in self.children.values()), default=0)
        items.append(ValidationItem(
            "width-bound", maxw <= self.params.width,
            f"width {maxw} > {self.params.width}" if maxw > self.params.width
            else ""))
        bad = [n for n in self.necks
               if self.regions[n].group_order > self.params.h1_max]
        items.append(ValidationItem(
            "neck-order-bound", not bad,
            f"necks over h1 budget: {bad}" if bad else ""))

        ok = True
        detail = ""
        for b in self.bodies:
            for i, c1 in enumerate(self.children[b]):
                for c2 in self.children[b][i + 1:]:
                    if self.territory(c1) & self.territory(c2):
                        ok = False
                        detail = f"sibling territories {c1}, {c2} overlap"
        items.append(ValidationItem("sibling-disjoint", ok, detail))

        ok = True
        detail = ""
        for b in self.bodies:
            body_set = self.regions[b].vertices
            for c in self.children[b]:
                neck = self.regions[self.child_neck(b, c)]
                terr = self.territory(c)
                for (u, v) in self.complex.simplices_of_dim(1):
                    for x, y in ((u, v), (v, u)):
                        if x in terr and x not in body_set \
                                and y in body_set and y not in neck.vertices:
                            ok = False
                            detail = (f"edge {(u, v)} crosses into {c} "
                                      f"outside neck S1")
                if not ok:
                    break
            if not ok:
                break
        items.append(ValidationItem("neck-separation", ok, detail))

        for b in self.bodies:
            ch = self.charts.get(b)
            if ch is None:
                items.append(ValidationItem(f"chart:{b}", False, "missing"))
                continue
            res = validate_chart(ch)
            items.append(ValidationItem(f"chart:{b}", res.valid, res.message))

        for b in self.bodies:
            want = set(self.regions[b].vertices)
            neck = self.outer_neck(b)
            if neck is not None:
                want |= self.regions[neck].vertices
            got: Set[int] = set()
            for ball in self.covering.balls:
                if ball.region == b:
                    got |= ball.members
            missing = want - got
            items.append(ValidationItem(
                f"covering:{b}", not missing,
                f"uncovered={sorted(missing)[:8]}" if missing else ""))

        n_balls = len(self.covering.balls)
        items.append(ValidationItem(
            "param-n-balls", n_balls == self.params.n_balls,
            f"covering has {n_balls}, params say {self.params.n_balls}"))
        return items

    def _neck_parent_child(self, neck: str) -> Tuple[str, str]:
        a, b = self.neck_bodies[neck]
        return (a, b) if (a, b) in self.edges else (b, a)


def trivial_tree(complex: WeightedComplex, body_id: str, r_h: float,
                 chart: HarmonicChart, covering: Covering,
                 params: BoundParams) -> BubbleTree:
    """Single-body tree for instances without necks."""
    region = Region(body_id, "body", set(complex.vertices), r_h=r_h)
    return BubbleTree(complex, [region], [], [], {body_id: chart},
                      covering, params)
