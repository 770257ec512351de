"""Exact integer homology and filling solvers.

Boundary matrices are solved through verified Smith normal form
certificates.  Minimal-mass fillings run a branch-and-bound over the kernel
lattice with an LP-relaxation lower bound; a constraint-propagating
exhaustive search acts as the independent oracle on small instances.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .complexes import Chain, WeightedComplex, boundary, is_cycle, mass
from .snf import SnfCertificate, smith_normal_form

DEFAULT_NODE_BUDGET = 20000


class InfeasibleError(ValueError):
    """The requested cycle does not bound."""


class ResourceCapError(RuntimeError):
    """A solver ran out of its node budget without a usable answer."""


# ---------------------------------------------------------------------------
# boundary matrices and cached certificates


@dataclass
class BoundaryMatrix:
    """Integer matrix of the degree-k boundary map.

    Rows are indexed by sorted (k-1)-simplices, columns by k-simplices;
    entries lie in {-1, 0, 1}.
    """

    degree: int
    row_simplices: List[tuple]
    col_simplices: List[tuple]
    entries: Dict[Tuple[int, int], int]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.row_simplices), len(self.col_simplices)


def boundary_matrix(complex: WeightedComplex, k: int) -> BoundaryMatrix:
    if k < 1:
        raise ValueError("boundary matrix needs degree >= 1")
    rows = complex.simplices_of_dim(k - 1)
    cols = complex.simplices_of_dim(k)
    row_index = {s: i for i, s in enumerate(rows)}
    entries: Dict[Tuple[int, int], int] = {}
    for j, s in enumerate(cols):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            entries[(row_index[face], j)] = -1 if i % 2 else 1
    return BoundaryMatrix(k, rows, cols, entries)


def _cache(complex: WeightedComplex) -> dict:
    cache = getattr(complex, "_homology_cache", None)
    if cache is None:
        cache = {}
        complex._homology_cache = cache
    return cache


def _snf_of_degree(complex: WeightedComplex, k: int,
                   track: bool) -> Tuple[BoundaryMatrix, SnfCertificate]:
    """SNF of the degree-k boundary matrix, cached and (if tracked) verified."""
    cache = _cache(complex)
    key = ("snf_full" if track else "snf", k)
    if key not in cache:
        bd = cache.get(("bd", k))
        if bd is None:
            bd = boundary_matrix(complex, k)
            cache[("bd", k)] = bd
        m, n = bd.shape
        cert = smith_normal_form(bd.entries, m, n, track=track)
        if track and not cert.verify(bd.entries):
            raise AssertionError("SNF certificate failed verification")
        cache[key] = cert
    return cache[("bd", k)], cache[key]


def homology_rank_and_torsion(complex: WeightedComplex,
                              k: int) -> Tuple[int, List[int]]:
    """Betti number and torsion coefficients of H_k over the integers."""
    if k < 0 or k > complex.dim:
        raise ValueError(f"degree {k} out of range 0..{complex.dim}")
    n_k = len(complex.simplices_of_dim(k))
    if k == 0:
        rank_dk = 0
    else:
        _, cert = _snf_of_degree(complex, k, track=False)
        rank_dk = cert.rank
    if k + 1 > complex.dim or not complex.simplices_of_dim(k + 1):
        rank_up, torsion = 0, []
    else:
        _, cert_up = _snf_of_degree(complex, k + 1, track=False)
        rank_up = cert_up.rank
        torsion = [d for d in cert_up.diagonal if d > 1]
    return n_k - rank_dk - rank_up, torsion


# ---------------------------------------------------------------------------
# solving d2 x = z


@dataclass
class FillingResult:
    """A 2-chain filling (or its absence) together with solve metadata."""

    filling: Optional[Chain]
    mass: float
    max_abs_coeff: int
    optimal: bool
    feasible: bool = True
    nodes_used: int = 0

    def to_json_dict(self) -> dict:
        terms = []
        if self.filling is not None:
            terms = [{"simplex": list(s), "coeff": c}
                     for s, c in self.filling.terms()]
        return {"feasible": self.feasible, "optimal": self.optimal,
                "mass": self.mass, "max_abs_coeff": self.max_abs_coeff,
                "terms": terms}


class _FillContext:
    """Cached machinery for solving d2 x = z on one complex."""

    def __init__(self, complex: WeightedComplex):
        self.complex = complex
        self.bd, self.cert = _snf_of_degree(complex, 2, track=True)
        self.row_index = {s: i for i, s in enumerate(self.bd.row_simplices)}
        self.tris = self.bd.col_simplices
        self.weights = [complex.volumes[t] for t in self.tris]
        self.kernel = self.cert.kernel_basis()

    def cycle_vector(self, z: Chain) -> Dict[int, int]:
        vec = {}
        for s, c in z.coefficients.items():
            idx = self.row_index.get(s)
            if idx is None:
                raise ValueError(f"edge {s} not in complex")
            vec[idx] = c
        return vec

    def particular(self, z: Chain) -> Optional[Dict[int, int]]:
        """One integer solution of d2 x = z, or None when infeasible."""
        y = self.cert.apply_U(self.cycle_vector(z))
        w = {}
        for i, v in y.items():
            if i >= self.cert.rank:
                return None
            d = self.cert.diagonal[i]
            if v % d:
                return None
            w[i] = v // d
        return self.cert.apply_V_col(w)

    def chain_of(self, x: Dict[int, int]) -> Chain:
        c = Chain(self.complex, 2)
        for j, v in x.items():
            if v:
                c.coefficients[self.tris[j]] = v
        return c

    def mass_of(self, x: Dict[int, int]) -> float:
        return sum(abs(v) * self.weights[j] for j, v in x.items())


def fill_context(complex: WeightedComplex) -> _FillContext:
    cache = _cache(complex)
    if "fill_ctx" not in cache:
        cache["fill_ctx"] = _FillContext(complex)
    return cache["fill_ctx"]


def _require_cycle(z: Chain):
    if z.degree != 1:
        raise ValueError("filling queries take 1-cycles")
    if not is_cycle(z):
        raise ValueError("input chain is not a cycle")


def fills_exist(z: Chain, complex: Optional[WeightedComplex] = None) -> bool:
    """True iff the integer system d2 x = z is solvable."""
    _require_cycle(z)
    ctx = fill_context(complex or z.complex)
    return ctx.particular(z) is not None


# -- lattice reduction over the kernel --------------------------------------


def _sub_scaled(x: Dict[int, int], k: Dict[int, int], mu: int):
    for j, v in k.items():
        new = x.get(j, 0) - mu * v
        if new:
            x[j] = new
        else:
            x.pop(j, None)


def _best_step_l1(x: Dict[int, int], k: Dict[int, int],
                  weights: Sequence[float]) -> int:
    """Integer mu minimizing sum_i w_i |x_i - mu k_i| (weighted median)."""
    pts = []
    for j, kv in k.items():
        pts.append((x.get(j, 0) / kv, abs(kv) * weights[j]))
    if not pts:
        return 0
    pts.sort()
    total = sum(w for _, w in pts)
    acc = 0.0
    med = pts[-1][0]
    for r, w in pts:
        acc += w
        if acc * 2 >= total:
            med = r
            break
    candidates = {math.floor(med), math.ceil(med), 0}

    def cost(mu):
        return sum(abs(x.get(j, 0) - mu * kv) * weights[j]
                   for j, kv in k.items())

    return min(candidates, key=lambda mu: (cost(mu), abs(mu), mu))


def _reduce_l1(x: Dict[int, int], kernel: List[Dict[int, int]],
               weights: Sequence[float], max_passes: int = 40) -> Dict[int, int]:
    """Coordinate-descent mass reduction of x over the kernel lattice."""
    x = dict(x)
    for _ in range(max_passes):
        moved = False
        for k in kernel:
            mu = _best_step_l1(x, k, weights)
            if mu:
                _sub_scaled(x, k, mu)
                moved = True
        if not moved:
            break
    return x


# -- kernel-lattice minimality search ----------------------------------------


class _KernelSearch:
    """Minimize a mass objective over the solution coset x0 + kernel * t.

    objective "l1": weighted ell-1 mass.  objective "linf": max |x_i|,
    used for coefficient-bounded searches.  The integer search itself is
    delegated to HiGHS branch-and-bound (scipy.optimize.milp) with exact
    t-boxes from interval arithmetic on Vinv; the returned point is
    re-verified and re-assembled in exact integer arithmetic, so solver
    tolerances can never leak into the chain.
    """

    def __init__(self, ctx: _FillContext, x0: Dict[int, int],
                 objective: str = "l1", node_budget: int = DEFAULT_NODE_BUDGET):
        import numpy as np
        self.ctx = ctx
        self.x0 = dict(x0)
        self.objective = objective
        self.node_budget = node_budget
        self.nodes = 0
        self.kernel = ctx.kernel
        self.mk = len(self.kernel)
        self.n = len(ctx.tris)
        self.np = np

    def value(self, x: Dict[int, int]) -> float:
        if self.objective == "l1":
            return self.ctx.mass_of(x)
        return float(max((abs(v) for v in x.values()), default=0))

    def _boxes(self, ub: float) -> List[List[int]]:
        """Exact t-boxes containing every solution with objective <= ub."""
        if self.objective == "l1":
            caps = [int(math.floor(ub / w + 1e-9)) for w in self.ctx.weights]
        else:
            caps = [int(math.floor(ub + 1e-9))] * self.n
        cert = self.ctx.cert
        c0 = cert.kernel_coords(self.x0)
        boxes = []
        for jj in range(self.mk):
            row = cert.Vinv_rows.get(cert.rank + jj, {})
            span = sum(abs(v) * caps[i] for i, v in row.items() if i < self.n)
            c = c0.get(jj, 0)
            boxes.append([-span - c, span - c])
        return boxes

    def _assemble(self, t: Sequence[int]) -> Dict[int, int]:
        x = dict(self.x0)
        for jj, mu in enumerate(t):
            if mu:
                _sub_scaled(x, self.kernel[jj], -int(mu))
        return x

    def run(self, incumbent: Dict[int, int]) -> Tuple[Dict[int, int], bool]:
        """Returns (best solution found, optimality proof flag)."""
        np = self.np
        best = dict(incumbent)
        best_val = self.value(best)
        if self.mk == 0:
            return best, True
        from scipy.optimize import Bounds, LinearConstraint, milp
        from scipy.sparse import csr_matrix, hstack, identity

        K = np.zeros((self.n, self.mk))
        for c, k in enumerate(self.kernel):
            for j, v in k.items():
                K[j, c] = v
        x0_dense = np.zeros(self.n)
        for j, v in self.x0.items():
            x0_dense[j] = v
        Ks = csr_matrix(K)
        if self.objective == "l1":
            aux = self.n
            eye = identity(self.n, format="csr")
            A1 = hstack([Ks, -eye], format="csr")
            A2 = hstack([-Ks, -eye], format="csr")
            cost = np.concatenate([np.zeros(self.mk),
                                   np.asarray(self.ctx.weights)])
        else:
            aux = 1
            ones = csr_matrix(np.ones((self.n, 1)))
            A1 = hstack([Ks, -ones], format="csr")
            A2 = hstack([-Ks, -ones], format="csr")
            cost = np.concatenate([np.zeros(self.mk), [1.0]])
        cons = [LinearConstraint(A1, -np.inf, -x0_dense),
                LinearConstraint(A2, -np.inf, x0_dense)]
        boxes = self._boxes(best_val)
        lb = np.array([b[0] for b in boxes] + [0.0] * aux, dtype=float)
        ub = np.array([b[1] for b in boxes] + [np.inf] * aux, dtype=float)
        integrality = np.array([1] * self.mk + [0] * aux)
        res = milp(c=cost, constraints=cons, bounds=Bounds(lb, ub),
                   integrality=integrality,
                   options={"node_limit": self.node_budget,
                            "mip_rel_gap": 0.0})
        self.nodes = int(getattr(res, "mip_node_count", 0) or 0)
        proved = res.status == 0
        if res.x is not None:
            t = [int(round(v)) for v in res.x[:self.mk]]
            cand = self._assemble(t)
            cand_val = self.value(cand)
            if cand_val < best_val - 1e-12:
                best, best_val = cand, cand_val
        if self.objective == "l1":
            polished = _reduce_l1(best, self.kernel, self.ctx.weights,
                                  max_passes=8)
            if self.ctx.mass_of(polished) < best_val - 1e-12:
                best, best_val = polished, self.ctx.mass_of(polished)
        return best, proved


# ---------------------------------------------------------------------------
# public solver operations


def some_filling(z: Chain,
                 complex: Optional[WeightedComplex] = None) -> FillingResult:
    """One exact integer filling from the SNF certificate; not minimal."""
    _require_cycle(z)
    ctx = fill_context(complex or z.complex)
    if z.is_empty():
        return FillingResult(Chain(ctx.complex, 2), 0.0, 0, optimal=False)
    x = ctx.particular(z)
    if x is None:
        raise InfeasibleError("cycle does not bound")
    chain = ctx.chain_of(x)
    return FillingResult(chain, ctx.mass_of(x), chain.max_abs_coeff(),
                         optimal=False)


def reduced_filling(z: Chain,
                    complex: Optional[WeightedComplex] = None) -> FillingResult:
    """Particular solution pushed through kernel-lattice mass reduction."""
    _require_cycle(z)
    ctx = fill_context(complex or z.complex)
    if z.is_empty():
        return FillingResult(Chain(ctx.complex, 2), 0.0, 0, optimal=False)
    x = ctx.particular(z)
    if x is None:
        raise InfeasibleError("cycle does not bound")
    x = _reduce_l1(x, ctx.kernel, ctx.weights)
    chain = ctx.chain_of(x)
    return FillingResult(chain, ctx.mass_of(x), chain.max_abs_coeff(),
                         optimal=False)


def bounded_filling(z: Chain, coeff_bound: int,
                    complex: Optional[WeightedComplex] = None,
                    node_budget: int = DEFAULT_NODE_BUDGET
                    ) -> Optional[FillingResult]:
    """A filling with every |coefficient| <= coeff_bound, or None.

    Starts from the reduced particular solution; if that misses the bound,
    a branch-and-bound on the max-coefficient objective either finds a
    solution inside the bound or proves there is none.  None is also
    returned when the cycle does not bound at all.
    """
    _require_cycle(z)
    if coeff_bound < 0:
        raise ValueError("coefficient bound must be nonnegative")
    ctx = fill_context(complex or z.complex)
    if z.is_empty():
        return FillingResult(Chain(ctx.complex, 2), 0.0, 0, optimal=False)
    x = ctx.particular(z)
    if x is None:
        return None
    x = _reduce_l1(x, ctx.kernel, ctx.weights)
    maxc = max((abs(v) for v in x.values()), default=0)
    if maxc <= coeff_bound:
        chain = ctx.chain_of(x)
        return FillingResult(chain, ctx.mass_of(x), maxc, optimal=False)
    search = _KernelSearch(ctx, x, objective="linf", node_budget=node_budget)
    best, proved = search.run(x)
    maxc = max((abs(v) for v in best.values()), default=0)
    if maxc <= coeff_bound:
        chain = ctx.chain_of(best)
        return FillingResult(chain, ctx.mass_of(best), maxc, optimal=False,
                             nodes_used=search.nodes)
    if not proved:
        raise ResourceCapError(
            "node budget exhausted before the coefficient bound search "
            "could conclude")
    return None


def minimal_mass_filling(z: Chain,
                         complex: Optional[WeightedComplex] = None,
                         node_budget: int = DEFAULT_NODE_BUDGET
                         ) -> FillingResult:
    """Globally minimal-mass integer filling.

    Particular solution plus a branch-and-bound over the kernel lattice
    (relaxation-pruned, via HiGHS) inside exact coefficient boxes.
    Exhausting the node budget downgrades ``optimal`` to False and returns
    the best filling seen.  The result is deterministic; among equal-mass
    optima the solver's deterministic pick (after descent polishing) is
    returned.
    """
    _require_cycle(z)
    ctx = fill_context(complex or z.complex)
    if z.is_empty():
        return FillingResult(Chain(ctx.complex, 2), 0.0, 0, optimal=True)
    x = ctx.particular(z)
    if x is None:
        raise InfeasibleError("cycle does not bound")
    x = _reduce_l1(x, ctx.kernel, ctx.weights)
    search = _KernelSearch(ctx, x, objective="l1", node_budget=node_budget)
    best, proved = search.run(x)
    chain = ctx.chain_of(best)
    return FillingResult(chain, ctx.mass_of(best), chain.max_abs_coeff(),
                         optimal=proved, nodes_used=search.nodes)


def brute_force_filling(z: Chain, coeff_bound: int,
                        complex: Optional[WeightedComplex] = None
                        ) -> Optional[FillingResult]:
    """Exhaustive minimal-mass filling with |coefficients| <= coeff_bound.

    Independent oracle: depth-first enumeration over triangle coefficients
    with per-edge constraint propagation, no SNF involved.  Only instances
    with at most 16 two-simplices are accepted.
    """
    _require_cycle(z)
    cx = complex or z.complex
    tris = cx.simplices_of_dim(2)
    if len(tris) > 16:
        raise ValueError("instance too large for brute force (> 16 triangles)")
    if z.is_empty() and not tris:
        return FillingResult(Chain(cx, 2), 0.0, 0, optimal=True)
    edges = cx.simplices_of_dim(1)
    edge_index = {e: i for i, e in enumerate(edges)}
    target = [0] * len(edges)
    for s, c in z.coefficients.items():
        target[edge_index[s]] = c
    # edge -> list of (triangle position, sign)
    touching: List[List[Tuple[int, int]]] = [[] for _ in edges]
    for p, t in enumerate(tris):
        for i in range(3):
            face = t[:i] + t[i + 1:]
            touching[edge_index[face]].append((p, -1 if i % 2 else 1))
    remaining = [len(lst) for lst in touching]
    partial = [0] * len(edges)
    # edges touched by no triangle can never change
    for e, rem in enumerate(remaining):
        if rem == 0 and target[e] != 0:
            return None
    weights = [cx.volumes[t] for t in tris]
    values = list(range(-coeff_bound, coeff_bound + 1))

    best: List = [None, math.inf, None]  # vector, mass, key

    def feasible_edge(e: int) -> bool:
        gap = target[e] - partial[e]
        if remaining[e] == 0:
            return gap == 0
        return abs(gap) <= remaining[e] * coeff_bound

    coeffs = [0] * len(tris)

    def rec(p: int, acc_mass: float):
        if acc_mass > best[1] + 1e-15:
            return
        if p == len(tris):
            key = tuple(coeffs)
            if acc_mass < best[1] - 1e-15 or (
                    abs(acc_mass - best[1]) <= 1e-15
                    and (best[2] is None or key < best[2])):
                best[0] = list(coeffs)
                best[1] = acc_mass
                best[2] = key
            return
        t = tris[p]
        faces = [edge_index[t[:i] + t[i + 1:]] for i in range(3)]
        signs = [-1 if i % 2 else 1 for i in range(3)]
        for v in values:
            coeffs[p] = v
            ok = True
            for e, s in zip(faces, signs):
                partial[e] += s * v
                remaining[e] -= 1
                if not feasible_edge(e):
                    ok = False
            if ok:
                rec(p + 1, acc_mass + abs(v) * weights[p])
            for e, s in zip(faces, signs):
                partial[e] -= s * v
                remaining[e] += 1
        coeffs[p] = 0

    rec(0, 0.0)
    if best[0] is None:
        return None
    chain = Chain(cx, 2)
    for p, v in enumerate(best[0]):
        if v:
            chain.coefficients[tris[p]] = v
    return FillingResult(chain, best[1], chain.max_abs_coeff(), optimal=True)


def nr_coefficient_bound(n0: int, n: int, max_coeff: int = 1) -> float:
    """log2 of the coefficient-sum bound  n0^(4 n n0^n) * max_coeff.

    The raw value overflows fixed-width arithmetic, so only the log is
    returned; exact big-integer evaluation stays possible through
    ``nr_coefficient_bound_exact``.
    """
    if n0 < 1 or n < 1:
        raise ValueError("need n0 >= 1 and n >= 1")
    return 4.0 * n * (n0 ** n) * math.log2(n0) + math.log2(max_coeff)


def nr_coefficient_bound_exact(n0: int, n: int, max_coeff: int = 1) -> int:
    if n0 < 1 or n < 1:
        raise ValueError("need n0 >= 1 and n >= 1")
    return n0 ** (4 * n * n0 ** n) * max_coeff


class IntegerLinearSolver:
    """Reduced integer solutions of A x = z for a fixed sparse matrix A.

    Used for augmented systems like [d2 | generator columns]; solutions are
    pushed through the same kernel-lattice reduction as fillings so the
    returned coefficients stay small.
    """

    def __init__(self, entries: Dict[Tuple[int, int], int], m: int, n: int,
                 weights: Sequence[float]):
        self.m, self.n = m, n
        self.weights = list(weights)
        self.cert = smith_normal_form(entries, m, n, track=True)
        if not self.cert.verify(entries):
            raise AssertionError("SNF certificate failed verification")
        self.kernel = self.cert.kernel_basis()

    def solve(self, z: Dict[int, int]) -> Optional[Dict[int, int]]:
        y = self.cert.apply_U(z)
        w = {}
        for i, v in y.items():
            if i >= self.cert.rank:
                return None
            d = self.cert.diagonal[i]
            if v % d:
                return None
            w[i] = v // d
        x = self.cert.apply_V_col(w)
        return _reduce_l1(x, self.kernel, self.weights)


# ---------------------------------------------------------------------------
# random cycle sampling and the HF_1 estimator


def _loop_erased_cycle(walk: List[int]) -> Optional[List[int]]:
    """First simple cycle (>= 3 vertices) along a walk, or None."""
    stack: List[int] = []
    pos: Dict[int, int] = {}
    for v in walk:
        if v in pos:
            cyc = stack[pos[v]:]
            if len(cyc) >= 3:
                return cyc
            for u in stack[pos[v] + 1:]:
                pos.pop(u, None)
            del stack[pos[v] + 1:]
        else:
            pos[v] = len(stack)
            stack.append(v)
    return None


def random_simple_cycle(complex: WeightedComplex, rng: random.Random,
                        max_steps: int = 400) -> Optional[Chain]:
    """Loop-erased closed random walk on the weighted 1-skeleton."""
    adj: Dict[int, List[int]] = {}
    for (u, v) in complex.simplices_of_dim(1):
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if not adj:
        return None
    verts = sorted(adj)
    start = verts[rng.randrange(len(verts))]
    walk = [start]
    v = start
    for _ in range(max_steps):
        nbrs = sorted(adj[v])
        v = nbrs[rng.randrange(len(nbrs))]
        walk.append(v)
    cyc = _loop_erased_cycle(walk)
    if cyc is None:
        return None
    chain = Chain(complex, 1)
    for i, u in enumerate(cyc):
        chain.add_term((u, cyc[(i + 1) % len(cyc)]), 1)
    return chain if not chain.is_empty() else None


def hf1_estimate(complex: WeightedComplex, l: float, samples: int,
                 seed: int, node_budget: int = DEFAULT_NODE_BUDGET
                 ) -> List[Tuple[float, float]]:
    """Sampled lower estimate of the first homological filling function.

    Draws loop-erased random closed walks of 1-mass at most ``l`` and pairs
    each with its minimal filling mass.  The running maximum of the second
    coordinate estimates HF_1(l); sampling can only under-estimate the
    supremum.  Reproducible for a fixed seed.
    """
    if l <= 0:
        raise ValueError("length budget must be positive")
    rank, torsion = homology_rank_and_torsion(complex, 1)
    if rank != 0 or torsion:
        raise ValueError("filling function undefined: nontrivial H1")
    rng = random.Random(seed)
    pairs: List[Tuple[float, float]] = []
    attempts = 0
    while len(pairs) < samples and attempts < 60 * samples:
        attempts += 1
        z = random_simple_cycle(complex, rng)
        if z is None:
            continue
        m1 = mass(z)
        if m1 > l:
            continue
        fill = minimal_mass_filling(z, complex, node_budget=node_budget)
        pairs.append((m1, fill.mass))
    return pairs


# ---------------------------------------------------------------------------
# integer H1 coordinates and short generating cycles


class H1Structure:
    """Integer coordinates on H_1 = ker d1 / im d2 for one complex.

    Cycle classes are expressed against the Smith form of the inclusion
    im d2 -> ker d1: torsion coordinates are residues mod d_i, free
    coordinates are plain integers.
    """

    def __init__(self, complex: WeightedComplex):
        self.complex = complex
        _, self.cert1 = _snf_of_degree(complex, 1, track=True)
        bd2 = _cache(complex).get(("bd", 2))
        if bd2 is None:
            bd2 = boundary_matrix(complex, 2)
            _cache(complex)[("bd", 2)] = bd2
        self.bd2 = bd2
        k1 = self.cert1.ncols - self.cert1.rank  # cycle lattice rank
        self.k1 = k1
        by_col: Dict[int, Dict[int, int]] = {}
        for (i, j), v in bd2.entries.items():
            by_col.setdefault(j, {})[i] = v
        entries: Dict[Tuple[int, int], int] = {}
        for j in range(len(bd2.col_simplices)):
            coords = self.cert1.kernel_coords(by_col.get(j, {}))
            for i, v in coords.items():
                entries[(i, j)] = v
        self.certW = smith_normal_form(entries, k1,
                                       len(bd2.col_simplices), track=True)
        self.torsion_rows = [i for i in range(self.certW.rank)
                             if self.certW.diagonal[i] > 1]
        self.free_rows = list(range(self.certW.rank, k1))

    def invariants(self) -> Tuple[int, List[int]]:
        return len(self.free_rows), [self.certW.diagonal[i]
                                     for i in self.torsion_rows]

    def class_coords(self, z: Chain) -> Tuple[int, ...]:
        """H1 coordinates of a 1-cycle: torsion residues then free ints."""
        edge_index = {s: i for i, s in enumerate(self.bd2.row_simplices)}
        vec = {edge_index[s]: c for s, c in z.coefficients.items()}
        t = self.cert1.kernel_coords(vec)
        u = self.certW.apply_U(t)
        out = []
        for i in self.torsion_rows:
            out.append(u.get(i, 0) % self.certW.diagonal[i])
        for i in self.free_rows:
            out.append(u.get(i, 0))
        return tuple(out)

    def is_trivial(self, z: Chain) -> bool:
        return all(c == 0 for c in self.class_coords(z))


def _class_in_span(h1: H1Structure, target: Tuple[int, ...],
                   span: List[Tuple[int, ...]]) -> bool:
    """Membership of a class in the subgroup generated by ``span``."""
    moduli = [h1.certW.diagonal[i] for i in h1.torsion_rows]
    dims = len(target)
    entries: Dict[Tuple[int, int], int] = {}
    for j, g in enumerate(span):
        for i, v in enumerate(g):
            if v:
                entries[(i, j)] = v
    col = len(span)
    for i, d in enumerate(moduli):
        entries[(i, col)] = d
        col += 1
    cert = smith_normal_form(entries, dims, col, track=True)
    y = cert.apply_U({i: v for i, v in enumerate(target) if v})
    for i, v in y.items():
        if i >= cert.rank or v % cert.diagonal[i]:
            return False
    return True


def shortest_h1_basis(complex: WeightedComplex,
                      metric=None) -> List[Tuple[Chain, Tuple[int, ...]]]:
    """Greedy shortest generating set of H_1 from tree+edge candidate cycles.

    Candidates are the classic Horton cycles: a shortest-path tree around
    each root closed off by one edge, ordered by d(v,a) + w(a,b) + d(b,v).
    Chains are only materialized in that order, and a candidate is kept
    when its class lies outside the subgroup generated so far; the scan
    stops as soon as every unit class is generated.
    """
    from .covering import SkeletonMetric

    h1 = H1Structure(complex)
    free_rank, torsion = h1.invariants()
    if free_rank == 0 and not torsion:
        return []
    metric = metric or SkeletonMetric(complex)
    order = []
    for v in complex.vertices:
        dist = metric._tree(v)[0]
        for (a, b) in complex.simplices_of_dim(1):
            da, db = dist.get(a), dist.get(b)
            if da is None or db is None:
                continue
            w = da + complex.volumes[(a, b)] + db
            order.append((w, v, (a, b)))
    order.sort()

    dims = len(h1.torsion_rows) + len(h1.free_rows)
    units = [tuple(1 if i == j else 0 for i in range(dims))
             for j in range(dims)]
    basis: List[Tuple[Chain, Tuple[int, ...]]] = []
    span: List[Tuple[int, ...]] = []
    seen = set()
    for _, v, (a, b) in order:
        cyc = Chain(complex, 1)
        for (u, w2) in metric.path(v, a):
            cyc.add_term((u, w2), 1)
        cyc.add_term((a, b), 1)
        for (u, w2) in metric.path(v, b):
            cyc.add_term((u, w2), -1)
        if cyc.is_empty():
            continue
        key = tuple(cyc.terms())
        if key in seen:
            continue
        seen.add(key)
        cls = h1.class_coords(cyc)
        if all(c == 0 for c in cls) or _class_in_span(h1, cls, span):
            continue
        basis.append((cyc, cls))
        span.append(cls)
        if all(_class_in_span(h1, u, span) for u in units):
            break
    return basis
