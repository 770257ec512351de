"""Weighted simplicial complexes, oriented simplices, and integer chains.

A complex stores simplices as sorted vertex tuples together with a positive
volume per simplex of dimension >= 1.  Edge lengths and 1-simplex volumes are
the same data.  Chains are sparse integer combinations of oriented simplices;
the orientation of a stored simplex is always the sorted one, user-facing
orientations are carried as signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

VertexTuple = Tuple[int, ...]


class ComplexValidationError(ValueError):
    """A complex or chain violates a structural invariant."""


def canonical_simplex(vertices: Sequence[int]) -> Tuple[VertexTuple, int]:
    """Sort vertex ids and return (sorted tuple, orientation sign).

    Rejects degenerate simplices (repeated vertices): they break the sign
    algebra of the boundary formula.
    """
    verts = tuple(vertices)
    if len(set(verts)) != len(verts):
        raise ComplexValidationError(f"degenerate simplex {verts}")
    order = sorted(range(len(verts)), key=lambda i: verts[i])
    # parity of the sorting permutation
    seen = [False] * len(order)
    sign = 1
    for start in range(len(order)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return tuple(sorted(verts)), sign


def simplex_key(vertices: Sequence[int]) -> str:
    """JSON key of a simplex: sorted vertex ids joined by '-'."""
    return "-".join(str(v) for v in sorted(vertices))


class WeightedComplex:
    """Finite simplicial complex with per-simplex volumes.

    `simplices[k]` is the set of sorted vertex tuples of dimension k.
    `volumes` maps each simplex of dimension >= 1 to a positive volume;
    for 1-simplices the volume is the edge length.
    """

    def __init__(self, simplices: Iterable[Sequence[int]],
                 volumes: Dict[VertexTuple, float] | None = None,
                 check: bool = True):
        self.simplices: Dict[int, set] = {}
        for s in simplices:
            canon, _ = canonical_simplex(s)
            self.simplices.setdefault(len(canon) - 1, set()).add(canon)
        if self.simplices:
            self.dim = max(self.simplices)
        else:
            self.dim = 0
        for k in range(self.dim + 1):
            self.simplices.setdefault(k, set())
        self._close()
        self.volumes: Dict[VertexTuple, float] = {}
        if volumes:
            for s, v in volumes.items():
                canon, _ = canonical_simplex(s)
                self.volumes[canon] = float(v)
        # default unit volumes keep abstract complexes usable
        for k in range(1, self.dim + 1):
            for s in self.simplices[k]:
                self.volumes.setdefault(s, 1.0)
        if check:
            self.validate()

    def _close(self):
        for k in range(self.dim, 0, -1):
            for s in list(self.simplices.get(k, ())):
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    self.simplices.setdefault(k - 1, set()).add(face)

    # -- queries ---------------------------------------------------------

    @property
    def vertices(self) -> List[int]:
        return sorted(v[0] for v in self.simplices.get(0, ()))

    def simplices_of_dim(self, k: int) -> List[VertexTuple]:
        return sorted(self.simplices.get(k, ()))

    def has_simplex(self, vertices: Sequence[int]) -> bool:
        canon, _ = canonical_simplex(vertices)
        return canon in self.simplices.get(len(canon) - 1, ())

    def volume(self, vertices: Sequence[int]) -> float:
        canon, _ = canonical_simplex(vertices)
        if len(canon) == 1:
            return 0.0
        return self.volumes[canon]

    def edge_length(self, u: int, v: int) -> float:
        return self.volumes[(u, v) if u < v else (v, u)]

    def edges_at(self, v: int) -> List[VertexTuple]:
        return [e for e in self.simplices.get(1, ()) if v in e]

    def validate(self):
        """Check closure, positivity, and the triangle inequality."""
        for k in range(1, self.dim + 1):
            for s in self.simplices.get(k, ()):
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    if face not in self.simplices.get(k - 1, ()):
                        raise ComplexValidationError(
                            f"closure violated: face {face} of {s} missing")
                vol = self.volumes.get(s)
                if vol is None or vol <= 0.0:
                    raise ComplexValidationError(
                        f"nonpositive volume on {s}: {vol}")
        for t in self.simplices.get(2, ()):
            a = self.edge_length(t[0], t[1])
            b = self.edge_length(t[1], t[2])
            c = self.edge_length(t[0], t[2])
            if a > b + c + 1e-12 or b > a + c + 1e-12 or c > a + b + 1e-12:
                raise ComplexValidationError(
                    f"triangle inequality fails on {t}: {a}, {b}, {c}")

    def __contains__(self, vertices) -> bool:
        return self.has_simplex(vertices)

    def __repr__(self):
        counts = ", ".join(f"{k}:{len(self.simplices[k])}"
                           for k in sorted(self.simplices))
        return f"WeightedComplex(dim={self.dim}, counts={{{counts}}})"


@dataclass
class Chain:
    """Sparse integer chain of fixed degree on a complex.

    Coefficients are keyed by sorted vertex tuples; no zero coefficients are
    stored.  Addition and scaling are plain sparse-map merges.
    """

    complex: WeightedComplex
    degree: int
    coefficients: Dict[VertexTuple, int] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, complex: WeightedComplex, degree: int,
                   terms: Iterable[Tuple[Sequence[int], int]]) -> "Chain":
        c = cls(complex, degree)
        for verts, coeff in terms:
            c.add_term(verts, coeff)
        return c

    def add_term(self, vertices: Sequence[int], coeff: int):
        canon, sign = canonical_simplex(vertices)
        if len(canon) - 1 != self.degree:
            raise ComplexValidationError(
                f"simplex {vertices} has dimension {len(canon)-1}, "
                f"chain degree is {self.degree}")
        if canon not in self.complex.simplices.get(self.degree, ()):
            raise ComplexValidationError(f"simplex {canon} not in complex")
        if coeff == 0:
            return
        new = self.coefficients.get(canon, 0) + sign * coeff
        if new == 0:
            self.coefficients.pop(canon, None)
        else:
            self.coefficients[canon] = new

    def copy(self) -> "Chain":
        return Chain(self.complex, self.degree, dict(self.coefficients))

    def is_empty(self) -> bool:
        return not self.coefficients

    def terms(self) -> List[Tuple[VertexTuple, int]]:
        return sorted(self.coefficients.items())

    def support_vertices(self) -> set:
        verts = set()
        for s in self.coefficients:
            verts.update(s)
        return verts

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self.coefficients.values()), default=0)

    def __add__(self, other: "Chain") -> "Chain":
        if other.degree != self.degree or other.complex is not self.complex:
            raise ValueError("chains live in different groups")
        out = self.copy()
        for s, c in other.coefficients.items():
            new = out.coefficients.get(s, 0) + c
            if new == 0:
                out.coefficients.pop(s, None)
            else:
                out.coefficients[s] = new
        return out

    def __neg__(self) -> "Chain":
        return Chain(self.complex, self.degree,
                     {s: -c for s, c in self.coefficients.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __rmul__(self, n: int) -> "Chain":
        if n == 0:
            return Chain(self.complex, self.degree)
        return Chain(self.complex, self.degree,
                     {s: n * c for s, c in self.coefficients.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, Chain) and self.degree == other.degree
                and self.coefficients == other.coefficients)

    def __repr__(self):
        parts = [f"{c:+d}*{s}" for s, c in self.terms()[:6]]
        more = "..." if len(self.coefficients) > 6 else ""
        return f"Chain(deg={self.degree}, {' '.join(parts)}{more})"


def boundary(c: Chain) -> Chain:
    """Alternating-sign face sum; degree drops by one."""
    if c.degree == 0:
        raise ValueError("no boundary in degree 0")
    out = Chain(c.complex, c.degree - 1)
    for s, coeff in c.coefficients.items():
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            sign = -1 if i % 2 else 1
            new = out.coefficients.get(face, 0) + sign * coeff
            if new == 0:
                out.coefficients.pop(face, None)
            else:
                out.coefficients[face] = new
    return out


def mass(c: Chain) -> float:
    """Coefficient-weighted volume sum; zero iff the chain is empty."""
    if c.degree == 0:
        return float(sum(abs(v) for v in c.coefficients.values()))
    return sum(abs(coeff) * c.complex.volumes[s]
               for s, coeff in c.coefficients.items())


def is_cycle(c: Chain) -> bool:
    if c.degree == 0:
        return True
    return boundary(c).is_empty()


def induced_subcomplex(complex: WeightedComplex,
                       vertices: Iterable[int]) -> WeightedComplex:
    """Full subcomplex on a vertex subset, volumes carried over."""
    keep = set(vertices)
    simplices = []
    volumes = {}
    for k in range(complex.dim + 1):
        for s in complex.simplices.get(k, ()):
            if all(v in keep for v in s):
                simplices.append(s)
                if k >= 1:
                    volumes[s] = complex.volumes[s]
    return WeightedComplex(simplices, volumes, check=False)


def transfer_chain(c: Chain, target: WeightedComplex) -> Chain:
    """Reinterpret a chain on another complex sharing vertex ids."""
    out = Chain(target, c.degree)
    for s, coeff in c.coefficients.items():
        if s not in target.simplices.get(c.degree, ()):
            raise ComplexValidationError(
                f"simplex {s} missing from the target complex")
        out.coefficients[s] = coeff
    return out
