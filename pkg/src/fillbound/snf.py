"""Sparse Smith normal form over the integers with transform certificates.

All arithmetic is exact (Python ints).  The elimination keeps the matrix in
dict-of-rows form with a column index, picks pivots by magnitude first and
Markowitz fill count second, and tracks the unimodular transforms U (rows),
V (columns) and V^-1 needed by the chain solvers.

The certificate is checked by direct multiplication in the equivalent split
form  U*B == D*Vinv  together with  V*Vinv == I , which avoids forming the
dense triple product U*B*V on larger complexes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

Rows = Dict[int, Dict[int, int]]


def _sym_div(a: int, d: int) -> int:
    """Quotient q with |a - q*d| <= d/2, for d > 0."""
    return (2 * a + d) // (2 * d)


class _Eliminator:
    def __init__(self, entries: Dict[Tuple[int, int], int], m: int, n: int,
                 track: bool):
        self.m, self.n = m, n
        self.track = track
        self.rows: Rows = {}
        self.cols: Dict[int, set] = {}
        for (i, j), v in entries.items():
            if v:
                self.rows.setdefault(i, {})[j] = v
                self.cols.setdefault(j, set()).add(i)
        if track:
            self.U: Rows = {i: {i: 1} for i in range(m)}
            self.Vc: Rows = {j: {j: 1} for j in range(n)}   # V by columns
            self.Vinv: Rows = {j: {j: 1} for j in range(n)}  # V^-1 by rows
        self.det_u = 1
        self.det_v = 1

    # -- primitive sparse ops ------------------------------------------

    def _get(self, i: int, j: int) -> int:
        return self.rows.get(i, {}).get(j, 0)

    def _set(self, i: int, j: int, v: int):
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.cols.setdefault(j, set()).add(i)
        else:
            row = self.rows.get(i)
            if row and j in row:
                del row[j]
                self.cols[j].discard(i)

    @staticmethod
    def _dict_addmul(dst: Dict[int, int], src: Dict[int, int], q: int):
        for k, v in src.items():
            new = dst.get(k, 0) - q * v
            if new:
                dst[k] = new
            else:
                dst.pop(k, None)

    # -- row operations (mirrored on U) ---------------------------------

    def row_swap(self, i1: int, i2: int):
        if i1 == i2:
            return
        r1, r2 = self.rows.get(i1, {}), self.rows.get(i2, {})
        self.rows[i1], self.rows[i2] = r2, r1
        for j in r1:
            self.cols[j].discard(i1)
            self.cols[j].add(i2)
        for j in r2:
            self.cols[j].discard(i2)
            self.cols[j].add(i1)
        # entries present in both were toggled twice and are fixed here
        for j in set(r1) & set(r2):
            self.cols[j].add(i1)
            self.cols[j].add(i2)
        if self.track:
            self.U[i1], self.U[i2] = self.U.get(i2, {}), self.U.get(i1, {})
        self.det_u = -self.det_u

    def row_addmul(self, dst: int, src: int, q: int):
        """Row dst <- row dst - q * row src."""
        if q == 0:
            return
        srow = self.rows.get(src, {})
        drow = self.rows.setdefault(dst, {})
        for j, v in srow.items():
            new = drow.get(j, 0) - q * v
            if new:
                drow[j] = new
                self.cols.setdefault(j, set()).add(dst)
            else:
                drow.pop(j, None)
                self.cols[j].discard(dst)
        if self.track:
            self._dict_addmul(self.U.setdefault(dst, {}),
                              self.U.get(src, {}), q)

    def row_negate(self, i: int):
        row = self.rows.get(i, {})
        for j in row:
            row[j] = -row[j]
        if self.track:
            urow = self.U.get(i, {})
            for j in urow:
                urow[j] = -urow[j]
        self.det_u = -self.det_u

    # -- column operations (mirrored on V, inverse on Vinv) --------------

    def col_swap(self, j1: int, j2: int):
        if j1 == j2:
            return
        rows1 = self.cols.get(j1, set()).copy()
        rows2 = self.cols.get(j2, set()).copy()
        vals1 = {i: self.rows[i].pop(j1) for i in rows1}
        vals2 = {i: self.rows[i].pop(j2) for i in rows2}
        self.cols[j1] = set()
        self.cols[j2] = set()
        for i, v in vals1.items():
            self.rows[i][j2] = v
            self.cols[j2].add(i)
        for i, v in vals2.items():
            self.rows[i][j1] = v
            self.cols[j1].add(i)
        if self.track:
            self.Vc[j1], self.Vc[j2] = self.Vc.get(j2, {}), self.Vc.get(j1, {})
            self.Vinv[j1], self.Vinv[j2] = (self.Vinv.get(j2, {}),
                                            self.Vinv.get(j1, {}))
        self.det_v = -self.det_v

    def col_addmul(self, dst: int, src: int, q: int):
        """Col dst <- col dst - q * col src;  Vinv row src += q * Vinv row dst."""
        if q == 0:
            return
        for i in self.cols.get(src, set()).copy():
            v = self.rows[i][src]
            new = self.rows[i].get(dst, 0) - q * v
            self._set(i, dst, new)
        if self.track:
            self._dict_addmul(self.Vc.setdefault(dst, {}),
                              self.Vc.get(src, {}), q)
            srow = self.Vinv.setdefault(src, {})
            drow = self.Vinv.get(dst, {})
            for k, v in drow.items():
                new = srow.get(k, 0) + q * v
                if new:
                    srow[k] = new
                else:
                    srow.pop(k, None)

    def col_negate(self, j: int):
        for i in self.cols.get(j, set()):
            self.rows[i][j] = -self.rows[i][j]
        if self.track:
            vcol = self.Vc.get(j, {})
            for k in vcol:
                vcol[k] = -vcol[k]
            vrow = self.Vinv.get(j, {})
            for k in vrow:
                vrow[k] = -vrow[k]
        self.det_v = -self.det_v

    def row_block(self, i: int, j: int, a: int, b: int, c: int, d: int):
        """Rows (i, j) <- (a*Ri + b*Rj, c*Ri + d*Rj), with ad - bc = +-1."""
        det = a * d - b * c
        ri = dict(self.rows.get(i, {}))
        rj = dict(self.rows.get(j, {}))
        for col in set(ri) | set(rj):
            x, y = ri.get(col, 0), rj.get(col, 0)
            self._set(i, col, a * x + b * y)
            self._set(j, col, c * x + d * y)
        if self.track:
            ui = dict(self.U.get(i, {}))
            uj = dict(self.U.get(j, {}))
            newi, newj = {}, {}
            for col in set(ui) | set(uj):
                x, y = ui.get(col, 0), uj.get(col, 0)
                if a * x + b * y:
                    newi[col] = a * x + b * y
                if c * x + d * y:
                    newj[col] = c * x + d * y
            self.U[i], self.U[j] = newi, newj
        self.det_u *= det

    def col_block(self, i: int, j: int, a: int, b: int, c: int, d: int):
        """Cols (i, j) <- (a*Ci + b*Cj, c*Ci + d*Cj), with ad - bc = +-1."""
        det = a * d - b * c
        rows_touched = self.cols.get(i, set()) | self.cols.get(j, set())
        for r in rows_touched.copy():
            x, y = self._get(r, i), self._get(r, j)
            self._set(r, i, a * x + b * y)
            self._set(r, j, c * x + d * y)
        if self.track:
            vi = dict(self.Vc.get(i, {}))
            vj = dict(self.Vc.get(j, {}))
            newi, newj = {}, {}
            for r in set(vi) | set(vj):
                x, y = vi.get(r, 0), vj.get(r, 0)
                if a * x + b * y:
                    newi[r] = a * x + b * y
                if c * x + d * y:
                    newj[r] = c * x + d * y
            self.Vc[i], self.Vc[j] = newi, newj
            # inverse block [[d,-c],[-b,a]]/det acts on Vinv rows
            wi = dict(self.Vinv.get(i, {}))
            wj = dict(self.Vinv.get(j, {}))
            newi, newj = {}, {}
            for k in set(wi) | set(wj):
                x, y = wi.get(k, 0), wj.get(k, 0)
                p = (d * x - c * y) * det
                r2 = (-b * x + a * y) * det
                if p:
                    newi[k] = p
                if r2:
                    newj[k] = r2
            self.Vinv[i], self.Vinv[j] = newi, newj
        self.det_v *= det

    # -- the elimination --------------------------------------------------

    def _find_pivot(self, k: int):
        best = None
        for i, row in self.rows.items():
            if i < k or not row:
                continue
            rn = len(row)
            for j, v in row.items():
                if j < k:
                    continue
                score = (abs(v), (rn - 1) * (len(self.cols[j]) - 1), i, j)
                if best is None or score < best[0]:
                    best = (score, i, j)
                    if score[0] == 1 and score[1] == 0:
                        return i, j
        return (best[1], best[2]) if best else None

    def diagonalize(self):
        k = 0
        limit = min(self.m, self.n)
        while k < limit:
            piv = self._find_pivot(k)
            if piv is None:
                break
            self.row_swap(piv[0], k)
            self.col_swap(piv[1], k)
            while True:
                if self._get(k, k) < 0:
                    self.row_negate(k)
                d = self._get(k, k)
                dirty = False
                for i in (self.cols.get(k, set()) - {k}).copy():
                    q = _sym_div(self.rows[i][k], d)
                    self.row_addmul(i, k, q)
                    if self._get(i, k):
                        self.row_swap(i, k)
                        dirty = True
                        break
                if dirty:
                    continue
                row_k = self.rows.get(k, {})
                for j in (set(row_k) - {k}).copy():
                    q = _sym_div(row_k[j], d)
                    self.col_addmul(j, k, q)
                    if self._get(k, j):
                        self.col_swap(j, k)
                        dirty = True
                        break
                if not dirty:
                    break
            k += 1
        return k

    def fix_divisibility(self, rank: int):
        changed = True
        while changed:
            changed = False
            for i in range(rank - 1):
                a = self._get(i, i)
                b = self._get(i + 1, i + 1)
                if a and b and b % a:
                    g, s, t = _xgcd(a, b)
                    # rows (i,i+1) by [[s,t],[-b/g,a/g]], cols by
                    # [[1,-t*b/g],[1,s*a/g]]: diag(a,b) -> diag(g, a*b/g)
                    self.row_block(i, i + 1, s, t, -b // g, a // g)
                    self.col_block(i, i + 1, 1, 1, -t * b // g, s * a // g)
                    changed = True
        # ascending reorder keeps the chain canonical
        for pos in range(rank):
            best = min(range(pos, rank), key=lambda i: self._get(i, i))
            if best != pos:
                self.row_swap(pos, best)
                self.col_swap(pos, best)


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass
class SnfCertificate:
    """U * B * V = diag(d_1..d_r, 0..), with U, V unimodular.

    U is stored by rows, V by columns, Vinv by rows.  ``diagonal`` has
    length min(m, n) and satisfies d_i | d_{i+1}.
    """

    nrows: int
    ncols: int
    diagonal: List[int]
    rank: int
    U: Rows
    V_cols: Rows
    Vinv_rows: Rows
    det_u: int
    det_v: int

    def apply_U(self, z: Dict[int, int]) -> Dict[int, int]:
        """U * z for a sparse vector z (dict index -> int)."""
        out = {}
        for i, row in self.U.items():
            small, big = (row, z) if len(row) < len(z) else (z, row)
            acc = 0
            for j, v in small.items():
                w = big.get(j)
                if w:
                    acc += v * w
            if acc:
                out[i] = acc
        return out

    def apply_V_col(self, coeffs: Dict[int, int]) -> Dict[int, int]:
        """V * w for sparse w: integer combination of V columns."""
        out: Dict[int, int] = {}
        for j, c in coeffs.items():
            for i, v in self.V_cols.get(j, {}).items():
                new = out.get(i, 0) + c * v
                if new:
                    out[i] = new
                else:
                    out.pop(i, None)
        return out

    def kernel_basis(self) -> List[Dict[int, int]]:
        """Columns of V past the rank: a lattice basis of ker B."""
        return [dict(self.V_cols.get(j, {}))
                for j in range(self.rank, self.ncols)]

    def kernel_coords(self, x: Dict[int, int]) -> Dict[int, int]:
        """Components of Vinv * x past the rank (exact for x in ker B + coset)."""
        out = {}
        for j in range(self.rank, self.ncols):
            row = self.Vinv_rows.get(j, {})
            acc = 0
            small, big = (row, x) if len(row) < len(x) else (x, row)
            for k, v in small.items():
                w = big.get(k)
                if w:
                    acc += v * w
            if acc:
                out[j - self.rank] = acc
        return out

    def verify(self, entries: Dict[Tuple[int, int], int]) -> bool:
        """Certificate check by direct multiplication.

        Checks V*Vinv == I and U*B == D*Vinv, which together are equivalent
        to U*B*V == D; also checks the divisibility chain and that the
        tracked determinants are +-1.
        """
        if self.det_u not in (1, -1) or self.det_v not in (1, -1):
            return False
        for a, b in zip(self.diagonal, self.diagonal[1:]):
            if a == 0 and b != 0:
                return False
            if a and b % a:
                return False
        if any(d < 0 for d in self.diagonal):
            return False
        # V * Vinv == I  (columns of the product, driven by Vinv's rows)
        prod: Dict[Tuple[int, int], int] = {}
        for k in range(self.ncols):
            vrow = self.Vinv_rows.get(k, {})
            vcol = self.V_cols.get(k, {})
            for j, w in vrow.items():
                for i, v in vcol.items():
                    key = (i, j)
                    new = prod.get(key, 0) + v * w
                    if new:
                        prod[key] = new
                    else:
                        prod.pop(key, None)
        for (i, j), v in prod.items():
            if (v != 1 if i == j else v != 0):
                return False
        if len(prod) != self.ncols:
            return False
        # U * B == D * Vinv
        ub: Dict[Tuple[int, int], int] = {}
        cols_of_U: Dict[int, Dict[int, int]] = {}
        for i, row in self.U.items():
            for j, v in row.items():
                cols_of_U.setdefault(j, {})[i] = v
        for (i, j), v in entries.items():
            if not v:
                continue
            for r, u in cols_of_U.get(i, {}).items():
                key = (r, j)
                new = ub.get(key, 0) + u * v
                if new:
                    ub[key] = new
                else:
                    ub.pop(key, None)
        dvinv: Dict[Tuple[int, int], int] = {}
        for i, d in enumerate(self.diagonal):
            if d == 0:
                continue
            for j, v in self.Vinv_rows.get(i, {}).items():
                dvinv[(i, j)] = d * v
        return ub == dvinv


def smith_normal_form(entries: Dict[Tuple[int, int], int], m: int, n: int,
                      track: bool = True) -> SnfCertificate:
    """Compute the Smith normal form of an m x n integer matrix.

    ``entries`` maps (row, col) to a nonzero integer.  With ``track=False``
    only the diagonal is meaningful (homology fast path).
    """
    el = _Eliminator(entries, m, n, track)
    rank = el.diagonalize()
    el.fix_divisibility(rank)
    diag = [el._get(i, i) for i in range(min(m, n))]
    return SnfCertificate(
        nrows=m, ncols=n, diagonal=diag, rank=rank,
        U=el.U if track else {}, V_cols=el.Vc if track else {},
        Vinv_rows=el.Vinv if track else {},
        det_u=el.det_u, det_v=el.det_v)
