import random

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from fillbound.snf import smith_normal_form


def random_entries(rng, m, n, density=0.6, lo=-5, hi=5):
    entries = {}
    for i in range(m):
        for j in range(n):
            if rng.random() < density:
                v = rng.randint(lo, hi)
                if v:
                    entries[(i, j)] = v
    return entries


def dense_triple_product(entries, m, n, cert):
    U = [[cert.U.get(i, {}).get(j, 0) for j in range(m)] for i in range(m)]
    V = [[cert.V_cols.get(j, {}).get(i, 0) for j in range(n)]
         for i in range(n)]
    B = [[0] * n for _ in range(m)]
    for (i, j), v in entries.items():
        B[i][j] = v
    UB = [[sum(U[i][k] * B[k][j] for k in range(m)) for j in range(n)]
          for i in range(m)]
    return [[sum(UB[i][k] * V[k][j] for k in range(n)) for j in range(n)]
            for i in range(m)]


def bareiss_det(M):
    """Fraction-free determinant for the unimodularity check."""
    A = [row[:] for row in M]
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k]:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def test_certificate_by_direct_multiplication():
    rng = random.Random(10)
    for _ in range(150):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        entries = random_entries(rng, m, n)
        cert = smith_normal_form(entries, m, n)
        prod = dense_triple_product(entries, m, n, cert)
        for i in range(m):
            for j in range(n):
                want = cert.diagonal[i] if i == j and i < len(cert.diagonal) \
                    else 0
                assert prod[i][j] == want
        assert cert.verify(entries)


def test_divisibility_chain_and_rank():
    rng = random.Random(11)
    for _ in range(150):
        m, n = rng.randint(1, 7), rng.randint(1, 7)
        entries = random_entries(rng, m, n, lo=-9, hi=9)
        cert = smith_normal_form(entries, m, n)
        nz = [d for d in cert.diagonal if d]
        assert len(nz) == cert.rank
        assert all(d > 0 for d in nz)
        for a, b in zip(nz, nz[1:]):
            assert b % a == 0


def test_diagonal_matches_sympy():
    rng = random.Random(12)
    for _ in range(80):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        entries = random_entries(rng, m, n, density=0.7)
        M = [[0] * n for _ in range(m)]
        for (i, j), v in entries.items():
            M[i][j] = v
        cert = smith_normal_form(entries, m, n)
        S = sympy_snf(Matrix(M))
        theirs = sorted(abs(S[i, i]) for i in range(min(m, n))
                        if S[i, i] != 0)
        ours = sorted(d for d in cert.diagonal if d)
        assert theirs == ours


def test_transforms_are_unimodular():
    rng = random.Random(13)
    for _ in range(60):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        entries = random_entries(rng, m, n)
        cert = smith_normal_form(entries, m, n)
        U = [[cert.U.get(i, {}).get(j, 0) for j in range(m)]
             for i in range(m)]
        V = [[cert.V_cols.get(j, {}).get(i, 0) for j in range(n)]
             for i in range(n)]
        assert bareiss_det(U) in (1, -1)
        assert bareiss_det(V) in (1, -1)
        assert bareiss_det(U) == cert.det_u
        assert bareiss_det(V) == cert.det_v


def test_kernel_basis_and_coords():
    rng = random.Random(14)
    for _ in range(80):
        m, n = rng.randint(1, 6), rng.randint(2, 6)
        entries = random_entries(rng, m, n)
        cert = smith_normal_form(entries, m, n)
        for k in cert.kernel_basis():
            # B * k == 0
            out = {}
            for (i, j), v in entries.items():
                if j in k:
                    out[i] = out.get(i, 0) + v * k[j]
            assert all(v == 0 for v in out.values())
        # kernel coordinates invert the basis combination
        ks = cert.kernel_basis()
        if ks:
            combo = {}
            coeffs = [rng.randint(-3, 3) for _ in ks]
            for c, k in zip(coeffs, ks):
                for j, v in k.items():
                    combo[j] = combo.get(j, 0) + c * v
            combo = {j: v for j, v in combo.items() if v}
            t = cert.kernel_coords(combo)
            got = [t.get(i, 0) for i in range(len(ks))]
            assert got == coeffs


def test_empty_and_zero_matrices():
    cert = smith_normal_form({}, 3, 2)
    assert cert.rank == 0
    assert cert.diagonal == [0, 0]
    assert cert.verify({})
