"""Exact integer matrix algebra: Smith normal form, linear solving, lattices.

All matrices are numpy arrays with dtype=object holding Python ints, so
arithmetic never overflows.  Columns of a matrix are read as generators of
the lattice they span.
"""

import numpy as np


def intmat(rows):
    """Build an object-dtype integer matrix from a list of rows."""
    if len(rows) == 0:
        return np.zeros((0, 0), dtype=object)
    a = np.array(rows, dtype=object)
    if a.ndim == 1:
        a = a.reshape(len(rows), -1)
    return a


def zeros(m, n):
    return np.zeros((m, n), dtype=object)


def eye(n):
    return np.eye(n, dtype=object)


def smith_normal_form(A):
    """Smith normal form with unimodular transforms and their inverses.

    Returns (U, S, V, Uinv, Vinv) with U @ A @ V = S, S diagonal with
    s_1 | s_2 | ... | s_r followed by zeros, all s_i > 0.
    """
    S = A.astype(object).copy()
    m, n = S.shape
    U, V = eye(m), eye(n)
    Uinv, Vinv = eye(m), eye(n)

    def row_op(i, j, q):
        # row_i -= q * row_j ; inverse: col_j += q * col_i on Uinv
        S[i, :] -= q * S[j, :]
        U[i, :] -= q * U[j, :]
        Uinv[:, j] += q * Uinv[:, i]

    def col_op(i, j, q):
        # col_i -= q * col_j
        S[:, i] -= q * S[:, j]
        V[:, i] -= q * V[:, j]
        Vinv[j, :] += q * Vinv[i, :]

    def swap_rows(i, j):
        S[[i, j], :] = S[[j, i], :]
        U[[i, j], :] = U[[j, i], :]
        Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def swap_cols(i, j):
        S[:, [i, j]] = S[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]
        Vinv[[i, j], :] = Vinv[[j, i], :]

    def negate_row(i):
        S[i, :] = -S[i, :]
        U[i, :] = -U[i, :]
        Uinv[:, i] = -Uinv[:, i]

    t = 0
    while t < min(m, n):
        # Find the nonzero entry of least absolute value in S[t:, t:].
        piv = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = S[i, j]
                if v != 0 and (best is None or abs(v) < best):
                    best = abs(v)
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        # Clear row and column t by Euclidean steps.
        while True:
            done = True
            for i in range(t + 1, m):
                if S[i, t] != 0:
                    q = S[i, t] // S[t, t]
                    row_op(i, t, q)
                    if S[i, t] != 0:
                        swap_rows(i, t)
                        done = False
            for j in range(t + 1, n):
                if S[t, j] != 0:
                    q = S[t, j] // S[t, t]
                    col_op(j, t, q)
                    if S[t, j] != 0:
                        swap_cols(j, t)
                        done = False
            if done:
                break
        if S[t, t] < 0:
            negate_row(t)
        # Enforce divisibility s_t | s_{t+1}: fold offending entries back in.
        bad = None
        for i in range(t + 1, min(m, n)):
            if S[i, i] % S[t, t] != 0:
                bad = i
                break
        if bad is not None:
            # add column bad to column t and redo this pivot
            S[:, t] += S[:, bad]
            V[:, t] += V[:, bad]
            Vinv[bad, :] -= Vinv[t, :]
            continue
        t += 1
    return U, S, V, Uinv, Vinv


def rank(A):
    if A.shape[0] == 0 or A.shape[1] == 0:
        return 0
    _, S, _, _, _ = smith_normal_form(A)
    return sum(1 for i in range(min(S.shape)) if S[i, i] != 0)


def diagonal(S):
    return [S[i, i] for i in range(min(S.shape))]


def solve(A, b):
    """One integer solution x of A @ x = b, or None."""
    x, _ = solve_with_certificate(A, b)
    return x


def solve_with_certificate(A, b):
    """Solve A @ x = b over the integers.

    Returns (x, None) on success.  On failure returns (None, (w, k)) with
    an integer row vector w such that w @ A == 0 mod k but w @ b != 0
    mod k (k == 0 means equality over the integers).  The witness makes
    nonexistence machine-checkable.
    """
    m, n = A.shape
    b = np.asarray(b, dtype=object).reshape(m)
    U, S, V, _, _ = smith_normal_form(A)
    c = U @ b
    y = zeros(n, 1).reshape(n)
    r = min(m, n)
    for i in range(m):
        s = S[i, i] if i < r else 0
        if s == 0:
            if c[i] != 0:
                return None, (U[i, :], 0)
        else:
            if c[i] % s != 0:
                return None, (U[i, :], s)
            y[i] = c[i] // s
    return V @ y, None


def kernel_basis(A):
    """Matrix whose columns form a basis of {x : A @ x = 0}."""
    m, n = A.shape
    if n == 0:
        return zeros(0, 0)
    _, S, V, _, _ = smith_normal_form(A)
    r = sum(1 for i in range(min(m, n)) if S[i, i] != 0)
    return V[:, r:]


def cokernel_invariants(A):
    """Structure of Z^m / colspan(A) as (free_rank, torsion_coefficients)."""
    m, n = A.shape
    _, S, _, _, _ = smith_normal_form(A)
    diag = [S[i, i] for i in range(min(m, n)) if S[i, i] != 0]
    torsion = [d for d in diag if d > 1]
    return m - len(diag), torsion


def hnf_columns(A):
    """Canonical column Hermite form of the lattice spanned by columns of A.

    Column-style HNF: the result has pivot rows in increasing order, pivots
    positive, entries to the right of each pivot zero, entries to the left
    reduced modulo the pivot.  Two matrices span the same column lattice
    iff their forms are equal.
    """
    H = A.astype(object).copy()
    m, n = H.shape
    pivot_col = 0
    for row in range(m):
        if pivot_col >= n:
            break
        # gcd-reduce the entries of this row across columns >= pivot_col
        while True:
            nz = [j for j in range(pivot_col, n) if H[row, j] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: abs(H[row, j]))
            j0 = nz[0]
            for j in nz[1:]:
                q = H[row, j] // H[row, j0]
                H[:, j] -= q * H[:, j0]
        nz = [j for j in range(pivot_col, n) if H[row, j] != 0]
        if not nz:
            continue
        j0 = nz[0]
        if j0 != pivot_col:
            H[:, [pivot_col, j0]] = H[:, [j0, pivot_col]]
        if H[row, pivot_col] < 0:
            H[:, pivot_col] = -H[:, pivot_col]
        for j in range(pivot_col):
            q = H[row, j] // H[row, pivot_col]
            H[:, j] -= q * H[:, pivot_col]
        pivot_col += 1
    return H[:, :pivot_col]


def lattice_contains(L, v):
    """Is the vector v in the column lattice of L?"""
    return solve(L, v) is not None


def lattice_equal(L1, L2):
    h1, h2 = hnf_columns(L1), hnf_columns(L2)
    return h1.shape == h2.shape and bool(np.equal(h1, h2).all())


def preimage_lattice(F, L):
    """Basis of {x : F @ x in colspan(L)} as matrix columns."""
    m, n = F.shape
    if L.shape[1] == 0:
        return kernel_basis(F)
    block = np.concatenate([F, -L], axis=1)
    K = kernel_basis(block)
    return hnf_columns(K[:n, :])


def intersect_lattices(L1, L2):
    """Basis of the intersection of two column lattices in the same Z^m."""
    if L1.shape[1] == 0 or L2.shape[1] == 0:
        return zeros(L1.shape[0], 0)
    block = np.concatenate([L1, -L2], axis=1)
    K = kernel_basis(block)
    return hnf_columns(L1 @ K[: L1.shape[1], :])


def det(A):
    """Determinant by fraction-free (Bareiss) elimination."""
    n = A.shape[0]
    assert A.shape[1] == n
    if n == 0:
        return 1
    M = A.astype(object).copy()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k, k] == 0:
            for i in range(k + 1, n):
                if M[i, k] != 0:
                    M[[k, i], :] = M[[i, k], :]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i, j] = (M[i, j] * M[k, k] - M[i, k] * M[k, j]) // prev
        prev = M[k, k]
    return sign * M[n - 1, n - 1]


def rank_mod_p(A, p):
    """Rank of A over the field F_p."""
    M = np.vectorize(lambda v: v % p, otypes=[object])(A.astype(object))
    m, n = M.shape
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if M[i, col] % p != 0), None)
        if piv is None:
            continue
        M[[r, piv], :] = M[[piv, r], :]
        inv = pow(int(M[r, col]), -1, p)
        M[r, :] = np.vectorize(lambda v: (v * inv) % p, otypes=[object])(M[r, :])
        for i in range(m):
            if i != r and M[i, col] % p != 0:
                M[i, :] = np.vectorize(lambda v: v % p, otypes=[object])(
                    M[i, :] - M[i, col] * M[r, :]
                )
        r += 1
        if r == m:
            break
    return r
