"""Exact integer linear algebra and an inertia-based eigenvalue counter."""
from __future__ import annotations

import heapq
import math
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import sympy

# p < 2**25 keeps n * p**2 inside int64 for n up to a few thousand.
_PRIME_CEILING = 2 ** 25
# relative shift nudges tried by the inertia counter, and the pivot size it trusts
_SHIFT_LADDER = (0.0, 1e-6, 1e-5, 1e-4)
_PIVOT_FLOOR = 1e-7


def exact_rank(a) -> int:
    """Rank over Q of an integer matrix by sparse fraction-free elimination.

    Rows are kept as ``{col: int}`` dicts and divided by their content after
    every update, so entries stay small on incidence-like matrices.  Pivots
    are chosen Markowitz-style: shortest row first, then the sparsest column,
    preferring unit entries.
    """
    a = sp.csr_matrix(a)
    rows: list[dict[int, int]] = []
    for i in range(a.shape[0]):
        lo, hi = a.indptr[i], a.indptr[i + 1]
        row = {int(c): int(v) for c, v in zip(a.indices[lo:hi], a.data[lo:hi]) if v != 0}
        if row:
            rows.append(row)
    col_rows: dict[int, set[int]] = {}
    for rid, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(rid)
    heap = [(len(row), rid) for rid, row in enumerate(rows)]
    heapq.heapify(heap)
    alive = set(range(len(rows)))
    rank = 0
    while heap:
        length, rid = heapq.heappop(heap)
        if rid not in alive or len(rows[rid]) != length:
            continue
        row = rows[rid]
        alive.discard(rid)
        if not row:
            continue
        pc = min(row, key=lambda c: (abs(row[c]) != 1, len(col_rows[c]), c))
        pv = row[pc]
        for c in row:
            col_rows[c].discard(rid)
        rank += 1
        for other in list(col_rows[pc]):
            r2 = rows[other]
            g = math.gcd(pv, r2[pc])
            scale, mult = pv // g, r2[pc] // g
            if scale != 1:
                for c in r2:
                    r2[c] *= scale
            for c, v in row.items():
                nv = r2.get(c, 0) - mult * v
                if nv:
                    if c not in r2:
                        col_rows[c].add(other)
                    r2[c] = nv
                elif c in r2:
                    del r2[c]
                    col_rows[c].discard(other)
            if r2:
                content = math.gcd(*r2.values())
                if content > 1:
                    for c in r2:
                        r2[c] //= content
            heapq.heappush(heap, (len(r2), other))
    return rank


def berkowitz(a) -> list[int]:
    """Coefficients of det(tI - A), leading first, by the division-free Berkowitz recursion."""
    a = [[int(x) for x in row] for row in np.asarray(a, dtype=object)]
    n = len(a)
    if n == 0:
        return [1]
    vect = [1, -a[0][0]]
    for r in range(1, n):
        col_r = [a[i][r] for i in range(r)]
        row_r = a[r][:r]
        toeplitz = [1, -a[r][r]]
        v = col_r
        for _ in range(r):
            toeplitz.append(-sum(x * y for x, y in zip(row_r, v)))
            v = [sum(a[i][l] * v[l] for l in range(r)) for i in range(r)]
        vect = [
            sum(toeplitz[i - k] * vect[k] for k in range(max(0, i - r - 1), min(i, r) + 1))
            for i in range(r + 2)
        ]
    return vect


@lru_cache(maxsize=None)
def _primes(count: int) -> tuple[int, ...]:
    out, p = [], _PRIME_CEILING
    while len(out) < count:
        p = sympy.prevprime(p)
        out.append(p)
    return tuple(out)


def charpoly_coefficient_bound(a: np.ndarray, psd: bool = False) -> int:
    """Bound on |coefficients| of det(tI - A).

    Coefficients are elementary symmetric functions e_k of the eigenvalues.
    In general |e_k| <= C(n, k) rho**k with rho the max absolute row sum; for
    positive semidefinite input Maclaurin's inequality gives C(n, k) (tr/n)**k.
    """
    n = a.shape[0]
    if n == 0:
        return 1
    if psd:
        tr = int(np.trace(a))
        # C(n,k) (tr/n)^k <= C(n,k) tr^k / n^k, kept integral by ceiling division
        return max(-(-math.comb(n, k) * tr ** k // n ** k) for k in range(n + 1))
    rho = int(np.abs(a).sum(axis=1).max())
    return max(math.comb(n, k) * rho ** k for k in range(n + 1))


def _hessenberg_charpoly_mod(a: np.ndarray, primes: np.ndarray) -> np.ndarray:
    """det(tI - A) mod each prime, vectorised over primes; rows are leading-first coefficients."""
    n = a.shape[0]
    P = len(primes)
    p = primes.astype(np.int64)
    pc = p[:, None]
    h = np.mod(np.broadcast_to(a.astype(np.int64), (P, n, n)), p[:, None, None]).copy()
    ar = np.arange(P)
    for k in range(n - 2):
        r = k + 1
        nz = h[:, r:, k] != 0
        has = nz.any(axis=1)
        if not has.any():
            continue
        piv = np.where(has, r + nz.argmax(axis=1), r)
        swap = piv != r
        if swap.any():
            idx, pv = ar[swap], piv[swap]
            tmp = h[idx, r, :].copy()
            h[idx, r, :] = h[idx, pv, :]
            h[idx, pv, :] = tmp
            tmp = h[idx, :, r].copy()
            h[idx, :, r] = h[idx, :, pv]
            h[idx, :, pv] = tmp
        pivval = h[:, r, k]
        inv = np.array([pow(int(v), -1, int(q)) if v else 0 for v, q in zip(pivval, p)], dtype=np.int64)
        u = (h[:, r + 1:, k] * inv[:, None]) % pc
        if not u.any():
            continue
        # rows below r are already zero left of column k
        h[:, r + 1:, k:] = (h[:, r + 1:, k:] + (pc - u)[:, :, None] * h[:, None, r, k:]) % p[:, None, None]
        h[:, :, r] = (h[:, :, r] + np.einsum("pni,pi->pn", h[:, :, r + 1:], u)) % pc
    # charpoly of upper Hessenberg H: p_{k+1} = (t - h_kk) p_k - sum_{i<k} h_ik (prod_{l=i+1..k} h_{l,l-1}) p_i
    # polys stored low-order first in polys[:, k, :]
    polys = np.zeros((P, n + 1, n + 1), dtype=np.int64)
    polys[:, 0, 0] = 1
    sub = np.zeros((P, n), dtype=np.int64)  # sub[:, i] = prod_{l=i+1..k} h_{l,l-1}
    for k in range(n):
        nxt = np.zeros((P, n + 1), dtype=np.int64)
        nxt[:, 1:] = polys[:, k, :-1]
        nxt = (nxt + (pc - h[:, k, k][:, None]) * polys[:, k, :]) % pc
        if k:
            sub[:, :k - 1] = (sub[:, :k - 1] * h[:, k, k - 1][:, None]) % pc
            sub[:, k - 1] = h[:, k, k - 1]
            weights = (h[:, :k, k] * sub[:, :k]) % pc
            nxt = (nxt + (pc - np.einsum("pi,pic->pc", weights, polys[:, :k, :]) % pc)) % pc
        polys[:, k + 1, :] = nxt
    return polys[:, n, ::-1]


def charpoly(a, psd: bool = False) -> list[int]:
    """Exact integer characteristic polynomial det(tI - A), leading coefficient first.

    Computed modulo enough primes to cover a proven coefficient bound, then
    reconstructed by Chinese remaindering into the symmetric range.  Pass
    ``psd=True`` only for matrices known to be positive semidefinite (Gram
    matrices); it shrinks the bound and so the number of primes.
    """
    a = np.asarray(a.toarray() if sp.issparse(a) else a)
    if a.size and not np.all(a == np.round(a)):
        raise ValueError("charpoly needs an integer matrix")
    a = a.astype(np.int64)
    n = a.shape[0]
    if n == 0:
        return [1]
    bound = charpoly_coefficient_bound(a, psd=psd)
    count, modulus = 0, 1
    while modulus <= 2 * bound:
        count += 1
        modulus *= _primes(count)[-1]
    primes = np.array(_primes(count), dtype=np.int64)
    residues = _hessenberg_charpoly_mod(a, primes)
    coeffs = []
    for k in range(n + 1):
        x = 0
        for q, res in zip(primes.tolist(), residues[:, k].tolist()):
            mq = modulus // q
            x = (x + res * mq * pow(mq, -1, q)) % modulus
        coeffs.append(x - modulus if x > modulus // 2 else x)
    return coeffs


def _dense_count_below(a: np.ndarray, x: float) -> int:
    """Eigenvalues < x via a dense Bunch-Kaufman LDL^T of A - x I."""
    lu, d, _ = scipy.linalg.ldl(a - x * np.eye(a.shape[0]))
    neg, i, n = 0, 0, d.shape[0]
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0:
            neg += int((np.linalg.eigvalsh(d[i:i + 2, i:i + 2]) < 0).sum())
            i += 2
        else:
            neg += int(d[i, i] < 0)
            i += 1
    return neg


def count_at_most(a, x: float) -> int:
    """Number of eigenvalues <= x of a symmetric matrix, by Sylvester's law of inertia.

    Uses a sparse LDL^T-like factorisation (SuperLU restricted to diagonal
    pivots), counting negative pivots of A - x I.  When ``x`` is numerically on
    an eigenvalue the shift is moved up by at most 1e-4 relative, so the
    eigenvalue is counted; if every shift fails, a dense Bunch-Kaufman
    factorisation decides.
    """
    n = a.shape[0]
    if n == 0:
        return 0
    a = sp.csc_matrix(a, dtype=float)
    eye = sp.identity(n, format="csc")
    scale = max(1.0, abs(x))
    # A shift sitting on a (possibly highly degenerate) eigenvalue makes the
    # static-pivot factorisation meaningless; nudge it upward until every
    # pivot is clearly away from zero.
    for nudge in _SHIFT_LADDER:
        shifted = (a - (x + nudge * scale) * eye).tocsc()
        try:
            lu = spla.splu(shifted, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                           options={"SymmetricMode": True})
        except RuntimeError:
            continue
        piv = lu.U.diagonal()
        if np.array_equal(lu.perm_r, lu.perm_c) and np.abs(piv).min() > _PIVOT_FLOOR * scale:
            return int((piv < 0).sum())
    return _dense_count_below((a - (x + _SHIFT_LADDER[-1] * scale) * eye).toarray(), 0.0)
