"""Finite Laplacians of the pieces Y_m, their spectra and counting functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.sparse as sp

from .cellcomplex import PeriodicComplex
from .config import Tolerances
from .folner import FinitePiece
from .intlinalg import charpoly, count_at_most, exact_rank

BoundaryCondition = Literal["absolute", "relative"]
BOUNDARY_CONDITIONS = ("absolute", "relative")


class EigensolverError(RuntimeError):
    pass


def _cochain_cells(piece: FinitePiece, j: int, bc: str):
    if bc == "absolute":
        return piece.cells[j] if 0 <= j < len(piece.cells) else ()
    if bc == "relative":
        return piece.interior(j)
    raise ValueError(f"unknown boundary condition {bc!r}")


def finite_coboundary(piece: FinitePiece, j: int, bc: str = "absolute") -> sp.csr_matrix:
    """Integer matrix of d_j on C^j(Y_m) or C^j(Y_m, dY_m); rows (j+1)-cells, cols j-cells."""
    cx = piece.complex
    rows = _cochain_cells(piece, j + 1, bc)
    cols = _cochain_cells(piece, j, bc)
    col_index = {c: i for i, c in enumerate(cols)}
    r_idx, c_idx, vals = [], [], []
    for r, (cid, g) in enumerate(rows):
        for fc in cx.boundary[cid]:
            key = (fc.face, tuple(a + b for a, b in zip(g, fc.shift)))
            c = col_index.get(key)
            if c is not None:
                r_idx.append(r)
                c_idx.append(c)
                vals.append(fc.coef)
    mat = sp.coo_matrix((np.array(vals, dtype=np.int64), (r_idx, c_idx)),
                        shape=(len(rows), len(cols)))
    mat = mat.tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return mat


@dataclass(eq=False)
class FiniteLaplacian:
    j: int
    boundary_condition: str
    matrix: sp.csr_matrix
    N: int
    cells: tuple
    d_prev: sp.csr_matrix  # d_{j-1}: rows j-cells
    d_next: sp.csr_matrix  # d_j: cols j-cells

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def assemble(piece: FinitePiece, cx: PeriodicComplex, j: int,
             bc: str = "absolute") -> FiniteLaplacian:
    if cx is not piece.complex:
        raise ValueError("piece was built from a different complex")
    if not 0 <= j <= cx.top_dim:
        raise ValueError(f"degree {j} outside 0..{cx.top_dim}")
    d_prev = finite_coboundary(piece, j - 1, bc)
    d_next = finite_coboundary(piece, j, bc)
    mat = (d_prev @ d_prev.T + d_next.T @ d_next).tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return FiniteLaplacian(j, bc, mat.astype(np.int64), piece.N,
                           tuple(_cochain_cells(piece, j, bc)), d_prev, d_next)


@dataclass(eq=False)
class SpectrumSummary:
    """Spectral data of one finite Laplacian.

    ``eigenvalues`` is None above the dense limit; counting then goes through
    the inertia counter on ``matrix``.  ``char_poly`` holds det(tI - A) with
    the leading coefficient first, or None above the charpoly limit.
    """

    dim: int
    N: int
    kernel_dim: int
    eigenvalues: np.ndarray | None
    char_poly: list[int] | None
    r_m: int | None
    q0: int | None
    det_prime_exact: int | None
    log_det_prime: float | None
    matrix: sp.csr_matrix = field(repr=False)
    tie_tol: float = 1e-9

    @property
    def a(self) -> float:
        return self.dim / self.N

    @property
    def positive_eigenvalues(self) -> np.ndarray:
        if self.eigenvalues is None:
            raise ValueError("no eigenvalue list above the dense limit")
        return self.eigenvalues[self.kernel_dim:]

    def E(self, lam: float) -> int:
        if lam < 0:
            raise ValueError("lambda must be nonnegative")
        if lam == 0:
            return self.kernel_dim
        if self.eigenvalues is not None:
            pos = self.positive_eigenvalues
            return self.kernel_dim + int(np.searchsorted(pos, lam + self.tie_tol, side="right"))
        return max(self.kernel_dim, count_at_most(self.matrix, lam + self.tie_tol))

    def F(self, lam: float) -> float:
        return self.E(lam) / self.N

    @property
    def max_eigenvalue(self) -> float:
        if self.dim == 0:
            return 0.0
        if self.eigenvalues is not None:
            return float(self.eigenvalues[-1])
        import scipy.sparse.linalg as spla
        return float(spla.eigsh(self.matrix.astype(float), k=1, which="LA",
                                return_eigenvectors=False)[0])


def split_charpoly(coeffs: list[int]) -> tuple[int, int]:
    """Write det(tI - A) = t^r q(t) with q(0) != 0; return (r, q(0))."""
    r = 0
    for c in reversed(coeffs):
        if c != 0:
            return r, c
        r += 1
    raise ValueError("zero polynomial")


def spectrum(lap: FiniteLaplacian, tol: Tolerances | None = None) -> SpectrumSummary:
    tol = tol or Tolerances()
    n = lap.dim
    kernel = homological_kernel(lap)
    eig = None
    log_det = None
    if n <= tol.dense_limit:
        dense = lap.matrix.toarray().astype(float)
        try:
            eig = np.linalg.eigvalsh(dense) if n else np.zeros(0)
        except np.linalg.LinAlgError as exc:
            raise EigensolverError(
                f"eigvalsh failed for j={lap.j} {lap.boundary_condition} N={lap.N} (dim {n})"
            ) from exc
        if n and eig[0] < -tol.tol_psd:
            raise EigensolverError(f"matrix not PSD: smallest eigenvalue {eig[0]}")
        numeric_kernel = int((np.abs(eig) < tol.zero_split).sum())
        if numeric_kernel != kernel:
            raise EigensolverError(
                f"exact kernel {kernel} disagrees with {numeric_kernel} eigenvalues below {tol.zero_split}"
            )
        log_det = float(math.fsum(np.log(eig[eig > tol.zero_split])))
    cp = r = q0 = det_exact = None
    if n <= tol.char_poly_limit:
        cp = charpoly(lap.matrix, psd=True)
        r, q0 = split_charpoly(cp)
        if r != kernel:
            raise ArithmeticError(f"charpoly vanishing order {r} != exact kernel {kernel}")
        det_exact = abs(q0)
        if log_det is None:
            log_det = math.log(det_exact)
    return SpectrumSummary(
        dim=n, N=lap.N, kernel_dim=kernel, eigenvalues=eig, char_poly=cp, r_m=r, q0=q0,
        det_prime_exact=det_exact, log_det_prime=log_det, matrix=lap.matrix, tie_tol=tol.tie_tol,
    )


def counting(summary: SpectrumSummary, lam: float) -> tuple[int, float]:
    e = summary.E(lam)
    return e, e / summary.N


def homological_kernel(lap: FiniteLaplacian) -> int:
    """dim ker d_j - rank d_{j-1}; equals dim ker of the Laplacian by the Hodge decomposition."""
    return lap.dim - exact_rank(lap.d_next) - exact_rank(lap.d_prev)


def laplacian_kernel(lap: FiniteLaplacian) -> int:
    """dim ker of Delta = G^T G with G = [d_{j-1}^T; d_j], via the exact rank of G."""
    return lap.dim - exact_rank(sp.vstack([lap.d_prev.T, lap.d_next]))


def finite_betti(piece: FinitePiece, cx: PeriodicComplex, j: int, bc: str = "absolute") -> int:
    lap = assemble(piece, cx, j, bc)
    kernel = laplacian_kernel(lap)
    check = homological_kernel(lap)
    if kernel != check:
        raise ArithmeticError(
            f"Laplacian kernel {kernel} != homological count {check} (j={j}, {bc}, m={piece.m})"
        )
    return kernel


def export_triples(mat: sp.spmatrix) -> str:
    """Plain-text ``row col value`` lines in row-major order, header gives the shape."""
    coo = sp.coo_matrix(mat)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"# {mat.shape[0]} {mat.shape[1]}"]
    lines += [f"{coo.row[i]} {coo.col[i]} {int(coo.data[i])}" for i in order]
    return "\n".join(lines) + "\n"
