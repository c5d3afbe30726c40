"""Checks of the limit statements: Betti convergence, tail bound, trace approximation,
determinant class and the gap sequence.

Every check returns a ledger of per-row slacks, so a passing run still shows
how much room each inequality had.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .cellcomplex import LaplacianFamily, PeriodicComplex, laplacians
from .config import Tolerances
from .folner import FinitePiece, FolnerBox, build_piece, collar_count
from .laurent import vn_trace_power
from .oracle import VNDensity, density, fk_determinant
from .spectra import FiniteLaplacian, SpectrumSummary, assemble, homological_kernel, spectrum

DEFAULT_GRID = {1: 4096, 2: 256, 3: 32}


def default_grid(d: int) -> int:
    return DEFAULT_GRID.get(d, 16)


class Study:
    """Memoised pieces, finite Laplacians, spectra and oracle densities for one complex."""

    def __init__(self, cx: PeriodicComplex, tol: Tolerances | None = None):
        self.cx = cx
        self.tol = tol or Tolerances()
        self._pieces: dict[int, FinitePiece] = {}
        self._laps: dict[tuple, FiniteLaplacian] = {}
        self._summaries: dict[tuple, SpectrumSummary] = {}
        self._kernels: dict[tuple, int] = {}
        self._densities: dict[tuple, VNDensity] = {}

    @cached_property
    def family(self) -> LaplacianFamily:
        return laplacians(self.cx)

    def K2(self, j: int) -> int:
        return self.family.K2[j]

    def piece(self, m: int) -> FinitePiece:
        if m not in self._pieces:
            self._pieces[m] = build_piece(self.cx, FolnerBox(m, self.cx.d))
        return self._pieces[m]

    def laplacian(self, j: int, m: int, bc: str = "absolute") -> FiniteLaplacian:
        key = (j, m, bc)
        if key not in self._laps:
            self._laps[key] = assemble(self.piece(m), self.cx, j, bc)
        return self._laps[key]

    def kernel(self, j: int, m: int, bc: str = "absolute") -> int:
        key = (j, m, bc)
        if key not in self._kernels:
            if key in self._summaries:
                self._kernels[key] = self._summaries[key].kernel_dim
            else:
                self._kernels[key] = homological_kernel(self.laplacian(j, m, bc))
        return self._kernels[key]

    def summary(self, j: int, m: int, bc: str = "absolute") -> SpectrumSummary:
        key = (j, m, bc)
        if key not in self._summaries:
            self._summaries[key] = spectrum(self.laplacian(j, m, bc), self.tol)
        return self._summaries[key]

    def density(self, j: int, grid: int | None = None) -> VNDensity:
        grid = grid or default_grid(self.cx.d)
        key = (j, grid)
        if key not in self._densities:
            self._densities[key] = density(self.family.delta[j], grid, j=j,
                                           kernel_tol=self.tol.kernel_tol, tie_tol=self.tol.tie_tol)
        return self._densities[key]

    def a(self, j: int, m_list, bc: str = "absolute") -> float:
        return max(self.laplacian(j, m, bc).dim / self.piece(m).N for m in m_list)


_studies: "weakref.WeakKeyDictionary[PeriodicComplex, Study]" = weakref.WeakKeyDictionary()


def study_for(x: PeriodicComplex | Study, tol: Tolerances | None = None) -> Study:
    if isinstance(x, Study):
        return x
    st = _studies.get(x)
    if st is None or (tol is not None and st.tol != tol):
        st = Study(x, tol)
        _studies[x] = st
    return st


@dataclass
class Ledger:
    name: str
    rows: list[dict] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, row: dict, ok: bool = True) -> None:
        row = dict(row, ok=ok)
        self.rows.append(row)
        if not ok:
            self.violations.append(row)

    def raise_for_violations(self) -> None:
        if self.violations:
            raise AssertionError(f"{self.name}: {len(self.violations)} violation(s), first {self.violations[0]}")


# --- Betti convergence -------------------------------------------------------

@dataclass
class ConvergenceReport:
    j: int
    bc: str
    rows: list[dict]
    b2_oracle: float
    b2_error: float
    tolerance: float

    COLUMNS = ("j", "bc", "m", "N_m", "b_j", "F_m_0", "b2_oracle", "residual")

    @property
    def final_residual(self) -> float:
        return self.rows[-1]["residual"]

    @property
    def verdict(self) -> str:
        return "PASS" if self.final_residual <= self.tolerance else "FAIL"


def betti_convergence(x, j: int, bc: str, m_list, oracle_grid: int | None = None,
                      tol: Tolerances | None = None) -> ConvergenceReport:
    st = study_for(x, tol)
    m_list = list(m_list)
    if not m_list or any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ValueError("m_list must be nonempty and strictly increasing")
    dens = st.density(j, oracle_grid)
    b2 = dens.betti_estimate
    rows = []
    for m in m_list:
        N = st.piece(m).N
        b = st.kernel(j, m, bc)
        rows.append({"j": j, "bc": bc, "m": m, "N_m": N, "b_j": b, "F_m_0": b / N,
                     "b2_oracle": b2.value, "residual": abs(b / N - b2.value)})
    return ConvergenceReport(j, bc, rows, b2.value, b2.error, st.tol.betti)


# --- tail bound --------------------------------------------------------------

def tail_bound_rhs(a: float, K2: float, lam: float) -> float:
    return -a * math.log(K2) / math.log(lam)


def tail_bound_check(summary: SpectrumSummary, K2: float, a: float, lambda_list,
                     m: int | None = None) -> Ledger:
    """F_m(lambda) - F_m(0) <= -a log K^2 / log lambda for 0 < lambda < 1."""
    ledger = Ledger("tail bound")
    f0 = summary.F(0.0)
    for lam in lambda_list:
        if not 0 < lam < 1:
            raise ValueError(f"lambda must lie in (0, 1), got {lam}")
        lhs = summary.F(lam) - f0
        rhs = tail_bound_rhs(a, K2, lam)
        ledger.add({"m": m, "lambda": lam, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs}, lhs <= rhs)
    return ledger


# --- trace approximation -----------------------------------------------------

def _sparse_power_traces(mat: sp.csr_matrix, degree: int) -> list[int]:
    out = [mat.shape[0]]
    acc = sp.identity(mat.shape[0], dtype=np.int64, format="csr")
    for _ in range(degree):
        acc = acc @ mat
        out.append(int(acc.diagonal().sum()))
    return out


def trace_approximation_check(x, j: int, p_coeffs, m_list, C: float | None = None,
                              bc: str = "absolute") -> Ledger:
    """Compare the von Neumann trace of p(Delta_j) with (1/N_m) tr p(Delta_j^(m)).

    The bound is 2 (Ndot_{m,deg p} / N_m) sum |a_r| C^r.  C defaults to K_j^2,
    which dominates every diagonal entry of every power: |D^r(s, s)| <= K^(2r).
    """
    st = study_for(x)
    coeffs = [float(c) for c in p_coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg > 8:
        raise ValueError("polynomial degree is capped at 8")
    C = st.K2(j) if C is None else C
    delta = st.family.delta[j]
    vn = math.fsum(a * vn_trace_power(delta, r) for r, a in enumerate(coeffs))
    scale = math.fsum(abs(a) * C ** r for r, a in enumerate(coeffs))
    ledger = Ledger("trace approximation")
    for m in m_list:
        piece = st.piece(m)
        traces = _sparse_power_traces(st.laplacian(j, m, bc).matrix, deg)
        finite = math.fsum(a * t for a, t in zip(coeffs, traces)) / piece.N
        ndot = collar_count(piece, deg)
        bound = 2 * ndot / piece.N * scale
        diff = abs(vn - finite)
        ledger.add({"m": m, "N_m": piece.N, "Ndot": ndot, "vn_trace": vn, "finite_trace": finite,
                    "difference": diff, "bound": bound, "slack": bound - diff}, diff <= bound)
    return ledger


# --- determinant class -------------------------------------------------------

def stieltjes_functional(positive: np.ndarray, N: int, K2: float) -> float:
    """int_{0+}^{K^2} (F(l) - F(0)) / l dl for the step function of ``positive`` eigenvalues / N."""
    mu = np.sort(np.asarray(positive, dtype=float))
    if mu.size == 0:
        return 0.0
    nodes = np.append(mu, K2)
    counts = np.arange(1, mu.size + 1)
    return math.fsum((counts * np.log(nodes[1:] / nodes[:-1])).tolist()) / N


def oracle_functional(dens: VNDensity, K2: float, cutoff_ratio: float = 1e-6,
                      points: int = 8001) -> tuple[float, float]:
    """Log-spaced trapezoid quadrature of (F - F(0)) / lambda on [cutoff, K^2]."""
    lo = cutoff_ratio * K2
    s = np.linspace(math.log(lo), math.log(K2), points)
    g = dens.F(np.exp(s)) - dens.betti
    value = float(np.sum((g[1:] + g[:-1]) * np.diff(s)) / 2)
    return value, lo


@dataclass
class DetClassReport:
    j: int
    bc: str
    K2: int
    rows: list[dict]
    oracle_log_det: float
    oracle_log_det_error: float
    oracle_I: float
    oracle_cutoff: float
    liminf_window: list[int]
    liminf_slack: float
    tolerance: Tolerances

    COLUMNS = ("j", "bc", "m", "N_m", "det_prime", "log_det_prime_normalized",
               "boundary_term", "I_m", "I_m_stieltjes", "functional_bound_rhs", "functional_slack")

    @property
    def checks(self) -> dict[str, bool]:
        return {
            "log_det_prime_nonnegative": all(r["log_det_prime_normalized"] >= 0 for r in self.rows),
            "functional_bound": all(r["functional_slack"] >= -1e-12 for r in self.rows),
            "liminf_direction": self.liminf_slack >= 0,
            "oracle_nonnegative": self.oracle_log_det >= -self.tolerance.fk,
        }

    @property
    def verdict(self) -> str:
        return "PASS" if all(self.checks.values()) else "FAIL"


def det_class_report(x, j: int, bc: str, m_list, oracle_grid: int | None = None,
                     tol: Tolerances | None = None) -> DetClassReport:
    st = study_for(x, tol)
    tol = st.tol
    K2 = st.K2(j)
    logK2 = math.log(K2)
    rows = []
    for m in m_list:
        s = st.summary(j, m, bc)
        if s.log_det_prime is None:
            raise ValueError(f"m={m}: neither eigenvalues nor a characteristic polynomial available")
        N = s.N
        nonzero = s.dim - s.kernel_dim
        log_det_n = s.log_det_prime / N
        boundary = logK2 * (s.F(K2) - s.F(0.0))
        closed = nonzero / N * logK2 - log_det_n
        direct = (stieltjes_functional(s.positive_eigenvalues, N, K2)
                  if s.eigenvalues is not None else float("nan"))
        rows.append({"j": j, "bc": bc, "m": m, "N_m": N,
                     "det_prime": s.det_prime_exact if s.det_prime_exact is not None else "",
                     "log_det_prime_normalized": log_det_n, "boundary_term": boundary,
                     "I_m": closed, "I_m_stieltjes": direct, "functional_bound_rhs": boundary,
                     "functional_slack": boundary - closed})
    dens = st.density(j, oracle_grid)
    fk = dens.log_det_prime()
    fk_err = abs(fk - dens.half.log_det_prime())
    I, cutoff = oracle_functional(dens, K2)
    window = list(m_list)[-tol.window:]
    best = min(r["I_m"] for r in rows if r["m"] in window)
    return DetClassReport(j, bc, K2, rows, fk, fk_err, I, cutoff, window,
                          best + tol.liminf - I, tol)


# --- gap sequence and sandwich ------------------------------------------------

def gap_diagnostic(x, j: int, bc: str, m_list, lam: float) -> list[dict]:
    """(E_m(lambda) - E_m(0)) / N_m for each m."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    st = study_for(x)
    out = []
    for m in m_list:
        s = st.summary(j, m, bc)
        out.append({"m": m, "lambda": lam, "g_m": (s.E(lam) - s.E(0.0)) / s.N})
    return out


def sandwich_check(x, j: int, lambdas, window, eps: float = 0.1, tol: float = 0.05,
                   oracle_grid: int | None = None, bc: str = "absolute") -> Ledger:
    """min_m F_m(l) <= F(l) + tol and F(l) <= max_m F_m(l + eps) + tol over the window."""
    st = study_for(x)
    dens = st.density(j, oracle_grid)
    ledger = Ledger("sandwich")
    for lam in lambdas:
        f = dens.F(lam)
        low = min(st.summary(j, m, bc).F(lam) for m in window)
        high = max(st.summary(j, m, bc).F(lam + eps) for m in window)
        ledger.add({"lambda": lam, "F_oracle": f, "min_F_m": low, "max_F_m_eps": high,
                    "lower_slack": f + tol - low, "upper_slack": high + tol - f},
                   low <= f + tol and f <= high + tol)
    return ledger
