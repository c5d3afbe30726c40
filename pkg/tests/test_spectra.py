import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from l2approx import FIXTURES, load_fixture
from l2approx.cellcomplex import laplacians
from l2approx.config import Tolerances
from l2approx.folner import FolnerBox, build_piece, deep_cells
from l2approx.laurent import power
from l2approx.spectra import (
    assemble,
    counting,
    export_triples,
    finite_betti,
    homological_kernel,
    laplacian_kernel,
    spectrum,
)

CX = {name: load_fixture(name) for name in FIXTURES}


def lap(name, m, j, bc="absolute"):
    cx = CX[name]
    return assemble(build_piece(cx, FolnerBox(m, cx.d)), cx, j, bc)


def path_eigenvalues(m):
    return np.sort(4 * np.sin(np.arange(m + 1) * np.pi / (2 * (m + 1))) ** 2)


def test_circle_single_translate():
    a = lap("circle", 1, 0)
    np.testing.assert_array_equal(a.matrix.toarray(), [[1, -1], [-1, 1]])
    assert lap("circle", 1, 0, "relative").matrix.shape == (0, 0)


def test_torus_patch_is_grid_laplacian():
    a = lap("torus", 2, 0).matrix.toarray()
    degrees = [2, 3, 2, 3, 4, 3, 2, 3, 2]
    assert a.shape == (9, 9)
    assert sorted(np.diag(a)) == sorted(degrees)
    np.testing.assert_array_equal(a, a.T)
    assert (a.sum(axis=1) == 0).all()


def test_assemble_rejects_foreign_piece(circle):
    piece = build_piece(CX["circle"], FolnerBox(2, 1))
    with pytest.raises(ValueError):
        assemble(piece, circle, 0)
    with pytest.raises(ValueError):
        assemble(piece, CX["circle"], 2)


def test_spectrum_of_two_vertex_path():
    s = spectrum(lap("circle", 1, 0))
    np.testing.assert_allclose(s.eigenvalues, [0, 2], atol=1e-12)
    assert s.kernel_dim == 1 and s.char_poly == [1, -2, 0]
    assert (s.r_m, s.q0, s.det_prime_exact) == (1, -2, 2)
    assert counting(s, 0) == (1, 1.0)
    assert counting(s, 2)[0] == 2


def test_spectrum_of_three_vertex_path():
    s = spectrum(lap("circle", 2, 0))
    np.testing.assert_allclose(s.eigenvalues, [0, 1, 3], atol=1e-12)
    assert s.det_prime_exact == 3


@pytest.mark.parametrize("m", [1, 5, 10, 37, 100])
def test_path_spectrum_closed_form(m):
    s = spectrum(lap("circle", m, 0))
    np.testing.assert_allclose(s.eigenvalues, path_eigenvalues(m), atol=1e-10)


def test_counting_small_lambda():
    s = spectrum(lap("circle", 10, 0))
    assert counting(s, 0.1)[0] == 2
    with pytest.raises(ValueError):
        counting(s, -1.0)


def test_inertia_counter_matches_dense():
    a = lap("torus", 6, 1)
    dense = spectrum(a)
    sparse = spectrum(a, Tolerances(dense_limit=10, char_poly_limit=10))
    assert sparse.eigenvalues is None
    for x in (0.0, 1e-3, 0.3, 1.0, 2.5, 4.0, 7.9, 16.0):
        assert sparse.E(x) == dense.E(x)
    assert sparse.max_eigenvalue == pytest.approx(dense.max_eigenvalue)


def test_finite_betti_examples():
    for m in (1, 3, 8):
        assert finite_betti(*_args("circle", m), 0) == 1
        assert finite_betti(*_args("wedge", m), 1) == m
    assert finite_betti(*_args("torus", 3), 2) == 0


def _args(name, m):
    cx = CX[name]
    return build_piece(cx, FolnerBox(m, cx.d)), cx


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("bc", ["absolute", "relative"])
def test_exact_and_numeric_kernels_agree(name, bc):
    cx = CX[name]
    for m in (1, 2, 3, 5, 8):
        for j in range(cx.top_dim + 1):
            a = assemble(build_piece(cx, FolnerBox(m, cx.d)), cx, j, bc)
            s = spectrum(a)
            numeric = int((np.abs(s.eigenvalues) < 1e-8).sum())
            assert s.kernel_dim == numeric == laplacian_kernel(a) == homological_kernel(a)
            assert s.E(laplacians(cx).K2[j]) == s.dim
            assert 0 <= s.F(1.0) <= s.a


@pytest.mark.parametrize("name", FIXTURES)
def test_euler_characteristic(name):
    cx = CX[name]
    for m in (1, 4, 7):
        piece = build_piece(cx, FolnerBox(m, cx.d))
        cells = sum((-1) ** j * piece.count(j) for j in range(cx.top_dim + 1))
        betti = sum((-1) ** j * finite_betti(piece, cx, j) for j in range(cx.top_dim + 1))
        assert cells == betti


@pytest.mark.parametrize("name", FIXTURES)
def test_norm_bound(name):
    cx = CX[name]
    fam = laplacians(cx)
    for m in (1, 4, 9):
        for j in range(cx.top_dim + 1):
            for bc in ("absolute", "relative"):
                s = spectrum(assemble(build_piece(cx, FolnerBox(m, cx.d)), cx, j, bc))
                assert s.max_eigenvalue <= fam.K2[j] + 1e-9


@pytest.mark.parametrize("name", FIXTURES)
def test_integer_char_poly_facts(name):
    cx = CX[name]
    for m in (1, 2, 4):
        for j in range(cx.top_dim + 1):
            s = spectrum(assemble(build_piece(cx, FolnerBox(m, cx.d)), cx, j))
            if s.dim == 0:
                continue
            assert all(isinstance(c, int) for c in s.char_poly)
            assert s.r_m == s.kernel_dim
            assert s.q0 != 0 and s.det_prime_exact >= 1
            assert math.log(s.det_prime_exact) == pytest.approx(s.log_det_prime, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_deep_interior_rows_match_group_ring(name, k):
    cx = CX[name]
    fam = laplacians(cx)
    m = 9 if cx.d == 1 else 8
    piece = build_piece(cx, FolnerBox(m, cx.d))
    for j in range(cx.top_dim + 1):
        a = assemble(piece, cx, j)
        acc = a.matrix
        for _ in range(k - 1):
            acc = acc @ a.matrix
        finite = acc.diagonal()
        vn = power(fam.delta[j], k)
        deep = deep_cells(piece, j, k)
        assert deep, (name, j, k)
        for i in deep:
            base = cx.cells[j].index(piece.cells[j][i][0])
            assert finite[i] == vn[base, base].constant_term()


@given(st.sampled_from(FIXTURES), st.integers(1, 6), st.sampled_from(["absolute", "relative"]))
def test_finite_laplacian_is_symmetric_integer_gram(name, m, bc):
    cx = CX[name]
    piece = build_piece(cx, FolnerBox(m, cx.d))
    for j in range(cx.top_dim + 1):
        a = assemble(piece, cx, j, bc)
        gram = (a.d_prev @ a.d_prev.T + a.d_next.T @ a.d_next).toarray()
        dense = a.matrix.toarray()
        assert dense.dtype.kind == "i"
        np.testing.assert_array_equal(dense, dense.T)
        np.testing.assert_array_equal(dense, gram)


def test_export_triples_is_deterministic():
    a = lap("circle", 2, 0).matrix
    text = export_triples(a)
    assert text.splitlines()[0] == "# 3 3"
    assert text == export_triples(sp.csr_matrix(a.toarray()))
    rows = [tuple(map(int, line.split())) for line in text.splitlines()[1:]]
    assert rows == sorted(rows)
