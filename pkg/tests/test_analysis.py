import math

import numpy as np
import pytest

from l2approx import FIXTURES
from l2approx.analysis import (
    Ledger,
    betti_convergence,
    det_class_report,
    gap_diagnostic,
    oracle_functional,
    sandwich_check,
    stieltjes_functional,
    tail_bound_check,
    tail_bound_rhs,
)

# |F_m^abs(0) - F_m^rel(0)| <= C_ABS_REL / m on every fixture, fitted once on m <= 64
C_ABS_REL = 1.0


def test_circle_betti_convergence(studies):
    rep = betti_convergence(studies["circle"], 0, "absolute", [10, 100, 1000])
    assert [r["F_m_0"] for r in rep.rows] == [0.1, 0.01, 0.001]
    assert rep.b2_oracle == 0
    assert rep.final_residual == pytest.approx(1e-3)
    assert rep.verdict == "PASS"


def test_wedge_and_torus_betti_convergence(studies):
    wedge = betti_convergence(studies["wedge"], 1, "absolute", [1, 3, 17])
    assert all(r["F_m_0"] == 1 for r in wedge.rows) and wedge.final_residual < 1e-12
    torus = betti_convergence(studies["torus"], 1, "absolute", [1, 2, 5])
    assert all(r["F_m_0"] == 0 and r["residual"] == 0 for r in torus.rows)


def test_betti_convergence_needs_increasing_m(studies):
    for bad in ([], [4, 4], [8, 2]):
        with pytest.raises(ValueError):
            betti_convergence(studies["circle"], 0, "absolute", bad)


def test_tail_bound_single_translate(studies):
    s = studies["circle"].summary(0, 1)
    ledger = tail_bound_check(s, 4, s.a, [0.5], m=1)
    row = ledger.rows[0]
    assert row["lhs"] == 0 and row["rhs"] == pytest.approx(4.0)
    assert ledger.ok


def test_tail_bound_circle_closed_form(studies):
    m, lam = 100, 0.01
    s = studies["circle"].summary(0, m)
    eig = 4 * np.sin(np.arange(m + 1) * np.pi / (2 * (m + 1))) ** 2
    lhs = (eig <= lam).sum() / m - 1 / m
    ledger = tail_bound_check(s, 4, s.a, [lam], m=m)
    assert ledger.rows[0]["lhs"] == pytest.approx(lhs)
    assert ledger.ok


def test_tail_bound_torus_with_unit_constant(studies):
    s = studies["torus"].summary(0, 8)
    assert tail_bound_check(s, 8, 1.0, [0.1], m=8).ok


def test_tail_bound_reports_violations(studies):
    s = studies["circle"].summary(0, 100)
    ledger = tail_bound_check(s, 4, 1e-4, [0.5, 0.9], m=100)
    assert not ledger.ok
    v = ledger.violations[0]
    assert {"m", "lambda", "lhs", "rhs"} <= v.keys() and v["lhs"] > v["rhs"]
    with pytest.raises(AssertionError):
        ledger.raise_for_violations()
    with pytest.raises(ValueError):
        tail_bound_check(s, 4, 1.0, [1.0])


def test_tail_bound_rhs_formula():
    assert tail_bound_rhs(2.0, 4, 0.5) == pytest.approx(2 * math.log(4) / math.log(2))


def test_trace_check_examples(studies):
    from l2approx.analysis import trace_approximation_check
    st = studies["circle"]
    linear = trace_approximation_check(st, 0, [0, 1], [10])
    assert linear.rows[0]["difference"] == pytest.approx(0, abs=1e-12)
    const = trace_approximation_check(st, 0, [1], [5, 10, 20])
    assert [r["difference"] for r in const.rows] == pytest.approx([1 / 5, 1 / 10, 1 / 20])
    square = trace_approximation_check(st, 0, [0, 0, 1], [50], C=4)
    assert square.ok and square.rows[0]["bound"] == pytest.approx(2 * square.rows[0]["Ndot"] / 50 * 16)
    with pytest.raises(ValueError):
        trace_approximation_check(st, 0, [0] * 9 + [1], [4])


def test_trace_check_against_eigenvalues(studies):
    from l2approx.analysis import trace_approximation_check
    st = studies["torus"]
    coeffs = [3, -1, 0.5, 0.25]
    row = trace_approximation_check(st, 1, coeffs, [6]).rows[0]
    eig = st.summary(1, 6).eigenvalues
    direct = np.polynomial.polynomial.polyval(eig, coeffs).sum() / 36
    assert row["finite_trace"] == pytest.approx(direct, rel=1e-10)


def test_det_class_circle(studies):
    rep = det_class_report(studies["circle"], 0, "absolute", [1, 10, 100, 1000])
    for r in rep.rows:
        assert r["log_det_prime_normalized"] == pytest.approx(math.log(r["m"] + 1) / r["m"], abs=1e-12)
    assert rep.rows[0]["det_prime"] == 2
    assert rep.rows[-1]["log_det_prime_normalized"] == pytest.approx(0.0069, abs=1e-4)
    assert abs(rep.oracle_log_det) <= 0.01
    assert rep.checks["functional_bound"] and rep.checks["oracle_nonnegative"]
    # the window holds m = 10, 100, 1000; I_10 lies 0.24 below the oracle functional
    assert not rep.checks["liminf_direction"]


def test_det_class_torus_exact(studies):
    rep = det_class_report(studies["torus"], 0, "absolute", [2, 4])
    for r in rep.rows:
        assert isinstance(r["det_prime"], int) and r["det_prime"] >= 1
        assert r["functional_slack"] >= 0
    assert rep.verdict == "PASS"


@pytest.mark.parametrize("name", FIXTURES)
def test_stieltjes_summation_matches_closed_form(name, studies):
    st = studies[name]
    for j in range(st.cx.top_dim + 1):
        for bc in ("absolute", "relative"):
            rep = det_class_report(st, j, bc, [3, 6])
            for r in rep.rows:
                assert r["I_m_stieltjes"] == pytest.approx(r["I_m"], abs=1e-10)


def test_stieltjes_functional_of_empty_spectrum():
    assert stieltjes_functional(np.zeros(0), 3, 4.0) == 0.0


def test_oracle_functional_matches_step_integral(studies):
    dens = studies["torus"].density(0, 64)
    value, cutoff = oracle_functional(dens, 8, points=200001)
    flat = dens.samples.ravel()
    pos = flat[flat > dens.kernel_tol]
    exact = np.log(8 / np.maximum(pos, cutoff)).sum() / dens.points
    assert cutoff == pytest.approx(8e-6)
    assert value == pytest.approx(exact, rel=1e-4)


def test_gap_diagnostic(studies):
    st = studies["circle"]
    (row,) = gap_diagnostic(st, 0, "absolute", [200], 0.5)
    dens = st.density(0)
    assert row["g_m"] == pytest.approx(dens.F(0.5) - dens.F(0.0), abs=2 / 200)
    for name, s in studies.items():
        for j in range(s.cx.top_dim + 1):
            (row,) = gap_diagnostic(s, j, "absolute", [4], s.K2(j))
            summ = s.summary(j, 4)
            assert row["g_m"] == pytest.approx(summ.a - summ.F(0))
    wedge = studies["wedge"]
    (row,) = gap_diagnostic(wedge, 1, "absolute", [256], 0.1)
    dens = wedge.density(1)
    assert row["g_m"] == pytest.approx(dens.F(0.1) - dens.betti, abs=0.02)
    with pytest.raises(ValueError):
        gap_diagnostic(st, 0, "absolute", [4], 0.0)


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("eps", [0.05, 0.1])
def test_sandwich(name, eps, studies):
    st = studies[name]
    window = [16, 32, 64]
    for j in range(st.cx.top_dim + 1):
        lams = np.linspace(0, st.K2(j), 17)
        ledger = sandwich_check(st, j, lams, window, eps=eps, tol=0.05)
        assert ledger.ok, ledger.violations[:1]


@pytest.mark.parametrize("name", FIXTURES)
def test_betti_ratio_converges(name, studies):
    st = studies[name]
    tolerance = {"circle": 1 / 64, "wedge": 1 / 64, "torus": 1 / 64 ** 2}[name]
    for j in range(st.cx.top_dim + 1):
        b2 = st.density(j).betti
        r8 = abs(st.kernel(j, 8) / 8 ** st.cx.d - b2)
        r64 = abs(st.kernel(j, 64) / 64 ** st.cx.d - b2)
        assert r64 <= r8 and r64 <= tolerance


@pytest.mark.parametrize("name", FIXTURES)
def test_absolute_and_relative_share_the_limit(name, studies):
    st = studies[name]
    for m in (2, 4, 8, 16, 32, 64):
        n = m ** st.cx.d
        for j in range(st.cx.top_dim + 1):
            gap = abs(st.kernel(j, m, "absolute") - st.kernel(j, m, "relative")) / n
            assert gap <= C_ABS_REL / m


def test_ledger_collects_violations():
    ledger = Ledger("demo")
    ledger.add({"x": 1})
    ledger.add({"x": 2}, ok=False)
    assert not ledger.ok and ledger.violations == [{"x": 2, "ok": False}]
