import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpdsynth import cmatrix
from fpdsynth.cmatrix import EvaluationPoint, NormalizedCouplingMatrix
from fpdsynth.prototype import PrototypeSpec, compute_g_values
from fpdsynth.synthesis import PAPER_SPEC, DividerSpec, build_coupling_plan

F0, FBW = PAPER_SPEC.f0, PAPER_SPEC.fbw


def plan_for(n_way, order, ripple=0.1, fbw=0.03):
    spec = DividerSpec(fbw=fbw, n_way=n_way, order=order, ripple_db=ripple)
    return spec, build_coupling_plan(spec, compute_g_values(PrototypeSpec(order, ripple)))


class TestNormalize:
    def test_paper_values(self, paper_ncm):
        m = paper_ncm.m
        assert m[1, 2] == pytest.approx(1.0317, abs=5e-5)
        assert m[0, 1] == pytest.approx(0.5957, abs=5e-5)
        assert all(q == pytest.approx(0.8516, abs=1e-12) for _, _, q in paper_ncm.loading)
        assert np.array_equal(m, m.T)
        assert np.all(np.diag(m) == 0)

    @given(st.floats(0.005, 0.5))
    def test_qe_equals_g0_g1(self, fbw):
        spec, plan = plan_for(3, 3, fbw=fbw)
        ncm = cmatrix.normalize(plan, spec)
        g = compute_g_values(PrototypeSpec(3, 0.1))
        assert ncm.loading[0][2] == pytest.approx(g[0] * g[1], rel=1e-12)

    def test_zero_couplings(self):
        ncm = NormalizedCouplingMatrix(np.zeros((3, 3)), ((1, 0, 1.0), (2, 2, 1.0)), F0, FBW)
        assert not ncm.m.any()

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            NormalizedCouplingMatrix(np.array([[0, 1.0], [0.5, 0]]), ((1, 0, 1.0),), F0, FBW)


class TestLowpassMapping:
    def test_p_at_f0(self):
        assert cmatrix.lowpass_p(F0, F0, FBW) == 0.0

    def test_band_edges(self):
        lo, hi = cmatrix.ripple_band(F0, FBW)
        assert cmatrix.lowpass_p(lo, F0, FBW) == pytest.approx(-1, abs=1e-12)
        assert cmatrix.lowpass_p(hi, F0, FBW) == pytest.approx(1, abs=1e-12)
        assert hi - lo == pytest.approx(FBW * F0, rel=1e-12)

    def test_increasing(self):
        f = np.linspace(1e6, 1e10, 1000)
        assert np.all(np.diff(cmatrix.lowpass_p(f, F0, FBW)) > 0)


class TestEvaluate:
    def test_centre(self, paper_ncm):
        s = cmatrix.evaluate(paper_ncm, EvaluationPoint.at(F0, F0, FBW))
        assert abs(s[0, 0]) < 1e-6
        for k in range(1, 4):
            assert abs(s[k, 0]) == pytest.approx(1 / math.sqrt(3), abs=1e-6)

    @pytest.mark.parametrize("p", [-50.0, 50.0])
    def test_stopband(self, paper_ncm, p):
        s = cmatrix.evaluate(paper_ncm, EvaluationPoint(F0, p))
        assert abs(s[0, 0]) == pytest.approx(1, abs=1e-3)
        assert np.all(np.abs(s[1:, 0]) <= 1e-3)

    def test_nonfinite_p(self, paper_ncm):
        with pytest.raises(ValueError):
            cmatrix.evaluate(paper_ncm, EvaluationPoint(F0, float("nan")))

    def test_uncoupled_resonators_by_hand(self):
        # S21 must vanish and S11 is the singly loaded tank (jp - 1/q) / (jp + 1/q)
        q, p = 0.7, 0.37
        ncm = NormalizedCouplingMatrix(np.zeros((2, 2)), ((1, 0, q), (2, 1, q)), F0, FBW)
        s = cmatrix.evaluate(ncm, EvaluationPoint(F0, p))
        assert s[1, 0] == 0
        assert s[0, 0] == pytest.approx((1j * p - 1 / q) / (1j * p + 1 / q), abs=1e-15)


class TestSweep:
    def test_properties(self, paper_sweep):
        assert paper_sweep.unitarity_defect() <= 1e-9
        assert paper_sweep.reciprocity_defect() <= 1e-9
        s21, s31, s41 = (np.abs(paper_sweep.sij(k, 1)) for k in (2, 3, 4))
        assert np.abs(s21 - s31).max() <= 1e-12
        assert np.abs(s21 - s41).max() <= 1e-12
        assert np.all(s21**2 <= 1 / 3 + 1e-12)

    def test_split_bound_tight_at_zero_reflection(self, paper_sweep):
        s11 = np.abs(paper_sweep.sij(1, 1))
        s21 = np.abs(paper_sweep.sij(2, 1))
        # lossless + symmetric: |S11|^2 + 3|S21|^2 = 1
        assert np.abs(s11**2 + 3 * s21**2 - 1).max() < 1e-12

    def test_single_point_matches_evaluate(self, paper_ncm):
        r = cmatrix.sweep(paper_ncm, [F0])
        s = cmatrix.evaluate(paper_ncm, EvaluationPoint.at(F0, F0, FBW))
        assert np.array_equal(r.s[0], s)

    @pytest.mark.parametrize("workers", [2, 3, 8])
    def test_parallel_bitwise(self, paper_ncm, paper_sweep, workers):
        r = cmatrix.sweep(paper_ncm, paper_sweep.freqs, workers=workers)
        assert r.s.tobytes() == paper_sweep.s.tobytes()

    def test_empty(self, paper_ncm):
        with pytest.raises(ValueError):
            cmatrix.sweep(paper_ncm, [])

    def test_unsorted(self, paper_ncm):
        with pytest.raises(ValueError):
            cmatrix.sweep(paper_ncm, [2.6e9, 2.5e9])

    def test_grid_refinement(self, paper_ncm, paper_sweep):
        fine = cmatrix.sweep(paper_ncm, cmatrix.default_grid(points=4001))
        a = cmatrix.metrics(paper_sweep, PAPER_SPEC)
        b = cmatrix.metrics(fine, PAPER_SPEC)
        assert abs(a.worst_in_band_rl_db - b.worst_in_band_rl_db) < 0.01
        assert max(abs(x - y) for x, y in zip(a.il_at_f0_db, b.il_at_f0_db)) < 0.01


class TestMetrics:
    def test_paper(self, paper_sweep):
        m = cmatrix.metrics(paper_sweep, PAPER_SPEC)
        assert m.worst_in_band_rl_db >= 19.9
        assert len(m.reflection_zeros) == 3
        assert m.measured_fbw == pytest.approx(0.03, rel=0.05)
        assert m.band_edges[0] < F0 < m.band_edges[1]
        for il in m.il_at_f0_db:
            assert il == pytest.approx(10 * math.log10(3), abs=0.01)
        assert max(m.il_at_f0_db) - min(m.il_at_f0_db) < 1e-9
        # reflection zeros of the third-order response sit at p = 0, +/- cos(pi/6)
        p = cmatrix.lowpass_p(np.array(m.reflection_zeros), F0, FBW)
        assert p == pytest.approx([-math.cos(math.pi / 6), 0, math.cos(math.pi / 6)], abs=2e-3)

    def test_sweep_must_cover_band(self, paper_ncm):
        r = cmatrix.sweep(paper_ncm, np.linspace(2.59e9, 2.61e9, 11))
        with pytest.raises(ValueError):
            cmatrix.metrics(r, PAPER_SPEC)


class TestFold:
    def test_paper(self, paper_plan, paper_sweep):
        folded = cmatrix.fold_equivalent_filter(paper_plan)
        assert folded.n_resonators == 3
        assert folded.m_chain[0] == pytest.approx(paper_plan.m_chain[1], rel=1e-14)
        spec1 = DividerSpec(n_way=1)
        r = cmatrix.sweep(cmatrix.normalize(folded, spec1), paper_sweep.freqs)
        assert np.abs(r.sij(1, 1) - paper_sweep.sij(1, 1)).max() <= 1e-10
        for k in (2, 3, 4):
            assert np.abs(r.sij(2, 1) / math.sqrt(3) - paper_sweep.sij(k, 1)).max() <= 1e-10

    def test_one_way_identity(self):
        _, plan = plan_for(1, 4)
        assert cmatrix.fold_equivalent_filter(plan) == plan

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), st.integers(2, 6), st.floats(0.005, 0.2))
    def test_property(self, n_way, order, fbw):
        spec, plan = plan_for(n_way, order, fbw=fbw)
        folded = cmatrix.fold_equivalent_filter(plan)
        spec1 = DividerSpec(fbw=fbw, n_way=1, order=order)
        f = np.linspace(F0 * (1 - 2 * fbw), F0 * (1 + 2 * fbw), 101)
        a = cmatrix.sweep(cmatrix.normalize(plan, spec), f)
        b = cmatrix.sweep(cmatrix.normalize(folded, spec1), f)
        assert np.abs(a.sij(1, 1) - b.sij(1, 1)).max() <= 1e-10
        for k in range(2, n_way + 2):
            assert np.abs(a.sij(k, 1) - b.sij(2, 1) / math.sqrt(n_way)).max() <= 1e-10
        assert np.all(np.abs(a.sij(2, 1)) ** 2 <= 1 / n_way + 1e-12)
        assert a.unitarity_defect() <= 1e-9
        assert a.reciprocity_defect() <= 1e-9


class TestLoss:
    def test_infinite_q(self, paper_ncm, paper_sweep):
        r = cmatrix.sweep(cmatrix.apply_uniform_loss(paper_ncm, math.inf), paper_sweep.freqs)
        assert np.abs(r.s - paper_sweep.s).max() <= 1e-9

    def test_lossy_not_unitary(self, paper_ncm, paper_sweep):
        r = cmatrix.sweep(cmatrix.apply_uniform_loss(paper_ncm, 500), paper_sweep.freqs)
        assert r.unitarity_defect() > 1e-3
        assert r.reciprocity_defect() <= 1e-9

    def test_monotone_in_qu(self, paper_ncm):
        qs = [200, 500, 1000, 3000, 10000]
        excess = [cmatrix.excess_il_at_f0(paper_ncm, q) for q in qs]
        assert all(a > b > 0 for a, b in zip(excess, excess[1:]))

    def test_halving_q_doubles_small_loss(self, paper_ncm):
        a = cmatrix.excess_il_at_f0(paper_ncm, 20000)
        b = cmatrix.excess_il_at_f0(paper_ncm, 10000)
        assert b / a == pytest.approx(2, rel=0.02)

    def test_fit(self, paper_ncm, paper_g):
        qu = cmatrix.fit_unloaded_q(paper_ncm, 0.34)
        assert 500 < qu < 5000
        assert cmatrix.excess_il_at_f0(paper_ncm, qu) == pytest.approx(0.34, abs=1e-6)
        assert qu == pytest.approx(cmatrix.analytic_unloaded_q(paper_g, FBW, 0.34), rel=0.1)

    def test_bad_q(self, paper_ncm):
        with pytest.raises(ValueError):
            cmatrix.apply_uniform_loss(paper_ncm, 0)
