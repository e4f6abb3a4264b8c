import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from dynbc import SystemParams, SpectrumHit, char_det, char_roots, \
    degenerate_char_value, dirichlet_apply, feedback_matrix, pencil
from dynbc.analytic import _feedback_entries, char_det_many

from conftest import collocation_dirichlet, collocation_char_det

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-30, max_value=30)


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(0, 0, -1.0)
    with pytest.raises(ValueError):
        SystemParams(float("nan"), 0, 0)
    with pytest.raises(ValueError):
        SystemParams(0, complex("inf"), 1)


class TestCharRoots:
    def test_double_root_at_zero(self):
        r = char_roots(0.0, 0.0)
        assert r.mu1 == 0 and r.mu2 == 0 and r.degenerate

    def test_zero_lambda_with_transport(self):
        # mu1 = (-k + sqrt(k^2))/2 = 0, mu2 = -k
        r = char_roots(0.0, 2.0)
        assert_allclose([r.mu1, r.mu2], [0.0, -2.0], atol=1e-15)
        assert not r.degenerate

    def test_discriminant_zero(self):
        r = char_roots(-9.0 / 4.0, 3.0)
        assert_allclose([r.mu1, r.mu2], [-1.5, -1.5])
        assert r.degenerate

    @given(lr=finite, li=finite, k=st.floats(min_value=0, max_value=10))
    @settings(max_examples=200)
    def test_sum_and_product(self, lr, li, k):
        lam = complex(lr, li)
        r = char_roots(lam, k)
        scale = max(1.0, abs(lam), k)
        assert abs(r.mu1 + r.mu2 + k) <= 1e-12 * scale
        assert abs(r.mu1 * r.mu2 + lam) <= 1e-12 * scale


class TestDirichletApply:
    def test_linear_interpolation(self):
        # k = 0, lam = 0: u'' = 0, straight line through the data
        x = np.linspace(0, 1, 7)
        u = dirichlet_apply(SystemParams(0, 0, 0), 0.0, 2.0, -1.0, x)
        assert_allclose(u, 2.0 + (-1.0 - 2.0) * x, atol=1e-14)

    def test_confluent_solution(self):
        # k=2, lam=-1 is the double-root case; x0=1, x1=0 gives (1-x)e^{-x}
        x = np.linspace(0, 1, 11)
        u = dirichlet_apply(SystemParams(0, 0, 2.0), -1.0, 1.0, 0.0, x)
        assert_allclose(u, (1 - x) * np.exp(-x), rtol=1e-13)

    @given(lr=st.floats(min_value=-8, max_value=40), li=finite,
           k=st.floats(min_value=0, max_value=5),
           x0=finite, x1=finite)
    @settings(max_examples=150)
    def test_endpoints(self, lr, li, k, x0, x1):
        lam = complex(lr, li)
        p = SystemParams(0, 0, k)
        try:
            u0 = dirichlet_apply(p, lam, x0, x1, 0.0)
            u1 = dirichlet_apply(p, lam, x0, x1, 1.0)
        except SpectrumHit:
            return
        scale = max(1.0, abs(x0), abs(x1))
        assert abs(u0 - x0) <= 1e-12 * scale
        assert abs(u1 - x1) <= 1e-12 * scale

    def test_matches_collocation_oracle(self, rng):
        # 100 random positive lam against an independent collocation solve
        mesh = np.linspace(0, 1, 101)
        worst = 0.0
        for _ in range(100):
            k = rng.uniform(0, 3)
            lam = rng.uniform(0.1, 30)
            x0, x1 = rng.uniform(-1, 1, 2)
            ref, _ = collocation_dirichlet(k, lam, x0, x1, mesh)
            got = dirichlet_apply(SystemParams(0, 0, k), lam, x0, x1, mesh)
            worst = max(worst, float(np.abs(got - ref).max()))
        assert worst <= 1e-8

    def test_large_lambda_no_overflow(self):
        u = dirichlet_apply(SystemParams(0, 0, 1.0), 1e6, 1.0, 1.0, np.linspace(0, 1, 5))
        assert np.all(np.isfinite(u))

    def test_spectrum_hit(self):
        with pytest.raises(SpectrumHit):
            dirichlet_apply(SystemParams(0, 0, 0), -math.pi**2, 1.0, 0.0, 0.5)

    def test_x_range_validated(self):
        with pytest.raises(ValueError):
            dirichlet_apply(SystemParams(0, 0, 0), 1.0, 1.0, 0.0, 1.5)


class TestFeedbackMatrix:
    def test_zero_case(self):
        fb = feedback_matrix(SystemParams(0, 0, 0), 0.0)
        assert_allclose(fb.entries, [[-1, 1], [1, -1]], atol=1e-14)

    def test_transport_at_zero(self):
        fb = feedback_matrix(SystemParams(0, 0, 1.0), 0.0)
        e = math.exp(-1.0)
        ref = np.array([[-1, 1], [e, -e]]) / (1 - e)
        assert_allclose(fb.entries, ref, rtol=1e-14)

    @pytest.mark.parametrize("k", [0.0, 1.0, 3.0])
    def test_confluent_limit(self, k):
        # generic formula 1e-8 away from the double root, evaluated in
        # high precision, against the confluent formula
        mpmath.mp.dps = 40
        lam = mpmath.mpf(-(k * k) / 4.0) + mpmath.mpf(1e-8)
        root = mpmath.sqrt(k * k + 4 * lam)
        m1, m2 = (-k + root) / 2, (-k - root) / 2
        g = mpmath.e**m1 - mpmath.e**m2
        gen = np.array([[float((m2 * mpmath.e**m1 - m1 * mpmath.e**m2) / g),
                         float((m1 - m2) / g)],
                        [float((m1 - m2) * mpmath.e**(m1 + m2) / g),
                         float((m2 * mpmath.e**m2 - m1 * mpmath.e**m1) / g)]])
        conf = feedback_matrix(SystemParams(0, 0, k), -(k * k) / 4.0).entries
        assert np.abs(gen - conf).max() <= 1e-6

    def test_swap_symmetry_thousand_samples(self, rng):
        worst = 0.0
        for _ in range(1000):
            lam = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
            k = rng.uniform(0, 4)
            root = np.sqrt(complex(k * k + 4 * lam))
            if abs(root) < 1e-3:
                continue
            m1, m2 = (-k + root) / 2, (-k - root) / 2
            a = np.array(_feedback_entries(m1, m2))
            b = np.array(_feedback_entries(m2, m1))
            worst = max(worst, float(np.abs(a - b).max()))
        assert worst <= 1e-10

    def test_real_for_nonnegative_discriminant(self, rng):
        for _ in range(50):
            k = rng.uniform(0, 4)
            lam = rng.uniform(-k * k / 4, 20)
            if abs(k * k + 4 * lam) < 1e-6:
                continue
            fb = feedback_matrix(SystemParams(0, 0, k), lam)
            assert np.abs(fb.entries.imag).max() <= 1e-12


class TestPencil:
    def test_diagonal_addition(self):
        p = pencil(SystemParams(2.0, -1.0, 0.0), 0.0)
        assert_allclose(p, [[1, 1], [1, -2]], atol=1e-14)

    def test_markovian_kernel_vector(self):
        # row sums vanish: the constant boundary vector is in the kernel
        p = pencil(SystemParams(0, 0, 0), 0.0)
        assert_allclose(p @ np.ones(2), 0.0, atol=1e-14)


class TestCharDet:
    def test_markovian_zero(self):
        assert abs(char_det(SystemParams(0, 0, 0), 0.0)) <= 1e-14

    def test_value_against_collocation_oracle(self):
        # frozen from the collocation oracle below: 2 + 2*coth(1)
        frozen = 4.626070570998663
        got = char_det(SystemParams(0, 0, 0), 1.0)
        assert_allclose(got.real, frozen, rtol=1e-12)
        assert abs(got.imag) <= 1e-14
        oracle = collocation_char_det(0.0, 0.0, 0.0, 1.0)
        assert_allclose(oracle, frozen, rtol=1e-9)

    def test_value_with_transport_against_oracle(self):
        p = SystemParams(1.0, -2.0, 1.0)
        oracle = collocation_char_det(1.0, -2.0, 1.0, 2.5)
        assert_allclose(char_det(p, 2.5).real, oracle, rtol=1e-9)

    def test_branch_independence(self, rng):
        # both square-root branches produce the same determinant
        for _ in range(100):
            lam = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
            k = rng.uniform(0, 3)
            a, b = rng.uniform(-2, 2, 2)
            root = np.sqrt(complex(k * k + 4 * lam))
            if abs(root) < 1e-3:
                continue
            vals = []
            for m1, m2 in (((-k + root) / 2, (-k - root) / 2),
                           ((-k - root) / 2, (-k + root) / 2)):
                b11, b12, b21, b22 = _feedback_entries(m1, m2)
                vals.append((lam - a - b11) * (lam - b - b22) - b12 * b21)
            assert abs(vals[0] - vals[1]) <= 1e-12 * max(1.0, abs(vals[0]))

    @given(a=st.floats(min_value=-3, max_value=3), b=st.floats(min_value=-3, max_value=3),
           k=st.floats(min_value=0, max_value=3), lam=st.floats(min_value=-45, max_value=20))
    @settings(max_examples=200)
    def test_real_on_real_axis(self, a, b, k, lam):
        p = SystemParams(a, b, k)
        try:
            v = char_det(p, lam)
        except SpectrumHit:
            return
        assert abs(v.imag) <= 1e-12 * max(1.0, abs(v))

    def test_degenerate_point_equals_quartic(self, rng):
        for _ in range(30):
            a, b = rng.uniform(-3, 3, 2)
            k = rng.uniform(0, 3)
            p = SystemParams(a, b, k)
            det16 = 16 * char_det(p, -k * k / 4.0)
            q = degenerate_char_value(p)
            assert abs(det16 - q) <= 1e-10 * max(1.0, abs(q))

    def test_vectorised_matches_scalar(self, rng):
        p = SystemParams(0.5, -1.5, 1.0)
        lams = rng.uniform(-30, 10, 40) + 1j * rng.uniform(-2, 2, 40)
        many = char_det_many(p, lams)
        for lam, v in zip(lams, many):
            if np.isnan(v):
                continue
            assert abs(v - char_det(p, lam)) <= 1e-12 * max(1.0, abs(v))
