import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dynbc import (SearchWindow, SystemParams, char_det, classify,
                   dirichlet_eigenvalue, find_spectrum, real_spectral_bound,
                   ues_closed_form)
from dynbc import assemble, discrete_spectrum


class TestDirichletEigenvalue:
    def test_values(self):
        assert_allclose(dirichlet_eigenvalue(SystemParams(0, 0, 0), 1), -math.pi**2)
        assert_allclose(dirichlet_eigenvalue(SystemParams(0, 0, 2.0), 1), -math.pi**2 - 1.0)
        assert_allclose(dirichlet_eigenvalue(SystemParams(0, 0, 0), 3), -9 * math.pi**2)

    def test_strictly_decreasing(self):
        p = SystemParams(0, 0, 1.5)
        vals = [dirichlet_eigenvalue(p, n) for n in range(1, 30)]
        assert np.all(np.diff(vals) < 0)

    def test_n_validated(self):
        with pytest.raises(ValueError):
            dirichlet_eigenvalue(SystemParams(0, 0, 0), 0)


class TestSearchWindow:
    def test_validation(self):
        with pytest.raises(ValueError):
            SearchWindow(1.0, -1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            SearchWindow(-1.0, 1.0, 1.0, -1.0)
        with pytest.raises(ValueError):
            SearchWindow(-1.0, 1.0, -1.0, 1.0, grid_density=2)


class TestFindSpectrum:
    def test_markovian_contains_zero(self):
        rep = find_spectrum(SystemParams(0, 0, 0), SearchWindow(-1, 1, -1, 1))
        assert any(abs(z) <= 1e-10 for z in rep.roots)

    def test_stable_case_no_nonnegative_roots(self):
        rep = find_spectrum(SystemParams(-1, -1, 0), SearchWindow(-1, 1, -1, 1))
        assert all(z.real < 0 for z in rep.roots)
        assert rep.verdict in ("UES", "Undetermined")

    def test_symmetric_case_roots_real(self):
        # k=0 with equal real coefficients: self-adjoint, spectrum real
        rep = find_spectrum(SystemParams(-1, -1, 0), SearchWindow(-100, 2, -3, 3, 4))
        assert rep.roots
        assert max(abs(z.imag) for z in rep.roots) <= 1e-10

    def test_residual_bound_holds(self):
        p = SystemParams(1, -2, 1)
        rep = find_spectrum(p, SearchWindow(-100, 5, -3, 3, 4))
        for z, r in zip(rep.roots, rep.residuals):
            assert r <= 1e-10 * (1 + abs(z))

    def test_sigma_d_reported_separately(self):
        p = SystemParams(-1, -1, 0)
        rep = find_spectrum(p, SearchWindow(-50, 0, -1, 1, 4))
        expected = [dirichlet_eigenvalue(p, n) for n in (1, 2)]
        assert_allclose(sorted(rep.sigma_d_points), sorted(expected))
        # the Dirichlet eigenvalues are not listed among the roots
        for s in rep.sigma_d_points:
            assert all(abs(z - s) > 1e-6 for z in rep.roots)

    def test_degenerate_point_membership(self):
        # alpha = beta = 0, k = 0: the double-root point lam = 0 satisfies
        # the quartic condition and must be reported
        rep = find_spectrum(SystemParams(0, 0, 0), SearchWindow(-0.5, 0.5, -0.5, 0.5))
        assert any(abs(z) <= 1e-12 for z in rep.roots)


class TestRealSpectralBound:
    def test_markovian_zero(self):
        assert abs(real_spectral_bound(SystemParams(0, 0, 0))) <= 1e-9

    def test_stable_case_negative_and_matches_discrete(self):
        p = SystemParams(-1, -1, 0)
        bound = real_spectral_bound(p)
        assert bound < 0
        top = discrete_spectrum(assemble(p, 256))[0]
        assert abs(bound - top.real) <= 5e-3

    def test_unstable_case_positive_and_matches_discrete(self):
        p = SystemParams(3, 3, 0)
        bound = real_spectral_bound(p)
        assert bound > 0
        top = discrete_spectrum(assemble(p, 256))[0]
        assert abs(bound - top.real) <= 5e-3

    def test_is_a_root(self):
        p = SystemParams(0.7, -1.3, 0.5)
        bound = real_spectral_bound(p)
        assert abs(char_det(p, bound)) <= 1e-9

    def test_requires_real_coefficients(self):
        with pytest.raises(ValueError):
            real_spectral_bound(SystemParams(1j, 0, 0))


class TestClassify:
    def test_stable_selfadjoint_case(self):
        v = classify(SystemParams(-1, -1, 0))
        assert v.ues and v.contractive and v.selfadjoint and not v.markovian
        assert v.method == "ClosedForm"

    def test_markovian_case(self):
        v = classify(SystemParams(0, 0, 0))
        assert v.markovian and not v.ues

    def test_contractive_with_transport(self):
        # k/2 = 0.5 sits between alpha = 0.4 and -beta = 0.6
        v = classify(SystemParams(0.4, -0.6, 1.0))
        assert v.contractive
        assert not v.selfadjoint

    def test_transport_breaks_selfadjointness(self):
        assert not classify(SystemParams(-1, -1, 1.0)).selfadjoint

    def test_complex_coefficients_fall_back_to_spectral_bound(self):
        v = classify(SystemParams(-1 + 0.3j, -1, 0))
        assert v.method == "SpectralBound"
        assert not v.selfadjoint

    def test_closed_form_requires_real(self):
        with pytest.raises(ValueError):
            ues_closed_form(SystemParams(1j, 0, 0))

    @pytest.mark.parametrize("k", [0.0, 1.0])
    def test_closed_form_agrees_with_spectral_bound(self, k):
        # dual computation on a coarse coefficient grid
        for a in np.linspace(-2.5, 2.5, 6):
            for b in np.linspace(-2.5, 2.5, 6):
                p = SystemParams(a, b, k)
                bound = real_spectral_bound(p)
                if abs(bound) <= 1e-6:
                    continue
                assert ues_closed_form(p) == (bound < 0), (a, b, k, bound)


class TestStabilityInequalities:
    def test_half_corrected_eigenvalue_k0(self, rng):
        # the top eigenvalue of [[a-1, 1], [1, b-1]] is
        # (a + b - 2 + sqrt((a-b)^2 + 4)) / 2; stability is its negativity
        for _ in range(200):
            a, b = rng.uniform(-4, 4, 2)
            top = max(np.linalg.eigvalsh([[a - 1, 1], [1, b - 1]]))
            formula = (a + b - 2 + math.sqrt((a - b) ** 2 + 4)) / 2
            assert_allclose(top, formula, rtol=1e-12, atol=1e-12)
            if abs(top) > 1e-9:
                assert ues_closed_form(SystemParams(a, b, 0)) == (top < 0)

    def test_quadratic_discriminant_positive_for_k_positive(self):
        # (a - b - k)^2 + 4 k^2 e^{-k} (1-e^{-k})^{-2} > 0 on the whole grid
        for k in (0.5, 1.0, 2.0):
            e = math.exp(-k)
            for a in np.linspace(-3, 3, 41):
                for b in np.linspace(-3, 3, 41):
                    disc = (a - b - k) ** 2 + 4 * k**2 * e / (1 - e) ** 2
                    assert disc > 0

    def test_k_positive_form_handles_negative_denominator(self):
        # alpha = beta = -3, k = 1: the naive inequality chain with the
        # denominator beta + alpha e^{-k} < 0 would misclassify; both
        # quadratic coefficients are positive, so the system is stable
        p = SystemParams(-3, -3, 1.0)
        assert ues_closed_form(p)
        assert real_spectral_bound(p) < 0
