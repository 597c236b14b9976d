"""Field-core tests: exact special functions, evaluation, and expansion coefficients.

High-precision oracles come from mpmath (half-integer Bessel functions at 40
digits); frozen literals below were computed once from those oracles and are
asserted directly.
"""

import math

import mpmath
import numpy as np
import pytest

from holoray import (
    Direction,
    DomainError,
    FarFieldExpansion,
    MultipoleSpectrum,
    OutOfRegionError,
    RadiatingField,
    UnsupportedDegreeError,
    WaveVector,
    aw_coefficients,
    eval_aw,
    eval_radiated,
    eval_total,
    intensity,
    sph_hankel1,
    sph_harmonic,
)
from holoray.fields import MAX_HANKEL_DEGREE, PHASE_GAUGED, PHASE_RAW

from conftest import random_field


def hankel_oracle(l: int, z: float) -> complex:
    """First-kind spherical Hankel via mpmath half-order Bessel functions."""
    with mpmath.workdps(40):
        zz = mpmath.mpf(z)
        scale = mpmath.sqrt(mpmath.pi / (2 * zz))
        jl = scale * mpmath.besselj(l + mpmath.mpf("0.5"), zz)
        yl = scale * mpmath.bessely(l + mpmath.mpf("0.5"), zz)
        return complex(jl + 1j * yl)


class TestSphHankel1:
    @pytest.mark.parametrize("l", range(9))
    @pytest.mark.parametrize("z", [0.5, 1.0, math.pi, 10.0, 1e3, 1e6])
    def test_matches_high_precision_oracle(self, l, z):
        got = sph_hankel1(l, z)
        want = hankel_oracle(l, z)
        assert abs(got - want) <= 1e-13 * abs(want)

    def test_order_zero_at_pi(self):
        # e^{i pi}/(i pi) = i/pi
        got = sph_hankel1(0, math.pi)
        assert abs(got - 0.3183098861837907j) <= 1e-15

    def test_order_one_at_pi(self):
        got = sph_hankel1(1, math.pi)
        want = 0.3183098861837907 + 0.10132118364233778j
        assert abs(got - want) <= 1e-15

    def test_far_magnitude_is_reciprocal(self):
        # |h_0(z)| = 1/z exactly for real z
        assert abs(sph_hankel1(0, 1e6)) == pytest.approx(1e-6, rel=1e-15)

    @pytest.mark.parametrize("z", [0.0, -1.0, -math.pi])
    def test_nonpositive_argument_rejected(self, z):
        with pytest.raises(DomainError):
            sph_hankel1(0, z)

    def test_degree_cap(self):
        assert sph_hankel1(MAX_HANKEL_DEGREE, 5.0) is not None
        with pytest.raises(UnsupportedDegreeError):
            sph_hankel1(MAX_HANKEL_DEGREE + 1, 5.0)

    def test_negative_degree_rejected(self):
        with pytest.raises(DomainError):
            sph_hankel1(-1, 1.0)


class TestSphHarmonic:
    def test_monopole_is_constant(self):
        want = 0.28209479177387814  # 1/sqrt(4 pi)
        for u in [(0, 0, 1), (1, 0, 0), (0.6, 0.0, 0.8)]:
            assert sph_harmonic(0, 0, Direction(u)) == pytest.approx(want, abs=1e-15)

    def test_polar_dipole(self):
        # sqrt(3/(4 pi)) cos(theta)
        c = math.sqrt(3 / (4 * math.pi))
        assert sph_harmonic(1, 0, Direction((0, 0, 1))) == pytest.approx(c, abs=1e-14)
        assert sph_harmonic(1, 0, Direction((1, 0, 0))) == pytest.approx(0.0, abs=1e-14)
        u = Direction((math.sqrt(3) / 2, 0, 0.5))
        assert sph_harmonic(1, 0, u) == pytest.approx(c / 2, abs=1e-14)

    def test_condon_shortley_sign(self):
        # Y_{1,1} on the equator at azimuth zero is real and negative.
        val = sph_harmonic(1, 1, Direction((1, 0, 0)))
        assert val.real < 0
        assert abs(val.imag) <= 1e-15
        assert val.real == pytest.approx(-math.sqrt(3 / (8 * math.pi)), abs=1e-14)

    def test_negative_order_conjugation(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            v = rng.normal(size=3)
            u = Direction(v)
            for l in range(1, 5):
                for m in range(1, l + 1):
                    plus = sph_harmonic(l, m, u)
                    minus = sph_harmonic(l, -m, u)
                    assert abs(minus - (-1) ** m * np.conj(plus)) <= 1e-13

    def test_orthonormality_under_quadrature(self):
        # Gauss-Legendre in cos(theta) x uniform azimuth integrates products
        # of harmonics up to degree 4 exactly (up to roundoff).
        nodes, weights = np.polynomial.legendre.leggauss(16)
        n_phi = 32
        phis = 2 * math.pi * np.arange(n_phi) / n_phi
        pairs = [(l, m) for l in range(5) for m in range(-l, l + 1)]
        values = {}
        for l, m in pairs:
            grid = np.empty((len(nodes), n_phi), dtype=complex)
            for i, ct in enumerate(nodes):
                st = math.sqrt(1 - ct * ct)
                for j, phi in enumerate(phis):
                    u = Direction((st * math.cos(phi), st * math.sin(phi), ct))
                    grid[i, j] = sph_harmonic(l, m, u)
            values[(l, m)] = grid
        w = weights[:, None] * (2 * math.pi / n_phi)
        for a in pairs:
            for b in pairs:
                inner = np.sum(np.conj(values[a]) * values[b] * w)
                want = 1.0 if a == b else 0.0
                assert abs(inner - want) <= 1e-12

    def test_order_out_of_range_rejected(self):
        with pytest.raises(DomainError):
            sph_harmonic(1, 2, Direction((0, 0, 1)))
        with pytest.raises(DomainError):
            sph_harmonic(0, -1, Direction((0, 0, 1)))


class TestEvalRadiated:
    def test_monopole_on_axis(self, monopole):
        got = eval_radiated(monopole, (0.0, 0.0, math.pi))
        # h_0(pi) Y_00 = (i/pi) / sqrt(4 pi)
        want = 0.08979356106258328j
        assert abs(got - want) <= 1e-15

    def test_zero_spectrum_evaluates_to_zero(self, zero_field):
        assert eval_radiated(zero_field, (3.0, 4.0, 5.0)) == 0

    def test_translation_covariance(self, monopole):
        shifted = RadiatingField(monopole.spectrum, monopole.kappa, center=(1.0, -2.0, 0.5))
        x = np.array([5.0, 1.0, 2.0])
        got = eval_radiated(shifted, x)
        want = eval_radiated(monopole, x - np.array([1.0, -2.0, 0.5]))
        assert abs(got - want) <= 1e-15

    def test_inside_exclusion_ball_rejected(self, monopole):
        with pytest.raises(OutOfRegionError):
            eval_radiated(monopole, (0.5, 0.0, 0.0))

    def test_linearity_in_spectrum(self):
        rng = np.random.default_rng(3)
        a = random_field(rng, 3)
        b = random_field(rng, 3)
        bmap = {(l, m): c for l, m, c in b.spectrum.items()}
        summed = {(l, m): c + bmap[(l, m)] for l, m, c in a.spectrum.items()}
        c = RadiatingField(MultipoleSpectrum(summed), 1.0)
        x = (2.0, -1.0, 3.0)
        lhs = eval_radiated(c, x)
        rhs = eval_radiated(a, x) + eval_radiated(b, x)
        assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(rhs))

    def test_kappa_scales_argument(self):
        f1 = RadiatingField(MultipoleSpectrum({(0, 0): 1.0}), 2.0, r_min=0.5)
        got = eval_radiated(f1, (0.0, 0.0, math.pi / 2))
        want = eval_radiated(RadiatingField(MultipoleSpectrum({(0, 0): 1.0}), 1.0), (0.0, 0.0, math.pi))
        assert abs(got - want) <= 1e-15


class TestEvalTotalAndIntensity:
    def test_total_adds_plane_wave(self, monopole, wave_z):
        x = (0.0, 0.0, math.pi)
        got = eval_total(monopole, wave_z, x)
        # e^{i pi . 1} has x3 = pi so e^{i pi} = -1; plus radiated part
        want = -1.0 + 0.08979356106258328j
        assert abs(got - want) <= 1e-15

    def test_intensity_is_squared_modulus(self, monopole, wave_z):
        x = (0.0, 0.0, math.pi)
        got = intensity(monopole, wave_z, x)
        assert got == pytest.approx(1.0080628836082997, abs=1e-13)
        assert got == pytest.approx(abs(eval_total(monopole, wave_z, x)) ** 2, abs=1e-15)

    def test_zero_spectrum_gives_unit_intensity(self, zero_field, wave_z):
        rng = np.random.default_rng(5)
        for _ in range(10):
            x = rng.normal(size=3) * 10
            if np.linalg.norm(x) <= 1.0:
                continue
            assert intensity(zero_field, wave_z, x) == pytest.approx(1.0, abs=1e-15)

    def test_intensity_nonnegative(self, wave_z):
        rng = np.random.default_rng(7)
        field = random_field(rng, 2)
        for _ in range(25):
            x = rng.normal(size=3)
            x *= (2.0 + rng.uniform(0, 10)) / np.linalg.norm(x)
            assert intensity(field, wave_z, x) >= 0.0

    def test_wavenumber_mismatch_rejected(self, monopole):
        k = WaveVector((0.0, 0.0, 2.0))
        with pytest.raises(DomainError):
            eval_total(monopole, k, (0.0, 0.0, 5.0))


class TestHelmholtzResidual:
    def test_radiated_field_satisfies_equation(self):
        # Central second differences: residual |lap + kappa^2 psi| stays small
        # relative to kappa^2 |psi| at exterior points.
        rng = np.random.default_rng(20260819)
        field = random_field(rng, 4)
        h = 1e-3
        checked = 0
        while checked < 20:
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            x = u * rng.uniform(2.0, 20.0)
            psi = eval_radiated(field, x)
            if abs(psi) < 1e-3:
                continue
            lap = 0.0
            for axis in range(3):
                step = np.zeros(3)
                step[axis] = h
                lap += eval_radiated(field, x + step) - 2 * psi + eval_radiated(field, x - step)
            lap /= h * h
            residual = abs(lap + field.kappa**2 * psi) / (field.kappa**2 * abs(psi))
            assert residual <= 1e-5
            checked += 1


class TestAwCoefficients:
    def test_monopole_leading_coefficient(self, monopole):
        exp = aw_coefficients(monopole, Direction((1.0, 0.0, 0.0)), 1)
        want = -0.28209479177387814j  # (-i) / sqrt(4 pi)
        assert abs(exp.coeffs[0] - want) <= 1e-15
        assert exp.phase_convention == PHASE_RAW
        assert exp.frame_origin == (0.0, 0.0, 0.0)

    def test_polar_dipole_pair(self, dipole):
        u = Direction((math.sqrt(3) / 2, 0.0, 0.5))
        coeffs = aw_coefficients(dipole, u, 2).coeffs
        c = math.sqrt(3 / (4 * math.pi)) / 2
        assert abs(coeffs[0] - (-c)) <= 1e-15
        assert abs(coeffs[1] - (-1j * c)) <= 1e-15

    def test_zero_spectrum_gives_zeros(self, zero_field):
        coeffs = aw_coefficients(zero_field, Direction((0.0, 1.0, 0.0)), 4).coeffs
        assert coeffs == (0j, 0j, 0j, 0j)

    def test_order_cap_truncates(self, dipole):
        # Degree-1 spectrum contributes nothing beyond the second coefficient.
        coeffs = aw_coefficients(dipole, Direction((0.0, 0.0, 1.0)), 5).coeffs
        assert all(c == 0 for c in coeffs[2:])

    def test_positive_count_required(self, monopole):
        with pytest.raises(DomainError):
            aw_coefficients(monopole, Direction((1.0, 0.0, 0.0)), 0)

    def test_least_squares_fit_agrees(self):
        # Independent route: fit the outgoing radial profile
        # psi_1(s u) ~ (e^{i kappa s}/s) sum_j f_j s^{1-j}
        # by least squares over many radii and compare to the closed form.
        rng = np.random.default_rng(90)
        field = random_field(rng, 3)
        u = Direction(rng.normal(size=3))
        J = 4
        radii = np.geomspace(20.0, 2000.0, 16)
        rows = []
        rhs = []
        for s in radii:
            phase = np.exp(1j * field.kappa * s) / s
            rows.append([phase * s ** (1 - j) for j in range(1, J + 1)])
            rhs.append(eval_radiated(field, s * u.as_array()))
        fit, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        closed = aw_coefficients(field, u, J).coeffs
        for a, b in zip(fit, closed):
            assert abs(a - b) <= 1e-8


class TestEvalAw:
    def test_expansion_is_exact_for_finite_spectra(self):
        # With J = max degree + 1 the radial expansion terminates, so it must
        # reproduce the field on the ray to roundoff for every s >= 2 r_min.
        rng = np.random.default_rng(21)
        for max_degree in (0, 2, 5, 8):
            field = random_field(rng, max_degree)
            u = Direction(rng.normal(size=3))
            exp = aw_coefficients(field, u, max_degree + 1)
            k = WaveVector((0.0, 0.0, 1.0))
            for s in (2.0, 5.0, 37.0, 1e3):
                want = eval_radiated(field, s * u.as_array())
                got = eval_aw(exp, k, s)
                assert abs(got - want) <= 1e-12 * abs(want) + 1e-300

    def test_dipole_two_terms_suffice(self, dipole, wave_z):
        u = Direction((0.0, 0.0, 1.0))
        exp = aw_coefficients(dipole, u, 2)
        want = eval_radiated(dipole, (0.0, 0.0, 10.0))
        assert abs(eval_aw(exp, wave_z, 10.0) - want) <= 1e-13

    def test_empty_expansion_is_zero(self, wave_z):
        exp = FarFieldExpansion((0.0, 0.0, 0.0), Direction((1.0, 0.0, 0.0)), (), PHASE_RAW)
        assert eval_aw(exp, wave_z, 5.0) == 0

    def test_nonpositive_radius_rejected(self, wave_z):
        exp = FarFieldExpansion((0.0, 0.0, 0.0), Direction((1.0, 0.0, 0.0)), (1.0,), PHASE_RAW)
        with pytest.raises(DomainError):
            eval_aw(exp, wave_z, 0.0)

    def test_gauged_convention_multiplies_frame_phase(self, wave_z):
        origin = (3.0, -1.0, 2.0)
        u = Direction((0.0, 1.0, 0.0))
        raw = FarFieldExpansion(origin, u, (0.5 - 0.25j,), PHASE_RAW)
        gauged = FarFieldExpansion(origin, u, (0.5 - 0.25j,), PHASE_GAUGED)
        phase = np.exp(1j * np.dot(wave_z.as_array(), origin))
        got = eval_aw(gauged, wave_z, 7.0)
        want = phase * eval_aw(raw, wave_z, 7.0)
        assert abs(got - want) <= 1e-15


class TestRadiationCondition:
    def test_scaled_far_field_magnitude_settles(self):
        # s |psi_1(s u)| varies by well under one percent beyond s = 1e4.
        rng = np.random.default_rng(13)
        field = random_field(rng, 3)
        u = Direction(rng.normal(size=3))
        lead = abs(aw_coefficients(field, u, 1).coeffs[0])
        assert lead > 0.05  # representative ray for this seed
        samples = [s * abs(eval_radiated(field, s * u.as_array()))
                   for s in np.geomspace(1e4, 1e6, 9)]
        spread = (max(samples) - min(samples)) / np.mean(samples)
        assert spread <= 0.01


class TestTypes:
    def test_wave_vector_checks_kappa(self):
        WaveVector((0.0, 0.0, 2.0), kappa=2.0)
        with pytest.raises(DomainError):
            WaveVector((0.0, 0.0, 2.0), kappa=1.0)
        with pytest.raises(DomainError):
            WaveVector((0.0, 0.0, 0.0))

    def test_direction_normalizes(self):
        u = Direction((0.0, 0.0, 10.0))
        assert u.u == (0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            Direction((0.0, 0.0, 0.0))

    def test_spectrum_rejects_bad_orders(self):
        with pytest.raises(DomainError):
            MultipoleSpectrum({(1, 2): 1.0})
        with pytest.raises(DomainError):
            MultipoleSpectrum({(9, 0): 1.0})
        with pytest.raises(DomainError):
            MultipoleSpectrum({(-1, 0): 1.0})

    def test_spectrum_max_degree(self):
        spec = MultipoleSpectrum({(0, 0): 1.0, (3, -2): 2.0})
        assert spec.max_degree == 3
        assert MultipoleSpectrum({}).max_degree == -1

    def test_field_requires_positive_exclusion_radius(self):
        with pytest.raises(DomainError):
            RadiatingField(MultipoleSpectrum({}), 1.0, r_min=0.0)
        with pytest.raises(DomainError):
            RadiatingField(MultipoleSpectrum({}), -1.0)

    def test_expansion_checks_phase_convention(self):
        with pytest.raises(DomainError):
            FarFieldExpansion((0.0, 0.0, 0.0), Direction((1.0, 0.0, 0.0)), (1.0,), "other")
