"""Conditional states and the characteristic response function."""

import io
import math

import numpy as np
import pytest

from qnckit.characteristic import (
    char_batch,
    char_components,
    char_components_bloch,
    char_surface,
    conditional_state,
    pure_state_component,
    schmidt_pure_state,
    surface_to_csv,
)
from qnckit.matrix_core import (
    DensityMatrix,
    apply_local_unitary,
    kron,
    random_density_matrix,
    random_unitary,
    trace_norm,
)
from qnckit.measurement import MeasurementParams, projector_from_params

RNG = np.random.default_rng(99)


def classical_mixture() -> DensityMatrix:
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 0.5
    m[3, 3] = 0.5
    return DensityMatrix(m, split=(2, 2))


def random_two_qubit(rng=RNG) -> DensityMatrix:
    return random_density_matrix(4, rng, split=(2, 2))


def random_qubit_params(rng=RNG, margin=0.1) -> MeasurementParams:
    return MeasurementParams(
        2, (rng.uniform(margin, math.pi - margin),), (rng.uniform(margin, 2 * math.pi - margin),)
    )


class TestConditionalState:
    def test_product_state_conditions_to_b_factor(self):
        ra = random_density_matrix(2, RNG)
        rb = random_density_matrix(2, RNG)
        rho = DensityMatrix(kron(ra.matrix, rb.matrix), split=(2, 2))
        m = projector_from_params(random_qubit_params())
        p, cond = conditional_state(rho, m)
        assert p > 0
        assert np.max(np.abs(cond.matrix - rb.matrix)) <= 1e-12

    def test_schmidt_state_closed_form(self):
        alpha, gamma, theta, phi = 0.5, 1.2, 0.9, 2.1
        rho = schmidt_pure_state(alpha, gamma)
        p, cond = conditional_state(rho, projector_from_params(MeasurementParams(2, (theta,), (phi,))))
        expect_p = math.cos(alpha) ** 2 * math.cos(theta) ** 2 + math.sin(alpha) ** 2 * math.sin(theta) ** 2
        ket = np.array(
            [
                math.cos(alpha) * math.cos(theta),
                math.sin(alpha) * math.sin(theta) * np.exp(1j * (gamma - phi)),
            ]
        )
        ket = ket / np.linalg.norm(ket)
        assert p == pytest.approx(expect_p, abs=1e-12)
        assert np.max(np.abs(cond.matrix - np.outer(ket, ket.conj()))) <= 1e-12

    def test_classical_mixture_conditional(self):
        theta = 0.8
        p, cond = conditional_state(
            classical_mixture(), projector_from_params(MeasurementParams(2, (theta,), (0.0,)))
        )
        assert p == pytest.approx(0.5, abs=1e-12)
        expect = np.diag([math.cos(theta) ** 2, math.sin(theta) ** 2]).astype(complex)
        assert np.max(np.abs(cond.matrix - expect)) <= 1e-12

    def test_zero_probability_is_undefined(self):
        rho = DensityMatrix.from_ket([1, 0, 0, 0], split=(2, 2))  # |00>
        m = projector_from_params(MeasurementParams(2, (math.pi / 2,), (0.0,)))  # onto |1>
        p, cond = conditional_state(rho, m)
        assert p <= 1e-12 and cond is None


class TestComponents:
    def test_product_state_components_vanish(self):
        ra = random_density_matrix(2, RNG)
        rb = random_density_matrix(2, RNG)
        rho = DensityMatrix(kron(ra.matrix, rb.matrix), split=(2, 2))
        s = char_components(rho, random_qubit_params())
        assert s.defined
        assert np.max(s.components) <= 1e-12

    def test_maximally_entangled_components_are_unity(self):
        rho = schmidt_pure_state(math.pi / 4)
        for _ in range(5):
            s = char_components(rho, random_qubit_params())
            assert np.allclose(s.components, [1.0, 1.0], atol=1e-10)

    def test_pi_thirds_value_at_equator(self):
        """theta = pi/2 is a pole of the phi direction (the projector is
        stationary there), so that component is zero-flagged; the theta
        component carries the closed-form value sqrt(3)/3, and both
        components do just off the pole."""
        rho = schmidt_pure_state(math.pi / 3)
        expect = math.sqrt(3) / 3
        assert expect == pytest.approx(2 * math.sin(2 * math.pi / 3) / 3, abs=1e-12)
        s = char_components(rho, MeasurementParams(2, (math.pi / 2,), (1.0,)))
        assert s.components[0] == pytest.approx(expect, abs=1e-10)
        assert bool(s.pole_mask[1]) and s.components[1] == 0.0
        near = char_components(rho, MeasurementParams(2, (math.pi / 2 - 1e-4,), (1.0,)))
        assert np.allclose(near.components, [expect] * 2, atol=1e-6)

    @pytest.mark.parametrize("alpha", [math.pi / 8, math.pi / 4, math.pi / 3])
    @pytest.mark.parametrize("gamma", [0.0, 1.0])
    def test_closed_form_on_grid(self, alpha, gamma):
        rho = schmidt_pure_state(alpha, gamma)
        k = 16
        th = (np.arange(k) + 0.5) * math.pi / k
        ph = (np.arange(k) + 0.5) * 2 * math.pi / k
        tt, pp = np.meshgrid(th, ph, indexing="ij")
        b = char_batch(rho, tt.ravel()[:, None], pp.ravel()[:, None])
        expect = np.array([pure_state_component(alpha, t) for t in tt.ravel()])
        assert np.max(np.abs(b.components[:, 0] - expect)) <= 1e-9
        assert np.max(np.abs(b.components[:, 1] - expect)) <= 1e-9

    def test_magnitude_is_euclidean_norm(self):
        rho = random_two_qubit()
        s = char_components(rho, random_qubit_params())
        assert s.magnitude**2 == pytest.approx(float(np.sum(s.components**2)), abs=1e-10)

    def test_pole_components_flagged_zero(self):
        rho = random_two_qubit()
        s = char_components(rho, MeasurementParams(2, (0.0,), (0.3,)))
        assert bool(s.pole_mask[1])
        assert s.components[1] == 0.0

    def test_finite_difference_cross_check(self):
        """Response ratios from trace norms of finite state differences."""
        h = 1e-5
        for _ in range(10):
            rho = random_two_qubit()
            prm = random_qubit_params(margin=0.3)
            s = char_components(rho, prm)
            if s.p < 1e-6:
                continue
            for idx, kind in ((0, "theta"), (1, "phi")):
                def cond_at(t, f):
                    _, c = conditional_state(
                        rho, projector_from_params(MeasurementParams(2, (t,), (f,)))
                    )
                    return c.matrix

                t0, f0 = prm.thetas[0], prm.phis[0]
                if kind == "theta":
                    dc = cond_at(t0 + h, f0) - cond_at(t0 - h, f0)
                    dm = (
                        projector_from_params(MeasurementParams(2, (t0 + h,), (f0,))).matrix
                        - projector_from_params(MeasurementParams(2, (t0 - h,), (f0,))).matrix
                    )
                else:
                    dc = cond_at(t0, f0 + h) - cond_at(t0, f0 - h)
                    dm = (
                        projector_from_params(MeasurementParams(2, (t0,), (f0 + h,))).matrix
                        - projector_from_params(MeasurementParams(2, (t0,), (f0 - h,))).matrix
                    )
                fd = trace_norm(dc) / trace_norm(dm)
                assert abs(fd - s.components[idx]) <= 1e-6


class TestBlochForm:
    def test_agreement_with_trace_norm_form(self):
        for _ in range(100):
            rho = random_two_qubit()
            prm = random_qubit_params()
            a = char_components(rho, prm)
            b = char_components_bloch(rho, prm)
            assert np.max(np.abs(a.components - b.components)) <= 1e-9

    def test_product_state_zero(self):
        ra = random_density_matrix(2, RNG)
        rb = random_density_matrix(2, RNG)
        rho = DensityMatrix(kron(ra.matrix, rb.matrix), split=(2, 2))
        s = char_components_bloch(rho, random_qubit_params())
        assert np.max(s.components) <= 1e-12

    def test_maximally_entangled_unity(self):
        s = char_components_bloch(schmidt_pure_state(math.pi / 4), random_qubit_params())
        assert np.allclose(s.components, [1.0, 1.0], atol=1e-10)

    def test_requires_two_qubit_split(self):
        rho = random_density_matrix(6, RNG, split=(2, 3))
        with pytest.raises(ValueError):
            char_components_bloch(rho, random_qubit_params())


class TestSurface:
    def test_b_side_unitary_leaves_surface_pointwise_invariant(self):
        rho = random_two_qubit()
        rotated = apply_local_unitary(rho, None, random_unitary(2, RNG))
        b1 = char_surface(rho, 24, as_batch=True)
        b2 = char_surface(rotated, 24, as_batch=True)
        assert np.max(np.abs(b1.magnitude - b2.magnitude)) <= 1e-10

    def test_row_major_ordering_and_shape(self):
        rho = schmidt_pure_state(0.7)
        samples = char_surface(rho, 4)
        assert len(samples) == 16
        assert samples[0].params.thetas[0] == pytest.approx(0.0)
        assert samples[1].params.thetas[0] == pytest.approx(0.0)
        assert samples[1].params.phis[0] > samples[0].params.phis[0]
        assert samples[4].params.thetas[0] > samples[0].params.thetas[0]

    def test_csv_schema_and_roundtrip(self):
        rho = schmidt_pure_state(0.6)
        batch = char_surface(rho, 8, as_batch=True)
        text = surface_to_csv(batch, 2)
        lines = text.strip().split("\n")
        assert lines[0] == "theta_1,phi_1,p,F_theta_1,F_phi_1,F_mag,defined"
        assert len(lines) == 65
        data = np.genfromtxt(io.StringIO(text), delimiter=",", skip_header=1)
        assert data.shape == (64, 7)
        back = data[:, 2]
        assert np.max(np.abs(back - batch.p)) <= 1e-15  # 17 digits round-trip

    def test_undefined_samples_marked(self):
        rho = DensityMatrix.from_ket([1, 0, 0, 0], split=(2, 2))
        batch = char_surface(rho, 5, as_batch=True)
        undefined = ~batch.defined
        assert np.any(undefined)
        assert np.all(batch.magnitude[undefined] == 0.0)

    def test_pi_thirds_surface_magnitude_matches_closed_form(self):
        rho = schmidt_pure_state(math.pi / 3)
        batch = char_surface(rho, 64, closed=False, as_batch=True)
        expect = np.array([pure_state_component(math.pi / 3, t) for t in batch.thetas[:, 0]])
        assert np.max(np.abs(batch.magnitude - math.sqrt(2) * expect)) <= 1e-9

    def test_probabilities_stay_in_range(self):
        for _ in range(5):
            batch = char_surface(random_two_qubit(), 12, as_batch=True)
            assert np.all(batch.p >= -1e-12)
            assert np.all(batch.p <= 1 + 1e-12)

    def test_oversized_grid_rejected(self):
        rho = random_density_matrix(8, RNG, split=(4, 2))
        with pytest.raises(ValueError, match="points"):
            char_surface(rho, 64)
