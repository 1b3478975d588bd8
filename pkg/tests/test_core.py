import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qobserver.core import (
    J2,
    HamiltonianSpec,
    QuadratureSystem,
    build_system,
    check_physical_realizability,
    drift_spectrum,
    symplectic,
)


def test_symplectic_identities():
    for n in (1, 2, 3):
        J = symplectic(n)
        assert np.array_equal(J.T, -J)
        assert np.array_equal(J @ J, -np.eye(2 * n))


def test_symplectic_rejects_bad_mode_count():
    with pytest.raises(ValueError):
        symplectic(0)


class TestBuildSystem:
    def test_observer_family(self):
        # R = w*I, W = sqrt(k)*I with k=2, w=1
        sys = build_system(HamiltonianSpec(R=np.eye(2), W=np.sqrt(2) * np.eye(2)))
        assert np.allclose(sys.A, [[-1.0, 2.0], [-2.0, -1.0]], atol=1e-14)
        assert np.allclose(sys.B, -np.sqrt(2) * np.eye(2), atol=1e-14)
        assert np.allclose(sys.C, np.sqrt(2) * np.eye(2), atol=1e-14)

    def test_uncoupled_static_system(self):
        sys = build_system(HamiltonianSpec(R=np.zeros((2, 2)), W=np.zeros((2, 2))))
        assert np.array_equal(sys.A, np.zeros((2, 2)))
        assert np.array_equal(sys.B, np.zeros((2, 2)))
        assert np.array_equal(sys.C, np.zeros((2, 2)))

    def test_offdiagonal_hamiltonian(self):
        # Hand multiplication: 2JR = [[2,0],[0,-2]], (1/2)J W^T J W = -(1/2)I.
        R = np.array([[0.0, 1.0], [1.0, 0.0]])
        sys = build_system(HamiltonianSpec(R=R, W=np.eye(2)))
        assert np.allclose(sys.A, [[1.5, 0.0], [0.0, -2.5]], atol=1e-14)
        assert np.allclose(sys.B, -np.eye(2), atol=1e-14)

    def test_rejects_nonsymmetric_R(self):
        with pytest.raises(ValueError, match="symmetric"):
            HamiltonianSpec(R=np.array([[0.0, 1.0], [0.0, 0.0]]), W=np.eye(2))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            HamiltonianSpec(R=np.zeros((2, 2)), W=np.zeros((2, 4)))


class TestRealizability:
    def test_observer_family_passes(self):
        sys = build_system(HamiltonianSpec(R=np.eye(2), W=np.sqrt(2) * np.eye(2)))
        rep = check_physical_realizability(sys)
        assert rep.passed
        assert rep.commutation_residual <= 1e-14
        assert rep.gain_residual <= 1e-14

    def test_identity_drift_fails(self):
        # AJ + JA^T = tr(A) J, so A = I gives residual 2.
        sys = QuadratureSystem(
            A=np.eye(2), B=np.zeros((2, 2)), C=np.zeros((2, 2)), n_modes=1, n_channels=1
        )
        rep = check_physical_realizability(sys)
        assert not rep.passed
        assert rep.commutation_residual == pytest.approx(2.0)

    def test_closed_oscillator_passes(self):
        sys = QuadratureSystem(
            A=2.0 * J2, B=np.zeros((2, 2)), C=np.zeros((2, 2)), n_modes=1, n_channels=1
        )
        assert check_physical_realizability(sys).passed


class TestDriftSpectrum:
    def test_damped_rotation(self):
        sys = QuadratureSystem(
            A=np.array([[-1.0, 2.0], [-2.0, -1.0]]),
            B=np.zeros((2, 2)), C=np.zeros((2, 2)), n_modes=1, n_channels=1,
        )
        eigs, hurwitz = drift_spectrum(sys)
        assert hurwitz
        assert sorted(np.round(eigs, 12)) == [(-1 - 2j), (-1 + 2j)]

    def test_zero_drift_not_hurwitz(self):
        sys = QuadratureSystem(
            A=np.zeros((2, 2)), B=np.zeros((2, 2)), C=np.zeros((2, 2)),
            n_modes=1, n_channels=1,
        )
        eigs, hurwitz = drift_spectrum(sys)
        assert not hurwitz
        assert np.allclose(eigs, 0.0)

    @pytest.mark.parametrize("kappa,omega", [(0.5, 0.0), (1.0, 2.0), (4.0, 0.3), (10.0, 7.0)])
    def test_observer_family_closed_form(self, kappa, omega):
        sys = build_system(
            HamiltonianSpec(R=omega * np.eye(2), W=np.sqrt(kappa) * np.eye(2))
        )
        eigs, _ = drift_spectrum(sys)
        assert np.max(np.abs(np.sort(eigs.real) - [-kappa / 2, -kappa / 2])) <= 1e-10
        assert np.max(np.abs(np.sort(eigs.imag) - np.sort([2 * omega, -2 * omega]))) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=3),
    m=st.integers(min_value=0, max_value=3),
    data=st.data(),
)
def test_build_system_is_physically_realizable(n, m, data):
    elems = st.floats(min_value=-10, max_value=10, allow_nan=False)
    R_raw = data.draw(arrays(np.float64, (2 * n, 2 * n), elements=elems))
    R = 0.5 * (R_raw + R_raw.T)
    W = data.draw(arrays(np.float64, (2 * m, 2 * n), elements=elems))
    sys = build_system(HamiltonianSpec(R=R, W=W))
    rep = check_physical_realizability(sys, tolerance=1e-12)
    assert rep.passed, (rep.commutation_residual, rep.gain_residual)


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_drift_linear_in_R_for_fixed_W(data):
    # Integer-valued entries keep every intermediate exact, so the linearity
    # defect can be asserted to be identically zero.
    elems = st.integers(min_value=-5, max_value=5).map(float)
    draw_sym = lambda: 0.5 * (lambda M: M + M.T)(
        data.draw(arrays(np.float64, (2, 2), elements=elems))
    )
    R1, R2 = draw_sym(), draw_sym()
    W = data.draw(arrays(np.float64, (2, 2), elements=elems))

    def A(R):
        return build_system(HamiltonianSpec(R=R, W=W)).A

    lhs = A(R1 + R2) - A(R1) - A(R2) + A(np.zeros((2, 2)))
    assert np.max(np.abs(lhs)) == 0.0
