"""Direct-coupled observer design for a single quantum harmonic oscillator.

The plant is a static oscillator whose scalar variable z_p = C_p x_p is to
be estimated.  The observer is an open single-mode system, Hamiltonian-
coupled to the plant through the rank-one matrix R_c = alpha beta^T with
alpha = C_p^T.  Its output field is read out by homodyne detection of the
quadrature K, chosen here to minimize the measurement noise floor ||K||^2
subject to unit signal gain K e = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import J2, HamiltonianSpec, RealizabilityReport, build_system, check_physical_realizability


@dataclass(frozen=True)
class PlantSpec:
    """Static plant: measured variable z_p = C_p x_p, initial mean of (q_p, p_p)."""

    C_p: np.ndarray
    x_p0_mean: np.ndarray

    def __post_init__(self):
        C_p = np.asarray(self.C_p, dtype=float).reshape(-1)
        x0 = np.asarray(self.x_p0_mean, dtype=float).reshape(-1)
        object.__setattr__(self, "C_p", C_p)
        object.__setattr__(self, "x_p0_mean", x0)
        if C_p.shape != (2,):
            raise ValueError("C_p must be a length-2 row vector")
        if x0.shape != (2,):
            raise ValueError("x_p0_mean must be a length-2 vector")
        if np.allclose(C_p, 0.0):
            raise ValueError("C_p must be nonzero")

    @property
    def z_p(self) -> float:
        """The conserved plant variable at its initial mean."""
        return float(self.C_p @ self.x_p0_mean)


@dataclass(frozen=True)
class ObserverSpec:
    """Observer mode parameters: coupling direction beta, detuning omega_o, damping kappa."""

    beta: np.ndarray
    omega_o: float
    kappa: float
    alpha: np.ndarray | None = None

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        object.__setattr__(self, "beta", beta)
        if beta.shape != (2,):
            raise ValueError("beta must be a length-2 vector")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.omega_o < 0:
            raise ValueError("omega_o must be non-negative")
        if self.alpha is not None:
            alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
            if alpha.shape != (2,):
                raise ValueError("alpha must be a length-2 vector")
            object.__setattr__(self, "alpha", alpha)

    @classmethod
    def coupled_to(cls, plant: PlantSpec, beta, omega_o: float, kappa: float) -> "ObserverSpec":
        """Observer spec with alpha tied to the plant output, alpha = C_p^T."""
        return cls(beta=beta, omega_o=omega_o, kappa=kappa, alpha=plant.C_p.copy())


def observer_drift(obs: ObserverSpec) -> np.ndarray:
    """Observer drift [[-k/2, 2w], [-2w, -k/2]]."""
    k, w = obs.kappa, obs.omega_o
    return np.array([[-k / 2.0, 2.0 * w], [-2.0 * w, -k / 2.0]])


def observer_system(obs: ObserverSpec):
    """The observer as a QuadratureSystem built from R = w*I, W = sqrt(k)*I."""
    spec = HamiltonianSpec(R=obs.omega_o * np.eye(2), W=np.sqrt(obs.kappa) * np.eye(2))
    return build_system(spec)


@dataclass(frozen=True)
class AugmentedSystem:
    """Joint plant-observer system: Hamiltonian matrix and closed-loop state space."""

    R_a: np.ndarray
    A_cl: np.ndarray
    B_cl: np.ndarray
    C_cl: np.ndarray


def build_augmented(plant: PlantSpec, obs: ObserverSpec) -> AugmentedSystem:
    """Closed-loop QSDE matrices of the coupled plant-observer system.

    Plant rows are driven only by the observer (2 J alpha beta^T block); the
    observer sees the plant through 2 J beta alpha^T plus its own damped
    rotation, and only the observer couples to the input field.
    """
    alpha = plant.C_p if obs.alpha is None else obs.alpha
    if obs.alpha is not None and not np.array_equal(obs.alpha, plant.C_p):
        raise ValueError("observer alpha must equal C_p^T for a direct-coupled design")
    beta = obs.beta
    R_c = np.outer(alpha, beta)
    R_a = np.block([[np.zeros((2, 2)), R_c], [R_c.T, obs.omega_o * np.eye(2)]])
    A_o = observer_drift(obs)
    A_cl = np.block([[np.zeros((2, 2)), 2.0 * J2 @ R_c], [2.0 * J2 @ R_c.T, A_o]])
    sk = np.sqrt(obs.kappa)
    B_cl = np.vstack([np.zeros((2, 2)), -sk * np.eye(2)])
    C_cl = np.hstack([np.zeros((2, 2)), sk * np.eye(2)])
    return AugmentedSystem(R_a=R_a, A_cl=A_cl, B_cl=B_cl, C_cl=C_cl)


def zp_invariance_certificate(plant: PlantSpec, obs: ObserverSpec) -> float:
    """Residual of d z_p = 2 alpha^T J alpha beta^T x_o dt = 0.

    Maximum over basis coupling directions of |alpha^T (2 J alpha e_j^T)|;
    zero for every alpha because alpha^T J alpha vanishes identically.
    """
    alpha = plant.C_p
    res = 0.0
    for e_j in np.eye(2):
        block = 2.0 * J2 @ np.outer(alpha, e_j)
        res = max(res, float(np.max(np.abs(alpha @ block))))
    return res


def steady_state_mean(obs: ObserverSpec, z_p: float) -> np.ndarray:
    """Steady-state mean of the observer quadratures for a fixed plant value z_p.

    Closed form (4/(k^2 + 16 w^2)) [[k, 4w], [-4w, k]] J beta z_p, the unique
    solution of A_o x + 2 J beta z_p = 0.
    """
    k, w = obs.kappa, obs.omega_o
    coeff = 4.0 / (k * k + 16.0 * w * w)
    M = np.array([[k, 4.0 * w], [-4.0 * w, k]])
    return coeff * M @ (J2 @ obs.beta) * z_p


def output_drift_vector(obs: ObserverSpec) -> np.ndarray:
    """Signal gain vector e of the integrated output record, dy_o = e z_p dt + noise."""
    return np.sqrt(obs.kappa) * steady_state_mean(obs, 1.0)


@dataclass(frozen=True)
class HomodyneDesign:
    """Measured quadrature K with its noise floor for a given signal vector e."""

    e: np.ndarray
    K: np.ndarray
    noise_intensity: float
    constraint_residual: float


def optimal_quadrature(e: np.ndarray) -> HomodyneDesign:
    """Minimum-noise homodyne quadrature K = e^T/||e||^2 with unit gain K e = 1."""
    e = np.asarray(e, dtype=float).reshape(-1)
    norm_sq = float(e @ e)
    if norm_sq == 0.0:
        raise ValueError("plant unobservable: e = 0")
    K = e / norm_sq
    return HomodyneDesign(
        e=e,
        K=K,
        noise_intensity=float(K @ K),
        constraint_residual=abs(float(K @ e) - 1.0),
    )


def design_quadrature(obs: ObserverSpec) -> HomodyneDesign:
    """Convenience composition: optimal quadrature for the observer's signal vector."""
    return optimal_quadrature(output_drift_vector(obs))


def error_transfer_function(obs: ObserverSpec, omega: float) -> np.ndarray:
    """Noise-to-output map G(jw) = I - k (jw I - A_o)^{-1} of the error system.

    Includes the identity feedthrough of dw_out = sqrt(k) x dt + dw; with it
    the map is all-pass, G G^dagger = I at every frequency.
    """
    A_o = observer_drift(obs)
    S = 1j * omega * np.eye(2) - A_o
    return np.eye(2) - obs.kappa * np.linalg.inv(S)


def default_omega_grid(n: int = 1000) -> np.ndarray:
    """Log-spaced frequency grid over [1e-3, 1e3], mirrored to negatives, plus 0."""
    pos = np.logspace(-3, 3, n // 2)
    return np.concatenate([-pos[::-1], [0.0], pos])


def allpass_residual(obs: ObserverSpec, omegas: np.ndarray | None = None) -> float:
    """Max over the grid of the spectral-norm deviation ||G G^dagger - I||."""
    if omegas is None:
        omegas = default_omega_grid()
    res = 0.0
    for w in omegas:
        G = error_transfer_function(obs, w)
        dev = G @ G.conj().T - np.eye(2)
        res = max(res, float(np.linalg.norm(dev, 2)))
    return res


def steady_state_covariance(obs: ObserverSpec) -> np.ndarray:
    """Steady-state covariance P solving A_o P + P A_o^T + k I = 0; equals I here."""
    A_o = observer_drift(obs)
    if not np.all(np.linalg.eigvals(A_o).real < 0):
        raise ValueError("observer drift is not Hurwitz; no steady state")
    return scipy.linalg.solve_continuous_lyapunov(A_o, -obs.kappa * np.eye(2))


@dataclass(frozen=True)
class DesignReport:
    """Everything a homodyne measurement design needs, bundled for reporting."""

    plant: PlantSpec
    observer: ObserverSpec
    steady_state_mean_unit: np.ndarray
    e: np.ndarray
    K: np.ndarray
    noise_intensity: float
    constraint_residual: float
    drift_eigenvalues: np.ndarray
    time_constant: float
    allpass_residual: float
    realizability: RealizabilityReport

    def to_dict(self) -> dict:
        return {
            "plant": {"C_p": self.plant.C_p.tolist(), "x_p0_mean": self.plant.x_p0_mean.tolist()},
            "observer": {
                "beta": self.observer.beta.tolist(),
                "omega_o": self.observer.omega_o,
                "kappa": self.observer.kappa,
                "alpha": self.plant.C_p.tolist(),
            },
            "steady_state_mean_unit": self.steady_state_mean_unit.tolist(),
            "e": self.e.tolist(),
            "K": self.K.tolist(),
            "noise_intensity": self.noise_intensity,
            "constraint_residual": self.constraint_residual,
            "drift_eigenvalues": [[ev.real, ev.imag] for ev in self.drift_eigenvalues],
            "time_constant": self.time_constant,
            "allpass_residual": self.allpass_residual,
            "realizability": {
                "commutation_residual": self.realizability.commutation_residual,
                "gain_residual": self.realizability.gain_residual,
                "passed": self.realizability.passed,
            },
        }


def design_report(plant: PlantSpec, obs: ObserverSpec) -> DesignReport:
    """Run the full design pipeline for one plant-observer pair."""
    e = output_drift_vector(obs)
    design = optimal_quadrature(e)
    sys = observer_system(obs)
    eigs = np.linalg.eigvals(sys.A)
    return DesignReport(
        plant=plant,
        observer=obs,
        steady_state_mean_unit=steady_state_mean(obs, 1.0),
        e=design.e,
        K=design.K,
        noise_intensity=design.noise_intensity,
        constraint_residual=design.constraint_residual,
        drift_eigenvalues=eigs,
        time_constant=2.0 / obs.kappa,
        allpass_residual=allpass_residual(obs),
        realizability=check_physical_realizability(sys),
    )
