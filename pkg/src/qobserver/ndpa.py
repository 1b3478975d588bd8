"""Physical synthesis of the plant-observer system.

The augmented Hamiltonian H = x_p^T R_c x_o + (1/2) omega_o x_o^T x_o can be
realized by a two-mode non-degenerate parametric amplifier (squeezing
parameter epsilon) whose a and b1 output channels are fed back through a
beamsplitter (angles theta, phi), leaving a third channel on the b mode for
homodyne detection.  Eliminating the beamsplitter loop yields a doubled-up
complex state space over (a, b, a*, b*); extracting its Hamiltonian matrix
and transforming to quadratures produces a coupling block

    R_c = [[-Im(e)-Im(d), Re(e)+Re(d)], [Re(e)-Re(d), Im(e)-Im(d)]]

with d = sqrt(k1 k2) e^{i phi} sin(theta)/(1 - cos(theta)).  R_c is rank one
exactly when |d| = |epsilon|, which fixes theta through the design equation
sin(theta)/(1 - cos(theta)) = |epsilon|/sqrt(k1 k2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import observer as obs_mod
from .core import HamiltonianSpec, build_system, check_physical_realizability

RANK_TOL = 1e-10
LINEARIZATION_RATIO_MAX = 0.6

# Doubled-up symplectic form and the quadrature transform (a, b, a*, b*) <- (q_p, p_p, q_o, p_o).
J_DOUBLED = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
PHI = np.array(
    [
        [1, 1j, 0, 0],
        [0, 0, 1, 1j],
        [1, -1j, 0, 0],
        [0, 0, 1, -1j],
    ],
    dtype=complex,
)


class RankOneConditionError(ValueError):
    """The synthesized coupling block is not rank one (|delta| != |epsilon|)."""

    def __init__(self, residual: float):
        super().__init__(f"rank-one condition violated: ||delta|^2 - |epsilon|^2| = {residual:.3e}")
        self.residual = residual


@dataclass(frozen=True)
class NdpaParams:
    epsilon: complex
    phi: float
    theta: float
    kappa1: float
    kappa2: float
    kappa3: float
    omega_o: float = 0.0

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "kappa3"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not (0.0 < self.theta < math.pi):
            raise ValueError("theta must lie in (0, pi)")
        if abs(1.0 - math.cos(self.theta)) < 1e-12:
            raise ValueError("beamsplitter is singular: cos(theta) = 1")
        if self.omega_o < 0:
            raise ValueError("omega_o must be non-negative")

    @property
    def gamma1(self) -> float:
        return self.kappa1

    @property
    def gamma2(self) -> float:
        return self.kappa2 + self.kappa3

    @property
    def linearization_ratio(self) -> float:
        return abs(self.epsilon) / math.sqrt(self.kappa1 * self.kappa2)

    def warnings(self) -> list[str]:
        w = []
        ratio = self.linearization_ratio
        if not (0.0 < ratio < LINEARIZATION_RATIO_MAX):
            w.append(
                f"linearization ratio |epsilon|/sqrt(kappa1 kappa2) = {ratio:.4g} "
                f"exceeds {LINEARIZATION_RATIO_MAX}; linearized NDPA model may be invalid"
            )
        return w


@dataclass(frozen=True)
class ComplexStateSpace:
    """Doubled-up complex state space over (a, b, a*, b*)."""

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F, dtype=complex)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", np.asarray(self.G, dtype=complex))
        object.__setattr__(self, "H", np.asarray(self.H, dtype=complex))
        if F.shape != (4, 4):
            raise ValueError("F must be 4x4")
        if doubled_up_residual(F) > 1e-12:
            raise ValueError("F lacks the doubled-up block symmetry")


def doubled_up_residual(F: np.ndarray) -> float:
    """Deviation of a 4x4 matrix from the [[X, Y], [Y#, X#]] block structure."""
    r1 = np.max(np.abs(F[2:, 2:] - F[:2, :2].conj()))
    r2 = np.max(np.abs(F[2:, :2] - F[:2, 2:].conj()))
    return float(max(r1, r2))


def f_theta(theta) -> np.ndarray:
    """The beamsplitter design function f(theta) = sin(theta)/(1 - cos(theta))."""
    theta = np.asarray(theta, dtype=float)
    denom = 1.0 - np.cos(theta)
    if np.any(np.abs(denom) < 1e-12):
        raise ValueError("f(theta) is singular at theta = 0 or 2*pi")
    return np.sin(theta) / denom


def f_theta_curve(theta_grid: np.ndarray) -> np.ndarray:
    """Tabulate f over a grid; f is strictly decreasing on (0, 2*pi)."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    if np.any(theta_grid <= 0.0) or np.any(theta_grid >= 2.0 * math.pi):
        raise ValueError("grid must stay inside (0, 2*pi)")
    return f_theta(theta_grid)


def solve_theta(epsilon: complex, kappa1: float, kappa2: float) -> float:
    """Unique theta in (0, pi) with f(theta) = |epsilon|/sqrt(kappa1 kappa2).

    Since f(theta) = cot(theta/2), the solution is theta = 2 atan(sqrt(k1 k2)/|eps|).
    """
    if kappa1 <= 0 or kappa2 <= 0:
        raise ValueError("kappa1 and kappa2 must be positive")
    mag = abs(epsilon)
    if mag == 0:
        raise ValueError("epsilon = 0: no coupling to realize")
    return 2.0 * math.atan(math.sqrt(kappa1 * kappa2) / mag)


def delta_param(p: NdpaParams) -> complex:
    """Effective coupling delta = sqrt(k1 k2) e^{i phi} sin(theta)/(1 - cos(theta))."""
    return (
        math.sqrt(p.kappa1 * p.kappa2)
        * np.exp(1j * p.phi)
        * math.sin(p.theta)
        / (1.0 - math.cos(p.theta))
    )


def build_ndpa_qsde(p: NdpaParams) -> ComplexStateSpace:
    """QSDE matrices of the NDPA after eliminating the beamsplitter loop."""
    half_delta = delta_param(p) / 2.0
    F1 = np.array(
        [
            [0.0, -np.conj(half_delta)],
            [half_delta, -p.kappa3 / 2.0 - 0.5j * p.omega_o],
        ],
        dtype=complex,
    )
    F2 = np.array([[0.0, p.epsilon / 2.0], [p.epsilon / 2.0, 0.0]], dtype=complex)
    F = np.block([[F1, F2], [F2.conj(), F1.conj()]])
    sk3 = math.sqrt(p.kappa3)
    G = -np.array([[0.0, 0.0], [sk3, 0.0], [0.0, 0.0], [0.0, sk3]], dtype=complex)
    H = np.array([[0.0, sk3, 0.0, 0.0], [0.0, 0.0, 0.0, sk3]], dtype=complex)
    return ComplexStateSpace(F=F, G=G, H=H)


def extract_hamiltonian(F: np.ndarray) -> np.ndarray:
    """Hamiltonian matrix M = (i/2)(JF - F^dagger J) of a doubled-up drift.

    M depends only on the Hamiltonian part of F; dissipative contributions
    cancel in the commutator-like combination.
    """
    F = np.asarray(F, dtype=complex)
    if doubled_up_residual(F) > 1e-10:
        raise ValueError("F is not doubled-up")
    return 0.5j * (J_DOUBLED @ F - F.conj().T @ J_DOUBLED)


def to_quadrature(M: np.ndarray) -> np.ndarray:
    """Real quadrature Hamiltonian R = Phi^dagger M Phi."""
    R = PHI.conj().T @ np.asarray(M, dtype=complex) @ PHI
    if float(np.max(np.abs(R.imag))) > 1e-10:
        raise ValueError("quadrature Hamiltonian has a non-negligible imaginary part")
    R = R.real
    if float(np.max(np.abs(R - R.T))) > 1e-10:
        raise ValueError("quadrature Hamiltonian is not symmetric")
    return 0.5 * (R + R.T)


def rc_closed_form(epsilon: complex, delta: complex) -> np.ndarray:
    """Closed form of the plant-observer coupling block in terms of (epsilon, delta)."""
    return np.array(
        [
            [-epsilon.imag - delta.imag, epsilon.real + delta.real],
            [epsilon.real - delta.real, epsilon.imag - delta.imag],
        ]
    )


def factor_coupling(R_c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rank-one factorization R_c = alpha beta^T.

    Pivots on the row with the larger norm so a roundoff-level row is never
    used as the reference; the pivot row becomes beta and the other alpha
    entry is the corresponding component ratio.
    """
    R_c = np.asarray(R_c, dtype=float)
    scale = float(np.sum(R_c * R_c))
    if scale == 0.0:
        raise ValueError("R_c = 0: nothing to factor")
    det = float(np.linalg.det(R_c))
    if abs(det) > 1e-8 * scale:
        raise ValueError(f"R_c is not rank one: |det| = {abs(det):.3e}")
    row0, row1 = R_c[0], R_c[1]
    if np.dot(row0, row0) >= np.dot(row1, row1):
        j = int(np.argmax(np.abs(row0)))
        alpha = np.array([1.0, row1[j] / row0[j]])
        beta = row0.copy()
    else:
        j = int(np.argmax(np.abs(row1)))
        alpha = np.array([row0[j] / row1[j], 1.0])
        beta = row1.copy()
    return alpha, beta


@dataclass(frozen=True)
class SynthesisResult:
    params: NdpaParams
    delta: complex
    M: np.ndarray
    R: np.ndarray
    R_c: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    e_vec: np.ndarray
    K: np.ndarray
    noise_intensity: float
    rank_residual: float
    e_complex_paper: complex | None
    K_complex_paper: complex | None
    reconciliation_factor: float
    realizability_passed: bool
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def c(z):
            return None if z is None else [z.real, z.imag]

        return {
            "params": {
                "epsilon": c(complex(self.params.epsilon)),
                "phi": self.params.phi,
                "theta": self.params.theta,
                "kappa1": self.params.kappa1,
                "kappa2": self.params.kappa2,
                "kappa3": self.params.kappa3,
                "omega_o": self.params.omega_o,
                "linearization_ratio": self.params.linearization_ratio,
            },
            "delta": c(self.delta),
            "R": self.R.tolist(),
            "R_c": self.R_c.tolist(),
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "e": self.e_vec.tolist(),
            "K": self.K.tolist(),
            "noise_intensity": self.noise_intensity,
            "rank_residual": self.rank_residual,
            "e_complex_paper": c(self.e_complex_paper),
            "K_complex_paper": c(self.K_complex_paper),
            "reconciliation_factor": self.reconciliation_factor,
            "realizability_passed": self.realizability_passed,
            "warnings": list(self.warnings),
        }


def observer_coupling_matrix(kappa3: float) -> np.ndarray:
    """Field coupling of the synthesized 2-mode system: homodyne channel on the b mode."""
    sk3 = math.sqrt(kappa3)
    return np.array([[0.0, 0.0, sk3, 0.0], [0.0, 0.0, 0.0, sk3]])


def synthesize(
    epsilon: complex,
    phi: float,
    kappa1: float,
    kappa2: float,
    kappa3: float,
    omega_o: float = 0.0,
    theta: float | None = None,
) -> SynthesisResult:
    """End-to-end synthesis: theta design, QSDE model, Hamiltonian extraction,
    quadrature transform, rank-one factorization and homodyne design.

    The canonical e and K come from the observer design equations with
    kappa = kappa3.  For omega_o = 0 the complex shorthand forms
    e = -(4/kappa3)(epsilon + delta) and K = -kappa3/(4 conj(epsilon + delta))
    are reported alongside; they differ from the canonical values by the
    scalar factor -sqrt(kappa3), which is recorded but never used downstream.
    """
    epsilon = complex(epsilon)
    if theta is None:
        theta = solve_theta(epsilon, kappa1, kappa2)
    p = NdpaParams(
        epsilon=epsilon, phi=phi, theta=theta,
        kappa1=kappa1, kappa2=kappa2, kappa3=kappa3, omega_o=omega_o,
    )
    delta = delta_param(p)
    rank_residual = abs(abs(delta) ** 2 - abs(epsilon) ** 2)
    if rank_residual > RANK_TOL:
        raise RankOneConditionError(rank_residual)

    qsde = build_ndpa_qsde(p)
    M = extract_hamiltonian(qsde.F)
    R = to_quadrature(M)
    R_c = R[:2, 2:]
    alpha, beta = factor_coupling(R_c)

    obs = obs_mod.ObserverSpec(beta=beta, omega_o=omega_o, kappa=kappa3)
    e_vec = obs_mod.output_drift_vector(obs)
    design = obs_mod.optimal_quadrature(e_vec)

    # The complex shorthand only applies for omega_o = 0 and degenerates
    # when delta = -epsilon (the canonical vector forms still work there).
    e_paper = K_paper = None
    if omega_o == 0.0 and abs(epsilon + delta) > 0.0:
        e_paper = -(4.0 / kappa3) * (epsilon + delta)
        K_paper = -kappa3 / (4.0 * np.conj(epsilon + delta))

    realizable = check_physical_realizability(
        build_system(HamiltonianSpec(R=R, W=observer_coupling_matrix(kappa3)))
    ).passed

    return SynthesisResult(
        params=p,
        delta=complex(delta),
        M=M,
        R=R,
        R_c=R_c,
        alpha=alpha,
        beta=beta,
        e_vec=e_vec,
        K=design.K,
        noise_intensity=design.noise_intensity,
        rank_residual=rank_residual,
        e_complex_paper=None if e_paper is None else complex(e_paper),
        K_complex_paper=None if K_paper is None else complex(K_paper),
        reconciliation_factor=-math.sqrt(kappa3),
        realizability_passed=realizable,
        warnings=p.warnings(),
    )
