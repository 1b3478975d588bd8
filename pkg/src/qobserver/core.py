"""Quadrature-form linear quantum systems.

A single bosonic mode is described by the quadrature pair (q, p); an
n-mode system stacks these into a real 2n-vector.  A quadratic Hamiltonian
(symmetric matrix R) together with a linear field coupling (matrix W)
determines the state-space matrices of the quantum stochastic differential
equation

    dx = A x dt + B dw,    dy = C x dt + dw

via A = 2JR + (1/2) J W^T J W, B = J W^T J, C = W, where J is the
symplectic form.  Models built this way preserve the canonical commutation
relations, which is the physical-realizability identity checked here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

REALIZABILITY_TOL = 1e-10


def symplectic(n_modes: int) -> np.ndarray:
    """Block-diagonal n-mode symplectic form, J2 repeated along the diagonal."""
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    J = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        J[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = J2
    return J


@dataclass(frozen=True)
class HamiltonianSpec:
    """Quadratic Hamiltonian matrix R (symmetric, 2n x 2n) and field coupling W (2m x 2n)."""

    R: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        W = np.atleast_2d(np.asarray(self.W, dtype=float))
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "W", W)
        if R.shape[0] != R.shape[1] or R.shape[0] % 2 != 0:
            raise ValueError(f"R must be square 2n x 2n, got {R.shape}")
        if np.max(np.abs(R - R.T)) > 1e-12:
            raise ValueError("R must be symmetric (tolerance 1e-12)")
        if W.shape[1] != R.shape[0] or W.shape[0] % 2 != 0:
            raise ValueError(f"W must be 2m x {R.shape[0]}, got {W.shape}")

    @property
    def n_modes(self) -> int:
        return self.R.shape[0] // 2

    @property
    def n_channels(self) -> int:
        return self.W.shape[0] // 2


@dataclass(frozen=True)
class QuadratureSystem:
    """Real state-space (A, B, C) of a linear quantum system in quadrature form."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    n_modes: int
    n_channels: int

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        nx, nw = 2 * self.n_modes, 2 * self.n_channels
        if A.shape != (nx, nx):
            raise ValueError(f"A must be {nx}x{nx}, got {A.shape}")
        if B.shape != (nx, nw):
            raise ValueError(f"B must be {nx}x{nw}, got {B.shape}")
        if C.shape != (nw, nx):
            raise ValueError(f"C must be {nw}x{nx}, got {C.shape}")


@dataclass(frozen=True)
class RealizabilityReport:
    """Residuals of the commutation-preservation identities."""

    commutation_residual: float
    gain_residual: float
    tolerance: float = REALIZABILITY_TOL
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = (
            self.commutation_residual <= self.tolerance
            and self.gain_residual <= self.tolerance
        )
        object.__setattr__(self, "passed", ok)


def build_system(spec: HamiltonianSpec) -> QuadratureSystem:
    """State-space matrices of the open linear quantum system defined by (R, W).

    The drift uses A = 2JR + (1/2) J W^T J W; the damping term carries a
    leading J so that e.g. R = w*I, W = sqrt(k)*I yields the rotation-plus-
    decay drift [[-k/2, 2w], [-2w, -k/2]].
    """
    Jn = symplectic(spec.n_modes)
    Jm = symplectic(spec.n_channels) if spec.n_channels else np.zeros((0, 0))
    W = spec.W
    A = 2.0 * Jn @ spec.R + 0.5 * Jn @ W.T @ Jm @ W
    B = Jn @ W.T @ Jm
    return QuadratureSystem(A=A, B=B, C=W, n_modes=spec.n_modes, n_channels=spec.n_channels)


def check_physical_realizability(
    sys: QuadratureSystem, tolerance: float = REALIZABILITY_TOL
) -> RealizabilityReport:
    """Check A J + J A^T + B J B^T = 0 and B = J C^T J entrywise."""
    Jn = symplectic(sys.n_modes)
    Jm = symplectic(sys.n_channels) if sys.n_channels else np.zeros((0, 0))
    comm = sys.A @ Jn + Jn @ sys.A.T
    if sys.n_channels:
        comm = comm + sys.B @ Jm @ sys.B.T
    gain = sys.B - Jn @ sys.C.T @ Jm
    comm_res = float(np.max(np.abs(comm))) if comm.size else 0.0
    gain_res = float(np.max(np.abs(gain))) if gain.size else 0.0
    return RealizabilityReport(comm_res, gain_res, tolerance)


def drift_spectrum(sys: QuadratureSystem) -> tuple[np.ndarray, bool]:
    """Eigenvalues of the drift matrix and a strict Hurwitz flag.

    Marginally stable drifts (any eigenvalue with zero real part) are
    reported as not Hurwitz.
    """
    eigs = np.linalg.eigvals(sys.A)
    return eigs, bool(np.all(eigs.real < 0.0))
