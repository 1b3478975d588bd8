"""Monte Carlo simulation of the coupled plant-observer dynamics.

The quantum noise quadratures are modeled as independent unit-intensity
classical Wiener processes, which reproduces the means and second moments
of homodyne measurement records of a vacuum-driven linear system.  The
joint state (x_p, x_o, y_o) is integrated either by Euler-Maruyama or by
exact discretization (matrix exponential plus exact Gaussian increments);
the latter removes step-size bias in long runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .observer import HomodyneDesign, ObserverSpec, PlantSpec, build_augmented

_OMEGA_GUARD = 1e-9


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_final: float
    seed: int
    n_trajectories: int = 1
    burn_in: float = 0.0
    method: str = "euler"          # "euler" or "exact"
    noise: bool = True             # test hook: False zeroes all Wiener increments
    x_o0: str | tuple = "vacuum"   # "vacuum" (N(0, I) draw), "zero", or explicit pair

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be positive")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        if self.burn_in >= self.t_final:
            raise ValueError("burn_in must be smaller than t_final")
        if self.method not in ("euler", "exact"):
            raise ValueError(f"unknown integrator {self.method!r}")

    def validate_step(self, obs: ObserverSpec) -> None:
        """Stability/accuracy guard: dt <= 0.1 * min(2/kappa, 1/(4 omega_o))."""
        limit = 0.1 * min(2.0 / obs.kappa, 1.0 / (4.0 * obs.omega_o + _OMEGA_GUARD))
        if self.dt > limit:
            raise ValueError(
                f"dt={self.dt} violates the step-size guard (max {limit:.6g} "
                f"for kappa={obs.kappa}, omega_o={obs.omega_o})"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    x_p_path: np.ndarray   # shape (2, T)
    x_o_path: np.ndarray   # shape (2, T)
    y_o_path: np.ndarray   # shape (2, T), integrated output record
    z_o_path: np.ndarray   # K . y_o
    seed: int
    traj_index: int


@dataclass(frozen=True)
class EstimatorStats:
    zp_true: float
    zp_estimates: np.ndarray
    sample_mean: float
    sample_std: float
    predicted_std: float

    def to_dict(self) -> dict:
        return {
            "zp_true": self.zp_true,
            "n_trajectories": int(self.zp_estimates.size),
            "sample_mean": self.sample_mean,
            "sample_std": self.sample_std,
            "predicted_std": self.predicted_std,
        }


def _augmented_matrices(plant: PlantSpec, obs: ObserverSpec):
    """State space of the 6-dim joint state X = (x_p, x_o, y_o)."""
    aug = build_augmented(plant, obs)
    A = np.zeros((6, 6))
    A[:4, :4] = aug.A_cl
    A[4:6, 2:4] = np.sqrt(obs.kappa) * np.eye(2)
    B = np.zeros((6, 2))
    B[:4, :] = aug.B_cl
    B[4:6, :] = np.eye(2)
    return A, B


def _exact_discretization(A: np.ndarray, B: np.ndarray, dt: float):
    """One-step transition matrix and process-noise factor via Van Loan's method."""
    n = A.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = -A
    M[:n, n:] = B @ B.T
    M[n:, n:] = A.T
    E = scipy.linalg.expm(M * dt)
    Ad = E[n:, n:].T
    Qd = Ad @ E[:n, n:]
    Qd = 0.5 * (Qd + Qd.T)
    # Qd is rank-deficient (the conserved plant direction gets no noise);
    # factor by eigendecomposition with negative eigenvalues clipped.
    vals, vecs = np.linalg.eigh(Qd)
    vals = np.clip(vals, 0.0, None)
    L = vecs * np.sqrt(vals)
    return Ad, L


def _trajectory_rng(seed: int, traj_index: int) -> np.random.Generator:
    """Per-trajectory stream, independent of scheduling order."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(traj_index,)))


def simulate(
    plant: PlantSpec,
    obs: ObserverSpec,
    design: HomodyneDesign,
    cfg: SimConfig,
) -> list[TrajectoryRecord]:
    """Integrate the joint plant-observer SDE for cfg.n_trajectories paths.

    x_p starts deterministically at plant.x_p0_mean; x_o is drawn from the
    vacuum-consistent N(0, I) unless overridden.  Each trajectory draws its
    noise from a stream keyed by (seed, trajectory index).
    """
    cfg.validate_step(obs)
    A, B = _augmented_matrices(plant, obs)
    n_steps = cfg.n_steps
    n_traj = cfg.n_trajectories
    dt = cfg.dt
    times = np.arange(n_steps + 1) * dt

    if cfg.method == "exact":
        Ad, L = _exact_discretization(A, B, dt)
    else:
        Ad = np.eye(6) + A * dt
        L = B * np.sqrt(dt)
    # z_p = C_p x_p is conserved by the exact flow (C_p^T J C_p = 0); project
    # out the expm/eigh roundoff so the one-step map conserves it too.
    v = np.zeros(6)
    v[:2] = plant.C_p
    vv = v @ v
    for _ in range(2):
        Ad = Ad - np.outer(v, v @ Ad - v) / vv
    L = L - np.outer(v, v @ L) / vv
    n_noise = L.shape[1]

    # Per-trajectory draws first (stream independence), then a vectorized
    # time loop across trajectories.
    X0 = np.zeros((n_traj, 6))
    X0[:, :2] = plant.x_p0_mean
    xi = np.zeros((n_traj, n_steps, n_noise))
    for i in range(n_traj):
        rng = _trajectory_rng(cfg.seed, i)
        if cfg.x_o0 == "vacuum":
            X0[i, 2:4] = rng.standard_normal(2)
        elif cfg.x_o0 == "zero":
            pass
        else:
            X0[i, 2:4] = np.asarray(cfg.x_o0, dtype=float).reshape(2)
        if cfg.noise:
            xi[i] = rng.standard_normal((n_steps, n_noise))

    paths = np.empty((n_traj, n_steps + 1, 6))
    paths[:, 0, :] = X0
    X = X0
    AdT = Ad.T
    LT = L.T
    for k in range(n_steps):
        X = X @ AdT + xi[:, k, :] @ LT
        paths[:, k + 1, :] = X

    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(paths))
        raise RuntimeError(f"non-finite state encountered at step index {int(bad[0][1])}")

    records = []
    for i in range(n_traj):
        y_o = paths[i, :, 4:6].T
        records.append(
            TrajectoryRecord(
                times=times,
                x_p_path=paths[i, :, 0:2].T.copy(),
                x_o_path=paths[i, :, 2:4].T.copy(),
                y_o_path=y_o.copy(),
                z_o_path=design.K @ y_o,
                seed=cfg.seed,
                traj_index=i,
            )
        )
    return records


def zp_drift(record: TrajectoryRecord, plant: PlantSpec) -> float:
    """Max deviation of z_p(t) = C_p x_p(t) from its initial value along the path."""
    z = plant.C_p @ record.x_p_path
    return float(np.max(np.abs(z - z[0])))


def _window_index(times: np.ndarray, burn_in: float) -> int:
    idx = int(np.searchsorted(times, burn_in))
    if idx >= times.size - 1:
        raise ValueError("burn-in leaves an empty estimation window")
    return idx


def estimate_zp(
    records: list[TrajectoryRecord],
    design: HomodyneDesign,
    burn_in: float,
    zp_true: float = np.nan,
) -> EstimatorStats:
    """Per-path slope estimator (z_o(T) - z_o(t_burn)) / (T - t_burn)."""
    if not records:
        raise ValueError("no trajectory records given")
    times = records[0].times
    i0 = _window_index(times, burn_in)
    span = times[-1] - times[i0]
    est = np.array([(r.z_o_path[-1] - r.z_o_path[i0]) / span for r in records])
    K_norm = np.sqrt(design.noise_intensity)
    return EstimatorStats(
        zp_true=float(zp_true),
        zp_estimates=est,
        sample_mean=float(est.mean()),
        sample_std=float(est.std(ddof=1)) if est.size > 1 else 0.0,
        predicted_std=float(K_norm / np.sqrt(span)),
    )


def output_noise_whiteness(
    records: list[TrajectoryRecord],
    design: HomodyneDesign,
    lag_max: int,
    burn_in: float,
    zp_true: float,
) -> dict:
    """Autocovariance of the detrended measurement increments, pooled over paths.

    For a white record the lag-0 autocovariance is ||K||^2 dt and all higher
    lags vanish up to sampling error.
    """
    times = records[0].times
    i0 = _window_index(times, burn_in)
    dt = float(times[1] - times[0])
    inc = []
    for r in records:
        resid = r.z_o_path[i0:] - zp_true * times[i0:]
        inc.append(np.diff(resid))
    pooled = np.concatenate(inc)
    if pooled.size <= lag_max:
        raise ValueError("steady-state window too short for requested lag_max")
    centered = pooled - pooled.mean()
    n = centered.size
    autocov = np.array(
        [float(centered[: n - lag] @ centered[lag:]) / n for lag in range(lag_max + 1)]
    )
    autocorr = autocov / autocov[0] if autocov[0] > 0 else autocov
    return {
        "lags": list(range(lag_max + 1)),
        "autocovariance": autocov,
        "autocorrelation": autocorr,
        "expected_lag0": design.noise_intensity * dt,
        "n_increments": int(n),
    }
