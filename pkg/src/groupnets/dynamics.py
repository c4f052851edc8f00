"""Spectral and Markov-chain analytics for consensus and propagation.

The averaging matrix ``W = (D + I)^-1 (A + I)`` gives every node equal
weight on itself and each neighbor.  Its stationary distribution has the
closed form ``pi_i = (d_i + 1) / (n + 2|E|)`` and satisfies detailed
balance, so ``W`` is similar to the symmetric ``S = D_pi^1/2 W D_pi^-1/2``
and the whole spectrum is real.  Propagation growth rates come from the
dominant adjacency eigenvalue; consensus convergence from the second
largest eigenvalue modulus of ``W``; the steady-state disagreement under
noise from the Kemeny-Snell fundamental matrix and hitting times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh

from .graphs import Graph, is_connected

__all__ = [
    "ConsensusSystem",
    "SpectralReport",
    "MarkovReport",
    "NoiseModel",
    "Trajectory",
    "ConvergenceError",
    "ConditioningError",
    "build_consensus_matrix",
    "spectral_radius",
    "second_eigenvalue_modulus",
    "convergence_time",
    "propagation_growth_rates",
    "spectral_report",
    "hitting_times",
    "markov_report",
    "steady_state_deviation",
    "simulate_consensus",
    "simulate_noisy_consensus",
    "simulate_hitting_time",
]

_MAX_POWER_ITER = 100_000
# Below this size the deflated power iteration is cheap and avoids ARPACK
# small-problem restrictions; above it Lanczos handles clustered spectra.
_LANCZOS_MIN_N = 33


class ConvergenceError(RuntimeError):
    """An iterative eigenvalue computation hit its iteration limit."""


class ConditioningError(RuntimeError):
    """A linear solve was numerically singular."""


@dataclass(frozen=True)
class ConsensusSystem:
    """Row-stochastic averaging matrix with its stationary distribution.

    Construction asserts row stochasticity, stationarity of ``pi`` and
    detailed balance (reversibility), since every downstream formula
    relies on them.
    """

    W: np.ndarray
    pi: np.ndarray

    def __post_init__(self) -> None:
        W, pi = self.W, self.pi
        n = W.shape[0]
        if W.shape != (n, n) or pi.shape != (n,):
            raise ValueError("shape mismatch between W and pi")
        if W.min() < 0.0:
            raise ValueError("W has negative entries")
        row_err = np.abs(W.sum(axis=1) - 1.0).max()
        if row_err > 1e-12:
            raise ValueError(f"W rows deviate from stochasticity by {row_err:.2e}")
        if abs(pi.sum() - 1.0) > 1e-12:
            raise ValueError("pi does not sum to 1")
        stat_err = np.abs(pi @ W - pi).max()
        if stat_err > 1e-10:
            raise ValueError(f"pi is not stationary (residual {stat_err:.2e})")
        balance = pi[:, None] * W
        bal_err = np.abs(balance - balance.T).max()
        if bal_err > 1e-12:
            raise ValueError(f"detailed balance violated by {bal_err:.2e}")

    @property
    def n(self) -> int:
        return self.pi.shape[0]


@dataclass(frozen=True)
class SpectralReport:
    lambda_max: float
    rho2: float
    tau_asym: float
    si_rate: float
    sis_rate: float


@dataclass(frozen=True)
class MarkovReport:
    Z: np.ndarray
    H: np.ndarray
    delta_ss: float | None = None


@dataclass(frozen=True)
class NoiseModel:
    """Per-node noise variances; a scalar means the same variance everywhere."""

    sigma2: float | tuple[float, ...] = 1.0

    def variances(self, n: int) -> np.ndarray:
        if np.isscalar(self.sigma2):
            v = np.full(n, float(self.sigma2))
        else:
            v = np.asarray(self.sigma2, dtype=np.float64)
            if v.shape != (n,):
                raise ValueError(f"noise dimension {v.shape} does not match n={n}")
        if v.min() < 0.0:
            raise ValueError("noise variances must be nonnegative")
        return v


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    horizon: int


def build_consensus_matrix(g: Graph) -> ConsensusSystem:
    """Equal-neighbor averaging matrix W = (D+I)^-1 (A+I) of a connected graph.

    The stationary distribution is pi_i = (d_i + 1) / (n + 2|E|).
    """
    if not is_connected(g):
        raise ValueError("consensus matrix requires a connected graph (irreducibility)")
    a = g.to_dense()
    d = a.sum(axis=1)
    W = (a + np.eye(g.n)) / (d + 1.0)[:, None]
    pi = (d + 1.0) / (g.n + 2.0 * g.edge_count)
    return ConsensusSystem(W=W, pi=pi)


def _power_start(n: int) -> np.ndarray:
    # all-ones plus an index-dependent perturbation; deterministic and
    # never orthogonal to the positive dominant eigenvector
    return 1.0 + 1e-6 * (np.arange(n) + 1.0)


def _deflated_start(n: int) -> np.ndarray:
    # the deflated iteration needs a start that is generic with respect
    # to graph symmetries (second eigenvectors are often antisymmetric,
    # so a near-constant vector can be almost orthogonal to them);
    # a fixed-seed draw keeps it deterministic
    return np.random.default_rng(0x5EED).standard_normal(n)


def spectral_radius(a, tol: float = 1e-10, max_iter: int = _MAX_POWER_ITER) -> float:
    """Dominant eigenvalue of a symmetric nonnegative matrix by power iteration.

    Iterates on ``A + I`` so that graphs with symmetric spectra
    (bipartite adjacency) still have a strictly dominant eigenvalue; the
    Rayleigh quotient of ``A`` is reported.  Accepts dense arrays or
    scipy sparse matrices.
    """
    if sp.issparse(a):
        a = a.tocsr()
        n = a.shape[0]
        if a.nnz and a.data.min() < 0:
            raise ValueError("matrix must be nonnegative")
        if (abs(a - a.T) > 1e-12).nnz:
            raise ValueError("matrix must be symmetric")
    else:
        a = np.asarray(a, dtype=np.float64)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix must be square")
        if a.min() < 0:
            raise ValueError("matrix must be nonnegative")
        if np.abs(a - a.T).max() > 1e-12:
            raise ValueError("matrix must be symmetric")
    if n == 0:
        raise ValueError("empty matrix")
    x = _power_start(n)
    x /= np.linalg.norm(x)
    lam = None
    prev_change = None
    for _ in range(max_iter):
        z = a @ x
        est = float(x @ z)
        y = z + x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if lam is not None:
            change = est - lam
            if abs(change) <= tol * max(1.0, abs(est)):
                # geometric-tail (Aitken) correction sharpens the estimate
                # when eigenvalues cluster and convergence is slow
                if prev_change is not None and 0.0 < abs(change) < abs(prev_change):
                    q = change / prev_change
                    if abs(q) < 1.0:
                        est += change * q / (1.0 - q)
                return est
            prev_change = change
        lam = est
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")


def _deflated_operator(sys: ConsensusSystem) -> tuple[sp.csr_matrix, np.ndarray]:
    """Sparse symmetrized matrix S and its dominant eigenvector sqrt(pi)."""
    v1 = np.sqrt(sys.pi)
    S = v1[:, None] * sys.W / v1[None, :]
    resid = np.abs(S - S.T).max()
    if resid > 1e-10:
        raise ValueError(f"symmetrization residual {resid:.2e}; system is not reversible")
    S = (S + S.T) / 2.0
    return sp.csr_matrix(S), v1


def second_eigenvalue_modulus(sys: ConsensusSystem, tol: float = 1e-10) -> float:
    """Second largest eigenvalue modulus of W.

    Works on the symmetrized similar matrix, removing the known dominant
    eigenvector sqrt(pi) by exact deflation and taking the dominant
    modulus of what remains.  Small systems use a norm-ratio power
    iteration; larger ones a Lanczos solve on the deflated operator.
    """
    n = sys.n
    if n == 1:
        return 0.0
    S, v1 = _deflated_operator(sys)

    if n < _LANCZOS_MIN_N:
        x = _deflated_start(n)
        x -= v1 * (v1 @ x)
        nx = np.linalg.norm(x)
        if nx < 1e-13:
            return 0.0
        x /= nx
        rho = None
        prev_change = None
        for _ in range(_MAX_POWER_ITER):
            z = S @ x
            z -= v1 * (v1 @ z)
            nz = float(np.linalg.norm(z))
            # the norm ratio tracks the dominant modulus even when
            # +rho and -rho eigenvalues coexist
            if nz < 1e-14:
                return 0.0
            x = z / nz
            if rho is not None:
                change = nz - rho
                if abs(change) <= 1e-14 + 1e-12 * nz:
                    est = nz
                    if prev_change is not None and 0.0 < abs(change) < abs(prev_change):
                        q = change / prev_change
                        if abs(q) < 1.0:
                            est += change * q / (1.0 - q)
                    return float(min(est, 1.0))
                prev_change = change
            rho = nz
        raise ConvergenceError(f"deflated power iteration did not converge (n={n})")

    def matvec(vec):
        w = S @ vec
        w -= v1 * (v1 @ w)
        return w

    op = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    v0 = _deflated_start(n)
    v0 -= v1 * (v1 @ v0)
    try:
        vals = eigsh(
            op,
            k=1,
            which="LM",
            tol=tol,
            v0=v0,
            maxiter=_MAX_POWER_ITER,
            return_eigenvectors=False,
        )
    except (ArpackNoConvergence, ArpackError) as exc:
        raise ConvergenceError(f"Lanczos iteration failed: {exc}") from exc
    return float(min(abs(vals[0]), 1.0))


def convergence_time(rho2: float) -> float:
    """Asymptotic steps for the consensus error to shrink by 1/e: 1/log(1/rho2).

    The contraction-free case rho2 = 0 is defined as 0.
    """
    if rho2 < 0.0 or rho2 >= 1.0:
        raise ValueError(f"rho2 must lie in [0, 1), got {rho2} (non-contracting)")
    if rho2 == 0.0:
        return 0.0
    return float(1.0 / np.log(1.0 / rho2))


def propagation_growth_rates(
    lambda_max: float, beta: float = 1.0, gamma: float = 1.0
) -> tuple[float, float]:
    """Linearized epidemic growth rates: (beta*lambda_max, beta*lambda_max - gamma)."""
    if beta <= 0.0:
        raise ValueError("infection rate beta must be positive")
    if gamma <= 0.0:
        raise ValueError("recovery rate gamma must be positive")
    si = beta * lambda_max
    return si, si - gamma


def spectral_report(g: Graph, beta: float = 1.0, gamma: float = 1.0) -> SpectralReport:
    """All spectral metrics of a connected graph in one record."""
    lam = spectral_radius(g.to_csr())
    sys = build_consensus_matrix(g)
    rho2 = second_eigenvalue_modulus(sys)
    si, sis = propagation_growth_rates(lam, beta, gamma)
    return SpectralReport(
        lambda_max=lam,
        rho2=rho2,
        tau_asym=convergence_time(rho2),
        si_rate=si,
        sis_rate=sis,
    )


def hitting_times(sys: ConsensusSystem) -> MarkovReport:
    """Fundamental matrix Z = (I - W + 1 pi^T)^-1 and hitting times H.

    ``H[i, j]`` is the expected number of steps for the chain started at
    ``i`` to first reach ``j``: ``(Z_jj - Z_ij) / pi_j``.
    """
    n = sys.n
    M = np.eye(n) - sys.W + np.outer(np.ones(n), sys.pi)
    try:
        Z = np.linalg.solve(M, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"fundamental matrix solve failed: {exc}") from exc
    H = (np.diag(Z)[None, :] - Z) / sys.pi[None, :]
    np.fill_diagonal(H, 0.0)
    return MarkovReport(Z=Z, H=H)


def steady_state_deviation(
    sys: ConsensusSystem, H: np.ndarray, noise: NoiseModel
) -> float:
    """Steady-state mean-square disagreement pi^T H D_pi Sigma_e D_pi 1."""
    n = sys.n
    if H.shape != (n, n):
        raise ValueError(f"H has shape {H.shape}, expected ({n}, {n})")
    sigma2 = noise.variances(n)
    return float(sys.pi @ H @ (sys.pi * sys.pi * sigma2))


def markov_report(sys: ConsensusSystem, noise: NoiseModel) -> MarkovReport:
    """Fundamental matrix, hitting times and disagreement level in one record."""
    partial = hitting_times(sys)
    delta = steady_state_deviation(sys, partial.H, noise)
    return MarkovReport(Z=partial.Z, H=partial.H, delta_ss=delta)


def simulate_consensus(sys: ConsensusSystem, x0, horizon: int) -> Trajectory:
    """Iterate x(t+1) = W x(t); the limit is the pi-weighted average of x0."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    x = np.asarray(x0, dtype=np.float64)
    if x.shape != (sys.n,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({sys.n},)")
    states = np.empty((horizon + 1, sys.n))
    states[0] = x
    for t in range(horizon):
        states[t + 1] = sys.W @ states[t]
    return Trajectory(states=states, horizon=horizon)


def simulate_noisy_consensus(
    sys: ConsensusSystem,
    noise: NoiseModel,
    horizon: int,
    replications: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate of the steady-state disagreement level.

    Runs x(t+1) = W x(t) + e(t), discards the first half of the horizon
    as burn-in and averages, over time and replications, the
    stationary-weighted product of the deviation from the running
    weighted mean with its one-step forward sum:

        sum_i pi_i * d_i(t) * (d_i(t) + d_i(t+1)),   d(t) = x(t) - (pi^T x(t)) 1.

    The one-step carry-over term makes the estimator converge to the
    same quantity as the hitting-time expression evaluated by
    ``steady_state_deviation``; dropping it would measure only the
    instantaneous variance, which is strictly smaller on slowly mixing
    graphs.
    """
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    if replications < 1:
        raise ValueError("need at least one replication")
    n = sys.n
    sigma = np.sqrt(noise.variances(n))
    burn = horizon // 2
    X = np.zeros((replications, n))
    acc = 0.0
    count = 0
    for t in range(horizon):
        E = rng.standard_normal((replications, n)) * sigma
        X_next = X @ sys.W.T + E
        if t >= burn:
            d0 = X - (X @ sys.pi)[:, None]
            d1 = X_next - (X_next @ sys.pi)[:, None]
            acc += float((sys.pi * d0 * (d0 + d1)).sum(axis=1).mean())
            count += 1
        X = X_next
    return acc / count


def simulate_hitting_time(
    sys: ConsensusSystem,
    source: int,
    target: int,
    samples: int,
    rng: np.random.Generator,
    max_steps: int = 1_000_000,
) -> float:
    """Mean first-passage steps from source to target over sampled walks."""
    if source == target:
        raise ValueError("source and target must differ")
    n = sys.n
    if not (0 <= source < n and 0 <= target < n):
        raise ValueError("source/target out of range")
    cum = np.cumsum(sys.W, axis=1)
    cum[:, -1] = 1.0
    state = np.full(samples, source, dtype=np.int64)
    steps = np.zeros(samples, dtype=np.int64)
    alive = np.arange(samples)
    t = 0
    while alive.size:
        t += 1
        if t > max_steps:
            raise RuntimeError(f"walks exceeded {max_steps} steps")
        u = rng.random(alive.size)
        rows = cum[state[alive]]
        state[alive] = (rows < u[:, None]).sum(axis=1)
        arrived = state[alive] == target
        steps[alive[arrived]] = t
        alive = alive[~arrived]
    return float(steps.mean())
