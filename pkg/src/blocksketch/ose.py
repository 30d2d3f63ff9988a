"""Embedding-quality diagnostics: subspace distortion and Monte-Carlo
verification of the embedding guarantee."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .sketch import SketchOperator, apply_dense, make_operator


@dataclass(frozen=True)
class DistortionReport:
    """Extreme singular values of Omega V and the empirical distortion.

    eps_hat = max(|1 - sigma_min^2|, |sigma_max^2 - 1|); the isometry
    condition holds on span(V) at level eps iff eps_hat <= eps.
    """

    sigma_min: float
    sigma_max: float
    eps_hat: float


def subspace_distortion(op: SketchOperator, V: np.ndarray) -> DistortionReport:
    """Distortion of the sketch on the subspace spanned by an orthonormal V."""
    V = np.asarray(V, dtype=np.float64)
    d = V.shape[1]
    if np.linalg.norm(V.T @ V - np.eye(d), "fro") > 1e-10 * np.sqrt(d):
        raise ValueError("V must have orthonormal columns")
    s = np.linalg.svd(apply_dense(op, V), compute_uv=False)
    # as a map on the d-dimensional subspace: fewer sketch rows than d
    # means d - l of the singular values are exactly zero
    smin = float(s[-1]) if s.shape[0] >= d else 0.0
    smax = float(s[0])
    return DistortionReport(sigma_min=smin, sigma_max=smax,
                            eps_hat=max(abs(1.0 - smin ** 2), abs(smax ** 2 - 1.0)))


def random_subspace(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis drawn rotation-invariantly (QR of a Gaussian)."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, d)))
    return Q


def ose_monte_carlo(kind: str, l: int, n: int, p: int, d: int, trials: int,
                    eps: float, seed: int = 0, workers: int = 4) -> float:
    """Fraction of independent (operator, subspace) draws with eps_hat > eps."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    root = np.random.SeedSequence(entropy=seed, spawn_key=(17,))
    trial_seeds = root.generate_state(2 * trials, dtype=np.uint64)

    def one(t: int) -> bool:
        op = make_operator(kind, l, n, p, seed=int(trial_seeds[2 * t]))
        V = random_subspace(n, d, np.random.default_rng(int(trial_seeds[2 * t + 1])))
        return subspace_distortion(op, V).eps_hat > eps

    with ThreadPoolExecutor(max_workers=workers) as pool:
        failures = sum(pool.map(one, range(trials)))
    return failures / trials
