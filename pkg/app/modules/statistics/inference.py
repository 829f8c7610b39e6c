"""
State Inference
Sample covariances, Wishart errors and bias removal
"""

from typing import Optional

import numpy as np

from app.models.state import GaussianState
from app.models.statistics import CovarianceEstimate, InferredState, NoiseCovarianceSet
from app.modules.states.gaussian import PHYSICALITY_TOL, symplectic_eigenvalues
from app.core.exceptions import GridMismatchError, InsufficientSamplesError
from app.core.logging import get_logger

logger = get_logger(__name__)

# Below this many degrees of freedom the estimate is flagged as weak
LOW_DOF = 10


def wishart_se(sigma: np.ndarray, n_s: int) -> np.ndarray:
    """
    Element-wise standard errors of a sample covariance

    var[Σ̂_ij] = (Σ_ij² + Σ_ii Σ_jj)/(n_s − 1)
    """
    if n_s < 2:
        raise InsufficientSamplesError(f"standard errors need n_s >= 2 (got {n_s})")
    sigma = np.asarray(sigma, dtype=float)
    diag = np.diag(sigma)
    return np.sqrt((sigma ** 2 + np.outer(diag, diag)) / (n_s - 1))


def sample_covariance(estimates: np.ndarray) -> CovarianceEstimate:
    """
    Unbiased sample covariance of estimates with Wishart standard errors

    Args:
        estimates: (n_s, 2N) estimate vectors

    Returns:
        CovarianceEstimate
    """
    estimates = np.atleast_2d(np.asarray(estimates, dtype=float))
    n_s = estimates.shape[0]
    if n_s < 2:
        raise InsufficientSamplesError(f"sample covariance needs n_s >= 2 (got {n_s})")
    if n_s - 1 < LOW_DOF:
        logger.warning(f"⚠️  only {n_s - 1} degrees of freedom in the sample covariance")

    sigma = np.cov(estimates, rowvar=False, ddof=1)
    sigma = np.atleast_2d(0.5 * (sigma + sigma.T))
    return CovarianceEstimate(
        mean=estimates.mean(axis=0),
        sigma=sigma,
        se=wishart_se(sigma, n_s),
        n_s=n_s,
    )


def bootstrap_se(
    estimates: np.ndarray,
    n_resamples: int = 200,
    rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """Standard deviation of the sample covariance over bootstrap resamples"""
    estimates = np.atleast_2d(np.asarray(estimates, dtype=float))
    n_s = estimates.shape[0]
    if n_s < 2:
        raise InsufficientSamplesError(f"bootstrap needs n_s >= 2 (got {n_s})")
    rng = rng or np.random.default_rng(0)

    draws = np.empty((n_resamples, estimates.shape[1], estimates.shape[1]))
    for b in range(n_resamples):
        idx = rng.integers(0, n_s, size=n_s)
        draws[b] = np.cov(estimates[idx], rowvar=False, ddof=1)
    return draws.std(axis=0, ddof=1)


def physicality_violations(cov: np.ndarray, tol: float = PHYSICALITY_TOL) -> list:
    """Descriptions of every way a covariance fails to describe a quantum state"""
    violations = []
    eig = np.linalg.eigvalsh(0.5 * (cov + cov.T))
    if eig[0] < -tol * max(1.0, float(np.trace(cov))):
        violations.append(f"covariance not positive semi-definite (min eigenvalue {eig[0]:.4g})")
    nu = symplectic_eigenvalues(cov)
    for k, value in enumerate(nu):
        if value < 0.5 - tol:
            violations.append(f"symplectic eigenvalue {k} = {value:.4g} < 1/2")
    return violations


def infer_state_cov(estimate: CovarianceEstimate, noise: NoiseCovarianceSet) -> InferredState:
    """
    cov[Q] = Σ̂ − T − B − M with Wishart standard errors

    Violations of the uncertainty bound are reported, never clipped.

    Args:
        estimate: Sample covariance of the estimates
        noise: Bias covariances of the bank that produced them

    Returns:
        InferredState
    """
    if estimate.n_s < 2:
        raise InsufficientSamplesError(f"inference needs n_s >= 2 (got {estimate.n_s})")
    if estimate.sigma.shape != noise.M.shape:
        raise GridMismatchError(
            f"estimate dimension {estimate.sigma.shape} does not match noise set {noise.M.shape}"
        )

    cov = estimate.sigma - noise.total()
    cov = 0.5 * (cov + cov.T)
    violations = physicality_violations(cov)
    for v in violations:
        logger.warning(f"⚠️  inferred state: {v}")

    return InferredState(
        mean=estimate.mean,
        cov=cov,
        se=estimate.se,
        symplectic_eigenvalues=symplectic_eigenvalues(cov),
        physical=not violations,
        violations=violations,
    )


def closure_z_scores(inferred: InferredState, truth: GaussianState) -> np.ndarray:
    """(inferred − true)/SE element-wise, for decomposition-closure checks"""
    return (inferred.cov - truth.cov) / inferred.se
