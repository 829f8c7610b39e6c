"""
Gaussian State Constructors
Thermal, squeezed and two-mode squeezed states, sampling and diagnostics
"""

from typing import Optional, Sequence

import numpy as np

from app.models.state import GaussianState
from app.core.config import settings
from app.core.exceptions import ConfigValidationError, CovarianceNotPSDError
from app.core.logging import get_logger

logger = get_logger(__name__)

# Relative tolerance (times trace) for negative eigenvalues of a covariance
PSD_TOL = 1e-10
PHYSICALITY_TOL = 1e-9


def _reflection(theta: float) -> np.ndarray:
    """F(θ) = [[cos θ, sin θ], [sin θ, -cos θ]]"""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal Ω with [[0, 1], [-1, 0]] per mode"""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a covariance, ascending (vacuum gives 1/2)"""
    n_modes = cov.shape[0] // 2
    eig = np.abs(np.linalg.eigvals(1j * symplectic_form(n_modes) @ cov))
    return np.sort(eig)[::2]


def is_physical(cov: np.ndarray, tol: float = PHYSICALITY_TOL) -> bool:
    """Uncertainty bound: every symplectic eigenvalue >= 1/2"""
    return bool(np.all(symplectic_eigenvalues(cov) >= 0.5 - tol))


def _finalize(mean: np.ndarray, cov: np.ndarray, strict: Optional[bool]) -> GaussianState:
    strict = settings.STRICT_PHYSICALITY if strict is None else strict
    state = GaussianState(mean=mean, cov=0.5 * (cov + cov.T))
    if strict and not is_physical(state.cov):
        raise CovarianceNotPSDError(
            f"state violates the uncertainty bound: symplectic eigenvalues "
            f"{symplectic_eigenvalues(state.cov)}"
        )
    return state


def vacuum_state(n_modes: int) -> GaussianState:
    """N-mode vacuum"""
    return GaussianState(mean=np.zeros(2 * n_modes), cov=0.5 * np.eye(2 * n_modes))


def thermal_state(nu_list: Sequence[float], strict: Optional[bool] = None) -> GaussianState:
    """
    Product of thermal states

    Args:
        nu_list: Occupation per mode
        strict: Apply the physicality check

    Returns:
        GaussianState: Zero mean, cov = diag(ν_i + 1/2) per quadrature pair
    """
    nu = np.asarray(nu_list, dtype=float).ravel()
    if np.any(nu < 0):
        raise ConfigValidationError("nu", "nu >= 0", nu.tolist())
    variances = np.repeat(nu + 0.5, 2)
    return _finalize(np.zeros(variances.size), np.diag(variances), strict)


def single_mode_squeezed(
    zeta: complex,
    displacement: complex = 0.0,
    strict: Optional[bool] = None
) -> GaussianState:
    """
    Displaced squeezed vacuum D(α)S(ζ)|0⟩

    The quadrature at angle arg(ζ)/2 has variance e^{-2|ζ|}/2.

    Args:
        zeta: Squeeze parameter r·e^{iθ}
        displacement: Coherent amplitude α, ⟨a⟩ = α

    Returns:
        GaussianState: Single-mode state
    """
    r, theta = abs(zeta), float(np.angle(zeta))
    cov = 0.5 * (np.cosh(2 * r) * np.eye(2) - np.sinh(2 * r) * _reflection(theta))
    alpha = complex(displacement)
    mean = np.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    return _finalize(mean, cov, strict)


def two_mode_squeezed(z: complex, strict: Optional[bool] = None) -> GaussianState:
    """
    Two-mode squeezed vacuum S₂(z)|0,0⟩, a₁ → a₁cosh r − a₂† e^{iθ} sinh r

    Real z correlates X₁X₂ (negatively) and P₁P₂ (positively); imaginary z
    correlates X₁P₂ and P₁X₂.

    Args:
        z: Squeeze parameter r·e^{iθ}

    Returns:
        GaussianState: Two-mode state
    """
    r, theta = abs(z), float(np.angle(z))
    diag = 0.5 * np.cosh(2 * r) * np.eye(2)
    off = -0.5 * np.sinh(2 * r) * _reflection(theta)
    cov = np.block([[diag, off], [off.T, diag]])
    return _finalize(np.zeros(4), cov, strict)


def sample(state: GaussianState, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """
    Draw phase-space points from the state's Wigner distribution

    Uses an eigendecomposition so semi-definite covariances are accepted.

    Args:
        state: Gaussian state
        rng: Explicit random generator
        size: Number of points (None for a single 2N-vector)

    Returns:
        np.ndarray: Shape (2N,) or (size, 2N)
    """
    w, V = np.linalg.eigh(state.cov)
    tol = PSD_TOL * max(float(np.trace(state.cov)), np.finfo(float).tiny)
    if w.size and w.min() < -tol:
        raise CovarianceNotPSDError(
            f"covariance not PSD within tolerance 1e-10*trace: min eigenvalue {w.min():.3e}"
        )
    factor = V * np.sqrt(np.clip(w, 0.0, None))

    n = 1 if size is None else size
    z = rng.standard_normal((n, state.dim))
    points = state.mean + z @ factor.T
    return points[0] if size is None else points


def mode_occupation(state: GaussianState, i: int) -> float:
    """⟨a†a⟩ of mode i, (⟨X²⟩ + ⟨P²⟩ − 1)/2"""
    second = state.second_moments()
    return 0.5 * (second[2 * i, 2 * i] + second[2 * i + 1, 2 * i + 1] - 1.0)


def squeezing_db(cov_block: np.ndarray) -> float:
    """Smallest quadrature variance of a 2x2 block relative to vacuum, in dB"""
    smallest = float(np.linalg.eigvalsh(cov_block)[0])
    if smallest <= 0:
        return float("-inf")
    return 10.0 * np.log10(smallest / 0.5)


def log_negativity(cov: np.ndarray) -> float:
    """
    Logarithmic negativity of a two-mode covariance

    Partial transposition flips P₂; entangled states give a positive value.
    """
    if cov.shape != (4, 4):
        raise ConfigValidationError("cov", "two-mode 4x4 covariance", cov.shape)
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    nu_min = symplectic_eigenvalues(flip @ cov @ flip)[0]
    return float(max(0.0, -np.log2(2.0 * nu_min)))
