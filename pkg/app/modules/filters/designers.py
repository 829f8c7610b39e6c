"""
Filter Designers
OLS, exponential, GLS and broadening-averaged filter families
"""

from typing import Any, Dict, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from app.models.filters import FilterFamily
from app.models.system import SystemConfig
from app.modules.base import ModuleCapability
from app.modules.capabilities import FilterCapability
from app.modules.filters.base_designer import BaseFilterDesigner
from app.modules.filters.noise_matrix import choose_decimation, noise_matrix
from app.modules.filters.optimal import auto_gammas
from app.modules.filters.response import response_rows, signal_response
from app.core.exceptions import ConfigValidationError, FactorizationError
from app.core.logging import get_logger

logger = get_logger(__name__)


class OLSDesigner(BaseFilterDesigner):
    """m_i(t) = r_i(t): projection onto each quadrature response"""

    family = FilterFamily.OLS

    def __init__(self):
        super().__init__(name="ols_designer")

    def get_capabilities(self) -> ModuleCapability:
        return FilterCapability.OLS

    def design_weights(self, config: SystemConfig, options: Dict[str, Any]) -> Tuple[np.ndarray, Dict[str, Any]]:
        return response_rows(config), {}


class ExponentialDesigner(BaseFilterDesigner):
    """m_i(t) = e^{-γ_i t/2}(cos(ω_i t − φ_i), sin(ω_i t − φ_i))"""

    family = FilterFamily.EXP

    def __init__(self):
        super().__init__(name="exp_designer")

    def get_capabilities(self) -> ModuleCapability:
        return FilterCapability.EXPONENTIAL

    def design_weights(self, config: SystemConfig, options: Dict[str, Any]) -> Tuple[np.ndarray, Dict[str, Any]]:
        gammas = options.get("gammas", "auto")
        if isinstance(gammas, str):
            if gammas != "auto":
                raise ConfigValidationError("gamma", "'auto' or one rate per oscillator", gammas)
            gammas = auto_gammas(config)
        else:
            gammas = [float(g) for g in np.atleast_1d(gammas)]
            if len(gammas) == 1 and config.n_modes > 1:
                gammas = gammas * config.n_modes
        if len(gammas) != config.n_modes:
            raise ConfigValidationError("gamma", f"{config.n_modes} decay rates", len(gammas))
        for i, g in enumerate(gammas):
            if not g > 0:
                raise ConfigValidationError(f"gamma[{i}]", "gamma > 0", g)

        return response_rows(config, decays=gammas), {"gammas": gammas}


class GLSDesigner(BaseFilterDesigner):
    """
    GLS filters m = Ω⁻¹ r
    Solved with one Cholesky factorization for all 2N right-hand sides
    """

    family = FilterFamily.GLS

    def __init__(self):
        super().__init__(name="gls_designer")

    def get_capabilities(self) -> ModuleCapability:
        return FilterCapability.GLS

    def design_weights(self, config: SystemConfig, options: Dict[str, Any]) -> Tuple[np.ndarray, Dict[str, Any]]:
        budget = options.get("budget_bytes")
        decimation = options.get("decimation") or choose_decimation(config, budget)
        design_grid = config.grid.decimated(decimation) if decimation > 1 else config.grid

        omega = noise_matrix(config, grid=design_grid, budget_bytes=budget)
        try:
            factor = cho_factor(omega, lower=True, overwrite_a=True, check_finite=True)
        except (LinAlgError, ValueError) as e:
            raise FactorizationError(f"noise matrix factorization failed: {e}")

        rows = response_rows(config, grid=design_grid)
        m_design = cho_solve(factor, rows.T, check_finite=False).T

        if decimation > 1:
            spline = CubicSpline(design_grid.times(), m_design, axis=1)
            # weights per design sample spread over `decimation` full-rate samples
            m = spline(config.grid.times()) / decimation
        else:
            m = m_design

        self.logger.info(f"✓ GLS filters designed on {design_grid.nt} samples (decimation {decimation})")
        return m, {"decimation": int(decimation)}


class AveragedDesigner(BaseFilterDesigner):
    """m_i = ⟨r_i⟩ with the Gaussian dephasing envelope; normalized by ⟨J⟩"""

    family = FilterFamily.AVG

    def __init__(self):
        super().__init__(name="avg_designer")

    def get_capabilities(self) -> ModuleCapability:
        return FilterCapability.AVERAGED

    def reference_response(self, config: SystemConfig) -> np.ndarray:
        return signal_response(config, averaged=True)

    def design_weights(self, config: SystemConfig, options: Dict[str, Any]) -> Tuple[np.ndarray, Dict[str, Any]]:
        if all(o.sigma == 0 for o in config.oscillators):
            logger.info("ℹ️  no frequency broadening configured, averaged filters equal OLS")
        return response_rows(config, averaged=True), {}
