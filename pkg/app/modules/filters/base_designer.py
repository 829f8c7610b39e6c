"""
Base Filter Designer
Abstract base for every filter family; shared normalization and checks
"""

from abc import abstractmethod
from typing import Any, Dict, Optional, Tuple

import numpy as np

from app.models.filters import FilterBank, FilterFamily
from app.models.system import SystemConfig
from app.modules.base import BaseModule, ModuleType
from app.modules.filters.response import riemann_sum, signal_response
from app.modules.physics.model import ensure_validated
from app.core.config import settings
from app.core.exceptions import ConfigValidationError, IllConditionedError
from app.core.logging import get_logger

logger = get_logger(__name__)


class BaseFilterDesigner(BaseModule):
    """
    Base class for all filter designers
    Subclasses produce weight rows; normalization is shared
    """

    family: FilterFamily = None

    def __init__(self, name: str):
        super().__init__(name=name, module_type=ModuleType.FILTER_DESIGNER)

    @abstractmethod
    def design_weights(
        self,
        config: SystemConfig,
        options: Dict[str, Any]
    ) -> Tuple[np.ndarray, Dict[str, Any]]:
        """
        Weight rows m(t_n) on the config grid

        Args:
            config: Validated configuration
            options: Family-specific options

        Returns:
            Tuple: (m of shape (2N, nt), extra FilterBank fields)
        """
        pass

    def reference_response(self, config: SystemConfig) -> np.ndarray:
        """Signal response entering J (the averaged one for broadened families)"""
        return signal_response(config)

    def build(
        self,
        config: SystemConfig,
        options: Optional[Dict[str, Any]] = None,
        check_condition: bool = True
    ) -> FilterBank:
        """
        Design the weights and attach J = Δt·Σ m Aᵀ

        Args:
            config: System configuration
            options: Family-specific options
            check_condition: Refuse banks whose cond(J) exceeds the limit

        Returns:
            FilterBank: Immutable bank
        """
        config = ensure_validated(config)
        options = options or {}
        capabilities = self.get_capabilities()
        unknown = sorted(set(options) - set(capabilities.options))
        if unknown:
            accepted = ", ".join(capabilities.options) or "none"
            raise ConfigValidationError(
                f"{self.family.value}.options", f"options in: {accepted}", ", ".join(unknown)
            )
        if not capabilities.handles_broadening and any(o.sigma > 0 for o in config.oscillators):
            self.logger.warning(
                f"⚠️  {self.family.value} filters ignore frequency broadening; the avg family accounts for it"
            )
        m, extra = self.design_weights(config, options)

        J = riemann_sum(m, self.reference_response(config), config.grid.dt)
        cond = float(np.linalg.cond(J))
        if check_condition and not cond <= settings.COND_LIMIT:
            raise IllConditionedError(cond, settings.COND_LIMIT)

        self.logger.debug(f"{capabilities.description}: cond(J)={cond:.3e}")
        return FilterBank(
            family=self.family,
            m=m,
            J=J,
            cond=cond,
            grid=config.grid,
            **extra
        )
