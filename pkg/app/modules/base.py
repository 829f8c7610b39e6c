"""
Base Module Interface
All pluggable computational modules inherit from this
"""

from typing import Dict
from abc import ABC, abstractmethod
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field

from app.core.logging import get_logger

logger = get_logger(__name__)


class ModuleType(str, Enum):
    """Types of pluggable modules"""
    FILTER_DESIGNER = "filter_designer"


class ModuleCapability(BaseModel):
    """Capability definition for a module"""

    model_config = ConfigDict(frozen=True)

    # Designers that cannot follow shot-to-shot frequency jitter warn on broadened configs
    handles_broadening: bool = False

    description: str = ""
    # Accepted option names and their meaning; anything else is rejected
    options: Dict[str, str] = Field(default_factory=dict)


class BaseModule(ABC):
    """
    Base class for all pluggable modules
    Modules declare capabilities and are looked up through the registry
    """

    def __init__(self, name: str, module_type: ModuleType):
        """
        Initialize base module

        Args:
            name: Module name
            module_type: Type of module
        """
        self.name = name
        self.module_type = module_type
        self.logger = get_logger(f"module.{name}")

    @abstractmethod
    def get_capabilities(self) -> ModuleCapability:
        """
        Return module capabilities

        Returns:
            ModuleCapability: What this module can do
        """
        pass

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}(name='{self.name}', type={self.module_type.value})>"
