"""
Module Registry
Central registry of filter designers, keyed by filter family
"""

from typing import Dict, Optional

from app.models.filters import FilterFamily
from app.modules.base import BaseModule
from app.core.logging import get_logger

logger = get_logger(__name__)


class ModuleRegistry:
    """
    Central registry for all filter designers
    Singleton pattern - only one registry exists
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        """Initialize module registry"""
        if self._initialized:
            return

        self.modules: Dict[str, BaseModule] = {}
        self.modules_by_family: Dict[FilterFamily, BaseModule] = {}
        self._initialized = True

        logger.debug("ModuleRegistry initialized")

    def register(self, module: BaseModule):
        """
        Register a designer

        Args:
            module: Designer to register (must expose `family`)
        """
        if module.name in self.modules:
            logger.warning(f"Module '{module.name}' already registered, replacing")

        self.modules[module.name] = module
        family = getattr(module, "family", None)
        if family is not None:
            self.modules_by_family[FilterFamily(family)] = module

        logger.debug(f"✓ Registered module: {module.name} (type: {module.module_type.value})")

    def get_by_family(self, family) -> Optional[BaseModule]:
        """Get the designer of a filter family"""
        return self.modules_by_family.get(FilterFamily(family))

    def clear(self):
        """Clear all registered modules (for testing)"""
        self.modules.clear()
        self.modules_by_family.clear()
        logger.debug("Registry cleared")


def register_all_modules(registry: Optional[ModuleRegistry] = None) -> ModuleRegistry:
    """Register the four built-in filter designers"""
    registry = registry or ModuleRegistry()

    from app.modules.filters.designers import (
        AveragedDesigner,
        ExponentialDesigner,
        GLSDesigner,
        OLSDesigner,
    )
    for designer in (OLSDesigner(), ExponentialDesigner(), GLSDesigner(), AveragedDesigner()):
        registry.register(designer)
    return registry


def get_fully_loaded_registry() -> ModuleRegistry:
    """Registry with every built-in designer, registering on first use"""
    registry = ModuleRegistry()
    if len(registry.modules_by_family) < len(FilterFamily):
        register_all_modules(registry)
    return registry
