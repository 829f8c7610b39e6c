"""
Computational Modules Package
Designer registry and base interfaces
"""

__all__ = [
    "BaseModule",
    "ModuleCapability",
    "ModuleRegistry",
    "get_fully_loaded_registry",
]


def __getattr__(name):
    # Lazy imports to avoid circular dependency
    if name in ("BaseModule", "ModuleCapability"):
        from app.modules import base
        return getattr(base, name)
    elif name in ("ModuleRegistry", "get_fully_loaded_registry"):
        from app.modules import registry
        return getattr(registry, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
