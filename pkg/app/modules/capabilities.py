"""
Module Capability Definitions
Pre-defined capability sets for the filter families
"""

from app.modules.base import ModuleCapability


class FilterCapability:
    """Capability definitions for filter designers"""

    OLS = ModuleCapability(
        description="Projection onto the oscillator responses",
    )

    EXPONENTIAL = ModuleCapability(
        description="Damped sinusoids with adjustable decay rate",
        options={"gammas": "per-oscillator decay rate (rad/s) or 'auto'"},
    )

    GLS = ModuleCapability(
        description="Responses whitened by the two-time noise matrix",
        options={
            "decimation": "design-grid decimation factor or None for automatic",
            "budget_bytes": "noise-matrix memory budget or None for the configured one",
        },
    )

    AVERAGED = ModuleCapability(
        handles_broadening=True,
        description="Responses averaged over shot-to-shot frequency fluctuations",
    )
