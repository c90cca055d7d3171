"""Single-photon excitation of surface plasmon polaritons in attenuated
total reflection geometries."""

__version__ = "0.1.0"

from .errors import QsppError  # noqa: E402
from .materials import SILVER, Geometry, LayerStack, PermittivityModel  # noqa: E402

__all__ = ["__version__", "QsppError", "SILVER", "Geometry", "LayerStack", "PermittivityModel"]
