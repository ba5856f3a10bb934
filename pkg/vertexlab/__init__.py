# vertexlab/__init__.py
"""
Vertex operators, anyon fields and W_{1+infinity} generators on a truncated
boson Fock space, with Calogero-Sutherland eigenfunctions and the genus-1
Szego kernel as applications.
"""
from .errors import (
    CalibrationError,
    ConfigError,
    EigenRatioError,
    LoopError,
    SectorError,
    SingularityError,
    VertexLabError,
    WindowError,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationError",
    "ConfigError",
    "EigenRatioError",
    "LoopError",
    "SectorError",
    "SingularityError",
    "VertexLabError",
    "WindowError",
]
