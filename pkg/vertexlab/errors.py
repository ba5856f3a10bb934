# vertexlab/errors.py
"""Exception hierarchy shared by the library, the CLI and the function app."""


class VertexLabError(Exception):
    """Base class for every error raised on purpose by vertexlab."""


class ConfigError(VertexLabError):
    """Invalid run configuration or violated precondition at an entry point."""


class LoopError(VertexLabError):
    """Loop data that cannot be decomposed or regularized."""


class SectorError(VertexLabError):
    """Winding sector outside the truncated Fock space."""


class WindowError(VertexLabError):
    """Fermion momentum outside the window, or a window overflow."""


class SingularityError(VertexLabError):
    """Evaluation at a coincident point, a pole, or a nome q >= 1."""


class CalibrationError(VertexLabError):
    """No correction weight makes the one-particle relation hold."""


class EigenRatioError(VertexLabError):
    """apply_H(F)/F is not constant over the sample grid."""
