# vertexlab/torus.py
"""
Theta functions, the genus-1 Szego kernel and the KMS projection of
finite-temperature free fermions on the circle.

Modes are labelled by integers n with momentum k = n + 1/2; the Fermi factor
of mode n is e^{-beta k} / (1 + e^{-beta k}).
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np
from scipy import special

from .errors import SingularityError, VertexLabError

logger = logging.getLogger(__name__)

TAIL_TOL = 1e-17


@dataclass(frozen=True)
class ThetaParams:
    q: float

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise SingularityError(f"Theta nome must lie in (0, 1), got q={self.q}")

    @classmethod
    def from_beta(cls, beta: float) -> "ThetaParams":
        return cls(torus_nome(beta))

    @property
    def beta(self) -> float:
        return -2 * math.log(self.q)

    def cutoff(self, shift: float = 0.0, growth: float = 0.0) -> int:
        """Smallest n with q^{(n+shift)^2} e^{growth (n+shift)} below the tail tolerance."""
        n = 0
        log_q = math.log(self.q)
        while (n + shift) ** 2 * log_q + growth * (n + shift) > math.log(TAIL_TOL) or n < 2:
            n += 1
        return n


@dataclass(frozen=True)
class KMSProjectionSpec:
    beta: float
    n_max: int = 16

    def __post_init__(self):
        if self.beta <= 0:
            raise VertexLabError(f"Inverse temperature must be positive, got beta={self.beta}")

    def modes(self) -> range:
        return range(-self.n_max, self.n_max + 1)


def torus_nome(beta: float) -> float:
    return math.exp(-beta / 2)


def nome_from_beta(beta: float, L: float) -> float:
    """Nome of the thermal pair kernel at inverse temperature beta on a circle of length L."""
    return math.exp(-beta * L / (2 * math.pi))


def fermi_factor(n, beta: float):
    k = np.asarray(n, dtype=float) + 0.5
    return special.expit(-beta * k)


def theta1(xi, params: ThetaParams):
    """2 sum_n (-1)^n q^{(n+1/2)^2} sin((n+1/2) xi); accepts complex arguments."""
    xi = np.asarray(xi, dtype=complex)
    growth = float(np.max(np.abs(xi.imag), initial=0.0))
    top = params.cutoff(0.5, growth)
    value = np.zeros_like(xi)
    for n in range(top + 1):
        k = n + 0.5
        value += 2 * (-1) ** n * params.q ** (k * k) * np.sin(k * xi)
    return value


def theta1_prime0(params: ThetaParams) -> float:
    top = params.cutoff(0.5)
    return float(sum(2 * (-1) ** n * params.q ** ((n + 0.5) ** 2) * (n + 0.5) for n in range(top + 1)))


def theta3(xi, params: ThetaParams):
    """1 + 2 sum_{n>0} q^{n^2} cos(n xi); accepts complex arguments."""
    xi = np.asarray(xi, dtype=complex)
    growth = float(np.max(np.abs(xi.imag), initial=0.0))
    top = params.cutoff(0.0, growth)
    value = np.ones_like(xi)
    for n in range(1, top + 1):
        value += 2 * params.q ** (n * n) * np.cos(n * xi)
    return value


def szego_kernel(phi, xi, params: ThetaParams, min_distance: float = 1e-8):
    """theta3(phi - xi) theta1'(0) / (theta3(0) theta1(phi - xi)), the scalar part of the kernel."""
    t = np.asarray(phi, dtype=complex) - np.asarray(xi, dtype=complex)
    denominator = theta1(t, params)
    if np.min(np.abs(denominator), initial=np.inf) < min_distance:
        raise SingularityError("Szego kernel evaluated at its pole")
    return theta3(t, params) * theta1_prime0(params) / (theta3(0.0, params) * denominator)


def _contour(beta: float, grid: int) -> np.ndarray:
    s = 2 * math.pi * np.arange(grid) / grid
    return s - 0.5j * beta


def fermi_kernel(t, beta: float):
    """sum_n Fermi(n) e^{i n t} from the Szego kernel; the series converges for -beta < Im t < 0."""
    params = ThetaParams.from_beta(beta)
    t = np.asarray(t, dtype=complex)
    return -1j * np.exp(-0.5j * t) * szego_kernel(t, 0.0, params)


def szego_identity_residual(beta: float, grid: int = 64) -> float:
    """
    max |sum_n Fermi(n) e^{i n t} - (-i) e^{-i t/2} S(t)| on the contour
    Im t = -beta/2, inside the annulus where the mode sum converges.
    """
    t = _contour(beta, grid)
    top = ThetaParams.from_beta(beta).cutoff(0.0) + int(2 * math.log(1 / TAIL_TOL) / beta) + 4
    n = np.arange(-top, top + 1)
    direct = (fermi_factor(n, beta)[None, :] * np.exp(1j * np.outer(t, n))).sum(axis=1)
    residual = float(np.max(np.abs(direct - fermi_kernel(t, beta))))
    logger.info(f"Szego identity at beta={beta}: residual {residual:.3g} over {grid} contour points")
    return residual


def szego_fourier_coefficients(beta: float, n_range: Iterable[int], grid: int = 128) -> Dict[int, complex]:
    """Fourier coefficients of e^{-i t/2} S(t) by the trapezoid rule on Im t = -beta/2."""
    t = _contour(beta, grid)
    values = np.exp(-0.5j * t) * szego_kernel(t, 0.0, ThetaParams.from_beta(beta))
    return {n: complex(np.mean(values * np.exp(-1j * n * t))) for n in n_range}


def kms_projection_block(n: int, beta: float) -> np.ndarray:
    """P(A(beta)) restricted to mode n: [[A, sqrt(A(1-A))], [sqrt(A(1-A)), 1-A]]."""
    A = float(fermi_factor(n, beta))
    off = math.sqrt(A * (1 - A))
    return np.array([[A, off], [off, 1 - A]])


def kms_project(f_modes: Dict[int, complex], spec: KMSProjectionSpec) -> Tuple[Dict[int, complex], Dict[int, complex]]:
    """(g1, g2) = P(A(beta)) (f, 0), mode by mode."""
    g1, g2 = {}, {}
    for n, c in f_modes.items():
        if n not in spec.modes():
            raise VertexLabError(f"Mode {n} outside the range |n| <= {spec.n_max}")
        block = kms_projection_block(n, spec.beta)
        g1[n] = complex(block[0, 0] * c)
        g2[n] = complex(block[1, 0] * c)
    return g1, g2


def _evaluate_modes(f_modes: Dict[int, complex], z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return sum(c * np.exp(1j * n * z) for n, c in f_modes.items())


def szego_extension(
    f_modes: Dict[int, complex], beta: float, grid: int = 128
) -> Tuple[Dict[int, complex], Dict[int, complex]]:
    """
    g1 and g2 by integrating the kernel against f: g1 on the shifted contour
    with f continued into the strip, g2 on the real circle against the kernel
    on the opposite boundary. Returns both as Fourier modes read off the grid.
    """
    if max((abs(n) for n in f_modes), default=0) >= grid // 2:
        raise VertexLabError(f"Grid of {grid} points cannot resolve the modes of f")
    xi = 2 * math.pi * np.arange(grid) / grid
    t = _contour(beta, grid)
    K = fermi_kernel(t, beta)
    g1_grid = np.array([np.mean(K * _evaluate_modes(f_modes, x - t)) for x in xi])
    s = t.real
    g2_grid = np.array([np.mean(math.exp(beta / 4) * K * _evaluate_modes(f_modes, x - s)) for x in xi])
    coeffs1 = np.fft.fft(g1_grid) / grid
    coeffs2 = np.fft.fft(g2_grid) / grid
    g1 = {n: complex(coeffs1[n % grid]) for n in f_modes}
    g2 = {n: complex(coeffs2[n % grid]) for n in f_modes}
    return g1, g2
