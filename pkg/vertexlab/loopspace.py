# vertexlab/loopspace.py
"""
Loops on the circle of length L and the quantities built from them.

A loop is stored through the decomposition

    f(x) = w * 2*pi*x/L + mean + (1/L) * sum_n modes[n] * exp(2*pi*i*n*x/L)

with integer mode labels n standing for the momenta p = 2*pi*n/L. Everything
downstream (cocycles, implementers, generating functions) consumes modes.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Union

import numpy as np

from .errors import LoopError, SingularityError

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
MODE_TOL = 1e-16


@dataclass(frozen=True)
class LatticeSpec:
    L: float = TWO_PI
    Lambda: int = 8

    def __post_init__(self):
        if self.L <= 0:
            raise LoopError(f"Circle length must be positive, got {self.L}")
        if self.Lambda < 0:
            raise LoopError(f"Level cutoff must be non-negative, got {self.Lambda}")

    def momentum(self, n: int) -> float:
        return TWO_PI * n / self.L

    def half_momentum(self, n: int) -> float:
        return TWO_PI * (n + 0.5) / self.L


@dataclass(frozen=True)
class BlipParams:
    y: float
    eps: float
    nu: float = 1.0
    nu0: float = 1.0

    def __post_init__(self):
        if self.eps <= 0:
            raise LoopError(f"Blip regulator must be positive, got eps={self.eps}")
        if self.nu0 <= 0:
            raise LoopError(f"Statistics unit must be positive, got nu0={self.nu0}")
        ratio = self.nu / self.nu0
        if abs(ratio - round(ratio)) > 1e-12:
            raise LoopError(f"nu={self.nu} is not an integer multiple of nu0={self.nu0}")


@dataclass(frozen=True)
class KernelParams:
    eps: float = 0.0
    q: float = 0.0
    L: float = TWO_PI

    def __post_init__(self):
        if not 0 <= self.q < 1:
            raise SingularityError(f"Elliptic nome must lie in [0, 1), got q={self.q}")
        if self.eps < 0:
            raise LoopError(f"Kernel regulator must be non-negative, got eps={self.eps}")


@dataclass(frozen=True)
class Loop:
    L: float
    winding: Union[int, Fraction] = 0
    mean: complex = 0.0
    modes: Dict[int, complex] = field(default_factory=dict)
    anyon_unit: Optional[float] = None

    def __post_init__(self):
        if 0 in self.modes:
            raise LoopError("Mode n=0 is carried by the mean, not by the mode table")
        if self.anyon_unit is None:
            if Fraction(self.winding).denominator != 1:
                raise LoopError(f"Non-integer winding {self.winding} on a loop not tagged anyon")
        else:
            # f~ itself winds 1/nu0; the anyon loops nu*f~ wind an integer nu/nu0
            charge = float(self.winding) * self.anyon_unit
            integral = Fraction(self.winding).denominator == 1
            if not integral and abs(charge - round(charge)) > 1e-12:
                raise LoopError(
                    f"Anyon loop winding {self.winding} is not a multiple of 1/nu0 (nu0={self.anyon_unit})"
                )

    def mode(self, n: int) -> complex:
        return self.modes.get(n, 0)

    @property
    def max_mode(self) -> int:
        return max((abs(n) for n in self.modes), default=0)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        value = float(self.winding) * TWO_PI * x / self.L + self.mean
        for n, coeff in self.modes.items():
            value = value + coeff * np.exp(1j * TWO_PI * n * x / self.L) / self.L
        return value

    def plus_part(self) -> "Loop":
        return Loop(self.L, 0, 0.0, {n: c for n, c in self.modes.items() if n > 0})

    def minus_part(self) -> "Loop":
        return Loop(self.L, 0, 0.0, {n: c for n, c in self.modes.items() if n < 0})

    def is_real(self, tol: float = 1e-12) -> bool:
        if abs(np.imag(self.mean)) > tol:
            return False
        return all(abs(c - np.conj(self.mode(-n))) <= tol for n, c in self.modes.items())

    def _check_compatible(self, other: "Loop"):
        if abs(self.L - other.L) > 1e-12 * self.L:
            raise LoopError(f"Loops live on different circles: {self.L} vs {other.L}")

    def __add__(self, other: "Loop") -> "Loop":
        self._check_compatible(other)
        modes = dict(self.modes)
        for n, c in other.modes.items():
            modes[n] = modes.get(n, 0) + c
        unit = self.anyon_unit or other.anyon_unit
        winding = Fraction(self.winding) + Fraction(other.winding)
        if winding.denominator == 1:
            winding = int(winding)
        return Loop(self.L, winding, self.mean + other.mean, modes, unit)

    def __neg__(self) -> "Loop":
        return self.scale(-1)

    def __sub__(self, other: "Loop") -> "Loop":
        return self + (-other)

    def scale(self, c: float) -> "Loop":
        winding = Fraction(self.winding) * Fraction(c).limit_denominator(10**6)
        if winding.denominator == 1:
            winding = int(winding)
        return Loop(self.L, winding, self.mean * c, {n: m * c for n, m in self.modes.items()}, self.anyon_unit)

    def to_record(self) -> dict:
        return {
            "L": self.L,
            "winding": str(Fraction(self.winding)),
            "mean": [float(np.real(self.mean)), float(np.imag(self.mean))],
            "modes": [
                {"n": n, "re": float(np.real(c)), "im": float(np.imag(c))}
                for n, c in sorted(self.modes.items())
            ],
            "anyon_unit": self.anyon_unit,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Loop":
        winding = Fraction(record["winding"])
        if winding.denominator == 1:
            winding = int(winding)
        mean = complex(*record["mean"]) if isinstance(record["mean"], list) else record["mean"]
        modes = {int(m["n"]): complex(m["re"], m["im"]) for m in record["modes"]}
        return cls(float(record["L"]), winding, mean, modes, record.get("anyon_unit"))


def decompose_loop(
    f: Union[Callable, np.ndarray],
    L: float = TWO_PI,
    max_mode: int = 32,
    anyon_unit: Optional[float] = None,
    tol: float = 1e-9,
) -> Loop:
    """
    Project a smooth loop onto winding, mean and finitely many modes.

    `f` is either a callable on [0, L] or an array of M+1 samples of the lifted
    function at x_j = j*L/M (endpoint included, so f(L) - f(0) = 2*pi*w).
    """
    if callable(f):
        M = 8 * max_mode
        x = np.linspace(0.0, L, M + 1)
        samples = np.asarray(f(x), dtype=complex)
    else:
        samples = np.asarray(f, dtype=complex)
        M = len(samples) - 1
        x = np.linspace(0.0, L, M + 1)
    if M < 4 * max_mode:
        raise LoopError(f"{M} samples cannot resolve modes up to {max_mode}")

    raw_winding = np.real(samples[-1] - samples[0]) / TWO_PI
    if anyon_unit is None:
        if abs(raw_winding - round(raw_winding)) > tol:
            raise LoopError(f"Winding {raw_winding:.6g} is not an integer for a loop not tagged anyon")
        winding = int(round(raw_winding))
    else:
        charge = raw_winding * anyon_unit
        if abs(charge - round(charge)) > tol:
            raise LoopError(f"Winding {raw_winding:.6g} is not a multiple of 1/nu0 (nu0={anyon_unit})")
        winding = Fraction(int(round(charge))) / Fraction(anyon_unit).limit_denominator(10**6)
        if winding.denominator == 1:
            winding = int(winding)

    periodic = samples[:-1] - float(winding) * TWO_PI * x[:-1] / L
    coeffs = np.fft.fft(periodic) / M
    mean = coeffs[0]
    modes = {}
    for n in range(1, max_mode + 1):
        for label in (n, -n):
            c = coeffs[label % M] * L
            if abs(c) > MODE_TOL:
                modes[label] = complex(c)

    loop = Loop(L, winding, complex(mean), modes, anyon_unit)
    residual = np.max(np.abs(loop.evaluate(x) - samples))
    if residual > tol * max(1.0, np.max(np.abs(samples))):
        raise LoopError(f"Band-limited projection misses the samples by {residual:.3g}; raise max_mode")
    logger.debug(f"Decomposed loop: winding={winding}, {len(modes)} modes, residual={residual:.3g}")
    return loop


def schwinger_term(a1: Loop, a2: Loop) -> complex:
    """i*S_hat(a1, a2) for the mode parts of two loops."""
    return 1j * _s_hat(a1, a2)


def _s_hat(a1: Loop, a2: Loop) -> complex:
    # summed over n > 0 pairs so that swapping arguments negates every term exactly
    a1._check_compatible(a2)
    labels = sorted({abs(n) for n in a1.modes} | {abs(n) for n in a2.modes})
    total = 0j
    for n in labels:
        total += n * (a1.mode(n) * a2.mode(-n) - a1.mode(-n) * a2.mode(n))
    return 1j * total / a1.L ** 2


def cocycle_S(f1: Loop, f2: Loop) -> complex:
    """S(f1, f2) = w1*mean2 - mean1*w2 + S_hat(alpha1, alpha2)."""
    w1, w2 = float(f1.winding), float(f2.winding)
    return (w1 * f2.mean - f1.mean * w2) + _s_hat(f1, f2)


def cocycle_tilde_S(f1: Loop, f2: Loop) -> complex:
    """w1*mean2 - mean1*w2 + 2*S_hat(alpha1^-, alpha2^+), the normal-ordering exponent."""
    w1, w2 = float(f1.winding), float(f2.winding)
    return (w1 * f2.mean - f1.mean * w2) + 2 * _s_hat(f1.minus_part(), f2.plus_part())


def _blip_cutoff(eps: float, L: float, tol: float = MODE_TOL) -> int:
    lam = math.exp(-TWO_PI * eps / L)
    n = 1
    # tail of sum_{k>n} lam^k / k is below lam^(n+1) / ((n+1)(1-lam))
    while lam ** (n + 1) / ((n + 1) * (1 - lam)) >= tol:
        n += 1
    return n


def _blip_modes(y: float, eps: float, L: float, n_max: Optional[int]) -> Dict[int, complex]:
    if eps <= 0:
        raise LoopError(f"Blip regulator must be positive, got eps={eps}")
    n_max = n_max or _blip_cutoff(eps, L)
    lam = math.exp(-TWO_PI * eps / L)
    modes = {}
    for n in range(1, n_max + 1):
        weight = L * lam ** n / n
        phase = np.exp(-1j * TWO_PI * n * y / L)
        modes[n] = -1j * weight * phase
        modes[-n] = 1j * weight * np.conj(phase)
    return modes


def blip(y: float, eps: float, L: float = TWO_PI, n_max: Optional[int] = None) -> Loop:
    """The smoothed step f_{y,eps}: winding one, tending to pi*sgn(x - y)."""
    return Loop(L, 1, -TWO_PI * y / L, _blip_modes(y, eps, L, n_max))


def anyon_blip(y: float, eps: float, nu0: float, L: float = TWO_PI, n_max: Optional[int] = None) -> Loop:
    winding = Fraction(1) / Fraction(nu0).limit_denominator(10**6)
    if winding.denominator == 1:
        winding = int(winding)
    return Loop(L, winding, -TWO_PI * nu0 * y / L, _blip_modes(y, eps, L, n_max), anyon_unit=nu0)


def anyon_loop(params: BlipParams, L: float = TWO_PI, n_max: Optional[int] = None) -> Loop:
    """nu * f~_{y,eps}: the loop whose implementer is the anyon field phi^nu_eps(y)."""
    return anyon_blip(params.y, params.eps, params.nu0, L, n_max).scale(params.nu)


def smoothed_delta(y: float, eps: float, L: float = TWO_PI, n_max: Optional[int] = None) -> Loop:
    """delta_{y,eps} = d/dx f_{y,eps} / 2pi, a zero-winding loop with mean 1/L."""
    if eps <= 0:
        raise LoopError(f"Blip regulator must be positive, got eps={eps}")
    n_max = n_max or _blip_cutoff(eps, L)
    lam = math.exp(-TWO_PI * eps / L)
    modes = {}
    for n in range(1, n_max + 1):
        phase = np.exp(-1j * TWO_PI * n * y / L)
        modes[n] = lam ** n * phase
        modes[-n] = lam ** n * np.conj(phase)
    return Loop(L, 0, 1.0 / L, modes)


def sgn_eps(r, eps: float, L: float = TWO_PI):
    """f_{0,eps}(r)/pi in closed form; odd in r and tends to sgn(r)."""
    if eps <= 0:
        raise LoopError(f"sgn_eps needs eps > 0, got {eps}")
    theta = TWO_PI * np.asarray(r, dtype=float) / L
    lam = math.exp(-TWO_PI * eps / L)
    return (theta - 2 * np.angle(1 - lam * np.exp(1j * theta))) / math.pi


def _q_product(theta, lam: float, q: float, tol: float = MODE_TOL):
    theta = np.asarray(theta, dtype=float)
    product = np.ones_like(theta)
    if q == 0:
        return product
    n = 1
    while True:
        x = q ** (2 * n) * lam
        factor = 1 - 2 * x * np.cos(theta) + x * x
        product = product * factor
        if np.max(np.abs(factor - 1)) < tol:
            break
        n += 1
    return product


def kernel_b(r, params: KernelParams):
    """b_eps(r) = -2i e^{-pi eps/L} sin(pi(r + i eps)/L), times the thermal product when q > 0."""
    L, eps = params.L, params.eps
    r = np.asarray(r, dtype=float)
    base = -2j * math.exp(-math.pi * eps / L) * np.sin(math.pi * (r + 1j * eps) / L)
    lam = math.exp(-TWO_PI * eps / L)
    return base * _q_product(TWO_PI * r / L, lam, params.q)


def kernel_b_power(r, mu: float, params: KernelParams, floor: float = 1e-300):
    """b^mu on the fixed branch e^{-i pi mu r/L} (1 - e^{2 pi i r/L} e^{-2 pi eps/L})^mu (product)^mu."""
    L, eps = params.L, params.eps
    r = np.asarray(r, dtype=float)
    lam = math.exp(-TWO_PI * eps / L)
    theta = TWO_PI * r / L
    core = 1 - lam * np.exp(1j * theta)
    if mu < 0 and np.min(np.abs(core)) < floor:
        raise SingularityError(f"Kernel power b^{mu} at a coincident point with eps={eps}")
    value = np.exp(-1j * math.pi * mu * r / L) * core ** mu
    if params.q > 0:
        value = value * _q_product(theta, lam, params.q) ** mu
    return value
