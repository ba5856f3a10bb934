# vertexlab/series.py
"""
Truncated power series in one variable, and Laurent polynomials in several
variables on a symmetric exponent window.

TruncatedSeries carries the generating-function parameter through the
implementer matrix elements; CorrelatorSeries extracts Fourier coefficients of
products of kernel powers without sampling.
"""
import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import signal

from .errors import SingularityError, WindowError

logger = logging.getLogger(__name__)


class TruncatedSeries:
    """c_0 + c_1 a + ... + c_order a^order, everything above `order` discarded."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int):
        data = np.zeros(order + 1, dtype=complex)
        values = np.asarray(list(coeffs), dtype=complex)[: order + 1]
        data[: len(values)] = values
        self.coeffs = data
        self.order = order

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        return cls([c], order)

    @classmethod
    def variable(cls, order: int) -> "TruncatedSeries":
        return cls([0, 1], order)

    def __getitem__(self, k: int) -> complex:
        return self.coeffs[k] if 0 <= k <= self.order else 0j

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.order != self.order:
                raise ValueError(f"Series orders differ: {self.order} vs {other.order}")
            return other
        return TruncatedSeries.constant(complex(other), self.order)

    def __add__(self, other) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs + self._coerce(other).coeffs, self.order)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.coeffs, self.order)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.coeffs * complex(other), self.order)
        other = self._coerce(other)
        return TruncatedSeries(np.convolve(self.coeffs, other.coeffs)[: self.order + 1], self.order)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return TruncatedSeries(self.coeffs / complex(other), self.order)

    def __pow__(self, k: int) -> "TruncatedSeries":
        if int(k) != k or k < 0:
            return self.power(k)
        result = TruncatedSeries.constant(1, self.order)
        base = self
        k = int(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def reciprocal(self) -> "TruncatedSeries":
        c = self.coeffs
        if c[0] == 0:
            raise SingularityError("Reciprocal of a series with vanishing constant term")
        out = np.zeros_like(c)
        out[0] = 1 / c[0]
        for k in range(1, self.order + 1):
            out[k] = -np.dot(c[1 : k + 1], out[k - 1 :: -1][:k]) / c[0]
        return TruncatedSeries(out, self.order)

    def exp(self) -> "TruncatedSeries":
        c = self.coeffs
        out = np.zeros_like(c)
        out[0] = np.exp(c[0])
        for k in range(1, self.order + 1):
            j = np.arange(1, k + 1)
            out[k] = np.sum(j * c[j] * out[k - j]) / k
        return TruncatedSeries(out, self.order)

    def log(self) -> "TruncatedSeries":
        c = self.coeffs
        if c[0] == 0:
            raise SingularityError("Logarithm of a series with vanishing constant term")
        out = np.zeros_like(c)
        out[0] = np.log(c[0])
        for k in range(1, self.order + 1):
            j = np.arange(1, k)
            out[k] = (c[k] - np.sum(j * out[j] * c[k - j]) / k) / c[0]
        return TruncatedSeries(out, self.order)

    def power(self, mu: float) -> "TruncatedSeries":
        return (self.log() * mu).exp()

    def sin(self) -> "TruncatedSeries":
        return ((self * 1j).exp() - (self * -1j).exp()) / 2j

    def cos(self) -> "TruncatedSeries":
        return ((self * 1j).exp() + (self * -1j).exp()) / 2

    def shift_down(self, k: int) -> "TruncatedSeries":
        """Divide by a^k; the dropped low coefficients must vanish."""
        if np.max(np.abs(self.coeffs[:k]), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(self.coeffs))):
            raise SingularityError(f"Series is not divisible by a^{k}")
        return TruncatedSeries(self.coeffs[k:], self.order)

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.coeffs.tolist()}, order={self.order})"


def sinc_reciprocal(scale: float, order: int) -> TruncatedSeries:
    """x / sin(x) at x = scale * a."""
    x = TruncatedSeries.variable(order + 2) * scale
    ratio = x.sin().shift_down(1) / scale
    inv = ratio.reciprocal()
    return TruncatedSeries(inv.coeffs[: order + 1], order)


class CorrelatorSeries:
    """
    Laurent polynomial in u_1..u_N with every exponent in [-bound, bound].

    Products are cropped back to the window after each multiplication; terms
    pushed outside are dropped, so the window must cover every exponent that
    can feed the coefficient one wants.
    """

    def __init__(self, data: np.ndarray, bound: int):
        self.data = np.asarray(data, dtype=complex)
        self.bound = bound
        if any(size != 2 * bound + 1 for size in self.data.shape):
            raise WindowError(f"Series array of shape {self.data.shape} does not match bound {bound}")

    @property
    def n_vars(self) -> int:
        return self.data.ndim

    @classmethod
    def one(cls, n_vars: int, bound: int) -> "CorrelatorSeries":
        data = np.zeros((2 * bound + 1,) * n_vars, dtype=complex)
        data[(bound,) * n_vars] = 1
        return cls(data, bound)

    @staticmethod
    def _binomial_coeffs(c: complex, mu: float, count: int) -> np.ndarray:
        # (1 - c t)^mu = sum_k coef_k t^k with coef_{k+1} = coef_k * c (k - mu) / (k + 1)
        coefs = np.zeros(count, dtype=complex)
        coefs[0] = 1
        for k in range(count - 1):
            coefs[k + 1] = coefs[k] * c * (k - mu) / (k + 1)
        return coefs

    @classmethod
    def binomial_ratio(cls, n_vars: int, bound: int, i: int, j: int, c: complex, mu: float) -> "CorrelatorSeries":
        """(1 - c u_i / u_j)^mu, expanded in powers of u_i / u_j."""
        if i == j:
            raise WindowError("binomial_ratio needs two distinct variables")
        out = np.zeros((2 * bound + 1,) * n_vars, dtype=complex)
        for k, coef in enumerate(cls._binomial_coeffs(c, mu, bound + 1)):
            index = [bound] * n_vars
            index[i] += k
            index[j] -= k
            out[tuple(index)] = coef
        return cls(out, bound)

    @classmethod
    def binomial_single(cls, n_vars: int, bound: int, i: int, c: complex, mu: float, inverse: bool = False) -> "CorrelatorSeries":
        """(1 - c u_i)^mu, or (1 - c / u_i)^mu when `inverse`."""
        out = np.zeros((2 * bound + 1,) * n_vars, dtype=complex)
        sign = -1 if inverse else 1
        for k, coef in enumerate(cls._binomial_coeffs(c, mu, bound + 1)):
            index = [bound] * n_vars
            index[i] += sign * k
            out[tuple(index)] = coef
        return cls(out, bound)

    def __mul__(self, other: "CorrelatorSeries") -> "CorrelatorSeries":
        if other.bound != self.bound or other.n_vars != self.n_vars:
            raise WindowError("Series windows differ")
        full = signal.convolve(self.data, other.data, mode="full", method="direct")
        b = self.bound
        crop = tuple(slice(b, b + 2 * b + 1) for _ in range(self.n_vars))
        return CorrelatorSeries(full[crop], b)

    def scale(self, c: complex) -> "CorrelatorSeries":
        return CorrelatorSeries(self.data * c, self.bound)

    def coefficient(self, exponents: Sequence[int]) -> complex:
        if len(exponents) != self.n_vars:
            raise WindowError(f"Expected {self.n_vars} exponents, got {len(exponents)}")
        if any(abs(e) > self.bound for e in exponents):
            raise WindowError(f"Exponents {tuple(exponents)} outside the window +-{self.bound}")
        return complex(self.data[tuple(e + self.bound for e in exponents)])

    @classmethod
    def from_grid(cls, values: np.ndarray, bound: int, radii: Optional[Sequence[float]] = None) -> "CorrelatorSeries":
        """
        Fourier coefficients of samples on the grid u_j = r_j exp(2 pi i k/M):
        the coefficient of u^e is the mean of values * u^-e. Radii default to 1;
        Laurent series converging only on an annulus need radii inside it.
        """
        values = np.asarray(values, dtype=complex)
        M = values.shape[0]
        if M < 2 * bound + 1:
            raise WindowError(f"Grid of {M} points cannot resolve exponents up to {bound}")
        if radii is not None and len(radii) != values.ndim:
            raise WindowError(f"Expected {values.ndim} radii, got {len(radii)}")
        coeffs = np.fft.fftn(values) / M ** values.ndim
        index = np.arange(-bound, bound + 1) % M
        cropped = coeffs[np.ix_(*([index] * values.ndim))]
        for axis, r in enumerate(radii or ()):
            shape = [1] * values.ndim
            shape[axis] = -1
            cropped = cropped / (float(r) ** np.arange(-bound, bound + 1)).reshape(shape)
        return cls(cropped, bound)


def window_bound(n_vars: int, level: int) -> int:
    return max(1, n_vars * level)


def factorial_weights(order: int) -> np.ndarray:
    return np.array([math.factorial(k) for k in range(order + 1)], dtype=float)
