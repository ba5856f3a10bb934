# vertexlab/fock.py
"""
Truncated bosonic Fock space.

Basis vectors are the unnormalized states prod_n rho(-n)^{m_n} R^w Omega. Mode
labels are integers n (momentum 2*pi*n/L); with these labels the Heisenberg
relation reads [rho(n), rho(m)] = n * delta_{n,-m}, independent of L, and the
Gram matrix is diagonal with entries prod_n m_n! n^{m_n}.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import sparse

from .errors import LoopError, SectorError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncationSpec:
    Lambda: int
    wmin: int = 0
    wmax: int = 0

    def __post_init__(self):
        if self.Lambda < 0:
            raise SectorError(f"Level cutoff must be non-negative, got {self.Lambda}")
        if self.wmin > self.wmax:
            raise SectorError(f"Empty sector range [{self.wmin}, {self.wmax}]")

    def has_sector(self, w: int) -> bool:
        return self.wmin <= w <= self.wmax

    def contains(self, state: "FockBasisState") -> bool:
        return state.level <= self.Lambda and self.has_sector(state.sector)


@dataclass(frozen=True, order=True)
class FockBasisState:
    sector: int = 0
    occ: Tuple[int, ...] = ()

    def __post_init__(self):
        if any(m < 0 for m in self.occ):
            raise LoopError(f"Negative occupation in {self.occ}")
        if self.occ and self.occ[-1] == 0:
            object.__setattr__(self, "occ", _strip(self.occ))

    @property
    def level(self) -> int:
        return sum(n * m for n, m in enumerate(self.occ, start=1))

    def m(self, n: int) -> int:
        return self.occ[n - 1] if 0 < n <= len(self.occ) else 0

    def with_mode(self, n: int, delta: int) -> "FockBasisState":
        occ = list(self.occ) + [0] * max(0, n - len(self.occ))
        occ[n - 1] += delta
        return FockBasisState(self.sector, _strip(tuple(occ)))

    def with_sector(self, w: int) -> "FockBasisState":
        return FockBasisState(w, self.occ)

    def label(self) -> str:
        parts = [f"{n}^{m}" for n, m in enumerate(self.occ, start=1) if m]
        return f"w={self.sector}[" + ",".join(parts) + "]"


def _strip(occ: Tuple[int, ...]) -> Tuple[int, ...]:
    occ = list(occ)
    while occ and occ[-1] == 0:
        occ.pop()
    return tuple(occ)


VACUUM = FockBasisState()


def gram(state: FockBasisState) -> int:
    """<state, state> for the unnormalized basis; states are mutually orthogonal."""
    value = 1
    for n, m in enumerate(state.occ, start=1):
        value *= math.factorial(m) * n ** m
    return value


class FockVector(dict):
    """Sparse map FockBasisState -> amplitude, carrying the weight lost to truncation."""

    metric = staticmethod(lambda state: gram(state))

    def __init__(self, *args, loss: float = 0.0, **kwargs):
        super().__init__(*args, **kwargs)
        self.loss = loss

    def add(self, state: FockBasisState, coeff):
        if coeff == 0:
            return
        total = self.get(state, 0) + coeff
        if total == 0:
            self.pop(state, None)
        else:
            self[state] = total

    def __add__(self, other: "FockVector") -> "FockVector":
        out = type(self)(self, loss=self.loss + getattr(other, "loss", 0.0))
        for state, coeff in other.items():
            out.add(state, coeff)
        return out

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def scale(self, c) -> "FockVector":
        out = type(self)(loss=self.loss * abs(c) ** 2)
        for state, coeff in self.items():
            out.add(state, coeff * c)
        return out

    def inner(self, other: "FockVector"):
        """<self, other>, antilinear in self."""
        total = 0
        for state, coeff in other.items():
            if state in self:
                total += _conj(self[state]) * coeff * self.metric(state)
        return total

    def norm2(self) -> float:
        return float(sum(abs(c) ** 2 * self.metric(s) for s, c in self.items()))

    def max_abs(self) -> float:
        return max((abs(c) for c in self.values()), default=0.0)


def _conj(x):
    return x.conjugate() if hasattr(x, "conjugate") else x


def basis_vector(state: FockBasisState, coeff=1) -> FockVector:
    return FockVector({state: coeff})


def partitions(level: int, largest: Optional[int] = None) -> Iterable[Tuple[int, ...]]:
    """Partitions of `level` as weakly decreasing tuples, lexicographically descending."""
    largest = level if largest is None else largest
    if level == 0:
        yield ()
        return
    for part in range(min(level, largest), 0, -1):
        for rest in partitions(level - part, part):
            yield (part,) + rest


def partition_to_occ(parts: Tuple[int, ...]) -> Tuple[int, ...]:
    if not parts:
        return ()
    occ = [0] * max(parts)
    for part in parts:
        occ[part - 1] += 1
    return tuple(occ)


def occ_to_partition(occ: Tuple[int, ...]) -> Tuple[int, ...]:
    parts = []
    for n in range(len(occ), 0, -1):
        parts.extend([n] * occ[n - 1])
    return tuple(parts)


@lru_cache(maxsize=None)
def _level_states(level: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(partition_to_occ(p) for p in partitions(level))


def enumerate_basis(spec: TruncationSpec) -> List[FockBasisState]:
    """All partitions of levels 0..Lambda in every sector, ordered by sector, level, then lex."""
    return [
        FockBasisState(w, occ)
        for w in range(spec.wmin, spec.wmax + 1)
        for level in range(spec.Lambda + 1)
        for occ in _level_states(level)
    ]


def states_at(level: int, sector: int) -> List[FockBasisState]:
    return [FockBasisState(sector, occ) for occ in _level_states(level)]


def apply_rho(n: int, v: FockVector, spec: TruncationSpec) -> FockVector:
    """rho(n): n > 0 lowers mode n with factor n*m_n, n < 0 raises mode |n|, n = 0 is Q."""
    if n == 0:
        return apply_Q(v)
    out = FockVector(loss=v.loss)
    for state, coeff in v.items():
        if n > 0:
            m = state.m(n)
            if m:
                out.add(state.with_mode(n, -1), coeff * n * m)
        else:
            target = state.with_mode(-n, 1)
            if target.level > spec.Lambda:
                out.loss += abs(coeff) ** 2 * gram(target)
            else:
                out.add(target, coeff)
    if out.loss > v.loss:
        logger.debug(f"rho({n}) dropped weight {out.loss - v.loss:.3g} above level {spec.Lambda}")
    return out


def apply_Q(v: FockVector) -> FockVector:
    out = FockVector(loss=v.loss)
    for state, coeff in v.items():
        out.add(state, coeff * state.sector)
    return out


def apply_R(power, v: FockVector, spec: TruncationSpec, unit=1) -> FockVector:
    """
    R^power shifts the sector label and commutes with every rho mode.

    Sectors are counted in multiples of `unit`: an anyon field of charge nu
    carries R^nu, and with unit = nu that is a shift by one sector. Any power
    that is not a whole number of units raises SectorError.
    """
    shift = Fraction(power).limit_denominator(10 ** 6) / Fraction(unit).limit_denominator(10 ** 6)
    if shift.denominator != 1:
        raise SectorError(f"R^{power} is not a whole number of sectors of size {unit}")
    out = FockVector(loss=v.loss)
    for state, coeff in v.items():
        target = state.sector + int(shift)
        if not spec.has_sector(target):
            raise SectorError(f"R^{power} leaves the sector range [{spec.wmin}, {spec.wmax}] at w={target}")
        out.add(state.with_sector(target), coeff)
    return out


def apply_dGamma(alpha, v: FockVector, spec: TruncationSpec) -> FockVector:
    """dGamma(alpha) = mean*Q + (1/L) sum_n alpha_hat(n) rho(-n) for a zero-winding loop."""
    if alpha.winding != 0:
        raise LoopError(f"dGamma needs a zero-winding loop, got winding {alpha.winding}")
    out = apply_Q(v).scale(alpha.mean) if alpha.mean != 0 else FockVector(loss=v.loss)
    for n, coeff in alpha.modes.items():
        out = out + apply_rho(-n, v, spec).scale(coeff / alpha.L)
    return out


class SparseOperator:
    """
    Linear operator on the truncated space, defined by its action on basis
    states. Rows are computed lazily and cached; states pushed out of the
    truncation are dropped and their weight is kept on the result's `loss`.
    """

    def __init__(self, action: Callable[[FockBasisState], FockVector], name: str = "op"):
        self._action = action
        self._rows: Dict[FockBasisState, FockVector] = {}
        self.name = name

    def row(self, state: FockBasisState) -> FockVector:
        if state not in self._rows:
            self._rows[state] = self._action(state)
        return self._rows[state]

    def apply(self, v: FockVector) -> FockVector:
        out = type(v)(loss=v.loss)
        for state, coeff in v.items():
            image = self.row(state)
            out.loss += abs(coeff) ** 2 * image.loss
            for target, c in image.items():
                out.add(target, coeff * c)
        return out

    def materialize(self, basis: List[FockBasisState], n_jobs: int = 1):
        missing = [s for s in basis if s not in self._rows]
        if n_jobs > 1 and len(missing) > 1:
            rows = Parallel(n_jobs=n_jobs)(delayed(self._action)(s) for s in missing)
            self._rows.update(zip(missing, rows))
        else:
            for state in missing:
                self.row(state)
        return self

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(lambda s: self.apply(other.row(s)), f"{self.name}*{other.name}")

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(lambda s: self.row(s) + other.row(s), f"({self.name}+{other.name})")

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(lambda s: self.row(s) - other.row(s), f"({self.name}-{other.name})")

    def scale(self, c) -> "SparseOperator":
        return SparseOperator(lambda s: self.row(s).scale(c), f"{c}*{self.name}")

    def commutator(self, other: "SparseOperator") -> "SparseOperator":
        return (self @ other) - (other @ self)

    def to_matrix(self, basis: List[FockBasisState], dtype=complex) -> sparse.csr_matrix:
        index = {s: i for i, s in enumerate(basis)}
        rows, cols, data = [], [], []
        for j, state in enumerate(basis):
            for target, coeff in self.row(state).items():
                if target in index:
                    rows.append(index[target])
                    cols.append(j)
                    data.append(complex(coeff))
        size = len(basis)
        return sparse.csr_matrix((np.array(data, dtype=dtype), (rows, cols)), shape=(size, size))

    def adjoint_matrix(self, basis: List[FockBasisState], metric: Callable = gram) -> sparse.csr_matrix:
        """Matrix of the adjoint with respect to the Gram metric: G^{-1} M^H G."""
        g = np.array([metric(s) for s in basis], dtype=float)
        m = self.to_matrix(basis)
        return sparse.diags(1 / g) @ m.conj().T @ sparse.diags(g)

    def to_coo_frame(self, basis: List[FockBasisState]) -> pd.DataFrame:
        coo = self.to_matrix(basis).tocoo()
        return pd.DataFrame({"row": coo.row, "col": coo.col, "re": coo.data.real, "im": coo.data.imag})


def rho_operator(n: int, spec: TruncationSpec) -> SparseOperator:
    return SparseOperator(lambda s: apply_rho(n, basis_vector(s), spec), f"rho({n})")


def Q_operator() -> SparseOperator:
    return SparseOperator(lambda s: basis_vector(s, s.sector), "Q")


def R_operator(power: int, spec: TruncationSpec) -> SparseOperator:
    return SparseOperator(lambda s: apply_R(power, basis_vector(s), spec), f"R^{power}")


def level_operator() -> SparseOperator:
    """sum_n rho(-n) rho(n): diagonal with the level as eigenvalue."""
    return SparseOperator(lambda s: basis_vector(s, s.level), "level")


def number_operator() -> SparseOperator:
    """sum_n rho(-n) rho(n) / n: diagonal with the total occupation as eigenvalue."""
    return SparseOperator(lambda s: basis_vector(s, sum(s.occ)), "number")


def identity_operator() -> SparseOperator:
    return SparseOperator(lambda s: basis_vector(s), "I")


def zero_operator() -> SparseOperator:
    return SparseOperator(lambda s: FockVector(), "0")


def max_difference(a: SparseOperator, b: SparseOperator, states: Iterable[FockBasisState]) -> float:
    """Largest |coefficient| of (a - b) applied to each of `states`."""
    worst = 0.0
    for state in states:
        worst = max(worst, (a.row(state) - b.row(state)).max_abs())
    return worst
