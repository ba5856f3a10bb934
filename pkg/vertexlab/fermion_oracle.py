# vertexlab/fermion_oracle.py
"""
Semi-infinite wedge representation on a finite momentum window.

Momenta are half-integers k (units of 2*pi/L). A state records the particles
above the Dirac sea and the holes in it; everything below the window is
occupied and everything above is empty. The sign of psi(k) and psi^*(k) is
(-1)^(number of occupied modes above k), which makes R Omega = +psi^*(1/2) Omega.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .errors import WindowError
from .fock import FockBasisState, FockVector, SparseOperator

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class MomentumWindow:
    kmax: Fraction

    def __post_init__(self):
        kmax = Fraction(self.kmax)
        if kmax <= 0 or (kmax - HALF).denominator != 1:
            raise WindowError(f"Window edge must be a positive half-integer, got {self.kmax}")
        object.__setattr__(self, "kmax", kmax)

    def __contains__(self, k) -> bool:
        return abs(k) <= self.kmax

    def momenta(self) -> List[Fraction]:
        top = int(self.kmax - HALF)
        return [Fraction(2 * j + 1, 2) for j in range(-top - 1, top + 1)]

    def check(self, k: Fraction):
        if k not in self:
            raise WindowError(f"Momentum {k} outside the window |k| <= {self.kmax}")


@dataclass(frozen=True)
class WedgeState:
    particles: FrozenSet[Fraction] = field(default_factory=frozenset)
    holes: FrozenSet[Fraction] = field(default_factory=frozenset)

    def __post_init__(self):
        if any(k < 0 for k in self.particles) or any(k > 0 for k in self.holes):
            raise WindowError(f"Particles must sit above and holes below the sea: {self}")

    @property
    def charge(self) -> int:
        return len(self.particles) - len(self.holes)

    def occupied(self, k: Fraction) -> bool:
        return k in self.particles if k > 0 else k not in self.holes

    def occupied_above(self, k: Fraction) -> int:
        count = sum(1 for p in self.particles if p > k)
        if k < 0:
            # sea modes strictly between k and 0 that are not holes
            count += int(-k - HALF) - sum(1 for h in self.holes if h > k)
        return count

    def label(self) -> str:
        parts = ",".join(str(p) for p in sorted(self.particles))
        holes = ",".join(str(h) for h in sorted(self.holes))
        return f"p[{parts}]h[{holes}]"


SEA = WedgeState()


class WedgeVector(FockVector):
    """Sparse map WedgeState -> amplitude; wedge states are orthonormal."""

    metric = staticmethod(lambda state: 1)


def apply_psi_dagger(k: Fraction, state: WedgeState, window: MomentumWindow) -> Optional[Tuple[int, WedgeState]]:
    k = Fraction(k)
    window.check(k)
    if state.occupied(k):
        return None
    sign = -1 if state.occupied_above(k) % 2 else 1
    if k > 0:
        return sign, WedgeState(state.particles | {k}, state.holes)
    return sign, WedgeState(state.particles, state.holes - {k})


def apply_psi(k: Fraction, state: WedgeState, window: MomentumWindow) -> Optional[Tuple[int, WedgeState]]:
    k = Fraction(k)
    window.check(k)
    if not state.occupied(k):
        return None
    sign = -1 if state.occupied_above(k) % 2 else 1
    if k > 0:
        return sign, WedgeState(state.particles - {k}, state.holes)
    return sign, WedgeState(state.particles, state.holes | {k})


def _lift(op: Callable, k: Fraction, v: WedgeVector, window: MomentumWindow) -> WedgeVector:
    out = WedgeVector(loss=v.loss)
    for state, coeff in v.items():
        result = op(k, state, window)
        if result is not None:
            sign, target = result
            out.add(target, sign * coeff)
    return out


def psi_dagger_vector(k: Fraction, v: WedgeVector, window: MomentumWindow) -> WedgeVector:
    return _lift(apply_psi_dagger, k, v, window)


def psi_vector(k: Fraction, v: WedgeVector, window: MomentumWindow) -> WedgeVector:
    return _lift(apply_psi, k, v, window)


def _hop(k_out: Fraction, k_in: Fraction, state: WedgeState, window: MomentumWindow) -> Optional[Tuple[int, WedgeState]]:
    first = apply_psi(k_in, state, window)
    if first is None:
        return None
    sign, mid = first
    second = apply_psi_dagger(k_out, mid, window)
    if second is None:
        return None
    return sign * second[0], second[1]


def bilinear_dGamma(kernel: Dict[Tuple[Fraction, Fraction], object], v: WedgeVector, window: MomentumWindow) -> WedgeVector:
    """sum X(k', k) :psi^*(k') psi(k): applied to `v`; the vacuum expectation is subtracted."""
    out = WedgeVector(loss=v.loss)
    for state, coeff in v.items():
        for (k_out, k_in), x in kernel.items():
            if k_out not in window or k_in not in window:
                out.loss += abs(x * coeff) ** 2
                continue
            result = _hop(k_out, k_in, state, window)
            if result is not None:
                sign, target = result
                out.add(target, sign * x * coeff)
            if k_out == k_in and k_in < 0:
                out.add(state, -x * coeff)
    if out.loss:
        logger.debug(f"Kernel entries outside the window carried weight {out.loss:.3g}")
    return out


def build_W_fermion(s: int, p: int, window: MomentumWindow) -> SparseOperator:
    """W^s_p = sum_k (k - p/2)^{s-1} :psi^*(k - p) psi(k): in exact arithmetic."""
    if s < 1:
        raise WindowError(f"Spin index must be positive, got s={s}")
    p = int(p)

    def weight(k: Fraction):
        return (k - Fraction(p, 2)) ** (s - 1)

    def action(state: WedgeState) -> WedgeVector:
        out = WedgeVector()
        if p == 0:
            value = sum(weight(k) for k in state.particles) - sum(weight(h) for h in state.holes)
            out.add(state, value)
            return out
        occupied = list(state.particles) + [k for k in window.momenta() if k < 0 and k not in state.holes]
        for k in occupied:
            k_out = k - p
            if k_out not in window:
                if k_out > window.kmax:
                    out.loss += abs(weight(k)) ** 2
                continue
            result = _hop(k_out, k, state, window)
            if result is not None:
                sign, target = result
                out.add(target, sign * weight(k))
        return out

    return SparseOperator(action, f"W_f^{s}({p})")


def fermion_rho(p: int, window: MomentumWindow) -> SparseOperator:
    return build_W_fermion(1, p, window)


def apply_R_fermion(state: WedgeState, window: MomentumWindow, power: int = 1) -> WedgeState:
    """Shift every occupied momentum by `power`; commutes with every bilinear."""
    if power == 0:
        return state
    edge = window.kmax

    def was_occupied(k: Fraction) -> bool:
        if k < -edge:
            return True
        if k > edge:
            return False
        return state.occupied(k)

    top = [k for k in state.particles if k + power > edge]
    if top:
        raise WindowError(f"R^{power} pushes particles {sorted(top)} past the window edge {edge}")
    if power < 0 and any(h + power < -edge for h in state.holes):
        raise WindowError(f"R^{power} pushes holes below the window edge {-edge}")
    particles, holes = set(), set()
    for k in window.momenta():
        occ = was_occupied(k - power)
        if k > 0 and occ:
            particles.add(k)
        elif k < 0 and not occ:
            holes.add(k)
    return WedgeState(frozenset(particles), frozenset(holes))


def boson_basis_in_wedge(state: FockBasisState, window: MomentumWindow) -> WedgeVector:
    """prod_n rho(-n)^{m_n} R^w Omega computed with fermion bilinears."""
    sea = apply_R_fermion(SEA, window, state.sector)
    v = WedgeVector({sea: 1})
    for n, m in enumerate(state.occ, start=1):
        raise_n = fermion_rho(-n, window)
        for _ in range(m):
            v = raise_n.apply(v)
    return v


def map_boson_vector(v: FockVector, window: MomentumWindow) -> WedgeVector:
    out = WedgeVector(loss=v.loss)
    for state, coeff in v.items():
        out = out + boson_basis_in_wedge(state, window).scale(coeff)
    return out


def window_for(Lambda: int, sectors: Iterable[int], margin: int = 4) -> MomentumWindow:
    """A window wide enough to hold every basis state up to level Lambda."""
    reach = Lambda + max((abs(w) for w in sectors), default=0) + margin
    return MomentumWindow(Fraction(2 * reach + 1, 2))
