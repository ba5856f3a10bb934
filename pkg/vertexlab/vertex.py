# vertexlab/vertex.py
"""
Normal-ordered implementers e^{i alpha_bar Q/2} R^w e^{i alpha_bar Q/2} E+ E- of
loops, evaluated exactly on the truncated Fock space.

E+ = exp(sum_n z_n rho(-n)) and E- = exp(sum_n w_n rho(n)) with
z_n = i*alpha_hat(n)/L and w_n = i*alpha_hat(-n)/L. Each mode contributes an
independent single-oscillator overlap, so matrix elements are finite sums.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.special import comb

from .errors import LoopError, SectorError, SingularityError
from .fock import (
    VACUUM,
    FockBasisState,
    FockVector,
    SparseOperator,
    TruncationSpec,
    basis_vector,
    gram,
    states_at,
)
from .loopspace import (
    TWO_PI,
    BlipParams,
    KernelParams,
    Loop,
    _s_hat,
    anyon_loop,
    blip,
    cocycle_tilde_S,
    kernel_b_power,
    sgn_eps,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImplementerSpec:
    loop: Loop
    kind: str = "plain"
    y: float = 0.0
    eps: float = 0.0
    nu: float = 1.0
    nu0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("plain", "blip", "anyon"):
            raise LoopError(f"Unknown implementer kind '{self.kind}'")
        if self.kind == "blip" and self.nu not in (1, -1):
            raise LoopError(f"Blip fields carry nu = +-1, got {self.nu}")

    @classmethod
    def plain(cls, loop: Loop) -> "ImplementerSpec":
        return cls(loop)

    @classmethod
    def blip_field(cls, y: float, eps: float, nu: int = 1, L: float = TWO_PI) -> "ImplementerSpec":
        return cls(blip(y, eps, L).scale(nu), "blip", y, eps, nu, 1.0)

    @classmethod
    def anyon_field(cls, params: BlipParams, L: float = TWO_PI) -> "ImplementerSpec":
        return cls(anyon_loop(params, L), "anyon", params.y, params.eps, params.nu, params.nu0)

    @property
    def sector_shift(self) -> int:
        w = Fraction(self.loop.winding)
        if w.denominator != 1:
            raise SectorError(f"Winding {w} does not shift the sector by an integer")
        return int(w)


@dataclass
class NormalOrderedProduct:
    """prefactor * :Gamma(e^{i merged}): for a product of implementers."""
    prefactor: complex
    merged: Loop
    factors: Tuple[ImplementerSpec, ...] = field(default_factory=tuple)

    def matrix_element(self, bra: FockBasisState, ket: FockBasisState) -> complex:
        return self.prefactor * implementer_matrix_element(ImplementerSpec(self.merged), bra, ket)

    def vacuum_expectation(self) -> complex:
        return self.matrix_element(VACUUM, VACUUM)


def mode_overlap(m_out: int, m_in: int, z, w, n: int):
    """
    Coefficient of rho(-n)^{m_out} in e^{z rho(-n)} e^{w rho(n)} rho(-n)^{m_in} Omega.

    Works for any ring supporting +, * and integer powers (complex, Fraction,
    TruncatedSeries).
    """
    total = 0
    for k in range(max(0, m_in - m_out), m_in + 1):
        j = m_out - m_in + k
        total = total + int(comb(m_in, k, exact=True)) * (w * n) ** k * z ** j / math.factorial(j)
    return total


def creation_annihilation(loop: Loop) -> Tuple[Dict[int, complex], Dict[int, complex]]:
    labels = {abs(n) for n in loop.modes}
    z = {n: 1j * loop.mode(n) / loop.L for n in labels}
    w = {n: 1j * loop.mode(-n) / loop.L for n in labels}
    return z, w


def _oscillator_product(bra: FockBasisState, ket: FockBasisState, z: dict, w: dict):
    value = 1
    for n in range(1, max(len(bra.occ), len(ket.occ)) + 1):
        m_out, m_in = bra.m(n), ket.m(n)
        if m_out == 0 and m_in == 0:
            continue
        zn, wn = z.get(n, 0), w.get(n, 0)
        value = value * mode_overlap(m_out, m_in, zn, wn, n)
        if value == 0:
            break
    return value


def implementer_matrix_element(spec: ImplementerSpec, bra: FockBasisState, ket: FockBasisState) -> complex:
    """Coefficient of `bra` in :Gamma(e^{if}): applied to `ket`."""
    shift = spec.sector_shift
    if bra.sector != ket.sector + shift:
        logger.debug(f"Sector mismatch: {bra.label()} <- {ket.label()} with winding {shift}")
        return 0j
    z, w = creation_annihilation(spec.loop)
    phase = np.exp(1j * spec.loop.mean * (ket.sector + shift / 2))
    return complex(phase * _oscillator_product(bra, ket, z, w))


def gamma_matrix_element(spec: ImplementerSpec, bra: FockBasisState, ket: FockBasisState) -> complex:
    """Un-normal-ordered Gamma(e^{if}) = e^{-i S_hat(alpha-, alpha+)/2} :Gamma(e^{if}):."""
    loop = spec.loop
    factor = np.exp(-0.5j * _s_hat(loop.minus_part(), loop.plus_part()))
    return complex(factor * implementer_matrix_element(spec, bra, ket))


def implementer_operator(spec: ImplementerSpec, trunc: TruncationSpec) -> SparseOperator:
    shift = spec.sector_shift

    def action(ket: FockBasisState) -> FockVector:
        target = ket.sector + shift
        if not trunc.has_sector(target):
            raise SectorError(f"Implementer with winding {shift} leaves the sector range at w={target}")
        out = FockVector()
        for level in range(trunc.Lambda + 1):
            for bra in states_at(level, target):
                out.add(bra, implementer_matrix_element(spec, bra, ket))
        return out

    return SparseOperator(action, f"Gamma[{spec.kind}]")


def normal_order_product(specs: Sequence[ImplementerSpec]) -> NormalOrderedProduct:
    """Merge implementers left to right: prefactor prod_{i<j} exp(-i tildeS(f_i, f_j)/2)."""
    if not specs:
        raise LoopError("normal_order_product needs at least one factor")
    for i, a in enumerate(specs):
        for b in specs[i + 1 :]:
            if a.kind != "plain" and b.kind != "plain" and a.eps + b.eps <= 0:
                raise SingularityError("Regulators of a field pair sum to zero")
    prefactor = 1 + 0j
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            prefactor *= np.exp(-0.5j * cocycle_tilde_S(specs[i].loop, specs[j].loop))
    if not np.isfinite(prefactor):
        raise SingularityError(f"Divergent normal-ordering prefactor {prefactor}")
    merged = specs[0].loop
    for spec in specs[1:]:
        merged = merged + spec.loop
    return NormalOrderedProduct(complex(prefactor), merged, tuple(specs))


def exchange_phase(nu: float, nu_prime: float, x: float, y: float, eps_total: float, L: float = TWO_PI) -> complex:
    """Factor picked up by the normal-ordering prefactor when two fields swap places."""
    return complex(np.exp(1j * math.pi * nu * nu_prime * sgn_eps(x - y, eps_total, L)))


def anyon_correlator(
    params: Sequence[Tuple[float, float, float]], q: float = 0.0, L: float = TWO_PI, tol: float = 1e-12
) -> complex:
    """<Omega, phi(y_1)...phi(y_M) Omega> for charges nu_j, positions y_j, regulators eps_j."""
    if abs(sum(nu for nu, _, _ in params)) > tol:
        return 0j
    value = 1 + 0j
    for j in range(len(params)):
        for k in range(j + 1, len(params)):
            nu_j, y_j, eps_j = params[j]
            nu_k, y_k, eps_k = params[k]
            kp = KernelParams(eps_j + eps_k, q, L)
            value *= complex(kernel_b_power(y_j - y_k, nu_j * nu_k, kp))
    return value


def _lowering_matrix(w: complex, n: int, cutoff: int) -> np.ndarray:
    # e^{w rho(n)} on occupations 0..cutoff of mode n
    mat = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for m in range(cutoff + 1):
        for k in range(m + 1):
            mat[m - k, m] = comb(m, k, exact=True) * (w * n) ** k
    return mat


def _raising_matrix(z: complex, cutoff: int) -> np.ndarray:
    mat = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for m in range(cutoff + 1):
        for j in range(cutoff + 1 - m):
            mat[m + j, m] = z ** j / math.factorial(j)
    return mat


def _mode_chain(specs: Sequence[ImplementerSpec], n: int, cutoff: int) -> np.ndarray:
    chain = np.eye(cutoff + 1, dtype=complex)
    for spec in specs:
        z = 1j * spec.loop.mode(n) / spec.loop.L
        w = 1j * spec.loop.mode(-n) / spec.loop.L
        chain = chain @ _raising_matrix(z, cutoff) @ _lowering_matrix(w, n, cutoff)
    return chain


def _thermal_trace(chain: np.ndarray, n: int, q: float) -> complex:
    if q == 0:
        return complex(chain[0, 0])
    weights = (q ** (2 * n)) ** np.arange(chain.shape[0])
    return complex(np.sum(weights * np.diag(chain)) / np.sum(weights))


def chain_vacuum_expectation(specs: Sequence[ImplementerSpec], q: float = 0.0, cutoff: int = 24) -> complex:
    """
    <Omega, X_1 ... X_M Omega> for implementers X_j, mode by mode.

    At q > 0 every oscillator trace carries the weight q^{2 n m} and each X_j
    is divided by its own thermal expectation, the thermal normal ordering
    under which the pair kernels acquire their elliptic products.
    """
    sector = 0
    value = 1 + 0j
    for spec in reversed(specs):
        shift = spec.sector_shift
        value *= np.exp(1j * spec.loop.mean * (sector + shift / 2))
        sector += shift
    if sector != 0:
        return 0j

    labels = sorted({abs(n) for spec in specs for n in spec.loop.modes})
    for n in labels:
        value *= _thermal_trace(_mode_chain(specs, n, cutoff), n, q)
        if q > 0:
            for spec in specs:
                value /= _thermal_trace(_mode_chain([spec], n, cutoff), n, q)
    return complex(value)


def stripped_anyon_mode(p: int, nu: float, trunc: TruncationSpec, L: float = TWO_PI) -> SparseOperator:
    """
    Fourier mode of the anyon field with its zero-mode phases stripped, at
    vanishing regulator: raises the sector by one and the level by exactly p.
    """
    if p < 0:
        raise LoopError(f"Stripped anyon modes need p >= 0, got {p}")

    def action(ket: FockBasisState) -> FockVector:
        target_sector = ket.sector + 1
        if not trunc.has_sector(target_sector):
            raise SectorError(f"Anyon mode leaves the sector range at w={target_sector}")
        out = FockVector()
        target_level = ket.level + p
        if target_level > trunc.Lambda:
            out.loss = math.inf
            logger.warning(f"Anyon mode p={p} on {ket.label()} exceeds level {trunc.Lambda}")
            return out
        width = max(target_level, len(ket.occ))
        z = {n: nu / n for n in range(1, width + 1)}
        w = {n: -nu / n for n in range(1, width + 1)}
        for bra in states_at(target_level, target_sector):
            out.add(bra, L * _oscillator_product(bra, ket, z, w))
        return out

    return SparseOperator(action, f"phi_hat({p})")


def anyon_field_coefficients(
    points: np.ndarray, nu: float, eps: float, n_max: int, L: float = TWO_PI
) -> Tuple[np.ndarray, Dict[int, np.ndarray]]:
    """
    phi(x_1)...phi(x_N) Omega = J(x) e^{-i pi nu^2 N sum x/L} R^N E+_merged Omega.

    Returns J times the phase, and the merged creation parameters z_n, both
    evaluated at each row of `points` (shape [M, N]).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    M, N = points.shape
    mu = nu * nu
    prefactor = np.ones(M, dtype=complex)
    pair = KernelParams(2 * eps, 0.0, L)
    for k in range(N):
        for kk in range(k + 1, N):
            prefactor *= kernel_b_power(points[:, k] - points[:, kk], mu, pair)
    prefactor *= np.exp(-1j * math.pi * mu * N * points.sum(axis=1) / L)
    lam = math.exp(-TWO_PI * eps / L)
    z = {}
    for n in range(1, n_max + 1):
        z[n] = nu * lam ** n * np.exp(-1j * TWO_PI * n * points / L).sum(axis=1) / n
    return prefactor, z


def smeared_field(
    nu: int,
    modes: Dict[Fraction, complex],
    eps: float,
    trunc: TruncationSpec,
    L: float = TWO_PI,
    oversample: int = 8,
) -> SparseOperator:
    """
    L^{-1/2} int f(x) phi^{+1}(x) dx, or L^{-1/2} int conj(f(x)) phi^{-1}(x) dx for nu = -1.

    `modes` maps half-integer k to the coefficient of e^{2 pi i k x/L} in f.
    The x-dependence of each matrix element is a single exponential, so the
    trapezoid rule on the uniform grid is exact.
    """
    if nu not in (1, -1):
        raise LoopError(f"Smeared fields carry nu = +-1, got {nu}")
    top = max(abs(float(k)) for k in modes) if modes else 0
    M = oversample * (2 * int(math.ceil(top)) + trunc.Lambda + 2)
    x = np.arange(M) * L / M
    f = sum(c * np.exp(1j * TWO_PI * float(k) * x / L) for k, c in modes.items())
    weight = f if nu == 1 else np.conj(f)
    spec = ImplementerSpec.blip_field(0.0, eps, nu, L)

    def action(ket: FockBasisState) -> FockVector:
        target = ket.sector + nu
        if not trunc.has_sector(target):
            raise SectorError(f"Smeared field leaves the sector range at w={target}")
        out = FockVector()
        for level in range(trunc.Lambda + 1):
            # alpha_bar(x) = -2 pi nu x/L; creation of level l carries e^{-2 pi i l x/L}
            kappa = -TWO_PI * (nu * (ket.sector + nu / 2) + level - ket.level) / L
            smear = np.sum(weight * np.exp(1j * kappa * x)) * (L / M) / math.sqrt(L)
            if abs(smear) < 1e-15:
                continue
            for bra in states_at(level, target):
                out.add(bra, smear * implementer_matrix_element(spec, bra, ket))
        return out

    return SparseOperator(action, f"psi{nu:+d}")


@dataclass
class CARResidual:
    eps: float
    same_vacuum: float
    opposite_vacuum: float
    same_norm: float
    opposite_norm: float


def _anticommutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    return (a @ b) + (b @ a)


def _safe_operator_norm(op: SparseOperator, kets: List[FockBasisState], target: Optional[complex]) -> float:
    if not kets:
        return 0.0
    image_states = sorted({s for k in kets for s in op.row(k)} | set(kets))
    index = {s: i for i, s in enumerate(image_states)}
    mat = np.zeros((len(image_states), len(kets)), dtype=complex)
    for j, ket in enumerate(kets):
        row = op.row(ket)
        if target is not None:
            row = row - basis_vector(ket, target)
        for state, coeff in row.items():
            mat[index[state], j] = coeff * math.sqrt(gram(state)) / math.sqrt(gram(ket))
    return float(np.linalg.norm(mat, ord=2))


def car_residual(
    f_modes: Dict[Fraction, complex],
    g_modes: Dict[Fraction, complex],
    eps: float,
    trunc: TruncationSpec,
    L: float = TWO_PI,
    safe_level: Optional[int] = None,
) -> CARResidual:
    """
    Deviation of the smeared, regularized fields from the canonical
    anticommutation relations {psi(f), psi(g)} = 0 and {psi(f), psi^*(g)} = (g, f).
    """
    psi_f = smeared_field(1, f_modes, eps, trunc, L)
    psi_g = smeared_field(1, g_modes, eps, trunc, L)
    psi_star_g = smeared_field(-1, g_modes, eps, trunc, L)
    overlap = L * sum(np.conj(g_modes.get(k, 0)) * c for k, c in f_modes.items())

    same = _anticommutator(psi_f, psi_g)
    opposite = _anticommutator(psi_f, psi_star_g)
    same_vacuum = math.sqrt(same.row(VACUUM).norm2())
    opposite_vacuum = math.sqrt((opposite.row(VACUUM) - basis_vector(VACUUM, overlap)).norm2())

    reach = int(math.ceil(max(abs(float(k)) for k in list(f_modes) + list(g_modes)))) + 1
    safe = safe_level if safe_level is not None else max(0, trunc.Lambda - 2 * reach)
    kets = [s for level in range(safe + 1) for s in states_at(level, 0)]
    report = CARResidual(
        eps=eps,
        same_vacuum=same_vacuum,
        opposite_vacuum=opposite_vacuum,
        same_norm=_safe_operator_norm(same, kets, None),
        opposite_norm=_safe_operator_norm(opposite, kets, overlap),
    )
    logger.debug(f"CAR residual at eps={eps}: {report}")
    return report


def first_quantized_residual(k: Fraction, eps: float, trunc: TruncationSpec, L: float = TWO_PI) -> Tuple[float, float]:
    """Norms of psi(e_k) Omega for k < 0 and psi^*(e_k) Omega for k > 0; both vanish."""
    k = Fraction(k)
    if k.denominator != 2:
        raise LoopError(f"Fermion momenta are half-integers, got {k}")
    neg = smeared_field(1, {-abs(k): 1.0}, eps, trunc, L).row(VACUUM)
    pos = smeared_field(-1, {abs(k): 1.0}, eps, trunc, L).row(VACUUM)
    return math.sqrt(neg.norm2()), math.sqrt(pos.norm2())


def implementer_table(spec: ImplementerSpec, bras: Iterable[FockBasisState], kets: Iterable[FockBasisState], n_jobs: int = 1):
    """Matrix elements over a grid of (bra, ket) pairs, evaluated in parallel."""
    pairs = [(b, k) for b in bras for k in kets]
    values = Parallel(n_jobs=n_jobs)(delayed(implementer_matrix_element)(spec, b, k) for b, k in pairs)
    return [(b, k, v) for (b, k), v in zip(pairs, values)]
