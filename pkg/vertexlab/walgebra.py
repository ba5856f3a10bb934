# vertexlab/walgebra.py
"""
W_{1+infinity} generators on the boson Fock space (reduced units, 2*pi/L = 1).

W^1 = rho, W^2 = 1/2 sum :rho rho:, W^3 = 1/3 sum :rho rho rho: + (p^2 - 1)/12 rho(p);
higher generators come out of the generating function of the bilocal
implementer :phi(y + a/2) phi^{-1}(y - a/2): expanded in a.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .errors import VertexLabError, WindowError
from .fermion_oracle import (
    SEA,
    MomentumWindow,
    WedgeVector,
    build_W_fermion,
    map_boson_vector,
    psi_dagger_vector,
    window_for,
)
from .fock import (
    FockBasisState,
    FockVector,
    SparseOperator,
    TruncationSpec,
    apply_Q,
    apply_rho,
    basis_vector,
    enumerate_basis,
    identity_operator,
    rho_operator,
    states_at,
)
from .series import TruncatedSeries, sinc_reciprocal
from .vertex import mode_overlap

logger = logging.getLogger(__name__)

MAX_CLOSED_FORM = 3


@dataclass(frozen=True)
class WGeneratorSpec:
    s: int
    p: int
    picture: str = "boson"

    def __post_init__(self):
        if self.s < 1:
            raise VertexLabError(f"Spin index must be positive, got s={self.s}")
        if self.picture not in ("boson", "fermion"):
            raise VertexLabError(f"Unknown picture '{self.picture}'")


@dataclass(frozen=True)
class GeneratingEvaluation:
    order: int
    nu: float = 1.0
    normalization: str = "sine"

    def __post_init__(self):
        if self.normalization not in ("sine", "printed"):
            raise VertexLabError(f"Unknown normalization '{self.normalization}'")


def _normal_ordered(indices: Sequence[int], state: FockBasisState, trunc: TruncationSpec) -> FockVector:
    """:rho(i_1)...rho(i_r): on a basis state: annihilators first, then Q, then creators."""
    v = basis_vector(state)
    for n in sorted(i for i in indices if i > 0):
        v = apply_rho(n, v, trunc)
        if not v:
            return v
    for _ in range(sum(1 for i in indices if i == 0)):
        v = apply_Q(v)
        if not v:
            return v
    for n in sorted(i for i in indices if i < 0):
        v = apply_rho(n, v, trunc)
    return v


def _quadratic(p: int, state: FockBasisState, trunc: TruncationSpec) -> FockVector:
    out = FockVector()
    lo, hi = -trunc.Lambda, state.level
    for a in range(lo, hi + 1):
        b = p - a
        if not lo <= b <= hi:
            continue
        out = out + _normal_ordered((a, b), state, trunc)
    return out


def _cubic(p: int, state: FockBasisState, trunc: TruncationSpec) -> FockVector:
    out = FockVector()
    lo, hi = -trunc.Lambda, state.level
    for a in range(lo, hi + 1):
        for b in range(lo, hi + 1):
            c = p - a - b
            if not lo <= c <= hi:
                continue
            if sum(i for i in (a, b, c) if i > 0) > state.level:
                continue
            out = out + _normal_ordered((a, b, c), state, trunc)
    return out


def build_W_boson(s: int, p: int, trunc: TruncationSpec, include_counterterm: bool = True) -> SparseOperator:
    """
    W^s_p in the boson picture. s <= 3 use the closed forms with exact
    rational coefficients; larger s are read off the generating function.
    """
    if s == 1:
        return rho_operator(p, trunc)
    if s == 2:
        return SparseOperator(lambda st: _quadratic(p, st, trunc).scale(Fraction(1, 2)), f"W^2({p})")
    if s == 3:
        linear = Fraction(p * p, 12) - (Fraction(1, 12) if include_counterterm else 0)

        def action(st: FockBasisState) -> FockVector:
            cubic = _cubic(p, st, trunc).scale(Fraction(1, 3))
            return cubic + apply_rho(p, basis_vector(st), trunc).scale(linear)

        return SparseOperator(action, f"W^3({p})")
    return extract_W_from_generating(s, p, trunc)


def _bilocal_series(bra: FockBasisState, ket: FockBasisState, order: int, nu: float) -> TruncatedSeries:
    # <bra| e^{-i nu^2 a Q} E+ E- |ket> with z_n = w_n = -2i nu sin(n a/2)/n
    a = TruncatedSeries.variable(order)
    value = (a * (-1j * nu * nu * ket.sector)).exp()
    for n in range(1, max(len(bra.occ), len(ket.occ)) + 1):
        m_out, m_in = bra.m(n), ket.m(n)
        if m_out == 0 and m_in == 0:
            continue
        zn = (a * (n / 2)).sin() * (-2j * nu / n)
        value = value * mode_overlap(m_out, m_in, zn, zn, n)
    return value


def _normalized(series: TruncatedSeries, evaluation: GeneratingEvaluation) -> TruncatedSeries:
    nu, order = evaluation.nu, evaluation.order
    reduced = series.shift_down(1)
    if evaluation.normalization == "sine":
        return reduced * sinc_reciprocal(nu * nu / 2, order) * (1j / nu ** 3)
    half = TruncatedSeries.variable(order) * 0.5
    return reduced * sinc_reciprocal(0.5, order) * half.cos().power(1 - nu * nu) * (1j / nu ** 2)


def generating_matrix_element(
    bra: FockBasisState, ket: FockBasisState, evaluation: GeneratingEvaluation
) -> TruncatedSeries:
    """Normalized generating function N(a)(M(a) - delta) between two basis states, as a series in a."""
    if bra.sector != ket.sector:
        return TruncatedSeries.constant(0, evaluation.order)
    series = _bilocal_series(bra, ket, evaluation.order, evaluation.nu)
    if bra == ket:
        series = series - 1
    return _normalized(series, evaluation)


def extract_W_from_generating(
    s: int, p: int, trunc: TruncationSpec, nu: float = 1.0, normalization: str = "sine"
) -> SparseOperator:
    """
    W^s_p as the coefficient of a^{s-1} of the generating function times
    (s-1)!/(-i)^{s-1}. The p-th Fourier mode in y keeps exactly the
    transitions that lower the level by p; the vanishing regulator is taken
    exactly, the bilocal merged loop being finite there.
    """
    if s < 1:
        raise VertexLabError(f"Spin index must be positive, got s={s}")
    evaluation = GeneratingEvaluation(order=s, nu=nu, normalization=normalization)
    factor = math.factorial(s - 1) / (-1j) ** (s - 1)

    def action(ket: FockBasisState) -> FockVector:
        out = FockVector()
        level = ket.level - p
        if level < 0:
            return out
        if level > trunc.Lambda:
            out.loss = math.inf
            return out
        for bra in states_at(level, ket.sector):
            coeff = generating_matrix_element(bra, ket, evaluation)[s - 1] * factor
            if abs(coeff) > 1e-14:
                out.add(bra, complex(coeff))
        return out

    return SparseOperator(action, f"W_gen^{s}({p};nu={nu})")


def w_operator(spec: WGeneratorSpec, trunc: TruncationSpec, window: Optional[MomentumWindow] = None) -> SparseOperator:
    if spec.picture == "fermion":
        return build_W_fermion(spec.s, spec.p, window or window_for(trunc.Lambda, (trunc.wmin, trunc.wmax)))
    return build_W_boson(spec.s, spec.p, trunc)


def safe_states(trunc: TruncationSpec, reach: int) -> List[FockBasisState]:
    top = trunc.Lambda - reach
    if top < 0:
        raise WindowError(f"Truncation Lambda={trunc.Lambda} leaves no room for reach {reach}")
    return [
        state
        for w in range(trunc.wmin, trunc.wmax + 1)
        for level in range(top + 1)
        for state in states_at(level, w)
    ]


def _row_residual(a: FockVector, b: FockVector) -> float:
    return float((a - b).max_abs())


def virasoro_residual(p: int, q: int, trunc: TruncationSpec) -> float:
    """[W^2_p, W^2_q] - (p - q) W^2_{p+q} - delta_{p,-q} p (p^2 - 1)/12 on the safe states."""
    bracket = build_W_boson(2, p, trunc).commutator(build_W_boson(2, q, trunc))
    rhs = build_W_boson(2, p + q, trunc).scale(p - q)
    if p + q == 0:
        rhs = rhs + identity_operator().scale(Fraction(p * (p * p - 1), 12))
    worst = 0.0
    for state in safe_states(trunc, abs(p) + abs(q)):
        worst = max(worst, _row_residual(bracket.row(state), rhs.row(state)))
    return worst


def _dirichlet_kernel(p: int, z):
    """sin(p z/2)/sin(z/2) as the finite sum of exp(i (|p| - 1 - 2j) z/2), odd in p."""
    n = abs(p)
    total = sum((sp.exp(sp.I * (n - 1 - 2 * j) * z / 2) for j in range(n)), sp.Integer(0))
    return total if p >= 0 else -total


@lru_cache(maxsize=None)
def _bracket_coefficients(p: int, q: int, order: int) -> Dict[Tuple[int, int], Tuple[Dict[int, complex], complex]]:
    """Coefficients of a^i b^j of the structure functions: ({s: c_s}, central)."""
    a, b, t = sp.symbols("a b t")
    sine = 2 * sp.I * sp.sin((q * a - p * b) / 2)
    central = _dirichlet_kernel(p, a + b) if p + q == 0 else sp.Integer(0)

    def monomials(expr) -> Dict[Tuple[int, int], complex]:
        scaled = expr.subs({a: t * a, b: t * b})
        poly = sp.series(scaled, t, 0, order + 1).removeO().subs(t, 1)
        poly = sp.Poly(sp.expand(poly), a, b)
        return {m: complex(sp.N(c)) for m, c in zip(poly.monoms(), poly.coeffs())}

    table: Dict[Tuple[int, int], Tuple[Dict[int, complex], complex]] = {}
    for i in range(order + 1):
        for j in range(order + 1 - i):
            table[(i, j)] = ({}, 0j)
    for s in range(1, order + 1):
        term = sine * (-sp.I * (a + b)) ** (s - 1) / sp.factorial(s - 1)
        for mono, coeff in monomials(term).items():
            if mono in table:
                table[mono][0][s] = coeff
    if p + q == 0:
        for mono, coeff in monomials(central).items():
            if mono in table:
                table[mono] = (table[mono][0], coeff)
    return table


@dataclass
class BracketReport:
    p: int
    q: int
    order: int
    residuals: Dict[Tuple[int, int], float] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def check_Winfty_bracket(p: int, q: int, order: int, trunc: TruncationSpec) -> BracketReport:
    """
    Compare (-i)^{i+j}/(i! j!) [W^{i+1}_p, W^{j+1}_q] with the a^i b^j
    coefficient of 2i sin((qa - pb)/2) W_{p+q}(a + b) + delta_{p,-q} sin(p(a+b)/2)/sin((a+b)/2)
    for every i + j <= order.
    """
    gens = {}

    def gen(s: int, k: int) -> SparseOperator:
        if (s, k) not in gens:
            gens[(s, k)] = build_W_boson(s, k, trunc)
        return gens[(s, k)]

    table = _bracket_coefficients(p, q, order)
    kets = safe_states(trunc, abs(p) + abs(q))
    report = BracketReport(p, q, order)
    for (i, j), (coeffs, central) in sorted(table.items()):
        lhs = gen(i + 1, p).commutator(gen(j + 1, q)).scale((-1j) ** (i + j) / (math.factorial(i) * math.factorial(j)))
        worst = 0.0
        for ket in kets:
            rhs = basis_vector(ket, central) if central else FockVector()
            for s, c in coeffs.items():
                rhs = rhs + gen(s, p + q).row(ket).scale(c)
            worst = max(worst, _row_residual(lhs.row(ket), rhs))
        report.residuals[(i, j)] = worst
        logger.debug(f"Bracket p={p} q={q} a^{i} b^{j}: residual {worst:.3g}")
    logger.info(f"W bracket p={p} q={q} up to order {order}: max residual {report.max_residual:.3g}")
    return report


def kronig_crosscheck(
    s: int, p: int, trunc: TruncationSpec, include_counterterm: bool = True, window: Optional[MomentumWindow] = None
) -> float:
    """Largest coefficient of W_fermion(B(t)) - B(W_boson t) over boson basis states t."""
    if s > MAX_CLOSED_FORM:
        raise VertexLabError(f"Closed-form boson generators stop at s={MAX_CLOSED_FORM}")
    window = window or window_for(trunc.Lambda + abs(p), (trunc.wmin, trunc.wmax))
    boson = build_W_boson(s, p, trunc, include_counterterm)
    fermion = build_W_fermion(s, p, window)
    worst = 0.0
    for state in enumerate_basis(trunc):
        if state.level - p > trunc.Lambda:
            continue
        lhs = fermion.apply(map_boson_vector(basis_vector(state), window))
        rhs = map_boson_vector(boson.row(state), window)
        if lhs.loss or rhs.loss:
            raise WindowError(f"Window {window.kmax} too narrow for {state.label()}")
        worst = max(worst, float((lhs - rhs).max_abs()))
    logger.info(f"Kronig check s={s} p={p}: max discrepancy {worst}")
    return worst


def assert_vanishes_by_uniqueness(
    op: SparseOperator, states: Iterable[WedgeVector], window: MomentumWindow, margin: int = 2, tol: float = 0.0
) -> float:
    """
    An operator that kills the sea and commutes with every psi^*(k) vanishes.
    Checks both hypotheses on `states` for every k at least `margin` inside
    the window; raises AssertionError when either fails.
    """
    worst = float(op.apply(WedgeVector({SEA: 1})).max_abs())
    edge = window.kmax - margin
    momenta = [k for k in window.momenta() if abs(k) <= edge]
    for v in states:
        for k in momenta:
            left = op.apply(psi_dagger_vector(k, v, window))
            right = psi_dagger_vector(k, op.apply(v), window)
            worst = max(worst, float((left - right).max_abs()))
    if worst > tol:
        raise AssertionError(f"Uniqueness hypotheses fail with residual {worst}")
    return worst


def adjoint_residual(s: int, p: int, trunc: TruncationSpec) -> float:
    """|| (W^s_p)^* - W^s_{-p} || entrywise on the truncated basis."""
    basis = enumerate_basis(trunc)
    adj = build_W_boson(s, p, trunc).adjoint_matrix(basis)
    other = build_W_boson(s, -p, trunc).to_matrix(basis)
    keep = np.array([st.level <= trunc.Lambda - abs(p) for st in basis])
    diff = (adj - other).toarray()[np.ix_(keep, keep)]
    return float(np.max(np.abs(diff), initial=0.0))
