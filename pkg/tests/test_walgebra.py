from fractions import Fraction

import pytest
import sympy as sp

from vertexlab.errors import VertexLabError, WindowError
from vertexlab.fermion_oracle import (
    HALF,
    SEA,
    MomentumWindow,
    WedgeState,
    WedgeVector,
    fermion_rho,
)
from vertexlab.fock import FockBasisState, SparseOperator, TruncationSpec, enumerate_basis, max_difference, rho_operator
from vertexlab.walgebra import (
    GeneratingEvaluation,
    WGeneratorSpec,
    _dirichlet_kernel,
    adjoint_residual,
    assert_vanishes_by_uniqueness,
    build_W_boson,
    check_Winfty_bracket,
    extract_W_from_generating,
    generating_matrix_element,
    kronig_crosscheck,
    safe_states,
    virasoro_residual,
    w_operator,
)

WINDOW = MomentumWindow(Fraction(11, 2))


def test_spin_one_is_rho():
    trunc = TruncationSpec(3, -1, 1)
    assert max_difference(build_W_boson(1, 2, trunc), rho_operator(2, trunc), enumerate_basis(trunc)) == 0


def test_spin_two_zero_mode_is_level_plus_half_charge_squared():
    trunc = TruncationSpec(3, -1, 1)
    state = FockBasisState(1, (1,))
    assert build_W_boson(2, 0, trunc).row(state) == {state: Fraction(3, 2)}


def test_spin_three_zero_mode_on_charged_vacuum():
    trunc = TruncationSpec(2, -1, 1)
    state = FockBasisState(1, ())
    assert build_W_boson(3, 0, trunc).row(state) == {state: Fraction(1, 4)}


@pytest.mark.parametrize("p, q", [(1, -1), (2, -2), (2, 1), (-1, 3), (0, 2)])
def test_virasoro_relation_is_exact(p, q):
    assert virasoro_residual(p, q, TruncationSpec(6, -1, 1)) == 0


@pytest.mark.parametrize("s", [1, 2, 3])
@pytest.mark.parametrize("p", [-2, -1, 0, 1, 2])
def test_kronig_identity_is_exact(s, p):
    assert kronig_crosscheck(s, p, TruncationSpec(3, -1, 1)) == 0


def test_kronig_negative_control_without_counterterm():
    assert kronig_crosscheck(3, 0, TruncationSpec(3, -1, 1), include_counterterm=False) > 0


def test_kronig_rejects_spins_without_closed_form():
    with pytest.raises(VertexLabError):
        kronig_crosscheck(4, 0, TruncationSpec(2))


@pytest.mark.parametrize("s", [1, 2, 3])
@pytest.mark.parametrize("p", [-1, 0, 1, 2])
def test_generating_function_reproduces_closed_forms(s, p):
    trunc = TruncationSpec(3, -1, 1)
    states = [st for st in enumerate_basis(trunc) if 0 <= st.level - p <= trunc.Lambda]
    generated = extract_W_from_generating(s, p, trunc)
    assert max_difference(generated, build_W_boson(s, p, trunc), states) < 1e-9


def test_generating_function_on_charged_vacuum():
    state = FockBasisState(1, ())
    series = generating_matrix_element(state, state, GeneratingEvaluation(order=3))
    assert series[0] == pytest.approx(1)
    assert series[1] == pytest.approx(-0.5j)
    assert series[2] == pytest.approx(-0.125)


def test_generating_function_vanishes_across_sectors():
    series = generating_matrix_element(FockBasisState(0, ()), FockBasisState(1, ()), GeneratingEvaluation(order=2))
    assert all(c == 0 for c in series.coeffs)


def test_spin_four_comes_from_the_generating_function():
    trunc = TruncationSpec(2, -1, 1)
    assert build_W_boson(4, 0, trunc).name.startswith("W_gen^4")
    state = FockBasisState(1, ())
    # (1/2)^3 on R Omega
    assert build_W_boson(4, 0, trunc).row(state)[state] == pytest.approx(0.125)


@pytest.mark.parametrize("p, q", [(1, -1), (2, -1), (1, 1)])
def test_w_infinity_bracket(p, q):
    report = check_Winfty_bracket(p, q, 2, TruncationSpec(5, -1, 1))
    assert report.residuals
    assert report.max_residual < 1e-9


@pytest.mark.parametrize("s, p", [(2, 1), (3, 1), (3, 2)])
def test_adjoint_pairs_opposite_modes(s, p):
    assert adjoint_residual(s, p, TruncationSpec(4, -1, 1)) < 1e-12


def test_safe_states_respect_the_reach():
    trunc = TruncationSpec(3, 0, 1)
    assert all(st.level <= 1 for st in safe_states(trunc, 2))
    with pytest.raises(WindowError):
        safe_states(trunc, 4)


def test_generator_spec_validation_and_pictures():
    with pytest.raises(VertexLabError):
        WGeneratorSpec(0, 1)
    with pytest.raises(VertexLabError):
        WGeneratorSpec(1, 1, "anyon")
    with pytest.raises(VertexLabError):
        GeneratingEvaluation(2, normalization="other")
    trunc = TruncationSpec(2, 0, 1)
    fermion = w_operator(WGeneratorSpec(2, 0, "fermion"), trunc)
    assert fermion.row(WedgeState(frozenset({HALF}))) == {WedgeState(frozenset({HALF})): HALF}


def _wedge_identity():
    return SparseOperator(lambda s: WedgeVector({s: 1}), "I")


def _sample_vectors():
    return [
        WedgeVector({SEA: 1}),
        WedgeVector({WedgeState(frozenset({HALF})): 1}),
        WedgeVector({WedgeState(frozenset({Fraction(3, 2)}), frozenset({-HALF})): 2, SEA: -1}),
    ]


def test_uniqueness_accepts_the_heisenberg_relation():
    bracket = fermion_rho(1, WINDOW).commutator(fermion_rho(-1, WINDOW)) - _wedge_identity()
    assert assert_vanishes_by_uniqueness(bracket, _sample_vectors(), WINDOW) == 0


def test_uniqueness_rejects_an_operator_that_only_kills_the_sea():
    product = (fermion_rho(1, WINDOW) @ fermion_rho(-1, WINDOW)) - _wedge_identity()
    assert product.apply(WedgeVector({SEA: 1})) == {}
    with pytest.raises(AssertionError):
        assert_vanishes_by_uniqueness(product, _sample_vectors(), WINDOW)


@pytest.mark.parametrize("p", [-3, -2, -1, 0, 1, 2, 3])
def test_dirichlet_kernel_matches_the_sine_ratio(p):
    z = sp.Symbol("z")
    value = complex(_dirichlet_kernel(p, z).subs(z, 0.7).evalf())
    expected = complex(sp.sin(p * 0.35) / sp.sin(0.35)) if p else 0j
    assert value == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p, q", [(2, -2), (-2, 2), (1, -1)])
def test_w_infinity_bracket_with_central_term_to_third_order(p, q):
    report = check_Winfty_bracket(p, q, 3, TruncationSpec(5, -1, 1))
    assert (3, 0) in report.residuals
    assert report.max_residual < 1e-9
