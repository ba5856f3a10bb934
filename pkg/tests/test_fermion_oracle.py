from fractions import Fraction

import pytest

from vertexlab.errors import WindowError
from vertexlab.fermion_oracle import (
    HALF,
    SEA,
    MomentumWindow,
    WedgeState,
    WedgeVector,
    apply_psi,
    apply_psi_dagger,
    apply_R_fermion,
    bilinear_dGamma,
    boson_basis_in_wedge,
    build_W_fermion,
    fermion_rho,
    map_boson_vector,
    psi_dagger_vector,
    psi_vector,
    window_for,
)
from vertexlab.fock import VACUUM, FockBasisState, FockVector

WINDOW = MomentumWindow(Fraction(11, 2))


def _states():
    return [
        SEA,
        WedgeState(frozenset({HALF})),
        WedgeState(frozenset({Fraction(3, 2)}), frozenset({Fraction(-1, 2)})),
        WedgeState(frozenset({Fraction(1, 2), Fraction(5, 2)}), frozenset({Fraction(-3, 2)})),
    ]


def test_window_validation_and_momenta():
    assert MomentumWindow(Fraction(3, 2)).momenta() == [Fraction(k, 2) for k in (-3, -1, 1, 3)]
    with pytest.raises(WindowError):
        MomentumWindow(Fraction(1))
    with pytest.raises(WindowError):
        WINDOW.check(Fraction(13, 2))


def test_wedge_state_validation():
    with pytest.raises(WindowError):
        WedgeState(frozenset({Fraction(-1, 2)}))
    assert WedgeState(frozenset({HALF}), frozenset({Fraction(-3, 2)})).charge == 0


def test_R_creates_the_lowest_particle_with_positive_sign():
    assert apply_psi_dagger(HALF, SEA, WINDOW) == (1, WedgeState(frozenset({HALF})))
    assert apply_R_fermion(SEA, WINDOW) == WedgeState(frozenset({HALF}))
    assert apply_R_fermion(SEA, WINDOW, -1) == WedgeState(holes=frozenset({-HALF}))


def test_pauli_exclusion():
    assert apply_psi_dagger(-HALF, SEA, WINDOW) is None
    assert apply_psi(HALF, SEA, WINDOW) is None


@pytest.mark.parametrize("k", [Fraction(-3, 2), Fraction(-1, 2), Fraction(1, 2), Fraction(5, 2)])
def test_car_on_the_window(k):
    for state in _states():
        v = WedgeVector({state: 1})
        both = psi_dagger_vector(k, psi_vector(k, v, WINDOW), WINDOW) + psi_vector(k, psi_dagger_vector(k, v, WINDOW), WINDOW)
        assert both == {state: 1}


def test_creators_anticommute():
    k1, k2 = Fraction(3, 2), Fraction(-1, 2)
    for state in _states():
        v = WedgeVector({state: 1})
        total = psi_dagger_vector(k1, psi_dagger_vector(k2, v, WINDOW), WINDOW) + psi_dagger_vector(
            k2, psi_dagger_vector(k1, v, WINDOW), WINDOW
        )
        assert total == {}


def test_charge_operator_counts_particles_minus_holes():
    W1 = build_W_fermion(1, 0, WINDOW)
    for state in _states():
        assert W1.row(state).get(state, 0) == state.charge


def test_spin_two_and_three_on_shifted_sea():
    shifted = apply_R_fermion(SEA, WINDOW)
    assert build_W_fermion(2, 0, WINDOW).row(SEA) == {}
    assert build_W_fermion(2, 0, WINDOW).row(shifted) == {shifted: HALF}
    assert build_W_fermion(3, 0, WINDOW).row(shifted) == {shifted: Fraction(1, 4)}
    with pytest.raises(WindowError):
        build_W_fermion(0, 0, WINDOW)


def test_rho_minus_one_on_the_sea():
    v = fermion_rho(-1, WINDOW).row(SEA)
    assert v == {WedgeState(frozenset({HALF}), frozenset({-HALF})): 1}
    assert fermion_rho(1, WINDOW).row(SEA) == {}


def test_R_pushing_past_the_edge_raises():
    edge = WedgeState(frozenset({WINDOW.kmax}))
    with pytest.raises(WindowError):
        apply_R_fermion(edge, WINDOW)


def test_R_commutes_with_bilinears():
    rho = fermion_rho(-2, WINDOW)
    for state in _states()[:3]:
        left = WedgeVector()
        for s, c in rho.row(state).items():
            left.add(apply_R_fermion(s, WINDOW), c)
        right = rho.row(apply_R_fermion(state, WINDOW))
        assert left == right


def test_boson_states_map_into_the_wedge():
    window = window_for(3, (0, 1))
    v = boson_basis_in_wedge(FockBasisState(0, (1,)), window)
    assert v == {WedgeState(frozenset({HALF}), frozenset({-HALF})): 1}
    charged = boson_basis_in_wedge(FockBasisState(1, ()), window)
    assert charged == {WedgeState(frozenset({HALF})): 1}


def test_map_boson_vector_is_linear():
    window = window_for(3, (0,))
    a, b = FockBasisState(0, (2,)), FockBasisState(0, (0, 1))
    mapped = map_boson_vector(FockVector({a: 2, b: -1}), window)
    expected = boson_basis_in_wedge(a, window).scale(2) - boson_basis_in_wedge(b, window)
    assert mapped == expected
    assert map_boson_vector(FockVector({VACUUM: 1}), window) == {SEA: 1}


def test_bilinear_dGamma_subtracts_vacuum_expectation():
    kernel = {(k, k): 1 for k in WINDOW.momenta()}
    assert bilinear_dGamma(kernel, WedgeVector({SEA: 1}), WINDOW) == {}
    particle = WedgeState(frozenset({HALF}))
    assert bilinear_dGamma(kernel, WedgeVector({particle: 1}), WINDOW) == {particle: 1}
