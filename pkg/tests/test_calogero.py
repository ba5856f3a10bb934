import math

import numpy as np
import pytest

from vertexlab.calogero import (
    NOMINAL_KAPPA,
    CSConfig,
    EigenRecipe,
    apply_H,
    build_H_nu3,
    calibrate_kappa,
    cauchy_determinant,
    correction_operator,
    correlator_F,
    eigenfunction_from_recipe,
    elliptic_identity_residual,
    fock_correlator,
    groundstate_energy,
    groundstate_function,
    potential_V,
    recipe_family,
    recipe_vector,
    relation_residual,
    sample_pairs,
    sample_points,
    series_correlator,
    symbolic_groundstate_energy,
    thermal_commutator_expectation,
)
from vertexlab.errors import SingularityError, VertexLabError
from vertexlab.fock import VACUUM, FockBasisState, TruncationSpec, max_difference, rho_operator, states_at
from vertexlab.loopspace import TWO_PI, KernelParams, kernel_b_power
from vertexlab.vertex import stripped_anyon_mode
from vertexlab.walgebra import build_W_boson

L = TWO_PI


def _predicted_two_particle_energy(p, nu):
    return (TWO_PI / L) ** 2 * ((p + 1.5 * nu * nu) ** 2 + nu ** 4 / 4)


def test_config_validation():
    with pytest.raises(VertexLabError):
        CSConfig(1, 1.5)
    with pytest.raises(VertexLabError):
        CSConfig(2, 0.0)
    with pytest.raises(SingularityError):
        CSConfig(2, 1.5, q=1.0)
    assert CSConfig(2, 1.5).coupling == pytest.approx(2 * 2.25 * 1.25)


def test_recipe_normalization_and_validation():
    assert EigenRecipe((2, 0, 1)).momenta == (2, 1)
    assert EigenRecipe((3, 1)).level == 4
    assert EigenRecipe((3, 1)).winding_remainder(3) == 1
    with pytest.raises(VertexLabError):
        EigenRecipe((1, 2))
    with pytest.raises(VertexLabError):
        EigenRecipe((-1,))
    with pytest.raises(VertexLabError):
        EigenRecipe((1, 1, 1)).winding_remainder(2)


def test_potential_values():
    config = CSConfig(2, 1.5)
    assert potential_V(L / 2, config) == pytest.approx((math.pi / L) ** 2)
    with pytest.raises(SingularityError):
        potential_V(0.0, config)
    r = np.linspace(0.5, 5.5, 7)
    assert np.allclose(potential_V(r, config, eps=1e-7), potential_V(r, config), rtol=1e-5)


def test_potential_is_continuous_in_the_nome():
    r = np.linspace(0.3, 5.9, 9)
    tiny, trig = CSConfig(2, 1.5, q=1e-6), CSConfig(2, 1.5)
    assert np.max(np.abs(potential_V(r, tiny) - potential_V(r, trig))) < 1e-8


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("nu", [1.0, 1.5, 2.0])
def test_groundstate_energy(N, nu, rng):
    config = CSConfig(N, nu)
    points = sample_points(config, 8, rng)
    F0 = groundstate_function(config)
    ratio = apply_H(F0, points, config) / F0(points)
    assert np.allclose(ratio, groundstate_energy(N, nu, L), rtol=1e-6)


@pytest.mark.parametrize("N, nu", [(2, 2.0), (3, 1.5)])
def test_symbolic_groundstate_energy(N, nu):
    assert symbolic_groundstate_energy(N, nu, L) == pytest.approx(groundstate_energy(N, nu, L), rel=1e-8)


def test_sample_points_keep_their_distance(rng):
    config = CSConfig(3, 1.5)
    points = sample_points(config, 20, rng, min_gap=0.5)
    gaps = np.diff(np.hstack([points, points[:, :1] + L]), axis=1)
    assert points.shape == (20, 3)
    assert np.all(gaps > 0.5)


def test_single_pair_correlator_is_a_kernel_power():
    config = CSConfig(2, 1.5, eps=0.1, eps_prime=0.05)
    value = correlator_F(np.array([[0.7]]), np.array([[2.9]]), config)
    expected = kernel_b_power(0.7 - 2.9, -2.25, KernelParams(0.15, 0.0, L))
    assert value[0] == pytest.approx(complex(expected))


def test_cauchy_identity_at_free_fermions():
    config = CSConfig(2, 1.0)
    y, x = np.array([0.4, 2.0]), np.array([1.1, 3.5])
    value = correlator_F(y[None, :], x[None, :], config)[0]
    assert value == pytest.approx(cauchy_determinant(y, x, config), rel=1e-10)


@pytest.mark.parametrize("q", [0.1, 0.3])
def test_elliptic_identity_improves_along_the_ladder(q, rng):
    config = CSConfig(2, 1.5, q=q)
    ys, xs = sample_pairs(config, 8, rng, 0.5)
    report = elliptic_identity_residual(config, ys, xs, (0.1, 0.05, 0.025))
    assert len(report.residuals) == 3
    assert report.decreasing
    assert max(report.ratios) <= 0.6


def test_correction_operator_is_diagonal():
    state = FockBasisState(2, (1, 1))
    assert correction_operator().row(state)[state] == pytest.approx(-5 / TWO_PI)
    assert correction_operator().row(VACUUM).max_abs() == 0


def test_kappa_calibration_recovers_the_nominal_weight():
    kappa, residual = calibrate_kappa(1.5, 4)
    assert kappa == pytest.approx(NOMINAL_KAPPA, rel=1e-6)
    assert residual < 1e-6


def test_kappa_at_free_fermions_falls_back_to_nominal():
    kappa, _ = calibrate_kappa(1.0, 4)
    assert kappa == NOMINAL_KAPPA


def test_hamiltonian_kills_the_vacuum():
    H = build_H_nu3(CSConfig(2, 1.5), TruncationSpec(3, 0, 2), kappa=NOMINAL_KAPPA)
    assert H.operator.row(VACUUM).max_abs() < 1e-12


def test_hamiltonian_at_free_fermions_is_spin_three():
    trunc = TruncationSpec(3, 2, 2)
    H = build_H_nu3(CSConfig(2, 1.0), trunc, kappa=NOMINAL_KAPPA)
    states = [s for level in range(4) for s in states_at(level, 2)]
    assert max_difference(H.operator, build_W_boson(3, 0, trunc), states) < 1e-9


def test_recipe_vector_lives_in_the_right_sector_and_level():
    v = recipe_vector(EigenRecipe((2,)), 2, 1.5)
    assert v
    assert all(s.sector == 2 and s.level == 2 for s in v)


@pytest.mark.parametrize("momenta", [(1, 1), (2, 1), (0, 2)])
def test_series_path_matches_fock_path(momenta, rng):
    config = CSConfig(2, 1.5, eps=0.1)
    trunc = TruncationSpec(sum(momenta), 0, 2)
    raise_first = stripped_anyon_mode(momenta[0], config.nu, trunc, L)
    raise_second = stripped_anyon_mode(momenta[1], config.nu, trunc, L)
    eta = (raise_first @ raise_second).row(VACUUM)
    points = sample_points(config, 5, rng)
    fock = fock_correlator(eta, points, config)
    series = series_correlator(momenta, points, config)
    assert np.allclose(series, fock, rtol=1e-10, atol=1e-12 * np.max(np.abs(fock)))


def test_series_path_rejects_more_momenta_than_particles():
    with pytest.raises(VertexLabError):
        series_correlator((1, 1, 1), np.zeros((1, 2)), CSConfig(2, 1.5))
    with pytest.raises(VertexLabError):
        series_correlator((1,), np.zeros((1, 2)), CSConfig(2, 1.5), method="grid")


@pytest.mark.parametrize("momenta", [(), (1,), (2,), (1, 1)])
def test_series_path_matches_recipe_vectors_with_winding_padding(momenta, rng):
    config = CSConfig(2, 1.5, eps=0.1)
    eta = recipe_vector(EigenRecipe(momenta), 2, config.nu, L)
    points = sample_points(config, 4, rng)
    fock = fock_correlator(eta, points, config)
    series = series_correlator(momenta, points, config)
    assert np.allclose(series, fock, rtol=1e-10, atol=1e-12 * np.max(np.abs(fock)))


@pytest.mark.parametrize("momenta", [(1,), (2, 1)])
def test_fft_extraction_matches_series_extraction(momenta, rng):
    config = CSConfig(2, 1.5, eps=0.05)
    points = sample_points(config, 2, rng)
    series = series_correlator(momenta, points, config)
    fft = series_correlator(momenta, points, config, method="fft")
    assert np.allclose(fft, series, rtol=1e-9, atol=1e-12 * np.max(np.abs(series)))


def test_recipe_family_is_ordered_and_capped_by_particle_number():
    assert recipe_family(3, 2) == [EigenRecipe((3,)), EigenRecipe((2, 1))]
    assert recipe_family(0, 2) == [EigenRecipe()]


def test_sample_pairs_keep_all_points_apart(rng):
    config = CSConfig(2, 1.5)
    ys, xs = sample_pairs(config, 6, rng, 0.3)
    assert ys.shape == xs.shape == (6, 2)
    for y, x in zip(ys, xs):
        joint = np.sort(np.concatenate([y, x]))
        assert np.min(np.diff(np.concatenate([joint, [joint[0] + L]]))) > 0.3
    with pytest.raises(VertexLabError):
        sample_pairs(config, 1, rng, L / 4)


def test_eigenfunctions_of_a_full_level_are_ordered_and_cross_checked(rng):
    config = CSConfig(2, 1.5, grid=8)
    low = eigenfunction_from_recipe(EigenRecipe((1, 1)), config, rng)
    high = eigenfunction_from_recipe(EigenRecipe((2,)), config, rng)
    assert low.family == high.family == [EigenRecipe((2,)), EigenRecipe((1, 1))]
    assert low.predicted == pytest.approx((TWO_PI / L) ** 2 * ((1 + 1.5 * 2.25) ** 2 + (1 + 0.5 * 2.25) ** 2), rel=1e-6)
    assert low.E < high.E
    for result in (low, high):
        assert result.E == pytest.approx(result.predicted, rel=1e-5)
        assert result.fock_crosscheck < 1e-8
        assert result.fft_crosscheck < 1e-8
        assert result.closure < 1e-8


def test_recipe_eigenfunctions_match_predicted_energies(rng):
    config = CSConfig(2, 1.5, grid=8)
    energies = []
    for p in (0, 1, 2):
        result = eigenfunction_from_recipe(EigenRecipe((p,)), config, rng)
        assert result.predicted == pytest.approx(_predicted_two_particle_energy(p, 1.5), rel=1e-6)
        assert result.E == pytest.approx(result.predicted, rel=1e-5)
        assert result.residual < 1e-5
        energies.append(result.E)
    assert energies == sorted(energies)


def test_relation_between_fock_and_differential_operators(rng):
    config = CSConfig(2, 1.5)
    H = build_H_nu3(config, TruncationSpec(3, 2, 2))
    points = sample_points(config, 3, rng)
    assert relation_residual(H, config, points, 3) < 1e-6


def test_thermal_commutator_vanishes():
    trunc = TruncationSpec(3, 0, 2)
    H = build_H_nu3(CSConfig(2, 1.5), trunc, kappa=NOMINAL_KAPPA)
    X = rho_operator(-1, trunc) @ rho_operator(1, trunc)
    basis = [s for level in range(4) for s in states_at(level, 2)]
    assert abs(thermal_commutator_expectation(H.operator, X, 0.3, basis)) < 1e-10
