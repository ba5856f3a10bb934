import math
from fractions import Fraction

import numpy as np
import pytest

from vertexlab.errors import LoopError, SingularityError
from vertexlab.loopspace import (
    TWO_PI,
    BlipParams,
    KernelParams,
    Loop,
    anyon_blip,
    anyon_loop,
    blip,
    cocycle_S,
    cocycle_tilde_S,
    decompose_loop,
    kernel_b,
    kernel_b_power,
    schwinger_term,
    sgn_eps,
    smoothed_delta,
)

L = TWO_PI


def _random_loop(rng, max_mode=4, winding=0):
    modes = {}
    for n in range(1, max_mode + 1):
        c = complex(rng.normal(), rng.normal())
        modes[n] = c
        modes[-n] = c.conjugate()
    return Loop(L, winding, float(rng.normal()), modes)


def test_decompose_recovers_winding_mean_and_modes():
    def f(x):
        return TWO_PI * x / L + 3.0 + np.cos(TWO_PI * x / L)

    loop = decompose_loop(f, L, max_mode=4)

    assert loop.winding == 1
    assert loop.mean == pytest.approx(3.0, abs=1e-12)
    assert loop.mode(1) == pytest.approx(L / 2, abs=1e-12)
    assert loop.mode(-1) == pytest.approx(L / 2, abs=1e-12)
    assert loop.mode(2) == 0


def test_decompose_constant_loop():
    loop = decompose_loop(lambda x: np.full_like(x, 0.7), L, max_mode=2)
    assert loop.winding == 0
    assert loop.mean == pytest.approx(0.7)
    assert all(abs(c) < 1e-12 for c in loop.modes.values())


def test_decompose_rejects_fractional_winding():
    with pytest.raises(LoopError):
        decompose_loop(lambda x: 0.5 * TWO_PI * x / L, L, max_mode=2)


def test_decompose_rejects_too_few_samples():
    samples = np.linspace(0.0, TWO_PI, 5)
    with pytest.raises(LoopError):
        decompose_loop(samples, L, max_mode=4)


def test_decompose_accepts_anyon_winding():
    loop = decompose_loop(lambda x: 0.5 * TWO_PI * x / L, L, max_mode=2, anyon_unit=2.0)
    assert loop.winding == Fraction(1, 2)


def test_loop_rejects_zero_mode_entry():
    with pytest.raises(LoopError):
        Loop(L, 0, 0.0, {0: 1.0})


def test_loop_rejects_fractional_winding_without_anyon_tag():
    with pytest.raises(LoopError):
        Loop(L, Fraction(1, 2))


def test_blip_modes_follow_closed_form():
    y, eps = 0.8, 0.3
    loop = blip(y, eps, L)
    lam = math.exp(-TWO_PI * eps / L)
    for n in (1, 2, 5):
        expected = -1j * L * np.exp(-1j * TWO_PI * n * y / L) * lam ** n / n
        assert loop.mode(n) == pytest.approx(expected, abs=1e-14)
        assert loop.mode(-n) == pytest.approx(np.conj(expected), abs=1e-14)
    assert loop.winding == 1
    assert loop.mean == pytest.approx(-TWO_PI * y / L)
    assert loop.is_real()


def test_blip_tends_to_pi_sign():
    y = 1.0
    loop = blip(y, 1e-3, L)
    assert loop.evaluate(y + 1.0).real == pytest.approx(math.pi, abs=1e-2)
    assert loop.evaluate(y - 1.0).real == pytest.approx(-math.pi, abs=1e-2)


def test_cocycle_is_antisymmetric_and_bilinear(rng):
    f1, f2, f3 = (_random_loop(rng, winding=w) for w in (1, 0, -2))

    assert cocycle_S(f1, f1) == pytest.approx(0, abs=1e-12)
    assert cocycle_S(f1, f2) == pytest.approx(-cocycle_S(f2, f1), abs=1e-12)
    assert cocycle_S(f1 + f3, f2) == pytest.approx(cocycle_S(f1, f2) + cocycle_S(f3, f2), abs=1e-12)
    assert cocycle_S(f1, f2).imag == pytest.approx(0, abs=1e-12)


def test_cocycle_of_winding_loop_with_constant():
    winding_only = Loop(L, 1)
    constant = Loop(L, 0, 0.4)
    assert cocycle_S(winding_only, constant) == pytest.approx(0.4)


def test_tilde_cocycle_relations(rng):
    f1, f2 = _random_loop(rng, winding=1), _random_loop(rng, winding=-1)

    assert cocycle_tilde_S(f1, f2) - cocycle_tilde_S(f2, f1) == pytest.approx(2 * cocycle_S(f1, f2), abs=1e-12)
    assert cocycle_tilde_S(f1, f2) == pytest.approx(-np.conj(cocycle_tilde_S(f2, f1)), abs=1e-12)
    assert cocycle_tilde_S(f1, f1).imag < 0
    assert cocycle_tilde_S(Loop(L, 1), Loop(L, 2)) == 0


def test_schwinger_term_is_i_times_mode_cocycle(rng):
    a1, a2 = _random_loop(rng), _random_loop(rng)
    a1 = Loop(L, 0, 0.0, a1.modes)
    a2 = Loop(L, 0, 0.0, a2.modes)
    assert schwinger_term(a1, a2) == pytest.approx(1j * cocycle_S(a1, a2), abs=1e-12)


@pytest.mark.parametrize("y, y_prime", [(0.3, 2.1), (4.0, 1.2)])
def test_blip_cocycle_relations(y, y_prime):
    eps, eps_prime = 0.2, 0.15
    f, f_prime = blip(y, eps, L), blip(y_prime, eps_prime, L)
    merged = blip(y_prime, eps + eps_prime, L)

    lhs = cocycle_S(f.minus_part(), f_prime.plus_part())
    assert lhs == pytest.approx(complex(merged.plus_part().evaluate(y)), abs=1e-12)

    assert cocycle_S(f, f_prime) == pytest.approx(math.pi * sgn_eps(y - y_prime, eps + eps_prime, L), abs=1e-12)

    delta, merged_delta = smoothed_delta(y, eps, L), smoothed_delta(y_prime, eps + eps_prime, L)
    assert cocycle_S(delta.minus_part(), f_prime.plus_part()) == pytest.approx(
        -complex(merged_delta.plus_part().evaluate(y)), abs=1e-12
    )
    assert cocycle_S(delta.plus_part(), f_prime.minus_part()) == pytest.approx(
        -complex(merged_delta.minus_part().evaluate(y)), abs=1e-12
    )


def test_smoothed_delta_is_derivative_of_blip():
    y, eps, h = 1.3, 0.25, 1e-5
    f, delta = blip(y, eps, L), smoothed_delta(y, eps, L)
    assert delta.mean == pytest.approx(1 / L)
    for x in (0.2, 1.3, 3.0):
        derivative = (f.evaluate(x + h) - f.evaluate(x - h)) / (2 * h) / TWO_PI
        assert delta.evaluate(x).real == pytest.approx(derivative.real, abs=1e-6)


def test_sgn_eps_is_odd_and_converges():
    r = np.linspace(-3.0, 3.0, 13)
    assert np.allclose(sgn_eps(r, 0.1, L), -sgn_eps(-r, 0.1, L))
    assert sgn_eps(0.25 * L, 1e-4 * L, L) == pytest.approx(1.0, abs=1e-3)
    assert sgn_eps(-0.25 * L, 1e-4 * L, L) == pytest.approx(-1.0, abs=1e-3)
    with pytest.raises(LoopError):
        sgn_eps(0.1, 0.0, L)


def test_kernel_b_at_origin_and_on_the_circle():
    eps = 0.3
    value = complex(kernel_b(0.0, KernelParams(eps, 0.0, L)))
    expected = 2 * math.exp(-math.pi * eps / L) * math.sinh(math.pi * eps / L)
    assert value == pytest.approx(expected, abs=1e-14)

    r = np.linspace(0.1, 6.0, 9)
    assert np.allclose(np.abs(kernel_b(r, KernelParams(0.0, 0.0, L))), 2 * np.abs(np.sin(math.pi * r / L)))


@pytest.mark.parametrize("q", [0.0, 0.3])
def test_kernel_power_one_matches_kernel(q):
    r = np.linspace(-2.0, 5.0, 11)
    params = KernelParams(0.2, q, L)
    assert np.allclose(kernel_b_power(r, 1.0, params), kernel_b(r, params), atol=1e-13)


def test_kernel_power_is_multiplicative():
    r = np.linspace(0.3, 5.0, 7)
    params = KernelParams(0.1, 0.2, L)
    product = kernel_b_power(r, 0.7, params) * kernel_b_power(r, 1.6, params)
    assert np.allclose(product, kernel_b_power(r, 2.3, params), atol=1e-12)


def test_kernel_power_singular_at_coincident_points():
    with pytest.raises(SingularityError):
        kernel_b_power(0.0, -1.0, KernelParams(0.0, 0.0, L))


def test_kernel_params_reject_bad_nome():
    with pytest.raises(SingularityError):
        KernelParams(0.0, 1.0, L)


def test_blip_params_require_integer_multiple():
    with pytest.raises(LoopError):
        BlipParams(y=0.0, eps=0.1, nu=0.75, nu0=0.5)
    with pytest.raises(LoopError):
        BlipParams(y=0.0, eps=0.0)


def test_anyon_blip_with_unit_statistics_is_the_blip():
    a, b = anyon_blip(0.5, 0.2, 1.0, L), blip(0.5, 0.2, L)
    assert a.winding == b.winding
    assert a.mean == pytest.approx(b.mean)
    assert a.modes == b.modes


def test_anyon_loop_scales_the_blip():
    loop = anyon_loop(BlipParams(y=0.5, eps=0.2, nu=1.5, nu0=0.5), L)
    base = anyon_blip(0.5, 0.2, 0.5, L)
    assert loop.winding == 3
    assert base.winding == 2
    assert loop.mode(2) == pytest.approx(1.5 * base.mode(2))


def test_record_round_trip(rng):
    loop = _random_loop(rng, winding=2)
    restored = Loop.from_record(loop.to_record())
    assert restored.winding == loop.winding
    assert restored.mean == pytest.approx(loop.mean)
    for n, c in loop.modes.items():
        assert restored.mode(n) == pytest.approx(c)
