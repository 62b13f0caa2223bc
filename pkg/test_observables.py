import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.miespec.errors import DomainError
from src.miespec.models import Channel
from src.miespec.observables import (
    beta,
    expect_inv_r,
    expect_inv_r2,
    expect_inv_r2_from_ell,
    hft_derivative,
    kinetic_closed_form,
    virial,
)
from src.miespec.potential import make_params
from src.miespec.quadrature import kinetic_expectation, radial_inner_product
from src.miespec.spectrum import energy
from src.miespec.wavefunction import radial_state

SWEEP = [make_params(1.0), make_params(2.0, 1.0), make_params(2.0, 1.0, 1.0), make_params(1.0, 0.5, mu=0.6, hbar=1.3)]
CHANNELS = [Channel(N=N, ell=ell, n_r=n_r) for N in (3, 4, 5) for ell in (0, 1) for n_r in (0, 1, 2)]


def test_hydrogen_ground_state_values():
    params, ch = make_params(1.0), Channel(N=3, ell=0)
    assert expect_inv_r(params, ch) == pytest.approx(1.0)
    assert expect_inv_r2(params, ch) == pytest.approx(2.0)
    assert beta(params, ch) == 0.0


def test_kratzer_beta():
    assert beta(make_params(2.0, 1.0), Channel(N=3, ell=0)) == pytest.approx(2.0 / 3.0)


@pytest.mark.parametrize("params", SWEEP)
def test_closed_forms_match_quadrature(params):
    for ch in CHANNELS:
        state = radial_state(params, ch)
        assert expect_inv_r(params, ch) == pytest.approx(radial_inner_product(state, state, -1, ch.N - 1), rel=1e-9)
        assert expect_inv_r2(params, ch) == pytest.approx(radial_inner_product(state, state, -2, ch.N - 1), rel=1e-9)


@pytest.mark.parametrize("params", SWEEP)
def test_hellmann_feynman_derivatives(params):
    for ch in CHANNELS:
        # dH/dA = -1/r, dH/dB = +1/r^2
        assert -hft_derivative(params, ch, "A") == pytest.approx(expect_inv_r(params, ch), rel=1e-8)
        assert hft_derivative(params, ch, "B") == pytest.approx(expect_inv_r2(params, ch), rel=1e-8)
        assert expect_inv_r2_from_ell(params, ch) == pytest.approx(expect_inv_r2(params, ch), rel=1e-8)


@pytest.mark.parametrize("params", SWEEP)
def test_kinetic_energy_from_mass_derivative(params):
    for ch in CHANNELS:
        kinetic = kinetic_expectation(radial_state(params, ch))
        assert kinetic_closed_form(params, ch) == pytest.approx(kinetic, rel=1e-9)
        # dE/dmu = -<T>/mu
        assert -params.mu * hft_derivative(params, ch, "mu") == pytest.approx(kinetic, rel=1e-8)


@pytest.mark.parametrize("params", SWEEP)
def test_virial_relation(params):
    for ch in CHANNELS:
        values = virial(params, ch)
        assert values.virial_residual < 1e-8
        assert values.kinetic == pytest.approx((params.C - energy(params, ch).energy) * (1.0 - values.beta), rel=1e-9)


def test_virial_uses_potential_relative_to_its_asymptote():
    params, ch = make_params(2.0, 1.0, 1.0), Channel(N=3, ell=0)
    values = virial(params, ch)
    assert values.virial_rhs == pytest.approx((1.0 - values.beta) * (values.potential - 1.0), rel=1e-14)
    # the energy form only holds once C is removed
    assert -values.kinetic == pytest.approx((1.0 - values.beta) * (energy(params, ch).energy - 1.0), rel=1e-9)
    assert -values.kinetic != pytest.approx((1.0 - values.beta) * energy(params, ch).energy, rel=1e-3)


def test_unknown_parameter():
    with pytest.raises(DomainError):
        hft_derivative(make_params(1.0), Channel(N=3, ell=0), "C2")


def test_ell_derivative_needs_positive_weight():
    with pytest.raises(DomainError):
        expect_inv_r2_from_ell(make_params(1.0, 0.5), Channel(N=2, ell=0))
