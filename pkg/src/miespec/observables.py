# Hellmann-Feynman expectation values and the virial relation
import logging
import math
from typing import Callable

from .errors import DomainError
from .models import Channel, HftValues, PotentialParams
from .potential import derive, k_value
from .quadrature import kinetic_expectation, potential_expectation
from .wavefunction import radial_state

logger = logging.getLogger(__name__)

# parameters E can be differentiated against
HFT_PARAMETERS = ("A", "B", "mu", "ell")


# 2 n_r + 1 + sqrt(radicand) and sqrt(radicand)
def _k_and_root(params: PotentialParams, ch: Channel):
    derived = derive(params, ch)
    root = math.sqrt(derived.radicand)
    return 2.0 * ch.n_r + 1.0 + root, root


def expect_inv_r(params: PotentialParams, ch: Channel) -> float:
    """<1/r> from the derivative of E with respect to A"""
    K, _ = _k_and_root(params, ch)
    return 4.0 * params.mu * params.A / (params.hbar ** 2 * K ** 2)


def expect_inv_r2(params: PotentialParams, ch: Channel) -> float:
    """<1/r^2> from the derivative of E with respect to B"""
    K, root = _k_and_root(params, ch)
    return 16.0 * params.mu ** 2 * params.A ** 2 / (params.hbar ** 4 * root * K ** 3)


def beta(params: PotentialParams, ch: Channel) -> float:
    K, root = _k_and_root(params, ch)
    return 8.0 * params.mu * params.B / (params.hbar ** 2 * root * K)


# E as a function of one parameter with the others frozen; l may be non-integer
def _energy_function(params: PotentialParams, ch: Channel, parameter: str) -> Callable[[float], float]:
    if parameter not in HFT_PARAMETERS:
        raise DomainError(f"unknown parameter {parameter!r}; expected one of {HFT_PARAMETERS}")

    def energy_at(value: float) -> float:
        if parameter == "ell":
            shifted, ell = params, value
        else:
            shifted, ell = params.model_copy(update={parameter: value}), float(ch.ell)
        K = k_value(shifted, ch.N, ell, ch.n_r)
        return shifted.C - 2.0 * shifted.mu * shifted.A ** 2 / (shifted.hbar ** 2 * K ** 2)

    return energy_at


# central difference at h and h/2 combined by Richardson extrapolation
def hft_derivative(params: PotentialParams, ch: Channel, parameter: str, step: float = 1e-3) -> float:
    """dE/dq by finite differences of the closed-form energy"""
    energy_at = _energy_function(params, ch, parameter)
    centre = float(ch.ell) if parameter == "ell" else getattr(params, parameter)
    h = step * max(1.0, abs(centre))

    def central(width: float) -> float:
        return (energy_at(centre + width) - energy_at(centre - width)) / (2.0 * width)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


# <1/r^2> recovered from dE/dl with l treated as continuous
def expect_inv_r2_from_ell(params: PotentialParams, ch: Channel) -> float:
    weight = 2.0 * ch.ell + ch.N - 2.0
    if not weight > 0:
        raise DomainError(f"dE/dl carries no <1/r^2> information when 2l+N-2 = {weight}")
    return (2.0 * params.mu / params.hbar ** 2) * hft_derivative(params, ch, "ell") / weight


# <T> from dE/dmu: (C - E)(1 - beta)
def kinetic_closed_form(params: PotentialParams, ch: Channel) -> float:
    K, _ = _k_and_root(params, ch)
    binding = 2.0 * params.mu * params.A ** 2 / (params.hbar ** 2 * K ** 2)
    return binding * (1.0 - beta(params, ch))


def virial(params: PotentialParams, ch: Channel) -> HftValues:
    """Closed-form expectations and both sides of -(2-beta)<T> = (1-beta)(<V>-C)"""
    state = radial_state(params, ch)
    kinetic = kinetic_expectation(state)
    potential = potential_expectation(state)
    b = beta(params, ch)
    values = HftValues(
        inv_r=expect_inv_r(params, ch),
        inv_r2=expect_inv_r2(params, ch),
        beta=b,
        kinetic=kinetic,
        potential=potential,
        virial_lhs=-(2.0 - b) * kinetic,
        # potential measured from its asymptote C
        virial_rhs=(1.0 - b) * (potential - params.C),
    )
    logger.debug(f"virial {ch.label()}: residual {values.virial_residual:.3e}")
    return values
