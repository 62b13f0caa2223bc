# Mie-type potential parameters, Kratzer converters and per-channel derived quantities
import logging
import math
from typing import Union

import numpy as np

from .errors import DomainError, NonPositiveCoupling, NonPositiveMass, UnphysicalChannel
from .models import Channel, DerivedParams, KratzerForm, KratzerVariant, PotentialParams

logger = logging.getLogger(__name__)


# validate and build the (A, B, C, mu, hbar) record
def make_params(A: float, B: float = 0.0, C: float = 0.0, mu: float = 1.0, hbar: float = 1.0) -> PotentialParams:
    """Create validated potential parameters"""
    if not A > 0:
        raise NonPositiveCoupling(f"A must be positive for bound states, got A={A}")
    if not mu > 0:
        raise NonPositiveMass(f"mu must be positive, got mu={mu}")
    if not hbar > 0:
        raise NonPositiveMass(f"hbar must be positive, got hbar={hbar}")
    return PotentialParams(A=float(A), B=float(B), C=float(C), mu=float(mu), hbar=float(hbar))


# map a Kratzer form onto (A, B, C)
def from_kratzer(form: KratzerForm, mu: float = 1.0, hbar: float = 1.0) -> PotentialParams:
    """Convert a Kratzer-Fues or modified Kratzer form to general parameters"""
    kappa, r_e = form.kappa, form.r_e
    A = 2.0 * kappa * r_e
    B = kappa * r_e * r_e
    # modified form kappa*((r - r_e)/r)^2 adds the dissociation constant
    C = kappa if form.variant == KratzerVariant.MODIFIED_KRATZER else 0.0
    return make_params(A, B, C, mu=mu, hbar=hbar)


# V(r) for Kratzer forms written in kappa and r_e
def kratzer_potential(form: KratzerForm, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    r = _positive_radius(r)
    if form.variant == KratzerVariant.MODIFIED_KRATZER:
        return form.kappa * ((r - form.r_e) / r) ** 2
    return -form.kappa * (2.0 * form.r_e / r - (form.r_e / r) ** 2)


def _positive_radius(r):
    values = np.asarray(r, dtype=float)
    if values.size == 0 or np.any(~(values > 0)):
        raise DomainError("potential is defined for r > 0 only")
    return values if values.ndim else float(values)


def evaluate_potential(params: PotentialParams, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """V(r) = -A/r + B/r^2 + C"""
    r = _positive_radius(r)
    return -params.A / r + params.B / r ** 2 + params.C


# (2l+N-2)^2 + 8 mu B / hbar^2 with l allowed to be real
def radicand(params: PotentialParams, N: int, ell: float) -> float:
    return (2.0 * ell + N - 2.0) ** 2 + 8.0 * params.mu * params.B / params.hbar ** 2


# closed-form K = 2 n_r + 1 + sqrt(radicand) for a real-valued l
def k_value(params: PotentialParams, N: int, ell: float, n_r: int) -> float:
    lam2 = radicand(params, N, ell)
    if not lam2 > 0:
        raise UnphysicalChannel(f"radicand {lam2} <= 0 for N={N}, l={ell}, B={params.B}")
    v = (math.sqrt(lam2) - 1.0) / 2.0
    return 2.0 * n_r + 2.0 * v + 2.0


# secondary symbols of one channel
def derive(params: PotentialParams, ch: Channel) -> DerivedParams:
    """Compute radicand, v, nu, epsilon, alpha and K"""
    lam2 = radicand(params, ch.N, ch.ell)
    if not lam2 > 0:
        raise UnphysicalChannel(
            f"radicand (2l+N-2)^2 + 8 mu B/hbar^2 = {lam2} is not positive for {ch.label()}"
        )
    v = (math.sqrt(lam2) - 1.0) / 2.0
    nu = v - (ch.N - 3) / 2.0
    K = 2.0 * ch.n_r + 2.0 * v + 2.0
    # binding energy C - E_n of the quantized level
    gap = 2.0 * params.mu * params.A ** 2 / (params.hbar ** 2 * K ** 2)
    epsilon = math.sqrt(2.0 * params.mu * gap) / params.hbar
    alpha = params.A * math.sqrt(params.mu / (2.0 * params.hbar ** 2 * gap))
    return DerivedParams(radicand=lam2, v=v, nu=nu, epsilon=epsilon, alpha=alpha, K=K)
