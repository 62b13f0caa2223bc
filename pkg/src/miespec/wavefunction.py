# normalized radial eigenfunctions and their fixed-epsilon relatives
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DomainError, EmptyGrid
from .models import Channel, DerivedParams, PotentialParams
from .potential import derive
from .specfun import (
    laguerre_derivative_values,
    laguerre_second_derivative_values,
    laguerre_values,
    log_factorial,
    log_gamma,
)

logger = logging.getLogger(__name__)

Radius = Union[float, np.ndarray]


# one radial function C r^nu exp(-eps r) L_n^{2v+1}(2 eps r)
@dataclass(frozen=True)
class RadialState:
    channel: Channel
    params: PotentialParams
    derived: DerivedParams
    log_norm: float
    norm_sign: int = 1
    # set for members of a fixed-epsilon family, None for physical eigenstates
    epsilon_override: Optional[float] = None

    @property
    def epsilon(self) -> float:
        return self.epsilon_override if self.epsilon_override is not None else self.derived.epsilon

    @property
    def norm_const(self) -> float:
        return self.norm_sign * math.exp(self.log_norm)

    @property
    def n_r(self) -> int:
        return self.channel.n_r

    @property
    def v(self) -> float:
        return self.derived.v

    @property
    def nu(self) -> float:
        return self.derived.nu

    @property
    def laguerre_alpha(self) -> float:
        return 2.0 * self.derived.v + 1.0

    @property
    def is_family_member(self) -> bool:
        return self.epsilon_override is not None


# sampled function on a strictly increasing positive grid
@dataclass(frozen=True)
class GridFunction:
    nodes: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.nodes) != len(self.values):
            raise DomainError("nodes and values differ in length")


# ln C_n for decay rate eps; Gamma replaces the factorials of non-integer order
def log_normalization(n_r: int, v: float, epsilon: float) -> float:
    return 0.5 * (
        log_factorial(n_r)
        + (2.0 * v + 3.0) * math.log(2.0 * epsilon)
        - math.log(2.0)
        - math.log(n_r + v + 1.0)
        - log_gamma(n_r + 2.0 * v + 2.0)
    )


def normalization_constant(params: PotentialParams, ch: Channel) -> float:
    """Normalization constant of the physical eigenstate"""
    derived = derive(params, ch)
    return math.exp(log_normalization(ch.n_r, derived.v, derived.epsilon))


# build a physical eigenstate, or a fixed-epsilon family member when epsilon_override is given
def radial_state(params: PotentialParams, ch: Channel, epsilon_override: Optional[float] = None) -> RadialState:
    """Construct a normalized radial state"""
    derived = derive(params, ch)
    if epsilon_override is not None and not epsilon_override > 0:
        raise DomainError(f"epsilon_override must be positive, got {epsilon_override}")
    epsilon = epsilon_override if epsilon_override is not None else derived.epsilon
    return RadialState(
        channel=ch,
        params=params,
        derived=derived,
        log_norm=log_normalization(ch.n_r, derived.v, epsilon),
        epsilon_override=epsilon_override,
    )


# neighbour of a state in its own family (same epsilon, same l)
def shifted(state: RadialState, n_r: int) -> RadialState:
    if n_r < 0:
        raise DomainError(f"n_r must be non-negative, got {n_r}")
    ch = state.channel.model_copy(update={"n_r": n_r})
    derived = derive(state.params, ch)
    return replace(
        state,
        channel=ch,
        derived=derived,
        log_norm=log_normalization(n_r, derived.v, state.epsilon),
    )


def _radii(r: Radius) -> np.ndarray:
    values = np.asarray(r, dtype=float)
    if values.size == 0:
        raise EmptyGrid("no radii given")
    if np.any(~(values > 0)):
        raise DomainError("radial functions are evaluated at r > 0 only")
    return values


def _unwrap(values: np.ndarray, r: Radius):
    return values if np.ndim(r) else float(values)


# C r^nu exp(-eps r), evaluated through its logarithm
def _envelope(state: RadialState, r: np.ndarray) -> np.ndarray:
    return state.norm_sign * np.exp(state.log_norm + state.nu * np.log(r) - state.epsilon * r)


def evaluate(state: RadialState, r: Radius):
    """R(r) of the state"""
    radii = _radii(r)
    x = 2.0 * state.epsilon * radii
    values = _envelope(state, radii) * laguerre_values(state.n_r, state.laguerre_alpha, x)
    return _unwrap(values, r)


# R, dR/dr and d2R/dr2 from the Laguerre derivative identities
def radial_derivatives(state: RadialState, r: Radius) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic value, first and second derivative"""
    r = _radii(r)
    eps, nu, n, a = state.epsilon, state.nu, state.n_r, state.laguerre_alpha
    x = 2.0 * eps * r
    env = _envelope(state, r)
    lag = laguerre_values(n, a, x)
    dlag = laguerre_derivative_values(n, a, x)
    d2lag = laguerre_second_derivative_values(n, a, x)
    # env' = env (nu/r - eps), env'' = env ((nu/r - eps)^2 - nu/r^2)
    slope = nu / r - eps
    value = env * lag
    first = env * (slope * lag + 2.0 * eps * dlag)
    second = env * ((slope ** 2 - nu / r ** 2) * lag + 4.0 * eps * slope * dlag + 4.0 * eps ** 2 * d2lag)
    return value, first, second


def eval_grid(state: RadialState, nodes) -> GridFunction:
    """Evaluate a state on a validated grid"""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size == 0:
        raise EmptyGrid("grid has no nodes")
    if np.any(np.diff(nodes) <= 0):
        raise DomainError("grid nodes must be strictly increasing")
    return GridFunction(nodes=nodes, values=np.asarray(evaluate(state, nodes)))


# U(r) = r^{(N-1)/2} R(r)
def reduced_u(state: RadialState, r: Radius):
    r_arr = _radii(r)
    values = r_arr ** ((state.channel.N - 1) / 2.0) * np.asarray(evaluate(state, r_arr))
    return _unwrap(values, r)


# grid spanning [0.05/eps, 30/eps] used for pointwise checks
def standard_grid(state: RadialState, points: int = 600) -> np.ndarray:
    return np.linspace(0.05 / state.epsilon, 30.0 / state.epsilon, points)


def node_count(grid_function: GridFunction) -> int:
    """Number of sign changes of the sampled values"""
    signs = np.sign(grid_function.values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
