# generalized Gauss-Laguerre rules and radial inner products built on them
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy import integrate
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, logsumexp

from .errors import ConvergenceError, DomainError, FamilyError
from .specfun import laguerre_derivative_values, laguerre_values
from .spectrum import energy
from .wavefunction import RadialState, evaluate

logger = logging.getLogger(__name__)

MAX_ORDER = 400
MAX_NEWTON_STEPS = 100
ESCALATION_ORDERS = (64, 128, 256)
ESCALATION_TOLERANCE = 1e-11
_RESCALE_LIMIT = 1e100


def _signed_log_sum(log_weights: np.ndarray, values: np.ndarray) -> Tuple[float, float, float]:
    """log|sum w v|, its sign and log(sum w |v|) with the weights given as logs"""
    with np.errstate(divide="ignore"):
        log_size = float(logsumexp(log_weights, b=np.abs(values)))
        if log_size == -math.inf:
            return -math.inf, 0.0, -math.inf
        log_value, sign = logsumexp(log_weights, b=values, return_sign=True)
    return float(log_value), float(sign), log_size


# nodes and weights for the weight x^alpha e^-x on (0, inf)
# log_weights is authoritative; weights at the largest nodes of high orders underflow to 0.0
@dataclass(frozen=True)
class QuadratureRule:
    alpha: float
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray

    @property
    def underflowed(self) -> int:
        """number of weights that are not representable as a positive double"""
        return int(np.count_nonzero(self.weights == 0.0))

    def integrate(self, values: np.ndarray) -> float:
        log_value, sign, _ = _signed_log_sum(self.log_weights, np.broadcast_to(values, self.nodes.shape))
        return sign * math.exp(log_value) if sign else 0.0


# L_order and L_{order-1} at x, rescaled together; returns the common log scale
def _scaled_laguerre_pair(order: int, alpha: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    previous = np.ones_like(x)
    current = 1.0 + alpha - x
    log_scale = np.zeros_like(x)
    for k in range(1, order):
        previous, current = current, ((2 * k + 1 + alpha - x) * current - (k + alpha) * previous) / (k + 1)
        big = np.abs(current) > _RESCALE_LIMIT
        if np.any(big):
            scale = np.where(big, np.abs(current), 1.0)
            previous = previous / scale
            current = current / scale
            log_scale = log_scale + np.log(scale)
    return current, previous, log_scale


# eigenvalues of the Jacobi matrix as starting points for Newton
def _initial_nodes(alpha: float, order: int) -> np.ndarray:
    if order == 1:
        return np.array([1.0 + alpha])
    k = np.arange(order, dtype=float)
    diagonal = 2.0 * k + alpha + 1.0
    off_diagonal = np.sqrt(k[1:] * (k[1:] + alpha))
    nodes = eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True)
    return np.maximum(np.sort(nodes), np.finfo(float).tiny)


@lru_cache(maxsize=512)
def gauss_laguerre(alpha: float, order: int) -> QuadratureRule:
    """Gauss-Laguerre rule of the given order for weight x^alpha e^-x"""
    if not alpha > -1.0:
        raise DomainError(f"Gauss-Laguerre weight exponent must exceed -1, got {alpha}")
    if not 1 <= order <= MAX_ORDER:
        raise DomainError(f"order must lie in [1, {MAX_ORDER}], got {order}")

    nodes = _initial_nodes(alpha, order)
    converged = np.zeros(order, dtype=bool)
    last_step = np.full(order, np.inf)
    for _ in range(MAX_NEWTON_STEPS):
        value, previous, _ = _scaled_laguerre_pair(order, alpha, nodes)
        slope = (order * value - (order + alpha) * previous) / nodes
        step = value / slope
        nodes = nodes - step
        size = np.abs(step)
        # settled, or stuck at the rounding floor
        converged |= (size <= 4.0 * np.finfo(float).eps * nodes) | ((size <= 1e-12 * nodes) & (size >= last_step))
        last_step = size
        if np.all(converged):
            break
    else:
        raise ConvergenceError(
            f"Newton iteration for Gauss-Laguerre nodes (alpha={alpha}, order={order}) "
            f"did not converge in {MAX_NEWTON_STEPS} steps"
        )
    if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
        raise ConvergenceError(f"Gauss-Laguerre nodes for alpha={alpha}, order={order} are not distinct and positive")

    # Christoffel weights Gamma(n+alpha+1) / (n! x [L_n'(x)]^2), in logs
    value, previous, log_scale = _scaled_laguerre_pair(order, alpha, nodes)
    slope = (order * value - (order + alpha) * previous) / nodes
    log_derivative = np.log(np.abs(slope)) + log_scale
    log_weights = gammaln(order + alpha + 1.0) - gammaln(order + 1.0) - np.log(nodes) - 2.0 * log_derivative
    # zeroth moment pinned to Gamma(alpha+1)
    log_weights = log_weights + (gammaln(alpha + 1.0) - logsumexp(log_weights))
    if not np.all(np.isfinite(log_weights)):
        raise ConvergenceError(f"Gauss-Laguerre weights for alpha={alpha}, order={order} are not finite")
    nodes.setflags(write=False)
    weights = np.exp(log_weights)
    weights.setflags(write=False)
    log_weights.setflags(write=False)
    logger.debug(f"Gauss-Laguerre rule alpha={alpha} order={order} ready")
    return QuadratureRule(alpha=alpha, order=order, nodes=nodes, weights=weights, log_weights=log_weights)


def _check_pair(f: RadialState, g: RadialState, measure_exponent: int) -> None:
    if f.channel.N != g.channel.N:
        raise DomainError(f"states live in different dimensions: N={f.channel.N} and N={g.channel.N}")
    N = f.channel.N
    if measure_exponent not in (N - 2, N - 1):
        raise DomainError(f"measure exponent must be N-2 or N-1, got {measure_exponent} for N={N}")


# polynomial part of r g'(r) / (envelope of g), as a function of r
def _rddr_polynomial(g: RadialState) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate_part(r: np.ndarray) -> np.ndarray:
        x = 2.0 * g.epsilon * r
        lag = laguerre_values(g.n_r, g.laguerre_alpha, x)
        dlag = laguerre_derivative_values(g.n_r, g.laguerre_alpha, x)
        return (g.nu - g.epsilon * r) * lag + x * dlag

    return evaluate_part


def _plain_polynomial(g: RadialState) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate_part(r: np.ndarray) -> np.ndarray:
        return laguerre_values(g.n_r, g.laguerre_alpha, 2.0 * g.epsilon * r)

    return evaluate_part


# integral of f * G * r^(power+measure) where G = envelope(g) * g_part
def _mapped_integral(
    f: RadialState,
    g: RadialState,
    power: int,
    measure_exponent: int,
    g_part: Callable[[np.ndarray], np.ndarray],
) -> float:
    exponent = f.nu + g.nu + power + measure_exponent
    if not exponent > -1.0:
        raise DomainError(
            f"integrand behaves like r^{exponent} at the origin; the integral diverges"
        )
    scale = f.epsilon + g.epsilon

    def at_order(order: int) -> Tuple[float, float, float]:
        rule = gauss_laguerre(exponent, order)
        r = rule.nodes / scale
        values = laguerre_values(f.n_r, f.laguerre_alpha, 2.0 * f.epsilon * r) * g_part(r)
        return _signed_log_sum(rule.log_weights, values)

    log_prefactor = f.log_norm + g.log_norm - (exponent + 1.0) * math.log(scale)
    sign = f.norm_sign * g.norm_sign
    log_value, value_sign, log_size = at_order(ESCALATION_ORDERS[0])
    for order in ESCALATION_ORDERS[1:]:
        refined_log, refined_sign, refined_log_size = at_order(order)
        reference = max(log_size, refined_log_size)
        if reference == -math.inf:
            return 0.0
        # both sums relative to the larger absolute sum
        gap = abs(refined_sign * math.exp(refined_log - reference) - value_sign * math.exp(log_value - reference))
        if gap <= ESCALATION_TOLERANCE:
            return sign * refined_sign * math.exp(log_prefactor + refined_log) if refined_sign else 0.0
        logger.debug(f"order {order} disagrees with previous order by {gap:.3e} (relative); escalating")
        log_value, value_sign, log_size = refined_log, refined_sign, refined_log_size
    raise ConvergenceError(
        f"inner product did not settle up to order {ESCALATION_ORDERS[-1]} (exponent {exponent})"
    )


def radial_inner_product(f: RadialState, g: RadialState, power: int, measure_exponent: int) -> float:
    """Integral of f g r^power r^measure_exponent over (0, inf)"""
    _check_pair(f, g, measure_exponent)
    if power < -2:
        raise DomainError(f"power must be >= -2, got {power}")
    return _mapped_integral(f, g, power, measure_exponent, _plain_polynomial(g))


def radial_rddr_inner_product(f: RadialState, g: RadialState, measure_exponent: int) -> float:
    """Integral of f (r dg/dr) r^measure_exponent over (0, inf)"""
    _check_pair(f, g, measure_exponent)
    return _mapped_integral(f, g, 0, measure_exponent, _rddr_polynomial(g))


# scipy adaptive quadrature on the half line, independent of the Gauss rules
def adaptive_inner_product(f: RadialState, g: RadialState, power: int, measure_exponent: int) -> float:
    _check_pair(f, g, measure_exponent)
    exponent = power + measure_exponent

    def integrand(r: float) -> float:
        # the envelope has underflowed long before this point
        if (f.epsilon + g.epsilon) * r > 1400.0:
            return 0.0
        return evaluate(f, r) * evaluate(g, r) * r ** exponent

    # split at a few decay lengths so the tail interval starts past the oscillations
    split = 10.0 * (f.n_r + g.n_r + 2) / (f.epsilon + g.epsilon)
    head, _ = integrate.quad(integrand, 0.0, split, limit=400, epsabs=1e-14, epsrel=1e-12)
    tail, _ = integrate.quad(integrand, split, np.inf, limit=400, epsabs=1e-14, epsrel=1e-12)
    return head + tail


def norm(state: RadialState) -> float:
    """Integral of R^2 r^(N-1)"""
    return radial_inner_product(state, state, 0, state.channel.N - 1)


def potential_expectation(state: RadialState) -> float:
    """<V> = -A <1/r> + B <1/r^2> + C"""
    N = state.channel.N
    params = state.params
    inv_r = radial_inner_product(state, state, -1, N - 1)
    inv_r2 = radial_inner_product(state, state, -2, N - 1)
    return -params.A * inv_r + params.B * inv_r2 + params.C


def kinetic_expectation(state: RadialState) -> float:
    """<T> = E - <V> without second derivatives"""
    if state.is_family_member:
        raise FamilyError("kinetic energy is defined for physical eigenstates only")
    return energy(state.params, state.channel).energy - potential_expectation(state)
