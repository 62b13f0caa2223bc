# associated Laguerre polynomials, their ladder identities and log factorials
import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .models import LaguerreEval

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# ln(k!) for k <= 20, exact in integer arithmetic before the single rounding
_LOG_FACTORIAL_TABLE = tuple(math.log(math.factorial(k)) for k in range(21))


# evaluate L_n^alpha(x) elementwise by forward recurrence
def laguerre_values(n: int, alpha: float, x: ArrayLike) -> np.ndarray:
    """Forward three-term recurrence; negative degree gives zeros"""
    x = np.asarray(x, dtype=float)
    if n < 0:
        return np.zeros_like(x)
    previous = np.ones_like(x)
    if n == 0:
        return previous
    current = 1.0 + alpha - x
    for k in range(1, n):
        # (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}
        previous, current = current, ((2 * k + 1 + alpha - x) * current - (k + alpha) * previous) / (k + 1)
    return current


# d/dx L_n^alpha = -L_{n-1}^{alpha+1}, valid at x = 0 as well
def laguerre_derivative_values(n: int, alpha: float, x: ArrayLike) -> np.ndarray:
    return -laguerre_values(n - 1, alpha + 1.0, x)


# d^2/dx^2 L_n^alpha = L_{n-2}^{alpha+2}
def laguerre_second_derivative_values(n: int, alpha: float, x: ArrayLike) -> np.ndarray:
    return laguerre_values(n - 2, alpha + 2.0, x)


def _check_laguerre_domain(n: int, alpha: float, x: float) -> None:
    if n < 0:
        raise DomainError(f"Laguerre degree must be non-negative, got n={n}")
    if not alpha > -1.0:
        raise DomainError(f"Laguerre superscript must exceed -1, got alpha={alpha}")
    if not x >= 0.0:
        raise DomainError(f"Laguerre argument must be non-negative, got x={x}")


# scalar value and derivative of L_n^alpha(x)
def laguerre(n: int, alpha: float, x: float) -> LaguerreEval:
    """Evaluate L_n^alpha(x) and its derivative"""
    _check_laguerre_domain(n, alpha, x)
    value = float(laguerre_values(n, alpha, x))
    derivative = float(laguerre_derivative_values(n, alpha, x))
    return LaguerreEval(n=n, alpha=alpha, x=x, value=value, derivative=derivative)


# x dL/dx against n L_n - (n+alpha) L_{n-1}
def laguerre_lower_identity(n: int, alpha: float, x: float) -> Tuple[float, float]:
    """Both sides of the lowering relation of the Laguerre family"""
    if n == 0:
        raise DomainError("lowering identity needs n >= 1")
    point = laguerre(n, alpha, x)
    lhs = x * point.derivative
    rhs = n * point.value - (n + alpha) * float(laguerre_values(n - 1, alpha, x))
    return lhs, rhs


# x dL/dx against (n+1) L_{n+1} - (n+alpha+1-x) L_n
def laguerre_raise_identity(n: int, alpha: float, x: float) -> Tuple[float, float]:
    """Both sides of the raising relation of the Laguerre family"""
    point = laguerre(n, alpha, x)
    lhs = x * point.derivative
    rhs = (n + 1) * float(laguerre_values(n + 1, alpha, x)) - (n + alpha + 1 - x) * point.value
    return lhs, rhs


def log_factorial(k: int) -> float:
    """ln(k!)"""
    if k < 0:
        raise DomainError(f"factorial of negative integer {k}")
    if k < len(_LOG_FACTORIAL_TABLE):
        return _LOG_FACTORIAL_TABLE[k]
    return float(gammaln(k + 1.0))


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0"""
    if not x > 0.0:
        raise DomainError(f"log_gamma needs a positive argument, got {x}")
    return float(gammaln(x))
