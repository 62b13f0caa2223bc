# independent numerical checks: finite-difference spectrum and ODE residuals
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import ConfigError, ConvergenceError, DomainError, ResolutionError
from .models import Channel, FdProblem, PotentialParams, SweepConfig, VerificationReport
from .potential import derive, evaluate_potential
from .wavefunction import RadialState, radial_derivatives, standard_grid

logger = logging.getLogger(__name__)

MAX_LEVELS = 10
# r_max in units of the slowest decay length, and grid spacing in units of hbar^2/(mu A)
DEFAULT_DECAY_LENGTHS = 40.0
DEFAULT_POINTS_PER_BOHR = 500.0
MAX_GRID_POINTS = 400_000


def effective_potential(params: PotentialParams, N: int, ell: int, r):
    """V(r) plus the N-dimensional centrifugal term of the reduced equation"""
    centrifugal = ell * (ell + N - 2) + (N - 1) * (N - 3) / 4.0
    r_values = np.asarray(r, dtype=float)
    if r_values.size == 0 or np.any(~(r_values > 0)):
        raise DomainError("effective potential is defined for r > 0 only")
    values = evaluate_potential(params, r_values) + params.hbar ** 2 / (2.0 * params.mu) * centrifugal / r_values ** 2
    return values if np.ndim(r) else float(values)


# 4 l(l+N-2) + (N-1)(N-3) == (2l+N-1)(2l+N-3) in integers
def centrifugal_groupings_agree(N: int, ell: int) -> bool:
    return 4 * ell * (ell + N - 2) + (N - 1) * (N - 3) == (2 * ell + N - 1) * (2 * ell + N - 3)


# box and spacing sized from the decay rate of the highest requested level
def make_fd_problem(
    params: PotentialParams,
    N: int,
    ell: int,
    levels: int = 3,
    r_max: Optional[float] = None,
    spacing: Optional[float] = None,
) -> FdProblem:
    if not 1 <= levels <= MAX_LEVELS:
        raise DomainError(f"levels must lie in [1, {MAX_LEVELS}], got {levels}")
    slowest = derive(params, Channel(N=N, ell=ell, n_r=levels - 1)).epsilon
    if r_max is None:
        r_max = DEFAULT_DECAY_LENGTHS / slowest
    elif r_max < 20.0 / slowest:
        raise DomainError(f"r_max={r_max} is shorter than 20 decay lengths ({20.0 / slowest})")
    if spacing is None:
        spacing = params.hbar ** 2 / (params.mu * params.A) / DEFAULT_POINTS_PER_BOHR
    grid_points = min(MAX_GRID_POINTS, max(100, int(math.ceil(r_max / spacing)) - 1))
    return FdProblem(params=params, N=N, ell=ell, r_max=r_max, grid_points=grid_points)


# diagonal and off-diagonal of the three-point discretization
def fd_matrix(problem: FdProblem):
    params = problem.params
    h = problem.spacing
    r = h * np.arange(1, problem.grid_points + 1)
    kinetic = params.hbar ** 2 / (2.0 * params.mu * h ** 2)
    diagonal = 2.0 * kinetic + effective_potential(params, problem.N, problem.ell, r)
    off_diagonal = np.full(problem.grid_points - 1, -kinetic)
    return diagonal, off_diagonal


def sturm_count(diagonal: Sequence[float], off_diagonal: Sequence[float], x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below x"""
    diagonal = [float(d) for d in diagonal]
    squares = [float(e) * float(e) for e in off_diagonal]
    tiny = np.finfo(float).tiny
    count = 0
    q = diagonal[0] - x
    for i in range(len(diagonal)):
        if i > 0:
            q = diagonal[i] - x - squares[i - 1] / q
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
    return count


def bound_state_count(problem: FdProblem) -> int:
    diagonal, off_diagonal = fd_matrix(problem)
    return sturm_count(diagonal, off_diagonal, problem.params.C)


# k lowest eigenvalues by LAPACK bisection on Sturm sequences
def fd_raw_eigenvalues(problem: FdProblem, k: int) -> np.ndarray:
    diagonal, off_diagonal = fd_matrix(problem)
    try:
        return eigh_tridiagonal(
            diagonal,
            off_diagonal,
            eigvals_only=True,
            select="i",
            select_range=(0, k - 1),
            lapack_driver="stebz",
        )
    except LinAlgError as e:
        raise ConvergenceError(f"tridiagonal bisection failed: {e}") from e


def fd_eigenvalues(problem: FdProblem, k: int, extrapolate: bool = True) -> List[float]:
    """Lowest k finite-difference energies, Richardson-extrapolated over h and h/2"""
    if not 1 <= k <= MAX_LEVELS:
        raise DomainError(f"k must lie in [1, {MAX_LEVELS}], got {k}")
    coarse = fd_raw_eigenvalues(problem, k)
    if extrapolate:
        fine = fd_raw_eigenvalues(problem.refined(), k)
        energies = (4.0 * fine - coarse) / 3.0
    else:
        fine = coarse
        energies = coarse
    C = problem.params.C
    if fine[k - 1] >= C or energies[k - 1] >= C:
        raise ResolutionError(
            f"level {k} (E={energies[k - 1]}) is not bound below C={C} on r_max={problem.r_max}"
        )
    logger.debug(f"FD N={problem.N} l={problem.ell} M={problem.grid_points}: {energies.tolist()}")
    return [float(e) for e in energies]


def _residual_grid(r_grid) -> np.ndarray:
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or r.size < 3:
        raise ConfigError(f"residual grid needs at least 3 radii in one dimension, got shape {r.shape}")
    if not np.all(np.isfinite(r)) or r[0] <= 0.0:
        raise ConfigError("residual grid radii must be finite and positive")
    if np.any(np.diff(r) <= 0.0):
        raise ConfigError("residual grid radii must be strictly increasing")
    return r


def ode_residual(state: RadialState, energy: float, r_grid=None) -> float:
    """Relative residual of the radial equation for an analytic state"""
    r = standard_grid(state) if r_grid is None else _residual_grid(r_grid)
    params, N, ell = state.params, state.channel.N, state.channel.ell
    value, first, second = radial_derivatives(state, r)
    k = 2.0 * params.mu / params.hbar ** 2
    terms = [
        second,
        (N - 1) / r * first,
        -ell * (ell + N - 2) / r ** 2 * value,
        k * energy * value,
        k * params.A / r * value,
        -k * params.B / r ** 2 * value,
        -k * params.C * value,
    ]
    scale = max(float(np.max(np.abs(term))) for term in terms)
    if not scale > 0.0:
        raise ConfigError("residual grid lies where the state vanishes")
    return float(np.max(np.abs(sum(terms)))) / scale


def build_report(sweep_config: Optional[SweepConfig] = None) -> VerificationReport:
    """Run the closed-form vs oracle suite"""
    from .verification_service import VerificationService

    return VerificationService(sweep_config).build_report()
