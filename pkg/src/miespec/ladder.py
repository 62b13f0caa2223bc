# SU(1,1) ladder operators acting on fixed-epsilon Laguerre families
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError, FamilyError
from .models import Channel, LadderCoeffs, PotentialParams
from .potential import derive, make_params
from .quadrature import radial_inner_product, radial_rddr_inner_product
from .wavefunction import RadialState, evaluate, radial_derivatives, radial_state, shifted, standard_grid

logger = logging.getLogger(__name__)

MAX_MATRIX_ORDER = 50


# constant term used for the creation operator
class RaiseConvention(str, Enum):
    # n_r + v + (N+1)/2: maps R_n exactly onto ell_plus R_{n+1}
    LADDER = "ladder"
    # n_r + v - (N-1)/2: the form r d/dr - eps r + n_r + v - (N-1)/2
    PRINTED = "printed"


# variants of r R = (1/2eps)[2L0 - (L+ + L-)] R + shift
class RIdentityVariant(str, Enum):
    SHIFTED = "minus_N_over_2eps"
    UNSHIFTED = "no_shift"


# variants of r dR/dr = (L+ - L-)R/2 +- R/2
class RddrSign(str, Enum):
    PLUS_HALF = "plus_half"
    MINUS_HALF = "minus_half"


# states C_n r^nu exp(-eps r) L_n^{2v+1}(2 eps r) sharing one epsilon
@dataclass(frozen=True)
class LadderFamily:
    params: PotentialParams
    N: int
    ell: int
    epsilon: float

    def state(self, n_r: int) -> RadialState:
        return radial_state(self.params, Channel(N=self.N, ell=self.ell, n_r=n_r), epsilon_override=self.epsilon)

    @property
    def v(self) -> float:
        return derive(self.params, Channel(N=self.N, ell=self.ell, n_r=0)).v

    def label(self) -> str:
        return f"{self.params.label()};N={self.N};l={self.ell};eps={self.epsilon!r}"


# result of applying one ladder operator to a family member
@dataclass(frozen=True)
class OperatorApplication:
    source: RadialState
    target_index: int
    coefficient: float
    residual: float
    scale: float
    nodes: np.ndarray
    output: np.ndarray

    @property
    def relative_residual(self) -> float:
        return self.residual / self.scale if self.scale > 0 else self.residual


# ladder-built and quadrature-built matrices of r and r d/dr
@dataclass(frozen=True)
class MatrixElements:
    ladder_r: np.ndarray
    ladder_rddr: np.ndarray
    rddr_sign: RddrSign
    gram_physical: np.ndarray
    gram_orthogonal: np.ndarray
    r_physical: np.ndarray
    r_orthogonal: np.ndarray
    rddr_physical: np.ndarray
    rddr_orthogonal: np.ndarray
    # row n holds the coefficients of r R_n (or r R_n') on R_0..R_nmax
    expansion_r: np.ndarray
    expansion_rddr: np.ndarray

    # largest off-diagonal departure of the Gram matrix, relative to its diagonal
    @staticmethod
    def _off_diagonal_size(gram: np.ndarray) -> float:
        diagonal = np.sqrt(np.abs(np.diag(gram)))
        scaled = gram / np.outer(diagonal, diagonal)
        return float(np.max(np.abs(scaled - np.diag(np.diag(scaled)))))

    # measure exponent under which the family is orthogonal
    def orthogonal_measure(self, N: int) -> Optional[int]:
        if self._off_diagonal_size(self.gram_orthogonal) < 1e-10:
            return N - 2
        if self._off_diagonal_size(self.gram_physical) < 1e-10:
            return N - 1
        return None

    def offdiagonal_deviation(self) -> float:
        worst = 0.0
        for ladder, expansion in ((self.ladder_r, self.expansion_r), (self.ladder_rddr, self.expansion_rddr)):
            for k in (1, -1):
                worst = max(worst, float(np.max(np.abs(np.diag(ladder, k) - np.diag(expansion, k)), initial=0.0)))
        return worst

    def r_diagonal_offset(self) -> np.ndarray:
        return np.diag(self.expansion_r) - np.diag(self.ladder_r)

    def rddr_diagonal_offset(self) -> np.ndarray:
        return np.diag(self.expansion_rddr) - np.diag(self.ladder_rddr)


# family through a channel; default epsilon is that of the physical ground state
def make_family(params: PotentialParams, N: int, ell: int, epsilon: Optional[float] = None) -> LadderFamily:
    ground = derive(params, Channel(N=N, ell=ell, n_r=0))
    if epsilon is None:
        epsilon = ground.epsilon
    if not epsilon > 0:
        raise DomainError(f"family decay rate must be positive, got {epsilon}")
    return LadderFamily(params=params, N=N, ell=ell, epsilon=float(epsilon))


# family with a requested v, obtained by solving the radicand for B
def family_for_v(
    v: float,
    N: int,
    ell: int = 0,
    A: float = 1.0,
    epsilon: float = 1.0,
    mu: float = 1.0,
    hbar: float = 1.0,
) -> LadderFamily:
    if not v > -0.5:
        raise DomainError(f"v must exceed -1/2 for a positive radicand, got {v}")
    B = hbar ** 2 * ((2.0 * v + 1.0) ** 2 - (2.0 * ell + N - 2.0) ** 2) / (8.0 * mu)
    return make_family(make_params(A, B, 0.0, mu=mu, hbar=hbar), N, ell, epsilon)


def coeffs(ch: Channel, v: float) -> LadderCoeffs:
    """Lowering, raising and weight coefficients at rung n_r"""
    if not v > -1.0:
        raise DomainError(f"ladder coefficients need v > -1, got {v}")
    n = ch.n_r
    lower = n * (n + v) * (n + 2.0 * v + 1.0) / (n + v + 1.0)
    upper = (n + 1.0) * (n + v + 2.0) * (n + 2.0 * v + 2.0) / (n + v + 1.0)
    if lower < 0 or upper <= 0:
        raise DomainError(f"negative ladder radicand at n_r={n}, v={v}")
    return LadderCoeffs(ell_minus=math.sqrt(lower), ell_plus=math.sqrt(upper), ell_zero=n + v + 1.0)


def _coeffs_at(state: RadialState, n_r: int) -> LadderCoeffs:
    return coeffs(state.channel.model_copy(update={"n_r": n_r}), state.v)


def _require_family(state: RadialState) -> None:
    if not state.is_family_member:
        raise FamilyError(
            f"ladder operators act on fixed-epsilon family members; {state.channel.label()} has no epsilon_override"
        )


def _nodes_for(state: RadialState, nodes) -> np.ndarray:
    return standard_grid(state) if nodes is None else np.asarray(nodes, dtype=float)


# r dR/dr and eps r R on the grid, plus R itself
def _pieces(state: RadialState, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    value, first, _ = radial_derivatives(state, r)
    return value, r * first, state.epsilon * r * value


def _lower_constant(N: int, v: float, n_r: int) -> float:
    return n_r + v - (N - 3) / 2.0


def _raise_constant(N: int, v: float, n_r: int, convention: RaiseConvention) -> float:
    if convention == RaiseConvention.LADDER:
        return n_r + v + (N + 1) / 2.0
    return n_r + v - (N - 1) / 2.0


def _lower_output(state: RadialState, r: np.ndarray) -> np.ndarray:
    value, rddr, eps_r = _pieces(state, r)
    return -rddr - eps_r + _lower_constant(state.channel.N, state.v, state.n_r) * value


def _raise_output(state: RadialState, r: np.ndarray, convention: RaiseConvention) -> np.ndarray:
    value, rddr, eps_r = _pieces(state, r)
    return rddr - eps_r + _raise_constant(state.channel.N, state.v, state.n_r, convention) * value


# second operator applied to the output of the first; each is sign r d/dr - eps r + constant
def _composed_output(
    state: RadialState,
    r: np.ndarray,
    first: Tuple[int, float],
    second: Tuple[int, float],
) -> np.ndarray:
    value, d1, d2 = radial_derivatives(state, r)
    eps = state.epsilon
    (first_sign, first_constant), (second_sign, second_constant) = first, second
    inner = first_sign * r * d1 - eps * r * value + first_constant * value
    inner_slope = first_sign * (d1 + r * d2) - eps * value - eps * r * d1 + first_constant * d1
    return second_sign * r * inner_slope - eps * r * inner + second_constant * inner


def apply_lower(state: RadialState, nodes=None) -> OperatorApplication:
    """Apply -r d/dr - eps r + (n_r + v - (N-3)/2) and compare with ell_minus R_{n_r-1}"""
    _require_family(state)
    r = _nodes_for(state, nodes)
    output = _lower_output(state, r)
    coefficient = _coeffs_at(state, state.n_r).ell_minus
    if state.n_r == 0:
        scale = float(np.max(np.abs(evaluate(state, r))))
        residual = float(np.max(np.abs(output)))
    else:
        target = np.asarray(evaluate(shifted(state, state.n_r - 1), r))
        scale = float(np.max(np.abs(target)))
        residual = float(np.max(np.abs(output - coefficient * target)))
    return OperatorApplication(
        source=state,
        target_index=state.n_r - 1,
        coefficient=coefficient,
        residual=residual,
        scale=scale,
        nodes=r,
        output=output,
    )


def apply_raise(state: RadialState, nodes=None, convention: RaiseConvention = RaiseConvention.LADDER) -> OperatorApplication:
    """Apply the creation operator and compare with ell_plus R_{n_r+1}"""
    _require_family(state)
    r = _nodes_for(state, nodes)
    output = _raise_output(state, r, convention)
    coefficient = _coeffs_at(state, state.n_r).ell_plus
    target = np.asarray(evaluate(shifted(state, state.n_r + 1), r))
    return OperatorApplication(
        source=state,
        target_index=state.n_r + 1,
        coefficient=coefficient,
        residual=float(np.max(np.abs(output - coefficient * target))),
        scale=float(np.max(np.abs(target))),
        nodes=r,
        output=output,
    )


# least-squares eigenvalue of values against R, with the pointwise misfit
def _measure_eigenvalue(values: np.ndarray, basis: np.ndarray) -> Tuple[float, float]:
    eigenvalue = float(np.dot(values, basis) / np.dot(basis, basis))
    misfit = float(np.max(np.abs(values - eigenvalue * basis)) / np.max(np.abs(basis)))
    return eigenvalue, misfit


def commutator_values(
    family: LadderFamily, n_r: int, nodes=None, convention: RaiseConvention = RaiseConvention.LADDER
) -> Tuple[np.ndarray, np.ndarray]:
    """[L-, L+] R_n on a grid: each operator acts on the other's output"""
    state = family.state(n_r)
    r = _nodes_for(state, nodes)
    N, v = family.N, state.v
    # the index-aware constants follow the rung the intermediate output sits on
    down_after_up = _composed_output(
        state, r, (1, _raise_constant(N, v, n_r, convention)), (-1, _lower_constant(N, v, n_r + 1))
    )
    up_after_down = _composed_output(
        state, r, (-1, _lower_constant(N, v, n_r)), (1, _raise_constant(N, v, n_r - 1, convention))
    )
    return down_after_up - up_after_down, np.asarray(evaluate(state, r))


def commutator_check(
    family: LadderFamily, n_r: int, nodes=None, convention: RaiseConvention = RaiseConvention.LADDER
) -> float:
    """Measured eigenvalue of [L-, L+] on R_{n_r}; equals 2(n_r + v + 1)"""
    values, basis = commutator_values(family, n_r, nodes, convention)
    eigenvalue, misfit = _measure_eigenvalue(values, basis)
    logger.debug(f"commutator on n_r={n_r} of {family.label()}: {eigenvalue} (misfit {misfit:.2e})")
    return eigenvalue


# deviations of the three su(1,1) coefficient relations at rung n_r
def algebra_residuals(v: float, n_r: int) -> Dict[str, float]:
    here = coeffs(Channel(N=3, ell=0, n_r=n_r), v)
    above = coeffs(Channel(N=3, ell=0, n_r=n_r + 1), v)
    if n_r > 0:
        below = coeffs(Channel(N=3, ell=0, n_r=n_r - 1), v)
        lower_weight, lower_product = below.ell_zero, here.ell_minus * below.ell_plus
    else:
        lower_weight, lower_product = here.ell_zero - 1.0, 0.0
    return {
        "[L0,L-]": (lower_weight - here.ell_zero) + 1.0,
        "[L0,L+]": (above.ell_zero - here.ell_zero) - 1.0,
        "[L-,L+]": here.ell_plus * above.ell_minus - lower_product - 2.0 * here.ell_zero,
    }


def casimir_values(family: LadderFamily, n_max: int) -> List[Tuple[int, float, float]]:
    """L0(L0-1) - L+L- and L0(L0+1) - L-L+ on each rung up to n_max"""
    v = family.v
    rows = []
    for n in range(n_max + 1):
        here = coeffs(Channel(N=family.N, ell=family.ell, n_r=n), v)
        above = coeffs(Channel(N=family.N, ell=family.ell, n_r=n + 1), v)
        if n > 0:
            below = coeffs(Channel(N=family.N, ell=family.ell, n_r=n - 1), v)
            raised_lowered = below.ell_plus * here.ell_minus
        else:
            raised_lowered = 0.0
        l0 = here.ell_zero
        rows.append((n, l0 * (l0 - 1.0) - raised_lowered, l0 * (l0 + 1.0) - here.ell_plus * above.ell_minus))
    return rows


def casimir_eigenvalue(family: LadderFamily, n_max: int = 4) -> float:
    """Common Casimir value over rungs 0..n_max in both orderings"""
    values = [value for _, first, second in casimir_values(family, n_max) for value in (first, second)]
    spread = max(values) - min(values)
    if spread > 1e-10:
        logger.warning(f"Casimir values of {family.label()} spread by {spread:.3e}")
    return float(np.mean(values))


def hamiltonian_via_l0(params: PotentialParams, ch: Channel) -> float:
    """E = C - (mu A^2 / 2 hbar^2) / L0^2"""
    l0 = coeffs(ch, derive(params, ch).v).ell_zero
    return params.C - (params.mu * params.A ** 2 / (2.0 * params.hbar ** 2)) / l0 ** 2


# residuals of both r-identity variants with the printed operators
def r_identity_residuals(family: LadderFamily, n_r: int, nodes=None) -> Dict[RIdentityVariant, float]:
    state = family.state(n_r)
    r = _nodes_for(state, nodes)
    value = np.asarray(evaluate(state, r))
    eps, N = family.epsilon, family.N
    combination = (
        2.0 * _coeffs_at(state, n_r).ell_zero * value
        - _raise_output(state, r, RaiseConvention.PRINTED)
        - _lower_output(state, r)
    ) / (2.0 * eps)
    lhs = r * value
    size = float(np.max(np.abs(lhs)))
    return {
        RIdentityVariant.SHIFTED: float(np.max(np.abs(lhs - (combination - N / (2.0 * eps) * value)))) / size,
        RIdentityVariant.UNSHIFTED: float(np.max(np.abs(lhs - combination))) / size,
    }


def operator_identity_r(family: LadderFamily, n_r: int, r_grid=None) -> Tuple[float, RIdentityVariant]:
    """Check r R = (1/2eps)[2L0 - (L+ + L-)]R - (N/2eps)R pointwise"""
    residuals = r_identity_residuals(family, n_r, r_grid)
    variant = min(residuals, key=residuals.get)
    return residuals[variant], variant


# residuals of r dR/dr = (L+ - L-)R/2 +- R/2 with the printed operators
def rddr_identity_residuals(family: LadderFamily, n_r: int, nodes=None) -> Dict[RddrSign, float]:
    state = family.state(n_r)
    r = _nodes_for(state, nodes)
    value, rddr, _ = _pieces(state, r)
    half_difference = 0.5 * (_raise_output(state, r, RaiseConvention.PRINTED) - _lower_output(state, r))
    size = float(np.max(np.abs(rddr)))
    return {
        RddrSign.PLUS_HALF: float(np.max(np.abs(rddr - (half_difference + 0.5 * value)))) / size,
        RddrSign.MINUS_HALF: float(np.max(np.abs(rddr - (half_difference - 0.5 * value)))) / size,
    }


def operator_identity_r_ddr(family: LadderFamily, n_r: int, r_grid=None) -> Tuple[float, RddrSign]:
    """Test both signs of the r d/dr identity and report the one that holds"""
    residuals = rddr_identity_residuals(family, n_r, r_grid)
    sign = min(residuals, key=residuals.get)
    return residuals[sign], sign


def matrix_elements(family: LadderFamily, n_max: int) -> MatrixElements:
    """Tridiagonal r and r d/dr matrices from the ladder coefficients, with quadrature diagnostics"""
    if not 0 <= n_max <= MAX_MATRIX_ORDER:
        raise DomainError(f"n_max must lie in [0, {MAX_MATRIX_ORDER}], got {n_max}")
    eps, N, v = family.epsilon, family.N, family.v
    size = n_max + 1
    _, sign = operator_identity_r_ddr(family, 0)
    diagonal_rddr = 0.5 if sign == RddrSign.PLUS_HALF else -0.5

    ladder_r = np.zeros((size, size))
    ladder_rddr = np.zeros((size, size))
    for n in range(size):
        c = coeffs(Channel(N=N, ell=family.ell, n_r=n), v)
        ladder_r[n, n] = (2.0 * n + 2.0 * v + 2.0 - N) / (2.0 * eps)
        ladder_rddr[n, n] = diagonal_rddr
        if n + 1 < size:
            ladder_r[n, n + 1] = -c.ell_plus / (2.0 * eps)
            ladder_rddr[n, n + 1] = c.ell_plus / 2.0
        if n > 0:
            ladder_r[n, n - 1] = -c.ell_minus / (2.0 * eps)
            ladder_rddr[n, n - 1] = -c.ell_minus / 2.0

    states = [family.state(n) for n in range(size)]
    tables = {name: np.zeros((size, size)) for name in ("gp", "go", "rp", "ro", "dp", "do")}
    for m, bra in enumerate(states):
        for n, ket in enumerate(states):
            tables["gp"][m, n] = radial_inner_product(bra, ket, 0, N - 1)
            tables["go"][m, n] = radial_inner_product(bra, ket, 0, N - 2)
            tables["rp"][m, n] = radial_inner_product(bra, ket, 1, N - 1)
            tables["ro"][m, n] = radial_inner_product(bra, ket, 1, N - 2)
            tables["dp"][m, n] = radial_rddr_inner_product(bra, ket, N - 1)
            tables["do"][m, n] = radial_rddr_inner_product(bra, ket, N - 2)

    # project onto R_m with the orthogonal measure: X[n, m] = <R_m|op R_n> / <R_m|R_m>
    norms = np.diag(tables["go"])
    expansion_r = (tables["ro"] / norms[:, None]).T
    expansion_rddr = (tables["do"] / norms[:, None]).T
    logger.info(f"  ✓ matrix elements for {family.label()} up to n={n_max}")
    return MatrixElements(
        ladder_r=ladder_r,
        ladder_rddr=ladder_rddr,
        rddr_sign=sign,
        gram_physical=tables["gp"],
        gram_orthogonal=tables["go"],
        r_physical=tables["rp"],
        r_orthogonal=tables["ro"],
        rddr_physical=tables["dp"],
        rddr_orthogonal=tables["do"],
        expansion_r=expansion_r,
        expansion_rddr=expansion_rddr,
    )
