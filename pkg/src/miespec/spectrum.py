# closed-form energies and degeneracy counting in N dimensions
import logging
import math
from functools import lru_cache
from typing import Iterator, List, Tuple

from .errors import DomainError, PreconditionError
from .models import Channel, DegeneracyTable, EnergyLevel, KratzerForm, PotentialParams
from .potential import derive

logger = logging.getLogger(__name__)

# dimensions and principal numbers of the standard degeneracy grid
REFERENCE_TABLE_DIMENSIONS = tuple(range(3, 11))
REFERENCE_TABLE_PRINCIPAL = tuple(range(1, 6))


def _level(params: PotentialParams, ch: Channel, K: float, nu: float) -> EnergyLevel:
    energy = params.C - 2.0 * params.mu * params.A ** 2 / (params.hbar ** 2 * K ** 2)
    return EnergyLevel(channel=ch, energy=energy, principal_n=ch.n_r + nu + 1.0, K=K)


# E = C - 2 mu A^2 / (hbar^2 K^2)
def energy(params: PotentialParams, ch: Channel) -> EnergyLevel:
    """Bound-state energy of a channel"""
    derived = derive(params, ch)
    return _level(params, ch, derived.K, derived.nu)


def energy_kratzer_fues(params: PotentialParams, ch: Channel) -> EnergyLevel:
    """Energy restricted to the C = 0 family"""
    if params.C != 0:
        raise PreconditionError(f"Kratzer-Fues energies need C = 0, got C={params.C}")
    return energy(params, ch)


# pure Coulomb limit with integer K = 2 n_r + 2 l + N - 1
def energy_coulomb(params: PotentialParams, ch: Channel) -> EnergyLevel:
    """Energy restricted to B = C = 0"""
    if params.B != 0 or params.C != 0:
        raise PreconditionError(f"Coulomb energies need B = C = 0, got B={params.B}, C={params.C}")
    # same channel validation as energy(): N=2, l=0 has no bound state
    derive(params, ch)
    K = 2.0 * ch.n_r + 2.0 * ch.ell + ch.N - 1.0
    return _level(params, ch, K, float(ch.ell))


# Kratzer energy written directly in kappa and r_e
def energy_kratzer_closed_form(form: KratzerForm, ch: Channel, mu: float = 1.0, hbar: float = 1.0) -> float:
    coupling = 8.0 * mu * form.kappa * form.r_e ** 2 / hbar ** 2
    root = math.sqrt((2.0 * ch.ell + ch.N - 2.0) ** 2 + coupling)
    return -8.0 * mu * form.kappa ** 2 * form.r_e ** 2 / (hbar ** 2 * (2.0 * ch.n_r + 1.0 + root) ** 2)


# hydrogen-like form with principal number n = n_r + nu + 1
def principal_energy(params: PotentialParams, ch: Channel) -> float:
    level = energy(params, ch)
    n = level.principal_n
    return params.C - params.mu * params.A ** 2 / (2.0 * params.hbar ** 2 * (n + (ch.N - 3) / 2.0) ** 2)


# number of hyperspherical harmonics with angular index nu in N dimensions
def multiplicity(nu: int, N: int) -> int:
    if nu < 0 or N < 3:
        raise DomainError(f"multiplicity needs nu >= 0 and N >= 3, got nu={nu}, N={N}")
    return (2 * nu + N - 2) * math.factorial(nu + N - 3) // (math.factorial(nu) * math.factorial(N - 2))


@lru_cache(maxsize=None)
def degeneracy(n: int, N: int) -> int:
    """Degeneracy of the level with principal number n in N dimensions"""
    if n < 1 or N < 3:
        raise DomainError(f"degeneracy needs n >= 1 and N >= 3, got n={n}, N={N}")
    return sum(multiplicity(nu, N) for nu in range(n))


# all chains k >= m_1 >= ... >= |m_depth| ending below the given bound
def _chains(bound: int, depth: int) -> Iterator[Tuple[int, ...]]:
    if depth == 1:
        for m in range(-bound, bound + 1):
            yield (m,)
        return
    for m in range(bound + 1):
        for rest in _chains(m, depth - 1):
            yield (m,) + rest


def degeneracy_enumerated(n: int, N: int) -> int:
    """Count (nu, m_1, ..., m_{N-2}) tuples one by one"""
    if not (3 <= N <= 8 and 1 <= n <= 6):
        raise DomainError(f"enumeration limited to 3 <= N <= 8 and 1 <= n <= 6, got N={N}, n={n}")
    total = 0
    for nu in range(n):
        total += sum(1 for _ in _chains(nu, N - 2))
    return total


def degeneracy_table(N: int, n_max: int) -> DegeneracyTable:
    if n_max < 1:
        raise DomainError(f"degeneracy table needs n_max >= 1, got {n_max}")
    return DegeneracyTable(N=N, rows=[(n, degeneracy(n, N)) for n in range(1, n_max + 1)])


# the N = 3..10 by n = 1..5 grid
def reference_table() -> List[DegeneracyTable]:
    return [degeneracy_table(N, REFERENCE_TABLE_PRINCIPAL[-1]) for N in REFERENCE_TABLE_DIMENSIONS]
