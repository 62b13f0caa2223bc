import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

sys.path.insert(0, str(Path(__file__).parent))

from src.miespec.errors import DomainError, FamilyError
from src.miespec.ladder import (
    RaiseConvention,
    RddrSign,
    RIdentityVariant,
    algebra_residuals,
    apply_lower,
    apply_raise,
    casimir_eigenvalue,
    casimir_values,
    coeffs,
    commutator_check,
    commutator_values,
    family_for_v,
    hamiltonian_via_l0,
    make_family,
    matrix_elements,
    operator_identity_r,
    operator_identity_r_ddr,
    r_identity_residuals,
    rddr_identity_residuals,
)
from src.miespec.models import Channel
from src.miespec.potential import make_params
from src.miespec.spectrum import energy
from src.miespec.wavefunction import radial_state

FAMILIES = [
    make_family(make_params(1.0), 3, 0),
    make_family(make_params(2.0, 1.0), 4, 1),
    make_family(make_params(1.0, 0.5), 5, 0, epsilon=0.37),
    family_for_v(1.5, 4),
]


def test_coefficients_at_the_bottom_rung():
    c = coeffs(Channel(N=3, ell=0, n_r=0), 0.0)
    assert c.ell_minus == 0.0
    assert c.ell_plus == pytest.approx(2.0)
    assert c.ell_zero == 1.0


def test_coefficients_domain():
    with pytest.raises(DomainError):
        coeffs(Channel(N=3, ell=0, n_r=1), -1.0)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label())
def test_lowering_and_raising(family):
    for n in range(5):
        state = family.state(n)
        assert apply_lower(state).relative_residual < 1e-10
        assert apply_raise(state).relative_residual < 1e-10


def test_lowering_annihilates_ground_state():
    application = apply_lower(FAMILIES[1].state(0))
    assert application.coefficient == 0.0
    assert application.target_index == -1
    assert application.relative_residual < 1e-10


def test_printed_raising_constant_misses_the_next_state():
    state = FAMILIES[0].state(1)
    assert apply_raise(state, convention=RaiseConvention.PRINTED).relative_residual > 0.1


def test_ladder_needs_a_family_member():
    physical = radial_state(make_params(1.0), Channel(N=3, ell=0, n_r=1))
    with pytest.raises(FamilyError):
        apply_lower(physical)
    with pytest.raises(FamilyError):
        apply_raise(physical)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label())
def test_commutator_eigenvalue(family):
    for n in range(4):
        l0 = coeffs(Channel(N=family.N, ell=family.ell, n_r=n), family.v).ell_zero
        assert commutator_check(family, n) == pytest.approx(2.0 * l0, rel=1e-10)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label())
def test_commutator_follows_the_creation_operator(family):
    for n in range(4):
        l0 = coeffs(Channel(N=family.N, ell=family.ell, n_r=n), family.v).ell_zero
        values, basis = commutator_values(family, n)
        assert float(np.max(np.abs(values - 2.0 * l0 * basis))) < 1e-9 * float(np.max(np.abs(basis)))
        # the printed constant is the ladder constant minus N, which shifts the eigenvalue by -N
        printed = commutator_check(family, n, convention=RaiseConvention.PRINTED)
        assert printed == pytest.approx(2.0 * l0 - family.N, rel=1e-10)


@pytest.mark.parametrize("v", [0.0, 0.35, 1.0, 2.7])
def test_su11_coefficient_relations(v):
    for n in range(6):
        for name, residual in algebra_residuals(v, n).items():
            assert abs(residual) < 1e-12 * max(1.0, 2 * (n + v + 1)), name


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label())
def test_casimir(family):
    v = family.v
    for _, first, second in casimir_values(family, 6):
        assert first == pytest.approx(v * (v + 1.0), rel=1e-12, abs=1e-12)
        assert second == pytest.approx(v * (v + 1.0), rel=1e-12, abs=1e-12)
    assert casimir_eigenvalue(family) == pytest.approx(v * (v + 1.0), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("params", [make_params(1.0), make_params(2.0, 1.0, 1.0)])
def test_hamiltonian_from_weight_operator(params):
    for N, ell, n_r in [(3, 0, 0), (4, 1, 2), (5, 2, 3)]:
        ch = Channel(N=N, ell=ell, n_r=n_r)
        assert hamiltonian_via_l0(params, ch) == pytest.approx(energy(params, ch).energy, rel=1e-14)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label())
def test_position_identity(family):
    for n in range(4):
        residual, variant = operator_identity_r(family, n)
        assert variant == RIdentityVariant.SHIFTED
        assert residual < 1e-10
        assert r_identity_residuals(family, n)[RIdentityVariant.UNSHIFTED] > 1e-3


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label())
def test_rddr_identity_sign(family):
    for n in range(4):
        residual, sign = operator_identity_r_ddr(family, n)
        assert sign == RddrSign.PLUS_HALF
        assert residual < 1e-10
        assert rddr_identity_residuals(family, n)[RddrSign.MINUS_HALF] > 1e-3


def test_family_for_v():
    family = family_for_v(1.5, 4, ell=1)
    assert family.v == pytest.approx(1.5, abs=1e-14)
    assert family.epsilon == 1.0
    with pytest.raises(DomainError):
        family_for_v(-0.5, 3)


def test_make_family_defaults_to_ground_state_epsilon():
    family = make_family(make_params(1.0), 3, 1)
    assert family.epsilon == pytest.approx(0.5)
    with pytest.raises(DomainError):
        make_family(make_params(1.0), 3, 0, epsilon=0.0)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label())
def test_matrix_elements(family):
    n_max = 5
    elements = matrix_elements(family, n_max)
    N, eps = family.N, family.epsilon
    assert elements.orthogonal_measure(N) == N - 2
    assert elements.rddr_sign == RddrSign.PLUS_HALF
    assert elements.offdiagonal_deviation() < 1e-9
    # diagonals of the expansion differ from the ladder-built ones by constant shifts
    assert_allclose(elements.r_diagonal_offset(), np.full(n_max + 1, N / (2.0 * eps)), rtol=1e-9)
    assert_allclose(elements.rddr_diagonal_offset(), np.full(n_max + 1, -N / 2.0), rtol=1e-9)
    # r is tridiagonal in the family
    assert np.max(np.abs(np.triu(elements.expansion_r, 2))) < 1e-9 * np.max(np.abs(elements.expansion_r))


def test_matrix_order_limit():
    with pytest.raises(DomainError):
        matrix_elements(FAMILIES[0], 51)
