import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.miespec.errors import ConfigError, DomainError, ResolutionError
from src.miespec.models import Channel, FdProblem, ReportStatus, SweepConfig, VerificationReport
from src.miespec.numoracle import (
    bound_state_count,
    build_report,
    centrifugal_groupings_agree,
    effective_potential,
    fd_eigenvalues,
    fd_matrix,
    make_fd_problem,
    ode_residual,
    sturm_count,
)
from src.miespec.potential import derive, make_params
from src.miespec.report_writer import report_document
from src.miespec.spectrum import energy
from src.miespec.wavefunction import radial_state

PROBES = {
    "typo.alpha_hbar_power",
    "typo.epsilon_factor",
    "typo.laguerre_norm_integral",
    "typo.rddr_identity_sign",
    "typo.modified_kratzer_mapping",
    "typo.raising_operator_constant",
    "typo.r_matrix_diagonal",
    "typo.virial_energy_reference",
    "typo.hft_dE_dA_sign",
}


def test_hydrogen_levels_from_finite_differences():
    params = make_params(1.0)
    energies = fd_eigenvalues(make_fd_problem(params, 3, 0, levels=3), 3)
    assert energies == pytest.approx([-0.5, -0.125, -1.0 / 18.0], rel=1e-6)


@pytest.mark.parametrize("params", [make_params(2.0, 1.0), make_params(2.0, 1.0, 1.0), make_params(1.0, 0.5)])
@pytest.mark.parametrize("N,ell", [(3, 1), (4, 0), (5, 1)])
def test_closed_form_levels_match_finite_differences(params, N, ell):
    energies = fd_eigenvalues(make_fd_problem(params, N, ell, levels=3), 3)
    closed = [energy(params, Channel(N=N, ell=ell, n_r=n)).energy for n in range(3)]
    assert energies == pytest.approx(closed, rel=1e-6)


def test_second_order_convergence_without_extrapolation():
    params = make_params(1.0)
    errors = []
    for points in (1999, 3999, 7999):
        problem = FdProblem(params=params, N=3, ell=0, r_max=40.0, grid_points=points)
        errors.append(abs(fd_eigenvalues(problem, 1, extrapolate=False)[0] + 0.5))
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.6 <= coarse / fine <= 4.4


def test_refined_problem_halves_the_spacing():
    problem = FdProblem(params=make_params(1.0), N=3, ell=0, r_max=40.0, grid_points=1999)
    assert problem.refined().spacing == pytest.approx(problem.spacing / 2.0)


def test_box_too_small_for_requested_level():
    problem = FdProblem(params=make_params(1.0), N=3, ell=0, r_max=5.0, grid_points=2000)
    with pytest.raises(ResolutionError):
        fd_eigenvalues(problem, 3)


def test_problem_validation():
    params = make_params(1.0)
    with pytest.raises(DomainError):
        make_fd_problem(params, 3, 0, levels=0)
    with pytest.raises(DomainError):
        make_fd_problem(params, 3, 0, levels=3, r_max=10.0)
    with pytest.raises(DomainError):
        fd_eigenvalues(make_fd_problem(params, 3, 0, levels=1), 11)


def test_sturm_count_against_dense_eigenvalues():
    rng = np.random.default_rng(7)
    diagonal = rng.normal(size=40)
    off_diagonal = rng.normal(size=39)
    matrix = np.diag(diagonal) + np.diag(off_diagonal, 1) + np.diag(off_diagonal, -1)
    eigenvalues = np.linalg.eigvalsh(matrix)
    for x in (-2.0, -0.3, 0.0, 0.8, 3.0):
        assert sturm_count(diagonal, off_diagonal, x) == int(np.sum(eigenvalues < x))


def test_bound_states_counted_below_threshold():
    problem = make_fd_problem(make_params(2.0, 1.0, 1.0), 3, 0, levels=3)
    assert bound_state_count(problem) >= 3
    diagonal, off_diagonal = fd_matrix(problem)
    assert len(off_diagonal) == len(diagonal) - 1 == problem.grid_points - 1


def test_effective_potential():
    params = make_params(1.0)
    # (N-1)(N-3)/4 vanishes in three dimensions
    assert effective_potential(params, 3, 1, 2.0) == pytest.approx(-0.5 + 1.0 / 4.0)
    assert effective_potential(params, 4, 0, 1.0) == pytest.approx(-1.0 + 3.0 / 8.0)
    with pytest.raises(DomainError):
        effective_potential(params, 3, 0, 0.0)
    assert all(centrifugal_groupings_agree(N, ell) for N in range(2, 12) for ell in range(6))


@pytest.mark.parametrize("params", [make_params(1.0), make_params(2.0, 1.0, 1.0), make_params(1.0, 0.5, mu=2.0, hbar=0.8)])
def test_analytic_states_solve_the_radial_equation(params):
    for N in (3, 4, 6):
        for ell in (0, 2):
            for n_r in (0, 1, 4):
                ch = Channel(N=N, ell=ell, n_r=n_r)
                assert ode_residual(radial_state(params, ch), energy(params, ch).energy) < 1e-8


def test_doubled_epsilon_fails_the_radial_equation():
    params = make_params(1.0)
    ch = Channel(N=3, ell=0)
    wrong = radial_state(params, ch, epsilon_override=2.0 * derive(params, ch).epsilon)
    assert ode_residual(wrong, energy(params, ch).energy) > 0.1


def test_residual_ignores_overall_scale():
    params = make_params(2.0, 1.0, 0.5)
    ch = Channel(N=4, ell=1, n_r=2)
    state = radial_state(params, ch)
    E = energy(params, ch).energy
    for offset in (0.01, 0.3):
        base = ode_residual(state, E + offset)
        for factor in (1e-6, -3.0, 1e8):
            rescaled = replace(state, log_norm=state.log_norm + math.log(abs(factor)),
                               norm_sign=state.norm_sign * (1 if factor > 0 else -1))
            assert ode_residual(rescaled, E + offset) == pytest.approx(base, rel=1e-10)


@pytest.mark.parametrize("grid", [[1.0, 2.0], [[1.0, 2.0, 3.0]], [0.0, 1.0, 2.0], [-1.0, 1.0, 2.0],
                                  [1.0, 3.0, 2.0], [1.0, 1.0, 2.0], [1.0, 2.0, np.inf], [1.0, np.nan, 2.0]])
def test_residual_grid_validation(grid):
    state = radial_state(make_params(1.0), Channel(N=3, ell=0))
    with pytest.raises(ConfigError):
        ode_residual(state, -0.5, grid)


def test_residual_on_explicit_grid():
    state = radial_state(make_params(1.0), Channel(N=3, ell=0))
    assert ode_residual(state, -0.5, np.linspace(0.1, 20.0, 50)) < 1e-12
    with pytest.raises(ConfigError):
        ode_residual(state, -0.5, [1e4, 2e4, 3e4])


@pytest.fixture(scope="module")
def small_report() -> VerificationReport:
    return build_report(SweepConfig(potentials=[(2.0, 1.0, 1.0)], dimensions=[3, 4], ells=[0, 1]))


def test_report_passes_and_flags_every_probe(small_report):
    assert small_report.passed, [item.name for item in small_report.mismatches()]
    flagged = {item.name for item in small_report.flagged()}
    assert flagged == PROBES
    for item in small_report.flagged():
        assert item.literal is not None
        assert item.corrected_form


def test_report_items_are_sorted_and_named(small_report):
    names = [item.name for item in small_report.items]
    assert names == sorted(names)
    assert "energy_fd[A=2.0,B=1.0,C=1.0;N=3;l=0;nr=0]" in names
    assert "virial[A=2.0,B=1.0,C=1.0;N=4;l=1;nr=2]" in names
    assert small_report.metadata["counts"] == small_report.counts()


def test_report_round_trips_through_json(small_report):
    text = json.dumps(report_document(small_report))
    loaded = VerificationReport(**json.loads(text))
    assert loaded.items == small_report.items


def test_strict_literal_turns_probes_into_mismatches():
    report = build_report(SweepConfig(potentials=[(1.0, 0.0, 0.0)], dimensions=[3], ells=[0], fd_levels=1, strict_literal=True))
    mismatched = {item.name for item in report.mismatches()}
    assert PROBES <= mismatched
    assert not report.flagged()


def test_empty_sweep_gives_empty_report():
    report = build_report(SweepConfig(potentials=[]))
    assert report.items == []
    assert report.passed


def test_scaled_epsilon_is_caught():
    report = build_report(SweepConfig(potentials=[(1.0, 0.0, 0.0)], dimensions=[3], ells=[0], fd_levels=1, epsilon_scale=1.05))
    assert not report.passed
    bad = {item.name.split("[")[0] for item in report.mismatches()}
    assert "ode_residual" in bad
    assert "inv_r" in bad
    assert all(item.status != ReportStatus.MISMATCH for item in report.items if item.name.startswith("norm["))


def test_default_sweep_passes():
    report = build_report()
    assert report.passed, [item.name for item in report.mismatches()]
    assert len(report.flagged()) >= 5
