# service that checks every closed form against an independent oracle
import logging
import math
import time
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .config import resolve_tolerances
from .errors import MieSpecError
from .ladder import (
    RaiseConvention,
    RddrSign,
    RIdentityVariant,
    algebra_residuals,
    apply_lower,
    apply_raise,
    casimir_eigenvalue,
    coeffs,
    commutator_check,
    hamiltonian_via_l0,
    make_family,
    matrix_elements,
    r_identity_residuals,
    rddr_identity_residuals,
)
from .models import (
    Channel,
    KratzerForm,
    KratzerVariant,
    PotentialParams,
    ReportItem,
    ReportStatus,
    SweepConfig,
    VerificationReport,
)
from .numoracle import fd_eigenvalues, make_fd_problem, ode_residual
from .observables import (
    beta,
    expect_inv_r,
    expect_inv_r2,
    expect_inv_r2_from_ell,
    hft_derivative,
    virial,
)
from .potential import derive, evaluate_potential, from_kratzer, kratzer_potential, make_params
from .quadrature import gauss_laguerre, kinetic_expectation, norm, radial_inner_product
from .specfun import laguerre_values, log_factorial, log_gamma
from .spectrum import energy, principal_energy
from .wavefunction import radial_state

logger = logging.getLogger(__name__)

# floor for relative errors against oracles that vanish
_TINY = 1e-300


def item_name(kind: str, params: PotentialParams, ch: Channel, suffix: str = "") -> str:
    return f"{kind}[{params.label()};{ch.label()}{suffix}]"


# builds a VerificationReport from a SweepConfig, one step per check family
class VerificationService:
    def __init__(self, config: Optional[SweepConfig] = None):
        self.config = config or SweepConfig()
        self.tolerances = resolve_tolerances(self.config.tolerances)
        self.items: List[ReportItem] = []

    # run every step and return the items sorted by name
    def build_report(self) -> VerificationReport:
        """Main verification pipeline"""
        start_time = time.time()
        self.items = []
        if self.config.is_empty():
            logger.info("Empty sweep: nothing to verify")
            return VerificationReport(metadata=self._metadata(), items=[])

        logger.info(f"Starting verification sweep: {len(self._groups())} channel groups")
        logger.info("=" * 60)

        logger.info("Step 1: Spectrum against finite differences...")
        for params, N, ell in self._groups():
            self._guard(f"energy_fd[{params.label()};N={N};l={ell}]", "E_nr = C - 2 mu A^2/(hbar^2 K^2)",
                        lambda: self._check_spectrum(params, N, ell))
        logger.info(f"  ✓ {len(self.items)} items so far")

        logger.info("\nStep 2: Wavefunctions...")
        for params, N, ell in self._groups():
            self._guard(f"norm[{params.label()};N={N};l={ell}]", "integral R^2 r^(N-1) dr = 1",
                        lambda: self._check_wavefunctions(params, N, ell))
        logger.info(f"  ✓ {len(self.items)} items so far")

        logger.info("\nStep 3: Hellmann-Feynman values and virial relation...")
        for params, N, ell in self._groups():
            self._guard(f"inv_r[{params.label()};N={N};l={ell}]", "<1/r> = 4 mu A/(hbar^2 K^2)",
                        lambda: self._check_expectations(params, N, ell))
        logger.info(f"  ✓ {len(self.items)} items so far")

        logger.info("\nStep 4: Ladder operators and algebra...")
        for params, N, ell in self._groups():
            self._guard(f"ladder[{params.label()};N={N};l={ell}]", "SU(1,1) ladder relations",
                        lambda: self._check_ladder(params, N, ell))
        logger.info(f"  ✓ {len(self.items)} items so far")

        logger.info("\nStep 5: Printed-formula probes...")
        for name, probe in self._probes():
            self._guard(name, "printed form", probe)

        self.items.sort(key=lambda item: item.name)
        report = VerificationReport(metadata=self._metadata(), items=self.items)
        report.metadata["counts"] = report.counts()

        elapsed = time.time() - start_time
        logger.info("\n" + "=" * 60)
        logger.info(f"Verification complete in {elapsed:.2f}s: {report.counts()}")
        for item in report.mismatches():
            logger.warning(f"  ✗ {item.name}: rel_error {item.rel_error:.3e} > {item.tolerance:.1e}")
        return report

    def _metadata(self) -> Dict:
        return {
            "generator": "miespec",
            "sweep": self.config.model_dump(mode="json"),
            "tolerances": self.tolerances,
        }

    def _groups(self) -> List[Tuple[PotentialParams, int, int]]:
        cfg = self.config
        groups = []
        for A, B, C in cfg.potentials:
            params = make_params(A, B, C, mu=cfg.mu, hbar=cfg.hbar)
            for N in cfg.dimensions:
                for ell in cfg.ells:
                    groups.append((params, N, ell))
        return groups

    # a failing check becomes a mismatch item instead of aborting the sweep
    def _guard(self, name: str, paper_form: str, check: Callable[[], None]) -> None:
        try:
            check()
        except (MieSpecError, ValueError, ArithmeticError) as e:
            logger.error(f"Error in {name}: {e}")
            self.items.append(
                ReportItem(
                    name=name,
                    paper_form=f"{paper_form} [failed: {e}]",
                    computed=0.0,
                    oracle=0.0,
                    rel_error=1.0,
                    tolerance=self.tolerances["probe"],
                    status=ReportStatus.MISMATCH,
                )
            )

    def _record(
        self,
        name: str,
        paper_form: str,
        computed: float,
        oracle: float,
        tolerance_key: str,
        floor: float = _TINY,
    ) -> ReportItem:
        tolerance = self.tolerances[tolerance_key]
        rel_error = _relative(computed, oracle, floor)
        item = ReportItem(
            name=name,
            paper_form=paper_form,
            computed=float(computed),
            oracle=float(oracle),
            rel_error=rel_error,
            tolerance=tolerance,
            status=ReportStatus.MATCH if rel_error <= tolerance else ReportStatus.MISMATCH,
        )
        self.items.append(item)
        logger.debug(f"{name}: {item.status.value} ({rel_error:.3e})")
        return item

    # one guarded item: compute returns (computed, oracle)
    def _measure(
        self,
        name: str,
        paper_form: str,
        compute: Callable[[], Tuple[float, float]],
        tolerance_key: str,
        floor: float = _TINY,
    ) -> None:
        def check() -> None:
            computed, oracle = compute()
            self._record(name, paper_form, computed, oracle, tolerance_key, floor)

        self._guard(name, paper_form, check)

    # corrected and literal forms of one printed formula against one oracle
    def _probe(
        self,
        name: str,
        paper_form: str,
        corrected_form: str,
        corrected: float,
        literal: float,
        oracle: float,
        tolerance_key: str,
        floor: float = _TINY,
    ) -> ReportItem:
        tolerance = self.tolerances[tolerance_key]
        corrected_error = _relative(corrected, oracle, floor)
        literal_error = _relative(literal, oracle, floor)
        if self.config.strict_literal:
            computed, rel_error = literal, literal_error
            status = ReportStatus.MATCH if literal_error <= tolerance else ReportStatus.MISMATCH
        else:
            computed, rel_error = corrected, corrected_error
            if corrected_error > tolerance:
                status = ReportStatus.MISMATCH
            elif literal_error > tolerance:
                status = ReportStatus.PAPER_TYPO_FLAGGED
            else:
                status = ReportStatus.MATCH
        item = ReportItem(
            name=name,
            paper_form=paper_form,
            computed=float(computed),
            oracle=float(oracle),
            rel_error=rel_error,
            tolerance=tolerance,
            status=status,
            corrected_form=corrected_form,
            literal=float(literal),
        )
        self.items.append(item)
        logger.info(f"  {'✓' if status != ReportStatus.MISMATCH else '✗'} {name}: {status.value}")
        return item

    def _state(self, params: PotentialParams, ch: Channel):
        scale = self.config.epsilon_scale
        if scale == 1.0:
            return radial_state(params, ch)
        return radial_state(params, ch, epsilon_override=derive(params, ch).epsilon * scale)

    def _check_spectrum(self, params: PotentialParams, N: int, ell: int) -> None:
        levels = self.config.fd_levels
        if levels:
            problem = make_fd_problem(params, N, ell, levels=levels)
            oracle = fd_eigenvalues(problem, levels)
            for n_r, fd_energy in enumerate(oracle):
                ch = Channel(N=N, ell=ell, n_r=n_r)
                self._record(
                    item_name("energy_fd", params, ch),
                    "E = C - 2 mu A^2/(hbar^2 (2n_r+1+sqrt(radicand))^2)",
                    energy(params, ch).energy,
                    fd_energy,
                    "energy_fd",
                )
        for n_r in range(self.config.n_r_max + 1):
            ch = Channel(N=N, ell=ell, n_r=n_r)
            closed = energy(params, ch).energy
            self._record(
                item_name("energy_principal", params, ch),
                "E = C - mu A^2/(2 hbar^2 (n + (N-3)/2)^2)",
                principal_energy(params, ch),
                closed,
                "algebra",
            )
            self._record(
                item_name("energy_l0", params, ch),
                "E = C - (mu A^2/2 hbar^2)/L0^2",
                hamiltonian_via_l0(params, ch),
                closed,
                "algebra",
            )

    def _check_wavefunctions(self, params: PotentialParams, N: int, ell: int) -> None:
        states = []
        for n_r in range(self.config.n_r_max + 1):
            ch = Channel(N=N, ell=ell, n_r=n_r)
            state = self._state(params, ch)
            states.append(state)
            self._record(item_name("norm", params, ch), "integral R^2 r^(N-1) dr = 1", norm(state), 1.0, "norm")
            self._record(
                item_name("ode_residual", params, ch),
                "R'' + (N-1)/r R' - l(l+N-2)/r^2 R + 2mu/hbar^2 (E - V) R = 0",
                ode_residual(state, energy(params, ch).energy),
                0.0,
                "ode_residual",
                floor=1.0,
            )
        for a in range(len(states)):
            for b in range(a + 1, len(states)):
                ch = Channel(N=N, ell=ell, n_r=a)
                self._record(
                    item_name("orthogonality", params, ch, f",{b}"),
                    "integral R_a R_b r^(N-1) dr = 0",
                    radial_inner_product(states[a], states[b], 0, N - 1),
                    0.0,
                    "orthogonality",
                    floor=1.0,
                )

    def _check_expectations(self, params: PotentialParams, N: int, ell: int) -> None:
        for n_r in range(self.config.n_r_max + 1):
            ch = Channel(N=N, ell=ell, n_r=n_r)
            state = self._state(params, ch)
            inv_r, inv_r2 = expect_inv_r(params, ch), expect_inv_r2(params, ch)
            checks = [
                (item_name("inv_r", params, ch), "<1/r> = 4 mu A/(hbar^2 K^2)",
                 lambda: (inv_r, radial_inner_product(state, state, -1, N - 1)), "hft_quadrature"),
                (item_name("inv_r2", params, ch), "<1/r^2> = 16 mu^2 A^2/(hbar^4 sqrt(radicand) K^3)",
                 lambda: (inv_r2, radial_inner_product(state, state, -2, N - 1)), "hft_quadrature"),
                (item_name("hft_A", params, ch), "<1/r> = -dE/dA",
                 lambda: (inv_r, -hft_derivative(params, ch, "A")), "hft_derivative"),
                (item_name("hft_B", params, ch), "<1/r^2> = dE/dB",
                 lambda: (inv_r2, hft_derivative(params, ch, "B")), "hft_derivative"),
            ]
            # no <1/r^2> from dE/dl when 2l+N-2 = 0
            if 2 * ell + N - 2 != 0:
                checks.append((item_name("hft_ell", params, ch), "<1/r^2> = (2mu/hbar^2) (dE/dl)/(2l+N-2)",
                               lambda: (inv_r2, expect_inv_r2_from_ell(params, ch)), "hft_derivative"))
            else:
                logger.debug(f"Skipping hft_ell for {ch.label()}: 2l+N-2 = 0")
            for name, paper_form, compute, tolerance_key in checks:
                self._measure(name, paper_form, compute, tolerance_key)
            self._guard(item_name("virial", params, ch), "-(2-beta)<T> = (1-beta)(<V>-C)",
                        lambda: self._record_virial(params, ch))

    def _record_virial(self, params: PotentialParams, ch: Channel) -> None:
        values = virial(params, ch)
        self._record(
            item_name("virial", params, ch),
            "-(2-beta)<T> = (1-beta)(<V>-C)",
            values.virial_lhs,
            values.virial_rhs,
            "virial",
            floor=max(abs(values.potential), abs(values.potential - params.C), _TINY),
        )

    def _check_ladder(self, params: PotentialParams, N: int, ell: int) -> None:
        family = make_family(params, N, ell)
        v = family.v
        n_max = self.config.ladder_n_max
        for n_r in range(n_max + 1):
            ch = Channel(N=N, ell=ell, n_r=n_r)
            state = family.state(n_r)
            l0 = coeffs(ch, v).ell_zero
            self._record(item_name("ladder_lower", params, ch), "L- R_n = ell_minus R_(n-1)",
                         apply_lower(state).relative_residual, 0.0, "ladder_action", floor=1.0)
            self._record(item_name("ladder_raise", params, ch), "L+ R_n = ell_plus R_(n+1)",
                         apply_raise(state).relative_residual, 0.0, "ladder_action", floor=1.0)
            self._record(item_name("commutator", params, ch), "[L-, L+] R_n = 2 L0 R_n",
                         commutator_check(family, n_r), 2.0 * l0, "ladder_action")
            worst = max(abs(value) for value in algebra_residuals(v, n_r).values())
            self._record(item_name("su11_relations", params, ch), "[L0,L-]=-L-, [L0,L+]=L+, [L-,L+]=2L0",
                         worst, 0.0, "algebra", floor=max(1.0, 2.0 * l0))
            self._record(item_name("r_identity", params, ch), "r R = (1/2eps)[2L0 - (L+ + L-)]R - (N/2eps)R",
                         r_identity_residuals(family, n_r)[RIdentityVariant.SHIFTED], 0.0, "identity", floor=1.0)
            self._record(item_name("rddr_identity", params, ch), "r dR/dr = (L+ - L-)R/2 + R/2",
                         rddr_identity_residuals(family, n_r)[RddrSign.PLUS_HALF], 0.0, "identity", floor=1.0)

        ground = Channel(N=N, ell=ell, n_r=0)
        self._record(item_name("casimir", params, ground), "C2 = v(v+1)",
                     casimir_eigenvalue(family, n_max), v * (v + 1.0), "algebra", floor=1.0)
        elements = matrix_elements(family, min(n_max, 4))
        self._record(item_name("matrix_offdiagonal", params, ground), "<m|r|n>, <m|r d/dr|n> off the diagonal",
                     elements.offdiagonal_deviation(), 0.0, "matrix_elements", floor=1.0)
        measure = elements.orthogonal_measure(N)
        self._record(item_name("orthogonal_measure", params, ground), "fixed-eps family orthogonal under r^(N-2)",
                     float(measure if measure is not None else -1), float(N - 2), "algebra", floor=1.0)

    def _probes(self) -> List[Tuple[str, Callable[[], None]]]:
        return [
            ("typo.alpha_hbar_power", self._probe_alpha),
            ("typo.epsilon_factor", self._probe_epsilon),
            ("typo.laguerre_norm_integral", self._probe_laguerre_norm),
            ("typo.rddr_identity_sign", self._probe_rddr_sign),
            ("typo.modified_kratzer_mapping", self._probe_modified_kratzer),
            ("typo.raising_operator_constant", self._probe_raising_constant),
            ("typo.r_matrix_diagonal", self._probe_r_diagonal),
            ("typo.virial_energy_reference", self._probe_virial_reference),
            ("typo.hft_dE_dA_sign", self._probe_hft_sign),
        ]

    # hbar enters alpha squared; visible only for hbar != 1
    def _probe_alpha(self) -> None:
        params = make_params(1.0, 0.0, 0.0, mu=1.0, hbar=2.0)
        ch = Channel(N=3, ell=0, n_r=0)
        derived = derive(params, ch)
        gap = params.C - energy(params, ch).energy
        self._probe(
            "typo.alpha_hbar_power",
            "alpha = A sqrt(mu/(2 hbar gap))",
            "alpha = A sqrt(mu/(2 hbar^2 gap))",
            derived.alpha,
            params.A * math.sqrt(params.mu / (2.0 * params.hbar * gap)),
            ch.n_r + derived.nu + (ch.N - 1) / 2.0,
            "probe",
        )

    def _probe_epsilon(self) -> None:
        params = make_params(1.0)
        ch = Channel(N=3, ell=0, n_r=0)
        derived = derive(params, ch)
        E = energy(params, ch).energy
        literal_eps = 4.0 * params.mu * params.A / (params.hbar ** 2 * derived.K)
        self._probe(
            "typo.epsilon_factor",
            "eps = 4 mu A/(hbar^2 K)",
            "eps = 2 mu A/(hbar^2 K)",
            ode_residual(radial_state(params, ch), E),
            ode_residual(radial_state(params, ch, epsilon_override=literal_eps), E),
            0.0,
            "ode_residual",
            floor=1.0,
        )

    def _probe_laguerre_norm(self) -> None:
        n, eta = 2, 1.5
        rule = gauss_laguerre(eta + 1.0, 32)
        oracle = rule.integrate(laguerre_values(n, eta, rule.nodes) ** 2)
        self._probe(
            "typo.laguerre_norm_integral",
            "integral e^-z z^(eta+1) [L_n^eta]^2 dz = (2n+eta+1)(n+eta)!/n! read as (n+eta)",
            "(2n+eta+1) Gamma(n+eta+1)/n!",
            (2 * n + eta + 1.0) * math.exp(log_gamma(n + eta + 1.0) - log_factorial(n)),
            (2 * n + eta + 1.0) * (n + eta) / math.factorial(n),
            oracle,
            "probe",
        )

    def _probe_rddr_sign(self) -> None:
        family = make_family(make_params(1.0), 3, 0)
        residuals = rddr_identity_residuals(family, 1)
        self._probe(
            "typo.rddr_identity_sign",
            "r dR/dr = (L+ - L-)R/2 - R/2",
            "r dR/dr = (L+ - L-)R/2 + R/2",
            residuals[RddrSign.PLUS_HALF],
            residuals[RddrSign.MINUS_HALF],
            0.0,
            "identity",
            floor=1.0,
        )

    def _probe_modified_kratzer(self) -> None:
        form = KratzerForm(kappa=1.0, r_e=1.0, variant=KratzerVariant.MODIFIED_KRATZER)
        r = np.logspace(-1.0, 1.0, 64)
        target = kratzer_potential(form, r)
        scale = float(np.max(np.abs(target)))
        stated = make_params(form.kappa * form.r_e, form.kappa * form.r_e ** 2, form.kappa)

        def deviation(params: PotentialParams) -> float:
            return float(np.max(np.abs(evaluate_potential(params, r) - target))) / scale

        self._probe(
            "typo.modified_kratzer_mapping",
            "(A, B, C) = (kappa r_e, kappa r_e^2, kappa)",
            "(A, B, C) = (2 kappa r_e, kappa r_e^2, kappa)",
            deviation(from_kratzer(form)),
            deviation(stated),
            0.0,
            "probe",
            floor=1.0,
        )

    def _probe_raising_constant(self) -> None:
        state = make_family(make_params(1.0), 3, 0).state(1)
        self._probe(
            "typo.raising_operator_constant",
            "L+ = r d/dr - eps r + (n_r + v - (N-1)/2)",
            "L+ = r d/dr - eps r + (n_r + v + (N+1)/2)",
            apply_raise(state, convention=RaiseConvention.LADDER).relative_residual,
            apply_raise(state, convention=RaiseConvention.PRINTED).relative_residual,
            0.0,
            "ladder_action",
            floor=1.0,
        )

    def _probe_r_diagonal(self) -> None:
        family = make_family(make_params(1.0), 3, 0)
        elements = matrix_elements(family, 2)
        l0 = coeffs(Channel(N=3, ell=0, n_r=0), family.v).ell_zero
        self._probe(
            "typo.r_matrix_diagonal",
            "<n|r|n> = (2n + 2v + 2 - N)/(2 eps)",
            "<n|r|n> = L0/eps",
            l0 / family.epsilon,
            float(elements.ladder_r[0, 0]),
            float(elements.expansion_r[0, 0]),
            "matrix_elements",
        )

    def _probe_virial_reference(self) -> None:
        params = make_params(2.0, 1.0, 1.0)
        ch = Channel(N=3, ell=0, n_r=0)
        kinetic = kinetic_expectation(radial_state(params, ch))
        b = beta(params, ch)
        E = energy(params, ch).energy
        self._probe(
            "typo.virial_energy_reference",
            "-<T> = (1-beta) E",
            "-<T> = (1-beta)(E - C)",
            (1.0 - b) * (E - params.C),
            (1.0 - b) * E,
            -kinetic,
            "virial",
        )

    def _probe_hft_sign(self) -> None:
        params = make_params(1.0)
        ch = Channel(N=3, ell=1, n_r=0)
        state = radial_state(params, ch)
        slope = hft_derivative(params, ch, "A")
        self._probe(
            "typo.hft_dE_dA_sign",
            "<1/r> = +dE/dA",
            "<1/r> = -dE/dA",
            -slope,
            slope,
            radial_inner_product(state, state, -1, ch.N - 1),
            "hft_derivative",
        )


def _relative(computed: float, oracle: float, floor: float) -> float:
    error = abs(float(computed) - float(oracle)) / max(abs(float(oracle)), floor)
    return error if math.isfinite(error) else 1.0
