# command line: spectrum, degeneracy, expect, wavefunction, ladder and verify
import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, TextIO

import numpy as np
from pydantic import ValidationError

from .config import (
    load_config_file,
    log_level_from_env,
    parse_bool,
    parse_grid,
    parse_int_range,
    parse_tolerance_pairs,
    resolve_tolerances,
    tolerances_from_settings,
)
from .errors import ConfigError, DomainError, MieSpecError, UnphysicalChannel
from .ladder import (
    RddrSign,
    apply_lower,
    apply_raise,
    casimir_eigenvalue,
    coeffs,
    commutator_check,
    make_family,
    operator_identity_r,
    operator_identity_r_ddr,
)
from .models import (
    DEFAULT_SWEEP_POTENTIALS,
    Channel,
    KratzerForm,
    KratzerVariant,
    PotentialParams,
    RunConfig,
    SweepConfig,
)
from .numoracle import build_report
from .observables import kinetic_closed_form, virial
from .potential import derive, from_kratzer, make_params
from .quadrature import norm, radial_inner_product
from .report_writer import Sections, write_report, write_sections
from .spectrum import degeneracy, energy, reference_table
from .wavefunction import evaluate, radial_state, reduced_u

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# config-file key -> RunConfig field, for plain values
_VALUE_KEYS = {
    "A": "A",
    "B": "B",
    "C": "C",
    "mu": "mu",
    "hbar": "hbar",
    "grid": "grid",
    "format": "output_format",
    "epsilon": "epsilon",
    "epsilon-scale": "epsilon_scale",
}
_RANGE_KEYS = {"N": "dimensions", "l": "ells", "nr": "n_rs", "n": "principal"}
_FLAG_KEYS = {
    "skip-unphysical": "skip_unphysical",
    "strict-literal": "strict_literal",
    "check-norm": "check_norm",
    "paper-table": "paper_table",
}
_KRATZER_KEYS = ("kratzer-fues", "modified-kratzer", "kappa", "re")

# commands that need a single potential
_NEEDS_POTENTIAL = ("spectrum", "expect", "wavefunction", "ladder")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    potential = common.add_argument_group("potential")
    potential.add_argument("--A", dest="A", type=float, help="Coulomb-like coupling A > 0")
    potential.add_argument("--B", dest="B", type=float, help="inverse-square coefficient B")
    potential.add_argument("--C", dest="C", type=float, help="constant offset C")
    potential.add_argument("--kratzer-fues", dest="kratzer_fues", action="store_true", default=None,
                           help="take (A, B, C) from --kappa and --re, Kratzer-Fues form")
    potential.add_argument("--modified-kratzer", dest="modified_kratzer", action="store_true", default=None,
                           help="take (A, B, C) from --kappa and --re, modified Kratzer form")
    potential.add_argument("--kappa", dest="kappa", type=float, help="dissociation energy")
    potential.add_argument("--re", dest="re", type=float, help="equilibrium distance")
    potential.add_argument("--mu", dest="mu", type=float, help="reduced mass (default 1)")
    potential.add_argument("--hbar", dest="hbar", type=float, help="reduced Planck constant (default 1)")

    channels = common.add_argument_group("channels")
    channels.add_argument("--N", dest="N", help="dimensions: 'a..b', 'a,b' or one value")
    channels.add_argument("--l", dest="l", help="angular momenta: 'a..b', 'a,b' or one value")
    channels.add_argument("--nr", dest="nr", help="radial quantum numbers: 'a..b', 'a,b' or one value")

    output = common.add_argument_group("output")
    output.add_argument("--format", dest="format", choices=["json", "csv", "table"], help="output format (default table)")
    output.add_argument("--tolerance", dest="tolerance", action="append", metavar="KEY=VAL",
                        help="override one verification tolerance; repeatable")
    output.add_argument("--config", dest="config", help="flat KEY=VALUE file mirroring the flags")
    output.add_argument("--skip-unphysical", dest="skip_unphysical", action="store_true", default=None,
                        help="skip channels without a bound state instead of failing")
    output.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="miespec",
        allow_abbrev=False,
        description="Closed-form spectra, states and ladder operators of V(r) = -A/r + B/r^2 + C in N dimensions.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("spectrum", parents=[common], allow_abbrev=False, help="energy levels per channel")

    deg = commands.add_parser("degeneracy", parents=[common], allow_abbrev=False, help="level degeneracies for B = 0")
    deg.add_argument("--n", dest="n", help="principal quantum numbers: 'a..b', 'a,b' or one value")
    deg.add_argument("--paper-table", dest="paper_table", action="store_true", default=None,
                     help="the N=3..10 x n=1..5 reference grid")

    commands.add_parser("expect", parents=[common], allow_abbrev=False, help="<1/r>, <1/r^2>, beta, <T>, <V> and the virial check")

    wave = commands.add_parser("wavefunction", parents=[common], allow_abbrev=False, help="R(r) and U(r) on a grid")
    wave.add_argument("--grid", dest="grid", help="lin:start:stop:count or log:start:stop:count")
    wave.add_argument("--check-norm", dest="check_norm", action="store_true", default=None,
                      help="append the quadrature norm of every state")

    ladder = commands.add_parser("ladder", parents=[common], allow_abbrev=False, help="ladder coefficients and operator checks")
    ladder.add_argument("--epsilon", dest="epsilon", type=float, help="family decay rate (default: ground state)")

    verify = commands.add_parser("verify", parents=[common], allow_abbrev=False, help="closed forms against numerical oracles")
    verify.add_argument("--strict-literal", dest="strict_literal", action="store_true", default=None,
                        help="test the printed forms as written")
    verify.add_argument("--epsilon-scale", dest="epsilon_scale", type=float,
                        help="scale every decay rate (negative control)")
    return parser


def configure_logging(level: Optional[str]) -> None:
    name = (level or log_level_from_env()).upper()
    numeric = getattr(logging, name, None)
    if not isinstance(numeric, int):
        raise ConfigError(f"unknown log level {name!r}")
    logging.basicConfig(
        level=numeric,
        stream=sys.stderr,
        force=True,
    )


def _cli_settings(args: argparse.Namespace) -> Dict[str, Any]:
    # flag values under their config-file keys; unset flags are left out
    pairs = {
        "A": args.A, "B": args.B, "C": args.C, "mu": args.mu, "hbar": args.hbar,
        "kappa": args.kappa, "re": args.re,
        "kratzer-fues": args.kratzer_fues, "modified-kratzer": args.modified_kratzer,
        "N": args.N, "l": args.l, "nr": args.nr, "format": args.format,
        "skip-unphysical": args.skip_unphysical,
        "n": getattr(args, "n", None),
        "paper-table": getattr(args, "paper_table", None),
        "grid": getattr(args, "grid", None),
        "check-norm": getattr(args, "check_norm", None),
        "epsilon": getattr(args, "epsilon", None),
        "strict-literal": getattr(args, "strict_literal", None),
        "epsilon-scale": getattr(args, "epsilon_scale", None),
    }
    return {key: value for key, value in pairs.items() if value is not None}


def _kratzer_form(settings: Dict[str, Any]) -> Optional[KratzerForm]:
    fues = parse_bool(settings.get("kratzer-fues", False), "kratzer-fues")
    modified = parse_bool(settings.get("modified-kratzer", False), "modified-kratzer")
    if not (fues or modified):
        if "kappa" in settings or "re" in settings:
            raise ConfigError("--kappa/--re need --kratzer-fues or --modified-kratzer")
        return None
    if fues and modified:
        raise ConfigError("--kratzer-fues and --modified-kratzer are mutually exclusive")
    if "A" in settings or "B" in settings or "C" in settings:
        raise ConfigError("give either --A/--B/--C or a Kratzer form, not both")
    if "kappa" not in settings or "re" not in settings:
        raise ConfigError("a Kratzer form needs both --kappa and --re")
    variant = KratzerVariant.MODIFIED_KRATZER if modified else KratzerVariant.KRATZER_FUES
    return KratzerForm(kappa=settings["kappa"], r_e=settings["re"], variant=variant)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file (if any) with the flags; flags win"""
    settings: Dict[str, Any] = load_config_file(args.config) if args.config else {}
    file_tolerances = tolerances_from_settings(settings)
    settings.update(_cli_settings(args))

    known = set(_VALUE_KEYS) | set(_RANGE_KEYS) | set(_FLAG_KEYS) | set(_KRATZER_KEYS)
    unknown = [key for key in settings if key not in known and not key.startswith("tolerance.")]
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

    fields: Dict[str, Any] = {}
    for key, field in _VALUE_KEYS.items():
        if key in settings:
            fields[field] = settings[key]
    for key, field in _RANGE_KEYS.items():
        if key in settings:
            fields[field] = parse_int_range(settings[key], key)
    for key, field in _FLAG_KEYS.items():
        if key in settings:
            fields[field] = parse_bool(settings[key], key)
    fields["kratzer"] = _kratzer_form(settings)
    fields["tolerances"] = resolve_tolerances({**file_tolerances, **parse_tolerance_pairs(args.tolerance)})
    config = RunConfig(**fields)

    if min(config.dimensions) < 2:
        raise ConfigError(f"dimensions must be >= 2, got {config.dimensions}")
    if min(config.ells) < 0 or min(config.n_rs) < 0:
        raise ConfigError("l and n_r must be non-negative")
    parse_grid(config.grid)
    return config


def resolve_params(config: RunConfig) -> PotentialParams:
    """Potential parameters from (A, B, C) or the Kratzer form"""
    if config.kratzer is not None:
        return from_kratzer(config.kratzer, mu=config.mu, hbar=config.hbar)
    if config.A is None:
        raise ConfigError("a potential is required: --A (with --B, --C) or --kratzer-fues/--modified-kratzer")
    return make_params(config.A, config.B, config.C, mu=config.mu, hbar=config.hbar)


def _channels(config: RunConfig) -> List[Channel]:
    return [
        Channel(N=N, ell=ell, n_r=n_r)
        for N in sorted(set(config.dimensions))
        for ell in sorted(set(config.ells))
        for n_r in sorted(set(config.n_rs))
    ]


# rows of one command, skipping unphysical channels when asked to
def _per_channel(config: RunConfig, build: Callable[[Channel], List[Dict[str, Any]]]) -> List[Dict[str, Any]]:
    rows = []
    for ch in _channels(config):
        try:
            rows.extend(build(ch))
        except UnphysicalChannel as e:
            if not config.skip_unphysical:
                raise
            logger.warning(f"Skipping {ch.label()}: {e}")
    return rows


def cmd_spectrum(config: RunConfig, params: PotentialParams, out: TextIO) -> int:
    """One record per channel with the derived quantities and the energy"""
    def build(ch: Channel) -> List[Dict[str, Any]]:
        derived = derive(params, ch)
        return [{
            "N": ch.N,
            "ell": ch.ell,
            "n_r": ch.n_r,
            "v": derived.v,
            "nu": derived.nu,
            "epsilon": derived.epsilon,
            "energy": energy(params, ch).energy,
            "K": derived.K,
        }]

    write_sections({"rows": _per_channel(config, build)}, config.output_format, out, "spectrum")
    return EXIT_OK


def cmd_degeneracy(config: RunConfig, out: TextIO) -> int:
    if config.paper_table:
        rows = [{"N": table.N, "n": n, "degeneracy": count} for table in reference_table() for n, count in table.rows]
    else:
        rows = [
            {"N": N, "n": n, "degeneracy": degeneracy(n, N)}
            for N in sorted(set(config.dimensions))
            for n in sorted(set(config.principal))
        ]
    write_sections({"rows": rows}, config.output_format, out, "degeneracy")
    return EXIT_OK


def cmd_expect(config: RunConfig, params: PotentialParams, out: TextIO) -> int:
    """Closed-form and quadrature expectation values side by side"""
    def build(ch: Channel) -> List[Dict[str, Any]]:
        state = radial_state(params, ch)
        values = virial(params, ch)
        return [{
            "N": ch.N,
            "ell": ch.ell,
            "n_r": ch.n_r,
            "inv_r": values.inv_r,
            "inv_r_quadrature": radial_inner_product(state, state, -1, ch.N - 1),
            "inv_r2": values.inv_r2,
            "inv_r2_quadrature": radial_inner_product(state, state, -2, ch.N - 1),
            "beta": values.beta,
            "T": kinetic_closed_form(params, ch),
            "T_quadrature": values.kinetic,
            "V": values.potential,
            "virial_residual": values.virial_residual,
        }]

    write_sections({"rows": _per_channel(config, build)}, config.output_format, out, "expect")
    return EXIT_OK


def grid_nodes(spec: str) -> np.ndarray:
    kind, start, stop, count = parse_grid(spec)
    if count == 1:
        return np.array([start])
    if kind == "log":
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def cmd_wavefunction(config: RunConfig, params: PotentialParams, out: TextIO) -> int:
    nodes = grid_nodes(config.grid)
    norms: List[Dict[str, Any]] = []

    def build(ch: Channel) -> List[Dict[str, Any]]:
        state = radial_state(params, ch)
        values = evaluate(state, nodes)
        reduced = reduced_u(state, nodes)
        if config.check_norm:
            norms.append({"N": ch.N, "ell": ch.ell, "n_r": ch.n_r, "norm": norm(state)})
        return [
            {"N": ch.N, "ell": ch.ell, "n_r": ch.n_r, "r": float(r), "R": float(R), "U": float(U)}
            for r, R, U in zip(nodes, values, reduced)
        ]

    sections: Sections = {"rows": _per_channel(config, build)}
    if config.check_norm:
        sections["norms"] = norms
    write_sections(sections, config.output_format, out, "wavefunction")
    return EXIT_OK


def cmd_ladder(config: RunConfig, params: PotentialParams, out: TextIO) -> int:
    """Ladder coefficients with the operator and algebra checks for each rung"""
    def build(ch: Channel) -> List[Dict[str, Any]]:
        family = make_family(params, ch.N, ch.ell, config.epsilon)
        state = family.state(ch.n_r)
        c = coeffs(ch, family.v)
        r_residual, r_variant = operator_identity_r(family, ch.n_r)
        rddr_residual, rddr_sign = operator_identity_r_ddr(family, ch.n_r)
        return [{
            "N": ch.N,
            "ell": ch.ell,
            "n_r": ch.n_r,
            "v": family.v,
            "epsilon": family.epsilon,
            "ell_minus": c.ell_minus,
            "ell_plus": c.ell_plus,
            "ell_zero": c.ell_zero,
            "lower_residual": apply_lower(state).relative_residual,
            "raise_residual": apply_raise(state).relative_residual,
            "commutator": commutator_check(family, ch.n_r),
            "casimir": casimir_eigenvalue(family, max(ch.n_r, 1)),
            "r_identity_residual": r_residual,
            "r_identity_variant": r_variant.value,
            "rddr_identity_residual": rddr_residual,
            "rddr_sign": "+1/2" if rddr_sign == RddrSign.PLUS_HALF else "-1/2",
        }]

    write_sections({"rows": _per_channel(config, build)}, config.output_format, out, "ladder")
    return EXIT_OK


def sweep_config(config: RunConfig) -> SweepConfig:
    """Default sweep, narrowed to whatever potential and channels were given"""
    given = config.model_fields_set
    if config.kratzer is not None or config.A is not None:
        params = resolve_params(config)
        potentials = [(params.A, params.B, params.C)]
    else:
        potentials = list(DEFAULT_SWEEP_POTENTIALS)
    fields: Dict[str, Any] = {
        "potentials": potentials,
        "mu": config.mu,
        "hbar": config.hbar,
        "tolerances": config.tolerances,
        "epsilon_scale": config.epsilon_scale,
        "strict_literal": config.strict_literal,
    }
    if "dimensions" in given:
        fields["dimensions"] = sorted(set(config.dimensions))
    if "ells" in given:
        fields["ells"] = sorted(set(config.ells))
    if "n_rs" in given:
        fields["n_r_max"] = max(config.n_rs)
    return SweepConfig(**fields)


def cmd_verify(config: RunConfig, out: TextIO) -> int:
    """Run the verification suite; exit 0 iff nothing mismatches"""
    report = build_report(sweep_config(config))
    write_report(report, config.output_format, out)
    if not report.passed:
        logger.error(f"Verification failed: {len(report.mismatches())} mismatching items")
        return EXIT_FAILURE
    return EXIT_OK


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed the usage message
        return int(exc.code or 0)

    try:
        configure_logging(args.log_level)
        config = load_run_config(args)
        params = resolve_params(config) if args.command in _NEEDS_POTENTIAL else None
        if args.command == "degeneracy" and not config.paper_table:
            if min(config.dimensions) < 3 or min(config.principal) < 1:
                raise ConfigError("degeneracy counting needs N >= 3 and n >= 1")
        if args.command == "verify":
            sweep_config(config)
    except (ConfigError, ValidationError, DomainError) as e:
        print(f"miespec: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "spectrum":
            return cmd_spectrum(config, params, out)
        if args.command == "degeneracy":
            return cmd_degeneracy(config, out)
        if args.command == "expect":
            return cmd_expect(config, params, out)
        if args.command == "wavefunction":
            return cmd_wavefunction(config, params, out)
        if args.command == "ladder":
            return cmd_ladder(config, params, out)
        return cmd_verify(config, out)
    except UnphysicalChannel as e:
        logger.error(f"Unphysical channel: {e}")
        print(f"miespec: unphysical channel: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except MieSpecError as e:
        logger.error(f"Error running {args.command}: {e}")
        print(f"miespec: error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
