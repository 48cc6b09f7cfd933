"""Command-line interface: ``casimir-spheres <subcommand> [options]``.

Subcommands
-----------
plane      plate-plate free energy, force and gradient split into n=0 / n>0
classical  exact classical (n=0) sphere-sphere interaction
spheres    combined beyond-PFA force gradient of two spheres
deviation  deviation-from-PFA sweeps over separation or over u
coeffs     curvature coefficient lookups and conversions
fit        synthetic dataset generation and the one/two-parameter fits

Lengths take a unit suffix (``nm``, ``um``, ``m``), material energies ``eV``
and temperature ``K``.  Output goes to stdout (or ``--output``) as CSV or
JSON; JSON carries a ``provenance`` block.  Exit status is 0 on success, 2
on usage errors and 3 on numerical failures.
"""
import argparse
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __name__ as _pkg
from .classical import (
    DEFAULT_L_TOLERANCE,
    SphereGeometry,
    classical_force,
    classical_force_gradient,
    classical_free_energy,
    classical_leading_gradient,
    classical_terms,
    z_parameter,
)
from .curvature import (
    TABLE_SHA256,
    default_table,
    deviation_report,
    force_gradient_parts,
    hat_coefficients,
    kappa_from_lifshitz,
    load_coefficient_table,
    pfa_force_gradient,
    u_sweep,
)
from .errors import CasimirError, DomainError, RangeError
from .fit import (
    EXPERIMENT_COMBINATIONS,
    FitDataset,
    fit_one_parameter,
    fit_two_parameter,
    small_distance_model,
    synthesize_dataset,
)
from .lifshitz import MatsubaraPolicy, plane_interaction
from .material import DrudeMetal, IdealMetal, TabulatedPermittivity, ThermalEnvironment

PROG = "casimir-spheres"
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

_LENGTH_UNITS = {"nm": 1e-9, "um": 1e-6, "μm": 1e-6, "µm": 1e-6, "mm": 1e-3, "m": 1.0}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-zA-Zμµ]*)\s*$")


class UsageError(Exception):
    pass


def parse_length(text):
    """``'0.4um'`` -> ``4e-7``; ``'inf'`` is accepted (sphere-plate limit)."""
    text = str(text).strip()
    if text.lower() in ("inf", "infinity"):
        return math.inf
    m = _QUANTITY.match(text)
    if not m or m.group(2) not in _LENGTH_UNITS:
        raise UsageError(f"length {text!r} needs a unit suffix nm, um or m")
    try:
        return float(m.group(1)) * _LENGTH_UNITS[m.group(2)]
    except ValueError:
        raise UsageError(f"cannot parse length {text!r}") from None


def _parse_with_unit(text, unit, what):
    m = _QUANTITY.match(str(text))
    if not m or m.group(2) not in ("", unit):
        raise UsageError(f"{what} {text!r} must be a number with optional suffix {unit}")
    try:
        return float(m.group(1))
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None


def parse_energy_ev(text):
    return _parse_with_unit(text, "eV", "energy")


def parse_temperature(text):
    return _parse_with_unit(text, "K", "temperature")


def _number(text, what, kind=float):
    try:
        return kind(text)
    except (TypeError, ValueError):
        raise UsageError(f"{what} must be a number, got {text!r}") from None


def _lengths(values):
    if isinstance(values, (str, int, float)):
        values = [values]
    return [parse_length(v) for v in values]


@dataclass
class RunConfig:
    """Normalized (SI) settings of one CLI invocation."""

    subcommand: str
    material: object
    thermal: ThermalEnvironment
    policy: MatsubaraPolicy
    l_tolerance: float
    output_format: str
    output: str = None
    options: dict = field(default_factory=dict)

    def provenance(self, table):
        mat = self.material
        model = {"name": mat.name}
        if isinstance(mat, DrudeMetal):
            model.update(plasma_energy_eV=mat.plasma_energy_ev, relaxation_energy_eV=mat.relaxation_energy_ev)
        elif isinstance(mat, TabulatedPermittivity):
            model.update(source=mat.source, rows=len(mat.xi))
        return {
            "package": _pkg,
            "subcommand": self.subcommand,
            "model": model,
            "temperature_K": self.thermal.temperature,
            "tolerances": {
                "matsubara_relative_term": self.policy.relative_term_tolerance,
                "matsubara_max_modes": self.policy.max_modes,
                "quadrature_relative": self.policy.quadrature_relative_tolerance,
                "classical_series": self.l_tolerance,
            },
            "tables": {k: v["sha256"] for k, v in sorted(table.provenance.items())}
            if table is not None else dict(TABLE_SHA256),
        }


# --------------------------------------------------------------------------- parser

def _common(parser):
    g = parser.add_argument_group("material and numerics")
    g.add_argument("--config", help="JSON file of option values; command-line flags override it")
    g.add_argument("--material", choices=["drude", "ideal", "tabulated"], default="drude")
    g.add_argument("--wp", default="9.0eV", help="Drude plasma energy (default 9.0eV)")
    g.add_argument("--gamma", default="0.035eV", help="Drude relaxation energy (default 0.035eV)")
    g.add_argument("--eps-table", help="CSV with header xi_rad_per_s,eps (for --material tabulated)")
    g.add_argument("--T", dest="temperature", default="300K", help="temperature (default 300K)")
    g.add_argument("--mode-tol", default="1e-10", help="Matsubara relative term tolerance")
    g.add_argument("--max-modes", default="100000")
    g.add_argument("--quad-tol", default="1e-10", help="momentum-integral relative tolerance")
    g.add_argument("--l-tol", default=repr(DEFAULT_L_TOLERANCE), help="classical series tolerance")
    g.add_argument("--tilde-table", help="user (theta_tilde, kappa) CSV replacing the packaged one")
    g.add_argument("--hat-table", help="user (theta_hat, kappa_hat) CSV replacing the packaged one")
    g.add_argument("--format", dest="output_format", choices=["csv", "json"], default="csv")
    g.add_argument("-o", "--output", help="write to this file instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog=PROG, description="Finite-temperature Casimir interaction of two spheres.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("plane", help="plate-plate Lifshitz split at given separations")
    p.add_argument("--a", nargs="+", required=True, help="separation(s), e.g. 0.1um")
    _common(p)

    p = sub.add_parser("classical", help="exact classical sphere-sphere interaction")
    p.add_argument("--R1", required=True)
    p.add_argument("--R2", default="inf")
    p.add_argument("--a", nargs="+", required=True)
    _common(p)

    p = sub.add_parser("spheres", help="combined beyond-PFA force gradient")
    p.add_argument("--R1", required=True)
    p.add_argument("--R2", default="inf")
    p.add_argument("--a", nargs="+", required=True)
    _common(p)

    p = sub.add_parser("deviation", help="deviation-from-PFA sweeps")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--u-sweep", action="store_true", help="sweep u in [0, 1/4] at fixed --a and --Rtilde")
    mode.add_argument("--a-sweep", action="store_true", help="sweep the separation for fixed radii")
    p.add_argument("--a", help="separation for --u-sweep")
    p.add_argument("--Rtilde", help="effective radius (both sweeps)")
    p.add_argument("--u", default="0", help="u for --a-sweep with --Rtilde (default 0)")
    p.add_argument("--R1", help="radius for --a-sweep (alternative to --Rtilde/--u)")
    p.add_argument("--R2", default="inf")
    p.add_argument("--a-min", default="0.1um")
    p.add_argument("--a-max", default="2um")
    p.add_argument("--points", default=None, help="grid size (11 for --u-sweep, 20 for --a-sweep)")
    _common(p)

    p = sub.add_parser("coeffs", help="curvature coefficients at given separations")
    p.add_argument("--a", nargs="+", required=True)
    _common(p)

    p = sub.add_parser("fit", help="synthesize a dataset and run both beyond-PFA fits")
    p.add_argument("--dataset", help="read records from CSV instead of synthesizing")
    p.add_argument("--a", nargs="+", help="separation(s) to synthesize and fit (default 0.2um)")
    p.add_argument("--generator", choices=["full", "small-distance"], default="full")
    p.add_argument("--theta-hat", default=None, help="for --generator small-distance")
    p.add_argument("--kappa-hat", default=None, help="for --generator small-distance")
    p.add_argument("--noise", default="0", help="Gaussian noise sigma on F'/R_eff in N/m^2")
    p.add_argument("--seed", default="0")
    p.add_argument("--write-dataset", help="also write the synthesized records to this CSV")
    _common(p)
    return parser


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise UsageError(f"unknown subcommand {name!r}")


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _parse(argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    path = _config_path(argv)
    subcommand = next((t for t in argv if t in _COMMANDS), None)
    if path and subcommand:
        try:
            with open(path) as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(conf, dict):
            raise UsageError("config file must hold a JSON object")
        sub = _subparser(parser, subcommand)
        known = {a.dest for a in sub._actions} - {"help", "config"}
        unknown = sorted(set(conf) - known)
        if unknown:
            raise UsageError(f"unknown config key(s) for {subcommand}: {', '.join(unknown)}")
        sub.set_defaults(**{k: (v if isinstance(v, (list, bool)) else str(v)) for k, v in conf.items()})
        # options supplied by the config file are no longer required on the command line
        for action in sub._actions:
            if action.dest in conf:
                action.required = False
        for group in sub._mutually_exclusive_groups:
            if any(a.dest in conf for a in group._group_actions):
                group.required = False
    return parser.parse_args(argv)


def _material(args):
    if args.material == "ideal":
        return IdealMetal()
    if args.material == "tabulated":
        if not args.eps_table:
            raise UsageError("--material tabulated needs --eps-table")
        try:
            return TabulatedPermittivity.from_csv(args.eps_table)
        except OSError as exc:
            raise UsageError(str(exc)) from None
    return DrudeMetal(parse_energy_ev(args.wp), parse_energy_ev(args.gamma))


def make_config(args):
    return RunConfig(
        subcommand=args.subcommand,
        material=_material(args),
        thermal=ThermalEnvironment(parse_temperature(args.temperature)),
        policy=MatsubaraPolicy(
            relative_term_tolerance=_number(args.mode_tol, "--mode-tol"),
            max_modes=_number(args.max_modes, "--max-modes", int),
            quadrature_relative_tolerance=_number(args.quad_tol, "--quad-tol"),
        ),
        l_tolerance=_number(args.l_tol, "--l-tol"),
        output_format=args.output_format,
        output=args.output,
        options=vars(args),
    )


def _table(args):
    if args.tilde_table or args.hat_table:
        return load_coefficient_table(args.tilde_table, args.hat_table)
    return default_table()


# --------------------------------------------------------------------------- commands

def _cmd_plane(cfg, args, table):
    rows = []
    for a in _lengths(args.a):
        rows.append(plane_interaction(cfg.material, cfg.thermal, a, cfg.policy).as_dict())
    return rows


def _geometry(args, a):
    return SphereGeometry(parse_length(args.R1), parse_length(args.R2), a)


def _cmd_classical(cfg, args, table):
    rows = []
    for a in _lengths(args.a):
        g = _geometry(args, a)
        rows.append({
            "R1_m": g.radius_1, "R2_m": g.radius_2, "a_m": a, "x": g.x, "u": g.u,
            "Z": z_parameter(g),
            "terms": classical_terms(g, cfg.l_tolerance),
            "free_energy_J": classical_free_energy(g, cfg.thermal, cfg.l_tolerance),
            "force_N": classical_force(g, cfg.thermal, cfg.l_tolerance),
            "force_gradient_N_per_m": classical_force_gradient(g, cfg.thermal, cfg.l_tolerance),
            "leading_gradient_N_per_m": classical_leading_gradient(g, cfg.thermal),
        })
    return rows


def _cmd_spheres(cfg, args, table):
    rows = []
    for a in _lengths(args.a):
        g = _geometry(args, a)
        parts = force_gradient_parts(cfg.material, cfg.thermal, g, table, cfg.policy, cfg.l_tolerance)
        pfa = pfa_force_gradient(cfg.material, cfg.thermal, g, cfg.policy)
        rows.append({
            "R1_m": g.radius_1, "R2_m": g.radius_2, "a_m": a, "R_eff_m": g.effective_radius, "u": g.u,
            "classical_N_per_m": parts.classical,
            "thermal_modes_N_per_m": parts.thermal_modes,
            "force_gradient_N_per_m": parts.total,
            "pfa_force_gradient_N_per_m": pfa,
            "deviation_metric": (parts.total / pfa - 1.0) / g.x,
        })
    return rows


def _cmd_deviation(cfg, args, table):
    if args.u_sweep:
        if not (args.a and args.Rtilde):
            raise UsageError("--u-sweep needs --a and --Rtilde")
        points = _number(args.points or 11, "--points", int)
        us = np.linspace(0.0, 0.25, points)
        reports = u_sweep(parse_length(args.a), parse_length(args.Rtilde), us,
                          cfg.material, cfg.thermal, table, cfg.policy)
    else:
        points = _number(args.points or 20, "--points", int)
        grid = np.linspace(parse_length(args.a_min), parse_length(args.a_max), points)
        if args.R1:
            geoms = [SphereGeometry(parse_length(args.R1), parse_length(args.R2), float(a)) for a in grid]
        elif args.Rtilde:
            geoms = [SphereGeometry.from_effective(parse_length(args.Rtilde), _number(args.u, "--u"), float(a))
                     for a in grid]
        else:
            raise UsageError("--a-sweep needs --R1 [--R2] or --Rtilde [--u]")
        reports = [deviation_report(cfg.material, cfg.thermal, g, table, cfg.policy) for g in geoms]
    return [r.as_dict() for r in reports]


def _cmd_coeffs(cfg, args, table):
    rows = []
    for a in _lengths(args.a):
        row = {"a_m": a}
        for name in ("theta_tilde", "kappa", "theta_hat", "kappa_hat"):
            try:
                row[f"{name}_table"] = getattr(table, name)(a)
            except RangeError:
                row[f"{name}_table"] = math.nan
        row["kappa_computed"] = kappa_from_lifshitz(cfg.material, cfg.thermal, a, cfg.policy)
        if math.isfinite(row["theta_tilde_table"]):
            th, kh = hat_coefficients(cfg.material, cfg.thermal, a, row["theta_tilde_table"],
                                      row["kappa_table"], cfg.policy)
        else:
            th = kh = math.nan
        row["theta_hat_converted"] = th
        row["kappa_hat_converted"] = kh
        split = plane_interaction(cfg.material, cfg.thermal, a, cfg.policy)
        row["force_fraction_n0"] = split.force_fraction_n0
        rows.append(row)
    return rows


def _cmd_fit(cfg, args, table):
    noise = _number(args.noise, "--noise")
    seed = _number(args.seed, "--seed", int)
    if args.dataset:
        try:
            dataset = FitDataset.from_csv(args.dataset)
        except OSError as exc:
            raise UsageError(str(exc)) from None
        separations = _lengths(args.a) if args.a else dataset.separations()
    else:
        separations = _lengths(args.a or ["0.2um"])
        model = None
        if args.generator == "small-distance":
            if args.theta_hat is None or args.kappa_hat is None:
                raise UsageError("--generator small-distance needs --theta-hat and --kappa-hat")
            model = small_distance_model(_number(args.theta_hat, "--theta-hat"),
                                         _number(args.kappa_hat, "--kappa-hat"),
                                         cfg.material, cfg.thermal, cfg.policy)
        dataset = synthesize_dataset(cfg.material, cfg.thermal, EXPERIMENT_COMBINATIONS, separations, table,
                                     noise_sigma=noise or None, seed=seed, model=model, policy=cfg.policy)
        if args.write_dataset:
            dataset.to_csv(args.write_dataset)
    fits = []
    for a in separations:
        for fitter in (fit_one_parameter, fit_two_parameter):
            fits.append(fitter(dataset, a, cfg.material, cfg.thermal, cfg.policy))
    return fits


_COMMANDS = {
    "plane": _cmd_plane,
    "classical": _cmd_classical,
    "spheres": _cmd_spheres,
    "deviation": _cmd_deviation,
    "coeffs": _cmd_coeffs,
    "fit": _cmd_fit,
}


# --------------------------------------------------------------------------- emitters

def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        return _json_safe(value.item())
    return value


def _csv_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _fit_rows(fits):
    rows = []
    for f in fits:
        for name, est, se in zip(f.names, f.estimates, f.standard_errors):
            rows.append({
                "a_m": f.separation, "model": f.model, "coefficient": name,
                "estimate": est, "standard_error": se,
                "condition_number": f.condition_number, "n_records": len(f.residuals),
            })
    return rows


def render(cfg, result, table):
    """Serialize a command result as CSV or JSON text."""
    is_fit = cfg.subcommand == "fit"
    if cfg.output_format == "json":
        payload = {"provenance": cfg.provenance(table)}
        if is_fit:
            payload["fits"] = [f.as_dict() for f in result]
        else:
            payload["rows"] = result
        return json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n"
    rows = _fit_rows(result) if is_fit else result
    buf = io.StringIO()
    if rows:
        header = list(rows[0])
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(_csv_cell(row[k]) for k in header) + "\n")
    return buf.getvalue()


def run(argv=None, stdout=None, stderr=None):
    """Execute the CLI and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = _parse(argv)
        cfg = make_config(args)
        table = _table(args)
        result = _COMMANDS[args.subcommand](cfg, args, table)
        text = render(cfg, result, table)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"{PROG}: error: {type(exc).__module__}.{type(exc).__name__}: {exc}", file=stderr)
        return EXIT_USAGE
    except (CasimirError, ArithmeticError) as exc:
        print(f"{PROG}: numerical failure: {type(exc).__module__}.{type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())
