"""Command-line front end: experiment dispatch and CSV/JSON emission.

Every CSV starts with a comment line carrying the fully resolved
configuration, then a header row.  Numbers are written with 9 significant
digits in scientific notation so outputs are byte-stable across runs and
worker counts.

Exit codes: 0 success, 2 configuration errors, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atomdata import StateLabel
from .budget import BudgetInput, max_array, total_error
from .dressed import default_detuning_grid, default_intensity_grid, protection_map
from .errors import ConfigurationError, DomainError, IntegrationError
from .experiments import (
    ImagingLoopConfig,
    field_sweep,
    imaging_loop,
    mapping_sequence_check,
    polarization_sweep,
    scheme3_analysis,
    suppression_curve,
)
from .parallel import default_workers
from .schemeio import PRESETS, load_scheme, scheme_to_dict

GAUSS = 1e-4  # tesla


def _fmt(value: float) -> str:
    return f"{value:.8e}"


def write_csv(path, config_record: dict, header: list[str], rows) -> None:
    lines = ["# config: " + json.dumps(config_record, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_grid(spec: str, default_log: bool = False) -> np.ndarray:
    """Parse "lo:hi:Nlog", "lo:hi:N" or a comma-separated value list."""
    if ":" in spec:
        lo, hi, n = spec.split(":")
        log = n.endswith("log") or (default_log and not n.endswith("lin"))
        n = n.rstrip("loginear") or n
        count = int("".join(c for c in n if c.isdigit()))
        lo, hi = float(lo), float(hi)
        if log:
            if lo <= 0:
                raise ConfigurationError("log grids need positive endpoints")
            return np.logspace(np.log10(lo), np.log10(hi), count)
        return np.linspace(lo, hi, count)
    return np.array([float(v) for v in spec.split(",")])


def _resolved(args: argparse.Namespace, scheme=None) -> dict:
    record = {k: v for k, v in vars(args).items() if k != "func"}
    record["sseit_version"] = __version__
    if scheme is not None:
        record["scheme_config"] = scheme_to_dict(scheme)
    return record


def cmd_dressed_map(args) -> int:
    scheme = load_scheme(args.scheme)
    detunings = (_parse_grid(args.detunings) * 2 * np.pi
                 if args.detunings else default_detuning_grid())
    intensities = (_parse_grid(args.intensities, default_log=True)
                   if args.intensities else default_intensity_grid())
    target = (StateLabel.parse(args.target) if args.target
              else scheme.protected_states[0])
    result = protection_map(scheme, detunings, intensities, target,
                            workers=args.workers)
    rows = [
        (result.detuning_axis[j] / (2 * np.pi), result.intensity_axis[i],
         result.values[i, j])
        for i in range(result.intensity_axis.size)
        for j in range(result.detuning_axis.size)
    ]
    write_csv(args.out, _resolved(args, scheme),
              ["detuning_Hz", "intensity_W_cm2", "nonground_population"], rows)
    peak = result.resonant_column().max()
    print(f"dressed map written to {args.out}; resonant-column peak "
          f"nonground population {peak:.3e}")
    return 0


def cmd_suppress(args) -> int:
    scheme = load_scheme(args.scheme)
    intensities = _parse_grid(args.intensities, default_log=True)
    points = suppression_curve(
        scheme, intensities, duration=args.duration, workers=args.workers,
    )
    rows = [
        (p.intensity, p.ratio, p.ratio_with_upper, p.ratio_vs_unprotected,
         p.protected_rate, p.detected_rate, p.upper_rate)
        for p in points
    ]
    write_csv(args.out, _resolved(args, scheme),
              ["intensity_W_cm2", "R", "R_with_upper", "R_vs_unprotected",
               "protected_rate_per_s", "detected_rate_per_s", "upper_rate_per_s"],
              rows)
    print(f"suppression curve written to {args.out}; "
          f"R at {points[-1].intensity:.3g} W/cm2 = {points[-1].ratio:.3e}")
    return 0


def cmd_budget(args) -> int:
    inp = BudgetInput(
        wavelength=args.wavelength, lattice_spacing=args.spacing,
        photons=args.photons, suppression=args.suppression,
        dimensionality=args.dim,
        n_shells=args.shells, error_target=args.error,
    )
    result = max_array(inp) if args.error is not None else total_error(inp)
    if args.out:
        rows = [(i + 1, err) for i, err in enumerate(result.per_shell_errors)]
        write_csv(args.out, _resolved(args), ["shell", "error"], rows)
    if args.error is not None:
        print(f"atoms: {result.atoms}")
    else:
        print(f"total error: {result.total_error:.6e} over {result.n_shells} shells")
    return 0


def cmd_imaging_loop(args) -> int:
    scheme = load_scheme(args.scheme)
    loop = ImagingLoopConfig(
        tau=args.tau, inner_repeats=args.inner, outer_cycles=args.outer,
        pulse_fidelity=args.fidelity,
    )
    report = imaging_loop(scheme, loop)
    if args.out:
        rows = [
            (i + 1, seg["photons"])
            for i, seg in enumerate(report.segments)
        ]
        write_csv(args.out, _resolved(args, scheme),
                  ["segment", "photons"], rows)
    print(
        f"imaging loop: tau {report.tau * 1e6:.2f} us, photons/cycle "
        f"{[round(p, 4) for p in report.photons_per_cycle]}, pumped fraction "
        f"{report.pumped_fraction:.4f}"
    )
    return 0


def cmd_sweep_pol(args) -> int:
    scheme = load_scheme(args.scheme)
    fractions = _parse_grid(args.fractions)
    sweep = polarization_sweep(
        scheme, wrong_q=args.wrong_q, fractions=fractions,
        field=args.field_gauss * GAUSS, beam=args.beam,
        photons_per_detection=args.photons, workers=args.workers,
    )
    rows = list(zip(sweep.x_axis, sweep.error_per_100_photons,
                    sweep.auxiliary["photons"]))
    write_csv(args.out, _resolved(args, scheme),
              ["wrong_fraction", "error_per_100_photons", "photons_in_window"],
              rows)
    print(f"polarization sweep written to {args.out}; error at fraction "
          f"{sweep.x_axis[-1]:.2e} = {sweep.error_per_100_photons[-1]:.3e}")
    return 0


def cmd_sweep_field(args) -> int:
    scheme = load_scheme(args.scheme)
    fields = _parse_grid(args.fields_gauss) * GAUSS
    sweep = field_sweep(
        scheme, b_values=fields, fraction=args.fraction, wrong_q=args.wrong_q,
        photons_per_detection=args.photons, workers=args.workers,
    )
    rows = list(zip(np.asarray(sweep.x_axis) / GAUSS, sweep.error_per_100_photons,
                    sweep.auxiliary["photons"]))
    write_csv(args.out, _resolved(args, scheme),
              ["field_gauss", "error_per_100_photons", "photons_in_window"],
              rows)
    print(f"field sweep written to {args.out}; error at "
          f"{fields[-1] / GAUSS:.1f} G = {sweep.error_per_100_photons[-1]:.3e}")
    return 0


def cmd_scheme3(args) -> int:
    intensities = _parse_grid(args.intensities, default_log=True)
    points = scheme3_analysis(intensities, tau=args.tau, workers=args.workers)
    rows = [(p.intensity, p.r_pi, p.r_sigma, p.leakage_error) for p in points]
    write_csv(args.out, _resolved(args),
              ["intensity_W_cm2", "R_pi", "R_sigma", "leakage_per_100_photons"],
              rows)
    print(f"scheme3 analysis written to {args.out}; saturated R_pi = "
          f"{points[-1].r_pi:.3e}")
    return 0


def cmd_trace(args) -> int:
    from .hamiltonian import build_rwa_hamiltonian
    from .lindblad import DensityMatrix, collapse_operators, evolve

    scheme = load_scheme(args.scheme)
    if args.intensity is not None:
        scheme = scheme.with_protection_intensity(args.intensity)
    reg = scheme.registry
    start = (StateLabel.parse(args.start) if args.start
             else scheme.protected_states[0])
    trace = evolve(
        DensityMatrix.from_state(start, reg), build_rwa_hamiltonian(scheme),
        collapse_operators(reg), reg,
        duration=args.duration, sample_every=args.sample_every,
    )
    tracked = [s for s in (start, scheme.detected_state, *scheme.watch_states)
               if s is not None]
    seen = []
    for s in tracked:
        if s not in seen:
            seen.append(s)
    header = ["time_s", "rate_per_s", "upper_rate_per_s"] + [
        f"pop_{s}" for s in seen
    ]
    rows = [
        (trace.times[k], trace.rates[k], trace.upper_rates[k],
         *(trace.population(s)[k] for s in seen))
        for k in range(trace.times.size)
    ]
    write_csv(args.out, _resolved(args, scheme), header, rows)
    print(f"rate trace written to {args.out}; settled rate "
          f"{trace.rates[-1]:.4e} photons/s")
    return 0


def cmd_mapping_check(args) -> int:
    report = mapping_sequence_check((args.p40, args.p30))
    print("before first detection:",
          {str(s): p for s, p in report.before_first_detection.items()})
    print("after exchange:",
          {str(s): p for s, p in report.after_exchange.items()})
    print("round trip:", {str(a): str(b) for a, b in report.round_trip_map.items()})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sseit",
        description="State-selective EIT protection simulator for cesium arrays",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_out=True):
        p.add_argument("--scheme", default="scheme1",
                       help="preset name (%s) or scheme file path"
                            % ", ".join(sorted(PRESETS)))
        p.add_argument("--workers", type=int, default=default_workers(),
                       help="process count for independent points "
                            "(or set SSEIT_WORKERS)")
        if needs_out:
            p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("dressed-map", help="non-ground population map")
    add_common(p)
    p.add_argument("--target", help="protected state, e.g. 6S1/2:4:0")
    p.add_argument("--detunings", help="detection detuning grid in Hz, lo:hi:N")
    p.add_argument("--intensities", help="intensity grid W/cm2, lo:hi:Nlog")
    p.set_defaults(func=cmd_dressed_map)

    p = sub.add_parser("suppress", help="suppression factor R vs intensity")
    add_common(p)
    p.add_argument("--intensities", default="1e-1:1e4:40log")
    p.add_argument("--duration", type=float, default=3e-6)
    p.set_defaults(func=cmd_suppress)

    p = sub.add_parser("budget", help="rescattering error budget")
    p.add_argument("--dim", type=int, required=True, choices=(2, 3))
    p.add_argument("--spacing", type=float, required=True, help="lattice spacing [m]")
    p.add_argument("--wavelength", type=float, required=True, help="[m]")
    p.add_argument("--photons", type=float, default=100.0)
    p.add_argument("--suppression", type=float, required=True)
    p.add_argument("--error", type=float, help="error target (max-array mode)")
    p.add_argument("--shells", type=int, help="shell count (total-error mode)")
    p.add_argument("--out", help="optional per-shell CSV")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("toy", help="suppression curve for a toy ladder")
    p.add_argument("--levels", type=int, default=3, choices=(3, 4, 5, 6))
    p.add_argument("--intensities", default="1e1:1e4:25log")
    p.add_argument("--duration", type=float, default=3e-6)
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--out", required=True)
    p.set_defaults(func=lambda a: cmd_suppress(
        argparse.Namespace(scheme=f"toy{a.levels}", intensities=a.intensities,
                           duration=a.duration, workers=a.workers, out=a.out)
    ))

    p = sub.add_parser("imaging-loop", help="closed-loop open-transition imaging")
    add_common(p, needs_out=False)
    p.set_defaults(scheme="scheme2")
    p.add_argument("--tau", type=float, help="imaging interval [s]; default auto")
    p.add_argument("--inner", type=int, default=3)
    p.add_argument("--outer", type=int, default=1)
    p.add_argument("--fidelity", type=float, default=1.0)
    p.add_argument("--out", help="optional per-segment CSV")
    p.set_defaults(func=cmd_imaging_loop)

    p = sub.add_parser("sweep-pol", help="wrong-polarization error sweep")
    add_common(p)
    p.set_defaults(scheme="scheme2")
    p.add_argument("--beam", choices=("protection", "detection"),
                   default="protection")
    p.add_argument("--wrong-q", dest="wrong_q", type=int, default=0,
                   choices=(-1, 0, 1))
    p.add_argument("--fractions", default="0,1e-5,1e-4,5e-4,1e-3")
    p.add_argument("--field-gauss", dest="field_gauss", type=float, default=0.0)
    p.add_argument("--photons", type=float, default=100.0)
    p.set_defaults(func=cmd_sweep_pol)

    p = sub.add_parser("sweep-field", help="magnetic-field error sweep")
    add_common(p)
    p.set_defaults(scheme="scheme2")
    p.add_argument("--fraction", type=float, default=5e-4)
    p.add_argument("--wrong-q", dest="wrong_q", type=int, default=0)
    p.add_argument("--fields-gauss", dest="fields_gauss", default="0,5,10,15,20")
    p.add_argument("--photons", type=float, default=100.0)
    p.set_defaults(func=cmd_sweep_field)

    p = sub.add_parser("scheme3", help="forbidden-transition protection analysis")
    p.add_argument("--intensities", default="1e1:1e4:15log")
    p.add_argument("--tau", type=float)
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scheme3)

    p = sub.add_parser("trace", help="scattering-rate trace of one evolution")
    add_common(p)
    p.add_argument("--start", help="initial state, e.g. 6S1/2:4:0 "
                                   "(default: the protected state)")
    p.add_argument("--intensity", type=float,
                   help="protection intensity W/cm2 (default: scheme value)")
    p.add_argument("--duration", type=float, default=3e-6)
    p.add_argument("--sample-every", dest="sample_every", type=float, default=2e-8)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("mapping-check", help="qubit mapping sequence check")
    p.add_argument("--p40", type=float, default=1.0,
                   help="initial population in the |4,0> clock state")
    p.add_argument("--p30", type=float, default=0.0)
    p.set_defaults(func=cmd_mapping_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DomainError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
