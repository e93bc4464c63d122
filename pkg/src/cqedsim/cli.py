"""Command-line front end.

Subcommands: stark-amp, stark-detuning, chevron, beamsplit, calibrate,
validate, dump-terms. Every sweep writes one CSV, a JSON metadata sidecar
and an atomic run manifest. Exit codes: 0 success, 2 validation error,
3 numeric failure, 64 usage error.
"""

import argparse
import json
import sys
import time
from dataclasses import replace

from . import __version__
from .errors import (
    CalibrationError,
    DegenerateDriveError,
    DimensionError,
    FrameError,
    LowOverlapError,
    ParseError,
    PhaseUnwrapError,
    StepSizeUnderflowError,
    ToleranceError,
    ValidationError,
)
from .experiments import (
    calibrate_nu_corr,
    run_beamsplit_map,
    run_stark_amplitude_sweep,
    run_stark_detuning_sweep,
    run_tms_chevron,
    run_validation,
)
from .hamiltonian import (
    build_diag,
    build_early_rwa,
    build_h1,
    build_h2,
    build_late_rwa,
    build_oracle,
)
from .displacement import build_xi_set
from .model import DriveTone, load_config, validate_tone
from .sweepio import manifest_for, write_manifest, write_meta_json, write_sweep_csv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64

_VALIDATION_ERRORS = (ValidationError, ParseError)
_NUMERIC_ERRORS = (
    StepSizeUnderflowError, ToleranceError, CalibrationError, FrameError,
    PhaseUnwrapError, LowOverlapError, DimensionError, DegenerateDriveError,
    OSError,
)


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(text):
    """'start:stop:count' -> list of floats (inclusive linspace)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid spec {text!r} is not start:stop:count")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r}: {exc}") from exc
    if count < 1:
        raise UsageError("grid count must be >= 1")
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def _build_parser():
    parser = Parser(prog="cqedsim",
                    description="Driven transmon-cavity simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="config JSON path")
        return p

    p = add("stark-amp", "Stark shift vs drive amplitude (Fig. 1 style)")
    p.add_argument("--target", choices=["qubit", "cavity"])
    p.add_argument("--eps", metavar="S:E:N", help="amplitude grid, MHz")
    p.add_argument("--detuning", type=float, help="drive detuning, MHz")
    p.add_argument("--models", help="comma list: late,late_no_h2,early")
    p.add_argument("--out", required=True)

    p = add("stark-detuning", "Stark shift vs detuning (Fig. 2 style)")
    p.add_argument("--eps-q", type=float, help="qubit amplitude, MHz")
    p.add_argument("--delta", metavar="S:E:N", help="detuning grid, MHz")
    p.add_argument("--guard", type=float, help="guard band around 0, MHz")
    p.add_argument("--models")
    p.add_argument("--out", required=True)

    p = add("chevron", "two-mode-squeezing chevron (Fig. 3 style)")
    p.add_argument("--n", type=int, help="photon index of the transition")
    p.add_argument("--delta", type=float, help="two-mode detuning, MHz")
    p.add_argument("--eps-q", metavar="S:E:N", help="qubit amplitude grid")
    p.add_argument("--eps-c", metavar="S:E:N", help="cavity amplitude grid")
    p.add_argument("--tau", type=float, help="gate time, us")
    p.add_argument("--models")
    p.add_argument("--out", required=True)

    p = add("beamsplit", "beam-splitting map (Fig. 4 style)")
    p.add_argument("--delta", type=float, help="matched detuning, MHz")
    p.add_argument("--eps-q", type=float)
    p.add_argument("--eps-c", type=float)
    p.add_argument("--tau", metavar="S:E:N", help="gate-time axis, us")
    p.add_argument("--offset", metavar="S:E:N", help="drive offset axis, MHz")
    p.add_argument("--nu-corr", type=float,
                   help="skip calibration, use this correction (MHz)")
    p.add_argument("--out", required=True)

    p = add("calibrate", "calibrate the beam-splitting frequency correction")
    p.add_argument("--delta", type=float)
    p.add_argument("--eps-q", type=float)
    p.add_argument("--eps-c", type=float)
    p.add_argument("--tau-cal", type=float, help="calibration gate time, us")
    p.add_argument("--scan", metavar="S:E:N", help="offset scan grid, MHz")
    p.add_argument("--out", help="optional JSON report path")

    p = add("validate", "cross-check effective models against the oracle")
    p.add_argument("--eps-q", type=float, help="qubit amplitude, MHz")
    p.add_argument("--delta-q", type=float, help="qubit detuning, MHz")
    p.add_argument("--duration", type=float, help="oracle window, us")
    p.add_argument("--dt-max-ps", type=float, help="oracle step cap, ps")
    p.add_argument("--out", help="optional JSON report path")

    p = add("dump-terms", "print the term list of a Hamiltonian builder")
    p.add_argument("--model", default="late",
                   choices=["late", "late_no_h2", "early", "oracle",
                            "diag", "h1", "h2"])
    p.add_argument("--eps-q", type=float)
    p.add_argument("--delta-q", type=float)
    p.add_argument("--eps-c", type=float)
    p.add_argument("--delta-c", type=float)
    return parser


def _load(path):
    with open(path) as fh:
        return load_config(fh.read())


def _experiment_overrides(cfg, updates, axes_updates):
    block = dict(cfg.experiment or {})
    axes = dict(block.get("axes") or {})
    for key, value in updates.items():
        if value is not None:
            block[key] = value
    for key, value in axes_updates.items():
        if value is not None:
            axes[key] = tuple(parse_grid(value))
    if axes:
        block["axes"] = axes
    return replace(cfg, experiment=block)


def _progress(stream, label):
    def fn(done, total):
        print(f"{label}: {done}/{total}", file=stream)
        stream.flush()
    return fn


def _models_list(text):
    return [m.strip() for m in text.split(",") if m.strip()] if text else None


def _write_outputs(result, out_path, command, config_path, started_at):
    meta_path = (out_path[:-4] if out_path.endswith(".csv") else out_path) \
        + ".meta.json"
    write_sweep_csv(result, out_path)
    write_meta_json(result, meta_path)
    finished_at = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    manifest = manifest_for(command, config_path, [out_path, meta_path],
                            started_at, finished_at)
    write_manifest(manifest, out_path + ".manifest.json")
    return [out_path, meta_path]


def _tones_from_args(cfg, args):
    overrides = [
        ("qubit", args.eps_q, args.delta_q),
        ("cavity", args.eps_c, args.delta_c),
    ]
    if all(eps is None for _, eps, _ in overrides):
        return cfg.drives
    tones = []
    for target, eps, det in overrides:
        if eps is None:
            continue
        if det is None:
            raise UsageError(f"--eps-{target[0]} requires --delta-{target[0]}")
        tones.append(validate_tone(DriveTone(target, eps, det), cfg.system))
    return tuple(tones)


def _run_command(args, err):
    started_at = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    command = args.command
    cfg = _load(args.config)

    if command == "stark-amp":
        cfg = _experiment_overrides(cfg, {
            "kind": "stark_amp",
            "target": args.target,
            "detuning_MHz": args.detuning,
            "models": _models_list(args.models),
        }, {"eps_MHz": args.eps})
        result = run_stark_amplitude_sweep(cfg, progress=_progress(err, "row"))
        _write_outputs(result, args.out, command, args.config, started_at)
        return EXIT_OK

    if command == "stark-detuning":
        cfg = _experiment_overrides(cfg, {
            "kind": "stark_detuning",
            "eps_q_MHz": args.eps_q,
            "guard_MHz": args.guard,
            "models": _models_list(args.models),
        }, {"delta_q_MHz": args.delta})
        result = run_stark_detuning_sweep(cfg, progress=_progress(err, "row"))
        _write_outputs(result, args.out, command, args.config, started_at)
        return EXIT_OK

    if command == "chevron":
        cfg = _experiment_overrides(cfg, {
            "kind": "chevron",
            "photon_index": args.n,
            "delta_MHz": args.delta,
            "gate_time_us": args.tau,
            "models": _models_list(args.models),
        }, {"eps_q_MHz": args.eps_q, "eps_c_MHz": args.eps_c})
        result = run_tms_chevron(cfg, progress=_progress(err, "row"))
        _write_outputs(result, args.out, command, args.config, started_at)
        return EXIT_OK

    if command == "beamsplit":
        cfg = _experiment_overrides(cfg, {
            "kind": "beamsplit",
            "delta_MHz": args.delta,
            "eps_q_MHz": args.eps_q,
            "eps_c_MHz": args.eps_c,
            "nu_corr_MHz": args.nu_corr,
        }, {"tau_us": args.tau, "offset_MHz": args.offset})
        result = run_beamsplit_map(cfg, progress=_progress(err, "column"))
        _write_outputs(result, args.out, command, args.config, started_at)
        return EXIT_OK

    if command == "calibrate":
        cfg = _experiment_overrides(cfg, {
            "kind": "calibrate",
            "delta_MHz": args.delta,
            "eps_q_MHz": args.eps_q,
            "eps_c_MHz": args.eps_c,
            "tau_cal_us": args.tau_cal,
        }, {"scan_MHz": args.scan})
        nu_corr, details = calibrate_nu_corr(cfg, progress=_progress(err, "scan"))
        report = {"nu_corr_MHz": nu_corr, **details}
        print(f"nu_corr = {nu_corr:+.6f} MHz "
              f"(device reference {details['nu_corr_reference_MHz']:+.2f} MHz)")
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
        return EXIT_OK

    if command == "validate":
        cfg = _experiment_overrides(cfg, {
            "kind": "calibrate",
            "eps_q_MHz": args.eps_q,
            "detuning_MHz": args.delta_q,
            "gate_time_us": args.duration,
            "dt_max_ps": args.dt_max_ps,
        }, {})
        report = run_validation(cfg, progress=_progress(err, "oracle run"))
        spectral = report["spectral_shift_MHz"]
        print(f"qubit drive: eps = {report['eps_q_MHz']} MHz, "
              f"detuning = {report['detuning_MHz']} MHz")
        for model in ("late", "late_no_h2", "early"):
            print(f"  spectral shift [{model:10s}] = {spectral[model]:+.6f} MHz")
        print(f"  oracle baseline offset      = "
              f"{report['oracle_baseline_offset_MHz']:+.6f} MHz")
        print(f"  oracle phase-slope shift    = "
              f"{report['oracle_shift_MHz']:+.6f} MHz")
        print(f"  |late - oracle| / |late|    = "
              f"{report['late_vs_oracle_rel'] * 100:.2f}%")
        print(f"  early model sign differs    = "
              f"{report['early_sign_differs']}")
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
        return EXIT_OK

    if command == "dump-terms":
        tones = _tones_from_args(cfg, args)
        xi = build_xi_set(cfg.system, tones)
        builders = {
            "late": lambda: build_late_rwa(cfg.system, tones, cfg.hilbert),
            "late_no_h2": lambda: build_late_rwa(cfg.system, tones,
                                                 cfg.hilbert, include_h2=False),
            "early": lambda: build_early_rwa(cfg.system, tones, cfg.hilbert),
            "oracle": lambda: build_oracle(cfg.system, tones, cfg.hilbert),
            "diag": lambda: build_diag(cfg.system, xi, cfg.hilbert),
            "h1": lambda: build_h1(cfg.system, xi, cfg.hilbert),
            "h2": lambda: build_h2(cfg.system, xi, cfg.hilbert),
        }
        spec = builders[args.model]()
        print(f"# model={args.model} terms={len(spec.terms)} "
              f"frame={spec.frame}")
        for line in spec.dump_lines():
            print(line)
        return EXIT_OK

    raise UsageError("no command given")


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("no command given")
        return _run_command(args, sys.stderr)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except _VALIDATION_ERRORS as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
