"""Command-line front end.

Subcommands: generate, spectrum, filter, decompose, experiment. Every CSV
output gets a JSON manifest written beside it (same path plus
".manifest.json") recording the command, parameters, seeds, library
version and input digests, enough to reproduce the file bitwise.

Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .complexes import NgfConfig, SimplicialComplex, dump_complex, load_complex, ngf_generate, simplex_labels
from .errors import FormatError, NumericalError
from .experiments import (
    DEFAULT_Z_VALUES,
    ExperimentConfig,
    NOISE_KINDS,
    THREADS_ENV_VAR,
    default_gamma_grid,
    run_experiment,
    write_error_curve,
)
from .filters import FilterSpec, apply_filter
from .operators import assemble_dirac
from .spectral import compute_basis, decompose_signal, write_spectrum_csv

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {value}")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        items = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not items:
        raise argparse.ArgumentTypeError("expected at least one value")
    return items


def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out_path: str | Path, command: str, parameters: dict,
                    seeds: dict | None = None, inputs: tuple = (),
                    results: dict | None = None) -> None:
    doc = {
        "command": command,
        "version": __version__,
        "parameters": parameters,
        "seeds": seeds or {},
        "inputs": {str(p): _sha256(p) for p in inputs},
    }
    if results:
        doc["results"] = results
    manifest_path = Path(str(out_path) + ".manifest.json")
    manifest_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- signal files --------------------------------------------------------------
#
# CSV with header `simplex,value`; the simplex column uses the labels
# v{i}, e{u}-{v}, t{u}-{v}-{w} in the complex's canonical order. Missing
# simplices read as 0; unknown or repeated ones are rejected.

def _read_signal(path: str | Path, complex: SimplicialComplex) -> np.ndarray:
    labels = simplex_labels(complex)
    index = {label: i for i, label in enumerate(labels)}
    values = np.zeros(len(labels))
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError("empty signal file")
        if [h.strip() for h in header] != ["simplex", "value"]:
            raise FormatError(f"expected header simplex,value, got {','.join(header)!r}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise FormatError(f"expected 2 fields, got {len(row)}", lineno)
            name = row[0].strip()
            if name not in index:
                raise FormatError(f"{name!r} is not a simplex of the complex", lineno)
            if name in seen:
                raise FormatError(f"duplicate simplex {name!r}", lineno)
            try:
                value = float(row[1])
            except ValueError:
                raise FormatError(f"could not parse value {row[1]!r}", lineno) from None
            if not np.isfinite(value):
                raise FormatError(f"non-finite value for {name!r}", lineno)
            seen.add(name)
            values[index[name]] = value
    return values


def _write_signal(path: str | Path, complex: SimplicialComplex, vector: np.ndarray) -> None:
    if not np.isfinite(vector).all():
        raise NumericalError("non-finite values in output signal")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["simplex", "value"])
        for label, value in zip(simplex_labels(complex), vector):
            writer.writerow([label, "%.12g" % value])


# -- subcommands ---------------------------------------------------------------

def _cmd_generate(args) -> int:
    complex = ngf_generate(NgfConfig(target_triangles=args.triangles, seed=args.seed))
    dump_complex(complex, args.out)
    print(f"N={complex.num_vertices} E={complex.num_edges} T={complex.num_triangles}")
    return 0


def _cmd_spectrum(args) -> int:
    complex = load_complex(args.complex)
    op = assemble_dirac(complex, normalization=args.normalization)
    basis = compute_basis(op)
    rows = write_spectrum_csv(basis, complex, args.out)
    _write_manifest(args.out, "spectrum",
                    {"complex": str(args.complex), "normalization": args.normalization,
                     "out": str(args.out)},
                    inputs=(args.complex,))
    print(f"wrote {rows} eigenpairs to {args.out}")
    return 0


def _cmd_filter(args) -> int:
    if not abs(args.z) < 1:
        raise _UsageError(f"--z must satisfy |z| < 1, got {args.z}")
    if args.gamma < 0:
        raise _UsageError(f"--gamma must be >= 0, got {args.gamma}")
    complex = load_complex(args.complex)
    signal = _read_signal(args.signal, complex)
    op = assemble_dirac(complex, normalization="spectral")
    result = apply_filter(op, FilterSpec(variant=args.variant, z=args.z, gamma=args.gamma), signal)
    _write_signal(args.out, complex, result.s_hat.to_vector())
    _write_manifest(args.out, "filter",
                    {"complex": str(args.complex), "signal": str(args.signal),
                     "variant": args.variant, "z": args.z, "gamma": args.gamma,
                     "normalization": "spectral", "out": str(args.out)},
                    inputs=(args.complex, args.signal),
                    results={"solve_residual": result.solve_residual})
    print(f"solve residual {result.solve_residual:.3e}")
    return 0


def _cmd_decompose(args) -> int:
    complex = load_complex(args.complex)
    signal = _read_signal(args.signal, complex)
    op = assemble_dirac(complex, normalization=args.normalization)
    basis = compute_basis(op)
    parts = decompose_signal(basis, signal)
    s1 = parts.s1.to_vector()
    s2 = parts.s2.to_vector()
    s_harm = parts.s_harm.to_vector()
    if not (np.isfinite(s1).all() and np.isfinite(s2).all() and np.isfinite(s_harm).all()):
        raise NumericalError("non-finite values in decomposition")
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["simplex", "s1", "s2", "s_harm"])
        for label, a, b, c in zip(simplex_labels(complex), s1, s2, s_harm):
            writer.writerow([label, "%.12g" % a, "%.12g" % b, "%.12g" % c])
    _write_manifest(args.out, "decompose",
                    {"complex": str(args.complex), "signal": str(args.signal),
                     "normalization": args.normalization, "out": str(args.out)},
                    inputs=(args.complex, args.signal))
    print("component norms: s1=%.6g s2=%.6g s_harm=%.6g"
          % (np.linalg.norm(s1), np.linalg.norm(s2), np.linalg.norm(s_harm)))
    return 0


def _cmd_experiment(args) -> int:
    if args.complex is not None:
        complex = load_complex(args.complex)
        inputs: tuple = (args.complex,)
    else:
        complex = ngf_generate(NgfConfig(target_triangles=args.triangles, seed=args.ngf_seed))
        inputs = ()
    gamma_grid = args.gamma_grid if args.gamma_grid is not None else tuple(default_gamma_grid())
    config = ExperimentConfig(
        variant=args.variant, noise_kind=args.noise, gamma_grid=gamma_grid,
        z_values=args.z_list, realizations=args.realizations, master_seed=args.seed)
    curve = run_experiment(complex, config)
    write_error_curve(curve, args.out)
    _write_manifest(args.out, "experiment",
                    {"complex": str(args.complex) if args.complex else None,
                     "triangles": args.triangles, "variant": args.variant,
                     "noise": args.noise, "z_list": list(config.z_values),
                     "gamma_grid": list(config.gamma_grid),
                     "realizations": args.realizations, "out": str(args.out)},
                    seeds={"master_seed": args.seed, "ngf_seed": args.ngf_seed},
                    inputs=inputs)
    for zi, z in enumerate(config.z_values):
        print("z=%g: min mean_delta %.6g" % (z, curve.mean[zi].min()))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="diracsp",
        description="Signal processing on 2-dimensional simplicial complexes.",
        epilog=f"Set {THREADS_ENV_VAR} to parallelize experiment sweeps; results are "
               "bitwise identical for any thread count.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="grow a synthetic complex and write it to a file")
    p.add_argument("--triangles", type=_positive_int, required=True,
                   help="number of triangles to grow")
    p.add_argument("--seed", type=_seed_int, default=0, help="generator seed")
    p.add_argument("--out", required=True, help="output complex file")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("spectrum", help="write all eigenpairs of a complex as CSV")
    p.add_argument("--complex", required=True, help="complex file")
    p.add_argument("--normalization", choices=("spectral", "none"), default="spectral")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("filter", help="apply an IIR filter to a signal file")
    p.add_argument("--complex", required=True, help="complex file")
    p.add_argument("--signal", required=True, help="signal CSV (simplex,value)")
    p.add_argument("--variant", type=int, choices=(1, 2), default=1)
    p.add_argument("--z", type=float, required=True, help="coupling in (-1, 1)")
    p.add_argument("--gamma", type=float, required=True, help="filter strength >= 0")
    p.add_argument("--out", required=True, help="output signal CSV")
    p.set_defaults(handler=_cmd_filter)

    p = sub.add_parser("decompose", help="split a signal into s1/s2/s_harm components")
    p.add_argument("--complex", required=True, help="complex file")
    p.add_argument("--signal", required=True, help="signal CSV (simplex,value)")
    p.add_argument("--normalization", choices=("spectral", "none"), default="spectral")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("experiment", help="run a denoising sweep and write the error curve")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--complex", help="complex file")
    source.add_argument("--triangles", type=_positive_int, help="generate a complex of this size")
    p.add_argument("--ngf-seed", type=_seed_int, default=0, help="seed for --triangles generation")
    p.add_argument("--variant", type=int, choices=(1, 2), default=1)
    p.add_argument("--noise", choices=NOISE_KINDS, default="opposite_symmetry")
    p.add_argument("--z-list", type=_float_list, default=DEFAULT_Z_VALUES,
                   help="comma-separated z values (use --z-list=-0.95,0,0.95 for negatives)")
    p.add_argument("--gamma-grid", type=_float_list, default=None,
                   help="comma-separated gamma values; default is 40 log-spaced in [1e-2, 1e2]")
    p.add_argument("--realizations", type=_positive_int, default=50)
    p.add_argument("--seed", type=_seed_int, default=0, help="master seed for noise draws")
    p.add_argument("--out", required=True, help="output error-curve CSV")
    p.set_defaults(handler=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        # Pin BLAS pools for the whole command so outputs do not depend on
        # the ambient thread configuration; experiment sweeps parallelize
        # over independent grid cells instead.
        with threadpool_limits(limits=1):
            return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
