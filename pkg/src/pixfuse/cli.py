"""Command-line interface: ``pixfuse fuse | evaluate | table``."""

from __future__ import annotations

import argparse
import os
import sys

from .fusion import FusionError, FusionWeights, fuse_images
from .fuzzy import FuzzyConfigError, default_system, fuse_fuzzy, load_fis
from .ga import FITNESS_MODES, GaConfig, GaConfigError, fuse_ga, write_trace_csv
from .image import PGMError, crop_to_common, load_pgm, save_pgm
from .metrics import MetricInputs, evaluate
from .report import render, report_dict, to_csv, to_json
from .wavelet import WaveletError, get_wavelet

METHODS = ("wavelet-max", "dwt-avg", "dwt-weighted", "dwt-ga", "fuzzy")
TABLE_METHODS = ("wavelet-max", "dwt-ga", "fuzzy")
DEFAULT_SEED = 42

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SIZE = 4


class CliError(Exception):
    def __init__(self, message, status=EXIT_CONFIG):
        super().__init__(message)
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _weights(text):
    try:
        w1, w2 = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected W1,W2, got {text!r}") from None
    return w1, w2


def _add_method_options(p, with_weights=True):
    p.add_argument("--levels", type=int, default=1, help="wavelet decomposition depth (default 1)")
    p.add_argument("--wavelet", default="haar", help="haar (default) or db2")
    if with_weights:
        p.add_argument("--weights", type=_weights, help="W1,W2 for dwt-weighted")
        p.add_argument("--average-details", action="store_true", help="also average detail bands (dwt-avg, dwt-weighted)")
    p.add_argument("--fis", help="fuzzy system config file (fuzzy)")
    g = p.add_argument_group("genetic algorithm (dwt-ga)")
    g.add_argument("--ga-pop", type=int)
    g.add_argument("--ga-generations", type=int)
    g.add_argument("--ga-crossover", type=float)
    g.add_argument("--ga-mutation", type=float)
    g.add_argument("--ga-sigma", type=float)
    g.add_argument("--ga-elitism", type=int)
    g.add_argument("--fitness", choices=FITNESS_MODES)
    g.add_argument("--ga-trace", help="write the per-generation GA trace as CSV")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--reference", help="reference image for IQI/RMSE/PSNR")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = _Parser(prog="pixfuse", description="Fuse registered grayscale images and score the result.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fuse", help="fuse two images")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.add_argument("-o", "--output", required=True, help="fused PGM path")
    p.add_argument("--report", help="report path (default: <output stem>.report.<format>)")
    p.add_argument("--decision-map", help="write the approximation decision map (wavelet-max)")
    p.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    _add_method_options(p)

    p = sub.add_parser("evaluate", help="score a fused image against its inputs")
    p.add_argument("fused")
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.add_argument("--reference")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output", help="report path (default: stdout)")

    p = sub.add_parser("table", help="run wavelet-max, dwt-ga and fuzzy on one pair")
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.add_argument("-o", "--output", help="report path (default: stdout)")
    p.add_argument("--save-dir", help="also write each fused image here")
    _add_method_options(p, with_weights=False)
    return parser


_GA_FLAGS = ("ga_pop", "ga_generations", "ga_crossover", "ga_mutation", "ga_sigma", "ga_elitism", "fitness", "ga_trace")


def _validate(args):
    method = getattr(args, "method", None)
    if args.command == "fuse":
        if args.weights is not None and method != "dwt-weighted":
            raise CliError("--weights only applies to --method dwt-weighted")
        if method == "dwt-weighted" and args.weights is None:
            raise CliError("--method dwt-weighted needs --weights W1,W2")
        if method != "dwt-ga" and any(getattr(args, f) is not None for f in _GA_FLAGS):
            raise CliError("GA options only apply to --method dwt-ga")
        if args.fis is not None and method != "fuzzy":
            raise CliError("--fis only applies to --method fuzzy")
        if args.decision_map is not None and method != "wavelet-max":
            raise CliError("--decision-map only applies to --method wavelet-max")
        if args.average_details and method not in ("dwt-avg", "dwt-weighted"):
            raise CliError("--average-details only applies to dwt-avg and dwt-weighted")
    if args.command in ("fuse", "table"):
        if args.levels < 1:
            raise CliError("--levels must be >= 1")
        try:
            args.spec = get_wavelet(args.wavelet)
        except WaveletError as exc:
            raise CliError(str(exc)) from None
        if getattr(args, "weights", None) is not None:
            try:
                args.fusion_weights = FusionWeights(*args.weights)
            except FusionError as exc:
                raise CliError(str(exc)) from None
        if args.fitness == "ref-iqi" and args.reference is None:
            raise CliError("--fitness ref-iqi needs --reference")
        args.ga = _ga_config(args)


def _ga_config(args):
    kw = {"rng_seed": args.seed}
    for flag, field in (
        ("ga_pop", "population_size"),
        ("ga_generations", "generations"),
        ("ga_crossover", "crossover_rate"),
        ("ga_mutation", "mutation_rate"),
        ("ga_sigma", "mutation_sigma"),
        ("ga_elitism", "elitism_count"),
    ):
        value = getattr(args, flag)
        if value is not None:
            kw[field] = value
    try:
        return GaConfig(**kw)
    except GaConfigError as exc:
        raise CliError(str(exc)) from None


def _load(path):
    try:
        return load_pgm(path)
    except FileNotFoundError:
        raise CliError(f"cannot read {path}: no such file", EXIT_IO) from None
    except (OSError, PGMError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def _save(img, path, binary=True):
    try:
        save_pgm(img, path, binary=binary)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def _fuse(method, a, b, args, reference=None, trace=None):
    """Returns (fused image, extra report fields, decision map or None)."""
    if method == "fuzzy":
        system = default_system()
        if args.fis:
            try:
                system = load_fis(args.fis)
            except FileNotFoundError:
                raise CliError(f"cannot read {args.fis}: no such file", EXIT_IO) from None
            except FuzzyConfigError as exc:
                raise CliError(f"{args.fis}: {exc}") from None
        return fuse_fuzzy(a, b, system), {}, None
    if method == "dwt-ga":
        fused, w = fuse_ga(
            a, b, args.ga, args.fitness or "entropy",
            reference=reference, levels=args.levels, spec=args.spec, trace=trace,
        )
        return fused, {"weights": [w.w1, w.w2], "seed": args.seed}, None
    weights = getattr(args, "fusion_weights", None)
    result = fuse_images(
        a, b, method, levels=args.levels, spec=args.spec,
        weights=weights, average_details=getattr(args, "average_details", False),
    )
    extra = {"weights": [weights.w1, weights.w2]} if weights else {}
    return result.image, extra, result.decision_map


def _inputs(args):
    a = _load(args.input_a)
    b = _load(args.input_b)
    ref = _load(args.reference) if args.reference else None
    a, b = crop_to_common(a, b)
    if ref is not None:
        ref, a = crop_to_common(ref, a)
        b, _ = crop_to_common(b, a)
    if min(a.shape) < 2 ** args.levels:
        raise CliError(f"common size {a.width}x{a.height} too small for {args.levels} wavelet levels", EXIT_SIZE)
    return a, b, ref


def cmd_fuse(args):
    a, b, ref = _inputs(args)
    trace = [] if args.ga_trace else None
    fused, extra, dmap = _fuse(args.method, a, b, args, ref, trace)
    _save(fused, args.output, binary=not args.ascii)
    if dmap is not None and args.decision_map:
        _save(dmap.approx_image(), args.decision_map)
    if trace is not None:
        try:
            write_trace_csv(trace, args.ga_trace)
        except OSError as exc:
            raise CliError(f"cannot write {args.ga_trace}: {exc.strerror or exc}", EXIT_IO) from None
    report = evaluate(MetricInputs(fused, a, b, ref))
    paths = {"a": args.input_a, "b": args.input_b, "fused": args.output, "reference": args.reference}
    text = render([report_dict(report, args.method, paths, extra)], args.format)
    report_path = args.report or f"{os.path.splitext(args.output)[0]}.report.{args.format}"
    _write_text(report_path, text)
    print(report_path)
    return 0


def cmd_evaluate(args):
    fused = _load(args.fused)
    a = _load(args.input_a)
    b = _load(args.input_b)
    ref = _load(args.reference) if args.reference else None
    report = evaluate(MetricInputs(fused, a, b, ref))
    paths = {"a": args.input_a, "b": args.input_b, "fused": args.fused, "reference": args.reference}
    text = render([report_dict(report, None, paths)], args.format)
    if args.output:
        _write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_table(args):
    a, b, ref = _inputs(args)
    entries = []
    for method in TABLE_METHODS:
        fused, extra, _ = _fuse(method, a, b, args, ref)
        if args.save_dir:
            _save(fused, os.path.join(args.save_dir, f"{method}.pgm"))
        report = evaluate(MetricInputs(fused, a, b, ref))
        paths = {"a": args.input_a, "b": args.input_b, "reference": args.reference}
        entries.append(report_dict(report, method, paths, extra))
    text = to_csv(entries) if args.format == "csv" else to_json(entries)
    if args.output:
        _write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"fuse": cmd_fuse, "evaluate": cmd_evaluate, "table": cmd_table}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status
    except (FusionError, WaveletError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE


if __name__ == "__main__":
    sys.exit(main())
