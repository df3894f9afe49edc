import argparse
import logging
import sys
from pathlib import Path

import numpy as np
import scipy.linalg

from oplab.config import EXIT_FAILURE, EXIT_USAGE, EXIT_CONFIG, build_config, \
    read_config_file
from oplab.doi import duhamel_difference
from oplab.experiments import estimate_lipschitz_constant, truncation_growth_study, \
    multiplier_bound_study, growth_signature
from oplab.io import write_json, write_fourier_weight, write_report, report, format_float, \
    timestamp_line
from oplab.kernels import function_catalog, build_cutoff, fourier_weight, reconstruction_errors, \
    ratio_grid, moment
from oplab.spectra import schatten_norm, random_hermitian
from oplab.utils import ConfigException, FourierGridException, LabException, spawn_seeds
from oplab.verify import run_suites, DEFAULT_SUITES, SUITES


_log = logging.getLogger(__name__)


def _csv_list(value):
    return [v for v in value.replace(" ", "").split(",") if v]


def _int_list(value):
    try:
        return [int(v) for v in _csv_list(value)]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers, got {!r}".format(value))


def _float_list(value):
    try:
        return [float(v) for v in _csv_list(value)]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers, got {!r}".format(value))


def _common(parser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--out-dir", dest="out_dir", help="output directory (default $OUT_DIR "
                                                          "or ./oplab-out)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--dims", type=_int_list, help="comma-separated dimensions")
    parser.add_argument("--alpha", type=_csv_list,
                        help="comma-separated Schatten indices, e.g. 1,4/3,2,inf")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--steps", type=int, help="ascent moves per start")
    parser.add_argument("--no-timestamp", dest="timestamp", action="store_false", default=None,
                        help="omit timestamps so that repeated runs are byte-identical")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--quiet", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="oplab", description="Numerical experiments on operator Lipschitz estimates")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("verify", help="run the verification suites")
    _common(p)
    p.add_argument("--suite", action="append", choices=sorted(SUITES),
                   help="run only these suites (repeatable); growth is never run by default")

    p = sub.add_parser("estimate", help="estimate Lipschitz or multiplier constants")
    _common(p)
    p.add_argument("--f", type=_csv_list, help="catalog functions: " +
                   ", ".join(function_catalog.sorted()))
    p.add_argument("--kind", choices=("lipschitz", "multiplier"))

    p = sub.add_parser("decompose", help="tabulate the Fourier weight g")
    _common(p)
    p.add_argument("--ds", type=float)
    p.add_argument("--smax", type=float)
    p.add_argument("--sharpness", type=float)

    p = sub.add_parser("growth", help="triangular truncation study")
    _common(p)
    p.add_argument("--kind", choices=("lipschitz", "multiplier"),
                   help="multiplier adds divided-difference multipliers of random profiles")

    p = sub.add_parser("duhamel", help="quadrature convergence of e^{irA} - e^{irB}")
    _common(p)
    p.add_argument("--r", type=_float_list, help="comma-separated r values")
    p.add_argument("--t-steps", dest="t_steps", type=_int_list)
    return parser


FLAG_KEYS = ("out_dir", "seed", "trials", "dims", "alpha", "threads", "steps", "timestamp",
             "f", "kind", "ds", "smax", "sharpness", "r", "t_steps")


def _flag_values(args):
    return {key: getattr(args, key, None) for key in FLAG_KEYS}


def _configure_logging(args):
    if args.quiet:
        level = logging.WARNING
    elif args.verbose >= 2:
        level = logging.DEBUG
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _safe(text):
    return str(text).replace("/", "_")


def _write_records(config, records):
    out = Path(config.out_dir) / "records"
    out.mkdir(parents=True, exist_ok=True)
    for r in records:
        name = "{}-{}-a{}-d{}.json".format(r.kind, _safe(r.function), _safe(r.alpha), r.dim)
        write_json(out / name, r.to_json())


def _write_report(config, records, name):
    for kind in sorted(set(r.kind for r in records)):
        group = [r for r in records if r.kind == kind]
        suffix = name if len(set(r.kind for r in records)) == 1 else "{}-{}".format(name, kind)
        rep = report(group, timestamp=config.timestamp)
        write_report(config.out_dir, suffix, rep)
        for line in rep.summary.splitlines():
            _log.info(line)


def run_verify(config, args):
    names = tuple(args.suite) if getattr(args, "suite", None) else DEFAULT_SUITES
    result = run_suites(config, names)
    write_json(Path(config.out_dir) / "verify.json", result.to_json())
    if result.passed:
        _log.info("verify: all %d suites passed", len(result.results))
        return 0
    _log.error("verify: %d failed checks", result.failures)
    return EXIT_FAILURE


def run_estimate(config, args):
    h = config.config_hash()
    records = []
    for alpha in config.alphas:
        for dim in config.dims:
            if config.kind == "multiplier":
                records.append(multiplier_bound_study("random", alpha, dim, config.trials,
                                                      config.seed, config.steps, config.threads,
                                                      config_hash=h, timed=config.timestamp))
                continue
            for name in config.functions:
                f = function_catalog.create(name, config.seed)
                records.append(estimate_lipschitz_constant(f, alpha, dim, config.trials,
                                                           config.seed, config.steps,
                                                           config.threads, config_hash=h,
                                                           timed=config.timestamp))
    _write_records(config, records)
    _write_report(config, records, "estimate")
    return 0


def run_decompose(config, args):
    grid = config.grid
    g = fourier_weight(build_cutoff(grid["sharpness"]), grid["ds"], grid["smax"])
    errors = reconstruction_errors(g, *ratio_grid())
    moments = [moment(g, n) for n in range(4)]
    out = Path(config.out_dir)
    write_fourier_weight(out / "fourier_weight.csv", g, timestamp=config.timestamp)
    summary = {
        "ds": g.ds, "smax": g.smax, "sharpness": grid["sharpness"],
        "integral": [g.integral().real, g.integral().imag],
        "max_reconstruction_error": float(np.max(errors)),
        "tail_estimate": float(g.tail_estimate),
        "conjugate_symmetry_defect": g.conjugate_symmetry_defect(),
        "moments": moments,
    }
    write_json(out / "decompose.json", summary)
    _log.info("decompose: %d samples, max reconstruction error %.3g",
              len(g.s), summary["max_reconstruction_error"])
    return 0


def run_growth(config, args):
    h = config.config_hash()
    records = []
    for alpha in config.alphas:
        group = truncation_growth_study(alpha, config.dims, config.trials, config.seed,
                                        config.steps, config.threads, config_hash=h,
                                        timed=config.timestamp)
        ratio, grows = growth_signature(group, config.tolerances["band"])
        _log.info("truncation alpha=%s: largest/smallest %.4g (%s)", alpha, ratio,
                  "grows" if grows else "flat")
        records.extend(group)
        if config.kind == "multiplier":
            records.extend(multiplier_bound_study("random", alpha, dim, config.trials,
                                                  config.seed, config.steps, config.threads,
                                                  config_hash=h, timed=config.timestamp)
                           for dim in config.dims)
    _write_records(config, records)
    _write_report(config, records, "growth")
    return 0


def duhamel_rows(config):
    """(dim, r, t_steps, error, bound_ok) for one seeded pair per dimension."""
    rows = []
    seeds = spawn_seeds(config.seed, len(config.dims))
    for dim, seed in zip(config.dims, seeds):
        rng = np.random.default_rng(seed)
        A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
        gap = schatten_norm(A - B, np.inf)
        for r in config.r_values:
            direct = scipy.linalg.expm(1j * r * A.entries) - scipy.linalg.expm(1j * r * B.entries)
            bound_ok = schatten_norm(direct, np.inf) <= abs(r) * gap + config.tolerances["duhamel"]
            for steps in config.t_steps:
                error = schatten_norm(duhamel_difference(A, B, r, steps) - direct, np.inf)
                rows.append((dim, r, steps, error, bound_ok))
    return rows


def run_duhamel(config, args):
    lines = []
    if config.timestamp:
        lines.append(timestamp_line())
    lines.append("dim,r,t_steps,error,bound_ok")
    rows = duhamel_rows(config)
    for dim, r, steps, error, bound_ok in rows:
        lines.append("{},{},{},{},{}".format(dim, format_float(r), steps, format_float(error),
                                             int(bound_ok)))
    path = Path(config.out_dir) / "duhamel.csv"
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    _log.info("wrote %s", path)
    return 0


RUNNERS = {
    "verify": run_verify,
    "estimate": run_estimate,
    "decompose": run_decompose,
    "growth": run_growth,
    "duhamel": run_duhamel,
}


def run(config, args=None):
    """Dispatch a validated config; returns the exit status."""
    write_json(Path(config.out_dir) / "config.json", config.to_json())
    return RUNNERS[config.command](config, args or argparse.Namespace())


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return ex.code if ex.code == 0 else EXIT_USAGE
    _configure_logging(args)
    try:
        file_values = read_config_file(args.config) if args.config else {}
        config = build_config(args.command, file_values, _flag_values(args))
    except ConfigException as ex:
        _log.error(ex.message())
        return ex.exit_code
    try:
        return run(config, args)
    except FourierGridException as ex:
        _log.error("%s (suggested smax=%g, ds=%g)", ex.message(), ex.suggested_smax,
                   ex.suggested_ds)
        return EXIT_CONFIG
    except (LabException, KeyError) as ex:
        _log.error("%s", ex.message() if isinstance(ex, LabException) else ex)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
