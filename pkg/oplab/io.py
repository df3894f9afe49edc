import datetime
import json
import logging
from pathlib import Path

import bottleneck as bn
import numpy as np

from oplab.spectra import SchattenIndex
from oplab.utils import EmptyInputException, MixedKindsException


_log = logging.getLogger(__name__)


FLOAT_FORMAT = "%.17g"
RECORD_COLUMNS = ("kind", "label", "function", "alpha", "dim", "trials", "seed",
                  "best_ratio", "runtime_ms")


def format_float(value):
    return FLOAT_FORMAT % value


def matrix_to_json(x):
    """{dim, entries: [[re, im], ...]} in row-major order."""
    x = np.asarray(x, dtype=complex)
    return {"dim": int(x.shape[0]),
            "entries": [[float(v.real), float(v.imag)] for v in x.reshape(-1)]}


def matrix_from_json(data):
    dim = int(data["dim"])
    entries = np.asarray(data["entries"], dtype=float).reshape(-1, 2)
    if len(entries) != dim * dim:
        raise ValueError("Expected {} entries for dim {}, got {}".format(
            dim * dim, dim, len(entries)))
    return (entries[:, 0] + 1j * entries[:, 1]).reshape(dim, dim)


def write_json(filename, data):
    with open(filename, "w", encoding="ascii") as f:
        json.dump(data, f, indent=1, sort_keys=True)
        f.write("\n")


def read_json(filename):
    with open(filename, encoding="ascii") as f:
        return json.load(f)


def timestamp_line():
    return "# generated {}".format(
        datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"))


def write_fourier_weight(filename, g, timestamp=True):
    """Columns s, re g, im g under a commented header."""
    table = np.column_stack([g.s, g.samples.real, g.samples.imag])
    header = "s,re_g,im_g"
    if timestamp:
        header = timestamp_line()[2:] + "\n" + header
    np.savetxt(filename, table, delimiter=",", fmt=FLOAT_FORMAT, header=header)


def read_fourier_weight(filename):
    table = np.loadtxt(filename, delimiter=",", comments="#", ndmin=2)
    return table[:, 0], table[:, 1] + 1j * table[:, 2]


def _record_row(record):
    return [record.kind, record.label, record.function, str(record.alpha),
            str(record.dim), str(record.trials), str(record.seed),
            format_float(record.best_ratio), str(int(record.runtime_ms))]


def ordered(records):
    return sorted(records, key=lambda r: (SchattenIndex.parse(str(r.alpha)).value, r.dim))


def records_csv(records, timestamp=True):
    lines = []
    if timestamp:
        lines.append(timestamp_line())
    lines.append(",".join(RECORD_COLUMNS))
    for r in ordered(records):
        lines.append(",".join(_record_row(r)))
    return "\n".join(lines) + "\n"


class Report:

    def __init__(self, kind, csv, summary, growth):
        self.kind = kind
        self.csv = csv
        self.summary = summary
        self.growth = growth


def report(records, timestamp=True):
    """
    Aggregate CSV and a text summary of records of one kind, ordered by
    (alpha, dim).

    The summary lists, per alpha, every estimate and the growth ratio between
    the largest and the smallest dimension.
    """
    records = list(records)
    if not records:
        raise EmptyInputException("No records to report")
    kinds = set(r.kind for r in records)
    if len(kinds) > 1:
        raise MixedKindsException("Records mix kinds: {}".format(", ".join(sorted(kinds))))
    kind = kinds.pop()
    records = ordered(records)

    growth = {}
    lines = ["kind: {}".format(kind)]
    alphas = []
    for r in records:
        if str(r.alpha) not in alphas:
            alphas.append(str(r.alpha))
    for alpha in alphas:
        group = [r for r in records if str(r.alpha) == alpha]
        values = np.array([r.best_ratio for r in group], dtype=float)
        lines.append("alpha = {} ({})".format(alpha, group[0].label))
        for r in group:
            lines.append("  dim {:>5}: {:.6g}".format(r.dim, r.best_ratio))
        lines.append("  max {:.6g}, min {:.6g}".format(bn.nanmax(values), bn.nanmin(values)))
        small, large = group[0], group[-1]
        if large.dim != small.dim:
            ratio = large.best_ratio / small.best_ratio if small.best_ratio else np.inf
            growth[alpha] = (small.dim, large.dim, ratio)
            lines.append("  growth dim {} / dim {}: {:.6g}".format(large.dim, small.dim, ratio))
    return Report(kind, records_csv(records, timestamp), "\n".join(lines) + "\n", growth)


def write_report(out_dir, name, rep):
    out_dir = Path(out_dir)
    csv_path = out_dir / "{}.csv".format(name)
    txt_path = out_dir / "{}.txt".format(name)
    csv_path.write_text(rep.csv, encoding="ascii")
    txt_path.write_text(rep.summary, encoding="ascii")
    _log.info("wrote %s and %s", csv_path, txt_path)
    return csv_path, txt_path
