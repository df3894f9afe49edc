import sys
import time

from oplab.config import build_config
from oplab.experiments import truncation_growth_study, multiplier_bound_study, growth_signature
from oplab.verify import run_suites, DEFAULT_SUITES

DIMS = [8, 32, 128]
DIMS_FAST = [8, 32]


def time_truncation(dims, trials):
    for alpha in (1, 2):
        t = time.time()
        records = truncation_growth_study(alpha, dims, trials=trials, seed=0, timed=False)
        ratio, grows = growth_signature(records)
        print("truncation alpha={}: {} growth {:.4g} ({}) in {:.1f}s".format(
            alpha, [round(r.best_ratio, 4) for r in records], ratio,
            "grows" if grows else "flat", time.time() - t))


def time_multipliers(dims, trials):
    for alpha in ("4/3", "2", "4"):
        t = time.time()
        records = [multiplier_bound_study("random", alpha, dim, trials=trials, seed=0, timed=False)
                   for dim in dims]
        ratio, grows = growth_signature(records)
        print("multiplier alpha={}: growth {:.4g} ({}) in {:.1f}s".format(
            alpha, ratio, "grows" if grows else "flat", time.time() - t))


def time_verify(out_dir):
    config = build_config("verify", flag_values={"out_dir": out_dir}, environ={})
    for name in DEFAULT_SUITES:
        t = time.time()
        report = run_suites(config, (name,))
        print("suite {}: {} failures in {:.1f}s".format(name, report.failures, time.time() - t))


if __name__ == "__main__":
    fast = "--fast" in sys.argv
    dims = DIMS_FAST if fast else DIMS
    trials = 4 if fast else 64
    time_truncation(dims, trials)
    time_multipliers(dims, trials)
    if not fast:
        time_verify("oplab-out")
