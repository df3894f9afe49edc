import logging
import time

import numpy as np
from pebble import ProcessPool

from oplab.spectra import HermitianOperator, SchattenIndex, apply_function, eig_hermitian, \
    schatten_norm, commutator, random_hermitian, as_hermitian, as_matrix
from oplab.doi import lipschitz_ratio
from oplab.kernels.npfunc import Scaled
from oplab.kernels.profiles import IntegerProfile, random_integer_profile
from oplab.multipliers import ProjectionFamily, SchurMultiplier, TriangularTruncation, \
    TrianglePart, profile_kernel
from oplab.search import estimate_map_norm, DEFAULT_TRIALS, DEFAULT_STEPS, DEFAULT_SCALE, \
    DEFAULT_DECAY
from oplab.io import matrix_to_json, matrix_from_json
from oplab.utils import DimensionMismatchException, UndefinedRatioException, rng_from, \
    spawn_seeds


_log = logging.getLogger(__name__)


SEPARATION = 1e-3


class ExperimentRecord:
    """
    Result of one seeded study.

    `label` is "contrast" for the endpoint indices 1 and inf and "bounded"
    otherwise; `witness` maps names to JSON matrices.
    """

    def __init__(self, kind, alpha, dim, trials, seed, best_ratio, witness=None,
                 config_hash="", runtime_ms=0, function="", details=None):
        self.kind = kind
        self.alpha = SchattenIndex(alpha) if not isinstance(alpha, str) \
            else SchattenIndex.parse(alpha)
        self.dim = int(dim)
        self.trials = int(trials)
        self.seed = int(seed)
        self.best_ratio = float(best_ratio)
        self.witness = witness or {}
        self.config_hash = config_hash
        self.runtime_ms = int(runtime_ms)
        self.function = function
        self.details = details or {}

    @property
    def label(self):
        return label_for(self.alpha)

    def witness_matrix(self, name):
        return matrix_from_json(self.witness[name])

    def to_json(self):
        return {"kind": self.kind, "alpha": str(self.alpha), "label": self.label,
                "dim": self.dim, "trials": self.trials, "seed": self.seed,
                "best_ratio": self.best_ratio, "witness": self.witness,
                "config_hash": self.config_hash, "runtime_ms": self.runtime_ms,
                "function": self.function, "details": self.details}

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"], str(data["alpha"]), data["dim"], data["trials"],
                   data["seed"], data["best_ratio"], witness=data.get("witness"),
                   config_hash=data.get("config_hash", ""),
                   runtime_ms=data.get("runtime_ms", 0), function=data.get("function", ""),
                   details=data.get("details"))

    def __repr__(self):
        return "ExperimentRecord({}, alpha={}, dim={}, best_ratio={:.6g})".format(
            self.kind, self.alpha, self.dim, self.best_ratio)


def label_for(alpha):
    alpha = SchattenIndex(alpha)
    return "contrast" if alpha.is_infinite or alpha.value == 1 else "bounded"


class _Clock:

    def __init__(self, enabled):
        self.enabled = enabled
        self.start = time.perf_counter()

    def elapsed_ms(self):
        if not self.enabled:
            return 0
        return int(round(1000 * (time.perf_counter() - self.start)))


def normalized(f):
    """f scaled to Lipschitz bound 1 (unchanged when already 1 or 0)."""
    lip = f.lip_bound
    if lip is None or lip == 0 or lip == 1:
        return f
    return Scaled(f, 1. / lip)


def _separated(A, B):
    a = as_matrix(A)
    return np.linalg.norm(a - as_matrix(B)) >= SEPARATION * max(1., np.linalg.norm(a))


def _rank_one(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def _perturbed(H, size, rng):
    move = size * rng.choice((-1., 1.)) * _rank_one(H.dim, rng)
    return HermitianOperator.symmetrized(as_matrix(H) + move)


def lipschitz_trial(f, alpha, dim, seed, steps=DEFAULT_STEPS, scale=DEFAULT_SCALE,
                    decay=DEFAULT_DECAY):
    """
    One random Hermitian pair refined by rank-one Hermitian perturbations.
    Each move shifts A, B or both (in independent directions) with equal
    odds; moves that increase the ratio and keep the pair separated are
    accepted, rejections shrink the step.

    Returns:
        (ratio, A, B)
    """
    rng = rng_from(seed)
    A = random_hermitian(dim, rng)
    B = random_hermitian(dim, rng)
    while not _separated(A, B):
        B = random_hermitian(dim, rng)
    best = lipschitz_ratio(f, A, B, alpha)
    step = scale
    for _ in range(steps):
        size = step * max(1., np.linalg.norm(as_matrix(A)))
        # 0: A only, 1: B only, 2: both
        target = rng.integers(0, 3)
        A1, B1 = A, B
        if target != 1:
            A1 = _perturbed(A, size, rng)
        if target != 0:
            B1 = _perturbed(B, size, rng)
        if _separated(A1, B1):
            ratio = lipschitz_ratio(f, A1, B1, alpha)
            if ratio > best:
                A, B, best = A1, B1, ratio
                continue
        step *= decay
    return best, A, B


def _run(jobs, worker, threads):
    if threads is not None and threads > 1 and len(jobs) > 1:
        with ProcessPool(max_workers=threads) as pool:
            futures = [pool.schedule(worker, args=job) for job in jobs]
            return [f.result() for f in futures]
    return [worker(*job) for job in jobs]


def estimate_lipschitz_constant(f, alpha, dim, trials, seed, steps=DEFAULT_STEPS,
                                threads=1, config_hash="", timed=True):
    """
    Empirical lower bound on the best c with ||f(A) - f(B)||_alpha <=
    c ||A - B||_alpha, for f normalized to Lipschitz bound 1.

    Trial i uses the i-th child of the seed; the best ratio is the maximum
    in trial order, so the record does not depend on `threads`.
    """
    clock = _Clock(timed)
    alpha = SchattenIndex(alpha)
    g = normalized(f)
    jobs = [(g, alpha, dim, child, steps) for child in spawn_seeds(seed, trials)]
    results = _run(jobs, lipschitz_trial, threads)
    ratios = np.array([r[0] for r in results])
    best = int(np.argmax(ratios))
    _, A, B = results[best]
    _log.info("lipschitz %s alpha=%s dim=%d: best ratio %.6g (trial %d of %d)",
              f.label, alpha, dim, ratios[best], best, trials)
    return ExperimentRecord("lipschitz", alpha, dim, trials, seed, ratios[best],
                            witness={"A": matrix_to_json(as_matrix(A)),
                                     "B": matrix_to_json(as_matrix(B))},
                            config_hash=config_hash, runtime_ms=clock.elapsed_ms(),
                            function=f.label, details={"best_trial": best})


def commutator_reduction(a, b):
    """u = diag(a, b), v = [[0, I], [I, 0]]."""
    a, b = as_hermitian(a), as_hermitian(b)
    if a.dim != b.dim:
        raise DimensionMismatchException("Operators of sizes {} and {}".format(a.dim, b.dim))
    n = a.dim
    u = np.zeros((2 * n, 2 * n), dtype=complex)
    u[:n, :n] = a.entries
    u[n:, n:] = b.entries
    v = np.zeros((2 * n, 2 * n), dtype=complex)
    v[:n, n:] = np.eye(n)
    v[n:, :n] = np.eye(n)
    return HermitianOperator(u), v


def commutator_ratio(f, a, b, alpha):
    """||[f(u), v]||_alpha / ||[u, v]||_alpha for the block embedding of (a, b)."""
    u, v = commutator_reduction(a, b)
    denominator = schatten_norm(commutator(u, v), alpha)
    if denominator == 0:
        raise UndefinedRatioException("Commutator ratio is undefined for a = b")
    fu = apply_function(f, eig_hermitian(u))
    return schatten_norm(commutator(fu, v), alpha) / denominator


def _map_record(kind, T, alpha, dim, trials, seed, steps, threads, config_hash, clock,
                function="", details=None):
    estimate = estimate_map_norm(T, alpha, dim, trials=trials, seed=seed, steps=steps,
                                 threads=threads)
    witness = {}
    if estimate.witness is not None:
        witness["x"] = matrix_to_json(estimate.witness)
    details = dict(details or {})
    details["best_start"] = estimate.start
    return ExperimentRecord(kind, alpha, dim, trials, seed, estimate.value, witness=witness,
                            config_hash=config_hash, runtime_ms=clock.elapsed_ms(),
                            function=function, details=details)


def truncation_growth_study(alpha, dims, trials=DEFAULT_TRIALS, seed=0, steps=DEFAULT_STEPS,
                            threads=1, config_hash="", timed=True):
    """Map-norm estimates of strict-upper truncation, one record per dimension."""
    records = []
    for dim in dims:
        clock = _Clock(timed)
        T = TriangularTruncation(ProjectionFamily.standard(dim), TrianglePart.STRICT_UPPER)
        record = _map_record("truncation", T, alpha, dim, trials, seed, steps, threads,
                             config_hash, clock, function="strict-upper")
        _log.info("truncation alpha=%s dim=%d: %.6g", record.alpha, dim, record.best_ratio)
        records.append(record)
    return records


def _profile(profile_source, dim, seed):
    if isinstance(profile_source, IntegerProfile):
        return profile_source
    if profile_source is None or profile_source == "random":
        return random_integer_profile(max(dim, 1), seed)
    if profile_source == "identity":
        return IntegerProfile.identity(max(dim, 1))
    return profile_source(dim, seed)


def multiplier_bound_study(profile_source, alpha, dim, trials=DEFAULT_TRIALS, seed=0,
                           steps=DEFAULT_STEPS, threads=1, config_hash="", timed=True):
    """
    Map-norm estimate of the divided-difference multiplier of an integer
    profile on the coordinate projections of C^dim.

    Args:
        profile_source: an IntegerProfile, "random", "identity", or a callable
            (dim, seed) -> IntegerProfile
    """
    clock = _Clock(timed)
    profile = _profile(profile_source, dim, seed)
    family = ProjectionFamily.standard(dim)
    kernel = profile_kernel(profile, family)
    T = SchurMultiplier(kernel, family)
    record = _map_record("multiplier", T, alpha, dim, trials, seed, steps, threads,
                         config_hash, clock, function="profile",
                         details={"profile": profile.to_json(),
                                  "kernel_sup": kernel.sup()})
    _log.info("multiplier alpha=%s dim=%d: %.6g", record.alpha, dim, record.best_ratio)
    return record


def growth_signature(records, band=0.05):
    """
    (ratio, grows) for records of one alpha: the largest-dim over the
    smallest-dim estimate, and whether the estimates increase monotonically
    beyond `band`.
    """
    records = sorted(records, key=lambda r: r.dim)
    values = np.array([r.best_ratio for r in records])
    ratio = values[-1] / values[0] if values[0] else np.inf
    monotone = bool(np.all(np.diff(values) > 0))
    return ratio, monotone and ratio > 1 + band
