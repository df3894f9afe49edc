import logging
import time
import warnings
from itertools import cycle

import numpy as np
import scipy.linalg

from oplab.spectra import SchattenIndex, eig_hermitian, schatten_norm, dual_index, \
    trace_pairing, commutator, random_hermitian, random_matrix, random_unitary
from oplab.kernels import Identity, Absolute, function_catalog, fourier_weight, build_cutoff, \
    reconstruction_errors, ratio_grid, moment, power_sequence, dyadic_variation, \
    random_integer_profile
from oplab.multipliers import ProjectionFamily, TrianglePart, triangular_truncate, \
    schur_multiply, profile_kernel, decomposition_integral
from oplab.doi import perturbation_identity_residual, identity_tolerance, lipschitz_ratio, \
    discretize, discretization_ratio_bound, duhamel_difference
from oplab.experiments import estimate_lipschitz_constant, commutator_reduction, \
    commutator_ratio, truncation_growth_study, multiplier_bound_study, growth_signature
from oplab.utils import spawn_seeds


_log = logging.getLogger(__name__)


IDENTITY_TRIPLES = 500
SPECTRA_PAIRS = 100
DUHAMEL_INSTANCES = 24
CROSS_CHECK_PAIRS = 50
DISCRETIZATION_OPERATORS = 100
CONVERGENCE_PAIRS = 10
CONVERGENCE_GRID = (10, 100, 1000)
CONVERGENCE_ALPHAS = ("2", "4/3")
COMMUTATOR_PAIRS = 200
MAX_MESSAGES = 10
GROWTH_DIMS = (8, 32, 128)
GROWTH_TRIALS = 64
GROWTH_STEPS = 200

CATALOG = ("abs", "relu", "pwl", "moll-abs", "sin", "identity", "windowed-ramp")
COMMUTATOR_ALPHAS = ("1", "4/3", "2", "4", "inf")


class SuiteResult:

    def __init__(self, name):
        self.name = name
        self.checks = 0
        self.failures = 0
        self.messages = []
        self.runtime_ms = 0

    def check(self, condition, message):
        self.checks += 1
        if not condition:
            self.failures += 1
            if len(self.messages) < MAX_MESSAGES:
                self.messages.append(message)

    @property
    def passed(self):
        return self.failures == 0

    def to_json(self):
        return {"name": self.name, "checks": self.checks, "failures": self.failures,
                "messages": self.messages, "runtime_ms": self.runtime_ms}


class VerifyContext:
    """Shared state of one verify run: the config and a lazily built Fourier weight."""

    def __init__(self, config):
        self.config = config
        self._weight = None

    @property
    def tol(self):
        return self.config.tolerances

    def weight(self, smax=None):
        grid = self.config.grid
        if smax is None:
            if self._weight is None:
                self._weight = fourier_weight(build_cutoff(grid["sharpness"]), grid["ds"],
                                              grid["smax"])
            return self._weight
        return fourier_weight(build_cutoff(grid["sharpness"]), grid["ds"], smax)

    def dims(self, low=1, high=None):
        dims = [d for d in self.config.dims if d >= low and (high is None or d <= high)]
        if not dims:
            dims = [min(max(low, 2), high or 2)]
        return dims

    def seeds(self, suite, count):
        # every suite draws from its own branch of the root seed
        offset = sorted(SUITES).index(suite)
        return spawn_seeds([self.config.seed, offset], count)


def suite_spectra(ctx):
    result = SuiteResult("spectra")
    alphas = ctx.config.alphas
    dims = cycle(ctx.dims(1, 32))
    for i, seed in enumerate(ctx.seeds("spectra", SPECTRA_PAIRS)):
        rng = np.random.default_rng(seed)
        dim = next(dims)
        x, y = random_matrix(dim, rng), random_matrix(dim, rng)
        u, v = random_unitary(dim, rng), random_unitary(dim, rng)
        h = random_hermitian(dim, rng)
        d = eig_hermitian(h)
        residual = np.linalg.norm(d.reconstruct() - h.entries) / max(1., np.linalg.norm(h.entries))
        result.check(residual <= 1e-10, "pair {}: reconstruction residual {:.3g}".format(i, residual))
        norms = []
        for alpha in sorted(alphas, key=lambda a: a.value):
            nx = schatten_norm(x, alpha)
            norms.append(nx)
            rotated = schatten_norm(u @ x @ v, alpha)
            result.check(abs(rotated - nx) <= 1e-10 * max(1., nx),
                         "pair {}: unitary invariance at alpha={}".format(i, alpha))
            result.check(schatten_norm(x + y, alpha) <= nx + schatten_norm(y, alpha) + 1e-12,
                         "pair {}: triangle inequality at alpha={}".format(i, alpha))
            pairing = abs(trace_pairing(y, x))
            holder = nx * schatten_norm(y, dual_index(alpha))
            result.check(pairing <= holder * (1 + 1e-12) + 1e-12,
                         "pair {}: Holder at alpha={}".format(i, alpha))
        result.check(all(b <= a + 1e-12 for a, b in zip(norms, norms[1:])),
                     "pair {}: norms not monotone in alpha".format(i))
    return result


def suite_identity(ctx):
    result = SuiteResult("identity")
    dims = cycle(ctx.dims(2, 64))
    names = cycle(CATALOG)
    sharp = ctx.tol["sharp"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for i, seed in enumerate(ctx.seeds("identity", IDENTITY_TRIPLES)):
            rng = np.random.default_rng(seed)
            dim, name = next(dims), next(names)
            f = function_catalog.create(name, rng)
            A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
            residual = perturbation_identity_residual(f, A, B)
            scale = ctx.tol["identity"] / 1e-9
            allowed = identity_tolerance(f, A, B) * scale
            result.check(residual <= allowed,
                         "triple {} ({}, dim {}): residual {:.3g} > {:.3g}".format(
                             i, name, dim, residual, allowed))
            ratio = lipschitz_ratio(f, A, B, 2)
            result.check(ratio <= f.lip_bound + sharp,
                         "triple {} ({}, dim {}): S2 ratio {:.12g}".format(i, name, dim, ratio))
    dim = ctx.dims(2, 64)[0]
    record = estimate_lipschitz_constant(Identity(), 2, dim, ctx.config.trials, ctx.config.seed,
                                         steps=ctx.config.steps, timed=False)
    result.check(abs(record.best_ratio - 1) <= 1e-6,
                 "identity estimate {:.12g}".format(record.best_ratio))
    return result


def suite_decomposition(ctx):
    result = SuiteResult("decomposition")
    g = ctx.weight()
    errors = reconstruction_errors(g, *ratio_grid())
    result.check(np.max(errors) <= ctx.tol["reconstruction"],
                 "max reconstruction error {:.3g}".format(np.max(errors)))
    integral = g.integral()
    result.check(abs(integral - 1) <= ctx.tol["integral"],
                 "integral of g is {}".format(integral))
    result.check(g.conjugate_symmetry_defect() <= 1e-8, "g(-s) != conj(g(s))")
    wide = ctx.weight(2 * g.smax)
    for n in range(4):
        m, m2 = moment(g, n), moment(wide, n)
        result.check(np.isfinite(m) and np.isfinite(m2), "moment {} not finite".format(n))
        result.check(abs(m2 - m) <= ctx.tol["moment"] * abs(m2),
                     "moment {} changes from {:.10g} to {:.10g}".format(n, m, m2))
    return result


def suite_duhamel(ctx):
    result = SuiteResult("duhamel")
    dims = cycle(ctx.dims(1, 16))
    rs = cycle((-4., -2., 0.5, 1., 2., 4.))
    tol = ctx.tol["duhamel"]
    for i, seed in enumerate(ctx.seeds("duhamel", DUHAMEL_INSTANCES)):
        rng = np.random.default_rng(seed)
        dim, r = next(dims), next(rs)
        A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
        quadrature = duhamel_difference(A, B, r, 64)
        direct = scipy.linalg.expm(1j * r * A.entries) - scipy.linalg.expm(1j * r * B.entries)
        error = schatten_norm(quadrature - direct, np.inf)
        result.check(error <= tol, "instance {}: quadrature error {:.3g}".format(i, error))
        bound = abs(r) * schatten_norm(A - B, np.inf)
        result.check(schatten_norm(direct, np.inf) <= bound + tol,
                     "instance {}: exponential difference exceeds |r| ||A - B||".format(i))
    return result


def suite_dyadic(ctx):
    result = SuiteResult("dyadic")
    for s in (0.5, 1., 3., 10.):
        seq = power_sequence(s)
        for k in range(13):
            v = dyadic_variation(seq, k)
            result.check(v <= abs(s) + ctx.tol["dyadic"],
                         "s={}, k={}: variation {:.12g}".format(s, k, v))
    return result


def suite_cross_check(ctx):
    result = SuiteResult("cross-check")
    g = ctx.weight()
    dims = cycle(ctx.dims(2, 24))
    for i, seed in enumerate(ctx.seeds("cross-check", CROSS_CHECK_PAIRS)):
        rng = np.random.default_rng(seed)
        dim = next(dims)
        family = ProjectionFamily(random_hermitian(dim, rng))
        profile = random_integer_profile(dim, rng, increments=(1, 2))
        x = triangular_truncate(random_matrix(dim, rng), family, TrianglePart.STRICT_UPPER)
        y = triangular_truncate(random_matrix(dim, rng), family, TrianglePart.STRICT_LOWER)
        direct = trace_pairing(y, schur_multiply(profile_kernel(profile, family), x, family))
        integral = decomposition_integral(g, x, y, profile, family)
        allowed = ctx.tol["decomposition"] * schatten_norm(x, 2) * schatten_norm(y, 2)
        result.check(abs(direct - integral) <= allowed,
                     "pair {} (dim {}): |difference| {:.3g}".format(i, dim, abs(direct - integral)))
    return result


def suite_discretization(ctx):
    result = SuiteResult("discretization")
    dims = cycle(ctx.dims(1, 32))
    seeds = ctx.seeds("discretization", DISCRETIZATION_OPERATORS + CONVERGENCE_PAIRS)
    for i, seed in enumerate(seeds[:DISCRETIZATION_OPERATORS]):
        A = random_hermitian(next(dims), np.random.default_rng(seed))
        for m in (1, 10, 100, 1000):
            gap = schatten_norm(A - discretize(A, m), np.inf)
            result.check(gap <= 1 / m, "operator {}, m={}: ||A - A_m|| = {!r}".format(i, m, gap))
    f = Absolute()
    # mean |ratio change| per alpha and m over the pairs
    drift = {alpha: np.zeros(len(CONVERGENCE_GRID)) for alpha in CONVERGENCE_ALPHAS}
    for i, seed in enumerate(seeds[DISCRETIZATION_OPERATORS:]):
        rng = np.random.default_rng(seed)
        dim = next(dims)
        A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
        for alpha in CONVERGENCE_ALPHAS:
            ratio = lipschitz_ratio(f, A, B, alpha)
            for j, m in enumerate(CONVERGENCE_GRID):
                moved = abs(lipschitz_ratio(f, discretize(A, m), discretize(B, m), alpha) - ratio)
                drift[alpha][j] += moved / CONVERGENCE_PAIRS
                if alpha != "2":
                    continue
                bound = discretization_ratio_bound(A, B, ratio, m)
                result.check(moved <= bound + 1e-12,
                             "pair {}, m={}: ratio moved {:.3g} > {:.3g}".format(
                                 i, m, moved, bound))
    noise = ctx.tol["convergence"]
    for alpha, means in drift.items():
        for j in range(1, len(CONVERGENCE_GRID)):
            result.check(means[j] <= means[j - 1] + noise,
                         "alpha={}: mean ratio change {:.3g} at m={} after {:.3g} at m={}".format(
                             alpha, means[j], CONVERGENCE_GRID[j], means[j - 1],
                             CONVERGENCE_GRID[j - 1]))
    return result


def suite_commutator(ctx):
    result = SuiteResult("commutator")
    dims = cycle(ctx.dims(1, 16))
    alphas = cycle(COMMUTATOR_ALPHAS)
    names = cycle(CATALOG)
    tol = ctx.tol["commutator"]
    for i, seed in enumerate(ctx.seeds("commutator", COMMUTATOR_PAIRS)):
        rng = np.random.default_rng(seed)
        dim, alpha, name = next(dims), SchattenIndex.parse(next(alphas)), next(names)
        f = function_catalog.create(name, rng)
        a, b = random_hermitian(dim, rng), random_hermitian(dim, rng)
        u, v = commutator_reduction(a, b)
        factor = 1. if alpha.is_infinite else 2 ** (1 / alpha.value)
        expected = factor * schatten_norm(a - b, alpha)
        got = schatten_norm(commutator(u, v), alpha)
        result.check(abs(got - expected) <= tol * max(1., expected),
                     "pair {}: ||[u, v]|| = {!r}, expected {!r}".format(i, got, expected))
        route = commutator_ratio(f, a, b, alpha)
        direct = lipschitz_ratio(f, a, b, alpha)
        result.check(abs(route - direct) <= tol * max(1., direct),
                     "pair {} ({}, alpha={}): routes differ by {:.3g}".format(
                         i, name, alpha, abs(route - direct)))
    return result


def growth_budget(config):
    """(trials, steps) for the growth suite, never below GROWTH_TRIALS and GROWTH_STEPS."""
    return max(config.trials, GROWTH_TRIALS), max(config.steps, GROWTH_STEPS)


def suite_growth(ctx):
    """Truncation growth at alpha = 1 against boundedness for 1 < alpha < inf."""
    result = SuiteResult("growth")
    config = ctx.config
    dims = list(GROWTH_DIMS)
    trials, steps = growth_budget(config)
    band = ctx.tol["band"]
    contrast = truncation_growth_study(1, dims, trials, config.seed, steps,
                                       config.threads, timed=False)
    ratio, _ = growth_signature(contrast)
    result.check(ratio >= 1.5, "alpha=1 truncation grows only by {:.4g}".format(ratio))
    for record in truncation_growth_study(2, dims, trials, config.seed, steps,
                                          config.threads, timed=False):
        result.check(record.best_ratio <= 1 + ctx.tol["sharp"],
                     "alpha=2 truncation at dim {}: {:.12g}".format(record.dim, record.best_ratio))
    for alpha in ("4/3", "2", "4"):
        records = [multiplier_bound_study("random", alpha, dim, trials, config.seed,
                                          steps, config.threads, timed=False)
                   for dim in dims]
        if alpha == "2":
            for record in records:
                sup = record.details["kernel_sup"]
                result.check(abs(record.best_ratio - sup) <= ctx.tol["sharp"] * max(1., sup),
                             "alpha=2 multiplier at dim {}: {:.12g}, sup {:.12g}".format(
                                 record.dim, record.best_ratio, sup))
        ratio, grows = growth_signature(records, band)
        result.check(not grows, "alpha={} multiplier estimates grow by {:.4g}".format(alpha, ratio))
    return result


SUITES = {
    "spectra": suite_spectra,
    "identity": suite_identity,
    "decomposition": suite_decomposition,
    "duhamel": suite_duhamel,
    "dyadic": suite_dyadic,
    "cross-check": suite_cross_check,
    "discretization": suite_discretization,
    "commutator": suite_commutator,
    "growth": suite_growth,
}

DEFAULT_SUITES = ("spectra", "identity", "decomposition", "duhamel", "dyadic", "cross-check",
                  "discretization", "commutator")


class VerifyReport:

    def __init__(self, results):
        self.results = results

    @property
    def failures(self):
        return sum(r.failures for r in self.results)

    @property
    def passed(self):
        return self.failures == 0

    def to_json(self):
        return {"failures": self.failures, "passed": self.passed,
                "suites": [r.to_json() for r in self.results]}


def run_suites(config, names=DEFAULT_SUITES):
    ctx = VerifyContext(config)
    results = []
    for name in names:
        start = time.perf_counter()
        result = SUITES[name](ctx)
        if config.timestamp:
            result.runtime_ms = int(round(1000 * (time.perf_counter() - start)))
        level = logging.INFO if result.passed else logging.WARNING
        _log.log(level, "suite %s: %d checks, %d failures", name, result.checks, result.failures)
        for message in result.messages:
            _log.debug("  %s", message)
        results.append(result)
    return VerifyReport(results)
