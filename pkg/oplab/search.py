# the ascent runs in child processes, so this module only imports what
# the worker needs

import logging

import numpy as np
from pebble import ProcessPool

from oplab.spectra import schatten_norm, SchattenIndex, random_matrix
from oplab.utils import NonlinearMapException, rng_from, spawn_seeds


_log = logging.getLogger(__name__)


DEFAULT_TRIALS = 64
DEFAULT_STEPS = 200
DEFAULT_SCALE = 0.1
DEFAULT_DECAY = 0.9
LINEARITY_TOL = 1e-8


class NormEstimate:
    """Lower bound on a map norm with the start that reached it."""

    def __init__(self, value, witness, start, ratios):
        self.value = value
        self.witness = witness
        self.start = start
        self.ratios = ratios

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return "NormEstimate({:.6g}, start={})".format(self.value, self.start)


def norm_ratio(T, x, alpha):
    norm = schatten_norm(x, alpha)
    if norm == 0:
        return 0.
    return schatten_norm(T(x), alpha) / norm


def check_linearity(T, dim, seed, pairs=3):
    rng = rng_from(seed)
    for _ in range(pairs):
        x = random_matrix(dim, rng)
        y = random_matrix(dim, rng)
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        tx, ty = np.asarray(T(x)), np.asarray(T(y))
        defect = np.linalg.norm(np.asarray(T(a * x + b * y)) - a * tx - b * ty)
        scale = max(1., abs(a) * np.linalg.norm(tx) + abs(b) * np.linalg.norm(ty))
        if not defect <= LINEARITY_TOL * scale:
            raise NonlinearMapException(
                "Map is not linear (defect {:.3g} on a random pair)".format(defect))


def _proposal(x, rng, move):
    if move % 3 == 0:
        d = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    elif move % 3 == 1:
        d = np.zeros(x.shape, dtype=complex)
        index = tuple(rng.integers(0, n) for n in x.shape)
        d[index] = rng.standard_normal() + 1j * rng.standard_normal()
    else:
        # pull mass onto the largest entry
        peak = np.unravel_index(np.argmax(np.abs(x)), x.shape)
        d = -x.copy()
        d[peak] = 0
        if not np.any(d):
            return d
    return d / np.linalg.norm(d)


def ascend(T, alpha, x0, seed, steps=DEFAULT_STEPS, scale=DEFAULT_SCALE,
           decay=DEFAULT_DECAY):
    """
    Multiplicative perturbation ascent of ||T x||_alpha / ||x||_alpha.

    Moves cycle through a full random direction, a single random entry and
    a shrink of every entry but the largest; a rejected move shrinks the
    step by `decay`.

    Returns:
        (ratio, witness)
    """
    rng = rng_from(seed)
    x = np.array(x0, dtype=complex)
    best = norm_ratio(T, x, alpha)
    step = scale
    for move in range(steps):
        size = np.linalg.norm(x)
        if size == 0:
            break
        candidate = x + step * size * _proposal(x, rng, move)
        ratio = norm_ratio(T, candidate, alpha)
        if ratio > best:
            x, best = candidate, ratio
        else:
            step *= decay
    return best, x


def _peak_start(T, dim):
    peak = getattr(T, "peak_start", None)
    if peak is None:
        return None
    x = peak()
    if x is None or np.shape(x) != (dim, dim):
        return None
    return np.asarray(x, dtype=complex)


def _starts(T, dim, trials, seeds, structured):
    for i in range(trials):
        yield random_matrix(dim, seeds[i])
    if structured:
        yield np.ones((dim, dim), dtype=complex)
        peak = _peak_start(T, dim)
        if peak is not None:
            yield peak


def estimate_map_norm(T, alpha, dim, trials=DEFAULT_TRIALS, seed=0, steps=DEFAULT_STEPS,
                      scale=DEFAULT_SCALE, decay=DEFAULT_DECAY, structured=True,
                      threads=1):
    """
    Lower bound on the S^alpha -> S^alpha norm of a linear map on dim x dim
    matrices.

    Args:
        T (callable): the map; must be picklable when threads > 1
        alpha (SchattenIndex): exponent
        dim (int): matrix size
        trials (int): number of seeded random starts
        seed (int): root seed; start i uses the i-th spawned child sequence
        steps (int): ascent moves per start
        structured (bool): add the all-ones start after the random ones, and
            the map's `peak_start()` matrix when it has one
        threads (int): worker processes; 1 runs in-process

    Returns:
        NormEstimate, the maximum over starts in start order
    """
    alpha = SchattenIndex(alpha)
    # one child for the linearity check, one for each start's matrix and ascent
    seeds = spawn_seeds(seed, 2 * trials + 3)
    check_linearity(T, dim, seeds[0])
    start_seeds = seeds[2:2 + trials]
    ascent_seeds = seeds[2 + trials:2 + 2 * trials] + [seeds[1], seeds[2 + 2 * trials]]
    starts = list(_starts(T, dim, trials, start_seeds, structured))
    jobs = [(T, alpha, x0, ascent_seeds[i], steps, scale, decay)
            for i, x0 in enumerate(starts)]

    if threads is not None and threads > 1 and len(jobs) > 1:
        with ProcessPool(max_workers=threads) as pool:
            futures = [pool.schedule(ascend, args=job) for job in jobs]
            results = [f.result() for f in futures]
    else:
        results = [ascend(*job) for job in jobs]

    ratios = np.array([r for r, _ in results])
    best = int(np.argmax(ratios)) if len(ratios) else 0
    _log.debug("map norm at alpha=%s, dim=%d: %d starts, best %.6g from start %d",
               alpha, dim, len(ratios), ratios[best] if len(ratios) else 0., best)
    if not len(results):
        return NormEstimate(0., None, None, ratios)
    return NormEstimate(float(ratios[best]), results[best][1], best, ratios)
