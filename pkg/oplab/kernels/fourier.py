import logging

import numpy as np

from oplab.kernels.npfunc import Function, smooth_step
from oplab.utils import DomainException, FourierGridException, \
    composite_gauss_legendre, apply_rows_chunked


_log = logging.getLogger(__name__)


LOG2 = np.log(2.)
DEFAULT_DS = 0.01
DEFAULT_SMAX = 200.
DEFAULT_SHARPNESS = 2.
DEFAULT_TOL = 1e-6
MAX_MOMENT = 6

# bridge quadrature
BRIDGE_PANELS = 20
BRIDGE_ORDER = 32

# complex entries per temporary block in the grid quadratures
BLOCK = 2 ** 21


class SmoothCutoff(Function):
    """
    h(t) = e^t on t <= log 2, 0 on t >= 1 + log 2, with a smooth
    exp(-sharpness/u) bridge in between.
    """

    def __init__(self, sharpness=DEFAULT_SHARPNESS):
        if not sharpness > 0:
            raise ValueError("Bridge sharpness must be positive")
        self.sharpness = float(sharpness)
        self.flat_end = LOG2
        self.support_end = 1 + LOG2
        super().__init__(None, lip_bound=None, label="cutoff({:g})".format(sharpness))
        grid = np.linspace(self.flat_end, self.support_end, 20001)
        self.lip_bound = float(max(2., np.max(np.abs(self.derivative(grid)))))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            rising = np.exp(np.minimum(t, self.support_end))
        return rising * (1 - smooth_step(t - self.flat_end, self.sharpness))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        u = np.clip(t - self.flat_end, 0., 1.)
        inside = (u > 0) & (u < 1)
        safe = np.where(inside, u, 0.5)
        a = np.exp(-self.sharpness / safe)
        b = np.exp(-self.sharpness / (1 - safe))
        step_slope = np.where(
            inside,
            a * b * self.sharpness * (1 / safe**2 + 1 / (1 - safe)**2) / (a + b)**2,
            0.)
        return self(t) - np.exp(np.minimum(t, self.support_end)) * step_slope

    def __eq__(self, other):
        return type(self) is type(other) and self.sharpness == other.sharpness

    def __hash__(self):
        return hash((type(self), self.sharpness))


def build_cutoff(bridge_sharpness=DEFAULT_SHARPNESS):
    return SmoothCutoff(bridge_sharpness)


class FourierWeight:
    """
    Tabulated g(s) on the uniform grid s_i = i * ds, |s_i| <= smax, with
    e^t = int g(s) e^{its} ds for t <= log 2.

    Integrals over s use the trapezoid rule on this grid.
    """

    def __init__(self, s, samples, ds, smax, cutoff=None, tail_estimate=None):
        self.s = np.asarray(s, dtype=float)
        self.samples = np.asarray(samples, dtype=complex)
        self.ds = float(ds)
        self.smax = float(smax)
        self.cutoff = cutoff
        self.tail_estimate = tail_estimate
        self.s.setflags(write=False)
        self.samples.setflags(write=False)

    @classmethod
    def zero(cls, ds=DEFAULT_DS, smax=DEFAULT_SMAX):
        s = grid(ds, smax)
        return cls(s, np.zeros(len(s)), ds, smax)

    @property
    def weights(self):
        """Trapezoid weights of the grid."""
        w = np.full(len(self.s), self.ds)
        w[[0, -1]] = self.ds / 2
        return w

    def weighted(self):
        return self.weights * self.samples

    def integral(self):
        return complex(np.sum(self.weighted()))

    def transform(self, t):
        """int g(s) e^{its} ds for every t, summed per row in grid order."""
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        wg = self.weighted()

        def block(part):
            return np.sum(np.exp(1j * np.outer(part, self.s)) * wg, axis=1)

        out = apply_rows_chunked(flat, block, chunk_size=max(BLOCK // len(self.s), 1))
        return out.reshape(t.shape)

    def conjugate_symmetry_defect(self):
        """max |g(-s) - conj(g(s))|."""
        return float(np.max(np.abs(self.samples[::-1] - self.samples.conj())))


def grid(ds, smax):
    if not ds > 0 or not smax > 0:
        raise FourierGridException("Grid spacing and half-width must be positive")
    half = int(round(smax / ds))
    return ds * np.arange(-half, half + 1)


def _bridge_rule(cutoff):
    edges = np.linspace(cutoff.flat_end, cutoff.support_end, BRIDGE_PANELS + 1)
    return composite_gauss_legendre(edges, BRIDGE_ORDER)


def fourier_weight(cutoff=None, ds=DEFAULT_DS, smax=DEFAULT_SMAX, tol=DEFAULT_TOL,
                   check=True):
    """
    Tabulate g(s) = (1/2pi) int h(t) e^{-its} dt for the smooth cutoff h.

    The part t <= log 2, where h = e^t, is integrated in closed form; the
    bridge uses composite Gauss-Legendre.

    Args:
        cutoff (SmoothCutoff): h, default build_cutoff()
        ds (float): grid spacing
        smax (float): grid half-width
        tol (float): accuracy target for the truncation and aliasing estimates
        check (bool): raise FourierGridException when the estimates exceed tol

    Returns:
        FourierWeight
    """
    if cutoff is None:
        cutoff = build_cutoff()
    s = grid(ds, smax)
    nodes, weights = _bridge_rule(cutoff)
    bridge_values = weights * cutoff(nodes)
    a = cutoff.flat_end

    def block(part):
        tail = np.exp(a * (1 - 1j * part)) / (1 - 1j * part)
        bridge = np.sum(np.exp(-1j * np.outer(part, nodes)) * bridge_values, axis=1)
        return (tail + bridge) / (2 * np.pi)

    samples = apply_rows_chunked(s, block, chunk_size=max(BLOCK // len(nodes), 1))

    sigma = getattr(cutoff, "sharpness", 1.)
    edge = max(abs(samples[0]), abs(samples[-1]))
    # int_S^inf exp(-sqrt(2 sigma s)) ds = (1 + sqrt(2 sigma S)) exp(-sqrt(2 sigma S)) / sigma
    tail_estimate = 2 * edge * (1 + np.sqrt(2 * sigma * smax)) / sigma
    alias_estimate = 2 * np.exp(-2 * np.pi / ds)
    _log.debug("fourier weight: %d grid points, tail %.3g, alias %.3g",
               len(s), tail_estimate, alias_estimate)

    if check and (tail_estimate > tol or alias_estimate > tol):
        suggested_smax = 2 * smax if tail_estimate > tol else smax
        suggested_ds = 2 * np.pi / (np.log(2 / tol) + 1) if alias_estimate > tol else ds
        raise FourierGridException(
            "Grid ds={:g}, smax={:g} misses tolerance {:g} (tail {:.3g}, alias {:.3g}); "
            "try ds={:g}, smax={:g}".format(ds, smax, tol, tail_estimate, alias_estimate,
                                           suggested_ds, suggested_smax),
            suggested_smax=suggested_smax, suggested_ds=suggested_ds)

    return FourierWeight(s, samples, ds, smax, cutoff=cutoff, tail_estimate=tail_estimate)


def _check_ratio(lam, mu):
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if np.any(lam <= 0) or np.any(mu <= 0):
        raise DomainException("Ratio arguments must be positive")
    ratio = lam / mu
    if np.any(ratio > 2 * (1 + 1e-12)):
        raise DomainException("Ratio lambda/mu must not exceed 2, got {:g}".format(
            float(np.max(ratio))))
    return lam, mu, ratio


def reconstruct_ratio(g, lam, mu):
    """int g(s) lam^{is} mu^{-is} ds, which approximates lam/mu for lam/mu <= 2."""
    lam, mu, _ = _check_ratio(lam, mu)
    out = g.transform(np.log(lam) - np.log(mu))
    if out.ndim == 0:
        return complex(out)
    return out


def reconstruction_errors(g, lam, mu):
    """Relative errors |reconstruct_ratio - lam/mu| / (lam/mu) on broadcast arrays."""
    lam, mu, ratio = _check_ratio(*np.broadcast_arrays(lam, mu))
    return np.abs(g.transform(np.log(lam) - np.log(mu)) - ratio) / ratio


def ratio_grid(count=50):
    """Ratios lam/mu spanning [0.05, 2] on a log grid of count x count pairs."""
    lam = np.geomspace(0.1, 2., count)
    mu = np.geomspace(1., 2., count)
    return np.meshgrid(lam, mu, indexing="ij")


def moment(g, n):
    """int |s|^n |g(s)| ds on the grid."""
    if n < 0 or n > MAX_MOMENT or int(n) != n:
        raise DomainException("Moment order must be an integer in 0..{}".format(MAX_MOMENT))
    return float(np.sum(g.weights * np.abs(g.s)**n * np.abs(g.samples)))
