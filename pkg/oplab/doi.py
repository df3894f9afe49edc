import warnings

import numpy as np

from oplab.spectra import HermitianOperator, SpectralDecomposition, eig_hermitian, \
    apply_function, schatten_norm, as_matrix, as_hermitian, SchattenIndex
from oplab.multipliers import ProjectionFamily, KernelMatrix, schur_multiply, \
    divided_difference_kernel, GROUPING_TOL
from oplab.kernels.npfunc import smooth_step
from oplab.kernels.mollify import Mollified
from oplab.kernels.fourier import grid
from oplab.utils import DimensionMismatchException, UndefinedRatioException, \
    QuadratureBudgetException, gauss_legendre, composite_gauss_legendre, \
    apply_rows_chunked


IDENTITY_TOL = 1e-9
RELAXED_IDENTITY_TOL = 1e-6
SMALL_GAP = 1e-6
T_STEPS = 64

TENSOR_DS = 0.05
TENSOR_SMAX = 12.
TENSOR_TOL = 1e-8
TENSOR_PANEL = 0.25
BLOCK = 2 ** 20


class DiscretizationGrid:
    """Spectral grid of spacing 1/m."""

    def __init__(self, m):
        if int(m) != m or m < 1:
            raise ValueError("Grid density must be a positive integer, got {}".format(m))
        self.m = int(m)

    def floor(self, values):
        values = np.asarray(values, dtype=float)
        return np.floor(values * self.m + 1e-9) / self.m


def _family(h, tol=GROUPING_TOL):
    if isinstance(h, ProjectionFamily):
        return h
    return ProjectionFamily(eig_hermitian(h), tol=tol)


def _conform(A, B, x=None):
    A, B = as_hermitian(A), as_hermitian(B)
    if x is not None and as_matrix(x).shape != (A.dim, B.dim):
        raise DimensionMismatchException(
            "Matrix of shape {} does not conform to {}x{}".format(
                as_matrix(x).shape, A.dim, B.dim))
    return A, B


def doi_apply(f, A, B, x, tol=GROUPING_TOL):
    """
    T_phi_f(x) for the divided difference of f against the spectral
    families of A and B; labels closer than `tol` give a zero kernel entry.
    """
    A, B = _conform(A, B, x)
    left, right = _family(A), _family(B)
    return schur_multiply(divided_difference_kernel(f, left, right, tol=tol), x, left, right)


def cross_spectral_gap(A, B):
    lam = eig_hermitian(A).eigenvalues
    mu = eig_hermitian(B).eigenvalues
    if len(lam) == 0:
        return np.inf
    return float(np.min(np.abs(lam[:, None] - mu[None, :])))


def perturbation_identity_residual(f, A, B):
    """||f(A) - f(B) - T_phi_f(A - B)||_F."""
    A, B = _conform(A, B)
    difference = as_matrix(apply_function(f, eig_hermitian(A))) \
        - as_matrix(apply_function(f, eig_hermitian(B)))
    return float(np.linalg.norm(difference - doi_apply(f, A, B, A - B), "fro"))


def identity_tolerance(f, A, B):
    """Allowed residual of the perturbation identity for this pair.

    1e-9 relative to max(1, ||f(A) - f(B)||_F); 1e-6 when the spectra of A
    and B come closer than 1e-6, with a RuntimeWarning.
    """
    A, B = _conform(A, B)
    scale = max(1., np.linalg.norm(as_matrix(apply_function(f, eig_hermitian(A)))
                                   - as_matrix(apply_function(f, eig_hermitian(B))), "fro"))
    if cross_spectral_gap(A, B) < SMALL_GAP:
        warnings.warn("Spectra closer than {:g}; identity checked at {:g}".format(
            SMALL_GAP, RELAXED_IDENTITY_TOL), RuntimeWarning)
        return RELAXED_IDENTITY_TOL * scale
    return IDENTITY_TOL * scale


def lipschitz_ratio(f, A, B, alpha):
    """||f(A) - f(B)||_alpha / ||A - B||_alpha."""
    A, B = _conform(A, B)
    alpha = SchattenIndex(alpha)
    denominator = schatten_norm(A - B, alpha)
    if denominator == 0:
        raise UndefinedRatioException("Lipschitz ratio is undefined for A = B")
    numerator = as_matrix(apply_function(f, eig_hermitian(A))) \
        - as_matrix(apply_function(f, eig_hermitian(B)))
    return schatten_norm(numerator, alpha) / denominator


def discretize(A, grid):
    """A_m: same eigenbasis, eigenvalues floored to multiples of 1/m."""
    if not isinstance(grid, DiscretizationGrid):
        grid = DiscretizationGrid(grid)
    decomposition = eig_hermitian(A)
    floored = decomposition.with_eigenvalues(grid.floor(decomposition.eigenvalues))
    return HermitianOperator.symmetrized(floored.reconstruct())


def discretization_ratio_bound(A, B, ratio, m):
    """
    Largest change of the S^2 Lipschitz ratio (Lipschitz bound 1) when A
    and B are replaced by A_m and B_m: 2 sqrt(d) (1 + ratio) / (m D - 2 sqrt(d))
    with D = ||A - B||_2; inf when the denominator is not positive.
    """
    d = as_hermitian(A).dim
    D = np.linalg.norm(as_matrix(A) - as_matrix(B), "fro")
    denominator = m * D - 2 * np.sqrt(d)
    if denominator <= 0:
        return np.inf
    return 2 * np.sqrt(d) * (1 + ratio) / denominator


def _average_phase_kernel(lam, mu, s, t, wt):
    """sum_t wt exp(i s ((1 - t) lam_k + t mu_j)) for every s: shape (S, K, J)."""
    left = np.exp(1j * s[:, None, None] * (1 - t)[None, :, None] * lam[None, None, :])
    right = np.exp(1j * s[:, None, None] * t[None, :, None] * mu[None, None, :])
    return np.einsum("t,stk,stj->skj", wt, left, right)


def duhamel_difference(A, B, r, steps=T_STEPS):
    """
    ir int_0^1 e^{ir(1-t)A} (A - B) e^{irtB} dt by Gauss-Legendre in t.

    The exponentials are applied in the eigenbases of A and B, which turns
    the t quadrature into a Schur multiplier of (A - B).
    """
    A, B = _conform(A, B)
    dA, dB = eig_hermitian(A), eig_hermitian(B)
    t, wt = gauss_legendre(steps, 0., 1.)
    rotated = dA.basis.conj().T @ (A - B) @ dB.basis
    kernel = _average_phase_kernel(dA.eigenvalues, dB.eigenvalues, np.array([r], dtype=float),
                                   t, wt)[0]
    return 1j * r * (dA.basis @ (kernel * rotated) @ dB.basis.conj().T)


def phi_n_kernel(f, n, lam, mu, steps=T_STEPS):
    """int_0^1 f_n'((1 - t) lam + t mu) dt with f_n = G_n * f."""
    fn = f if isinstance(f, Mollified) and f.n == n else Mollified(f, n)
    lam, mu = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(mu, dtype=float))
    t, wt = gauss_legendre(steps, 0., 1.)
    points = (1 - t) * lam[..., None] + t * mu[..., None]
    out = np.sum(wt * fn.derivative(points), axis=-1)
    if out.ndim == 0:
        return complex(out)
    return out


def coincidence_mask(left, right, tol=GROUPING_TOL):
    return np.abs(left.labels[:, None] - right.labels[None, :]) <= tol


def diagonal_part(x, A, B, tol=GROUPING_TOL):
    """sum over coincident labels lam_k = mu_j of e_k x f_j."""
    A, B = _conform(A, B, x)
    left, right = _family(A), _family(B)
    return schur_multiply(KernelMatrix(coincidence_mask(left, right, tol)), x, left, right)


def off_diagonal_part(x, A, B, tol=GROUPING_TOL):
    A, B = _conform(A, B, x)
    left, right = _family(A), _family(B)
    return schur_multiply(KernelMatrix(~coincidence_mask(left, right, tol)), x, left, right)


def cutoff_kernel(kernel, left, right, radius):
    """phi_kj restricted to |lam_k| <= radius and |mu_j| <= radius."""
    inside = (np.abs(left.labels) <= radius)[:, None] & (np.abs(right.labels) <= radius)[None, :]
    return KernelMatrix(np.where(inside, kernel.values, 0.))


class SpectralMeasure:
    """
    Block masses nu(k, j) = tau(y e_k x f_j) of the pair (x, y) against the
    spectral families of A and B.
    """

    def __init__(self, masses, left, right):
        self.masses = masses
        self.left = left
        self.right = right

    @property
    def support(self):
        return self.left.labels, self.right.labels

    def integrate(self, phi):
        """sum phi_kj nu(k, j); phi is a KernelMatrix or a function of (lam, mu)."""
        if isinstance(phi, KernelMatrix):
            values = phi.values
        else:
            values = phi(self.left.labels[:, None], self.right.labels[None, :])
        return complex(np.sum(values * self.masses))

    def total_variation(self):
        return float(np.sum(np.abs(self.masses)))


def spectral_measure(x, y, A, B, tol=GROUPING_TOL):
    A, B = _conform(A, B, x)
    left, right = _family(A, tol), _family(B, tol)
    xt = left.to_basis(x, right)
    yt = right.basis.conj().T @ as_matrix(y) @ left.basis
    masses = np.zeros((len(left), len(right)), dtype=complex)
    np.add.at(masses, (left.membership[:, None], right.membership[None, :]), yt.T * xt)
    return SpectralMeasure(masses, left, right)


def _derivative_transform(fn, s, hull):
    """
    (1/2pi) int f_n'(u) w(u) e^{-isu} du, with w = 1 when f_n' has a
    declared window and otherwise a smooth window that equals one on the
    spectral hull and vanishes one unit outside it.
    """
    if fn.window is not None:
        lo, hi = fn.window
        weight = None
    else:
        lo, hi = hull[0] - 1., hull[1] + 1.

        def weight(u):
            return smooth_step(u - lo) * (1 - smooth_step(u - hull[1]))
    panels = max(int(np.ceil((hi - lo) / TENSOR_PANEL)), 1)
    u, wu = composite_gauss_legendre(np.linspace(lo, hi, panels + 1), 16)
    values = wu * fn.derivative(u)
    if weight is not None:
        values = values * weight(u)

    def block(part):
        return np.sum(np.exp(-1j * np.outer(part, u)) * values, axis=1) / (2 * np.pi)

    return apply_rows_chunked(s, block, chunk_size=max(BLOCK // len(u), 1))


def tensor_rep_apply(f, n, A, B, x, ds=TENSOR_DS, smax=TENSOR_SMAX, t_steps=T_STEPS,
                     tol=TENSOR_TOL):
    """
    int h_n(s) ds int_0^1 e^{is(1-t)A} x e^{istB} dt, with h_n the Fourier
    transform of f_n'; approximates T_phi(x) for the divided difference of
    f_n = G_n * f.

    The s integral is a trapezoid rule on |s| <= smax, the t integral
    Gauss-Legendre with t_steps nodes; both run in the eigenbases of A and
    B. Entries of x at coincident labels are dropped.

    Raises:
        QuadratureBudgetException: when |h_n| at the grid edge exceeds tol
    """
    A, B = _conform(A, B, x)
    fn = f if isinstance(f, Mollified) and f.n == n else Mollified(f, n)
    left, right = _family(A), _family(B)
    labels = np.concatenate([left.labels, right.labels])
    hull = (labels.min(), labels.max())

    s = grid(ds, smax)
    h = _derivative_transform(fn, s, hull)
    edge = float(max(abs(h[0]), abs(h[-1])))
    if edge > tol:
        raise QuadratureBudgetException(
            "Fourier transform of the derivative is {:.3g} at |s| = {:g}; "
            "increase smax".format(edge, smax), achieved=edge)

    wh = np.full(len(s), ds, dtype=complex) * h
    wh[[0, -1]] /= 2
    t, wt = gauss_legendre(t_steps, 0., 1.)
    chunk = max(BLOCK // max(len(t) * (len(left) + len(right)), 1), 1)

    def block(rows):
        phases = _average_phase_kernel(left.labels, right.labels, s[rows], t, wt)
        return np.einsum("s,skj->kj", wh[rows], phases)[None]

    pieces = apply_rows_chunked(np.arange(len(s)), block, chunk_size=chunk)
    kernel = np.sum(pieces, axis=0)
    kernel = np.where(coincidence_mask(left, right), 0., kernel)
    return schur_multiply(KernelMatrix(kernel), x, left, right)
