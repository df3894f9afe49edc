from enum import Enum

import numpy as np
import scipy.linalg

from oplab.spectra import SpectralDecomposition, eig_hermitian, as_matrix
from oplab.kernels.npfunc import divided_difference, COINCIDENCE_TOL
from oplab.kernels.profiles import sequence_values
from oplab.utils import DimensionMismatchException, DomainException


GROUPING_TOL = 1e-9


class ProjectionFamily:
    """
    Ordered family of mutually orthogonal spectral projections.

    Eigenvectors of `source` whose consecutive eigenvalues differ by at most
    `tol` share a group; each group carries the mean of its eigenvalues as
    label.
    """

    def __init__(self, source, groups=None, tol=GROUPING_TOL):
        if not isinstance(source, SpectralDecomposition):
            source = eig_hermitian(source)
        self.source = source
        if groups is None:
            groups = _group_eigenvalues(source.eigenvalues, tol)
        self.groups = [np.asarray(g, dtype=int) for g in groups]
        membership = np.empty(source.dim, dtype=int)
        for i, g in enumerate(self.groups):
            membership[g] = i
        self.membership = membership
        self.labels = np.array([source.eigenvalues[g].mean() for g in self.groups])

    @classmethod
    def standard(cls, dim):
        """Coordinate projections of C^dim, one group per basis vector."""
        return cls(SpectralDecomposition(np.arange(dim, dtype=float), np.eye(dim)))

    @property
    def dim(self):
        return self.source.dim

    @property
    def basis(self):
        return self.source.basis

    def __len__(self):
        return len(self.groups)

    def projections(self):
        out = []
        for g in self.groups:
            v = self.basis[:, g]
            out.append(v @ v.conj().T)
        return out

    def to_basis(self, x, right=None):
        """Conjugate x into the (self, right) eigenbases."""
        right = self if right is None else right
        return self.basis.conj().T @ as_matrix(x) @ right.basis

    def from_basis(self, x, right=None):
        right = self if right is None else right
        return self.basis @ x @ right.basis.conj().T

    @staticmethod
    def direct_sum(left, right):
        """
        Family on C^{2n} made of the groups of `left` followed by the groups
        of `right` acting on the second summand.
        """
        offset = 0.
        if len(left) and len(right):
            offset = left.labels[-1] - right.labels[0] + 1.
        eigenvalues = np.concatenate([left.source.eigenvalues,
                                      right.source.eigenvalues + offset])
        basis = scipy.linalg.block_diag(left.basis, right.basis)
        groups = list(left.groups) + [g + left.dim for g in right.groups]
        return ProjectionFamily(SpectralDecomposition(eigenvalues, basis), groups=groups)


def _group_eigenvalues(eigenvalues, tol):
    if len(eigenvalues) == 0:
        return []
    breaks = np.flatnonzero(np.diff(eigenvalues) > tol) + 1
    return np.split(np.arange(len(eigenvalues)), breaks)


def corner_embedding(x):
    """[[0, x], [0, 0]]."""
    x = as_matrix(x)
    out = np.zeros((x.shape[0] + x.shape[1],) * 2, dtype=complex)
    out[:x.shape[0], x.shape[0]:] = x
    return out


class KernelMatrix:
    """Kernel phi_kj indexed by (group of the left family, group of the right family)."""

    def __init__(self, values):
        values = np.array(values, dtype=complex)
        if values.ndim != 2:
            raise DimensionMismatchException("Kernel must be a matrix")
        if not np.all(np.isfinite(values)):
            raise DomainException("Kernel entries must be finite")
        values.setflags(write=False)
        self.values = values

    @property
    def shape(self):
        return self.values.shape

    @classmethod
    def constant(cls, c, left, right):
        return cls(np.full((len(left), len(right)), c, dtype=complex))

    def adjoint(self):
        """phi-dagger with phi-dagger_jk = conj(phi_kj), for the swapped families."""
        return KernelMatrix(self.values.conj().T)

    def corner(self):
        """Kernel on the direct-sum family with phi in the top-right block."""
        g1, g2 = self.shape
        out = np.zeros((g1 + g2, g1 + g2), dtype=complex)
        out[:g1, g1:] = self.values
        return KernelMatrix(out)

    def sup(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.


def schur_multiply(phi, x, left, right=None):
    """
    sum_kj phi_kj e_k x f_j: rotate x into both eigenbases, scale block (k, j)
    by phi_kj and rotate back.
    """
    right = left if right is None else right
    x = as_matrix(x)
    if x.shape != (left.dim, right.dim):
        raise DimensionMismatchException(
            "Matrix of shape {} does not conform to families of size {} and {}".format(
                x.shape, left.dim, right.dim))
    if phi.shape != (len(left), len(right)):
        raise DimensionMismatchException(
            "Kernel of shape {} does not match {}x{} groups".format(
                phi.shape, len(left), len(right)))
    rotated = left.to_basis(x, right)
    scaled = rotated * phi.values[np.ix_(left.membership, right.membership)]
    return left.from_basis(scaled, right)


def peak_unit(phi, left, right=None):
    """
    Rank-one u_k v_j* on which the multiplier acts as the largest |phi_kj|;
    u_k and v_j are the first basis vectors of the peak groups.
    """
    right = left if right is None else right
    if phi.values.size == 0:
        return None
    k, j = np.unravel_index(np.argmax(np.abs(phi.values)), phi.shape)
    unit = np.zeros((left.dim, right.dim), dtype=complex)
    unit[left.groups[k][0], right.groups[j][0]] = 1.
    return left.from_basis(unit, right)


def divided_difference_kernel(f, left, right=None, tol=COINCIDENCE_TOL):
    right = left if right is None else right
    return KernelMatrix(divided_difference(f, left.labels[:, None], right.labels[None, :],
                                           tol=tol))


class TrianglePart(Enum):
    UPPER = "upper"
    LOWER = "lower"
    STRICT_UPPER = "strict-upper"
    STRICT_LOWER = "strict-lower"


def triangle_mask(groups, part):
    part = TrianglePart(part)
    k = np.arange(groups)[:, None]
    j = np.arange(groups)[None, :]
    if part == TrianglePart.UPPER:
        return k <= j
    if part == TrianglePart.LOWER:
        return k >= j
    if part == TrianglePart.STRICT_UPPER:
        return k < j
    return k > j


def triangular_truncate(x, family, part=TrianglePart.STRICT_UPPER):
    mask = triangle_mask(len(family), part)
    return schur_multiply(KernelMatrix(mask), x, family)


def profile_levels(profile, family):
    """Profile values f(0), ..., f(G - 1) attached to the groups in order."""
    if len(family) - 1 > profile.K:
        raise DomainException("Profile window [-{0}, {0}] does not cover {1} groups".format(
            profile.K, len(family)))
    return profile(np.arange(len(family))).astype(float)


def profile_kernel(profile, family):
    """(f(j) - f(k)) / (j - k) on group ordinals, 0 on the diagonal."""
    levels = profile_levels(profile, family)
    ordinals = np.arange(len(family), dtype=float)
    return KernelMatrix(divided_difference(lambda t: np.interp(t, ordinals, levels),
                                           ordinals[:, None], ordinals[None, :]))


def marcinkiewicz_operator(seq, profile, family, x):
    """sum_kj seq(f(j) - f(k)) e_k x e_j."""
    levels = profile_levels(profile, family).astype(np.int64)
    differences = levels[None, :] - levels[:, None]
    needed = np.unique(differences)
    table = dict(zip(needed.tolist(), sequence_values(seq, needed)))
    values = np.vectorize(table.__getitem__, otypes=[complex])(differences)
    return schur_multiply(KernelMatrix(values), x, family)


class TwistMode(Enum):
    VALUE = "value"
    INDEX = "index"


def twist_logs(levels, mode=TwistMode.VALUE):
    """
    (usable, exponent) for the twist factors: the factor on entry (k, j) is
    exp(i s exponent_kj) where usable, and 0 elsewhere.
    """
    mode = TwistMode(mode)
    G = len(levels)
    k = np.arange(G)[:, None]
    j = np.arange(G)[None, :]
    if mode == TwistMode.VALUE:
        levels = np.asarray(levels, dtype=float)
        base = levels[None, :] - levels[:, None]
        sign = 1.
    else:
        base = (j - k).astype(float)
        sign = -1.
    usable = (k < j) & (base > 0)
    return usable, sign * np.log(np.where(usable, base, 1.))


def twist_phases(levels, s, mode=TwistMode.VALUE):
    """
    Unimodular factors of the twist on strictly upper entries (k < j):
    (f(j) - f(k))^{is} for mode value, (j - k)^{-is} for mode index, 0^{is} = 0.

    Args:
        levels (np.array): profile values per group
        s (float or np.array): twist parameter(s)

    Returns:
        array of shape s.shape + (G, G)
    """
    usable, exponent = twist_logs(levels, mode)
    s = np.asarray(s, dtype=float)
    return np.where(usable, np.exp(1j * s[..., None, None] * exponent), 0.)


def twist(x, s, profile, family, mode=TwistMode.VALUE):
    """x_s: strictly upper blocks of x scaled by the unimodular twist factors."""
    levels = profile_levels(profile, family)
    return schur_multiply(KernelMatrix(twist_phases(levels, s, mode)), x, family)


def twist_lower(y, s, profile, family, mode=TwistMode.INDEX):
    """y_s = (twist(y*, -s))* for y strictly lower triangular."""
    y = as_matrix(y)
    return twist(y.conj().T, -s, profile, family, mode).conj().T


def conjugation_unitary(profile, family, t):
    """u_t = sum_k exp(2 pi i f(k) t) e_k."""
    levels = profile_levels(profile, family)
    phases = np.exp(2j * np.pi * levels[family.membership] * t)
    return (family.basis * phases) @ family.basis.conj().T


def fourier_block(x, profile, family, n):
    """sum of e_k x e_j over f(j) - f(k) = n."""
    levels = profile_levels(profile, family)
    mask = (levels[None, :] - levels[:, None]) == n
    return schur_multiply(KernelMatrix(mask), x, family)


def decomposition_integral(g, x, y, profile, family):
    """
    int g(s) tau(y_s x_s) ds on the grid of g, with x_s the value twist of x
    and y_s the index twist of y.

    The trace is collapsed to group masses tau(e_j y e_k x e_j) first; the
    product of both twist factors on a usable entry is exp(i s L) with L the
    sum of the two exponents, so each entry costs one transform of g.
    """
    levels = profile_levels(profile, family)
    xt = family.to_basis(x)
    yt = family.to_basis(y)
    G = len(family)
    masses = np.zeros((G, G), dtype=complex)
    np.add.at(masses, (family.membership[:, None], family.membership[None, :]), yt.T * xt)
    usable_x, exponent_x = twist_logs(levels, TwistMode.VALUE)
    usable_y, exponent_y = twist_logs(levels, TwistMode.INDEX)
    usable = usable_x & usable_y
    exponents = (exponent_x + exponent_y)[usable]
    return complex(np.sum(masses[usable] * g.transform(exponents)))


class SchurMultiplier:
    """x -> schur_multiply(phi, x, left, right) as a picklable map."""

    def __init__(self, phi, left, right=None):
        self.phi = phi
        self.left = left
        self.right = left if right is None else right

    def __call__(self, x):
        return schur_multiply(self.phi, x, self.left, self.right)

    def peak_start(self):
        return peak_unit(self.phi, self.left, self.right)


class TriangularTruncation:

    def __init__(self, family, part=TrianglePart.STRICT_UPPER):
        self.family = family
        self.part = TrianglePart(part)

    def __call__(self, x):
        return triangular_truncate(x, self.family, self.part)

    def peak_start(self):
        return peak_unit(KernelMatrix(triangle_mask(len(self.family), self.part)),
                         self.family)


class ScaledIdentity:

    def __init__(self, factor=1.):
        self.factor = factor

    def __call__(self, x):
        return self.factor * as_matrix(x)
