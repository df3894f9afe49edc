from fractions import Fraction

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from oplab.utils import SymmetryViolationException, DomainException, \
    DimensionMismatchException, InvalidIndexException, rng_from


HERMITIAN_TOL = 1e-12


def _frobenius(x):
    return np.linalg.norm(x, "fro")


class HermitianOperator:
    """Dense self-adjoint matrix.

    The constructor accepts any square array that is Hermitian within
    HERMITIAN_TOL * max(1, ||H||_F) and stores it as complex.
    """

    def __init__(self, entries, tol=HERMITIAN_TOL):
        entries = np.array(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchException(
                "Hermitian operator needs a square matrix, got shape {}".format(entries.shape))
        if not np.all(np.isfinite(entries)):
            raise DomainException("Non-finite matrix entries")
        asym = _frobenius(entries - entries.conj().T)
        if asym > tol * max(1., _frobenius(entries)):
            raise SymmetryViolationException(
                "Matrix is not Hermitian (||H - H*||_F = {:.3g})".format(asym))
        entries.setflags(write=False)
        self.entries = entries

    @property
    def dim(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __sub__(self, other):
        return as_matrix(self) - as_matrix(other)

    def __eq__(self, other):
        return type(self) is type(other) \
            and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((type(self), self.entries.tobytes()))

    @classmethod
    def symmetrized(cls, matrix):
        """(M + M*)/2 wrapped without a tolerance check."""
        matrix = np.asarray(matrix, dtype=complex)
        return cls((matrix + matrix.conj().T) / 2)


class SpectralDecomposition:
    """Ascending eigenvalues with an orthonormal eigenbasis in the columns."""

    def __init__(self, eigenvalues, basis):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.basis = np.asarray(basis, dtype=complex)
        self.eigenvalues.setflags(write=False)
        self.basis.setflags(write=False)

    @property
    def dim(self):
        return len(self.eigenvalues)

    def reconstruct(self):
        return (self.basis * self.eigenvalues) @ self.basis.conj().T

    def with_eigenvalues(self, eigenvalues):
        """Same basis, new spectrum. Used by spectral discretization."""
        return SpectralDecomposition(eigenvalues, self.basis)


class SchattenIndex:
    """Schatten exponent in [1, inf]; inf means the operator norm."""

    def __init__(self, value):
        if isinstance(value, SchattenIndex):
            value = value.value
        elif isinstance(value, str):
            value = SchattenIndex.parse(value).value
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise InvalidIndexException("Invalid Schatten index: {!r}".format(value))
        if np.isnan(value) or value < 1:
            raise InvalidIndexException("Schatten index must be >= 1, got {}".format(value))
        self.value = value

    @classmethod
    def parse(cls, text):
        text = str(text).strip().lower()
        if text in ("inf", "infinity", "oo"):
            return cls(np.inf)
        try:
            return cls(float(Fraction(text)))
        except (ValueError, ZeroDivisionError):
            raise InvalidIndexException("Invalid Schatten index: {!r}".format(text))

    @property
    def is_infinite(self):
        return np.isinf(self.value)

    def dual(self):
        return dual_index(self)

    def __float__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, SchattenIndex):
            other = other.value
        try:
            return self.value == float(other)
        except (TypeError, ValueError):
            return False

    def __lt__(self, other):
        return self.value < SchattenIndex(other).value

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        if self.is_infinite:
            return "inf"
        frac = Fraction(self.value).limit_denominator(100)
        if abs(float(frac) - self.value) < 1e-12:
            return str(frac)
        return repr(self.value)

    def __repr__(self):
        return "SchattenIndex({})".format(self)


INF = SchattenIndex(np.inf)


def as_matrix(x):
    if isinstance(x, HermitianOperator):
        return x.entries
    return np.asarray(x)


def as_hermitian(h):
    if isinstance(h, HermitianOperator):
        return h
    return HermitianOperator(h)


def eig_hermitian(h):
    """
    Eigendecomposition of a Hermitian operator.

    Args:
        h (HermitianOperator or array): the operator

    Returns:
        SpectralDecomposition with ascending eigenvalues
    """
    h = as_hermitian(h)
    # LAPACK returns ascending eigenvalues; the input is exactly symmetrized so
    # the decomposition is a deterministic function of the entries
    matrix = (h.entries + h.entries.conj().T) / 2
    eigenvalues, basis = scipy.linalg.eigh(matrix)
    return SpectralDecomposition(eigenvalues, basis)


def function_values(f, eigenvalues):
    values = np.asarray(f(np.asarray(eigenvalues, dtype=float)))
    if not np.all(np.isfinite(values)):
        raise DomainException("{} is not finite on the spectrum".format(
            getattr(f, "label", f)))
    if np.iscomplexobj(values):
        if np.any(np.abs(values.imag) > 1e-12 * np.maximum(1, np.abs(values.real))):
            raise DomainException("{} is not real-valued on the spectrum".format(
                getattr(f, "label", f)))
        values = values.real
    return np.broadcast_to(values, np.shape(eigenvalues))


def apply_function(f, decomposition):
    """f(H) = basis diag(f(eigenvalues)) basis*."""
    if not isinstance(decomposition, SpectralDecomposition):
        decomposition = eig_hermitian(decomposition)
    values = function_values(f, decomposition.eigenvalues)
    basis = decomposition.basis
    return HermitianOperator.symmetrized((basis * values) @ basis.conj().T)


def spectral_exponential(decomposition, z):
    """basis diag(exp(z * eigenvalues)) basis* for a complex scalar z."""
    basis = decomposition.basis
    return (basis * np.exp(z * decomposition.eigenvalues)) @ basis.conj().T


def singular_values(x):
    x = as_matrix(x)
    if x.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(x)):
        raise DomainException("Non-finite matrix entries")
    return scipy.linalg.svdvals(x)


def schatten_norm(x, alpha):
    """
    Schatten alpha-norm of any complex matrix.

    Args:
        x (array): matrix
        alpha (SchattenIndex or number): exponent, inf for the operator norm

    Returns:
        float
    """
    alpha = SchattenIndex(alpha)
    s = singular_values(x)
    if len(s) == 0:
        return 0.
    top = s.max()
    if top == 0:
        return 0.
    if alpha.is_infinite:
        return float(top)
    p = alpha.value
    return float(top * np.sum((s / top) ** p) ** (1 / p))


def dual_index(alpha):
    alpha = SchattenIndex(alpha)
    if alpha.is_infinite:
        return SchattenIndex(1)
    if alpha.value == 1:
        return INF
    return SchattenIndex(alpha.value / (alpha.value - 1))


def trace_pairing(y, x):
    """tau(y x) for the standard trace."""
    y, x = as_matrix(y), as_matrix(x)
    if y.ndim != 2 or x.ndim != 2 or y.shape[1] != x.shape[0] or y.shape[0] != x.shape[1]:
        raise DimensionMismatchException(
            "Cannot pair shapes {} and {}".format(y.shape, x.shape))
    return complex(np.einsum("ij,ji->", y, x))


def commutator(x, y):
    x, y = as_matrix(x), as_matrix(y)
    return x @ y - y @ x


def random_matrix(dim, seed, scale=1.):
    """Complex Gaussian matrix with entries of variance scale^2."""
    rng = rng_from(seed)
    return scale * (rng.standard_normal((dim, dim))
                    + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def random_hermitian(dim, seed, scale=1.):
    x = random_matrix(dim, seed, scale)
    return HermitianOperator((x + x.conj().T) / 2)


def random_unitary(dim, seed):
    if dim == 1:
        phase = rng_from(seed).uniform(0, 2 * np.pi)
        return np.array([[np.exp(1j * phase)]])
    return unitary_group.rvs(dim, random_state=rng_from(seed))
