import numpy as np
from scipy.special import roots_legendre


class LabException(Exception):

    def message(self):
        if self.args:
            return self.args[0]
        else:
            return self.__class__.__name__


class SymmetryViolationException(LabException):
    pass


class DomainException(LabException):
    pass


class DimensionMismatchException(LabException):
    pass


class InvalidIndexException(LabException):
    pass


class NonlinearMapException(LabException):
    pass


class UndefinedRatioException(LabException):
    pass


class EmptyInputException(LabException):
    pass


class MixedKindsException(LabException):
    pass


class FourierGridException(LabException):
    """Raised when a Fourier-weight grid cannot meet the requested tolerance.
    The suggested refinement is kept on the exception."""

    def __init__(self, msg, suggested_smax=None, suggested_ds=None):
        super().__init__(msg)
        self.suggested_smax = suggested_smax
        self.suggested_ds = suggested_ds


class QuadratureBudgetException(LabException):

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class ConfigException(LabException):

    def __init__(self, msg, exit_code=5):
        super().__init__(msg)
        self.exit_code = exit_code


def gauss_legendre(steps, a=0.0, b=1.0):
    """
    Gauss-Legendre nodes and weights on [a, b].

    Args:
        steps (int): number of nodes
        a, b (float): interval

    Returns:
        (nodes, weights): 1D arrays
    """
    x, w = roots_legendre(int(steps))
    half = (b - a) / 2
    return a + half * (x + 1), half * w


def composite_gauss_legendre(edges, order=16):
    """
    Composite Gauss-Legendre rule over consecutive panels.

    Args:
        edges (np.array): panel edges, shape (..., P + 1), sorted on the last axis
        order (int): nodes per panel

    Returns:
        (nodes, weights): arrays of shape (..., P * order)
    """
    x, w = roots_legendre(order)
    edges = np.asarray(edges, dtype=float)
    left = edges[..., :-1, None]
    half = (edges[..., 1:, None] - left) / 2
    nodes = left + half * (x + 1)
    weights = half * w
    shape = edges.shape[:-1] + (-1,)
    return nodes.reshape(shape), weights.reshape(shape)


def apply_rows_chunked(array, function, chunk_size=10 ** 6):
    """Split array by rows and apply the function to each part.
    Returns output equivalent to function(array); parts are processed and
    concatenated in row order, so the result does not depend on chunking
    beyond floating point summation inside each row.
    """
    array = np.asarray(array)
    if array.ndim == 0 or len(array) == 0:
        return function(array)
    row_size = max(array[0].size, 1)
    rows_per_chunk = max(chunk_size // row_size, 1)
    chunks = max(int(np.ceil(len(array) / rows_per_chunk)), 1)
    parts = np.array_split(array, chunks, axis=0)
    return np.concatenate([function(p) for p in parts], axis=0)


def rng_from(seed):
    """A numpy Generator from a seed, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed, count):
    """Independent child seed sequences, one per trial index."""
    return np.random.SeedSequence(seed).spawn(count)
