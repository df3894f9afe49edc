from collections.abc import Mapping

import numpy as np

from oplab.kernels.npfunc import PiecewiseLinear, Constant
from oplab.utils import DomainException, rng_from


class IntegerProfile:
    """
    Integer-valued non-decreasing f on the index window [-K, K] with f(0) = 0
    and 0 <= f(k) - f(j) <= 2 (k - j) for j <= k.
    """

    def __init__(self, K, values):
        values = np.asarray(values)
        if K < 1 or values.shape != (2 * K + 1,):
            raise DomainException("Profile needs 2K+1 values for K >= 1")
        if not np.all(values == np.round(values)):
            raise DomainException("Profile values must be integers")
        values = values.astype(np.int64)
        steps = np.diff(values)
        if values[K] != 0:
            raise DomainException("Profile must vanish at 0")
        if np.any(steps < 0) or np.any(steps > 2):
            raise DomainException("Profile increments must lie in [0, 2]")
        values.setflags(write=False)
        self.K = int(K)
        self.values = values

    @classmethod
    def from_increments(cls, increments):
        """Increments a_m = f(m) - f(m-1) for m = -K+1..K."""
        increments = np.asarray(increments)
        if len(increments) % 2:
            raise DomainException("Need an even number of increments")
        K = len(increments) // 2
        values = np.concatenate([[0], np.cumsum(increments)])
        return cls(K, values - values[K])

    @classmethod
    def from_signs(cls, signs):
        """The profile with increments a_m + 1 for signs a_m = +-1."""
        signs = np.asarray(signs)
        if not np.all(np.isin(signs, (-1, 1))):
            raise DomainException("Signs must be +-1")
        return cls.from_increments(signs + 1)

    @classmethod
    def identity(cls, K):
        return cls(K, np.arange(-K, K + 1))

    @property
    def indices(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def nondecreasing(self):
        return True

    @property
    def strictly_increasing(self):
        return bool(np.all(self.increments() > 0))

    def increments(self):
        return np.diff(self.values)

    def __call__(self, k):
        k = np.asarray(k)
        if np.any(np.abs(k) > self.K):
            raise DomainException("Index outside the profile window [-{0}, {0}]".format(self.K))
        return self.values[k + self.K]

    def as_function(self):
        """Piecewise-linear interpolant of the profile."""
        if np.all(self.values == 0):
            return Constant(0)
        return PiecewiseLinear(self.indices, self.values, label="profile")

    def to_json(self):
        return {"K": self.K, "values": [int(v) for v in self.values]}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["K"]), data["values"])

    def __eq__(self, other):
        return type(self) is type(other) and self.K == other.K \
            and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((type(self), self.K, self.values.tobytes()))


def random_integer_profile(K, seed, increments=(0, 2)):
    """Profile on [-K, K] whose increments are drawn uniformly from `increments`."""
    if K < 1:
        raise DomainException("Window must satisfy K >= 1")
    rng = rng_from(seed)
    return IntegerProfile.from_increments(rng.choice(np.asarray(increments), size=2 * K))


def power_sequence(s):
    """n -> |n|^{is} with 0^{is} = 0."""
    def seq(n):
        n = np.asarray(n, dtype=float)
        safe = np.where(n == 0, 1., np.abs(n))
        return np.where(n == 0, 0., np.exp(1j * s * np.log(safe)))
    return seq


def sequence_values(seq, indices):
    if isinstance(seq, Mapping):
        try:
            return np.array([seq[int(n)] for n in indices], dtype=complex)
        except KeyError as ex:
            raise DomainException("Sequence is missing index {}".format(ex.args[0]))
    return np.asarray(seq(np.asarray(indices)), dtype=complex)


def dyadic_variation(seq, k):
    """
    Total variation of seq over the dyadic blocks 2^k <= n <= 2^{k+1} and
    -2^{k+1} <= n <= -2^k; the larger of the two is returned.

    Args:
        seq (Mapping or callable): integer index -> complex
        k (int): block number, k >= 0
    """
    if k < 0:
        raise DomainException("Block number must be nonnegative")
    positive = np.arange(2 ** k, 2 ** (k + 1) + 1)
    negative = -positive[::-1]
    totals = [float(np.sum(np.abs(np.diff(sequence_values(seq, block)))))
              for block in (positive, negative)]
    return max(totals)
