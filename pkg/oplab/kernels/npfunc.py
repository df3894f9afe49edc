import numpy as np

from oplab.utils import rng_from


COINCIDENCE_TOL = 1e-12


class Function:
    """
    A vectorised real function with a declared Lipschitz bound.

    Attributes:
        lip_bound (float): declared ||f||_Lip1 (on `interval` when the
            function is only Lipschitz on a bounded set)
        label (str): short name used in records and reports
        kinks (tuple): points where f is not differentiable; quadratures
            insert them as panel edges
        window (tuple or None): interval outside which f' is negligible,
            None when f' does not decay
        interval (tuple or None): working interval for `lip_bound`, None
            when the bound is global
    """

    kinks = ()
    window = None
    interval = None

    def __init__(self, fn, lip_bound=None, label=None):
        self.fn = fn
        self.lip_bound = lip_bound
        self.label = label if label is not None else type(self).__name__.lower()

    def __call__(self, x):
        return self.fn(x)

    def __eq__(self, other):
        return type(self) is type(other) \
            and self.fn == other.fn

    def __hash__(self):
        return hash((type(self), self.fn))

    def __repr__(self):
        return "<{} {}>".format(type(self).__name__, self.label)


class Constant(Function):

    def __init__(self, c):
        super().__init__(None, lip_bound=0., label="const({:g})".format(c))
        self.c = c

    def __call__(self, x):
        x = np.asarray(x)
        return np.ones(x.shape)*self.c

    def __eq__(self, other):
        return super().__eq__(other) \
               and self.c == other.c

    def __hash__(self):
        return hash((super().__hash__(), self.c))


class Identity(Function):

    def __init__(self):
        super().__init__(None, lip_bound=1., label="identity")

    def __call__(self, x):
        return np.asarray(x, dtype=float)


class Absolute(Function):

    kinks = (0.,)

    def __init__(self):
        super().__init__(None, lip_bound=1., label="abs")

    def __call__(self, x):
        return np.abs(x)


class Relu(Function):

    kinks = (0.,)

    def __init__(self):
        super().__init__(None, lip_bound=1., label="relu")

    def __call__(self, x):
        return np.maximum(x, 0.)


class Sine(Function):

    def __init__(self):
        super().__init__(None, lip_bound=1., label="sin")

    def __call__(self, x):
        return np.sin(x)


class Square(Function):
    """t^2, Lipschitz with bound 2*halfwidth on [-halfwidth, halfwidth]."""

    def __init__(self, halfwidth=1.):
        super().__init__(None, lip_bound=2. * halfwidth, label="square")
        self.halfwidth = halfwidth
        self.interval = (-halfwidth, halfwidth)

    def __call__(self, x):
        return np.square(x)

    def __eq__(self, other):
        return super().__eq__(other) and self.halfwidth == other.halfwidth

    def __hash__(self):
        return hash((super().__hash__(), self.halfwidth))


class WindowedRamp(Function):
    """t * exp(-t^2/2); the derivative (1 - t^2) exp(-t^2/2) peaks at 1."""

    window = (-10., 10.)

    def __init__(self):
        super().__init__(None, lip_bound=1., label="windowed-ramp")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x * np.exp(-x**2 / 2)

    @staticmethod
    def derivative(x):
        x = np.asarray(x, dtype=float)
        return (1 - x**2) * np.exp(-x**2 / 2)


class PiecewiseLinear(Function):
    """
    Linear interpolation through (knots, values), extended linearly with the
    first and last slopes.
    """

    def __init__(self, knots, values, label="pwl"):
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if len(knots) < 2 or len(knots) != len(values) or np.any(np.diff(knots) <= 0):
            raise ValueError("Knots must be increasing and match values")
        self.knots = knots
        self.values = values
        self.slopes = np.diff(values) / np.diff(knots)
        super().__init__(None, lip_bound=float(np.max(np.abs(self.slopes))), label=label)
        self.kinks = tuple(knots)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.knots, self.values)
        left = x < self.knots[0]
        right = x > self.knots[-1]
        out = np.where(left, self.values[0] + self.slopes[0] * (x - self.knots[0]), out)
        out = np.where(right, self.values[-1] + self.slopes[-1] * (x - self.knots[-1]), out)
        return out

    def __eq__(self, other):
        return super().__eq__(other) \
            and np.array_equal(self.knots, other.knots) \
            and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((super().__hash__(), self.knots.tobytes(), self.values.tobytes()))


def random_piecewise_linear(seed, pieces=8, interval=(-3., 3.)):
    """Piecewise-linear function with slopes +-1 drawn from the seed."""
    rng = rng_from(seed)
    inner = np.sort(rng.uniform(interval[0], interval[1], pieces - 1))
    knots = np.concatenate([[interval[0]], inner, [interval[1]]])
    knots = np.unique(knots)
    slopes = rng.choice([-1., 1.], size=len(knots) - 1)
    values = np.concatenate([[0.], np.cumsum(slopes * np.diff(knots))])
    return PiecewiseLinear(knots, values)


class Scaled(Function):

    def __init__(self, element, factor):
        super().__init__(None, lip_bound=abs(factor) * element.lip_bound,
                         label="{:g}*{}".format(factor, element.label))
        self.element = element
        self.factor = factor
        self.kinks = tuple(element.kinks)
        self.window = element.window
        self.interval = element.interval

    def __call__(self, x):
        return self.factor * self.element(x)


class Sum(Function):

    def __init__(self, *elements):
        bounds = [getattr(el, "lip_bound", None) for el in elements]
        lip = None if any(b is None for b in bounds) else float(sum(bounds))
        super().__init__(None, lip_bound=lip,
                         label="+".join(getattr(el, "label", "f") for el in elements))
        self.elements = elements
        self.kinks = tuple(sorted(set(k for el in elements for k in getattr(el, "kinks", ()))))

    def __call__(self, x):
        acc = None
        for el in self.elements:
            current = el(x)
            if acc is None:
                acc = current
            else:
                acc = acc + current
        return acc

    def __eq__(self, other):
        return super().__eq__(other) \
               and self.elements == other.elements

    def __hash__(self):
        return hash((super().__hash__(), self.elements))


class Dilated(Function):
    """m * f(t / m); keeps the Lipschitz bound and scales the kinks."""

    def __init__(self, element, m):
        super().__init__(None, lip_bound=element.lip_bound,
                         label="dilated({},{})".format(element.label, m))
        self.element = element
        self.m = m
        self.kinks = tuple(m * k for k in element.kinks)
        if element.window is not None:
            self.window = (m * element.window[0], m * element.window[1])

    def __call__(self, x):
        return self.m * self.element(np.asarray(x, dtype=float) / self.m)


def nondecreasing_shift(f):
    """f(t) + t, non-decreasing whenever ||f||_Lip1 <= 1."""
    return Sum(f, Identity())


def divided_difference(f, lam, mu, tol=COINCIDENCE_TOL):
    """
    (f(lam) - f(mu)) / (lam - mu), and 0 where |lam - mu| <= tol.

    Broadcasts over array arguments.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    lam, mu = np.broadcast_arrays(lam, mu)
    diff = lam - mu
    close = np.abs(diff) <= tol
    numerator = np.asarray(f(lam)) - np.asarray(f(mu))
    out = np.where(close, 0., numerator / np.where(close, 1., diff))
    if out.ndim == 0:
        return complex(out)
    return out


def sampled_slope(f, interval=(-4., 4.), pairs=10**4, seed=0):
    """Largest |f(a) - f(b)| / |a - b| over seeded random pairs.

    Half of the pairs are drawn close together so that local slopes near
    kinks are sampled as well as long-range ones.
    """
    if f.interval is not None:
        interval = f.interval
    rng = rng_from(seed)
    lo, hi = interval
    half = pairs // 2
    a = rng.uniform(lo, hi, pairs)
    b = rng.uniform(lo, hi, pairs)
    b[:half] = np.clip(a[:half] + rng.normal(0, 1e-3 * (hi - lo), half), lo, hi)
    keep = np.abs(a - b) > 1e-12
    a, b = a[keep], b[keep]
    return float(np.max(np.abs(np.asarray(f(a)) - np.asarray(f(b))) / np.abs(a - b)))


def check_lipschitz(f, bound=None, interval=(-4., 4.), pairs=10**4, seed=0):
    if bound is None:
        bound = f.lip_bound
    return sampled_slope(f, interval, pairs, seed) <= bound + 1e-9


def smooth_step(u, sharpness=1.):
    """
    C-infinity step: 0 for u <= 0, 1 for u >= 1, built from exp(-sharpness/u).
    """
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        left = np.where(u > 0, np.exp(-sharpness / np.where(u > 0, u, 1.)), 0.)
        v = 1 - u
        right = np.where(v > 0, np.exp(-sharpness / np.where(v > 0, v, 1.)), 0.)
        total = left + right
        out = np.where(total > 0, left / np.where(total > 0, total, 1.), 0.)
    return np.where(u >= 1, 1., np.where(u <= 0, 0., out))


class FunctionRegistry:
    """Named factories for the shipped test functions.

    A factory is called with a seed and returns a Function; deterministic
    functions ignore the seed.
    """

    def __init__(self):
        self.registered = {}

    def register(self, name, factory, priority=1000):
        self.registered[name] = (factory, priority)

    def sorted(self):
        for name, _ in sorted(self.registered.items(), key=lambda x: (x[1][1], x[0])):
            yield name

    def names(self):
        return list(self.sorted())

    def create(self, name, seed=0):
        try:
            factory, _ = self.registered[name]
        except KeyError:
            raise KeyError("Unknown function {!r}; known: {}".format(
                name, ", ".join(self.sorted())))
        return factory(seed)


function_catalog = FunctionRegistry()
function_catalog.register("identity", lambda seed: Identity(), 10)
function_catalog.register("abs", lambda seed: Absolute(), 20)
function_catalog.register("relu", lambda seed: Relu(), 30)
function_catalog.register("sin", lambda seed: Sine(), 40)
function_catalog.register("pwl", random_piecewise_linear, 50)
function_catalog.register("windowed-ramp", lambda seed: WindowedRamp(), 70)
