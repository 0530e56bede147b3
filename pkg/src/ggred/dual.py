"""Forward-mode dual numbers, nestable to arbitrary depth.

Every seeding of a derivative direction allocates a fresh level tag, so
derivatives taken inside another derivative (metric jets under a horizontal
lift under a quotient jet, and so on) never confuse their infinitesimals.
Scenario fields must use the math functions exported here (``sin``, ``cos``,
...) instead of ``numpy`` ufuncs so that dual numbers flow through them.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

_LEVELS = itertools.count(1)


def fresh_level() -> int:
    """Allocate a level tag for a new derivative direction."""
    return next(_LEVELS)


class Dual:
    """A truncated first-order expansion ``val + eps * d(level)``.

    ``val`` and ``eps`` may themselves be ``Dual`` instances of *other*
    levels, which is how second and higher derivatives are obtained.
    """

    __slots__ = ("val", "eps", "level")

    def __init__(self, val, eps, level: int):
        self.val = val
        self.eps = eps
        self.level = level

    # -- arithmetic -------------------------------------------------------

    def __add__(self, o):
        if isinstance(o, np.ndarray):
            return NotImplemented
        if isinstance(o, Dual):
            if o.level == self.level:
                return Dual(self.val + o.val, self.eps + o.eps, self.level)
            if o.level > self.level:
                return Dual(self + o.val, o.eps, o.level)
        return Dual(self.val + o, self.eps, self.level)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.eps, self.level)

    def __sub__(self, o):
        if isinstance(o, np.ndarray):
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        if isinstance(o, np.ndarray):
            return NotImplemented
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, np.ndarray):
            return NotImplemented
        if isinstance(o, Dual):
            if o.level == self.level:
                return Dual(self.val * o.val,
                            self.val * o.eps + self.eps * o.val, self.level)
            if o.level > self.level:
                return Dual(self * o.val, self * o.eps, o.level)
        return Dual(self.val * o, self.eps * o, self.level)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, np.ndarray):
            return NotImplemented
        if isinstance(o, Dual):
            if o.level == self.level:
                inv = 1.0 / o.val
                return Dual(self.val * inv,
                            (self.eps - self.val * inv * o.eps) * inv,
                            self.level)
            if o.level > self.level:
                return o.__rtruediv__(self)
        inv = 1.0 / o
        return Dual(self.val * inv, self.eps * inv, self.level)

    def __rtruediv__(self, o):
        if isinstance(o, np.ndarray):
            return NotImplemented
        # o / self with o constant relative to self.level
        inv = 1.0 / self.val
        val = o * inv
        return Dual(val, -val * inv * self.eps, self.level)

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(log(self) * p)
        if p == 2:
            return self * self
        return Dual(self.val ** p, p * self.val ** (p - 1) * self.eps,
                    self.level)

    def __rpow__(self, base):
        return exp(self * math.log(base))

    # -- comparisons act on the numeric body ------------------------------

    def __lt__(self, o):
        return body(self) < body(o)

    def __le__(self, o):
        return body(self) <= body(o)

    def __gt__(self, o):
        return body(self) > body(o)

    def __ge__(self, o):
        return body(self) >= body(o)

    def __abs__(self):
        return self if body(self) >= 0 else -self

    def __repr__(self):
        return f"Dual({self.val!r}, {self.eps!r}, L{self.level})"


def body(x):
    """Strip all dual layers, returning the underlying float."""
    while isinstance(x, Dual):
        x = x.val
    return x


def sin(x):
    if isinstance(x, Dual):
        return Dual(sin(x.val), cos(x.val) * x.eps, x.level)
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(cos(x.val), -sin(x.val) * x.eps, x.level)
    return math.cos(x)


def tan(x):
    return sin(x) / cos(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.val)
        return Dual(e, e * x.eps, x.level)
    return math.exp(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(log(x.val), x.eps / x.val, x.level)
    return math.log(x)


def sqrt(x):
    if isinstance(x, Dual):
        s = sqrt(x.val)
        return Dual(s, x.eps / (2.0 * s), x.level)
    return math.sqrt(x)


def asin(x):
    if isinstance(x, Dual):
        return Dual(asin(x.val), x.eps / sqrt(1.0 - x.val * x.val), x.level)
    return math.asin(x)


def acos(x):
    if isinstance(x, Dual):
        return Dual(acos(x.val), -x.eps / sqrt(1.0 - x.val * x.val), x.level)
    return math.acos(x)


def atan(x):
    if isinstance(x, Dual):
        return Dual(atan(x.val), x.eps / (1.0 + x.val * x.val), x.level)
    return math.atan(x)


def atan2(y, x):
    if isinstance(y, Dual) or isinstance(x, Dual):
        ylev = y.level if isinstance(y, Dual) else 0
        xlev = x.level if isinstance(x, Dual) else 0
        lev = max(ylev, xlev)
        yv, ye = (y.val, y.eps) if ylev == lev else (y, 0.0)
        xv, xe = (x.val, x.eps) if xlev == lev else (x, 0.0)
        denom = xv * xv + yv * yv
        return Dual(atan2(yv, xv), (xv * ye - yv * xe) / denom, lev)
    return math.atan2(y, x)


def hypot(x, y):
    return sqrt(x * x + y * y)


# -- derivative extraction over array-valued functions ---------------------

def _split(out, level):
    """Split an array-like of mixed floats/duals into (value, eps@level)."""
    arr = np.asarray(out, dtype=object)
    vals = np.empty(arr.shape, dtype=object)
    eps = np.empty(arr.shape, dtype=object)
    flat_a, flat_v, flat_e = arr.ravel(), vals.ravel(), eps.ravel()
    for i, e in enumerate(flat_a):
        if isinstance(e, Dual) and e.level == level:
            flat_v[i] = e.val
            flat_e[i] = e.eps
        else:
            flat_v[i] = e
            flat_e[i] = 0.0
    return vals, eps


def tighten(arr):
    """Return a float array when no duals remain, object array otherwise."""
    a = np.asarray(arr)
    if a.dtype == object:
        if any(isinstance(e, Dual) for e in a.ravel()):
            return a
        return a.astype(float)
    return a.astype(float)


def partial(fn, point, axis):
    """First partial derivative of array-valued ``fn`` along one axis.

    Returns (value, derivative) as arrays; works when ``point`` itself
    carries dual entries from an enclosing derivative.
    """
    level = fresh_level()
    coords = list(point)
    coords[axis] = Dual(coords[axis], 1.0, level)
    vals, eps = _split(fn(coords), level)
    return tighten(vals), tighten(eps)


def gradient(fn, point):
    """All first partials, stacked along a leading derivative axis."""
    parts = [partial(fn, point, a)[1] for a in range(len(point))]
    return np.array(parts) if parts and parts[0].dtype != object \
        else np.asarray(parts, dtype=object)
