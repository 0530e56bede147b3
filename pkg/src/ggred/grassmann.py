"""Exact arithmetic in a real Grassmann algebra, Berezin integrals, Pfaffians.

Elements are stored sparsely as {generator-subset bitmask: coefficient}.
Generators are indexed 0..n-1; a set bit i in a mask stands for theta_i, and
the stored coefficient multiplies the ascending-ordered product
theta_{i1} theta_{i2} ... (i1 < i2 < ...).

Berezin convention: integrals are iterated left derivatives applied from the
innermost (last listed) measure outwards, so that for a single pair
``integrate(e, [p, m])`` maps theta_m theta_p -> 1.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import schur

from .errors import AsymmetryError, OddDimensionError, UnknownGeneratorError

MAX_GENERATORS = 16
_COEFF_TOL = 0.0  # exact storage; pruning only of exact zeros


def _mul_sign(amask: int, bmask: int) -> int:
    """Sign of (theta_A) * (theta_B) when merging ascending products."""
    swaps = 0
    a = amask
    b = bmask
    while b:
        low = b & -b
        # bits of a strictly greater than this bit of b
        swaps += bin(a >> (low.bit_length())).count("1")
        b &= b - 1
    return -1 if swaps % 2 else 1


class GrassmannElement:
    """A real element of the Grassmann algebra on ``n`` generators."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict[int, float] | None = None):
        if not 0 < n <= MAX_GENERATORS:
            raise ValueError(f"generator count must be in 1..{MAX_GENERATORS}")
        self.n = n
        self.coeffs = dict(coeffs) if coeffs else {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def scalar(cls, n: int, value: float) -> "GrassmannElement":
        return cls(n, {0: float(value)} if value != 0.0 else {})

    @classmethod
    def generator(cls, n: int, i: int) -> "GrassmannElement":
        if not 0 <= i < n:
            raise UnknownGeneratorError(f"generator {i} outside 0..{n - 1}")
        return cls(n, {1 << i: 1.0})

    def copy(self) -> "GrassmannElement":
        return GrassmannElement(self.n, self.coeffs)

    # -- ring operations ---------------------------------------------------

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("mixing algebras of different generator counts")

    def __add__(self, other):
        if np.isscalar(other):
            other = GrassmannElement.scalar(self.n, other)
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            v = out.get(m, 0.0) + c
            if v == 0.0:
                out.pop(m, None)
            else:
                out[m] = v
        return GrassmannElement(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.n, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = GrassmannElement.scalar(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            if other == 0.0:
                return GrassmannElement(self.n)
            return GrassmannElement(
                self.n, {m: c * other for m, c in self.coeffs.items()})
        self._check(other)
        out: dict[int, float] = {}
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                if ma & mb:
                    continue
                m = ma | mb
                v = out.get(m, 0.0) + _mul_sign(ma, mb) * ca * cb
                if v == 0.0:
                    out.pop(m, None)
                else:
                    out[m] = v
        return GrassmannElement(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, GrassmannElement):
            return self.n == other.n and (self - other).max_abs() == 0.0
        return NotImplemented

    # -- structure ---------------------------------------------------------

    def coefficient(self, mask: int) -> float:
        return self.coeffs.get(mask, 0.0)

    @property
    def body(self) -> float:
        """The degree-0 part."""
        return self.coeffs.get(0, 0.0)

    def soul(self) -> "GrassmannElement":
        """The nilpotent (degree > 0) part."""
        return GrassmannElement(
            self.n, {m: c for m, c in self.coeffs.items() if m})

    def degree_part(self, k: int) -> "GrassmannElement":
        return GrassmannElement(
            self.n,
            {m: c for m, c in self.coeffs.items() if bin(m).count("1") == k})

    def degrees(self) -> set[int]:
        return {bin(m).count("1") for m in self.coeffs}

    def is_even(self) -> bool:
        return all(d % 2 == 0 for d in self.degrees())

    def is_odd(self) -> bool:
        return all(d % 2 == 1 for d in self.degrees())

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def max_abs_degree(self, k: int) -> float:
        return max((abs(c) for m, c in self.coeffs.items()
                    if bin(m).count("1") == k), default=0.0)

    def exp(self) -> "GrassmannElement":
        """exp of an even element (body handled exactly, soul nilpotent)."""
        if not self.is_even():
            raise ValueError("exp is defined here for even elements only")
        import math
        nil = self.soul()
        out = GrassmannElement.scalar(self.n, 1.0)
        term = GrassmannElement.scalar(self.n, 1.0)
        for k in range(1, self.n // 2 + 1):
            term = term * nil * (1.0 / k)
            if not term.coeffs:
                break
            out = out + term
        return out * math.exp(self.body)

    def __repr__(self):
        if not self.coeffs:
            return "G(0)"
        bits = []
        for m in sorted(self.coeffs):
            gens = "".join(f"t{i}" for i in range(self.n) if m >> i & 1)
            bits.append(f"{self.coeffs[m]:+.6g}*{gens or '1'}")
        return "G(" + " ".join(bits) + ")"


def berezin_integral(e: GrassmannElement, generators) -> GrassmannElement:
    """Iterated Berezin integral over the listed generators.

    Measures apply innermost-last: ``berezin_integral(e, [p, m])`` equals
    ``int dtheta_p [ int dtheta_m e ]``, so theta_m theta_p integrates to 1.
    """
    gens = list(generators)
    if len(set(gens)) != len(gens):
        raise UnknownGeneratorError("repeated generator in Berezin measure")
    out = e
    for g in reversed(gens):
        if not 0 <= g < e.n:
            raise UnknownGeneratorError(f"generator {g} outside algebra")
        bit = 1 << g
        new: dict[int, float] = {}
        for m, c in out.coeffs.items():
            if not m & bit:
                continue
            below = bin(m & (bit - 1)).count("1")
            sign = -1.0 if below % 2 else 1.0
            new[m & ~bit] = new.get(m & ~bit, 0.0) + sign * c
        out = GrassmannElement(e.n, {m: c for m, c in new.items() if c != 0.0})
    return out


def quadratic_form(n: int, a: np.ndarray) -> GrassmannElement:
    """(1/2) sum_ij A_ij theta_i theta_j for antisymmetric A."""
    out: dict[int, float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = 0.5 * (a[i, j] - a[j, i])
            if c != 0.0:
                out[(1 << i) | (1 << j)] = c
    return GrassmannElement(n, out)


def pfaffian(a: np.ndarray) -> float:
    """Pfaffian of an antisymmetric matrix.

    Recursive expansion along the first row for n <= 8, Schur block
    diagonalization beyond that.  Pf(A)^2 = det(A).
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise AsymmetryError("pfaffian needs a square matrix")
    if n == 0:
        return 1.0
    if n % 2 == 1:
        raise OddDimensionError("pfaffian needs even dimension")
    scale = np.max(np.abs(a)) or 1.0
    if np.max(np.abs(a + a.T)) > 1e-8 * scale:
        raise AsymmetryError("matrix is not antisymmetric")
    if n <= 8:
        return _pf_recursive(a)
    blocks, orth = schur(a)
    return float(np.prod(np.diag(blocks, 1)[::2]) * np.linalg.det(orth))


def _pf_recursive(a: np.ndarray) -> float:
    n = a.shape[0]
    if n == 2:
        return float(a[0, 1])
    total = 0.0
    rest = list(range(1, n))
    for idx, j in enumerate(rest):
        keep = [k for k in rest if k != j]
        minor = a[np.ix_(keep, keep)]
        sign = -1.0 if idx % 2 else 1.0
        total += sign * a[0, j] * _pf_recursive(minor)
    return float(total)


def fermionic_gaussian(a: np.ndarray) -> float:
    """int exp((1/2) psi^T A psi) dpsi_n ... dpsi_1 = Pf(A)."""
    return pfaffian(a)


def fermionic_gaussian_berezin(a: np.ndarray) -> float:
    """Same integral evaluated through the Grassmann engine (slow path).

    Used as an independent cross-check of the Pfaffian recursion: the measure
    dpsi_n ... dpsi_1 applies dpsi_1 innermost, i.e. generators listed in
    descending order here.
    """
    n = a.shape[0]
    if n % 2 == 1:
        raise OddDimensionError("even dimension required")
    gauss = quadratic_form(n, np.asarray(a, dtype=float)).exp()
    out = berezin_integral(gauss, list(range(n - 1, -1, -1)))
    return out.body
