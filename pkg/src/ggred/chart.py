"""Coordinate-chart tensor calculus.

Charts are axis-aligned boxes; fields are pure functions from coordinates to
component arrays.  Differentiation is exact (nested forward-mode duals), and
everything downstream (Christoffel symbols, curvature, exterior calculus,
Lie brackets) is assembled from pointwise jets.

Component conventions, used consistently across the package:

* form components are stored fully antisymmetric with no 1/k! factors, and a
  k-form is evaluated on vectors by the plain contraction
  ``omega(X, Y, ...) = omega_{ij..} X^i Y^j ...``;
* the exterior derivative is the alternating coordinate derivative
  ``(d omega)_{i0..ik} = sum_j (-1)^j  d_{ij} omega_{i0..^ij..ik}``;
* the interior product contracts the first slot;
* the lowered curvature array is ``R[i,j,k,l] = g(R(e_i, e_j) e_l, e_k)``
  for the commutator curvature operator
  ``R(X,Y) = grad_X grad_Y - grad_Y grad_X - grad_[X,Y]``, which makes
  ``R[i,j,i,j] > 0`` on a round sphere and satisfies the first Bianchi
  identity ``R[ijkl] + R[jkil] + R[kijl] = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import dual
from .errors import DegreeError, DomainError, EvaluationError, SingularMetricError

EPS_ID = 1e-8          # tolerance for pointwise algebraic identities
EPS_CROSS = 1e-6       # tolerance for checks routed through a chart map
DOMAIN_MARGIN = 1e-3   # sampled points stay this fraction of each axis inside


@dataclass(frozen=True)
class Chart:
    """An axis-aligned coordinate box in R^dim."""

    name: str
    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("chart bounds must be non-empty and equal length")
        if not all(l < u for l, u in zip(self.lower, self.upper)):
            raise ValueError(f"chart {self.name}: need lower < upper per axis")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, point, margin: float = 0.0) -> bool:
        if len(point) != self.dim:
            return False
        for x, l, u in zip(point, self.lower, self.upper):
            pad = margin * (u - l)
            if not (l + pad < dual.body(x) < u - pad):
                return False
        return True

    def require_inside(self, point):
        if not self.contains(point):
            raise DomainError(
                f"point {tuple(float(dual.body(x)) for x in point)} outside "
                f"chart {self.name!r}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Seeded uniform draws strictly inside the domain."""
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        pad = DOMAIN_MARGIN * (hi - lo)
        return rng.uniform(lo + pad, hi - pad, size=(n, self.dim))


@dataclass(frozen=True)
class Valence:
    """Tensor slot signature: cov lower slots, con upper slots."""

    cov: int = 0
    con: int = 0
    form: bool = False

    @property
    def rank(self) -> int:
        return self.cov + self.con


SCALAR = Valence(0, 0)
VECTOR = Valence(0, 1)
COVECTOR = Valence(1, 0, form=True)
METRIC = Valence(2, 0)

def form_valence(k: int) -> Valence:
    return Valence(k, 0, form=True)


@dataclass(frozen=True)
class ChartField:
    """A tensor-valued function of chart coordinates.

    ``fn`` maps a coordinate sequence (floats or duals) to a component
    array of shape ``(dim,) * valence.rank``; it must be pure and built from
    the math functions in :mod:`ggred.dual` so derivatives flow through it.
    """

    chart: Chart
    valence: Valence
    fn: Callable[[Sequence], object]
    name: str = ""

    def __call__(self, coords):
        return self.fn(coords)


@dataclass
class PointJet:
    """Value and partial derivatives of a field at one point.

    ``d1[a]`` is the a-th partial of the component array; ``d2[a, b]`` is
    the mixed second partial (computed independently for every (a, b), so
    its symmetry is a genuine check on the dual-number engine).
    """

    point: tuple
    value: np.ndarray
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None


def _eval_checked(fn, coords):
    out = np.asarray(fn(coords), dtype=object)
    flat = out.ravel()
    for v in flat:
        if not np.isfinite(dual.body(v)):
            raise EvaluationError("field evaluation produced non-finite output")
    return out


def differentiate(f, point, order: int = 1, chart: Chart | None = None) -> PointJet:
    """Exact partial derivatives of ``f`` at ``point`` via dual numbers.

    ``f`` may be a ChartField (its chart bounds are then enforced) or any
    pure callable on coordinates.  ``order`` is 1 or 2; second derivatives
    use nested duals with independent level tags.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    fn = f.fn if isinstance(f, ChartField) else f
    use_chart = chart or (f.chart if isinstance(f, ChartField) else None)
    if use_chart is not None:
        use_chart.require_inside(point)
    n = len(point)
    value = dual.tighten(_eval_checked(fn, list(point)))

    d1_parts = []
    for a in range(n):
        _, da = dual.partial(fn, list(point), a)
        d1_parts.append(da)
    d1 = _stack(d1_parts)

    d2 = None
    if order == 2:
        rows = []
        for a in range(n):
            def da_fn(coords, _a=a):
                lvl = dual.fresh_level()
                c = list(coords)
                c[_a] = dual.Dual(c[_a], 1.0, lvl)
                _, eps = dual._split(fn(c), lvl)
                return eps
            row = [dual.partial(da_fn, list(point), b)[1] for b in range(n)]
            rows.append(_stack(row))
        d2 = _stack(rows)
    return PointJet(tuple(point), value, d1, d2)


def _stack(parts):
    first = np.asarray(parts[0])
    if first.dtype == object:
        return np.asarray(parts, dtype=object)
    return np.array(parts)


def metric_inverse(gmat):
    """Inverse of a metric component matrix; raises on singular input."""
    g = np.asarray(gmat)
    if g.dtype == object:
        return invert_matrix(g)
    try:
        np.linalg.cholesky(0.5 * (g + g.T))
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError("metric not positive definite") from exc
    return np.linalg.inv(g)


def invert_matrix(m):
    """Gauss-Jordan inverse that tolerates dual-number entries."""
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    a = m.copy()
    inv = np.empty((n, n), dtype=object)
    inv[:] = 0.0
    for i in range(n):
        inv[i, i] = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(dual.body(a[r, col])))
        if abs(dual.body(a[piv, col])) < 1e-14:
            raise SingularMetricError("singular matrix in dual-aware inverse")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            inv[[col, piv]] = inv[[piv, col]]
        scale = a[col, col]
        a[col] = a[col] / scale
        inv[col] = inv[col] / scale
        for r in range(n):
            if r != col:
                fac = a[r, col]
                a[r] = a[r] - fac * a[col]
                inv[r] = inv[r] - fac * inv[col]
    return inv


def solve_linear(m, rhs):
    """LU solve with partial pivoting, tolerant of dual-number entries."""
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    a = m.copy()
    b = np.asarray(rhs, dtype=object).copy()
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(dual.body(a[r, col])))
        if abs(dual.body(a[piv, col])) < 1e-14:
            raise SingularMetricError("singular linear system")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        for r in range(col + 1, n):
            fac = a[r, col] / a[col, col]
            a[r, col:] = a[r, col:] - fac * a[col, col:]
            b[r] = b[r] - fac * b[col]
    x = np.empty(n, dtype=object)
    for r in range(n - 1, -1, -1):
        acc = b[r]
        for c in range(r + 1, n):
            acc = acc - a[r, c] * x[c]
        x[r] = acc / a[r, r]
    return x


def christoffel(g: ChartField, point) -> np.ndarray:
    """Levi-Civita Christoffel symbols Gamma^i_{jk} at a point."""
    jet = differentiate(g, point, order=1)
    return christoffel_from_jet(jet)


def christoffel_from_jet(jet: PointJet) -> np.ndarray:
    gmat = jet.value
    if np.asarray(gmat).dtype != object and \
            np.max(np.abs(gmat - gmat.T)) > EPS_ID:
        raise SingularMetricError("metric component matrix is not symmetric")
    ginv = metric_inverse(gmat)
    dg = jet.d1  # dg[a, i, j] = d_a g_{ij}
    # Gamma^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{jl} - d_l g_{jk})
    t = np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) \
        - np.einsum("ljk->ljk", dg)
    return 0.5 * np.einsum("il,ljk->ijk", ginv, t)


def riemann(g: ChartField, point) -> np.ndarray:
    """Fully lowered curvature R[i,j,k,l] = g(R(e_i,e_j) e_l, e_k).

    Antisymmetric in (i,j) and in (k,l), pair symmetric, and positive on
    sphere diagonals: on the unit round 2-sphere R[0,1,0,1] = sin(theta)^2.
    """
    jet = differentiate(g, point, order=2)
    return riemann_from_jet(jet)


def riemann_from_jet(jet: PointJet) -> np.ndarray:
    gmat = jet.value
    n = gmat.shape[0]
    ginv = metric_inverse(gmat)
    dg = jet.d1
    d2g = jet.d2
    t = np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) \
        - np.einsum("ljk->ljk", dg)
    gamma = 0.5 * np.einsum("il,ljk->ijk", ginv, t)
    # d_a Gamma^i_{jk}: differentiate the defining formula by hand.
    dt = np.einsum("ajlk->aljk", d2g) + np.einsum("aklj->aljk", d2g) \
        - np.einsum("aljk->aljk", d2g)
    dginv = -np.einsum("im,amn,nl->ail", ginv, dg, ginv)
    dgamma = 0.5 * (np.einsum("ail,ljk->aijk", dginv, t)
                    + np.einsum("il,aljk->aijk", ginv, dt))
    # Operator components: R(e_a, e_b) e_c = Rop[m, c, a, b] e_m.
    rop = (np.einsum("ambc->mcab", dgamma)
           - np.einsum("bmac->mcab", dgamma)
           + np.einsum("mal,lbc->mcab", gamma, gamma)
           - np.einsum("mbl,lac->mcab", gamma, gamma))
    # Lower and flip the last operand into the pairing convention.
    rlow = np.einsum("km,mlij->ijkl", gmat, rop)
    return rlow


def exterior_derivative(jet: PointJet, degree: int) -> np.ndarray:
    """(d omega) components from a first-order jet of a k-form."""
    n = len(jet.point)
    if degree == 0:
        return jet.d1
    out_shape = (n,) * (degree + 1)
    sample = jet.d1.ravel()[0]
    dtype = object if isinstance(sample, dual.Dual) or jet.d1.dtype == object \
        else float
    out = np.zeros(out_shape, dtype=dtype)
    for idx in itertools.product(range(n), repeat=degree + 1):
        acc = 0.0
        for j in range(degree + 1):
            rest = idx[:j] + idx[j + 1:]
            term = jet.d1[(idx[j],) + rest]
            acc = acc + term if j % 2 == 0 else acc - term
        out[idx] = acc
    return out


def wedge(omega: np.ndarray, eta: np.ndarray, p: int, q: int) -> np.ndarray:
    """Wedge product of fully antisymmetric component arrays (shuffle sum)."""
    n = omega.shape[0] if p else eta.shape[0]
    if p + q > n:
        raise DegreeError(f"wedge degree {p}+{q} exceeds dimension {n}")
    if p == 0:
        return omega * eta
    if q == 0:
        return eta * omega
    out = np.zeros((n,) * (p + q), dtype=object)
    indices = list(range(p + q))
    shuffles = [
        (sel, tuple(i for i in indices if i not in sel))
        for sel in itertools.combinations(indices, p)
    ]
    for idx in itertools.product(range(n), repeat=p + q):
        acc = 0.0
        for sel, rest in shuffles:
            perm = sel + rest
            sign = _perm_sign(perm)
            a = omega[tuple(idx[i] for i in sel)]
            b = eta[tuple(idx[i] for i in rest)]
            acc = acc + sign * a * b
        out[idx] = acc
    return dual.tighten(out)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def interior(vector, omega: np.ndarray, degree: int) -> np.ndarray:
    """Contraction of a k-form with a vector in the first slot."""
    if degree < 1:
        raise DegreeError("interior product needs a form of degree >= 1")
    return np.tensordot(np.asarray(vector, dtype=object), omega, axes=(0, 0))


def form_calculus(omega: ChartField, op: str, point, other=None):
    """Pointwise exterior calculus: op in {'d', 'wedge', 'interior'}.

    ``other`` is a second form field for 'wedge' or a vector field for
    'interior'.  Returns the component array of the result at ``point``.
    """
    if not omega.valence.form and omega.valence.rank > 0:
        raise DegreeError("form_calculus needs an antisymmetric form field")
    k = omega.valence.cov
    if op == "d":
        jet = differentiate(omega, point, order=1)
        return exterior_derivative(jet, k)
    if op == "wedge":
        q = other.valence.cov
        if k + q > omega.chart.dim:
            raise DegreeError("wedge degrees exceed chart dimension")
        return wedge(np.asarray(omega(point), dtype=object),
                     np.asarray(other(point), dtype=object), k, q)
    if op == "interior":
        if k < 1:
            raise DegreeError("interior product needs degree >= 1")
        return dual.tighten(interior(other(point), np.asarray(omega(point),
                                                              dtype=object), k))
    raise ValueError(f"unknown form operation {op!r}")


def lie_bracket(x: ChartField, y: ChartField, point) -> np.ndarray:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i at a point."""
    jx = differentiate(x, point, order=1)
    jy = differentiate(y, point, order=1)
    return (np.einsum("j,ji->i", jx.value, jy.d1)
            - np.einsum("j,ji->i", jy.value, jx.d1))


def lie_derivative_metric(v: ChartField, g: ChartField, point) -> np.ndarray:
    """(L_V g)_{ij} at a point."""
    jv = differentiate(v, point, order=1)
    jg = differentiate(g, point, order=1)
    return (np.einsum("k,kij->ij", jv.value, jg.d1)
            + np.einsum("kj,ik->ij", jg.value, jv.d1)
            + np.einsum("ik,jk->ij", jg.value, jv.d1))


def lie_derivative_form(v: ChartField, omega: ChartField, point) -> np.ndarray:
    """(L_V omega) for a k-form, via Cartan's formula i_V d + d i_V."""
    k = omega.valence.cov
    jet = differentiate(omega, point, order=1)
    dom = exterior_derivative(jet, k)
    vval = differentiate(v, point, order=1).value
    term1 = interior(vval, np.asarray(dom, dtype=object), k + 1)

    if k == 0:
        return dual.tighten(term1)

    def ivomega(coords):
        w = np.asarray(omega.fn(coords), dtype=object)
        vv = np.asarray(v.fn(coords), dtype=object)
        return interior(vv, w, k)

    jet2 = differentiate(ivomega, point, order=1, chart=omega.chart)
    term2 = exterior_derivative(jet2, k - 1)
    return dual.tighten(np.asarray(term1, dtype=object) + term2)


def antisymmetry_residual(field: ChartField, points) -> float:
    """Worst violation of slot antisymmetry for a form-valued field."""
    if not field.valence.form or field.valence.cov < 2:
        return 0.0
    k = field.valence.cov
    worst = 0.0
    for p in points:
        arr = dual.tighten(np.asarray(field(p), dtype=object))
        for a in range(k - 1):
            swapped = np.swapaxes(arr, a, a + 1)
            worst = max(worst, float(np.max(np.abs(arr + swapped))))
    return worst


def mgs_orthonormalize(vectors, gmat, tol: float = 1e-10):
    """Modified Gram-Schmidt w.r.t. the metric, fixed input order.

    Near-dependent vectors are dropped; the result is deterministic for a
    fixed input sequence.
    """
    basis = []
    scale = np.sqrt(np.trace(gmat) / gmat.shape[0])
    for v in vectors:
        w = np.array(v, dtype=float)
        for b in basis:
            w = w - (b @ gmat @ w) * b
        nrm = float(np.sqrt(w @ gmat @ w))
        if nrm > tol * scale:
            basis.append(w / nrm)
    return basis
