"""Reduction by a free isometric action extended with 1-forms.

Given generators V_a and 1-forms xi_a making the flux equivariantly closed,
this module checks the validity conditions, builds the two horizontal
distributions tau_pm = {Y : g(Y, V_a) +/- xi_a(Y) = 0}, computes their
connection curvatures, pushes metric and flux to a user-supplied quotient
chart, and evaluates the reduced torsion connection and its curvature from
ambient data only.  Every reduced quantity has an independent cross-check:
the same object computed directly on the quotient chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import chart as ch
from . import dual
from .errors import LiftError, RankError, ScenarioError
from .genmetric import (GeneralizedMetricContext, bismut_connection_coeffs,
                        bismut_curvature, zero_flux)


@dataclass(frozen=True)
class ExtendedAction:
    """Generators V_a with companion 1-forms xi_a, a = 1..s."""

    V: tuple[ch.ChartField, ...]
    xi: tuple[ch.ChartField, ...]

    def __post_init__(self):
        if len(self.V) != len(self.xi) or not self.V:
            raise ValueError("need equal, nonzero numbers of V and xi fields")

    @property
    def s(self) -> int:
        return len(self.V)


def zero_xi(chart: ch.Chart) -> ch.ChartField:
    n = chart.dim
    return ch.ChartField(chart, ch.COVECTOR, lambda c: np.zeros(n), name="0")


@dataclass
class ConditionResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class ValidationReport:
    conditions: dict[str, ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def failing(self) -> list[str]:
        return [n for n, c in self.conditions.items() if not c.passed]

    def __repr__(self):
        rows = ", ".join(f"{n}={c.residual:.2e}{'' if c.passed else '(FAIL)'}"
                         for n, c in self.conditions.items())
        return f"ValidationReport({rows})"


def validate_extended_action(ea: ExtendedAction, ctx: GeneralizedMetricContext,
                             points, tol: float = ch.EPS_ID) -> ValidationReport:
    """Evaluate the four validity conditions at each point.

    * isotropy:      xi_a(V_b) + xi_b(V_a) = 0
    * flux_match:    d xi_a = i_{V_a} H   and   L_{V_a} xi_b = 0
    * invariance:    L_{V_a} g = 0  and  L_{V_a} H = 0
    * independence:  the V_a stay pointwise linearly independent
    """
    s = ea.s
    res = {k: 0.0 for k in ("isotropy", "flux_match", "invariance",
                            "independence")}
    for p in points:
        vvals = [np.asarray(v(p), dtype=float) for v in ea.V]
        xvals = [np.asarray(x(p), dtype=float) for x in ea.xi]
        hval = ctx.flux_at(p)
        gmat = ctx.metric_at(p)
        for a in range(s):
            for b in range(s):
                res["isotropy"] = max(
                    res["isotropy"], abs(xvals[a] @ vvals[b]
                                         + xvals[b] @ vvals[a]))
        for a in range(s):
            jxi = ch.differentiate(ea.xi[a], p, order=1)
            dxi = ch.exterior_derivative(jxi, 1)
            ivh = np.einsum("ijk,i->jk", hval, vvals[a])
            res["flux_match"] = max(res["flux_match"],
                                    float(np.max(np.abs(dxi - ivh))))
            lvg = ch.lie_derivative_metric(ea.V[a], ctx.g, p)
            res["invariance"] = max(res["invariance"],
                                    float(np.max(np.abs(lvg))))
            lvh = ch.lie_derivative_form(ea.V[a], ctx.H, p)
            res["invariance"] = max(res["invariance"],
                                    float(np.max(np.abs(lvh))))
            for b in range(s):
                lvxi = ch.lie_derivative_form(ea.V[a], ea.xi[b], p)
                res["flux_match"] = max(res["flux_match"],
                                        float(np.max(np.abs(lvxi))))
        gram = np.array([[va @ gmat @ vb for vb in vvals] for va in vvals])
        ev = np.linalg.eigvalsh(gram)
        if ev[0] <= 1e-9 * max(ev[-1], 1e-30):
            res["independence"] = max(res["independence"], 1.0)
    return ValidationReport({k: ConditionResult(k, v, tol if k != "independence"
                                                else 0.5)
                             for k, v in res.items()})


@dataclass
class ReductionMatrices:
    """The pointwise matrices G_ab, K_ab, T_ab and their inverses."""

    G: np.ndarray
    K: np.ndarray
    T: np.ndarray
    Kinv: np.ndarray
    Tinv: np.ndarray


def reduction_matrices(ea: ExtendedAction, ctx: GeneralizedMetricContext,
                       point) -> ReductionMatrices:
    """G_ab = g(V_a, V_b); K_ab = G_ab - xi_a(V_b);
    T_ab = G_ab + g^{-1}(xi_a, xi_b)."""
    gmat = ctx.metric_at(point)
    ginv = ch.metric_inverse(gmat)
    v = np.array([np.asarray(f(point), dtype=float) for f in ea.V])
    x = np.array([np.asarray(f(point), dtype=float) for f in ea.xi])
    G = v @ gmat @ v.T
    K = G - x @ v.T
    T = G + x @ ginv @ x.T
    try:
        Kinv = np.linalg.inv(K)
        np.linalg.cholesky(0.5 * (T + T.T))
        Tinv = np.linalg.inv(T)
    except np.linalg.LinAlgError as exc:
        raise RankError("K or T degenerate at point") from exc
    return ReductionMatrices(G, K, T, Kinv, Tinv)


def v_pm_values(ea: ExtendedAction, ctx: GeneralizedMetricContext, point,
                sign: int):
    """Rows V_a +/- g^{-1} xi_a at a point (dual-safe)."""
    gmat = np.asarray(ctx.g(point), dtype=object)
    ginv = ch.invert_matrix(gmat)
    out = []
    for vf, xf in zip(ea.V, ea.xi):
        v = np.asarray(vf(point), dtype=object)
        x = np.asarray(xf(point), dtype=object)
        out.append(v + sign * (ginv @ x))
    return out


def v_pm_field(ea: ExtendedAction, ctx: GeneralizedMetricContext, a: int,
               sign: int) -> ch.ChartField:
    """The vector field V_a +/- g^{-1} xi_a."""
    def fn(coords):
        return v_pm_values(ea, ctx, coords, sign)[a]
    return ch.ChartField(ctx.chart, ch.VECTOR, fn,
                         name=f"V{a}{'+' if sign > 0 else '-'}")


def xi_pm_field(ea: ExtendedAction, ctx: GeneralizedMetricContext, a: int,
                sign: int) -> ch.ChartField:
    """The 1-form g(V_a^pm) = g(V_a) +/- xi_a."""
    def fn(coords):
        gmat = np.asarray(ctx.g(coords), dtype=object)
        v = np.asarray(ea.V[a](coords), dtype=object)
        x = np.asarray(ea.xi[a](coords), dtype=object)
        return gmat @ v + sign * x
    return ch.ChartField(ctx.chart, ch.COVECTOR, fn,
                         name=f"xi{a}{'+' if sign > 0 else '-'}")


def constraint_rows(ea: ExtendedAction, ctx: GeneralizedMetricContext, point,
                    sign: int):
    """Rows (g(V_a) + sign * xi_a)_j; tau_sign is their joint kernel."""
    gmat = np.asarray(ctx.g(point), dtype=object)
    rows = []
    for vf, xf in zip(ea.V, ea.xi):
        v = np.asarray(vf(point), dtype=object)
        x = np.asarray(xf(point), dtype=object)
        rows.append(gmat @ v + sign * x)
    return rows


def horizontal_frames(ea: ExtendedAction, ctx: GeneralizedMetricContext,
                      point):
    """Orthonormal (w.r.t. g) bases of tau_+ and tau_- at a point.

    Each tau_sign is the g-orthogonal complement of span{V_a^sign}; the
    basis comes from modified Gram-Schmidt over projected coordinate
    vectors in fixed order, so it is deterministic.
    """
    gmat = ctx.metric_at(point)
    n = gmat.shape[0]
    s = ea.s
    frames = []
    for sign in (+1, -1):
        vpm = np.array([np.asarray(v, dtype=float)
                        for v in v_pm_values(ea, ctx, point, sign)])
        t = vpm @ gmat @ vpm.T
        try:
            tinv = np.linalg.inv(t)
        except np.linalg.LinAlgError as exc:
            raise RankError("V^pm degenerate; frame undefined") from exc
        proj = np.eye(n) - vpm.T @ tinv @ vpm @ gmat
        cand = [proj @ e for e in np.eye(n)]
        basis = ch.mgs_orthonormalize(cand, gmat)
        if len(basis) != n - s:
            raise RankError(
                f"tau frame has rank {len(basis)}, expected {n - s}")
        frames.append(np.array(basis))
    return frames[0], frames[1]


def omega_curvature(ea: ExtendedAction, ctx: GeneralizedMetricContext,
                    sign: int, point, frame):
    """Connection curvature of tau_sign on frame pairs, by both routes.

    Returns (from_xi, from_theta): s x m x m arrays with
    from_xi[a, i, j]  the matrix-weighted d(g(V^sign)) evaluation and
    from_theta[a, i, j] the direct exterior derivative of the connection
    form theta^a; the two agree on tau_sign.
    """
    frame = np.asarray(frame, dtype=float)
    m = frame.shape[0]
    s = ea.s
    rm = reduction_matrices(ea, ctx, point)
    dxi_pm = []
    for a in range(s):
        jet = ch.differentiate(xi_pm_field(ea, ctx, a, sign), point, order=1,
                               chart=ctx.chart)
        dxi_pm.append(ch.exterior_derivative(jet, 1))
    dxi_pm = np.array(dxi_pm)
    # curvature of tau_+: K^{ba} d(g V_b^+); of tau_-: K^{ab} d(g V_b^-)
    if sign > 0:
        mix = np.einsum("ba,bij->aij", rm.Kinv, dxi_pm)
    else:
        mix = np.einsum("ab,bij->aij", rm.Kinv, dxi_pm)
    from_xi = np.einsum("aij,pi,qj->apq", mix, frame, frame)

    def theta_fn(coords):
        gmat = np.asarray(ctx.g(coords), dtype=object)
        v = [np.asarray(f(coords), dtype=object) for f in ea.V]
        x = [np.asarray(f(coords), dtype=object) for f in ea.xi]
        kmat = np.empty((s, s), dtype=object)
        for a in range(s):
            for b in range(s):
                kmat[a, b] = (v[a] @ gmat @ v[b]) - (x[a] @ v[b])
        kinv = ch.invert_matrix(kmat)
        rows = [gmat @ v[b] + sign * x[b] for b in range(s)]
        out = np.empty((s, len(rows[0])), dtype=object)
        for a in range(s):
            for j in range(len(rows[0])):
                acc = 0.0
                for b in range(s):
                    kab = kinv[b, a] if sign > 0 else kinv[a, b]
                    acc = acc + kab * rows[b][j]
                out[a, j] = acc
        return out

    jet = ch.differentiate(theta_fn, point, order=1)
    # d(theta^a)_{ij} = d_i theta^a_j - d_j theta^a_i
    dth = np.einsum("iaj->aij", jet.d1) - np.einsum("jai->aij", jet.d1)
    from_theta = np.einsum("aij,pi,qj->apq", dth, frame, frame)
    return from_xi, from_theta


@dataclass(frozen=True)
class QuotientScenario:
    """Ambient data plus an explicit quotient chart with section maps."""

    ctx: GeneralizedMetricContext
    ea: ExtendedAction
    quotient: ch.Chart
    project: Callable
    lift: Callable
    name: str = ""

    @property
    def ambient_dim(self) -> int:
        return self.ctx.chart.dim

    @property
    def reduced_dim(self) -> int:
        return self.quotient.dim

    def check_maps(self, rng, n: int = 5, tol: float = 1e-10):
        """project(lift(q)) = q and d(project)(V_a) = 0 on samples."""
        worst = 0.0
        for q in self.quotient.sample(rng, n):
            p = self.lift(q)
            back = np.asarray(self.project(p), dtype=float)
            worst = max(worst, float(np.max(np.abs(back - q))))
            dproj = project_jacobian(self, p)
            for vf in self.ea.V:
                vv = np.asarray(vf(p), dtype=float)
                worst = max(worst, float(np.max(np.abs(dproj @ vv))))
        if worst > tol:
            raise ScenarioError(
                f"quotient maps inconsistent (residual {worst:.2e})")
        return worst


def project_jacobian(scn: QuotientScenario, point):
    """d(project) at an ambient point; dual-safe in the point."""
    cols = [dual.partial(scn.project, list(point), i)[1]
            for i in range(len(point))]
    if any(np.asarray(c).dtype == object for c in cols):
        out = np.empty((len(cols[0]), len(cols)), dtype=object)
        for i, c in enumerate(cols):
            out[:, i] = c
        return out
    return np.stack(cols, axis=1)


def horizontal_lift(scn: QuotientScenario, point, sign: int, qvecs):
    """tau_sign lifts of quotient vectors at an ambient point.

    Solves the square system stacking the s constraint rows of tau_sign on
    d(project); raises LiftError when the system degenerates.
    """
    rows = constraint_rows(scn.ea, scn.ctx, point, sign)
    dproj = project_jacobian(scn, point)
    n = scn.ambient_dim
    s = scn.ea.s
    mat = np.empty((n, n), dtype=object)
    for a in range(s):
        mat[a, :] = rows[a]
    mat[s:, :] = dproj
    out = []
    for w in qvecs:
        rhs = np.empty(n, dtype=object)
        rhs[:s] = 0.0
        rhs[s:] = np.asarray(w, dtype=object)
        try:
            out.append(dual.tighten(ch.solve_linear(mat, rhs)))
        except Exception as exc:
            raise LiftError(f"horizontal lift degenerate: {exc}") from exc
    return out


def lifted_field(scn: QuotientScenario, qfield: ch.ChartField,
                 sign: int) -> ch.ChartField:
    """Ambient vector field lifting a quotient field through tau_sign."""
    def fn(coords):
        q = scn.project(coords)
        w = np.asarray(qfield(q), dtype=object)
        return horizontal_lift(scn, coords, sign, [w])[0]
    return ch.ChartField(scn.ctx.chart, ch.VECTOR, fn,
                         name=f"lift{sign:+d}({qfield.name})")


def omega_two_form(scn: QuotientScenario, point):
    """tau_+ curvature 2-forms Omega^a as ambient component arrays."""
    ea, ctx = scn.ea, scn.ctx
    s = ea.s
    gmat = np.asarray(ctx.g(point), dtype=object)
    v = [np.asarray(f(point), dtype=object) for f in ea.V]
    x = [np.asarray(f(point), dtype=object) for f in ea.xi]
    kmat = np.empty((s, s), dtype=object)
    for a in range(s):
        for b in range(s):
            kmat[a, b] = (v[a] @ gmat @ v[b]) - (x[a] @ v[b])
    kinv = ch.invert_matrix(kmat)
    dxi = []
    for b in range(s):
        jet = ch.differentiate(xi_pm_field(ea, ctx, b, +1), point, order=1,
                               chart=None)
        dxi.append(ch.exterior_derivative(jet, 1))
    n = scn.ambient_dim
    om = np.empty((s, n, n), dtype=object)
    for a in range(s):
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for b in range(s):
                    acc = acc + kinv[b, a] * dxi[b][i, j]
                om[a, i, j] = acc
    return om


def reduce_metric_flux(scn: QuotientScenario, qpoint):
    """Reduced metric and flux components at a quotient point.

    The metric restricts g to tau_+ lifts of the quotient coordinate
    frame; the flux evaluates H + Omega^a wedge xi_a on the same lifts and
    vanishes identically when the quotient dimension is at most 2.
    """
    m = scn.reduced_dim
    p = scn.lift(qpoint)
    lifts = horizontal_lift(scn, p, +1, np.eye(m))
    lifts = [np.asarray(v, dtype=float) for v in lifts]
    gmat = scn.ctx.metric_at(p)
    gred = np.array([[la @ gmat @ lb for lb in lifts] for la in lifts])
    try:
        np.linalg.cholesky(0.5 * (gred + gred.T))
    except np.linalg.LinAlgError as exc:
        raise LiftError("reduced metric not positive definite") from exc
    hred = np.zeros((m, m, m))
    if m > 2:
        hred = _reduced_flux_at(scn, p, lifts)
    return gred, hred


def _reduced_flux_at(scn: QuotientScenario, point, lifts):
    ea = scn.ea
    m = len(lifts)
    hval = np.asarray(scn.ctx.H(point), dtype=object)
    om = omega_two_form(scn, point)
    xvals = [np.asarray(f(point), dtype=object) for f in ea.xi]
    out = np.zeros((m, m, m))
    for mu in range(m):
        for nu in range(m):
            for rho in range(m):
                x, y, z = lifts[mu], lifts[nu], lifts[rho]
                acc = np.einsum("ijk,i,j,k->", hval, x, y, z)
                for a in range(ea.s):
                    oa = om[a]
                    oxy = x @ oa @ y
                    oxz = x @ oa @ z
                    oyz = y @ oa @ z
                    acc = acc + (oxy * (xvals[a] @ z)
                                 - oxz * (xvals[a] @ y)
                                 + oyz * (xvals[a] @ x))
                out[mu, nu, rho] = dual.body(acc)
    return out


def reduced_metric_components(scn: QuotientScenario, qpoint,
                              sign: int = +1) -> np.ndarray:
    """Quotient metric components from tau_sign lifts.

    The two restrictions give the same quotient metric; comparing them is a
    consistency check on the horizontal geometry.
    """
    m = scn.reduced_dim
    p = scn.lift(qpoint)
    lifts = horizontal_lift(scn, p, sign, np.eye(m))
    lifts = [np.asarray(v, dtype=float) for v in lifts]
    gmat = scn.ctx.metric_at(p)
    return np.array([[la @ gmat @ lb for lb in lifts] for la in lifts])


def reduced_metric_field(scn: QuotientScenario) -> ch.ChartField:
    """The reduced metric as a field on the quotient chart (dual-safe)."""
    m = scn.reduced_dim

    def fn(coords):
        p = scn.lift(coords)
        lifts = horizontal_lift(scn, p, +1, np.eye(m))
        gmat = np.asarray(scn.ctx.g(p), dtype=object)
        out = np.empty((m, m), dtype=object)
        for a in range(m):
            for b in range(m):
                out[a, b] = lifts[a] @ gmat @ lifts[b]
        return out
    return ch.ChartField(scn.quotient, ch.METRIC, fn, name="g_red")


def reduced_flux_field(scn: QuotientScenario) -> ch.ChartField:
    """The reduced flux as a 3-form field on the quotient chart."""
    m = scn.reduced_dim
    if m <= 2:
        return zero_flux(scn.quotient)

    def fn(coords):
        p = scn.lift(coords)
        lifts = horizontal_lift(scn, p, +1, np.eye(m))
        hval = np.asarray(scn.ctx.H(p), dtype=object)
        om = omega_two_form(scn, p)
        xvals = [np.asarray(f(p), dtype=object) for f in scn.ea.xi]
        out = np.empty((m, m, m), dtype=object)
        for mu in range(m):
            for nu in range(m):
                for rho in range(m):
                    x, y, z = lifts[mu], lifts[nu], lifts[rho]
                    acc = 0.0
                    for i in range(scn.ambient_dim):
                        for j in range(scn.ambient_dim):
                            for k in range(scn.ambient_dim):
                                hv = hval[i, j, k]
                                if isinstance(hv, float) and hv == 0.0:
                                    continue
                                acc = acc + hv * x[i] * y[j] * z[k]
                    for a in range(scn.ea.s):
                        oa = om[a]
                        oxy = x @ oa @ y
                        oxz = x @ oa @ z
                        oyz = y @ oa @ z
                        acc = acc + (oxy * (xvals[a] @ z)
                                     - oxz * (xvals[a] @ y)
                                     + oyz * (xvals[a] @ x))
                    out[mu, nu, rho] = acc
        return out
    return ch.ChartField(scn.quotient, ch.form_valence(3), fn, name="H_red")


def reduced_context(scn: QuotientScenario) -> GeneralizedMetricContext:
    return GeneralizedMetricContext(reduced_metric_field(scn),
                                    reduced_flux_field(scn))


def reduced_bismut(scn: QuotientScenario, xq: ch.ChartField,
                   yq: ch.ChartField, zq: ch.ChartField, qpoint) -> float:
    """g(grad^-_{X^+} Y^-, Z^-) at lift(qpoint), from ambient data.

    X^+ is the tau_+ lift of [X]; Y^-, Z^- are tau_- lifts, differentiated
    as genuine ambient fields through the lift solve.  Cross-check:
    :func:`reduced_bismut_direct`.
    """
    p = scn.lift(qpoint)
    xplus = np.asarray(horizontal_lift(
        scn, p, +1, [np.asarray(xq(qpoint), dtype=float)])[0], dtype=float)
    yfield = lifted_field(scn, yq, -1)
    zminus = np.asarray(horizontal_lift(
        scn, p, -1, [np.asarray(zq(qpoint), dtype=float)])[0], dtype=float)
    jy = ch.differentiate(yfield, p, order=1, chart=scn.ctx.chart)
    coeffs = bismut_connection_coeffs(-1, scn.ctx, p)
    nab = np.einsum("j,ji->i", xplus, jy.d1) \
        + np.einsum("ijk,j,k->i", coeffs, xplus, jy.value)
    gmat = scn.ctx.metric_at(p)
    return float(nab @ gmat @ zminus)


def reduced_bismut_direct(scn: QuotientScenario, xq, yq, zq, qpoint) -> float:
    """Same pairing computed on the quotient chart from (g_red, H_red)."""
    ctxr = reduced_context(scn)
    jy = ch.differentiate(yq, qpoint, order=1)
    coeffs = bismut_connection_coeffs(-1, ctxr, qpoint)
    xv = np.asarray(xq(qpoint), dtype=float)
    nab = np.einsum("j,ji->i", xv, jy.d1) \
        + np.einsum("ijk,j,k->i", coeffs, xv, jy.value)
    gmat = ctxr.metric_at(qpoint)
    zv = np.asarray(zq(qpoint), dtype=float)
    return float(nab @ gmat @ zv)


def quotient_frame(scn: QuotientScenario, qpoint) -> np.ndarray:
    """Deterministic g_red-orthonormal basis of the quotient tangent space."""
    gred, _ = reduce_metric_flux(scn, qpoint)
    basis = ch.mgs_orthonormalize(list(np.eye(scn.reduced_dim)), gred)
    if len(basis) != scn.reduced_dim:
        raise RankError("quotient frame degenerate")
    return np.array(basis)


def _minus_derivative_matrix(scn: QuotientScenario, point):
    """D[a, j, i] = (grad^-_j V_a^-)^i at a point."""
    ea, ctx = scn.ea, scn.ctx
    coeffs = bismut_connection_coeffs(-1, ctx, point)
    out = []
    for a in range(ea.s):
        f = v_pm_field(ea, ctx, a, -1)
        jet = ch.differentiate(f, point, order=1, chart=ctx.chart)
        out.append(np.einsum("ji->ji", jet.d1)
                   + np.einsum("ijk,k->ji", coeffs, jet.value))
    return np.array(out)


def reduced_curvature_quotient(scn: QuotientScenario, qpoint,
                               basis=None) -> np.ndarray:
    """Reduced curvature on aligned frames, from ambient data only.

    Entry [mu, nu, rho, sigma] is the reduced-curvature pairing on the
    quotient basis, assembled from three ambient ingredients: the ambient
    torsion curvature on (tau_+, tau_+, tau_-, tau_-) lifts, a mixed term
    quadratic in the tau_pm connection 2-forms, and a vertical-derivative
    correction weighted by the inverse of T_ab.  Cross-check:
    :func:`reduced_curvature_direct` with the same basis.
    """
    ea, ctx = scn.ea, scn.ctx
    if basis is None:
        basis = quotient_frame(scn, qpoint)
    basis = np.asarray(basis, dtype=float)
    p = scn.lift(qpoint)
    plus = np.array([np.asarray(v, dtype=float)
                     for v in horizontal_lift(scn, p, +1, basis)])
    minus = np.array([np.asarray(v, dtype=float)
                      for v in horizontal_lift(scn, p, -1, basis)])
    gmat = ctx.metric_at(p)
    rm = reduction_matrices(ea, ctx, p)
    rmin = bismut_curvature(-1, ctx, p)
    # operator-slot pairing [mu,nu,rho,sigma] = pairing of the curvature on
    # (E_mu, E_nu) applied to E_rho against E_sigma: last two slots swapped
    # relative to the raw component contraction.
    term1 = np.einsum("ijkl,ai,bj,ck,dl->abdc", rmin, plus, plus, minus,
                      minus)

    dxi_p, dxi_m = [], []
    for a in range(ea.s):
        jp = ch.differentiate(xi_pm_field(ea, ctx, a, +1), p, order=1)
        jm = ch.differentiate(xi_pm_field(ea, ctx, a, -1), p, order=1)
        dxi_p.append(ch.exterior_derivative(jp, 1))
        dxi_m.append(ch.exterior_derivative(jm, 1))
    dxi_p = np.array(dxi_p)
    dxi_m = np.array(dxi_m)
    om_p = np.einsum("aij,bi,cj->abc", dxi_p, plus, plus)
    om_m = np.einsum("aij,ci,dj->acd", dxi_m, minus, minus)
    term2 = -0.5 * np.einsum("ab,axy,bzw->xyzw", rm.Kinv, om_p, om_m)

    dmat = _minus_derivative_matrix(scn, p)  # [a, j, i]
    # edge[a, mu, rho] = g(X^-_rho, grad^-_{X^+_mu} V_a^-)
    edge = np.einsum("aji,mj,ik,rk->amr", dmat, plus, gmat, minus)
    term3 = (np.einsum("ab,anz,bmw->mnzw", rm.Tinv, edge, edge)
             - np.einsum("ab,amz,bnw->mnzw", rm.Tinv, edge, edge))
    return term1 + term2 + term3


def reduced_curvature_direct(scn: QuotientScenario, qpoint,
                             basis=None) -> np.ndarray:
    """Torsion curvature of (g_red, H_red) computed on the quotient chart."""
    if basis is None:
        basis = quotient_frame(scn, qpoint)
    basis = np.asarray(basis, dtype=float)
    ctxr = reduced_context(scn)
    rarr = bismut_curvature(-1, ctxr, qpoint)
    return np.einsum("ijkl,ai,bj,ck,dl->abdc", rarr, basis, basis, basis,
                     basis)


def oneill_curvature(scn: QuotientScenario, qpoint, basis=None) -> np.ndarray:
    """Independent submersion-curvature oracle for the flux-free case.

    Uses the classical fundamental-tensor formula: base curvature equals
    ambient curvature on horizontal lifts plus terms quadratic in
    A_XY = (1/2) vert([X_lift, Y_lift]).  Only valid when all xi vanish and
    there is no flux, where tau_+ = tau_- is the orthogonal horizontal
    space.
    """
    ea, ctx = scn.ea, scn.ctx
    if basis is None:
        basis = quotient_frame(scn, qpoint)
    basis = np.asarray(basis, dtype=float)
    m = basis.shape[0]
    p = scn.lift(qpoint)
    gmat = ctx.metric_at(p)
    lifts = [np.asarray(v, dtype=float)
             for v in horizontal_lift(scn, p, +1, basis)]

    qfields = [ch.ChartField(scn.quotient, ch.VECTOR,
                             lambda c, w=basis[i]: np.array(w), name=f"E{i}")
               for i in range(m)]
    lfields = [lifted_field(scn, qf, +1) for qf in qfields]

    vvals = np.array([np.asarray(f(p), dtype=float) for f in ea.V])
    gram = vvals @ gmat @ vvals.T
    graminv = np.linalg.inv(gram)

    def vert(w):
        return np.einsum("ai,ab,bj,j->i",
                         vvals, graminv, vvals @ gmat, w)

    avals = np.empty((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            br = ch.lie_bracket(lfields[i], lfields[j], p) if i < j else None
            avals[i, j] = br
    amat = np.zeros((m, m, scn.ambient_dim))
    for i in range(m):
        for j in range(i + 1, m):
            a = 0.5 * vert(np.asarray(avals[i, j], dtype=float))
            amat[i, j] = a
            amat[j, i] = -a

    rarr = ch.riemann(ctx.g, p)
    base = np.einsum("ijkl,ai,bj,ck,dl->abdc", rarr,
                     np.array(lifts), np.array(lifts), np.array(lifts),
                     np.array(lifts))
    inner = np.einsum("abi,ij,cdj->abcd", amat, gmat, amat)
    return (base - 2.0 * inner
            + np.einsum("nrms->mnrs", inner)
            - np.einsum("mrns->mnrs", inner))
