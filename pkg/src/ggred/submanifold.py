"""Reduction to the zero locus of a regular section.

With sigma: ambient -> R^r cutting out N = sigma^{-1}(0), the torsion
connection and curvature of the induced geometry on N are expressed through
ambient data (the transverse Gram matrix of d sigma and second covariant
derivatives of sigma) and cross-checked against direct computation on a
parametrizing chart of N.

Curvature arrays returned by the reduction functions use "operator slots":
entry [mu, nu, rho, sigma] is the pairing of the curvature operator on
(E_mu, E_nu) applied to E_rho against E_sigma.  In terms of the component
arrays of :func:`ggred.chart.riemann` this is the contraction with the last
two frame slots swapped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import chart as ch
from . import dual
from .errors import RankError, ScenarioError, TangencyError
from .genmetric import (GeneralizedMetricContext, bismut_connection_coeffs,
                        bismut_curvature, zero_flux)

EPS_LOCUS = 1e-8


@dataclass(frozen=True)
class SectionData:
    """Scalar constraint functions sigma^alpha on the ambient chart."""

    sigma: tuple[ch.ChartField, ...]

    @property
    def r(self) -> int:
        return len(self.sigma)

    def values(self, point):
        return np.array([dual.body(np.asarray(s(point), dtype=object)
                                   .ravel()[0]) for s in self.sigma])

    def gradients(self, point):
        """d sigma rows (dual-safe)."""
        rows = []
        for s in self.sigma:
            jet = ch.differentiate(s, point, order=1, chart=None)
            rows.append(np.asarray(jet.d1, dtype=object).reshape(-1))
        return rows

    def on_locus(self, point, tol: float = EPS_LOCUS) -> bool:
        return bool(np.max(np.abs(self.values(point))) <= tol)


def t_matrix(sd: SectionData, ctx: GeneralizedMetricContext, point):
    """Transverse Gram matrix T^{ab} = dsigma^a . g^{-1} . dsigma^b and its
    inverse at a zero-locus point."""
    if not sd.on_locus(point):
        raise TangencyError("t_matrix needs a point on the zero locus")
    ginv = ch.metric_inverse(ctx.metric_at(point))
    grads = np.array([np.asarray(g, dtype=float) for g in sd.gradients(point)])
    tup = grads @ ginv @ grads.T
    try:
        np.linalg.cholesky(0.5 * (tup + tup.T))
    except np.linalg.LinAlgError as exc:
        raise RankError("d sigma degenerate on the zero locus") from exc
    return tup, np.linalg.inv(tup)


@dataclass(frozen=True)
class SubmanifoldScenario:
    """Ambient data plus a parametrizing chart of the zero locus."""

    ctx: GeneralizedMetricContext
    sd: SectionData
    nchart: ch.Chart
    embed: Callable
    unembed: Callable | None = None
    name: str = ""

    @property
    def ambient_dim(self) -> int:
        return self.ctx.chart.dim

    @property
    def locus_dim(self) -> int:
        return self.nchart.dim

    def check_maps(self, rng, n: int = 5, tol: float = 1e-10):
        """sigma(embed(u)) = 0 and d(embed) full rank on samples."""
        worst = 0.0
        for u in self.nchart.sample(rng, n):
            p = self.embed(u)
            worst = max(worst, float(np.max(np.abs(self.sd.values(p)))))
            demb = embed_jacobian(self, u)
            if np.linalg.matrix_rank(demb, tol=1e-10) != self.locus_dim:
                raise ScenarioError("embedding jacobian rank-deficient")
        if worst > tol:
            raise ScenarioError(
                f"embedding misses the zero locus by {worst:.2e}")
        return worst


def embed_jacobian(scn: SubmanifoldScenario, u):
    """d(embed) columns at a locus-chart point (dual-safe)."""
    cols = [dual.partial(scn.embed, list(u), a)[1]
            for a in range(len(u))]
    if any(np.asarray(c).dtype == object for c in cols):
        out = np.empty((len(cols[0]), len(cols)), dtype=object)
        for a, c in enumerate(cols):
            out[:, a] = c
        return out
    return np.stack(cols, axis=1)


def tangent_frame(scn: SubmanifoldScenario, u) -> np.ndarray:
    """Deterministic g-orthonormal frame of TN at embed(u), ambient rows."""
    p = scn.embed(u)
    gmat = scn.ctx.metric_at(p)
    demb = np.asarray(embed_jacobian(scn, u), dtype=float)
    basis = ch.mgs_orthonormalize(list(demb.T), gmat)
    if len(basis) != scn.locus_dim:
        raise RankError("tangent frame degenerate")
    return np.array(basis)


def induced_metric_field(scn: SubmanifoldScenario) -> ch.ChartField:
    def fn(u):
        p = scn.embed(u)
        gmat = np.asarray(scn.ctx.g(p), dtype=object)
        demb = embed_jacobian(scn, u)
        m = scn.locus_dim
        out = np.empty((m, m), dtype=object)
        for a in range(m):
            for b in range(m):
                out[a, b] = demb[:, a] @ gmat @ demb[:, b]
        return out
    return ch.ChartField(scn.nchart, ch.METRIC, fn, name="induced g")


def induced_flux_field(scn: SubmanifoldScenario) -> ch.ChartField:
    m = scn.locus_dim
    if m <= 2:
        return zero_flux(scn.nchart)

    def fn(u):
        p = scn.embed(u)
        hval = np.asarray(scn.ctx.H(p), dtype=object)
        demb = embed_jacobian(scn, u)
        out = np.empty((m, m, m), dtype=object)
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    acc = 0.0
                    n = scn.ambient_dim
                    for i in range(n):
                        for j in range(n):
                            for k in range(n):
                                hv = hval[i, j, k]
                                if isinstance(hv, float) and hv == 0.0:
                                    continue
                                acc = acc + hv * demb[i, a] * demb[j, b] \
                                    * demb[k, c]
                    out[a, b, c] = acc
        return out
    return ch.ChartField(scn.nchart, ch.form_valence(3), fn, name="induced H")


def induced_context(scn: SubmanifoldScenario) -> GeneralizedMetricContext:
    return GeneralizedMetricContext(induced_metric_field(scn),
                                    induced_flux_field(scn))


def nabla_pm_dsigma(scn: SubmanifoldScenario, sign: int, point) -> np.ndarray:
    """M[alpha, i, j] = (grad^sign_i d sigma^alpha)_j at an ambient point."""
    coeffs = bismut_connection_coeffs(sign, scn.ctx, point)
    out = []
    for s in scn.sd.sigma:
        jet = ch.differentiate(s, point, order=2, chart=None)
        hess = jet.d2.reshape(scn.ambient_dim, scn.ambient_dim)
        grad = jet.d1.reshape(scn.ambient_dim)
        out.append(hess - np.einsum("lij,l->ij", coeffs, grad))
    return np.array(out)


def _require_tangent(scn, point, vecs, tol=ch.EPS_ID):
    grads = [np.asarray(g, dtype=float) for g in scn.sd.gradients(point)]
    for v in vecs:
        for gr in grads:
            if abs(float(gr @ v)) > tol:
                raise TangencyError("field value not tangent to the locus")


def tangential_derivative(scn: SubmanifoldScenario, xbar: ch.ChartField,
                          ybar: ch.ChartField, u) -> np.ndarray:
    """Ambient components of the derivative of Y along X at embed(u).

    X, Y are locus-chart fields; Y is pushed to its ambient values along N
    and differentiated in the tangent direction only, which is all the
    reduced formulas consume (the normal extension is immaterial).
    """
    def ambient_y(coords_u):
        demb = embed_jacobian(scn, coords_u)
        yv = np.asarray(ybar(coords_u), dtype=object)
        return demb @ yv

    jet = ch.differentiate(ambient_y, u, order=1, chart=None)
    xv = np.asarray(xbar(u), dtype=float)
    return np.einsum("a,ai->i", xv, jet.d1), jet.value


def reduced_connection_sub(scn: SubmanifoldScenario, xbar: ch.ChartField,
                           ybar: ch.ChartField, zbar: ch.ChartField,
                           u) -> float:
    """g(grad^-_X Y, Z) at embed(u) for locus-tangent fields.

    Equals the intrinsic torsion-connection pairing of the induced geometry;
    cross-checks: :func:`reduced_connection_direct` and the ambient
    coefficient form of :func:`reduced_connection_coefficients`.
    """
    p = scn.embed(u)
    dy, yval = tangential_derivative(scn, xbar, ybar, u)
    demb = np.asarray(embed_jacobian(scn, u), dtype=float)
    xv = demb @ np.asarray(xbar(u), dtype=float)
    zv = demb @ np.asarray(zbar(u), dtype=float)
    yv = np.asarray(yval, dtype=float)
    _require_tangent(scn, p, [xv, zv, yv])
    coeffs = bismut_connection_coeffs(-1, scn.ctx, p)
    nab = dy + np.einsum("ijk,j,k->i", coeffs, xv, yv)
    gmat = scn.ctx.metric_at(p)
    return float(nab @ gmat @ zv)


def reduced_connection_vector(scn: SubmanifoldScenario, xbar, ybar,
                              u) -> np.ndarray:
    """The tangentially projected connection vector, two equivalent routes.

    Returns (corrected, coefficient_form): the ambient covariant derivative
    plus the transverse correction T_{ab} (Y, grad^-_X dsigma^b) g^{-1}
    dsigma^a, and the same vector assembled from the one-sided coefficient
    array Gamma^- + T g^{-1} dsigma grad^+ dsigma.  Both are tangent to N
    and equal to tight tolerance.
    """
    p = scn.embed(u)
    demb = np.asarray(embed_jacobian(scn, u), dtype=float)
    dy, yval = tangential_derivative(scn, xbar, ybar, u)
    xv = demb @ np.asarray(xbar(u), dtype=float)
    yv = np.asarray(yval, dtype=float)
    coeffs = bismut_connection_coeffs(-1, scn.ctx, p)
    nab = dy + np.einsum("ijk,j,k->i", coeffs, xv, yv)

    tup, tlow = t_matrix(scn.sd, scn.ctx, p)
    ginv = ch.metric_inverse(scn.ctx.metric_at(p))
    grads = np.array([np.asarray(g, dtype=float)
                      for g in scn.sd.gradients(p)])
    mm = nabla_pm_dsigma(scn, -1, p)   # [a, i, j]
    corr = np.einsum("ab,bjk,j,k,ai->i", tlow, mm, xv, yv, grads @ ginv)
    corrected = nab + corr

    mp = nabla_pm_dsigma(scn, +1, p)
    gamma_tilde = coeffs + np.einsum("ab,il,al,bjk->ikj", tlow,
                                     ginv, grads, mp)
    coeff_form = dy + np.einsum("ikj,k,j->i", gamma_tilde, xv, yv)
    return corrected, coeff_form


def reduced_curvature_sub(scn: SubmanifoldScenario, u,
                          basis=None) -> np.ndarray:
    """Reduced curvature on a tangent frame, from ambient data only.

    Entry [mu, nu, rho, sigma] pairs the curvature operator on
    (E_mu, E_nu) applied to E_rho against E_sigma: the ambient torsion
    curvature restricted to the frame plus a transverse correction
    quadratic in grad^- d sigma.  Cross-check:
    :func:`reduced_curvature_sub_direct` with the same basis.
    """
    if basis is None:
        basis = tangent_frame(scn, u)
    basis = np.asarray(basis, dtype=float)
    p = scn.embed(u)
    _require_tangent(scn, p, list(basis))
    rmin = bismut_curvature(-1, scn.ctx, p)
    # operator-slot pairing: swap the last two frame slots of the
    # component-array contraction
    term1 = np.einsum("ijkl,ai,bj,ck,dl->abdc", rmin, basis, basis, basis,
                      basis)
    tup, tlow = t_matrix(scn.sd, scn.ctx, p)
    mm = nabla_pm_dsigma(scn, -1, p)
    # nb[a, m, r] = (E_r, grad^-_{E_m} d sigma^a)
    nb = np.einsum("aij,mi,rj->amr", mm, basis, basis)
    term2 = (np.einsum("ab,bnr,ams->mnrs", tlow, nb, nb)
             - np.einsum("ab,bmr,ans->mnrs", tlow, nb, nb))
    return term1 + term2


def reduced_curvature_sub_direct(scn: SubmanifoldScenario, u,
                                 basis=None) -> np.ndarray:
    """Torsion curvature of the induced geometry, computed on the locus
    chart and expressed on the same ambient frame."""
    if basis is None:
        basis = tangent_frame(scn, u)
    basis = np.asarray(basis, dtype=float)
    demb = np.asarray(embed_jacobian(scn, u), dtype=float)
    # chart components of the frame vectors: solve demb @ e = basis row
    coords = np.linalg.lstsq(demb, basis.T, rcond=None)[0].T
    ctxn = induced_context(scn)
    rarr = bismut_curvature(-1, ctxn, u)
    return np.einsum("ijkl,ai,bj,ck,dl->abdc", rarr, coords, coords, coords,
                     coords)


def gauss_equation_oracle(scn: SubmanifoldScenario, u,
                          basis=None) -> np.ndarray:
    """Independent flux-free oracle: the Gauss equation with the second
    fundamental form II(X, Y) = -T_{ab} (Y, grad_X dsigma^b) g^{-1}
    dsigma^a."""
    if scn.ctx.has_flux:
        raise ScenarioError("the Gauss oracle applies to flux-free data")
    if basis is None:
        basis = tangent_frame(scn, u)
    basis = np.asarray(basis, dtype=float)
    p = scn.embed(u)
    gmat = scn.ctx.metric_at(p)
    ginv = ch.metric_inverse(gmat)
    rarr = ch.riemann(scn.ctx.g, p)
    term1 = np.einsum("ijkl,ai,bj,ck,dl->abdc", rarr, basis, basis, basis,
                      basis)
    tup, tlow = t_matrix(scn.sd, scn.ctx, p)
    grads = np.array([np.asarray(g, dtype=float)
                      for g in scn.sd.gradients(p)])
    coeffs = ch.christoffel(scn.ctx.g, p)
    hess = []
    for s in scn.sd.sigma:
        jet = ch.differentiate(s, p, order=2, chart=None)
        hess.append(jet.d2.reshape(scn.ambient_dim, scn.ambient_dim)
                    - np.einsum("lij,l->ij",
                                coeffs, jet.d1.reshape(scn.ambient_dim)))
    hess = np.array(hess)
    # II(E_m, E_n) = -T_{ab} nb[b, m, n] g^{-1} dsigma^a
    nb = np.einsum("aij,mi,nj->amn", hess, basis, basis)
    iivec = -np.einsum("ab,bmn,ai->mni", tlow, nb, grads @ ginv)
    dots = np.einsum("mni,ij,rsj->mnrs", iivec, gmat, iivec)
    # (II(X,W), II(Y,Z)) - (II(X,Z), II(Y,W)) in operator slots
    term2 = (np.einsum("msnr->mnrs", dots) - np.einsum("mrns->mnrs", dots))
    return term1 + term2
