"""Exact zero-dimensional localization over Grassmann algebras.

The component actions of the gauged and constrained sigma-models are
assembled pointwise as quadratic forms in even auxiliary unknowns with
Grassmann coefficients; the auxiliaries are eliminated exactly at their
stationary points; and the surviving quartic exponent in the zero-mode
generators is compared against the reduced-curvature contraction computed by
the geometry modules.  The same machinery integrates the fermionic density
whose quadrature gives the Euler characteristic.

Grassmann generator layout with m zero modes per chirality: generators
0..m-1 are the plus modes, m..2m-1 the minus modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import chart as ch
from . import quotient as qt
from . import submanifold as sm
from .errors import (FrameMismatchError, OddDimensionError,
                     SingularBodyError)
from .genmetric import GeneralizedMetricContext, bismut_curvature
from .grassmann import GrassmannElement, berezin_integral

G = GrassmannElement


# ----------------------------------------------------------------------
# the Model-I quartic pairing and the fermionic Euler density
# ----------------------------------------------------------------------

def curvature_quartic(rfr: np.ndarray, mplus: int, mminus: int | None = None
                      ) -> GrassmannElement:
    """The pairing (psi_-, R psi_-) as a Grassmann element.

    ``rfr`` is the frame-contracted curvature in raw component slots (the
    :func:`ggred.chart.riemann` convention), with the plus modes on the
    first two slots and the minus modes on the last two.  The product order
    is the interleaved one native to the component actions:
    (1/2) sum R[m,n,r,s] psi-_r psi+_m psi-_s psi+_n.
    """
    if mminus is None:
        mminus = mplus
    ngen = mplus + mminus
    out = G(ngen)
    for mu in range(mplus):
        for nu in range(mplus):
            for rho in range(mminus):
                for sig in range(mminus):
                    c = rfr[mu, nu, rho, sig]
                    if c == 0.0:
                        continue
                    prod = (G.generator(ngen, mplus + rho)
                            * G.generator(ngen, mu)
                            * G.generator(ngen, mplus + sig)
                            * G.generator(ngen, nu))
                    out = out + 0.5 * c * prod
    return out


def operator_slots_to_raw(arr: np.ndarray) -> np.ndarray:
    """Convert an operator-slot curvature array (the reduction modules'
    convention) to raw component slots by swapping the last two axes."""
    return np.swapaxes(arr, 2, 3)


def euler_measure(m: int) -> list[int]:
    """Berezin measure order pairing each plus mode with its minus mode."""
    order = []
    for mu in range(m):
        order.extend([mu, m + mu])
    return order


def euler_density(rarr: np.ndarray, gmat: np.ndarray) -> float:
    """Fermionic Gaussian density whose integral gives the Euler number.

    Contracts the curvature into a positively oriented orthonormal frame,
    exponentiates the quartic pairing, and Berezin-integrates against the
    paired measure.  The result carries no volume factor.
    """
    n = gmat.shape[0]
    if n % 2:
        raise OddDimensionError("Euler density needs even dimension")
    low = np.linalg.cholesky(gmat)
    frame = np.linalg.inv(low).T          # columns: oriented orthonormal frame
    rfr = np.einsum("ijkl,ia,jb,kc,ld->abcd", rarr, frame, frame, frame,
                    frame)
    quart = curvature_quartic(rfr, n)
    dens = berezin_integral((0.5 * quart).exp(), euler_measure(n))
    return dens.body


def euler_characteristic(ctx: GeneralizedMetricContext, domain, order: int,
                         use_flux: bool = True) -> float:
    """Gauss-Legendre estimate of the Euler characteristic.

    ``domain`` is a (lower, upper) pair of coordinate bounds covering the
    manifold once; the integrand is the fermionic density of the torsion
    curvature (or the plain curvature when ``use_flux`` is false) times the
    metric volume factor, normalized by (2 pi)^(dim/2).
    """
    lo, hi = (np.asarray(domain[0], dtype=float),
              np.asarray(domain[1], dtype=float))
    n = lo.size
    if n % 2:
        raise OddDimensionError("Euler characteristic needs even dimension")
    # the quadrature cover may exceed the sampling chart; rebind the fields
    # onto a box that contains all nodes
    wide = ch.Chart("euler-cover", tuple(lo - 1e-9), tuple(hi + 1e-9))
    ctx = GeneralizedMetricContext(
        ch.ChartField(wide, ctx.g.valence, ctx.g.fn, name=ctx.g.name),
        ch.ChartField(wide, ctx.H.valence, ctx.H.fn, name=ctx.H.name))
    x1, w1 = np.polynomial.legendre.leggauss(order)
    nodes = [0.5 * (hi[a] + lo[a]) + 0.5 * (hi[a] - lo[a]) * x1
             for a in range(n)]
    weights = [0.5 * (hi[a] - lo[a]) * w1 for a in range(n)]
    total = 0.0
    for idx in np.ndindex(*([order] * n)):
        p = [nodes[a][idx[a]] for a in range(n)]
        w = 1.0
        for a in range(n):
            w *= weights[a][idx[a]]
        gmat = ctx.metric_at(p)
        rarr = bismut_curvature(-1, ctx, p) if use_flux and ctx.has_flux \
            else ch.riemann(ctx.g, p)
        total += w * euler_density(rarr, gmat) * np.sqrt(np.linalg.det(gmat))
    return total / (2.0 * np.pi) ** (n // 2)


# ----------------------------------------------------------------------
# quadratic forms over even auxiliaries with Grassmann coefficients
# ----------------------------------------------------------------------

@dataclass
class AuxiliaryPolynomial:
    """S(v) = (1/2) v^T Q v + L^T v + C over commuting (even) unknowns.

    Q is symmetric with even Grassmann entries, L has even entries, C is an
    arbitrary Grassmann element.  Elimination substitutes the exact
    stationary point of a group of unknowns, inverting the corresponding
    block through a terminating geometric series on its nilpotent part.
    """

    ngen: int
    variables: list[str]
    quad: dict = field(default_factory=dict)
    lin: dict = field(default_factory=dict)
    const: GrassmannElement | None = None

    def __post_init__(self):
        if self.const is None:
            self.const = G(self.ngen)

    def _zero(self):
        return G(self.ngen)

    def add_quad(self, a: str, b: str, coeff):
        """Add coeff * v_a v_b to S (symmetrized into Q = 2 d^2 S)."""
        coeff = self._as_elem(coeff)
        if not coeff.is_even():
            raise ValueError("quadratic coefficients must be even")
        if a == b:
            cur = self.quad.get((a, a), self._zero())
            self.quad[(a, a)] = cur + 2.0 * coeff
            return
        for key in ((a, b), (b, a)):
            cur = self.quad.get(key, self._zero())
            self.quad[key] = cur + coeff

    def add_lin(self, a: str, coeff):
        coeff = self._as_elem(coeff)
        if not coeff.is_even():
            raise ValueError("linear coefficients must be even")
        self.lin[a] = self.lin.get(a, self._zero()) + coeff

    def add_const(self, coeff):
        self.const = self.const + self._as_elem(coeff)

    def _as_elem(self, c):
        if isinstance(c, GrassmannElement):
            return c
        return G.scalar(self.ngen, float(c))

    def q_entry(self, a, b):
        return self.quad.get((a, b), self._zero())

    def l_entry(self, a):
        return self.lin.get(a, self._zero())

    def eliminate(self, group):
        """Substitute the stationary solution of the listed unknowns.

        Returns (reduced polynomial, solution) where solution maps each
        eliminated unknown to (constant part, {kept unknown: coefficient}).
        Raises SingularBodyError when the numeric body of the group block
        is singular.
        """
        group = list(group)
        keep = [v for v in self.variables if v not in group]
        nw = len(group)
        qww = [[self.q_entry(a, b) for b in group] for a in group]
        body = np.array([[qww[i][j].body for j in range(nw)]
                         for i in range(nw)])
        try:
            body_inv = np.linalg.inv(body)
        except np.linalg.LinAlgError as exc:
            raise SingularBodyError(
                f"block body singular for group {group}") from exc
        # (B + N)^{-1} = sum_k (-B^{-1} N)^k B^{-1}, exact because N is
        # nilpotent.
        nil = [[qww[i][j] - G.scalar(self.ngen, body[i, j])
                for j in range(nw)] for i in range(nw)]
        binv = [[G.scalar(self.ngen, body_inv[i, j]) for j in range(nw)]
                for i in range(nw)]
        minus_binv_nil = _gm_mul(_gm_scale(binv, -1.0), nil)
        inv = binv
        term = binv
        for _ in range(self.ngen // 2 + 1):
            term = _gm_mul(minus_binv_nil, term)
            if all(e.max_abs() == 0.0 for row in term for e in row):
                break
            inv = _gm_add(inv, term)

        lw = [self.l_entry(a) for a in group]
        qwk = [[self.q_entry(a, k) for k in keep] for a in group]
        # stationary: v_W = -inv (L_W + Q_WK v_K)
        sol_const = _gv_matvec(_gm_scale(inv, -1.0), lw)
        sol_lin = _gm_mul(_gm_scale(inv, -1.0), qwk) if keep else \
            [[] for _ in group]

        out = AuxiliaryPolynomial(self.ngen, keep)
        out.const = self.const - 0.5 * _gv_dot(lw, _gv_matvec(inv, lw))
        invl = _gv_matvec(inv, lw)
        for ki, k in enumerate(keep):
            lk = self.l_entry(k)
            corr = self._zero()
            for wi in range(nw):
                corr = corr + self.q_entry(k, group[wi]) * invl[wi]
            new_l = lk - corr
            if new_l.max_abs():
                out.lin[k] = new_l
        qkw_inv_qwk = _gm_mul([[self.q_entry(k, w) for w in group]
                               for k in keep],
                              _gm_mul(inv, qwk)) if keep else []
        for i, ka in enumerate(keep):
            for j, kb in enumerate(keep):
                val = self.q_entry(ka, kb)
                if keep:
                    val = val - qkw_inv_qwk[i][j]
                if val.max_abs():
                    out.quad[(ka, kb)] = val
        solution = {w: (sol_const[i],
                        {keep[j]: sol_lin[i][j] for j in range(len(keep))})
                    for i, w in enumerate(group)}
        return out, solution


def _gm_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def _gm_add(a, b):
    return [[a[i][j] + b[i][j] for j in range(len(a[0]))]
            for i in range(len(a))]


def _gm_scale(a, s):
    return [[e * s for e in row] for row in a]


def _gv_matvec(a, v):
    out = []
    for row in a:
        acc = row[0] * v[0]
        for k in range(1, len(v)):
            acc = acc + row[k] * v[k]
        out.append(acc)
    return out


def _gv_dot(u, v):
    acc = u[0] * v[0]
    for k in range(1, len(u)):
        acc = acc + u[k] * v[k]
    return acc


# ----------------------------------------------------------------------
# pointwise data for the component actions
# ----------------------------------------------------------------------

@dataclass
class PointFrame:
    """Every tensor value the component actions consume at one point."""

    point: tuple
    n: int
    g: np.ndarray
    ginv: np.ndarray
    H: np.ndarray                 # fully lowered 3-form
    gamma: np.ndarray             # Levi-Civita coefficients
    r_minus: np.ndarray           # torsion curvature, raw component slots
    # group data (quotient model); None for the section model
    s: int = 0
    V: np.ndarray | None = None
    xi: np.ndarray | None = None
    dxi_cov: np.ndarray | None = None   # [a, k, i] = nabla_k xi_{a i}
    dv_cov_low: np.ndarray | None = None  # [a, k, i] = g_{im} nabla_k V_a^m
    G_ab: np.ndarray | None = None
    K_ab: np.ndarray | None = None
    T_ab: np.ndarray | None = None
    # section data
    r: int = 0
    dsigma: np.ndarray | None = None          # [alpha, i]
    hess_sigma: np.ndarray | None = None      # [alpha, i, j] plain Hessian
    # zero-mode frames (rows are ambient components)
    plus_frame: np.ndarray | None = None
    minus_frame: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.plus_frame.shape[0]


def _common_frame_data(ctx: GeneralizedMetricContext, point):
    gmat = ctx.metric_at(point)
    ginv = ch.metric_inverse(gmat)
    hval = ctx.flux_at(point)
    gamma = ch.christoffel(ctx.g, point)
    rmin = bismut_curvature(-1, ctx, point)
    return gmat, ginv, hval, gamma, rmin


def point_frame_quotient(scn: qt.QuotientScenario, qpoint,
                         basis=None) -> PointFrame:
    """Assemble the gauged-model data at lift(qpoint) with aligned frames.

    The plus and minus zero-mode frames are the tau_pm lifts of one
    quotient basis, so the localized exponent and the reduced-curvature
    contraction live on identical frames.
    """
    if basis is None:
        basis = qt.quotient_frame(scn, qpoint)
    basis = np.asarray(basis, dtype=float)
    p = scn.lift(qpoint)
    ea, ctx = scn.ea, scn.ctx
    gmat, ginv, hval, gamma, rmin = _common_frame_data(ctx, p)
    plus = np.array([np.asarray(v, dtype=float)
                     for v in qt.horizontal_lift(scn, p, +1, basis)])
    minus = np.array([np.asarray(v, dtype=float)
                      for v in qt.horizontal_lift(scn, p, -1, basis)])
    s = ea.s
    vv = np.array([np.asarray(f(p), dtype=float) for f in ea.V])
    xv = np.array([np.asarray(f(p), dtype=float) for f in ea.xi])
    dxi, dvl = [], []
    for a in range(s):
        jx = ch.differentiate(ea.xi[a], p, order=1)
        dxi.append(jx.d1 - np.einsum("mki,m->ki", gamma, jx.value))
        jv = ch.differentiate(ea.V[a], p, order=1)
        dv = jv.d1 + np.einsum("ikm,m->ki", gamma, jv.value)
        dvl.append(np.einsum("ki,im->km", dv, gmat))
    rm = qt.reduction_matrices(ea, ctx, p)
    pf = PointFrame(
        point=tuple(p), n=ctx.chart.dim, g=gmat, ginv=ginv, H=hval,
        gamma=gamma, r_minus=rmin, s=s, V=vv, xi=xv,
        dxi_cov=np.array(dxi), dv_cov_low=np.array(dvl),
        G_ab=rm.G, K_ab=rm.K, T_ab=rm.T,
        plus_frame=plus, minus_frame=minus)
    _check_zero_mode_frames(pf)
    return pf


def _check_zero_mode_frames(pf: PointFrame, tol: float = 1e-6):
    """Zero modes must satisfy their defining linear constraints."""
    if pf.s:
        for sign, fr in ((+1, pf.plus_frame), (-1, pf.minus_frame)):
            rows = pf.V @ pf.g + sign * pf.xi
            if np.max(np.abs(rows @ fr.T)) > tol:
                raise FrameMismatchError(
                    "zero-mode frame violates its horizontality constraint")
    if pf.r:
        if np.max(np.abs(pf.dsigma @ pf.plus_frame.T)) > tol:
            raise FrameMismatchError(
                "zero-mode frame not tangent to the zero locus")


def point_frame_section(scn: sm.SubmanifoldScenario, u,
                        basis=None) -> PointFrame:
    """Assemble the constrained-model data at embed(u) on a tangent frame."""
    if basis is None:
        basis = sm.tangent_frame(scn, u)
    basis = np.asarray(basis, dtype=float)
    p = scn.embed(u)
    ctx = scn.ctx
    gmat, ginv, hval, gamma, rmin = _common_frame_data(ctx, p)
    n = ctx.chart.dim
    grads, hesses = [], []
    for s_field in scn.sd.sigma:
        jet = ch.differentiate(s_field, p, order=2, chart=None)
        grads.append(jet.d1.reshape(n))
        hesses.append(jet.d2.reshape(n, n))
    pf = PointFrame(
        point=tuple(p), n=n, g=gmat, ginv=ginv, H=hval, gamma=gamma,
        r_minus=rmin, r=scn.sd.r, dsigma=np.array(grads),
        hess_sigma=np.array(hesses),
        plus_frame=basis, minus_frame=basis)
    _check_zero_mode_frames(pf)
    return pf


# ----------------------------------------------------------------------
# component actions as auxiliary polynomials
# ----------------------------------------------------------------------

def _quad_sum(ngen, m, coeffs, first, second):
    """sum coeffs[r, c] theta_first(r) theta_second(c) as an element.

    ``first``/``second`` select the chirality offset: 0 for plus modes,
    m for minus modes.
    """
    out = G(ngen)
    rows, cols = coeffs.shape
    for rr in range(rows):
        for cc in range(cols):
            c = coeffs[rr, cc]
            if c == 0.0:
                continue
            ia, ib = first + rr, second + cc
            if ia == ib:
                continue
            lo_first = ia < ib
            mask = (1 << ia) | (1 << ib)
            out = out + G(ngen, {mask: c if lo_first else -c})
    return out


def _base_action(pf: PointFrame, poly: AuxiliaryPolynomial):
    """Shared part: curvature quartic, F square, F-flux coupling."""
    m = pf.m
    ngen = 2 * m
    p_fr, m_fr = pf.plus_frame, pf.minus_frame
    rhat = np.einsum("ijkl,ai,bj,ck,dl->abcd", pf.r_minus, p_fr, p_fr, m_fr,
                     m_fr)
    # the action pairs the curvature in the pairing-flipped component
    # convention (a sign flip of the sphere-positive array): the flux-squared
    # part must cancel against the multiplier Gaussian downstream
    poly.add_const(0.5 * curvature_quartic(rhat, m))
    for i in range(pf.n):
        for j in range(pf.n):
            if pf.g[i, j] != 0.0:
                poly.add_quad(f"F{i}", f"F{j}", 0.5 * pf.g[i, j])
    c1 = np.einsum("ijk,ri,mj->rmk", pf.H, m_fr, p_fr)
    for k in range(pf.n):
        coupling = _quad_sum(ngen, m, 0.5 * c1[:, :, k], m, 0)
        if coupling.max_abs():
            poly.add_lin(f"F{k}", coupling)
    dmat = np.einsum("rmk,kl,snl->rmsn", c1, pf.ginv, c1)
    hh = G(ngen)
    for rr in range(m):
        for mm_ in range(m):
            for ss in range(m):
                for nn in range(m):
                    c = dmat[rr, mm_, ss, nn]
                    if c == 0.0:
                        continue
                    prod = (G.generator(ngen, m + rr) * G.generator(ngen, mm_)
                            * G.generator(ngen, m + ss)
                            * G.generator(ngen, nn))
                    hh = hh + c * prod
    poly.add_const(0.125 * hh)


def build_quotient_action(pf: PointFrame) -> AuxiliaryPolynomial:
    """The gauged component action restricted to the zero modes.

    Unknowns: F^i, and the three even multiplier blocks pm (mixed), pp and
    mm (the chiral pair whose joint elimination realizes the delta-function
    constraint).
    """
    if pf.s == 0:
        raise FrameMismatchError("quotient action needs group data")
    m = pf.m
    ngen = 2 * m
    variables = [f"F{i}" for i in range(pf.n)]
    variables += [f"pm{a}" for a in range(pf.s)]
    variables += [f"pp{a}" for a in range(pf.s)]
    variables += [f"mm{a}" for a in range(pf.s)]
    poly = AuxiliaryPolynomial(ngen, variables)
    _base_action(pf, poly)
    p_fr, m_fr = pf.plus_frame, pf.minus_frame

    for a in range(pf.s):
        for b in range(pf.s):
            if pf.G_ab[a, b] != 0.0:
                poly.add_quad(f"pm{a}", f"pm{b}", -0.5 * pf.G_ab[a, b])
            if pf.K_ab[a, b] != 0.0:
                poly.add_quad(f"pp{a}", f"mm{b}", 0.5 * pf.K_ab[a, b])
    for a in range(pf.s):
        for i in range(pf.n):
            if pf.xi[a, i] != 0.0:
                poly.add_quad(f"F{i}", f"pm{a}", -pf.xi[a, i])

    for a in range(pf.s):
        # mixed multiplier: (1/2)(grad_+ xi psi_- - grad_- xi psi_+)
        # + (psi_+, grad_- V_a)
        t1 = np.einsum("ki,mk,ri->mr", pf.dxi_cov[a], p_fr, m_fr)
        t2 = np.einsum("ki,rk,mi->rm", pf.dxi_cov[a], m_fr, p_fr)
        t3 = np.einsum("ki,mi,rk->mr", pf.dv_cov_low[a], p_fr, m_fr)
        lin = (_quad_sum(ngen, m, 0.5 * t1, 0, m)
               + _quad_sum(ngen, m, -0.5 * t2, m, 0)
               + _quad_sum(ngen, m, t3, 0, m))
        if lin.max_abs():
            poly.add_lin(f"pm{a}", lin)
        # chiral multipliers
        u1 = np.einsum("ki,ri,sk->rs", pf.dxi_cov[a], m_fr, m_fr)
        u2 = np.einsum("kj,rk,sj->rs", pf.dv_cov_low[a], m_fr, m_fr)
        lpp = _quad_sum(ngen, m, 0.5 * u1, m, m) \
            + _quad_sum(ngen, m, 0.5 * u2, m, m)
        if lpp.max_abs():
            poly.add_lin(f"pp{a}", lpp)
        w1 = np.einsum("ki,ri,sk->rs", pf.dxi_cov[a], p_fr, p_fr)
        w2 = np.einsum("kj,rk,sj->rs", pf.dv_cov_low[a], p_fr, p_fr)
        lmm = _quad_sum(ngen, m, -0.5 * w1, 0, 0) \
            + _quad_sum(ngen, m, 0.5 * w2, 0, 0)
        if lmm.max_abs():
            poly.add_lin(f"mm{a}", lmm)
    return poly


def build_section_action(pf: PointFrame) -> AuxiliaryPolynomial:
    """The section-constrained component action on tangent zero modes.

    Unknowns: F^i and the transverse multipliers W_alpha (the imaginary
    unit of the delta-producing pairing is absorbed into W, which flips the
    sign of its induced quadratic block but not the stationary exponent).
    """
    if pf.r == 0:
        raise FrameMismatchError("section action needs constraint data")
    m = pf.m
    ngen = 2 * m
    variables = [f"F{i}" for i in range(pf.n)] + \
        [f"W{al}" for al in range(pf.r)]
    poly = AuxiliaryPolynomial(ngen, variables)
    _base_action(pf, poly)
    e_fr = pf.plus_frame
    for al in range(pf.r):
        for i in range(pf.n):
            if pf.dsigma[al, i] != 0.0:
                poly.add_quad(f"F{i}", f"W{al}", pf.dsigma[al, i])
        hess_c = np.einsum("ij,ri,nj->nr", pf.hess_sigma[al], e_fr, e_fr)
        lin = _quad_sum(ngen, m, -hess_c, 0, m)
        gam_c = np.einsum("i,ijk,rj,nk->rn",
                          pf.dsigma[al], pf.gamma, e_fr, e_fr)
        lin = lin + _quad_sum(ngen, m, -gam_c, m, 0)
        if lin.max_abs():
            poly.add_lin(f"W{al}", lin)
    return poly


def localize_model(pf: PointFrame, model: str):
    """Run the elimination chain; returns (exponent, details).

    ``model`` is "quotient" or "section".  The exponent is minus the
    reduced action: a quartic Grassmann element in the zero-mode
    generators whose coefficients match the reduced-curvature pairing of
    the corresponding geometry module (contract checked by the test suite
    and the scenario checks).  ``details`` carries the eliminated
    multiplier solutions keyed by block name.
    """
    if model == "quotient":
        poly = build_quotient_action(pf)
        chain = [[f"pp{a}" for a in range(pf.s)]
                 + [f"mm{a}" for a in range(pf.s)],
                 [f"F{i}" for i in range(pf.n)],
                 [f"pm{a}" for a in range(pf.s)]]
    elif model == "section":
        poly = build_section_action(pf)
        chain = [[f"F{i}" for i in range(pf.n)],
                 [f"W{al}" for al in range(pf.r)]]
    else:
        raise ValueError("model must be 'quotient' or 'section'")
    details = {}
    for group in chain:
        poly, sol = poly.eliminate(group)
        details.update(sol)
    if poly.variables:
        raise FrameMismatchError("variables left after the chain")
    return -1.0 * poly.const, details


def localized_exponent_target(pf: PointFrame, reduced_paper_slots: np.ndarray
                              ) -> GrassmannElement:
    """The exponent the chain must reproduce: the reduced-curvature pairing.

    Takes the reduced curvature in operator slots (as returned by the
    geometry modules on the same aligned frames) and renders it with the
    same pairing convention the assembled actions use, so that
    ``localize_model`` output equals this element coefficientwise.
    """
    raw = operator_slots_to_raw(reduced_paper_slots)
    return -0.5 * curvature_quartic(raw, pf.m)
