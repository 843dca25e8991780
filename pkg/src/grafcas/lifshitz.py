"""Casimir pressure between two parallel pristine graphene sheets.

Three routes to the pressure at separation a and temperature T:

* Matsubara representation: -(kB T/pi) sum'_l int dq q kappa_l
  [r^-2 e^{2 a kappa_l} - 1]^-1, evaluated per polarization with the
  imaginary-axis permittivities; the l = 0 transverse channel runs
  through the regularized combination xi^2 (eps_Tr - 1).
* Real-frequency evanescent integral (q > omega/c), split exactly at
  q = omega/vF into plasmonic and deep contributions.
* Real-frequency propagating integral (q < omega/c), a validation-grade
  oscillatory path: half-period phase cells in both the wavenumber and
  frequency directions with Levin acceleration of the frequency-cell
  partial sums; production propagating numbers come from the residual
  P_prop = P_matsubara - P_evan.

Sums and panel reductions accumulate in fixed order; identical inputs
give bit-identical results regardless of external parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import KB, ZETA3, PhysicalParams
from .fresnel import r_pair_imag_vec, r_te_real_vec, r_tm_real_vec
from .quadrature import accelerate, neumaier_sum, panel_nodes, panel_reduce
from .response import (ResponseError, eps_imag_axis_vec, eps_l0_vec,
                       eps_real_axis_vec, regularized_tr_l0_vec)


class PressureError(RuntimeError):
    """Raised when a pressure quadrature fails to converge."""


@dataclass(frozen=True)
class SummationConfig:
    """Tolerances and cutoffs for the pressure evaluations."""

    rel_tol: float = 1e-7            # Matsubara route
    rel_tol_real: float = 1e-4       # real-frequency integrals
    prop_tol: float = 1e-2           # oscillatory propagating path
    l_max_cap: int = 20000
    q_cutoff_factor: float = 50.0    # y_max = q_cutoff_factor (y = 2 a kappa)
    singularity_offset: float = 1e-9

    def __post_init__(self):
        if self.rel_tol <= 0 or self.rel_tol_real <= 0 or self.prop_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.q_cutoff_factor < 20.0:
            raise ValueError("q_cutoff_factor must be at least 20")


@dataclass
class PressureBreakdown:
    """All pressure channels at one (a, T), in Pa, with error estimates."""

    a_m: float
    T_K: float
    P_TM: float = math.nan
    P_TE: float = math.nan
    P_total: float = math.nan
    P_TM_evan: float = math.nan
    P_TM_prop: float = math.nan
    P_TM_evan_plasmonic: float = math.nan
    P_TM_evan_deep: float = math.nan
    P_IM: float = math.nan
    ratio_TM_TE: float = math.nan
    ratio_TM_total: float = math.nan
    ratio_total_IM: float = math.nan
    err_P_TM: float = math.nan
    err_P_TE: float = math.nan
    err_P_TM_evan: float = math.nan
    err_P_TM_prop: float = math.nan
    status: str = "ok"

    def finalize(self):
        self.P_total = self.P_TM + self.P_TE
        self.ratio_TM_TE = self.P_TM / self.P_TE if self.P_TE else math.inf
        self.ratio_TM_total = self.P_TM / self.P_total if self.P_total else math.nan
        self.ratio_total_IM = self.P_total / self.P_IM if self.P_IM else math.nan
        return self


@dataclass
class EvanescentSplit:
    total: float
    plasmonic: float
    deep: float
    err_total: float
    err_plasmonic: float
    err_deep: float


def ideal_metal_classical(a: float, T: float) -> float:
    """Classical-limit pressure between ideal metals: -kB T zeta(3)/(4 pi a^3)."""
    if a <= 0.0 or T <= 0.0:
        raise ValueError("a and T must be positive")
    return -KB * T * ZETA3 / (4.0 * math.pi * a ** 3)


# ---------------------------------------------------------------------------
# adaptive panel driver (deterministic, with node-result caching)
# ---------------------------------------------------------------------------

def _adaptive_panels(eval_panels, edges, rel_tol, abs_floor=0.0, max_sweeps=24):
    """Refine a 1D panel partition until the summed |K-G| error passes.

    ``eval_panels(lo_array, hi_array) -> (values, errors)`` evaluates a
    batch of panels.  Panels are processed and split in deterministic
    order; results for already-seen panels are cached by edge pair.
    """
    cache: dict[tuple[float, float], tuple[float, float]] = {}
    panels = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)
              if edges[i + 1] > edges[i]]

    def evaluate_pending():
        new = [p for p in panels if p not in cache]
        if new:
            lo = np.array([p[0] for p in new])
            hi = np.array([p[1] for p in new])
            vals, errs = eval_panels(lo, hi)
            for p, v, e in zip(new, np.atleast_1d(vals), np.atleast_1d(errs)):
                cache[p] = (v, e)

    for _ in range(max_sweeps):
        evaluate_pending()
        total = neumaier_sum(cache[p][0] for p in panels)
        err = neumaier_sum(cache[p][1] for p in panels)
        tol = max(rel_tol * abs(total), abs_floor)
        if err <= tol:
            return total, err, True
        # split the worst offenders (at least one, at most a quarter)
        ranked = sorted(panels, key=lambda p: -cache[p][1])
        budget = max(1, len(panels) // 4)
        to_split = set()
        for p in ranked[:budget]:
            if cache[p][1] > 0.05 * tol / max(len(panels), 1):
                to_split.add(p)
        if not to_split:
            return total, err, False
        nxt = []
        for p in panels:
            if p in to_split:
                mid = 0.5 * (p[0] + p[1])
                if mid <= p[0] or mid >= p[1]:
                    nxt.append(p)
                    continue
                nxt.append((p[0], mid))
                nxt.append((mid, p[1]))
            else:
                nxt.append(p)
        panels = nxt
    evaluate_pending()
    total = neumaier_sum(cache[p][0] for p in panels)
    err = neumaier_sum(cache[p][1] for p in panels)
    return total, err, err <= max(rel_tol * abs(total), abs_floor)


def _geo_edges(lo, hi, n, rho=1.5):
    k = np.arange(n + 1)
    frac = (rho ** k - 1.0) / (rho ** n - 1.0)
    return lo + (hi - lo) * frac


# ---------------------------------------------------------------------------
# Matsubara representation
# ---------------------------------------------------------------------------

def _matsubara_term(a, T, pol, l, cfg, params):
    """Dimensionless term integral int_0^xmax x*y dx / (r^-2 e^y - 1)."""
    xi = params.matsubara_frequency(l)
    yl = 2.0 * a * xi / params.c
    ymax = cfg.q_cutoff_factor
    if yl >= ymax:
        return 0.0, 0.0
    xmax = math.sqrt(ymax * ymax - yl * yl)

    def eval_panels(lo, hi):
        edges = np.stack([lo, hi], axis=-1)
        x, wk, wg = panel_nodes(edges)
        xf = x[..., 0, :]
        q = xf / (2.0 * a)
        y = np.hypot(xf, yl)
        if params.alpha == 0.0:
            vals = np.zeros_like(xf)
        else:
            if l == 0:
                if pol == "TM":
                    e1, _ = eps_l0_vec(q.ravel(), T, params)
                    r, _ = r_pair_imag_vec(q.ravel(), 0.0, e1,
                                           np.zeros_like(e1), params)
                else:
                    R, _ = regularized_tr_l0_vec(q.ravel(), T, params)
                    _, r = r_pair_imag_vec(q.ravel(), 0.0,
                                           np.zeros_like(R), R, params)
            else:
                eL1, eT1, _ = eps_imag_axis_vec(q.ravel(), xi, T, params)
                rtm, rte = r_pair_imag_vec(q.ravel(), xi, eL1, eT1 * xi * xi,
                                           params)
                r = rtm if pol == "TM" else rte
            r = r.reshape(q.shape)
            r2 = r * r
            # x y / (e^y / r^2 - 1) = x y r^2 e^{-y} / (1 - r^2 e^{-y})
            emy = np.exp(-y)
            den = 1.0 - r2 * emy
            vals = np.where(r2 != 0.0, xf * y * r2 * emy /
                            np.where(den != 0.0, den, 1.0), 0.0)
        k, e = panel_reduce(vals[..., None, :], wk, wg)
        return k[..., 0], e[..., 0]

    edges = _geo_edges(0.0, xmax, 20, rho=1.35)
    inner_tol = cfg.rel_tol / 30.0
    val, err, ok = _adaptive_panels(eval_panels, list(edges), inner_tol)
    if not ok and abs(val) > 0.0 and err > 1e-3 * abs(val):
        raise PressureError(f"Matsubara inner quadrature stalled at l={l}, "
                            f"err={err:.2e}, value={val:.3e}")
    return val, err


def pressure_matsubara(a, T, pol, cfg: SummationConfig | None = None,
                       params: PhysicalParams | None = None):
    """Matsubara-representation pressure for one polarization, in Pa.

    Returns (value, error_estimate).  The l sum is truncated when three
    consecutive terms fall below rel_tol of the running sum; a geometric
    tail bound joins the error estimate.
    """
    cfg = cfg or SummationConfig()
    params = params or PhysicalParams(temperature_K=T, separation_m=a)
    if T <= 0.0:
        raise ResponseError("Matsubara representation requires T > 0")
    if a <= 0.0:
        raise ValueError("separation must be positive")
    params = replace(params, temperature_K=T, separation_m=a)
    params.check_dirac_validity()

    pref = -KB * T / (8.0 * math.pi * a ** 3)
    terms = []
    errs = []
    consecutive = 0
    prev = None
    tail = 0.0
    for l in range(cfg.l_max_cap + 1):
        t, e = _matsubara_term(a, T, pol, l, cfg, params)
        w = 0.5 if l == 0 else 1.0
        terms.append(w * t)
        errs.append(w * e)
        total = neumaier_sum(terms)
        if l > 0:
            if total == 0.0 and t == 0.0:
                break
            if abs(t) < cfg.rel_tol * abs(total):
                consecutive += 1
                if consecutive >= 3:
                    ratio = min(abs(t / prev) if prev else 0.5, 0.9)
                    tail = abs(t) * ratio / (1.0 - ratio)
                    break
            else:
                consecutive = 0
        if t != 0.0:
            prev = t
    total = neumaier_sum(terms)
    err = neumaier_sum(errs) + tail
    return pref * total, abs(pref) * err


# ---------------------------------------------------------------------------
# real-frequency evanescent integral
# ---------------------------------------------------------------------------

def _evan_y_integrand(y, omega, a, T, pol, params, fast=True):
    """y^2 Im[ (r^-2 e^y - 1)^-1 ] at wavenumbers q = sqrt((y/2a)^2 + (w/c)^2).

    ``omega`` broadcasts against ``y`` so that many frequencies are
    evaluated in one kernel call.
    """
    kap = y / (2.0 * a)
    omega = np.broadcast_to(omega, y.shape)
    q = np.hypot(kap, omega / params.c)
    if params.alpha == 0.0:
        return np.zeros_like(y), np.zeros_like(y, dtype=complex)
    eL1, eT1, _ = eps_real_axis_vec(q.ravel(), omega.ravel(), T, params, fast)
    if pol == "TM":
        r = r_tm_real_vec(q.ravel(), omega.ravel(), eL1, params)
    else:
        r = r_te_real_vec(q.ravel(), omega.ravel(), eT1, params)
    r = r.reshape(y.shape)
    r2 = r * r
    emy = np.exp(-np.minimum(y, 700.0))
    z = r2 * emy
    den = 1.0 - z
    sden = np.where(np.abs(den) < 1e-280, 1.0, den)
    g = np.where(r2 != 0.0, z / sden, 0.0)
    return y * y * g.imag, z


def _evan_fracs(mesh_scale: int):
    n_p = 14 * mesh_scale
    n_d = 14 * mesh_scale
    k = np.arange(n_p + 1)
    frac_p = (1.5 ** k - 1.0) / (1.5 ** n_p - 1.0)
    k = np.arange(n_d + 1)
    frac_d = (1.5 ** k - 1.0) / (1.5 ** n_d - 1.0)
    return frac_p, frac_d


def _dip_clusters(w, y_scan, z_scan, a, T, pol, params, n_side):
    """Edge clusters resolving cavity-mode dips of |1 - r^2 e^-y|.

    A dip requires |z| = |r^2 e^-y| to cross 1; the smooth crossings of
    |z| - 1 are bracketed on the scan grid and sharpened by lockstep
    bisection.  Each crossing gets a two-sided geometric cluster sized
    from the local Lorentzian width |Im z| / |d Re z/dy|.  Collapsed
    clusters are returned where no crossing exists.
    """
    n_w, n_s = z_scan.shape
    s = np.abs(z_scan) - 1.0
    cross = s[:, :-1] * s[:, 1:] < 0.0
    order = np.argsort(~cross, axis=1, kind="stable")  # crossings first

    def z_at(y):
        safe = np.maximum(y, 1e-300)
        _, zv = _evan_y_integrand(safe[:, None, None], w[:, None, None],
                                  a, T, pol, params)
        return zv[:, 0, 0]

    clusters = []
    for rank in range(3):
        j = order[:, rank]
        active = cross[np.arange(n_w), j]
        if not np.any(active):
            clusters.append(np.zeros((n_w, 2 * (n_side + 1))))
            continue
        lo = np.where(active, y_scan[np.arange(n_w), j], 0.0)
        hi = np.where(active, y_scan[np.arange(n_w), j + 1], 0.0)
        span0 = hi - lo
        s_lo = np.where(active, s[np.arange(n_w), j], 1.0)
        for _ in range(42):
            mid = 0.5 * (lo + hi)
            sm = np.abs(z_at(mid)) - 1.0
            left = s_lo * sm < 0.0
            lo = np.where(left, lo, mid)
            hi = np.where(left, mid, hi)
            s_lo = np.where(left, s_lo, sm)
        y_c = 0.5 * (lo + hi)
        z_c = z_at(y_c)
        h = np.maximum(1e-7 * np.maximum(y_c, 1e-300), 1e-300)
        slope = np.abs(z_at(y_c + h).real - z_at(np.maximum(y_c - h, 0.0)).real) / (2.0 * h)
        eta = np.maximum(np.abs(z_c.imag), 1e-18)
        delta = np.clip(eta / np.maximum(slope, 1e-300),
                        1e-12 * np.maximum(y_c, 1e-300),
                        np.maximum(span0, 1e-300))
        reach = np.maximum(2.0 * span0, 8.0 * delta)
        ratio = (3.0 * reach / delta) ** (1.0 / n_side)
        g = (delta[:, None] / 3.0) * ratio[:, None] ** np.arange(n_side + 1)
        offs = np.concatenate([-g[:, ::-1], g], axis=1)
        edges = np.where(active[:, None], y_c[:, None] + offs, 0.0)
        clusters.append(np.maximum(edges, 0.0))
    return np.concatenate(clusters, axis=1)


def _evan_batch(omega_arr, a, T, pol, cfg, params, mesh_scale=1):
    """Inner y-integrals for a batch of frequencies.

    Returns (plasmonic, deep, err) arrays.  The wavenumber integral runs
    on fixed geometric meshes split exactly at the plasmonic/deep
    boundary y* = 2 a sqrt((w/vF)^2 - (w/c)^2).  A coarse logarithmic
    scan of the plasmonic integrand locates the thermal-plasmon /
    cavity-mode spike per frequency; an extra panel cluster is merged in
    around it.  ``mesh_scale`` refines all panel counts for convergence
    checks.  Work is chunked along the frequency axis to bound memory.
    """
    w_all = np.asarray(omega_arr, dtype=float)
    frac_p, frac_d = _evan_fracs(mesh_scale)
    ycut = cfg.q_cutoff_factor
    n_cl = 10 * mesh_scale
    cluster = np.geomspace(1.0 / 2.4, 2.4, n_cl + 1)
    scan_frac = np.geomspace(2e-4, 1.0, 48 * mesh_scale)
    n_side = 12 * mesh_scale
    n_y = 15 * (len(frac_p) + len(frac_d) + len(cluster) + 6 * (n_side + 1))
    chunk = max(1, int(2.5e7 / (n_y * 450)))
    plas = np.empty_like(w_all)
    deep = np.empty_like(w_all)
    err = np.empty_like(w_all)
    for i0 in range(0, len(w_all), chunk):
        w = w_all[i0:i0 + chunk]
        ystar = 2.0 * a * w * math.sqrt(1.0 / params.vF ** 2 - 1.0 / params.c ** 2)

        y1 = np.minimum(ystar, ycut)
        # scan the plasmonic integrand: broad ridge plus cavity-mode dips
        y_scan = y1[:, None] * scan_frac
        f_scan, z_scan = _evan_y_integrand(y_scan[:, None, :],
                                           w[:, None, None], a, T, pol, params)
        f_scan, z_scan = f_scan[:, 0, :], z_scan[:, 0, :]
        ridge = y_scan[np.arange(len(w)), np.argmax(np.abs(f_scan), axis=1)]
        halo = np.clip(ridge[:, None] * cluster, 0.0, y1[:, None])
        dips = _dip_clusters(w, y_scan, z_scan, a, T, pol, params, n_side)
        dips = np.clip(dips, 0.0, y1[:, None])
        base = y1[:, None] * frac_p
        edges_p = np.sort(np.concatenate([base, halo, dips], axis=1), axis=1)
        y_pn, wk_p, wg_p = panel_nodes(edges_p)
        vals, _ = _evan_y_integrand(y_pn, w[:, None, None], a, T, pol, params)
        kv, ke = panel_reduce(vals, wk_p, wg_p)
        plas[i0:i0 + chunk] = kv.sum(axis=-1)
        err[i0:i0 + chunk] = ke.sum(axis=-1)

        span = np.maximum(ycut - ystar, 0.0)
        edges_d = ystar[:, None] + span[:, None] * frac_d
        y_d, wk_d, wg_d = panel_nodes(edges_d)
        vals, _ = _evan_y_integrand(y_d, w[:, None, None], a, T, pol, params)
        kv, ke = panel_reduce(vals, wk_d, wg_d)
        deep[i0:i0 + chunk] = kv.sum(axis=-1)
        err[i0:i0 + chunk] += ke.sum(axis=-1)
    return plas, deep, err


def pressure_evanescent(a, T, pol, cfg: SummationConfig | None = None,
                        params: PhysicalParams | None = None,
                        mesh_scale: int = 1) -> EvanescentSplit:
    """Evanescent-wave pressure with its plasmonic/deep split, in Pa.

    The frequency integral separates the zero-point and thermal pieces
    of coth(hbar w/(2 kB T)); the thermal piece runs on a log-graded
    mesh down to 1e-8 kB T/hbar where the integrand's vanishing at
    omega -> 0 bounds the remainder.  ``mesh_scale`` doubles the inner
    meshes for convergence checks.
    """
    cfg = cfg or SummationConfig()
    params = params or PhysicalParams(temperature_K=T, separation_m=a)
    params = replace(params, temperature_K=T, separation_m=a)
    if T <= 0.0:
        raise ResponseError("finite-temperature evanescent route requires T > 0")
    pref = -params.hbar / (16.0 * math.pi ** 2 * a ** 3)
    wT = KB * T / params.hbar

    def omega_integral(edges, weight_fn):
        x, wk, wg = panel_nodes(np.asarray(edges)[None, :])
        x, wk, wg = x[0], wk[0], wg[0]
        shape = x.shape
        p, d, e = _evan_batch(x.ravel(), a, T, pol, cfg, params, mesh_scale)
        p, d, e = p.reshape(shape), d.reshape(shape), e.reshape(shape)
        wfac = weight_fn(x)
        tot_p, err_p = panel_reduce(p * wfac, wk, wg)
        tot_d, err_d = panel_reduce(d * wfac, wk, wg)
        inner = np.sum(np.abs(wk) * e * np.abs(wfac), axis=-1)
        return (neumaier_sum(tot_p), neumaier_sum(tot_d),
                neumaier_sum(err_p) + neumaier_sum(err_d) + neumaier_sum(inner))

    # thermal piece: weight 2 n_B(omega); coarse log mesh over the
    # omega -> 0 decades (integrand vanishes there), finer above
    n_t1 = 3 * mesh_scale
    n_t2 = 20 * mesh_scale
    edges_th = np.concatenate([
        (1e-8 * wT) * 1e5 ** np.linspace(0.0, 1.0, n_t1 + 1)[:-1],
        (1e-3 * wT) * 4.5e4 ** np.linspace(0.0, 1.0, n_t2 + 1),
    ])

    def bose2(x):
        u = params.hbar * x / (KB * T)
        return 2.0 / np.expm1(np.minimum(u, 700.0))

    p_th, d_th, e_th = omega_integral(edges_th, bose2)

    # zero-point piece: weight 1, log mesh with a power-law tail bound
    w0 = max(wT, params.c / (2.0 * a))
    n_z1 = 6 * mesh_scale
    n_z2 = 14 * mesh_scale
    edges_zp = np.concatenate([
        (1e-4 * w0) * 1e4 ** np.linspace(0.0, 1.0, n_z1 + 1)[:-1],
        w0 * 400.0 ** np.linspace(0.0, 1.0, n_z2 + 1),
    ])
    p_zp, d_zp, e_zp = omega_integral(edges_zp, lambda x: np.ones_like(x))
    p_end, d_end, _ = _evan_batch(np.array([edges_zp[-1]]), a, T, pol, cfg,
                                  params, mesh_scale)
    e_zp += (abs(p_end[0]) + abs(d_end[0])) * edges_zp[-1] / 2.0

    plas = pref * (p_th + p_zp)
    deep = pref * (d_th + d_zp)
    err_p = abs(pref) * (e_th + e_zp)
    return EvanescentSplit(total=plas + deep, plasmonic=plas, deep=deep,
                           err_total=err_p, err_plasmonic=err_p, err_deep=err_p)


# ---------------------------------------------------------------------------
# real-frequency propagating integral (validation path)
# ---------------------------------------------------------------------------

def _prop_phi(omega_nodes, pol, T, params):
    """Small-q slope of eps - 1 in qt = c q/omega for the propagating region.

    With vF q/omega <= vF/c, eps - 1 = qt * Phi(omega) up to relative
    O((vF/c)^2) ~ 1e-5, so one response evaluation per frequency serves
    the whole wavenumber integral.
    """
    w = np.asarray(omega_nodes, dtype=float)
    Dh = (np.full_like(w, math.inf) if T == 0.0
          else params.hbar * w / (2.0 * params.kB * T))
    from .response import _real42_vec
    eL1, eT1, _, _ = _real42_vec(np.ones_like(w), Dh, params, fast=False)
    return eL1 if pol == "TM" else eT1


def _prop_k_integral(omega_nodes, a, T, pol, params, phi=None):
    """K(w) = int_0^{w/c} k^2 Re[(r^-2 e^{2iak} - 1)^-1] dk.

    Vectorized over a batch of frequencies; the wavenumber integral is
    cut into half-period phase cells of e^{2iak}.  In the propagating
    region r depends on k in closed form through Phi(omega):
    r_TM = Phi kt/(i + Phi kt), r_TE = -Phi/(i kt + Phi), kt = c k/w.
    """
    w = np.asarray(omega_nodes, dtype=float)
    if phi is None:
        phi = _prop_phi(w, pol, T, params)
    kmax = w / params.c
    cell = math.pi / (2.0 * a)
    n_full = int(np.max(kmax) / cell) + 1
    m = np.arange(n_full + 1)
    edges = np.minimum(m[None, :] * cell, kmax[:, None])
    k, wk, wg = panel_nodes(edges)
    kt = params.c * k / w[:, None, None]
    ph = phi[:, None, None]
    if pol == "TM":
        r = ph * kt / (1j + ph * kt)
    else:
        r = -ph / (1j * kt + ph)
    r2 = r * r
    z = r2 * np.exp(-2j * a * k)
    den = 1.0 - z
    g = (z / np.where(np.abs(den) == 0.0, 1.0, den)).real
    vals = k * k * g
    kv, ke = panel_reduce(vals, wk, wg)
    return kv.sum(axis=-1), ke.sum(axis=-1)


def pressure_propagating_direct(a, T, pol, cfg: SummationConfig | None = None,
                                params: PhysicalParams | None = None):
    """Direct oscillatory propagating-wave pressure (validation grade).

    Frequency phase cells of width pi c/(2a); the Bose-weighted head is
    summed directly and the zero-point tail cells are Levin-accelerated.
    Returns (value, error_estimate) with the default 1% target.
    """
    cfg = cfg or SummationConfig()
    params = params or PhysicalParams(temperature_K=T, separation_m=a)
    params = replace(params, temperature_K=T, separation_m=a)
    if T <= 0.0:
        raise ResponseError("propagating route requires T > 0 here")
    pref = -params.hbar / (2.0 * math.pi ** 2)
    cell = math.pi * params.c / (2.0 * a)
    wT = KB * T / params.hbar
    m_bose = int(45.0 * wT / cell) + 1
    n_tail = 56
    M = m_bose + n_tail

    def coth(w):
        x = params.hbar * w / (2.0 * KB * T)
        return 1.0 / np.tanh(np.minimum(x, 350.0))

    def omega_cell(w_lo, w_hi):
        x, wk, wg = panel_nodes(np.array([[w_lo, w_hi]]))
        x, wk, wg = x[0, 0], wk[0, 0], wg[0, 0]
        vals, errs = _prop_k_integral(x, a, T, pol, params)
        f = vals * coth(x)
        tot = float(np.sum(f * wk))
        err = (abs(tot - float(np.sum(f * wg)))
               + float(np.sum(np.abs(wk) * errs * np.abs(coth(x)))))
        return tot, err

    # head cell with the coth ~ 1/w region, subdivided logarithmically
    cells = []
    errs = []
    head_edges = cell * np.array([0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.6, 1.0])
    h_tot = 0.0
    h_err = 0.0
    for s0, s1 in zip(head_edges[:-1], head_edges[1:]):
        t, e = omega_cell(s0, s1)
        h_tot += t
        h_err += e
    cells.append(h_tot)
    errs.append(h_err)
    for m in range(1, M):
        t, e = omega_cell(m * cell, (m + 1) * cell)
        cells.append(t)
        errs.append(e)

    partial = np.cumsum(cells)
    base = max(m_bose, 2)
    tail_sums = partial[base:]
    acc = accelerate(tail_sums)
    # spread over Levin starting offsets as the acceleration uncertainty
    alts = [accelerate(tail_sums[k:]).limit for k in (4, 8, 12)]
    spread = max(abs(x - acc.limit) for x in alts)
    value = pref * acc.limit
    err = abs(pref) * (acc.error_estimate + spread + neumaier_sum(errs))
    if not acc.converged:
        raise PressureError("oscillatory frequency-cell acceleration failed "
                            f"to stabilize (spread {spread:.2e})")
    return value, err


def pressure_propagating_residual(a, T, pol, cfg: SummationConfig | None = None,
                                  params: PhysicalParams | None = None):
    """P_prop = P_matsubara - P_evanescent with propagated errors."""
    cfg = cfg or SummationConfig()
    pm, em = pressure_matsubara(a, T, pol, cfg, params)
    ev = pressure_evanescent(a, T, pol, cfg, params)
    return pm - ev.total, em + ev.err_total


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def compute_breakdown(a, T, cfg: SummationConfig | None = None,
                      params: PhysicalParams | None = None,
                      with_real_freq: bool = True) -> PressureBreakdown:
    """Full PressureBreakdown at one separation."""
    cfg = cfg or SummationConfig()
    row = PressureBreakdown(a_m=a, T_K=T)
    row.P_IM = ideal_metal_classical(a, T)
    row.P_TM, row.err_P_TM = pressure_matsubara(a, T, "TM", cfg, params)
    row.P_TE, row.err_P_TE = pressure_matsubara(a, T, "TE", cfg, params)
    if with_real_freq:
        ev = pressure_evanescent(a, T, "TM", cfg, params)
        row.P_TM_evan = ev.total
        row.P_TM_evan_plasmonic = ev.plasmonic
        row.P_TM_evan_deep = ev.deep
        row.err_P_TM_evan = ev.err_total
        row.P_TM_prop = row.P_TM - ev.total
        row.err_P_TM_prop = row.err_P_TM + ev.err_total
    return row.finalize()


def sweep(a_grid, T, cfg: SummationConfig | None = None,
          params: PhysicalParams | None = None,
          with_real_freq: bool = True) -> list[PressureBreakdown]:
    """One PressureBreakdown per separation; failures are recorded per row."""
    a_grid = list(a_grid)
    if any(a <= 0 for a in a_grid):
        raise ValueError("separations must be positive")
    if sorted(a_grid) != a_grid:
        raise ValueError("separation grid must be sorted ascending")
    rows = []
    for a in a_grid:
        try:
            rows.append(compute_breakdown(a, T, cfg, params, with_real_freq))
        except Exception as exc:  # per-row failure, sweep continues
            row = PressureBreakdown(a_m=a, T_K=T, status=f"failed: {exc}")
            try:
                row.P_IM = ideal_metal_classical(a, T)
            except Exception:
                pass
            rows.append(row)
    return rows


def default_sweep_grid(n: int = 25, lo: float = 200e-9, hi: float = 4e-6):
    """Log-spaced default separation grid, 200 nm to 4 um."""
    return list(np.geomspace(lo, hi, n))
