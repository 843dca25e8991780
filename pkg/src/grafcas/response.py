"""Nonlocal dielectric response of a pristine graphene sheet.

Longitudinal and transverse 2D permittivities of the Dirac model,
evaluated on the real frequency axis (propagating, plasmonic and deep
evanescent regions) and at the imaginary Matsubara frequencies, plus the
conversions between permittivity, polarization-tensor components and 2D
conductivity.

All kernels are evaluated in dimensionless variables; physical units
enter only at the module boundary.  The thermal integrands contain
square roots of quantities that change sign: the retarded prescription
places the lambda=+1 kernel argument just above, and the lambda=-1
argument just below, the branch cut of the analytic sqrt(z^2 - a^2)
(cut on [-a, a], ~z at infinity).  Inside the cut this gives a uniform
-i branch for the lambda=-1 terms, which reproduces the Pauli-blocked
absorption Im eps >= 0 and connects the sub- and super-threshold
regions as one analytic function.

Vectorized fast paths (`*_vec`) evaluate arrays of wave numbers at a
fixed frequency on singularity-adapted fixed meshes; the scalar
operations wrap them and carry per-point error estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .constants import C, HBAR, KB, PhysicalParams
from .quadrature import panel_nodes, panel_reduce


class ResponseError(ValueError):
    """Raised on invalid spectral inputs or failed evaluations."""


class KernelPoleError(ResponseError):
    """Kernel evaluated exactly at its inverse-square-root pole."""


class SpectralRegion(Enum):
    PROPAGATING = "propagating"
    PLASMONIC = "plasmonic"
    DEEP_EVANESCENT = "deep_evanescent"


@dataclass(frozen=True)
class SpectralPoint:
    """Real-axis point (q, omega), q in 1/m >= 0, omega in rad/s > 0."""

    q: float
    omega: float

    def __post_init__(self):
        if self.q < 0.0:
            raise ResponseError("q must be non-negative")
        if not self.omega > 0.0:
            raise ResponseError("omega must be positive on the real axis")


@dataclass(frozen=True)
class MatsubaraPoint:
    """Imaginary-axis point (q, l) with xi_l = 2 pi kB T_point l / hbar.

    ``xi_l`` may be supplied directly (decoupled from any temperature)
    or derived from ``l`` and a params object via :meth:`for_params`.
    """

    q: float
    l: int
    xi_l: float

    def __post_init__(self):
        if self.q < 0.0:
            raise ResponseError("q must be non-negative")
        if self.l < 0:
            raise ResponseError("Matsubara index must be non-negative")
        if self.xi_l < 0.0:
            raise ResponseError("xi_l must be non-negative")
        if self.l == 0 and self.xi_l != 0.0:
            raise ResponseError("l = 0 requires xi_l = 0")

    @classmethod
    def for_params(cls, q: float, l: int, params: PhysicalParams) -> "MatsubaraPoint":
        return cls(q=q, l=l, xi_l=params.matsubara_frequency(l))


@dataclass
class PermittivityPair:
    """eps_L and eps_Tr at one spectral point.

    ``regularized_Tr`` stores omega^2 (eps_Tr - 1) (xi^2 (eps_Tr - 1) on
    the imaginary axis) in (rad/s)^2; it stays finite at xi = 0 where
    eps_Tr itself diverges.  Zero-temperature and thermal parts of both
    components are kept separately.
    """

    eps_L: complex
    eps_Tr: complex
    regularized_Tr: complex
    axis: str = "real"  # "real" | "imaginary"
    eps_L_zero_T: complex = 0.0
    eps_L_thermal: complex = 0.0
    eps_Tr_zero_T: complex = 0.0
    eps_Tr_thermal: complex = 0.0
    err_estimate: float = 0.0


@dataclass
class PolarizationComponents:
    """Polarization-tensor 00-component and the transverse combination.

    Units follow the permittivity relations in SI; Pi_00 equals
    2 hbar q (eps_L - 1)/c^2 and Pi_combo equals the quantity whose
    -c^2/(2 hbar q omega^2) multiple is eps_Tr - 1.
    """

    Pi_00: complex
    Pi_combo: complex

    def trace(self, p: SpectralPoint, params: PhysicalParams) -> complex:
        """Recover Pi_mu^mu; defined only for q > 0 and omega^2 != c^2 q^2."""
        c = params.c
        if p.q <= 0.0:
            raise ResponseError("trace recovery requires q > 0")
        k2 = (p.omega / c) ** 2 - p.q ** 2
        if k2 == 0.0:
            raise ResponseError("trace recovery undefined on the light cone")
        return (self.Pi_combo - k2 * self.Pi_00) / p.q ** 2


@dataclass(frozen=True)
class ThermalKernelParams:
    """Derived kernel scales at one spectral point (documentation record)."""

    u_minus: float     # (omega - vF q)/(2c), 1/m
    beta: float        # hbar c/(kB T), m
    D: float           # hbar sqrt(vF^2 q^2 - omega^2)/(2 kB T), real axis
    D_l: float         # hbar sqrt(vF^2 q^2 + xi^2)/(2 kB T), imag axis

    @classmethod
    def at(cls, q: float, omega_or_xi: float, T: float,
           params: PhysicalParams, axis: str = "real") -> "ThermalKernelParams":
        if T <= 0.0:
            raise ResponseError("thermal kernel scales require T > 0")
        vF = params.vF
        c = params.c
        u_minus = (omega_or_xi - vF * q) / (2.0 * c) if axis == "real" else 0.0
        beta = params.hbar * c / (params.kB * T)
        rad = (vF * q) ** 2 - omega_or_xi ** 2
        D = params.hbar * math.sqrt(rad) / (2.0 * params.kB * T) if rad > 0 else 0.0
        D_l = params.hbar * math.hypot(vF * q, omega_or_xi) / (2.0 * params.kB * T)
        return cls(u_minus=u_minus, beta=beta, D=D, D_l=D_l)


# ---------------------------------------------------------------------------
# region classification and bare kernels
# ---------------------------------------------------------------------------

def classify_region(p: SpectralPoint, params: PhysicalParams) -> SpectralRegion:
    """Propagating (q <= w/c), plasmonic (w/c < q <= w/vF) or deep region."""
    if p.q <= p.omega / params.c:
        return SpectralRegion.PROPAGATING
    if p.q <= p.omega / params.vF:
        return SpectralRegion.PLASMONIC
    return SpectralRegion.DEEP_EVANESCENT


def eval_F(x, q, params: PhysicalParams):
    """sqrt(x^2 - vF^2 q^2); principal-branch continuation below threshold.

    Exactly zero at |x| = vF q.
    """
    x = np.asarray(x, dtype=float)
    rad = x * x - (params.vF * q) ** 2
    if np.iscomplexobj(rad) or np.any(rad < 0):
        return np.sqrt(rad.astype(complex))
    return np.sqrt(rad)


def eval_B(x, q, params: PhysicalParams):
    """x^2 / sqrt(x^2 - vF^2 q^2); pole at |x| = vF q is signalled."""
    x = np.asarray(x, dtype=float)
    vq = params.vF * q
    if np.any(np.abs(np.abs(x) - vq) == 0.0):
        raise KernelPoleError("B(x) evaluated at its pole |x| = vF q")
    rad = x * x - vq * vq
    if np.any(rad < 0):
        return x * x / np.sqrt(rad.astype(complex))
    return x * x / np.sqrt(rad)


def _fermi(x):
    out = np.zeros_like(x, dtype=float)
    m = x < 700.0
    out[m] = 1.0 / (np.exp(x[m]) + 1.0)
    return out


# ---------------------------------------------------------------------------
# mesh helpers (vectorized over the element axis)
# ---------------------------------------------------------------------------

_KNEE = 50.0  # Fermi factor cut: exp(-50) ~ 2e-22


def _frac_geo(n: int, rho: float) -> np.ndarray:
    k = np.arange(n + 1)
    return (rho ** k - 1.0) / (rho ** n - 1.0)


def _frac_log(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 1)


def _edges_linear(lo, hi, frac):
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    return lo + np.maximum(hi - lo, 0.0) * frac


def _edges_log(lo, hi, frac):
    """Log-spaced edges; requires lo > 0 elementwise (callers guarantee)."""
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    ratio = np.maximum(hi / lo, 1.0)
    return lo * ratio ** frac


class _PanelSet:
    """Accumulates (x, weight, gauss-weight) node blocks along a panel axis."""

    def __init__(self):
        self.blocks = []

    def add_direct(self, edges):
        x, wk, wg = panel_nodes(edges)
        self.blocks.append((x, wk, wg))

    def add_sq_lo(self, x0, s_edges):
        """x = x0 + s^2 mapping; jacobian 2s folded into the weights."""
        s, wk, wg = panel_nodes(s_edges)
        x = np.asarray(x0, dtype=float)[..., None, None] + s * s
        self.blocks.append((x, wk * 2.0 * s, wg * 2.0 * s))

    def add_sq_hi(self, x1, s_edges):
        """x = x1 - s^2 mapping."""
        s, wk, wg = panel_nodes(s_edges)
        x = np.asarray(x1, dtype=float)[..., None, None] - s * s
        self.blocks.append((x, wk * 2.0 * s, wg * 2.0 * s))

    def concat(self):
        xs = np.concatenate([b[0] for b in self.blocks], axis=-2)
        wk = np.concatenate([b[1] for b in self.blocks], axis=-2)
        wg = np.concatenate([b[2] for b in self.blocks], axis=-2)
        return xs, wk, wg


def _integrate_panels(values, wk, wg):
    """Sum Kronrod panel results and the |K-G| error, per element."""
    k, e = panel_reduce(values, wk, wg)
    return k.sum(axis=-1), e.sum(axis=-1)


# ---------------------------------------------------------------------------
# imaginary axis
# ---------------------------------------------------------------------------

def _imag_mesh(m, invPt, knee):
    """w-mesh clustered at the near-branch-point w = m (width ~ 1/Pt)."""
    ps = _PanelSet()
    zeros = np.zeros_like(m)
    mcap = np.minimum(m, knee)
    a1 = 0.70 * mcap
    head = np.maximum(a1 / 2000.0, 1e-300)
    ps.add_direct(_edges_linear(zeros, head, _frac_geo(1, 2.0)))
    ps.add_direct(_edges_log(head, np.maximum(a1, head * (1 + 1e-12)), _frac_log(7)))
    # two-sided geometric cluster around the feature at w = m
    right_cluster = 1.0 - _frac_geo(8, 2.0)[::-1]
    ps.add_direct(a1[..., None] + (mcap - a1)[..., None] * right_cluster)
    b1 = np.minimum(np.maximum(m + 3.0 * invPt, m * 1.02), knee)
    b1 = np.maximum(b1, mcap * (1.0 + 1e-15))
    ps.add_direct(mcap[..., None] + (b1 - mcap)[..., None] * _frac_geo(8, 2.0))
    # beyond the feature out to the Fermi cut
    lo2 = np.maximum(b1, 1e-300)
    hi2 = np.maximum(knee, lo2 * (1 + 1e-12))
    ps.add_direct(_edges_log(lo2, hi2, _frac_log(14)))
    return ps.concat()


def eps_imag_axis_vec(q, xi, T, params: PhysicalParams):
    """Permittivities at (q array, i*xi) for xi > 0, T > 0.

    Returns (eps_L - 1, eps_Tr - 1, err) as real arrays; the conjugate
    lambda = +-1 pair is combined analytically before integration so the
    result is real by construction.
    """
    q = np.asarray(q, dtype=float)
    if xi <= 0.0:
        raise ResponseError("xi must be positive; use the l = 0 forms at xi = 0")
    if T <= 0.0:
        raise ResponseError("Matsubara evaluation requires T > 0")
    vt = params.vF_over_c
    alpha = params.alpha
    qh = params.c * q / xi
    if np.any(qh <= 0.0):
        raise ResponseError("q must be positive on the imaginary axis")
    Pt = np.hypot(1.0, vt * qh)
    Dl = params.hbar * xi * Pt / (2.0 * params.kB * T)
    m = vt * qh / Pt
    invPt = 1.0 / Pt
    knee = _KNEE / Dl

    x, wk, wg = _imag_mesh(m, invPt, knee)
    w = x
    PtE = Pt[..., None, None]
    z = 1.0 - w * w - 2.0j * w / PtE
    sz = np.sqrt(z)
    one_m = (w * w + 2.0j * w / PtE) / (1.0 + sz)
    bL = one_m.real
    vq2 = (vt * qh)[..., None, None] ** 2
    bT = PtE ** 2 * bL - vq2 * (1.0 - (1.0 / sz).real)
    f = _fermi(Dl[..., None, None] * w)

    IL, eL = _integrate_panels(f * bL, wk, wg)
    IT, eT = _integrate_panels(f * bT, wk, wg)
    pref = 4.0 * alpha * Pt / (vt * vt * qh)
    epsL1 = math.pi * alpha * qh / (2.0 * Pt) + pref * IL
    epsT1 = math.pi * alpha * qh * Pt / 2.0 - pref * IT
    err = pref * (eL + eT)
    return epsL1, epsT1, err


def eps_l0_vec(q, T, params: PhysicalParams):
    """eps_L(q, 0) - 1 at the zeroth Matsubara frequency (real, > 0)."""
    q = np.asarray(q, dtype=float)
    if T <= 0.0:
        raise ResponseError("Matsubara evaluation requires T > 0")
    vt = params.vF_over_c
    alpha = params.alpha
    D0 = params.hbar * params.vF * q / (2.0 * params.kB * T)
    # J1 = int_0^1 (1 - sqrt(1-w^2)) fermi(D0 w) dw, via w = sin(theta):
    # (1 - sqrt(1-w^2)) dw = (1 - cos th) cos th dth
    th, wk, wg = panel_nodes(_edges_linear(np.zeros(q.shape), np.full(q.shape, math.pi / 2.0), _frac_geo(8, 1.4)))
    s = np.sin(th)
    f = _fermi(D0[..., None, None] * s)
    vals = (1.0 - np.cos(th)) * np.cos(th)
    J1, e1 = _integrate_panels(f * vals, wk, wg)
    D0s = np.where(D0 > 700.0, 700.0, D0)
    J2 = np.log1p(np.exp(-D0s)) / D0
    return math.pi * alpha / (2.0 * vt) + (4.0 * alpha / vt) * (J1 + J2), (4.0 * alpha / vt) * e1


def regularized_tr_l0_vec(q, T, params: PhysicalParams):
    """R(q) = lim_{xi->0} xi^2 (eps_Tr - 1), (rad/s)^2, >= 0.

    Algebraically cancelled form: R = alpha c vF q^2 (pi/2 - 4 J),
    J = int_0^{pi/2} sin^2(th) fermi(D0 sin th) dth.
    """
    q = np.asarray(q, dtype=float)
    if T <= 0.0:
        raise ResponseError("Matsubara evaluation requires T > 0")
    alpha = params.alpha
    D0 = params.hbar * params.vF * q / (2.0 * params.kB * T)
    th, wk, wg = panel_nodes(_edges_linear(np.zeros(q.shape), np.full(q.shape, math.pi / 2.0), _frac_geo(8, 1.4)))
    s = np.sin(th)
    f = _fermi(D0[..., None, None] * s)
    J, e = _integrate_panels(f * s * s, wk, wg)
    scale = alpha * params.c * params.vF * q * q
    return scale * (math.pi / 2.0 - 4.0 * J), scale * 4.0 * e


def eps_imag_axis(p: MatsubaraPoint, T: float, params: PhysicalParams) -> PermittivityPair:
    """Spec operation: permittivities at a Matsubara point; real outputs.

    For l = 0 the transverse channel is returned through
    ``regularized_Tr`` (finite) while eps_Tr itself is infinite.
    """
    if T <= 0.0:
        raise ResponseError("Matsubara grid undefined at T = 0")
    if p.l == 0 or p.xi_l == 0.0:
        if p.q <= 0.0:
            raise ResponseError("l = 0 forms require q > 0")
        qa = np.array([p.q])
        eL1, e1 = eps_l0_vec(qa, T, params)
        R, e2 = regularized_tr_l0_vec(qa, T, params)
        vt = params.vF_over_c
        t0_L = math.pi * params.alpha / (2.0 * vt)
        t0_R = math.pi / 2.0 * params.alpha * params.c * params.vF * p.q ** 2
        return PermittivityPair(
            eps_L=complex(1.0 + eL1[0]),
            eps_Tr=complex(math.inf),
            regularized_Tr=complex(R[0]),
            axis="imaginary",
            eps_L_zero_T=complex(1.0 + t0_L),
            eps_L_thermal=complex(eL1[0] - t0_L),
            eps_Tr_zero_T=complex(t0_R),
            eps_Tr_thermal=complex(R[0] - t0_R),
            err_estimate=float(e1[0] + e2[0]),
        )
    qa = np.array([p.q])
    eL1, eT1, err = eps_imag_axis_vec(qa, p.xi_l, T, params)
    vt = params.vF_over_c
    qh = params.c * p.q / p.xi_l
    Pt = math.hypot(1.0, vt * qh)
    t0_L = math.pi * params.alpha * qh / (2.0 * Pt)
    t0_T = math.pi * params.alpha * qh * Pt / 2.0
    return PermittivityPair(
        eps_L=complex(1.0 + eL1[0]),
        eps_Tr=complex(1.0 + eT1[0]),
        regularized_Tr=complex(p.xi_l ** 2 * eT1[0]),
        axis="imaginary",
        eps_L_zero_T=complex(1.0 + t0_L),
        eps_L_thermal=complex(eL1[0] - t0_L),
        eps_Tr_zero_T=complex(1.0 + t0_T),
        eps_Tr_thermal=complex(eT1[0] - t0_T),
        err_estimate=float(err[0]),
    )


# ---------------------------------------------------------------------------
# real axis, regions propagating/plasmonic (mu = vF q / omega < 1)
# ---------------------------------------------------------------------------

def _real42_vec(qt, Dh, params: PhysicalParams, fast: bool = False):
    """(eps_L-1, eps_Tr-1, err) for q c/omega arrays with vt*qt < 1.

    Thermal integrals in t = 2 c u / omega; window branch -i (retarded);
    Dh = hbar omega/(2 kB T) (scalar or per-element array), or +inf for
    T = 0.  ``fast`` selects a leaner mesh for inner pressure loops.
    """
    n1, n1b, n2, n3, n4, n5 = (5, 4, 4, 4, 3, 9) if fast else (8, 6, 7, 7, 6, 16)
    qt = np.asarray(qt, dtype=float)
    vt = params.vF_over_c
    alpha = params.alpha
    mu = vt * qt
    E = np.sqrt((1.0 - mu) * (1.0 + mu))
    firstL = 1j * math.pi * alpha * qt / (2.0 * E)
    firstT = 1j * math.pi * alpha * qt * E / 2.0

    if np.all(np.isinf(Dh)):
        z = np.zeros_like(qt, dtype=complex)
        return firstL, firstT, np.zeros_like(qt), (firstL, z.copy(), firstT, z.copy())

    Dh = np.broadcast_to(np.asarray(Dh, dtype=float), qt.shape)
    DhE = Dh[..., None, None]
    tm = 1.0 - mu
    tp = 1.0 + mu
    knee = _KNEE / Dh
    zeros = np.zeros_like(mu)

    def Fp(t):
        return np.sqrt((t + 1.0 - mu[..., None, None]) * (t + 1.0 + mu[..., None, None]))

    muE = mu[..., None, None]
    EE = E[..., None, None]

    segs = []  # (x_nodes, wk, wg, zone)
    ps = _PanelSet()
    # S1a: direct t on [0, min(0.75 tm, knee)]
    a1 = np.minimum(0.75 * tm, knee)
    head = a1 / 3000.0
    ps.add_direct(_edges_linear(zeros, head, _frac_geo(1, 2.0)))
    ps.add_direct(_edges_log(np.maximum(head, 1e-300), np.maximum(a1, head * (1 + 1e-12)), _frac_log(n1)))
    x1, k1, g1 = ps.concat()
    segs.append((x1, k1, g1, "S1"))
    # S1b: t = tm - s^2 toward the endpoint singularity
    s_hi = np.sqrt(np.maximum(tm - a1, 0.0))
    s_lo = np.sqrt(np.maximum(tm - np.minimum(knee, tm), 0.0))
    ps = _PanelSet()
    ps.add_sq_hi(tm, _edges_linear(s_lo, np.maximum(s_hi, s_lo), _frac_geo(n1b, 2.0)))
    x, k, g = ps.concat()
    segs.append((x, k, g, "S1"))
    # S2: t = tm + s^2 on (tm, 1)
    s_hi = np.sqrt(np.maximum(np.minimum(1.0, knee) - tm, 0.0))
    ps = _PanelSet()
    ps.add_sq_lo(tm, _edges_linear(zeros, s_hi, _frac_geo(n2, 2.0)))
    x, k, g = ps.concat()
    segs.append((x, k, g, "W"))
    # S3: t = tp - s^2 on (1, tp)
    s_hi = np.sqrt(mu)
    s_lo = np.sqrt(np.maximum(tp - np.minimum(knee, tp), 0.0))
    ps = _PanelSet()
    ps.add_sq_hi(tp, _edges_linear(s_lo, np.maximum(s_hi, s_lo), _frac_geo(n3, 2.0)))
    x, k, g = ps.concat()
    segs.append((x, k, g, "W"))
    # S4: t = tp + s^2 on (tp, tp + 1)
    s_hi = np.sqrt(np.maximum(np.minimum(knee - tp, 1.0), 0.0))
    ps = _PanelSet()
    ps.add_sq_lo(tp, _edges_linear(zeros, s_hi, _frac_geo(n4, 2.0)))
    x, k, g = ps.concat()
    segs.append((x, k, g, "S45"))
    # S5: log tail (tp + 1, knee)
    lo5 = tp + 1.0
    hi5 = np.maximum(knee, lo5 * (1 + 1e-12))
    ps = _PanelSet()
    ps.add_direct(_edges_log(lo5, hi5, _frac_log(n5)))
    x, k, g = ps.concat()
    segs.append((x, k, g, "S45"))

    IL = np.zeros_like(qt, dtype=complex)
    IT = np.zeros_like(qt, dtype=complex)
    errL = np.zeros_like(qt)
    errT = np.zeros_like(qt)
    mu2 = muE * muE
    for x, wk, wg, zone in segs:
        f = _fermi(DhE * x)
        fp = Fp(x)
        if zone == "S1":
            om_t = 1.0 - x  # 1 - t > mu here
            fm = np.sqrt(np.maximum((om_t - muE) * (om_t + muE), 0.0))
            fm = np.maximum(fm, 1e-300)
            # B = F + mu^2/F; the pure-F parts cancel against the leading 1
            # through the same identities as bL, leaving explicit O(mu^2)
            bL = (mu2 / (2.0 * EE)) * (1.0 / (1.0 + x + fp) + 1.0 / (om_t + fm)
                                       - 2.0 / (1.0 + EE))
            bT = (mu2 / (1.0 + EE)
                  + (EE * mu2 / 2.0) * (1.0 / (1.0 + x + fp) + 1.0 / (om_t + fm))
                  - (EE * mu2 / 2.0) * (1.0 / fp + 1.0 / fm))
            bLc = bL.astype(complex)
            bTc = bT.astype(complex)
        elif zone == "W":
            t1 = x - 1.0
            W = np.sqrt(np.maximum((muE - t1) * (muE + t1), 0.0))
            W = np.maximum(W, 1e-300)
            reL = (-2.0 * mu2 / (1.0 + EE) + ((1.0 - x) * (3.0 + x) + mu2) / (2.0 + fp)) / (2.0 * EE)
            bLc = reL - 1j * W / (2.0 * EE)
            reT = (mu2 / (1.0 + EE) + (EE / 2.0) * ((1.0 - x) * (3.0 + x) + mu2) / (2.0 + fp)
                   - EE * mu2 / (2.0 * fp))
            bTc = reT + 1j * (EE / 2.0) * t1 * t1 / W
        else:  # S45, t > tp
            t1 = x - 1.0
            fm = np.sqrt(np.maximum((t1 - muE) * (t1 + muE), 0.0))
            fm = np.maximum(fm, 1e-300)
            G = fp + fm
            bL = -(mu2 / (EE * G)) * (G / (1.0 + EE) + 1.0 / (fp + x + 1.0) + 1.0 / (fm + t1))
            bT = ((mu2 / G) * (2.0 * x / (1.0 + EE) - 1.0 / (fp + x + 1.0) - 1.0 / (fm + t1))
                  + 2.0 * x * EE * mu2 / (G * fp * fm))
            bLc = bL.astype(complex)
            bTc = bT.astype(complex)
        vL, eL = _integrate_panels(f * bLc, wk, wg)
        vT, eT = _integrate_panels(f * bTc, wk, wg)
        IL += vL
        IT += vT
        errL += eL
        errT += eT

    # analytic Fermi tail with constant asymptotes beyond the knee
    tail = np.log1p(np.exp(-np.minimum(Dh * np.maximum(knee, tp + 1.0), 700.0))) / Dh
    asymL = 1.0 - 1.0 / E
    asymT = 1.0 - E
    IL += asymL * tail
    IT += asymT * tail
    errL += np.abs(asymL) * tail * 0.5
    errT += np.abs(asymT) * tail * 0.5

    pref = 4.0 * alpha / (vt * vt * qt)
    thL = pref * IL
    thT = -pref * IT
    err = pref * (errL + errT)
    return firstL + thL, firstT + thT, err, (firstL, thL, firstT, thT)


# ---------------------------------------------------------------------------
# real axis, deep evanescent region (mu > 1)
# ---------------------------------------------------------------------------

def _real43_vec(qt, Dh, params: PhysicalParams, fast: bool = False):
    """(eps_L-1, eps_Tr-1, err) for vt*qt > 1 (w-form thermal integrals)."""
    m1, m1b, m2, m3a, m3b, m4, m5 = (4, 3, 4, 6, 3, 3, 8) if fast else (7, 6, 7, 10, 6, 6, 14)
    qt = np.asarray(qt, dtype=float)
    vt = params.vF_over_c
    alpha = params.alpha
    mu = vt * qt
    S = np.sqrt((mu - 1.0) * (mu + 1.0))
    firstL = (math.pi * alpha * qt / (2.0 * S)).astype(complex)
    firstT = (-math.pi * alpha * qt * S / 2.0).astype(complex)

    if np.all(np.isinf(Dh)):
        z = np.zeros_like(qt, dtype=complex)
        return firstL, firstT, np.zeros_like(qt), (firstL, z.copy(), firstT, z.copy())

    Dh = np.broadcast_to(np.asarray(Dh, dtype=float), qt.shape)
    D = Dh * S
    knee = _KNEE / D
    wp = np.sqrt((mu - 1.0) / (mu + 1.0))
    wm = 1.0 / wp
    zeros = np.zeros_like(mu)

    SE = S[..., None, None]
    mu2 = (mu * mu)[..., None, None]
    wpE = wp[..., None, None]
    wmE = wm[..., None, None]

    segs = []
    # R1a direct (0, 0.75 wp), R1b sq_hi at wp
    a1 = np.minimum(0.75 * wp, knee)
    head = a1 / 3000.0
    ps = _PanelSet()
    ps.add_direct(_edges_linear(zeros, head, _frac_geo(1, 2.0)))
    ps.add_direct(_edges_log(np.maximum(head, 1e-300), np.maximum(a1, head * (1 + 1e-12)), _frac_log(m1)))
    segs.append(ps.concat() + ("Z1",))
    s_hi = np.sqrt(np.maximum(wp - a1, 0.0))
    s_lo = np.sqrt(np.maximum(wp - np.minimum(knee, wp), 0.0))
    ps = _PanelSet()
    ps.add_sq_hi(wp, _edges_linear(s_lo, np.maximum(s_hi, s_lo), _frac_geo(m1b, 2.0)))
    segs.append(ps.concat() + ("Z1",))
    # R2: w = wp + s^2 up to min(1, knee)
    s_hi = np.sqrt(np.maximum(np.minimum(1.0, knee) - wp, 0.0))
    ps = _PanelSet()
    ps.add_sq_lo(wp, _edges_linear(zeros, s_hi, _frac_geo(m2, 2.0)))
    segs.append(ps.concat() + ("Z2",))
    # R3a: log (1, wm - d3), R3b: sq_hi at wm; d3 = min(wm-1, max(1, wm/4))
    d3 = np.minimum(wm - 1.0, np.maximum(1.0, 0.25 * wm))
    lo3 = np.minimum(np.ones_like(mu), knee)
    hi3 = np.maximum(np.minimum(wm - d3, knee), lo3 * (1 + 1e-12))
    ps = _PanelSet()
    ps.add_direct(_edges_log(np.maximum(lo3, 1e-300), hi3, _frac_log(m3a)))
    segs.append(ps.concat() + ("Z2",))
    s_hi = np.sqrt(np.maximum(wm - np.maximum(wm - d3, 1.0), 0.0))
    s_lo = np.sqrt(np.maximum(wm - np.minimum(knee, wm), 0.0))
    ps = _PanelSet()
    ps.add_sq_hi(wm, _edges_linear(s_lo, np.maximum(s_hi, s_lo), _frac_geo(m3b, 2.0)))
    segs.append(ps.concat() + ("Z2m",))
    # R4: w = wm + s^2
    d4 = np.maximum(1.0, 0.3 * wm)
    s_hi = np.sqrt(np.maximum(np.minimum(knee - wm, d4), 0.0))
    ps = _PanelSet()
    ps.add_sq_lo(wm, _edges_linear(zeros, s_hi, _frac_geo(m4, 2.0)))
    segs.append(ps.concat() + ("Z3",))
    # R5: log tail
    lo5 = wm + d4
    hi5 = np.maximum(knee, lo5 * (1 + 1e-12))
    ps = _PanelSet()
    ps.add_direct(_edges_log(lo5, hi5, _frac_log(m5)))
    segs.append(ps.concat() + ("Z3",))

    IL = np.zeros_like(qt, dtype=complex)
    IT = np.zeros_like(qt, dtype=complex)
    errL = np.zeros_like(qt)
    errT = np.zeros_like(qt)
    for x, wk, wg, zone in segs:
        w = x
        f = _fermi(D[..., None, None] * w)
        if zone == "Z1":
            ap = np.sqrt(np.maximum((wpE - w) * (w + wmE), 0.0))
            am = np.sqrt(np.maximum((wmE - w) * (w + wpE), 0.0))
            ap = np.maximum(ap, 1e-300)
            am = np.maximum(am, 1e-300)
            u_p = w * w + 2.0 * w / SE
            u_m = w * w - 2.0 * w / SE
            bL = 0.5 * (u_p / (1.0 + ap) + u_m / (1.0 + am))
            bT = (-SE * SE * bL
                  - (mu2 / 2.0) * (u_p / (ap * (1.0 + ap)) + u_m / (am * (1.0 + am))))
            bLc = bL.astype(complex)
            bTc = bT.astype(complex)
        elif zone in ("Z2", "Z2m"):
            Gp = np.sqrt(np.maximum((w - wpE) * (w + wmE), 0.0))
            am = np.sqrt(np.maximum((wmE - w) * (w + wpE), 0.0))
            Gp = np.maximum(Gp, 1e-300)
            am = np.maximum(am, 1e-300)
            bLc = 1.0 - am / 2.0 + 1j * Gp / 2.0
            bTc = (1.0 + SE * SE * am / 2.0 - mu2 / (2.0 * am)
                   - 1j * (mu2 / (2.0 * Gp) + SE * SE * Gp / 2.0))
        else:  # Z3
            Gp = np.sqrt(np.maximum((w - wpE) * (w + wmE), 0.0))
            Gm = np.sqrt(np.maximum((w - wmE) * (w + wpE), 0.0))
            Gsum = np.maximum(Gp + Gm, 1e-300)
            GpGm = np.maximum(Gp * Gm, 1e-300)
            bLc = 1.0 + 1j * (2.0 * w / SE) / Gsum
            bTc = 1.0 - 1j * (2.0 * w * SE / Gsum - 2.0 * w * mu2 / (SE * Gsum * GpGm))
        vL, eL = _integrate_panels(f * bLc, wk, wg)
        vT, eT = _integrate_panels(f * bTc, wk, wg)
        IL += vL
        IT += vT
        errL += eL
        errT += eT

    tail = np.log1p(np.exp(-np.minimum(D * np.maximum(knee, wm + d4), 700.0))) / D
    asymL = 1.0 + 1j / S
    asymT = 1.0 - 1j * S
    IL += asymL * tail
    IT += asymT * tail
    errL += np.abs(asymL) * tail * 0.5
    errT += np.abs(asymT) * tail * 0.5

    pref = 4.0 * alpha * S / (vt * vt * qt)
    thL = pref * IL
    thT = -pref * IT
    err = pref * (errL + errT)
    return firstL + thL, firstT + thT, err, (firstL, thL, firstT, thT)


def eps_real_axis_vec(q, omega, T, params: PhysicalParams, fast: bool = False):
    """Permittivities at (q, omega) arrays on the real axis.

    ``omega`` may be a scalar or an array broadcastable against ``q``.
    Region-dispatched; exact boundary points q = omega/vF are nudged one
    part in 1e12 into the plasmonic side (one-sided limit).  T = 0 is
    accepted and returns the zero-temperature parts exactly.
    """
    q = np.asarray(q, dtype=float)
    omega = np.broadcast_to(np.asarray(omega, dtype=float), q.shape).copy()
    if np.any(omega <= 0.0):
        raise ResponseError("omega must be positive")
    if T < 0.0:
        raise ResponseError("temperature must be non-negative")
    qt = params.c * q / omega
    if np.any(qt <= 0.0):
        raise ResponseError("q must be positive for permittivity evaluation")
    vt = params.vF_over_c
    mu = vt * qt
    qt = np.where(mu == 1.0, qt * (1.0 - 1e-12), qt)
    mu = vt * qt
    if T == 0.0:
        Dh = np.full_like(qt, math.inf)
    else:
        Dh = params.hbar * omega / (2.0 * params.kB * T)

    epsL1 = np.zeros_like(qt, dtype=complex)
    epsT1 = np.zeros_like(qt, dtype=complex)
    err = np.zeros_like(qt)
    lo = mu < 1.0
    hi = ~lo
    if np.any(lo):
        a, b, e, _ = _real42_vec(qt[lo], math.inf if T == 0.0 else Dh[lo], params, fast)
        epsL1[lo], epsT1[lo], err[lo] = a, b, e
    if np.any(hi):
        a, b, e, _ = _real43_vec(qt[hi], math.inf if T == 0.0 else Dh[hi], params, fast)
        epsL1[hi], epsT1[hi], err[hi] = a, b, e
    return epsL1, epsT1, err


def eps_real_axis(p: SpectralPoint, T: float, params: PhysicalParams) -> PermittivityPair:
    """Spec operation: full PermittivityPair at a real-axis point."""
    qt = params.c * p.q / p.omega
    if qt <= 0.0:
        raise ResponseError("q must be positive for permittivity evaluation")
    mu = params.vF_over_c * qt
    if mu == 1.0:
        qt *= 1.0 - 1e-12
        mu = params.vF_over_c * qt
    Dh = math.inf if T == 0.0 else params.hbar * p.omega / (2.0 * params.kB * T)
    fn = _real42_vec if mu < 1.0 else _real43_vec
    eL1, eT1, err, parts = fn(np.array([qt]), Dh, params)
    fL, tL, fT, tT = parts
    return PermittivityPair(
        eps_L=complex(1.0 + eL1[0]),
        eps_Tr=complex(1.0 + eT1[0]),
        regularized_Tr=complex(p.omega ** 2 * eT1[0]),
        axis="real",
        eps_L_zero_T=complex(1.0 + fL[0]),
        eps_L_thermal=complex(tL[0]),
        eps_Tr_zero_T=complex(1.0 + fT[0]),
        eps_Tr_thermal=complex(tT[0]),
        err_estimate=float(err[0]),
    )


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------

def eps_to_polarization(e: PermittivityPair, p: SpectralPoint,
                        params: PhysicalParams) -> PolarizationComponents:
    """Pi_00 = 2 hbar q (eps_L - 1)/c^2 and the transverse combination."""
    if p.q <= 0.0:
        raise ResponseError("polarization conversion requires q > 0")
    c2 = params.c ** 2
    Pi00 = 2.0 * params.hbar * p.q * (e.eps_L - 1.0) / c2
    Pi = -2.0 * params.hbar * p.q * p.omega ** 2 * (e.eps_Tr - 1.0) / c2
    return PolarizationComponents(Pi_00=Pi00, Pi_combo=Pi)


def polarization_to_eps(pi: PolarizationComponents, p: SpectralPoint,
                        params: PhysicalParams) -> PermittivityPair:
    """Inverse of :func:`eps_to_polarization` (round trip is identity)."""
    if p.q <= 0.0:
        raise ResponseError("polarization conversion requires q > 0")
    c2 = params.c ** 2
    epsL = 1.0 + c2 * pi.Pi_00 / (2.0 * params.hbar * p.q)
    epsT = 1.0 - c2 * pi.Pi_combo / (2.0 * params.hbar * p.q * p.omega ** 2)
    return PermittivityPair(eps_L=epsL, eps_Tr=epsT,
                            regularized_Tr=p.omega ** 2 * (epsT - 1.0))


def eps_to_conductivity(e: PermittivityPair, p: SpectralPoint) -> tuple[complex, complex]:
    """2D conductivities from permittivities; Gaussian units, cm/s.

    sigma = omega (eps - 1)/(2 pi i q), converted from the SI-length
    evaluation to the Gaussian cm/s convention.
    """
    if p.q <= 0.0:
        raise ResponseError("conductivity conversion requires q > 0")
    if p.omega == 0.0:
        raise ResponseError("conductivity conversion requires omega != 0")
    to_cm = 100.0
    sL = p.omega * (e.eps_L - 1.0) / (2.0j * math.pi * p.q) * to_cm
    sT = p.omega * (e.eps_Tr - 1.0) / (2.0j * math.pi * p.q) * to_cm
    return sL, sT


def conductivity_to_eps(sigma_L: complex, sigma_Tr: complex,
                        p: SpectralPoint) -> PermittivityPair:
    """Inverse map; sigmas in the Gaussian cm/s convention."""
    if p.q <= 0.0:
        raise ResponseError("conductivity conversion requires q > 0")
    if p.omega == 0.0:
        raise ResponseError("conductivity conversion requires omega != 0")
    to_m = 0.01
    epsL = 1.0 + 2.0j * math.pi * sigma_L * to_m * p.q / p.omega
    epsT = 1.0 + 2.0j * math.pi * sigma_Tr * to_m * p.q / p.omega
    return PermittivityPair(eps_L=epsL, eps_Tr=epsT,
                            regularized_Tr=p.omega ** 2 * (epsT - 1.0))
