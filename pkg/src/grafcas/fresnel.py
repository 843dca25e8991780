"""2D Fresnel reflection coefficients on a graphene sheet.

TM and TE amplitude coefficients in permittivity form on the real and
imaginary frequency axes, and the equivalent conductivity-form
expressions.  The normal wavenumber uses the decaying evanescent
convention: k0z = sqrt(omega^2/c^2 - q^2) for q <= omega/c and
k0z = i sqrt(q^2 - omega^2/c^2) beyond, so the gap exponentials of the
real-frequency pressure integrands are oscillatory inside the light
cone and real decaying outside it.

The TM coefficient is driven by the longitudinal permittivity and the
TE one by the transverse permittivity on both axes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import PhysicalParams
from .response import MatsubaraPoint, PermittivityPair, ResponseError, SpectralPoint

_REAL_TOL = 1e-8


@dataclass
class ReflectionPair:
    """r_TM and r_TE at one spectral point.

    On the imaginary axis both coefficients are real with
    r_TM in [0, 1) and r_TE in (-1, 0] for the graphene response.
    """

    r_TM: complex
    r_TE: complex
    axis: str = "real"  # "real" | "imaginary"


def k0z(q, omega, params: PhysicalParams):
    """Normal wavenumber with the decaying evanescent branch."""
    q = np.asarray(q, dtype=float)
    rad = (omega / params.c) ** 2 - q * q
    out = np.where(rad >= 0.0,
                   np.sqrt(np.maximum(rad, 0.0)) + 0.0j,
                   1j * np.sqrt(np.maximum(-rad, 0.0)))
    return out


def r_te_real_vec(q, omega, eps_tr_minus_1, params: PhysicalParams):
    """TE coefficient -w^2(eps_Tr-1) / (i c^2 q k0z + w^2(eps_Tr-1))."""
    q = np.asarray(q, dtype=float)
    w2e = omega * omega * np.asarray(eps_tr_minus_1)
    den = 1j * params.c ** 2 * q * k0z(q, omega, params) + w2e
    out = np.where(den == 0.0, 0.0, -w2e / np.where(den == 0.0, 1.0, den))
    # q = 0 limit of the closed form: -1 for eps_Tr != 1, else 0
    qzero = q == 0.0
    if np.any(qzero):
        out = np.where(qzero & (w2e != 0.0), -1.0 + 0.0j, out)
        out = np.where(qzero & (w2e == 0.0), 0.0 + 0.0j, out)
    return out


def r_tm_real_vec(q, omega, eps_l_minus_1, params: PhysicalParams):
    """TM coefficient (eps_L-1) k0z / (i q + (eps_L-1) k0z)."""
    q = np.asarray(q, dtype=float)
    e1 = np.asarray(eps_l_minus_1)
    kz = k0z(q, omega, params)
    num = e1 * kz
    den = 1j * q + num
    out = np.where(den == 0.0, 0.0, num / np.where(den == 0.0, 1.0, den))
    qzero = q == 0.0
    if np.any(qzero):
        out = np.where(qzero & (e1 != 0.0), 1.0 + 0.0j, out)
        out = np.where(qzero & (e1 == 0.0), 0.0 + 0.0j, out)
    return out


def r_te_real(p: SpectralPoint, e: PermittivityPair, params: PhysicalParams) -> complex:
    """Spec operation: scalar TE coefficient on the real axis."""
    return complex(r_te_real_vec(np.array([p.q]), p.omega,
                                 np.array([e.eps_Tr - 1.0]), params)[0])


def r_tm_real(p: SpectralPoint, e: PermittivityPair, params: PhysicalParams) -> complex:
    """Spec operation: scalar TM coefficient on the real axis."""
    return complex(r_tm_real_vec(np.array([p.q]), p.omega,
                                 np.array([e.eps_L - 1.0]), params)[0])


def r_pair_imag_vec(q, xi, eps_l_minus_1, reg_tr, params: PhysicalParams):
    """Imaginary-axis pair from real inputs.

    ``reg_tr`` is xi^2 (eps_Tr - 1) in (rad/s)^2, which stays finite at
    the zeroth Matsubara frequency; kappa = sqrt(q^2 + xi^2/c^2).
    """
    q = np.asarray(q, dtype=float)
    e1 = np.asarray(eps_l_minus_1, dtype=float)
    R = np.asarray(reg_tr, dtype=float)
    kap = np.hypot(q, xi / params.c)
    num = e1 * kap
    r_tm = num / (q + num)
    den_te = params.c ** 2 * q * kap + R
    r_te = np.where(den_te == 0.0, 0.0, -R / np.where(den_te == 0.0, 1.0, den_te))
    return r_tm, r_te


def r_pair_imag(p: MatsubaraPoint, e: PermittivityPair,
                params: PhysicalParams) -> ReflectionPair:
    """Spec operation: real-valued (r_TM, r_TE) at a Matsubara point.

    Requires a permittivity pair from the imaginary axis with the
    regularized transverse field populated; inputs with imaginary parts
    beyond tolerance are rejected.
    """
    for name, v in (("eps_L", e.eps_L), ("regularized_Tr", e.regularized_Tr)):
        if abs(complex(v).imag) > _REAL_TOL * max(abs(complex(v)), 1.0):
            raise ResponseError(f"{name} must be real on the imaginary axis")
    r_tm, r_te = r_pair_imag_vec(np.array([p.q]), p.xi_l,
                                 np.array([complex(e.eps_L).real - 1.0]),
                                 np.array([complex(e.regularized_Tr).real]),
                                 params)
    return ReflectionPair(r_TM=float(r_tm[0]), r_TE=float(r_te[0]),
                          axis="imaginary")


def r_from_conductivity(p: SpectralPoint, sigma_L: complex, sigma_Tr: complex,
                        params: PhysicalParams) -> ReflectionPair:
    """Conductivity-form coefficients (sigmas in Gaussian cm/s).

    r_TM = 2 pi sigma_L cos(theta0)/c / (1 + 2 pi sigma_L cos(theta0)/c),
    r_TE = -2 pi omega sigma_Tr / (c^2 k0z + 2 pi omega sigma_Tr),
    with cos(theta0) = c k0z / omega.
    """
    if p.omega == 0.0:
        raise ResponseError("conductivity form undefined at omega = 0")
    c = params.c
    sL = complex(sigma_L) * 0.01   # cm/s -> m/s
    sT = complex(sigma_Tr) * 0.01
    kz = complex(k0z(np.array([p.q]), p.omega, params)[0])
    cos0 = c * kz / p.omega
    num_tm = 2.0 * math.pi * sL * cos0
    r_tm = num_tm / (c + num_tm)
    num_te = 2.0 * math.pi * p.omega * sT
    den_te = c * c * kz + num_te
    r_te = 0.0 if den_te == 0.0 else -num_te / den_te
    return ReflectionPair(r_TM=r_tm, r_TE=r_te, axis="real")
