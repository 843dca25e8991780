"""Physical constants (CODATA 2018) and the experiment's fixed inputs.

All quantities SI.  The fine-structure constant and Fermi-velocity ratio
are dimensionless; the Gaussian-units conventions used by the response
formulas never require an explicit electron charge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

C = 299792458.0                  # speed of light, m/s (exact)
HBAR = 1.054571817e-34           # reduced Planck constant, J*s
KB = 1.380649e-23                # Boltzmann constant, J/K (exact)
ALPHA = 7.2973525693e-3          # fine-structure constant
EV = 1.602176634e-19             # 1 eV in J (exact)
ZETA3 = 1.2020569031595943       # Riemann zeta(3)

DIRAC_MODEL_MAX_ENERGY_EV = 3.0  # validity ceiling of the linear-band model


class DiracValidityWarning(UserWarning):
    """Characteristic energy hbar*c/(2a) exceeds the Dirac-model ceiling."""


@dataclass(frozen=True)
class PhysicalParams:
    """Temperature, separation and material constants for one setup.

    ``vF_over_c`` defaults to the graphene value 1/300; ``alpha`` to the
    CODATA fine-structure constant.  ``separation_m`` may be left at its
    default for pure response-function work where no gap is involved.
    """

    temperature_K: float = 300.0
    separation_m: float = 1e-6
    vF_over_c: float = 1.0 / 300.0
    alpha: float = ALPHA
    c: float = field(default=C, repr=False)
    hbar: float = field(default=HBAR, repr=False)
    kB: float = field(default=KB, repr=False)

    def __post_init__(self):
        if not 0.0 < self.vF_over_c < 1.0:
            raise ValueError("vF_over_c must lie in (0, 1)")
        if self.separation_m <= 0.0:
            raise ValueError("separation_m must be positive")
        if self.temperature_K < 0.0:
            raise ValueError("temperature_K must be non-negative")

    @property
    def vF(self) -> float:
        return self.vF_over_c * self.c

    def characteristic_energy_eV(self) -> float:
        """hbar*c/(2a) in eV, the scale probed by the gap."""
        return self.hbar * self.c / (2.0 * self.separation_m) / EV

    def check_dirac_validity(self) -> bool:
        """Warn (not abort) when the Dirac model is stretched."""
        e = self.characteristic_energy_eV()
        ok = e <= DIRAC_MODEL_MAX_ENERGY_EV
        if not ok:
            warnings.warn(
                f"characteristic energy {e:.3g} eV exceeds "
                f"{DIRAC_MODEL_MAX_ENERGY_EV} eV; Dirac-model results "
                "are extrapolated",
                DiracValidityWarning,
                stacklevel=2,
            )
        return ok

    def matsubara_frequency(self, l: int) -> float:
        """xi_l = 2 pi kB T l / hbar, rad/s."""
        if l < 0:
            raise ValueError("Matsubara index must be non-negative")
        return 2.0 * math.pi * self.kB * self.temperature_K * l / self.hbar
