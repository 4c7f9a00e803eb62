"""Physical constants (CODATA 2018 exact/recommended values).

Only the digits actually used by the model are kept; hbar and k_B are the
exact SI defining values, c is exact by definition of the metre.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Constants:
    hbar: float = 1.054571817e-34   # J s   (h/2pi, h exact)
    kB: float = 1.380649e-23        # J/K   (exact)
    c_light: float = 2.99792458e8   # m/s   (exact)


CODATA = Constants()

# atomic mass unit, CODATA 2018 recommended
ATOMIC_MASS_KG = 1.66053906892e-27
