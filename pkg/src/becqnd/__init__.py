"""becqnd: back-action evading measurement of a cavity-trapped condensate's
collective mode -- effective parameters, two-tone drive design, closed-form
noise spectra, stochastic Langevin verification, sweeps and optimization."""

__version__ = "0.1.0"

from .constants import CODATA, Constants
from .drive import (BetaComponents, DriveSpec, MeanFieldResult, alpha_from_eta,
                    beta_fourier, design_drive, integrate_meanfield)
from .errors import (ConfigError, DispersiveRegimeWarning, DivergenceError,
                     InsufficientData, NoMinimumInBracket,
                     NonPositiveOmegaMinus, RegimeWarning, StiffnessError,
                     ZeroGain)
from .langevin import (NoiseConfig, QndCheckReport, SimConfig,
                       TrajectoryEnsemble, estimate_spectrum,
                       floquet_multipliers, qnd_commutator_check,
                       s_q_constant_drive, simulate, verification_report,
                       welch_expectation)
from .params import (DerivedParams, LatticeDepthCheck, PhysicalParams,
                     bogoliubov_frequencies, bogoliubov_matrix, derive_params,
                     validate_lattice_depth)
from .spectra import (SQL, NoiseBudget, SpectralParams, SpectrumSeries,
                      a_response, chi_c, chi_m, default_omega_grid, eta_opt,
                      gain, n_add, n_add0_approx, n_add_min0, n_ba, n_ba0,
                      n_bad, n_bad0_good_cavity, noise_budget, s_p, s_q,
                      s_yout)
from .sweep import (EtaOptimum, SweepAxis, SweepResult, golden_section,
                    nadd_frequency_curves, nadd_min_curves, optimize_eta,
                    sweep_nadd0)
