"""Kicked one-dimensional Bose gas in its two exactly solvable limits.

The non-interacting gas evolves as a single orbital; the hard-core
(Tonks-Girardeau) gas evolves as N free-fermion orbitals whose bosonic
density matrix is reconstructed exactly through string-operator
determinants.  See the demos/ directory for narrative walkthroughs.
"""

from ._version import VERSION as __version__
from .config import ExperimentConfig, load_config, preset_names
from .errors import (ConfigError, ConvergenceError, InvariantError,
                     KickedGasError)
from .floquet import (KickSchedule, Propagator, evolve, iterate_evolution,
                      step_delta, step_random, step_square)
from .grid import Grid, Orbital, boundary_occupancy, make_grid, to_momentum, to_position
from .harness import (RunManifest, load_series, localized_window_mean,
                      run_experiment, sweep)
from .observables import (CorrFunction, FitResult, MomentumDist, average_dists,
                          contact_plateau, fit_decay, g1_from_momentum,
                          g1_from_obdm, gaussian_blur, info_entropy, jsd,
                          kinetic_energy, kinetic_energy_orbitals,
                          momentum_dist_obdm, momentum_dist_set,
                          momentum_dist_single)
from .oracle import bessel_one_kick, brute_obdm_n2
from .spham import (EigenSet, TrapSpec, lowest_eigenstates, potential_on_grid)
from .tonks import (OBDM, SlaterState, green_function, load_obdm_binary,
                    obdm_from_green, obdm_from_orbitals, von_neumann_entropy)
from .units import (PhysicalParams, ScaledParams, cesium_preset, derive_scaled,
                    energy_to_recoils)
