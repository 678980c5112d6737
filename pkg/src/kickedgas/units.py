"""Laboratory parameters and their reduction to dimensionless kick constants.

Everything downstream works in scaled variables: position zeta = 2*k_L*z,
time tau = t/T, momentum p = 2*k_L*T*P/m.  In these variables the drive is
characterized by two numbers, the effective Planck constant

    hbar_eff = 8*T*E_r/hbar,        E_r = pi^2*hbar^2/(2*m*a^2),

and the kick strength K = hbar_eff*kappa with kappa = V_z*T_p/(2*hbar).
Momentum reported in units of k_L equals twice the wavenumber conjugate to
zeta, and a plane wave at q*k_L carries q^2 recoil energies.
"""

from dataclasses import dataclass

from .errors import ConfigError

HBAR = 1.054571817e-34  # J s

# Cs-133, 1064 nm lattice (lattice spacing = lambda/2)
CS_MASS = 2.2069469e-25  # kg
CS_LATTICE_CONSTANT = 532.25e-9  # m


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory inputs. Energies (kick and trap depths) are in recoil units."""

    lattice_constant: float  # m
    particle_mass: float     # kg
    kick_period: float       # s
    pulse_width: float       # s
    kick_depth: float        # V_z in E_r
    trap_depth: float = 45.7      # V1 in E_r
    antitrap_depth: float = 9.3   # V2 in E_r
    trap_waist: float = 300e-6    # m
    antitrap_waist: float = 135e-6  # m

    def __post_init__(self):
        positive = {
            "lattice_constant": self.lattice_constant,
            "particle_mass": self.particle_mass,
            "kick_period": self.kick_period,
            "pulse_width": self.pulse_width,
            "trap_waist": self.trap_waist,
            "antitrap_waist": self.antitrap_waist,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.kick_depth < 0:
            raise ConfigError(f"kick_depth must be >= 0, got {self.kick_depth}")
        if self.pulse_width >= self.kick_period:
            raise ConfigError(
                f"pulse_width ({self.pulse_width}) must be smaller than "
                f"kick_period ({self.kick_period})"
            )

    @property
    def recoil_energy(self) -> float:
        """E_r in joules."""
        import math
        return (math.pi * HBAR / self.lattice_constant) ** 2 / (2 * self.particle_mass)


@dataclass(frozen=True)
class ScaledParams:
    """Dimensionless constants of the scaled Floquet problem."""

    hbar_eff: float
    kappa: float
    K: float
    pulse_fraction: float
    recoil_rate: float  # E_r/hbar in 1/s, kept for unit bridges

    def __post_init__(self):
        if not self.hbar_eff > 0:
            raise ConfigError(f"hbar_eff must be positive, got {self.hbar_eff}")
        if not 0 < self.pulse_fraction < 1:
            raise ConfigError(
                f"pulse_fraction must lie in (0, 1), got {self.pulse_fraction}"
            )


def cesium_preset(kick_period: float = 60e-6, pulse_width: float = 10e-6,
                  kick_depth: float = 20.0) -> PhysicalParams:
    """Named preset "cesium-1064": Cs-133 in a 1064 nm lattice."""
    return PhysicalParams(
        lattice_constant=CS_LATTICE_CONSTANT,
        particle_mass=CS_MASS,
        kick_period=kick_period,
        pulse_width=pulse_width,
        kick_depth=kick_depth,
    )


def derive_scaled(params: PhysicalParams) -> ScaledParams:
    """Reduce laboratory parameters to the dimensionless kick constants.

    hbar_eff = 8*T*E_r/hbar, kappa = V_z*T_p/(2*hbar) with V_z in joules,
    K = hbar_eff*kappa.  The relation K = hbar_eff*kappa holds exactly by
    construction.
    """
    er_rate = params.recoil_energy / HBAR  # E_r/hbar, 1/s
    hbar_eff = 8.0 * params.kick_period * er_rate
    kappa = params.kick_depth * er_rate * params.pulse_width / 2.0
    return ScaledParams(
        hbar_eff=hbar_eff,
        kappa=kappa,
        K=hbar_eff * kappa,
        pulse_fraction=params.pulse_width / params.kick_period,
        recoil_rate=er_rate,
    )


def energy_to_recoils(scaled: ScaledParams, p2_mean: float) -> float:
    """Convert a scaled kinetic energy <p^2>/2 to recoil energies.

    p = hbar_eff corresponds to P = 2*hbar*k_L, so P/(hbar*k_L) = 2*p/hbar_eff
    and the kinetic energy is <(P/hbar*k_L)^2> E_r = (2/hbar_eff)^2 * 2 *
    (<p^2>/2) * E_r.
    """
    if p2_mean < 0:
        raise ConfigError(f"p2_mean must be >= 0, got {p2_mean}")
    return (2.0 / scaled.hbar_eff) ** 2 * 2.0 * p2_mean


def scaled_potential_prefactor(scaled: ScaledParams) -> float:
    """Scaled energy per recoil: one E_r equals hbar_eff^2/8 scaled units."""
    return scaled.hbar_eff ** 2 / 8.0
