"""
Material Configuration

Mechanical parameters of the Ti-6Al-4V reference powder and the
interaction-law defaults used by the DEM core.
"""

# Bulk material
PARTICLE_DENSITY = 4430.0          # kg/m^3
GRAVITY = 9.81                     # m/s^2, acts in -z

# Adhesion
GAMMA_0 = 1.0e-4                   # J/m^2, calibrated surface energy
HAMAKER_CONSTANT = 40.0e-20        # J
CUTOFF_FACTOR = 10.0               # g_cut = factor * g0 (force there is 1% of pull-off)

# Contact
FRICTION = 0.4
RESTITUTION = 0.4
ROLLING_FRICTION = 0.1
ROLLING_DEADBAND = 1.0e-4          # rad/s

# Penalty stiffness as a function of gamma / gamma_0
# (upper bound of the gamma ratio, k_N in N/m), checked in order
NORMAL_STIFFNESS_RULE = [
    (1.0, 0.05),
    (float('inf'), 0.2),
]

# Explicit integration
CRITICAL_TIMESTEP_FACTOR = 0.2     # dt_crit = 0.2 * sqrt(m_min / k_N)
TIMESTEP_FACTOR = 0.9              # default dt = 0.9 * dt_crit

# Surface-energy study, gamma / gamma_0
GAMMA_RATIOS = [0, 0.25, 1, 4]

# Parameter-sensitivity study (friction and restitution +50%, stiffness x4)
SENSITIVITY_FACTORS = {
    'friction': 1.5,
    'restitution': 1.5,
    'stiffness': 4.0,
}

# Blade and substrate study, relative to the particle-to-particle values
BLADE_ADHESION_FACTORS = [1, 0]                 # gamma_B / gamma
SUBSTRATE_ADHESION_FACTORS = [2, 1, 0.5, 0.25, 0]  # gamma_W / gamma
SUBSTRATE_FRICTION_FACTORS = [1, 2]             # mu_W / mu
