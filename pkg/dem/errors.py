"""
Error types shared by the simulator packages
"""


class RecoatError(Exception):
    """Base class for all simulator errors"""


class InvalidParameterError(RecoatError, ValueError):
    """A physical or numerical parameter is out of range"""


class OutOfDomainError(RecoatError):
    """A particle center left the simulation box"""

    def __init__(self, particle_id, position):
        self.particle_id = int(particle_id)
        self.position = tuple(float(c) for c in position)
        super().__init__(
            f"particle {self.particle_id} outside domain at "
            f"({self.position[0]:.6e}, {self.position[1]:.6e}, {self.position[2]:.6e})"
        )


class TimestepGuardError(RecoatError):
    """Requested step exceeds the critical explicit step"""

    def __init__(self, dt, dt_crit):
        self.dt = dt
        self.dt_crit = dt_crit
        super().__init__(
            f"time step {dt:.6e} s exceeds critical step {dt_crit:.6e} s "
            f"(set run.allow_unstable_timestep = true to override)"
        )


class CapacityError(RecoatError):
    """Seeding region cannot hold the requested particle count"""

    def __init__(self, requested, max_count):
        self.requested = requested
        self.max_count = max_count
        super().__init__(
            f"region holds at most {max_count} particles, {requested} requested"
        )


class ConfigError(RecoatError):
    """Configuration could not be loaded or resolved"""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class SnapshotIOError(RecoatError):
    """Snapshot or field file could not be written or read"""

    def __init__(self, path, message):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")
