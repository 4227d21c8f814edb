"""Error types shared across the simulator.

The CLI maps these onto exit codes: ConfigError -> 2, PhysicsError and its
subclasses -> 3, ConvergenceError -> 4. Plain ValueError stays what it is and
signals a programming or validation mistake, not a physical regime.
"""


class PhysicsError(Exception):
    """A computation was asked for outside its physical domain of validity."""


class PopulationInversionError(PhysicsError):
    """p_e >= 1/2: no positive effective temperature exists."""


class NegativeEfficiencyError(PhysicsError):
    """T_q < T_b: the engine cannot run as a heat engine."""


class AboveThresholdError(PhysicsError):
    """Pump at or above maser threshold: no thermal steady state."""


class InfeasibleScheduleError(PhysicsError):
    """Requested injection rate leaves no idle time between atoms."""


class NonUniqueSteadyStateError(PhysicsError):
    """Generator null space is degenerate; the stationary state is not unique."""


class CutoffError(PhysicsError):
    """Fock cutoff too small: population leaks into the last basis state."""


class ModelViolationError(Exception):
    """An internal consistency assertion failed; signals a bug, not physics."""


class ConvergenceError(Exception):
    """An iterative solver exhausted its iteration budget."""


class InsufficientDataError(ValueError):
    """Too few distinct samples for the requested fit degree."""


class UndefinedRSquaredError(ValueError):
    """Zero total variance with nonzero residuals: R^2 has no value."""


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""
