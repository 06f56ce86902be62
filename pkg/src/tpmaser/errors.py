"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator failures."""


class CutoffTooSmall(SimulationError):
    """The Fock-space cutoff cannot faithfully hold the requested state."""


class LeakageExceeded(SimulationError):
    """Truncation leakage in one atom passage exceeded the safety bound."""


class GridOutsideTruncation(SimulationError):
    """Phase-space grid probes coherent amplitudes beyond the truncated basis."""


class UndefinedForVacuum(SimulationError):
    """Observable is undefined for a field with (near-)vacuum mean photon number."""


class ConfigError(SimulationError):
    """Invalid or malformed configuration input."""
