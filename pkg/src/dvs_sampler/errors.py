"""Exception hierarchy shared by all subsystems."""


class DvsSamplerError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(DvsSamplerError):
    """Shape mismatch, empty input, or malformed (e.g. asymmetric) data."""


class NumericOverflowError(DvsSamplerError):
    """A step produced NaN or Inf; the message names the step index if known."""


class HorizonViolationError(DvsSamplerError):
    """The controller was invoked at or past the time horizon."""


class ConfigError(DvsSamplerError):
    """Invalid configuration value, unknown key, or inconsistent settings."""


class DegenerateProbeError(DvsSamplerError):
    """Scaling probe at a point where the noise schedule does not vary."""


class RunawayLoopError(DvsSamplerError):
    """Adaptive loop failed to reach the horizon within the step budget."""


class SingularityError(DvsSamplerError):
    """Bridge drift evaluated too close to its pinning time."""
