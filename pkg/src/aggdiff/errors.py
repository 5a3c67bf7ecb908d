"""Exception types shared across the package."""


class AggdiffError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(AggdiffError, ValueError):
    """Invalid configuration. Carries the full list of violations found."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GridMismatchError(AggdiffError, ValueError):
    """Two objects that must share a grid do not."""


class IntegrationError(AggdiffError, RuntimeError):
    """The solver state became unusable at time ``t``."""

    def __init__(self, message, t):
        self.t = t
        super().__init__(f"{message} (t={t:g})")


class BlowupError(IntegrationError):
    """Non-finite values appeared during a time step."""

    def __init__(self, t, stage=None):
        self.stage = stage
        where = f" at stage {stage}" if stage is not None else ""
        super().__init__(f"non-finite values{where}", t)


class MassDriftError(IntegrationError):
    """Relative mass drift exceeded the strict-monitor threshold."""


class RecordFormatError(AggdiffError, ValueError):
    """A record file is malformed, truncated, or has the wrong version."""
