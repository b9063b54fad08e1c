"""Exception types shared across the package."""


class HypothesisViolation(ValueError):
    """A structural hypothesis of the model does not hold.

    ``hypothesis`` is a short machine-readable id such as ``"omega_gt_eta"``.
    """

    def __init__(self, hypothesis, message):
        super().__init__(f"[{hypothesis}] {message}")
        self.hypothesis = hypothesis


class UndecidableError(ValueError):
    """Series convergence cannot be decided from the available symbolic data."""


class DriftOverflowError(FloatingPointError):
    """Non-finite values appeared while evaluating the drift (step too large)."""


class UnsupportedSampling(NotImplementedError):
    """The Levy family does not support sampling."""


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""
