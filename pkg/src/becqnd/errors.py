"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """Bad or missing configuration input; message names the offending key."""


class NonPositiveOmegaMinus(ValueError):
    """The lower collective-mode frequency is not positive, so the
    quadrature mixing transformation is undefined."""


class ZeroGain(ValueError):
    """Output-spectrum quantities are undefined at zero pump amplitude."""


class StiffnessError(RuntimeError):
    """Mean-field integration step error exceeded tolerance; reduce dt."""


class DivergenceError(RuntimeError):
    """A simulated trajectory exceeded the divergence threshold."""


class InsufficientData(ValueError):
    """Too few averaging segments for a meaningful spectrum estimate."""


class NoMinimumInBracket(RuntimeError):
    """1-D minimization bracket does not contain an interior minimum."""


class DispersiveRegimeWarning(UserWarning):
    """Atom-pump detuning is not large against the vacuum Rabi rate."""


class RegimeWarning(UserWarning):
    """An approximate formula is being evaluated outside its regime."""
