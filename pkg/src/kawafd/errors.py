"""Exception hierarchy.

Configuration problems (bad input, bad config files) are kept separate from
numerical failures (divergence, solver residuals, energy-ledger violations)
so the CLI can map them to distinct exit codes.
"""


class KawafdError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(KawafdError):
    """Invalid configuration: bad field values, malformed documents."""


class UsageError(KawafdError):
    """API misuse: mismatched grids, unknown names, out-of-range arguments."""


class SamplingError(KawafdError):
    """A profile evaluated to a non-finite value at some grid node."""


class NumericalError(KawafdError):
    """Base class for runtime numerical failures."""


class SolverError(NumericalError):
    """Linear solve failed or its verified residual exceeded tolerance."""


class DivergenceError(NumericalError):
    """Time stepping produced NaN or infinity."""


class LedgerError(NumericalError):
    """Strict-mode energy ledger violation (residual or mass growth)."""
