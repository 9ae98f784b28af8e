"""Exception hierarchy shared across the package."""


class SelbiasError(Exception):
    """Base class for all package-specific errors."""


class GraphError(SelbiasError):
    """Invalid graph input: unknown node ids, self loops, role violations."""


class FormatError(SelbiasError):
    """Malformed text/CSV/JSON input."""


class DataError(SelbiasError):
    """Degenerate data for a statistical procedure (constant column,
    too few rows, too few context levels, singular regression)."""


class SimulationError(SelbiasError):
    """Sampling could not complete (e.g. rejection-sampling attempt cap hit)."""


class BudgetError(SelbiasError):
    """An enumeration exceeded its tractability guard."""
