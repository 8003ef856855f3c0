"""Exception types shared across the toolkit."""


class CombatSimError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CombatSimError):
    """Malformed input data: catalogs, traces, states, or config files."""
