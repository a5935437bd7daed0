"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError -> 1, ConfigError -> 2.
"""


class InputError(ValueError):
    """Malformed or unusable input data (files, market quotes, dates)."""


class ConfigError(ValueError):
    """Invalid configuration: GA settings, bounds, model/bounds mismatches."""
