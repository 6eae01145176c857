"""Exception types shared across the package.

Exit-code mapping used by the CLI: 0 success, 1 usage error, 2 data error,
3 numeric failure.
"""


class CrowdPulseError(Exception):
    """Base class for all package errors."""


class DataError(CrowdPulseError):
    """Malformed input files, unknown targets, bad bundles, schema violations."""

    exit_code = 2


class NumericError(CrowdPulseError):
    """Non-finite values detected during training or prediction."""

    exit_code = 3
