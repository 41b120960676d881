"""Exception types shared across the package."""


class SvcmError(Exception):
    """Base class for package-specific failures."""


class SingularDesignError(SvcmError):
    """A design or basis matrix is rank deficient where a unique fit is required."""


class ElicitationError(SvcmError):
    """No qualifying window was found when eliciting a threshold prior."""


class NumericalError(SvcmError):
    """A numerical routine failed beyond the built-in recovery attempts."""


class DataFormatError(SvcmError):
    """On-disk data is malformed or inconsistent with its metadata."""
