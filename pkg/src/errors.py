"""
errors.py

Exception hierarchy shared by the numerical modules and the CLI.
"""


class SusyError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(SusyError, ValueError):
    """Scenario file or command-line parameters are unusable."""


class DiscretizationError(SusyError, ValueError):
    """Grid or stencil request that cannot give a usable discretization."""


class GridMismatchError(DiscretizationError):
    pass


class DomainError(SusyError, ValueError):
    """Expression evaluated outside its domain (pole, table range)."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class SingularParameterError(SusyError, ValueError):
    """A family parameter makes the potential singular inside the box."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConsistencyError(SusyError):
    """A construction precondition (Riccati, ladder, partner match) failed."""


class ConvergenceError(SusyError, RuntimeError):
    """Eigen solver or ODE integrator did not converge."""


class OutputError(SusyError, OSError):
    """Result files could not be written."""
