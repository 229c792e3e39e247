"""Exception types shared across the package."""


class TrapmlError(Exception):
    """Base class for all trapml-specific errors."""


class DomainError(TrapmlError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class ConfigError(TrapmlError, ValueError):
    """A run configuration document is malformed or inconsistent."""


class IntegrationError(TrapmlError, RuntimeError):
    """The evolution integrator met a non-finite field value.

    Carries the offending time in ``t``.
    """

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t!r})")
        self.t = t


class SingularAnsatzError(TrapmlError, ValueError):
    """An ansatz was evaluated at a zero where the closed form is singular.

    Carries the offending time in ``t``.
    """

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t!r})")
        self.t = t
