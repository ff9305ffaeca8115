class ClonerError(Exception):
    """Root of every error raised by cavitycloner."""


class BasisError(ClonerError, ValueError):
    pass


class QubitError(ClonerError, ValueError):
    pass


class BiasError(ClonerError, ValueError):
    pass


class DegenerateBiasError(ClonerError, ValueError):
    """The biased closed form is singular for a vanishing cycling field."""


class PropagationError(ClonerError, RuntimeError):
    pass


class ProbabilityError(ClonerError, ValueError):
    pass


class ConfigError(ClonerError, ValueError):
    pass
