"""Exception types raised by the model code."""


class ModelError(ValueError):
    """Base class for invalid model inputs."""


class ParameterError(ModelError):
    """A scalar parameter violates its invariant (e.g. alpha + beta != 1)."""


class GeometryError(ModelError):
    """A cell layout is degenerate."""


class VarianceExhaustedError(ModelError):
    """The estimation-error variance leaves no variance for the estimated channel."""

    def __init__(self, link, sigma2, sigma2_eps):
        self.link = link
        self.sigma2 = sigma2
        self.sigma2_eps = sigma2_eps
        super().__init__(
            f"variance exhausted on link {link}: sigma2_eps={sigma2_eps:g} "
            f">= d^-v={sigma2:g}"
        )


class RateCollisionError(ModelError):
    """Two exponential rates in a hypoexponential sum are (numerically) equal."""
