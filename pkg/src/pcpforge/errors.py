"""Exception types shared across the package."""


class ForgeError(Exception):
    """Base class; every error carries a short machine-readable ``code``."""

    code = "error"


class DimensionError(ForgeError, ValueError):
    code = "dimension"


class NotSymmetricError(ForgeError, ValueError):
    code = "not_symmetric"

    def __init__(self, msg="not symmetric"):
        super().__init__(msg)


class NotPseudoQuadraticError(ForgeError, ValueError):
    code = "not_pseudo_quadratic"


class InfeasibleError(ForgeError, RuntimeError):
    """Raised instead of silently approximating when a size limit is exceeded."""

    code = "infeasible"


class FoldingError(ForgeError, ValueError):
    code = "folding"


class PreconditionError(ForgeError, ValueError):
    code = "precondition"


class ParseError(ForgeError, ValueError):
    code = "parse"
