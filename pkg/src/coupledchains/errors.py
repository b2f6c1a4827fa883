"""Exception types shared across the package."""


class CoupledChainsError(Exception):
    """Base class for all package errors."""


class ModelStructureError(CoupledChainsError):
    """Raised when a kernel table or model file has the wrong shape or fields."""


class ParameterError(CoupledChainsError):
    """Raised for infeasible or out-of-domain parameter combinations."""


class ConvergenceError(CoupledChainsError):
    """Raised when an iterative solver fails to reach its tolerance.

    Attributes
    ----------
    residual : float
        The residual at the point of failure.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ConditioningError(CoupledChainsError):
    """Raised when conditioning on an event of probability zero."""


class BudgetError(CoupledChainsError):
    """Raised when an enumeration would exceed the configured work budget.

    Attributes
    ----------
    estimate : int
        Estimated number of cylinders the query would have to enumerate.
    budget : int
        The budget the estimate was compared against.
    """

    def __init__(self, message: str, estimate: int, budget: int):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class AssumptionError(CoupledChainsError):
    """Raised when a model violates the standing assumptions of the bound suite.

    The two assumptions are a mismatch rate below one and a strictly positive
    next-symbol floor for the reference chain.

    Attributes
    ----------
    rho : float
        Measured mismatch rate.
    alpha : float
        Measured next-symbol floor.
    """

    def __init__(self, message: str, rho: float, alpha: float):
        super().__init__(message)
        self.rho = rho
        self.alpha = alpha
