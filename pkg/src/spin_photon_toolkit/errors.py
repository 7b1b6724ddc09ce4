"""Exception hierarchy shared by every module.

Domain errors subclass ValueError so callers that already catch ValueError
keep working; numerical failures subclass ArithmeticError.
"""

from pathlib import Path


class SpinPhotonError(Exception):
    """Base class for all toolkit errors."""


class DomainError(SpinPhotonError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class TraceParseError(DomainError):
    """A trace file row could not be parsed or violates trace invariants."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path is not None:
            location = f"{self.path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class NumericalError(SpinPhotonError, ArithmeticError):
    """A computation produced non-finite values or failed to evaluate."""


class RankDeficiencyError(NumericalError):
    """The fit Jacobian is rank deficient at the solution."""

    def __init__(self, message: str, rank: int, n_params: int):
        self.rank = rank
        self.n_params = n_params
        super().__init__(f"{message} (rank {rank} < {n_params} free parameters)")


class SweepCellError(NumericalError):
    """A single sweep cell failed; carries the cell coordinates."""

    def __init__(self, kappa_ratio: float, gamma_star_MHz: float, cause: Exception):
        self.kappa_ratio = kappa_ratio
        self.gamma_star_MHz = gamma_star_MHz
        self.cause = cause
        super().__init__(
            f"Sweep cell failed at kappa_wg/kappa={kappa_ratio:.6g}, "
            f"gamma*={gamma_star_MHz:.6g} MHz: {cause}"
        )
