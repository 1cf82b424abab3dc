"""Exception taxonomy shared by the library and the command line tool.

The split mirrors the CLI exit codes: validation problems (bad input,
inconsistent dimensions, broken invariants) exit 1, numerical failures
(non-convergence, divergence, singular loops) exit 2, I/O trouble exits 3.
"""


class ValidationError(ValueError):
    """Input rejected before any numerics ran (bad value, shape, or key)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to produce a trustworthy result."""


class CareConvergenceError(NumericalError):
    """Riccati iteration stopped above the success residual.

    Carries the last residual so callers can report how far off it was.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual
